//! Deterministic emitters. Field order is fixed in code, floats are printed
//! with 17 significant digits in scientific notation, and nothing iterates a
//! hash map, so identical inputs serialize to identical bytes.

use crate::suites::CaseRecord;
use bochner_flow::{BoundReport, EqualityStructureReport, SelfCheckItem};

/// 17 significant digits, negative zero normalized. The output is a valid
/// JSON number.
pub fn fmt_f64(x: f64) -> String {
    let v = if x == 0.0 { 0.0 } else { x };
    format!("{v:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_f64_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", parts.join(","))
}

fn csv_f64_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_f64(x)).collect();
    parts.join(";")
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub struct VerifyMeta {
    pub suite: String,
    pub q_max: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

fn case_json(c: &CaseRecord) -> String {
    format!(
        "{{\"suite\":\"{}\",\"case\":{},\"q\":{},\"p\":{},\"check\":\"{}\",\"residual\":{},\"pass\":{}}}",
        c.suite,
        c.case,
        c.q,
        c.p,
        c.check,
        fmt_f64(c.residual),
        c.pass
    )
}

pub fn verify_json(meta: &VerifyMeta, cases: &[CaseRecord]) -> String {
    let failed = cases.iter().filter(|c| !c.pass).count();
    let tol = match meta.tol {
        Some(t) => fmt_f64(t),
        None => "null".to_string(),
    };
    let mut out = format!(
        "{{\"command\":\"verify\",\"suite\":\"{}\",\"q_max\":{},\"seed\":{},\"tol\":{},\"cases\":[",
        json_escape(&meta.suite),
        meta.q_max,
        meta.seed,
        tol
    );
    for (k, c) in cases.iter().enumerate() {
        out.push('\n');
        out.push_str(&case_json(c));
        if k + 1 < cases.len() {
            out.push(',');
        } else {
            out.push('\n');
        }
    }
    out.push_str(&format!(
        "],\"total\":{},\"failed\":{},\"pass\":{}}}",
        cases.len(),
        failed,
        failed == 0
    ));
    out
}

pub fn verify_csv(cases: &[CaseRecord]) -> String {
    let mut out = String::from("suite,case,q,p,check,residual,status");
    for c in cases {
        out.push_str(&format!(
            "\n{},{},{},{},{},{},{}",
            c.suite,
            c.case,
            c.q,
            c.p,
            c.check,
            fmt_f64(c.residual),
            status(c.pass)
        ));
    }
    out
}

fn families_json(rep: &BoundReport) -> String {
    let parts: Vec<String> = rep
        .families
        .iter()
        .map(|f| {
            let label = match &f.label {
                Some(l) => format!("\"{l}\""),
                None => "null".to_string(),
            };
            format!("{{\"label\":{label},\"eigenvalue\":{}}}", fmt_f64(f.eigenvalue))
        })
        .collect();
    format!("[{}]", parts.join(","))
}

fn families_csv(rep: &BoundReport) -> String {
    let parts: Vec<String> = rep
        .families
        .iter()
        .map(|f| {
            let label = match &f.label {
                Some(l) => l.to_string(),
                None => "-".to_string(),
            };
            format!("{label}:{}", fmt_f64(f.eigenvalue))
        })
        .collect();
    parts.join(";")
}

pub fn bound_report_json(rep: &BoundReport) -> String {
    let lambda = match rep.bound_lambda {
        Some(v) => fmt_f64(v),
        None => "null".to_string(),
    };
    format!(
        "{{\"q\":{},\"p\":{},\"gamma0\":{},\"gamma1\":{},\"b\":{},\"bound_ext\":{},\"bound_total\":{},\"bound_lambda\":{},\"min_eig_ext\":{},\"min_eig_total\":{},\"equality_ext\":{{\"flag\":{},\"margin\":{}}},\"families\":{}}}",
        rep.q,
        rep.p,
        fmt_f64(rep.gamma0),
        fmt_f64(rep.gamma1),
        json_f64_list(&rep.b),
        fmt_f64(rep.bound_ext),
        fmt_f64(rep.bound_total),
        lambda,
        fmt_f64(rep.min_eig_ext),
        fmt_f64(rep.min_eig_total),
        rep.equality_ext.attained,
        fmt_f64(rep.equality_ext.margin),
        families_json(rep)
    )
}

pub const BOUND_CSV_HEADER: &str = "q,p,gamma0,gamma1,b,bound_ext,bound_total,bound_lambda,min_eig_ext,min_eig_total,equality_flag,equality_margin,families";

pub fn bound_report_csv_row(rep: &BoundReport) -> String {
    let lambda = match rep.bound_lambda {
        Some(v) => fmt_f64(v),
        None => String::new(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        rep.q,
        rep.p,
        fmt_f64(rep.gamma0),
        fmt_f64(rep.gamma1),
        csv_f64_list(&rep.b),
        fmt_f64(rep.bound_ext),
        fmt_f64(rep.bound_total),
        lambda,
        fmt_f64(rep.min_eig_ext),
        fmt_f64(rep.min_eig_total),
        rep.equality_ext.attained,
        fmt_f64(rep.equality_ext.margin),
        families_csv(rep)
    )
}

pub fn bound_report_csv(rep: &BoundReport) -> String {
    format!("{BOUND_CSV_HEADER}\n{}", bound_report_csv_row(rep))
}

pub struct LambdaOutput {
    pub q: usize,
    pub p: usize,
    pub gamma_min: f64,
    pub beta_min: f64,
    pub value: f64,
}

pub fn lambda_json(out: &LambdaOutput) -> String {
    format!(
        "{{\"command\":\"bound\",\"q\":{},\"p\":{},\"gamma_min\":{},\"beta_min\":{},\"value\":{}}}",
        out.q,
        out.p,
        fmt_f64(out.gamma_min),
        fmt_f64(out.beta_min),
        fmt_f64(out.value)
    )
}

pub fn lambda_csv(out: &LambdaOutput) -> String {
    format!(
        "q,p,gamma_min,beta_min,value\n{},{},{},{},{}",
        out.q,
        out.p,
        fmt_f64(out.gamma_min),
        fmt_f64(out.beta_min),
        fmt_f64(out.value)
    )
}

pub struct ModelOutput {
    pub model: String,
    pub q: usize,
    pub p: usize,
    pub checks: Vec<SelfCheckItem>,
    pub report: BoundReport,
    pub pass: bool,
}

fn check_json(c: &SelfCheckItem) -> String {
    format!(
        "{{\"key\":\"{}\",\"kind\":\"{}\",\"expected\":{},\"actual\":{},\"residual\":{},\"pass\":{}}}",
        json_escape(&c.key),
        c.kind.name(),
        fmt_f64(c.expected),
        fmt_f64(c.actual),
        fmt_f64(c.residual),
        c.pass
    )
}

pub fn model_json(out: &ModelOutput) -> String {
    let mut s = format!(
        "{{\"command\":\"model\",\"model\":\"{}\",\"q\":{},\"p\":{},\"checks\":[",
        json_escape(&out.model),
        out.q,
        out.p
    );
    for (k, c) in out.checks.iter().enumerate() {
        s.push('\n');
        s.push_str(&check_json(c));
        if k + 1 < out.checks.len() {
            s.push(',');
        } else {
            s.push('\n');
        }
    }
    s.push_str(&format!(
        "],\"report\":{},\"pass\":{}}}",
        bound_report_json(&out.report),
        out.pass
    ));
    s
}

pub fn model_csv(out: &ModelOutput) -> String {
    let mut s = String::from("key,kind,expected,actual,residual,status");
    for c in &out.checks {
        s.push_str(&format!(
            "\n{},{},{},{},{},{}",
            c.key,
            c.kind.name(),
            fmt_f64(c.expected),
            fmt_f64(c.actual),
            fmt_f64(c.residual),
            status(c.pass)
        ));
    }
    s.push_str("\n\n");
    s.push_str(&bound_report_csv(&out.report));
    s
}

pub struct EqualityScanOutput {
    pub q: usize,
    pub p: usize,
    pub b: Vec<f64>,
    pub bound: f64,
    pub min_eig: f64,
    pub attained: bool,
    pub margin: f64,
    pub blocks_all_equal: bool,
    pub branch: &'static str,
    pub pairs: Vec<EqualityStructureReport>,
}

fn pair_json(rep: &EqualityStructureReport) -> String {
    format!(
        "{{\"i\":{},\"j\":{},\"bracket_norms\":{},\"vanish\":{},\"structure_ok\":{},\"nullspace_member\":{},\"consistent\":{}}}",
        rep.block_i,
        rep.block_j,
        json_f64_list(&rep.bracket_norms),
        rep.brackets_vanish,
        rep.structure_ok,
        rep.nullspace_member,
        rep.consistent
    )
}

pub fn equality_scan_json(out: &EqualityScanOutput) -> String {
    let mut s = format!(
        "{{\"command\":\"equality-scan\",\"q\":{},\"p\":{},\"b\":{},\"bound\":{},\"min_eig\":{},\"attained\":{},\"margin\":{},\"blocks_all_equal\":{},\"branch\":\"{}\",\"pairs\":[",
        out.q,
        out.p,
        json_f64_list(&out.b),
        fmt_f64(out.bound),
        fmt_f64(out.min_eig),
        out.attained,
        fmt_f64(out.margin),
        out.blocks_all_equal,
        out.branch
    );
    for (k, rep) in out.pairs.iter().enumerate() {
        s.push('\n');
        s.push_str(&pair_json(rep));
        if k + 1 < out.pairs.len() {
            s.push(',');
        } else {
            s.push('\n');
        }
    }
    s.push_str("]}");
    s
}

pub fn equality_scan_csv(out: &EqualityScanOutput) -> String {
    let mut s = format!(
        "q,p,b,bound,min_eig,attained,margin,blocks_all_equal,branch\n{},{},{},{},{},{},{},{},{}",
        out.q,
        out.p,
        csv_f64_list(&out.b),
        fmt_f64(out.bound),
        fmt_f64(out.min_eig),
        out.attained,
        fmt_f64(out.margin),
        out.blocks_all_equal,
        out.branch
    );
    s.push_str("\n\ni,j,bracket_11,bracket_12,bracket_21,bracket_22,vanish,structure_ok,nullspace_member,consistent");
    for rep in &out.pairs {
        s.push_str(&format!(
            "\n{},{},{},{},{},{},{},{},{},{}",
            rep.block_i,
            rep.block_j,
            fmt_f64(rep.bracket_norms[0]),
            fmt_f64(rep.bracket_norms[1]),
            fmt_f64(rep.bracket_norms[2]),
            fmt_f64(rep.bracket_norms[3]),
            rep.brackets_vanish,
            rep.structure_ok,
            rep.nullspace_member,
            rep.consistent
        ))
    }
    s
}
