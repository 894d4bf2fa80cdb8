//! Command line front end over the bochner-flow library: seeded verification
//! suites and deterministic spectrum, bound, model, and equality reports.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
//! configuration error.

pub mod report;
pub mod rng;
pub mod suites;

use std::path::PathBuf;

use bochner_flow::{
    bochner_quadratic, constant_curvature, ext_bound_report, hopf, lambda_bound, r_ext_from_h,
    sphere_minimal, strict_product, tilted_product, total_bound_report, CurvatureOperator,
    EqualityChecker, Error, ModelFlow, ONeillTensor,
};
use clap::{Parser, Subcommand, ValueEnum};
use report::{EqualityScanOutput, LambdaOutput, ModelOutput, VerifyMeta};
use suites::Suite;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "bochner-flow",
    version,
    about = "Verification suites and eigenvalue reports for curvature operators of Riemannian flows"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded verification suites and report per-case residuals
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Largest frame rank exercised by randomized cases
        #[arg(long, default_value_t = 6)]
        q_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Overrides every check's acceptance tolerance
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the report here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bound report for R = gamma0 * Id plus the deformation term of b
    Spectrum {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
        /// Canonical block speeds, comma separated, floor(q/2) entries
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        gamma0: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal eigenvalue lower bound p(q-p+1)(gamma_min + beta_min)
    Bound {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
        /// Lower bound for the restricted curvature operator
        #[arg(long, default_value_t = 0.0)]
        gamma0: f64,
        /// Canonical block speeds; beta_min is -max(b_i^2)
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a model flow, run its self-checks, and report the bound at p
    Model {
        /// constant | hopf | sphere-minimal | tilted-product | strict-product
        name: String,
        /// Block count for hopf-type models; sphere-minimal uses n = 2m + 1
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Frame rank, constant-curvature model only
        #[arg(long)]
        q: Option<usize>,
        /// Curvature scale, constant-curvature model only
        #[arg(long)]
        gamma0: Option<f64>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket diagnosis of the minimizing eigenform for every block pair
    EqualityScan {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
        /// Canonical block speeds, ascending and nonnegative
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Math(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ModelPrecondition(msg) => CliError::Config(msg),
            other => CliError::Math(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run() -> i32 {
    let cli = Cli::parse();
    configure_threads();
    match execute(cli.command) {
        Ok(code) => code,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Math(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("BOCHNER_FLOW_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid BOCHNER_FLOW_THREADS={v}"),
        }
    }
}

fn execute(command: Command) -> CliResult<i32> {
    match command {
        Command::Verify { suite, q_max, seed, tol, format, out } => {
            cmd_verify(suite, q_max, seed, tol, format, out)
        }
        Command::Spectrum { q, p, b, gamma0, format, out } => {
            cmd_spectrum(q, p, b, gamma0, format, out)
        }
        Command::Bound { q, p, gamma0, b, format, out } => cmd_bound(q, p, gamma0, b, format, out),
        Command::Model { name, m, q, gamma0, p, tol, format, out } => {
            cmd_model(&name, m, q, gamma0, p, tol, format, out)
        }
        Command::EqualityScan { q, p, b, tol, format, out } => {
            cmd_equality_scan(q, p, b, tol, format, out)
        }
    }
}

fn emit(out: Option<&PathBuf>, payload: &str) -> CliResult<()> {
    let mut bytes = payload.to_string();
    bytes.push('\n');
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes.as_bytes())
                .map_err(|e| CliError::Config(format!("cannot write report: {e}")))
        }
    }
}

fn check_tol(tol: f64) -> CliResult<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("--tol must be positive, got {tol}")))
    }
}

fn check_rank(q: usize) -> CliResult<()> {
    if (2..=10).contains(&q) {
        Ok(())
    } else {
        Err(CliError::Config(format!("q must be between 2 and 10, got {q}")))
    }
}

fn check_degree(p: usize, q: usize) -> CliResult<()> {
    if (1..q).contains(&p) {
        Ok(())
    } else {
        Err(CliError::Config(format!("p must satisfy 1 <= p <= q-1 = {}, got {p}", q - 1)))
    }
}

fn check_blocks(b: &[f64], q: usize) -> CliResult<()> {
    if b.len() != q / 2 {
        return Err(CliError::Config(format!(
            "expected floor(q/2) = {} block speeds, got {}",
            q / 2,
            b.len()
        )));
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Config("block speeds must be finite".into()));
    }
    Ok(())
}

fn cmd_verify(
    suite: Suite,
    q_max: usize,
    seed: u64,
    tol: Option<f64>,
    format: Format,
    out: Option<PathBuf>,
) -> CliResult<i32> {
    if !(2..=10).contains(&q_max) {
        return Err(CliError::Config(format!("--q-max must be between 2 and 10, got {q_max}")));
    }
    if let Some(t) = tol {
        check_tol(t)?;
    }
    let records = suites::run(suite, q_max, seed, tol)?;
    let meta = VerifyMeta { suite: suite.name().to_string(), q_max, seed, tol };
    let payload = match format {
        Format::Json => report::verify_json(&meta, &records),
        Format::Csv => report::verify_csv(&records),
    };
    emit(out.as_ref(), &payload)?;
    Ok(if records.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn cmd_spectrum(
    q: usize,
    p: usize,
    b: Vec<f64>,
    gamma0: f64,
    format: Format,
    out: Option<PathBuf>,
) -> CliResult<i32> {
    check_rank(q)?;
    check_degree(p, q)?;
    check_blocks(&b, q)?;
    let h = ONeillTensor::from_blocks(q, &b)?;
    let r_res = CurvatureOperator::scaled_identity(q, gamma0);
    let rep = total_bound_report(&r_res, &h, p)?;
    let payload = match format {
        Format::Json => report::bound_report_json(&rep),
        Format::Csv => report::bound_report_csv(&rep),
    };
    emit(out.as_ref(), &payload)?;
    Ok(0)
}

fn cmd_bound(
    q: usize,
    p: usize,
    gamma0: f64,
    b: Vec<f64>,
    format: Format,
    out: Option<PathBuf>,
) -> CliResult<i32> {
    check_rank(q)?;
    if p < 1 || p > q / 2 {
        return Err(CliError::Config(format!(
            "the principal eigenvalue bound needs 1 <= p <= floor(q/2) = {}, got {p}",
            q / 2
        )));
    }
    check_blocks(&b, q)?;
    let beta_min = -b.iter().fold(0.0f64, |acc, &x| acc.max(x * x));
    let value = lambda_bound(gamma0, beta_min, p, q)?;
    let outp = LambdaOutput { q, p, gamma_min: gamma0, beta_min, value };
    let payload = match format {
        Format::Json => report::lambda_json(&outp),
        Format::Csv => report::lambda_csv(&outp),
    };
    emit(out.as_ref(), &payload)?;
    Ok(0)
}

fn build_model(
    name: &str,
    m: usize,
    q: Option<usize>,
    gamma0: Option<f64>,
) -> CliResult<ModelFlow> {
    let normalized = name.to_ascii_lowercase().replace('_', "-");
    let model = match normalized.as_str() {
        "constant" | "constant-curvature" => {
            let q = q.ok_or_else(|| {
                CliError::Config("model constant requires --q".to_string())
            })?;
            let g = gamma0.ok_or_else(|| {
                CliError::Config("model constant requires --gamma0".to_string())
            })?;
            constant_curvature(q, g)?
        }
        "hopf" => hopf(m)?,
        "sphere-minimal" => sphere_minimal(2 * m + 1)?,
        "tilted-product" => tilted_product(m)?,
        "strict-product" => strict_product(m)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown model '{other}'; expected constant, hopf, sphere-minimal, \
                 tilted-product, strict-product"
            )))
        }
    };
    Ok(model)
}

#[allow(clippy::too_many_arguments)]
fn cmd_model(
    name: &str,
    m: usize,
    q: Option<usize>,
    gamma0: Option<f64>,
    p: Option<usize>,
    tol: f64,
    format: Format,
    out: Option<PathBuf>,
) -> CliResult<i32> {
    check_tol(tol)?;
    let model = build_model(name, m, q, gamma0)?;
    let qq = model.q;
    let p = p.unwrap_or(if qq >= 3 { 2 } else { 1 });
    check_degree(p, qq)?;
    let checks = model.self_check(tol)?;
    let rep = total_bound_report(&model.r_res, &model.h, p)?;
    let pass = checks.iter().all(|c| c.pass);
    let outp = ModelOutput {
        model: model.kind.name().to_string(),
        q: qq,
        p,
        checks,
        report: rep,
        pass,
    };
    let payload = match format {
        Format::Json => report::model_json(&outp),
        Format::Csv => report::model_csv(&outp),
    };
    emit(out.as_ref(), &payload)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_equality_scan(
    q: usize,
    p: usize,
    b: Vec<f64>,
    tol: f64,
    format: Format,
    out: Option<PathBuf>,
) -> CliResult<i32> {
    check_rank(q)?;
    check_degree(p, q)?;
    check_blocks(&b, q)?;
    check_tol(tol)?;
    if b.windows(2).any(|w| w[0] > w[1]) || b.iter().any(|&x| x < 0.0) {
        return Err(CliError::Config(
            "block speeds must be ascending and nonnegative".to_string(),
        ));
    }
    let h = ONeillTensor::from_blocks(q, &b)?;
    let ext = ext_bound_report(&h, p)?;
    let operator = bochner_quadratic(&r_ext_from_h(&h), p)?;
    let (min_eig, minimizer) = operator.min_eigenpair();
    let m = q / 2;
    let mut pairs = Vec::new();
    for i in 1..=m {
        for j in (i + 1)..=m {
            let checker = EqualityChecker::new(q, p, i, j)?;
            pairs.push(checker.check(&minimizer, tol)?);
        }
    }
    let branch = if pairs.is_empty() {
        "no_pairs"
    } else if pairs.iter().any(|r| r.brackets_vanish) {
        "commuting_pair"
    } else {
        "no_commuting_pair"
    };
    let bmax = b.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let bmin = b.iter().fold(f64::INFINITY, |acc, &x| acc.min(x));
    let blocks_all_equal = bmax - bmin <= 1e-12 * bmax.max(1.0);
    let consistent = pairs.iter().all(|r| r.consistent);
    let outp = EqualityScanOutput {
        q,
        p,
        b,
        bound: ext.bound,
        min_eig,
        attained: ext.equality.attained,
        margin: ext.equality.margin,
        blocks_all_equal,
        branch,
        pairs,
    };
    let payload = match format {
        Format::Json => report::equality_scan_json(&outp),
        Format::Csv => report::equality_scan_csv(&outp),
    };
    emit(out.as_ref(), &payload)?;
    Ok(if consistent { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_names_accept_both_separators() {
        assert!(build_model("strict_product", 2, None, None).is_ok());
        assert!(build_model("strict-product", 2, None, None).is_ok());
        assert!(build_model("nosuch", 2, None, None).is_err());
    }

    #[test]
    fn model_preconditions_are_config_errors() {
        match build_model("hopf", 1, None, None) {
            Err(CliError::Config(_)) => {}
            _ => panic!("hopf with one block must be a config error"),
        }
    }

    #[test]
    fn degree_and_block_validation() {
        assert!(check_degree(0, 4).is_err());
        assert!(check_degree(4, 4).is_err());
        assert!(check_degree(3, 4).is_ok());
        assert!(check_blocks(&[1.0, 2.0], 4).is_ok());
        assert!(check_blocks(&[1.0], 4).is_err());
    }
}
