//! Randomized verification suites. Every case draws from its own counter
//! seeded stream, so results do not depend on scheduling; collection is
//! order-fixed by case index.

use crate::rng::SplitMix64;
use bochner_flow::linalg::inf_norm;
use bochner_flow::{
    binomial, bochner_direct, bracket_two_form, clifford_left, eigenfamilies, inner, interior,
    lie_bracket, norm_identity_check, r_ext_from_h, total_bound_report, wedge, BochnerAssembler,
    CanonicalBlocks, CurvatureOperator, EigenfamilyReport, FamilyLabel, Form, Multivector,
    ONeillTensor, Result,
};
use clap::ValueEnum;
use nalgebra::DMatrix;
use rayon::prelude::*;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Suite {
    CliffordIdentities,
    NormIdentity,
    BochnerEquivalence,
    FamilySpectrum,
    Bounds,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::CliffordIdentities => "clifford-identities",
            Suite::NormIdentity => "norm-identity",
            Suite::BochnerEquivalence => "bochner-equivalence",
            Suite::FamilySpectrum => "family-spectrum",
            Suite::Bounds => "bounds",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseRecord {
    pub suite: &'static str,
    pub case: usize,
    pub q: usize,
    pub p: usize,
    pub check: &'static str,
    pub residual: f64,
    pub pass: bool,
}

/// Acceptance tolerance of each check; a user-supplied --tol overrides all.
fn default_tol(check: &str) -> f64 {
    match check {
        "family_multiset" | "eigenvalue_bounds" => 1e-9,
        "family_psd" => 1e-12,
        _ => 1e-10,
    }
}

fn record(
    suite: &'static str,
    case: usize,
    q: usize,
    p: usize,
    check: &'static str,
    residual: f64,
    tol: Option<f64>,
) -> CaseRecord {
    let tol = tol.unwrap_or_else(|| default_tol(check));
    CaseRecord { suite, case, q, p, check, residual, pass: residual <= tol }
}

fn rand_form(rng: &mut SplitMix64, q: usize, p: usize) -> Form {
    let coeffs: Vec<f64> = (0..binomial(q, p)).map(|_| rng.range(-2.0, 2.0)).collect();
    Form::from_coeffs(q, p, coeffs).expect("dimension fixed by construction")
}

fn rand_symmetric(rng: &mut SplitMix64, q: usize) -> CurvatureOperator {
    let d = binomial(q, 2);
    let mut mat = DMatrix::zeros(d, d);
    for r in 0..d {
        for c in r..d {
            let v = rng.range(-2.0, 2.0);
            mat[(r, c)] = v;
            mat[(c, r)] = v;
        }
    }
    CurvatureOperator::new(q, mat).expect("symmetric by construction")
}

fn rand_skew(rng: &mut SplitMix64, q: usize) -> ONeillTensor {
    let mut mat = DMatrix::zeros(q, q);
    for a in 0..q {
        for b in (a + 1)..q {
            let v = rng.range(-2.0, 2.0);
            mat[(a, b)] = v;
            mat[(b, a)] = -v;
        }
    }
    ONeillTensor::new(q, mat).expect("skew by construction")
}

const SUITE_CLIFFORD: u64 = 1;
const SUITE_NORM: u64 = 2;
const SUITE_BOCHNER: u64 = 3;
const SUITE_FAMILY: u64 = 4;
const SUITE_BOUNDS: u64 = 5;

fn clifford_case(q_max: usize, seed: u64, tol: Option<f64>, case: usize) -> Result<CaseRecord> {
    let mut rng = SplitMix64::for_case(seed, SUITE_CLIFFORD, case as u64);
    let q = 2 + rng.below(q_max - 1);
    let suite = "clifford-identities";
    match case % 3 {
        0 => {
            // x(y ω) + y(x ω) = -2 <x,y> ω
            let p = rng.below(q + 1);
            let x = rand_form(&mut rng, q, 1);
            let y = rand_form(&mut rng, q, 1);
            let omega = rand_form(&mut rng, q, p);
            let mv = Multivector::from_form(&omega);
            let mut total = clifford_left(&x, &clifford_left(&y, &mv)?)?;
            total.add_scaled(&clifford_left(&y, &clifford_left(&x, &mv)?)?, 1.0);
            total.add_form(&omega, 2.0 * inner(&x, &y)?);
            let scale = (x.norm() * y.norm() * omega.norm()).max(1.0);
            Ok(record(suite, case, q, p, "vector_anticommutation", total.norm() / scale, tol))
        }
        1 => {
            // bracket with a 2-form stays in degree p, closed formula agrees
            let p = rng.below(q + 1);
            let psi = rand_form(&mut rng, q, 2);
            let omega = rand_form(&mut rng, q, p);
            let mut general = lie_bracket(&psi, &omega)?;
            general.add_form(&bracket_two_form(&psi, &omega)?, -1.0);
            let scale = (psi.norm() * omega.norm()).max(1.0);
            Ok(record(suite, case, q, p, "bracket_degree_closure", general.norm() / scale, tol))
        }
        _ => {
            // [psi, x ∧ ω] = x · [psi, ω] + 2 (x ⌟ psi) · ω + [psi, x ⌟ ω]
            let p = 1 + rng.below(q - 1);
            let psi = rand_form(&mut rng, q, 2);
            let x = rand_form(&mut rng, q, 1);
            let omega = rand_form(&mut rng, q, p);
            let lhs = bracket_two_form(&psi, &wedge(&x, &omega)?)?;
            let mut rhs = clifford_left(
                &x,
                &Multivector::from_form(&bracket_two_form(&psi, &omega)?),
            )?;
            let xpsi = interior(&x, &psi)?;
            rhs.add_scaled(&clifford_left(&xpsi, &Multivector::from_form(&omega))?, 2.0);
            rhs.add_form(&bracket_two_form(&psi, &interior(&x, &omega)?)?, 1.0);
            rhs.add_form(&lhs, -1.0);
            let scale = (psi.norm() * x.norm() * omega.norm()).max(1.0);
            Ok(record(suite, case, q, p, "bracket_wedge_derivation", rhs.norm() / scale, tol))
        }
    }
}

pub fn clifford_suite(q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    (0..500)
        .into_par_iter()
        .map(|case| clifford_case(q_max, seed, tol, case))
        .collect()
}

pub fn norm_identity_suite(q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    (0..200)
        .into_par_iter()
        .map(|case| {
            let mut rng = SplitMix64::for_case(seed, SUITE_NORM, case as u64);
            let q = 2 + rng.below(q_max - 1);
            let p = rng.below(q + 1);
            let omega = rand_form(&mut rng, q, p);
            let check_tol = tol.unwrap_or_else(|| default_tol("bracket_norm_identity"));
            let rep = norm_identity_check(&omega, check_tol)?;
            Ok(record(
                "norm-identity",
                case,
                q,
                p,
                "bracket_norm_identity",
                rep.residual,
                tol,
            ))
        })
        .collect()
}

pub fn bochner_suite(q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    let mut groups = Vec::new();
    let mut base = 0usize;
    for q in 2..=q_max {
        for p in 0..=q {
            groups.push((q, p, base));
            base += 7;
        }
    }
    let nested: Vec<Vec<CaseRecord>> = groups
        .par_iter()
        .map(|&(q, p, base)| -> Result<Vec<CaseRecord>> {
            let assembler = BochnerAssembler::new(q, p)?;
            let pf = (p * (q - p)) as f64;
            let mut out = Vec::with_capacity(7);
            for k in 0..7 {
                let case = base + k;
                let mut rng = SplitMix64::for_case(seed, SUITE_BOCHNER, case as u64);
                if k < 6 {
                    let r = rand_symmetric(&mut rng, q);
                    let quad = assembler.quadratic(&r)?;
                    let direct = bochner_direct(&r, p)?;
                    let diff = direct.mat() - quad.mat();
                    let residual = inf_norm(&diff) / inf_norm(quad.mat()).max(1.0);
                    out.push(record(
                        "bochner-equivalence",
                        case,
                        q,
                        p,
                        "direct_equals_quadratic",
                        residual,
                        tol,
                    ));
                } else {
                    let gamma = rng.range(-2.0, 2.0);
                    let quad = assembler.quadratic(&CurvatureOperator::scaled_identity(q, gamma))?;
                    let expected = gamma * pf;
                    let dim = quad.dim();
                    let diff = quad.mat() - DMatrix::identity(dim, dim).scale(expected);
                    let residual = inf_norm(&diff) / expected.abs().max(1.0);
                    out.push(record(
                        "bochner-equivalence",
                        case,
                        q,
                        p,
                        "constant_curvature_scalar",
                        residual,
                        tol,
                    ));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn family_suite(q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    let per_q = 20usize;
    let qs: Vec<usize> = (2..=q_max).collect();
    let nested: Vec<Vec<CaseRecord>> = qs
        .par_iter()
        .map(|&q| -> Result<Vec<CaseRecord>> {
            let mut out = Vec::new();
            let base = (q - 2) * per_q;
            for k in 0..per_q {
                let case = base + k;
                let mut rng = SplitMix64::for_case(seed, SUITE_FAMILY, case as u64);
                let m = q / 2;
                let mut b: Vec<f64> = (0..m)
                    .map(|_| if rng.next_f64() < 0.25 { 0.0 } else { rng.range(0.0, 2.0) })
                    .collect();
                b.sort_by(f64::total_cmp);
                let blocks = CanonicalBlocks::new(q, b.clone(), DMatrix::identity(q, q))?;
                let h = ONeillTensor::new(q, blocks.reconstruct())?;
                let r = r_ext_from_h(&h);
                let report = eigenfamilies(&blocks)?;

                let mut from_families = report.eigenvalues();
                let mut numeric = r.eigenvalues();
                from_families.sort_by(f64::total_cmp);
                numeric.sort_by(f64::total_cmp);
                let scale = numeric.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
                let mut residual = from_families
                    .iter()
                    .zip(&numeric)
                    .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
                    / scale;
                let b_sq: f64 = b.iter().map(|x| x * x).sum();
                let trace_res = (r.trace() - 3.0 * b_sq).abs() / (3.0 * b_sq).max(1.0);
                residual = residual.max(trace_res);
                out.push(record("family-spectrum", case, q, 2, "family_multiset", residual, tol));

                if let EigenfamilyReport::Labeled(fams) = &report {
                    let violation = fams
                        .iter()
                        .filter(|f| f.label == FamilyLabel::III)
                        .fold(0.0f64, |acc, f| acc.max(-f.eigenvalue));
                    out.push(record(
                        "family-spectrum",
                        case,
                        q,
                        2,
                        "family_psd",
                        violation.max(0.0),
                        tol,
                    ));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

pub fn bounds_suite(q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    (0..200)
        .into_par_iter()
        .map(|case| {
            let mut rng = SplitMix64::for_case(seed, SUITE_BOUNDS, case as u64);
            let q = 2 + rng.below(q_max - 1);
            let p = 1 + rng.below(q - 1);
            let r_res = rand_symmetric(&mut rng, q);
            let h = rand_skew(&mut rng, q);
            let rep = total_bound_report(&r_res, &h, p)?;
            let rel = |violation: f64, bound: f64| violation / bound.abs().max(1.0);
            let residual = [
                rel(rep.bound_res_lower - rep.min_eig_res, rep.bound_res_lower),
                rel(rep.max_eig_res - rep.bound_res_upper, rep.bound_res_upper),
                rel(rep.bound_ext - rep.min_eig_ext, rep.bound_ext),
                rel(rep.bound_total - rep.min_eig_total, rep.bound_total),
            ]
            .into_iter()
            .fold(0.0f64, f64::max);
            Ok(record("bounds", case, q, p, "eigenvalue_bounds", residual, tol))
        })
        .collect()
}

pub fn run(suite: Suite, q_max: usize, seed: u64, tol: Option<f64>) -> Result<Vec<CaseRecord>> {
    match suite {
        Suite::CliffordIdentities => clifford_suite(q_max, seed, tol),
        Suite::NormIdentity => norm_identity_suite(q_max, seed, tol),
        Suite::BochnerEquivalence => bochner_suite(q_max, seed, tol),
        Suite::FamilySpectrum => family_suite(q_max, seed, tol),
        Suite::Bounds => bounds_suite(q_max, seed, tol),
        Suite::All => {
            let mut all = clifford_suite(q_max, seed, tol)?;
            all.extend(norm_identity_suite(q_max, seed, tol)?);
            all.extend(bochner_suite(q_max, seed, tol)?);
            all.extend(family_suite(q_max, seed, tol)?);
            all.extend(bounds_suite(q_max, seed, tol)?);
            Ok(all)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_are_deterministic() {
        let a = run(Suite::NormIdentity, 4, 42, None).unwrap();
        let b = run(Suite::NormIdentity, 4, 42, None).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.case, y.case);
            assert_eq!(x.residual.to_bits(), y.residual.to_bits());
            assert!(x.pass);
        }
    }

    #[test]
    fn clifford_cases_cover_all_three_checks() {
        let recs = clifford_suite(4, 7, None).unwrap();
        assert_eq!(recs.len(), 500);
        for name in ["vector_anticommutation", "bracket_degree_closure", "bracket_wedge_derivation"]
        {
            assert!(recs.iter().any(|r| r.check == name));
        }
        assert!(recs.iter().all(|r| r.pass));
    }

    #[test]
    fn tight_tolerance_fails_honestly() {
        let recs = norm_identity_suite(4, 1, Some(1e-30)).unwrap();
        assert!(recs.iter().any(|r| !r.pass));
    }
}
