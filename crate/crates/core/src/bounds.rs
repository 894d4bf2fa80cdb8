//! Eigenvalue bounds for Bochner operators of split curvature, the bracket
//! norm identity behind them, and the structural characterization of forms
//! commuting with a block pair of the deformation tensor.

use crate::clifford::bracket_two_form;
use crate::curvature::{
    bochner_quadratic, canonical_form, eigenfamilies, r_ext_from_h, split_curvature,
    BochnerAssembler, CurvatureOperator, EigenfamilyReport, FamilyLabel, ONeillTensor,
};
use crate::error::{Error, Result};
use crate::exterior::{basis_multi_indices, binomial, interior, wedge, Form, MultiIndex};
use crate::linalg::nullspace;
use nalgebra::{DMatrix, DVector};

/// Both sides of 1/4 Σ_r |[psi_r, omega]|^2 = p(q-p) |omega|^2, summed over
/// the monomial 2-form basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NormIdentityReport {
    pub q: usize,
    pub p: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs - rhs| relative to the identity's right side, floored at 1.
    pub residual: f64,
    pub pass: bool,
}

pub fn norm_identity_check(omega: &Form, tol: f64) -> Result<NormIdentityReport> {
    let q = omega.q();
    let p = omega.degree();
    let mut lhs = 0.0f64;
    for idx in basis_multi_indices(q, 2) {
        let psi = Form::monomial(q, &idx)?;
        lhs += bracket_two_form(&psi, omega)?.norm_sq();
    }
    lhs *= 0.25;
    let rhs = (p * (q - p)) as f64 * omega.norm_sq();
    let residual = (lhs - rhs).abs() / rhs.abs().max(1.0);
    Ok(NormIdentityReport { q, p, lhs, rhs, residual, pass: residual <= tol })
}

/// Lower bound p(q-p+1)(gamma_min + beta_min) on the principal eigenvalue of
/// the drift Laplacian on closed forms sourced by the flow, valid for
/// 1 <= p <= floor(q/2); gamma_min bounds R_res from below and beta_min is
/// the best lower bound -b_m^2 of the induced term normalized by p(q-p).
pub fn lambda_bound(gamma_min: f64, beta_min: f64, p: usize, q: usize) -> Result<f64> {
    if p < 1 || p > q / 2 {
        return Err(Error::DegreeOutOfRange { p, q });
    }
    Ok((p * (q - p + 1)) as f64 * (gamma_min + beta_min))
}

/// Whether a reported minimum sits on its bound, with the raw gap.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualityStatus {
    pub attained: bool,
    /// min eigenvalue minus the bound; nonnegative up to roundoff whenever
    /// the bound holds.
    pub margin: f64,
}

fn equality_status(min_eig: f64, bound: f64) -> EqualityStatus {
    let tol = (1e-9 * bound.abs()).max(1e-12);
    let margin = min_eig - bound;
    EqualityStatus { attained: margin <= tol, margin }
}

/// Eigenvalue of the induced curvature term on 2-forms, with its closed-form
/// family label when available.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyValue {
    pub label: Option<FamilyLabel>,
    pub eigenvalue: f64,
}

fn family_values(report: &EigenfamilyReport) -> Vec<FamilyValue> {
    match report {
        EigenfamilyReport::Labeled(fams) => fams
            .iter()
            .map(|f| FamilyValue { label: Some(f.label.clone()), eigenvalue: f.eigenvalue })
            .collect(),
        EigenfamilyReport::NumericOnly(vals) => vals
            .iter()
            .map(|&v| FamilyValue { label: None, eigenvalue: v })
            .collect(),
    }
}

/// Bound data for the induced term alone: <B_ext omega, omega> >=
/// -p(q-p) b_m^2 |omega|^2.
#[derive(Clone, Debug)]
pub struct ExtBoundReport {
    pub q: usize,
    pub p: usize,
    pub b: Vec<f64>,
    pub bound: f64,
    pub min_eig: f64,
    pub equality: EqualityStatus,
    pub families: Vec<FamilyValue>,
}

pub fn ext_bound_report(h: &ONeillTensor, p: usize) -> Result<ExtBoundReport> {
    let q = h.q();
    if p < 1 || p + 1 > q {
        return Err(Error::DegreeOutOfRange { p, q });
    }
    let blocks = canonical_form(h)?;
    let b = blocks.b().to_vec();
    let b_max = b.last().copied().unwrap_or(0.0);
    let bound = -((p * (q - p)) as f64) * b_max * b_max;
    let op = bochner_quadratic(&r_ext_from_h(h), p)?;
    let min_eig = op.min_eigenvalue();
    let equality = equality_status(min_eig, bound);
    // equality at this bound forces equal block speeds; a counterexample
    // would mean the assembly itself is wrong
    let m = b.len();
    if equality.attained && m > 1 && p <= m {
        let spread = b.iter().fold(0.0f64, |acc, &x| acc.max((x - b_max).abs()));
        if spread > 1e-9 * b_max.max(1.0) {
            return Err(Error::Internal(format!(
                "bound attained with unequal block speeds (spread {spread:.3e})"
            )));
        }
    }
    let families = family_values(&eigenfamilies(&blocks)?);
    Ok(ExtBoundReport { q, p, b, bound, min_eig, equality, families })
}

/// Bound data for a full split operator R = R_res + R_ext(h) on degree-p
/// forms: the two-sided sandwich for the restricted part, the lower bound for
/// the induced part, their sum, and the principal-eigenvalue bound when p is
/// in range.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub q: usize,
    pub p: usize,
    pub gamma0: f64,
    pub gamma1: f64,
    pub b: Vec<f64>,
    pub bound_res_lower: f64,
    pub bound_res_upper: f64,
    pub min_eig_res: f64,
    pub max_eig_res: f64,
    pub bound_ext: f64,
    pub min_eig_ext: f64,
    pub bound_total: f64,
    pub min_eig_total: f64,
    pub bound_lambda: Option<f64>,
    pub equality_ext: EqualityStatus,
    pub families: Vec<FamilyValue>,
}

pub fn total_bound_report(
    r_res: &CurvatureOperator,
    h: &ONeillTensor,
    p: usize,
) -> Result<BoundReport> {
    let q = r_res.q();
    if h.q() != q {
        return Err(Error::RankMismatch { expected: q, got: h.q() });
    }
    if p < 1 || p + 1 > q {
        return Err(Error::DegreeOutOfRange { p, q });
    }
    let res_eigs = r_res.eigenvalues();
    let gamma0 = res_eigs[0];
    let gamma1 = res_eigs[res_eigs.len() - 1];

    let blocks = canonical_form(h)?;
    let b_max_sq = blocks.b().last().map(|&x| x * x).unwrap_or(0.0);
    let pf = (p * (q - p)) as f64;

    let assembler = BochnerAssembler::new(q, p)?;
    let op_res = assembler.quadratic(r_res)?;
    let op_ext = assembler.quadratic(&r_ext_from_h(h))?;
    let op_total = assembler.quadratic(&split_curvature(r_res, h)?)?;

    let res_spec = op_res.eigenvalues();
    let min_eig_res = res_spec[0];
    let max_eig_res = res_spec[res_spec.len() - 1];
    let min_eig_ext = op_ext.min_eigenvalue();
    let min_eig_total = op_total.min_eigenvalue();

    let bound_ext = -pf * b_max_sq;
    let bound_lambda = if (1..=q / 2).contains(&p) {
        Some(lambda_bound(gamma0, -b_max_sq, p, q)?)
    } else {
        None
    };
    let families = family_values(&eigenfamilies(&blocks)?);
    Ok(BoundReport {
        q,
        p,
        gamma0,
        gamma1,
        b: blocks.b().to_vec(),
        bound_res_lower: pf * gamma0,
        bound_res_upper: pf * gamma1,
        min_eig_res,
        max_eig_res,
        bound_ext,
        min_eig_ext,
        bound_total: pf * (gamma0 - b_max_sq),
        min_eig_total,
        bound_lambda,
        equality_ext: equality_status(min_eig_ext, bound_ext),
        families,
    })
}

/// Dual-route check that a form commutes with all four monomial 2-forms
/// crossing canonical blocks i and j exactly when it splits as
/// E ∧ omega1 + omega2 with E the blocks' 4-form and both parts free of the
/// four block indices.
#[derive(Clone, Debug)]
pub struct EqualityStructureReport {
    pub q: usize,
    pub p: usize,
    pub block_i: usize,
    pub block_j: usize,
    /// norms of the four cross-block brackets, in the order
    /// (2i-1,2j-1), (2i-1,2j), (2i,2j-1), (2i,2j)
    pub bracket_norms: [f64; 4],
    pub brackets_vanish: bool,
    /// quadruple contraction; absent below degree 4 where it is forced zero
    pub omega1: Option<Form>,
    pub omega2: Form,
    /// contractions of omega1 (when present) then omega2 by each of the four
    /// block indices
    pub contraction_residuals: Vec<f64>,
    pub structure_ok: bool,
    pub nullspace_residual: f64,
    pub nullspace_member: bool,
    /// all three routes agree on the verdict
    pub consistent: bool,
}

/// Bracket matrices and commutant nullspace for one block pair at fixed
/// degree, reusable across many forms.
pub struct EqualityChecker {
    q: usize,
    p: usize,
    block_i: usize,
    block_j: usize,
    cross_planes: [Form; 4],
    null_basis: Vec<DVector<f64>>,
}

impl EqualityChecker {
    pub fn new(q: usize, p: usize, block_i: usize, block_j: usize) -> Result<Self> {
        let m = q / 2;
        if block_i < 1 || block_i >= block_j || block_j > m {
            return Err(Error::InvalidBlockIndex { i: block_i, j: block_j, m });
        }
        if p > q {
            return Err(Error::DegreeOutOfRange { p, q });
        }
        let a = [2 * block_i - 1, 2 * block_i];
        let b = [2 * block_j - 1, 2 * block_j];
        let mut planes = Vec::with_capacity(4);
        for &x in &a {
            for &y in &b {
                planes.push(Form::monomial(q, &MultiIndex::new(vec![x, y], q)?)?);
            }
        }
        let cross_planes: [Form; 4] = planes.try_into().expect("four cross planes");

        // stacked bracket matrices; their joint kernel is the commutant
        let dim = binomial(q, p);
        let monomials = basis_multi_indices(q, p);
        let mut stacked = DMatrix::zeros(4 * dim, dim);
        for (t, psi) in cross_planes.iter().enumerate() {
            for (col, idx) in monomials.iter().enumerate() {
                let img = bracket_two_form(psi, &Form::monomial(q, idx)?)?;
                for (row, &c) in img.coeffs().iter().enumerate() {
                    stacked[(t * dim + row, col)] = c;
                }
            }
        }
        let null_basis = nullspace(&stacked, 1e-10);
        Ok(EqualityChecker { q, p, block_i, block_j, cross_planes, null_basis })
    }

    pub fn check(&self, omega: &Form, tol: f64) -> Result<EqualityStructureReport> {
        if omega.q() != self.q {
            return Err(Error::RankMismatch { expected: self.q, got: omega.q() });
        }
        if omega.degree() != self.p {
            return Err(Error::DegreeMismatch { expected: self.p, got: omega.degree() });
        }
        let q = self.q;
        let p = self.p;
        let scale = omega.norm().max(1.0);

        let mut bracket_norms = [0.0f64; 4];
        for (t, psi) in self.cross_planes.iter().enumerate() {
            bracket_norms[t] = bracket_two_form(psi, omega)?.norm();
        }
        let brackets_vanish = bracket_norms.iter().all(|&n| n <= tol * scale);

        let four = [
            2 * self.block_i - 1,
            2 * self.block_i,
            2 * self.block_j - 1,
            2 * self.block_j,
        ];
        let (omega1, omega2) = if p >= 4 {
            let mut w = omega.clone();
            for &k in &four {
                w = interior(&Form::basis_one(q, k)?, &w)?;
            }
            let e_block = Form::monomial(q, &MultiIndex::new(four.to_vec(), q)?)?;
            let mut rest = omega.clone();
            rest.add_scaled(&wedge(&e_block, &w)?, -1.0);
            (Some(w), rest)
        } else {
            (None, omega.clone())
        };

        let mut contraction_residuals = Vec::new();
        if let Some(w) = &omega1 {
            if w.degree() > 0 {
                for &k in &four {
                    contraction_residuals.push(interior(&Form::basis_one(q, k)?, w)?.norm());
                }
            } else {
                contraction_residuals.extend([0.0; 4]);
            }
        }
        if omega2.degree() > 0 {
            for &k in &four {
                contraction_residuals.push(interior(&Form::basis_one(q, k)?, &omega2)?.norm());
            }
        } else {
            contraction_residuals.extend([0.0; 4]);
        }
        let structure_ok = contraction_residuals.iter().all(|&r| r <= tol * scale);

        let v = DVector::from_column_slice(omega.coeffs());
        let mut proj = DVector::zeros(v.len());
        for n in &self.null_basis {
            proj.axpy(n.dot(&v), n, 1.0);
        }
        let nullspace_residual = (&v - &proj).norm();
        let nullspace_member = nullspace_residual <= tol * scale;

        let consistent =
            brackets_vanish == structure_ok && brackets_vanish == nullspace_member;
        Ok(EqualityStructureReport {
            q,
            p,
            block_i: self.block_i,
            block_j: self.block_j,
            bracket_norms,
            brackets_vanish,
            omega1,
            omega2,
            contraction_residuals,
            structure_ok,
            nullspace_residual,
            nullspace_member,
            consistent,
        })
    }
}

/// One-off version of [`EqualityChecker`] for a single form.
pub fn equality_structure_check(
    omega: &Form,
    block_i: usize,
    block_j: usize,
    tol: f64,
) -> Result<EqualityStructureReport> {
    EqualityChecker::new(omega.q(), omega.degree(), block_i, block_j)?.check(omega, tol)
}
