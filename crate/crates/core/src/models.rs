//! Reference flows with known curvature data: constant-curvature operators,
//! the Hopf flows of odd round spheres, and the straight and tilted flows on
//! a line-times-sphere product. Each model carries frozen expected values and
//! can recompute them from its own operators.

use crate::bounds::total_bound_report;
use crate::curvature::{
    bochner_direct, bochner_quadratic, canonical_form, sphere_oneill_check, split_curvature,
    CurvatureOperator, ONeillTensor,
};
use crate::error::{Error, Result};
use crate::exterior::{Form, MultiIndex};
use crate::linalg::{inf_norm, max_abs, plane_map};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Sum of the canonical coordinate planes e_{2i-1} ∧ e_{2i}, i = 1..floor(q/2).
pub fn kahler_form(q: usize) -> Result<Form> {
    let mut omega = Form::zero(q, 2)?;
    for i in 1..=(q / 2) {
        let idx = MultiIndex::new(vec![2 * i - 1, 2 * i], q)?;
        omega.add_scaled(&Form::monomial(q, &idx)?, 1.0);
    }
    Ok(omega)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    ConstantCurvature,
    Hopf,
    TiltedProduct,
    StrictProduct,
    SphereMinimal,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::ConstantCurvature => "constant",
            ModelKind::Hopf => "hopf",
            ModelKind::TiltedProduct => "tilted-product",
            ModelKind::StrictProduct => "strict-product",
            ModelKind::SphereMinimal => "sphere-minimal",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectationKind {
    /// closed form from the structure of the model
    Analytic,
    /// frozen from an independent numerical evaluation
    Numeric,
}

impl ExpectationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExpectationKind::Analytic => "analytic",
            ExpectationKind::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expectation {
    pub value: f64,
    pub kind: ExpectationKind,
}

fn analytic(value: f64) -> Expectation {
    Expectation { value, kind: ExpectationKind::Analytic }
}

fn numeric(value: f64) -> Expectation {
    Expectation { value, kind: ExpectationKind::Numeric }
}

/// Ambient data for models realized inside a larger space: the full ambient
/// curvature operator, the unit flow direction, and the transverse frame
/// (columns, orthonormal and orthogonal to the flow).
#[derive(Clone, Debug)]
pub struct AmbientModel {
    pub r_full: CurvatureOperator,
    pub xi: DVector<f64>,
    pub frame: DMatrix<f64>,
}

impl AmbientModel {
    fn validate(&self, q: usize) -> Result<()> {
        let n = self.xi.len();
        if self.r_full.q() != n {
            return Err(Error::RankMismatch { expected: n, got: self.r_full.q() });
        }
        if self.frame.nrows() != n || self.frame.ncols() != q {
            return Err(Error::DimensionMismatch { expected: q, got: self.frame.ncols() });
        }
        let mut full = DMatrix::zeros(n, q + 1);
        full.set_column(0, &self.xi);
        for c in 0..q {
            full.set_column(c + 1, &self.frame.column(c).into_owned());
        }
        let gram = full.transpose() * &full;
        let residual = max_abs(&(&gram - &DMatrix::identity(q + 1, q + 1)));
        if residual > 1e-12 {
            return Err(Error::Internal(format!(
                "ambient frame is not orthonormal: residual {residual:.3e}"
            )));
        }
        Ok(())
    }

    /// Restriction of the ambient operator to transverse frame planes.
    pub fn restrict(&self) -> Result<CurvatureOperator> {
        let w = plane_map(&self.frame);
        CurvatureOperator::new(self.frame.ncols(), w.transpose() * self.r_full.mat() * w)
    }

    /// Ambient operator rewritten in the frame (xi, f_1, ..., f_q); rank q+1.
    pub fn in_flow_frame(&self) -> Result<CurvatureOperator> {
        let n = self.xi.len();
        let q = self.frame.ncols();
        let mut basis = DMatrix::zeros(n, q + 1);
        basis.set_column(0, &self.xi);
        for c in 0..q {
            basis.set_column(c + 1, &self.frame.column(c).into_owned());
        }
        let w = plane_map(&basis);
        CurvatureOperator::new(q + 1, w.transpose() * self.r_full.mat() * w)
    }
}

/// A flow model: transverse curvature data plus frozen expectations keyed by
/// quantity name.
#[derive(Clone, Debug)]
pub struct ModelFlow {
    pub kind: ModelKind,
    pub q: usize,
    pub r_res: CurvatureOperator,
    pub h: ONeillTensor,
    pub test_forms: BTreeMap<String, Form>,
    pub expected: BTreeMap<String, Expectation>,
    pub ambient: Option<AmbientModel>,
}

/// Flat deformation, constant transverse curvature gamma.
pub fn constant_curvature(q: usize, gamma: f64) -> Result<ModelFlow> {
    if q < 2 {
        return Err(Error::ModelPrecondition(format!("constant model needs q >= 2, got {q}")));
    }
    let mut expected = BTreeMap::new();
    expected.insert("gamma0".into(), analytic(gamma));
    expected.insert("gamma1".into(), analytic(gamma));
    expected.insert("b_max_sq".into(), analytic(0.0));
    if q >= 3 {
        let pf2 = (2 * (q - 2)) as f64;
        expected.insert("bound_total_p2".into(), analytic(pf2 * gamma));
        expected.insert("min_eig_total_p2".into(), analytic(pf2 * gamma));
        expected.insert("rayleigh_kahler_p2".into(), analytic(pf2 * gamma));
    }
    expected.insert("bochner_identity_residual_p1".into(), analytic(0.0));
    let mut test_forms = BTreeMap::new();
    test_forms.insert("kahler".into(), kahler_form(q)?);
    Ok(ModelFlow {
        kind: ModelKind::ConstantCurvature,
        q,
        r_res: CurvatureOperator::scaled_identity(q, gamma),
        h: ONeillTensor::zero(q),
        test_forms,
        expected,
        ambient: None,
    })
}

fn round_sphere_ambient(m: usize) -> (AmbientModel, usize) {
    // unit flow on the round sphere of dimension 2m+1, frame led by the flow
    let q = 2 * m;
    let n = q + 1;
    let mut xi = DVector::zeros(n);
    xi[0] = 1.0;
    let mut frame = DMatrix::zeros(n, q);
    for k in 0..q {
        frame[(k + 1, k)] = 1.0;
    }
    (AmbientModel { r_full: CurvatureOperator::identity(n), xi, frame }, q)
}

fn hopf_like(kind: ModelKind, m: usize) -> Result<ModelFlow> {
    let (ambient, q) = round_sphere_ambient(m);
    ambient.validate(q)?;
    let r_res = ambient.restrict()?;
    let h = ONeillTensor::from_blocks(q, &vec![1.0; m])?;
    let mut expected = BTreeMap::new();
    expected.insert("gamma0".into(), analytic(1.0));
    expected.insert("gamma1".into(), analytic(1.0));
    expected.insert("b_max_sq".into(), analytic(1.0));
    if q >= 3 {
        expected.insert("bound_total_p2".into(), analytic(0.0));
        expected.insert("min_eig_total_p2".into(), analytic(0.0));
        expected.insert("rayleigh_kahler_p2".into(), analytic(0.0));
    }
    expected.insert("oneill_residual".into(), analytic(0.0));
    expected.insert("bochner_identity_residual_p1".into(), analytic(0.0));
    let mut test_forms = BTreeMap::new();
    test_forms.insert("kahler".into(), kahler_form(q)?);
    Ok(ModelFlow { kind, q, r_res, h, test_forms, expected, ambient: Some(ambient) })
}

/// Hopf flow on the round sphere of dimension 2m+1; the quotient is the
/// complex projective space of holomorphic curvature 4. The equality
/// statement this model exercises concerns several blocks, hence m >= 2.
pub fn hopf(m: usize) -> Result<ModelFlow> {
    if m < 2 {
        return Err(Error::ModelPrecondition(format!("hopf model needs m >= 2, got {m}")));
    }
    hopf_like(ModelKind::Hopf, m)
}

/// Minimal unit flow on the round sphere of odd dimension n, presented
/// through its ambient data; the transverse rank is n-1.
pub fn sphere_minimal(n: usize) -> Result<ModelFlow> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::ModelPrecondition(format!(
            "sphere model needs odd ambient dimension n >= 3, got {n}"
        )));
    }
    hopf_like(ModelKind::SphereMinimal, (n - 1) / 2)
}

fn product_ambient(m: usize) -> AmbientModel {
    // line times round sphere of dimension 2m+1: ambient index 0 is the line
    // direction, indices 1..=2m+1 span the sphere; sphere planes carry
    // curvature 1, planes touching the line carry 0
    let n = 2 * m + 2;
    let pairs = crate::linalg::pair_list(n);
    let dim = pairs.len();
    let mut mat = DMatrix::zeros(dim, dim);
    for (r, &(a, _b)) in pairs.iter().enumerate() {
        if a >= 1 {
            mat[(r, r)] = 1.0;
        }
    }
    let r_full = CurvatureOperator::new(n, mat).expect("diagonal ambient operator");
    // placeholder flow data; callers overwrite xi and frame
    let xi = DVector::zeros(n);
    let frame = DMatrix::zeros(n, n - 1);
    AmbientModel { r_full, xi, frame }
}

/// Flow along the diagonal of the line direction and the sphere's Hopf
/// direction in a line-times-sphere product; the sphere has dimension 2m+1.
pub fn tilted_product(m: usize) -> Result<ModelFlow> {
    if m < 2 {
        return Err(Error::ModelPrecondition(format!(
            "tilted-product model needs m >= 2, got {m}"
        )));
    }
    let q = 2 * m + 1;
    let n = q + 1;
    let mut ambient = product_ambient(m);
    let s = 0.5f64.sqrt();
    let mut xi = DVector::zeros(n);
    xi[0] = s;
    xi[n - 1] = s;
    let mut frame = DMatrix::zeros(n, q);
    for k in 0..(2 * m) {
        frame[(k + 1, k)] = 1.0;
    }
    frame[(0, q - 1)] = s;
    frame[(n - 1, q - 1)] = -s;
    ambient.xi = xi;
    ambient.frame = frame;
    ambient.validate(q)?;
    let r_res = ambient.restrict()?;
    let h = ONeillTensor::from_blocks(q, &vec![s; m])?;
    let mut expected = BTreeMap::new();
    expected.insert("gamma0".into(), analytic(0.5));
    expected.insert("gamma1".into(), analytic(1.0));
    expected.insert("b_max_sq".into(), analytic(0.5));
    expected.insert("bound_total_p2".into(), analytic(0.0));
    expected.insert("rayleigh_kahler_p2".into(), numeric((2 * m - 1) as f64));
    expected.insert("oneill_residual".into(), analytic(0.0));
    expected.insert("bochner_identity_residual_p1".into(), analytic(0.0));
    let mut test_forms = BTreeMap::new();
    test_forms.insert("kahler".into(), kahler_form(q)?);
    Ok(ModelFlow {
        kind: ModelKind::TiltedProduct,
        q,
        r_res,
        h,
        test_forms,
        expected,
        ambient: Some(ambient),
    })
}

/// Flow along the sphere's Hopf direction in a line-times-sphere product,
/// leaving the line direction transverse; the sphere has dimension 2m+1.
pub fn strict_product(m: usize) -> Result<ModelFlow> {
    if m < 2 {
        return Err(Error::ModelPrecondition(format!(
            "strict-product model needs m >= 2, got {m}"
        )));
    }
    let q = 2 * m + 1;
    let n = q + 1;
    let mut ambient = product_ambient(m);
    let mut xi = DVector::zeros(n);
    xi[n - 1] = 1.0;
    let mut frame = DMatrix::zeros(n, q);
    for k in 0..(2 * m) {
        frame[(k + 1, k)] = 1.0;
    }
    frame[(0, q - 1)] = 1.0;
    ambient.xi = xi;
    ambient.frame = frame;
    ambient.validate(q)?;
    let r_res = ambient.restrict()?;
    let h = ONeillTensor::from_blocks(q, &vec![1.0; m])?;
    let pf2 = (2 * (q - 2)) as f64;
    let mut expected = BTreeMap::new();
    expected.insert("gamma0".into(), analytic(0.0));
    expected.insert("gamma1".into(), analytic(1.0));
    expected.insert("b_max_sq".into(), analytic(1.0));
    expected.insert("bound_total_p2".into(), analytic(-pf2));
    expected.insert("min_eig_total_p2".into(), numeric(0.0));
    expected.insert("strict_margin_p2".into(), numeric(pf2));
    expected.insert("rayleigh_kahler_p2".into(), numeric(0.0));
    expected.insert("oneill_residual".into(), analytic(0.0));
    expected.insert("bochner_identity_residual_p1".into(), analytic(0.0));
    let mut test_forms = BTreeMap::new();
    test_forms.insert("kahler".into(), kahler_form(q)?);
    Ok(ModelFlow {
        kind: ModelKind::StrictProduct,
        q,
        r_res,
        h,
        test_forms,
        expected,
        ambient: Some(ambient),
    })
}

/// One recomputed expectation.
#[derive(Clone, Debug)]
pub struct SelfCheckItem {
    pub key: String,
    pub expected: f64,
    pub kind: ExpectationKind,
    pub actual: f64,
    pub residual: f64,
    pub pass: bool,
}

impl ModelFlow {
    /// Full transverse curvature operator of the model.
    pub fn total_curvature(&self) -> Result<CurvatureOperator> {
        split_curvature(&self.r_res, &self.h)
    }

    fn compute_key(&self, key: &str) -> Result<f64> {
        match key {
            "gamma0" => Ok(self.r_res.eigenvalues()[0]),
            "gamma1" => {
                let eigs = self.r_res.eigenvalues();
                Ok(eigs[eigs.len() - 1])
            }
            "b_max_sq" => {
                let blocks = canonical_form(&self.h)?;
                Ok(blocks.b().last().map(|&x| x * x).unwrap_or(0.0))
            }
            "bound_total_p2" => Ok(total_bound_report(&self.r_res, &self.h, 2)?.bound_total),
            "min_eig_total_p2" => Ok(total_bound_report(&self.r_res, &self.h, 2)?.min_eig_total),
            "strict_margin_p2" => {
                let report = total_bound_report(&self.r_res, &self.h, 2)?;
                Ok(report.min_eig_total - report.bound_total)
            }
            "rayleigh_kahler_p2" => {
                let omega = self
                    .test_forms
                    .get("kahler")
                    .ok_or_else(|| Error::Internal("model has no kahler test form".into()))?;
                bochner_quadratic(&self.total_curvature()?, 2)?.rayleigh(omega)
            }
            "oneill_residual" => {
                let ambient = self
                    .ambient
                    .as_ref()
                    .ok_or_else(|| Error::Internal("model has no ambient data".into()))?;
                let framed = ambient.in_flow_frame()?;
                Ok(sphere_oneill_check(&framed, &self.h)?.residual)
            }
            "bochner_identity_residual_p1" => {
                let r = self.total_curvature()?;
                let a = bochner_quadratic(&r, 1)?;
                let b = bochner_direct(&r, 1)?;
                Ok(inf_norm(&(a.mat() - b.mat())))
            }
            other => Err(Error::Internal(format!("unknown expectation key {other}"))),
        }
    }

    /// Recompute every frozen expectation from the model's own operators.
    pub fn self_check(&self, tol: f64) -> Result<Vec<SelfCheckItem>> {
        let mut items = Vec::with_capacity(self.expected.len());
        for (key, exp) in &self.expected {
            let actual = self.compute_key(key)?;
            let residual = (actual - exp.value).abs();
            items.push(SelfCheckItem {
                key: key.clone(),
                expected: exp.value,
                kind: exp.kind,
                actual,
                residual,
                pass: residual <= tol,
            });
        }
        Ok(items)
    }

    /// Sphere compatibility of the ambient data: does the mixed curvature
    /// block reproduce -h^2?
    pub fn sphere_dichotomy(&self) -> Result<Option<bool>> {
        match &self.ambient {
            None => Ok(None),
            Some(ambient) => {
                let framed = ambient.in_flow_frame()?;
                Ok(Some(sphere_oneill_check(&framed, &self.h)?.pass))
            }
        }
    }
}
