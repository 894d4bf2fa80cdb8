//! Curvature operators on 2-forms, their split into a restricted part plus
//! the term induced by the flow's deformation tensor h, the canonical block
//! form of h, the closed-form eigenvalue families of the induced term, and
//! the two independent assemblies of the Bochner operator on p-forms.

use crate::clifford::bracket_two_form;
use crate::error::{Error, Result};
use crate::exterior::{basis_multi_indices, binomial, interior, wedge, Form, MultiIndex};
use crate::linalg::{jacobi_eigen, max_abs, pair_list};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const EIGEN_THRESHOLD: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const KERNEL_TOL: f64 = 1e-12;

fn row_major(mat: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(mat.nrows() * mat.ncols());
    for r in 0..mat.nrows() {
        for c in 0..mat.ncols() {
            out.push(mat[(r, c)]);
        }
    }
    out
}

fn from_row_major(rows: usize, data: &[f64]) -> Option<DMatrix<f64>> {
    if data.len() != rows * rows {
        return None;
    }
    Some(DMatrix::from_fn(rows, rows, |r, c| data[r * rows + c]))
}

#[derive(Serialize, Deserialize)]
struct RawCurvature {
    q: usize,
    mat: Vec<f64>,
}

/// Symmetric operator on the 2-plane space of a rank-q frame, stored dense
/// over the lexicographic 2-form basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurvature", into = "RawCurvature")]
pub struct CurvatureOperator {
    q: usize,
    mat: DMatrix<f64>,
}

impl TryFrom<RawCurvature> for CurvatureOperator {
    type Error = Error;
    fn try_from(raw: RawCurvature) -> Result<Self> {
        let dim = binomial(raw.q, 2);
        let mat = from_row_major(dim, &raw.mat)
            .ok_or(Error::CoefficientLength { expected: dim * dim, got: raw.mat.len() })?;
        CurvatureOperator::new(raw.q, mat)
    }
}

impl From<CurvatureOperator> for RawCurvature {
    fn from(op: CurvatureOperator) -> Self {
        RawCurvature { q: op.q, mat: row_major(&op.mat) }
    }
}

impl CurvatureOperator {
    pub fn new(q: usize, mat: DMatrix<f64>) -> Result<Self> {
        let dim = binomial(q, 2);
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: mat.nrows() });
        }
        let residual = max_abs(&(&mat - &mat.transpose()));
        if residual > SYMMETRY_TOL * max_abs(&mat).max(1.0) {
            return Err(Error::NotSymmetric { residual });
        }
        Ok(CurvatureOperator { q, mat })
    }

    pub fn zero(q: usize) -> Self {
        CurvatureOperator { q, mat: DMatrix::zeros(binomial(q, 2), binomial(q, 2)) }
    }

    pub fn scaled_identity(q: usize, gamma: f64) -> Self {
        let dim = binomial(q, 2);
        CurvatureOperator { q, mat: DMatrix::identity(dim, dim) * gamma }
    }

    pub fn identity(q: usize) -> Self {
        Self::scaled_identity(q, 1.0)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Apply to a 2-form in the same frame.
    pub fn apply(&self, psi: &Form) -> Result<Form> {
        if psi.q() != self.q {
            return Err(Error::RankMismatch { expected: self.q, got: psi.q() });
        }
        if psi.degree() != 2 {
            return Err(Error::DegreeMismatch { expected: 2, got: psi.degree() });
        }
        let v = DVector::from_column_slice(psi.coeffs());
        let out = &self.mat * v;
        Form::from_coeffs(self.q, 2, out.as_slice().to_vec())
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigen(&self.mat, EIGEN_THRESHOLD).0
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }
}

#[derive(Serialize, Deserialize)]
struct RawONeill {
    q: usize,
    mat: Vec<f64>,
}

/// Skew-symmetric deformation tensor of a flow, as an endomorphism of the
/// rank-q transverse frame (column a holds the image of e_{a+1}).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawONeill", into = "RawONeill")]
pub struct ONeillTensor {
    q: usize,
    mat: DMatrix<f64>,
}

impl TryFrom<RawONeill> for ONeillTensor {
    type Error = Error;
    fn try_from(raw: RawONeill) -> Result<Self> {
        let mat = from_row_major(raw.q, &raw.mat)
            .ok_or(Error::CoefficientLength { expected: raw.q * raw.q, got: raw.mat.len() })?;
        ONeillTensor::new(raw.q, mat)
    }
}

impl From<ONeillTensor> for RawONeill {
    fn from(t: ONeillTensor) -> Self {
        RawONeill { q: t.q, mat: row_major(&t.mat) }
    }
}

impl ONeillTensor {
    pub fn new(q: usize, mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != q || mat.ncols() != q {
            return Err(Error::DimensionMismatch { expected: q, got: mat.nrows() });
        }
        let residual = max_abs(&(&mat + &mat.transpose()));
        if residual > SYMMETRY_TOL * max_abs(&mat).max(1.0) {
            return Err(Error::NotSkewSymmetric { residual });
        }
        Ok(ONeillTensor { q, mat })
    }

    pub fn zero(q: usize) -> Self {
        ONeillTensor { q, mat: DMatrix::zeros(q, q) }
    }

    /// Canonical tensor with the given block values on consecutive index
    /// pairs: e_{2i-1} -> b_i e_{2i}. Odd q leaves a trailing kernel column.
    pub fn from_blocks(q: usize, b: &[f64]) -> Result<Self> {
        if b.len() != q / 2 {
            return Err(Error::DimensionMismatch { expected: q / 2, got: b.len() });
        }
        let mut mat = DMatrix::zeros(q, q);
        for (i, &bi) in b.iter().enumerate() {
            mat[(2 * i + 1, 2 * i)] = bi;
            mat[(2 * i, 2 * i + 1)] = -bi;
        }
        Ok(ONeillTensor { q, mat })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Pairing g(h(e_a), e_b) with 0-based frame indices.
    fn pairing(&self, a: usize, b: usize) -> f64 {
        self.mat[(b, a)]
    }
}

/// Curvature term induced by the deformation tensor:
/// g(R_ext(X∧Y), Z∧W) = 2 g(hX,Y) g(hZ,W) − g(hY,Z) g(hX,W) − g(hZ,X) g(hY,W).
pub fn r_ext_from_h(h: &ONeillTensor) -> CurvatureOperator {
    let q = h.q();
    let pairs = pair_list(q);
    let dim = pairs.len();
    let mut mat = DMatrix::zeros(dim, dim);
    for (col, &(x, y)) in pairs.iter().enumerate() {
        for (row, &(z, w)) in pairs.iter().enumerate() {
            mat[(row, col)] = 2.0 * h.pairing(x, y) * h.pairing(z, w)
                - h.pairing(y, z) * h.pairing(x, w)
                - h.pairing(z, x) * h.pairing(y, w);
        }
    }
    CurvatureOperator { q, mat }
}

/// Full transverse curvature operator R = R_res + R_ext(h).
pub fn split_curvature(r_res: &CurvatureOperator, h: &ONeillTensor) -> Result<CurvatureOperator> {
    if r_res.q() != h.q() {
        return Err(Error::RankMismatch { expected: r_res.q(), got: h.q() });
    }
    let ext = r_ext_from_h(h);
    Ok(CurvatureOperator { q: r_res.q(), mat: &r_res.mat + &ext.mat })
}

#[derive(Serialize, Deserialize)]
struct RawBlocks {
    q: usize,
    b: Vec<f64>,
    frame: Vec<f64>,
}

/// Canonical block data of a deformation tensor: ascending block values
/// b_1 <= … <= b_m (m = floor(q/2), zeros allowed) and an orthogonal frame
/// realizing h(e_{2i-1}) = b_i e_{2i}, h(e_{2i}) = -b_i e_{2i-1}; any kernel
/// leftover for odd q sits in the last column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBlocks", into = "RawBlocks")]
pub struct CanonicalBlocks {
    q: usize,
    b: Vec<f64>,
    frame: DMatrix<f64>,
}

impl TryFrom<RawBlocks> for CanonicalBlocks {
    type Error = Error;
    fn try_from(raw: RawBlocks) -> Result<Self> {
        let frame = from_row_major(raw.q, &raw.frame)
            .ok_or(Error::CoefficientLength { expected: raw.q * raw.q, got: raw.frame.len() })?;
        CanonicalBlocks::new(raw.q, raw.b, frame)
    }
}

impl From<CanonicalBlocks> for RawBlocks {
    fn from(cb: CanonicalBlocks) -> Self {
        RawBlocks { q: cb.q, b: cb.b, frame: row_major(&cb.frame) }
    }
}

impl CanonicalBlocks {
    pub fn new(q: usize, b: Vec<f64>, frame: DMatrix<f64>) -> Result<Self> {
        if b.len() != q / 2 {
            return Err(Error::DimensionMismatch { expected: q / 2, got: b.len() });
        }
        if b.iter().any(|&x| x < 0.0) || b.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Internal("block values must be ascending and nonnegative".into()));
        }
        if frame.nrows() != q || frame.ncols() != q {
            return Err(Error::DimensionMismatch { expected: q, got: frame.nrows() });
        }
        let gram = frame.transpose() * &frame;
        let residual = max_abs(&(&gram - &DMatrix::identity(q, q)));
        if residual > 1e-9 {
            return Err(Error::Internal(format!(
                "canonical frame is not orthogonal: residual {residual:.3e}"
            )));
        }
        Ok(CanonicalBlocks { q, b, frame })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    /// The canonical skew matrix carrying the blocks on consecutive pairs.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let mut mat = DMatrix::zeros(self.q, self.q);
        for (i, &bi) in self.b.iter().enumerate() {
            mat[(2 * i + 1, 2 * i)] = bi;
            mat[(2 * i, 2 * i + 1)] = -bi;
        }
        mat
    }

    /// frame · blocks · frame^T, the tensor these data reconstruct.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.frame * self.block_matrix() * self.frame.transpose()
    }

    /// Frame column as a 1-form (0-based column index).
    pub fn frame_one_form(&self, col: usize) -> Form {
        Form::from_coeffs(self.q, 1, self.frame.column(col).as_slice().to_vec())
            .expect("frame column is a valid 1-form")
    }

    /// Number of blocks with b_i below the kernel threshold, plus the odd
    /// leftover: the dimension of ker h as represented by these blocks.
    pub fn kernel_dim(&self) -> usize {
        let zero_blocks = self.b.iter().filter(|&&x| x <= KERNEL_TOL).count();
        2 * zero_blocks + self.q % 2
    }
}

/// Canonical block decomposition of a deformation tensor, via the spectrum of
/// -h^2. Within each eigenvalue cluster, directions are drawn by Gram–Schmidt
/// from standard-basis seeds in index order and partnered with h(u)/|h(u)|,
/// which makes the output deterministic under repeated eigenvalues.
pub fn canonical_form(h: &ONeillTensor) -> Result<CanonicalBlocks> {
    let q = h.q();
    let s = -(&h.mat * &h.mat);
    let (mu, vecs) = jacobi_eigen(&s, 1e-13);
    let scale = mu.iter().fold(1.0f64, |a, &x| a.max(x.abs()));
    let cluster_gap = 1e-9 * scale;

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0usize;
    for i in 1..=q {
        if i == q || mu[i] - mu[i - 1] > cluster_gap {
            clusters.push((start, i));
            start = i;
        }
    }

    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    let mut kernel: Vec<DVector<f64>> = Vec::new();
    for &(lo, hi) in &clusters {
        let dim = hi - lo;
        let mut chosen: Vec<DVector<f64>> = Vec::new();
        for k in 0..q {
            if chosen.len() == dim {
                break;
            }
            let mut w = DVector::zeros(q);
            for c in lo..hi {
                let col = vecs.column(c);
                let coef = col[k];
                w.axpy(coef, &col.into_owned(), 1.0);
            }
            for _ in 0..2 {
                for u in &chosen {
                    let d = u.dot(&w);
                    w.axpy(-d, u, 1.0);
                }
            }
            let nw = w.norm();
            if nw <= 1e-6 {
                continue;
            }
            let u = w / nw;
            let hu = &h.mat * &u;
            let beta = hu.norm();
            if beta > KERNEL_TOL {
                let v = hu / beta;
                chosen.push(u.clone());
                chosen.push(v.clone());
                pairs.push((beta, u, v));
            } else {
                chosen.push(u.clone());
                kernel.push(u);
            }
        }
        if chosen.len() != dim {
            return Err(Error::Internal(format!(
                "cluster extraction produced {} of {} directions",
                chosen.len(),
                dim
            )));
        }
    }

    // kernel directions pair up as zero blocks; odd q leaves one column over
    let mut leftover: Option<DVector<f64>> = None;
    let mut it = kernel.into_iter();
    loop {
        match (it.next(), it.next()) {
            (Some(u), Some(v)) => pairs.push((0.0, u, v)),
            (Some(u), None) => {
                leftover = Some(u);
                break;
            }
            (None, _) => break,
        }
    }
    if pairs.len() != q / 2 || (leftover.is_some() != (q % 2 == 1)) {
        return Err(Error::Internal("block pairing does not match frame parity".into()));
    }

    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let b: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut frame = DMatrix::zeros(q, q);
    for (i, (_, u, v)) in pairs.iter().enumerate() {
        frame.set_column(2 * i, u);
        frame.set_column(2 * i + 1, v);
    }
    if let Some(u) = leftover {
        frame.set_column(q - 1, &u);
    }

    let blocks = CanonicalBlocks::new(q, b, frame)?;
    let residual = max_abs(&(&blocks.reconstruct() - &h.mat));
    if residual > 1e-9 * max_abs(&h.mat).max(1.0) {
        return Err(Error::Internal(format!(
            "canonical reconstruction residual {residual:.3e}"
        )));
    }
    Ok(blocks)
}

/// One closed-form eigenvalue family member of R_ext.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyLabel {
    /// paired (2i-1,2j-1)/(2i,2j) planes, eigenvalues ±b_i b_j
    I,
    /// paired (2i-1,2j)/(2i,2j-1) planes, eigenvalues ±b_i b_j
    II,
    /// block-plane combinations through the dense m×m core
    III,
    /// kernel-direction planes of odd rank, eigenvalue 0
    IV,
}

impl std::fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FamilyLabel::I => "I",
            FamilyLabel::II => "II",
            FamilyLabel::III => "III",
            FamilyLabel::IV => "IV",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct EigenFamily {
    pub label: FamilyLabel,
    pub eigenvalue: f64,
    pub eigenvector: Form,
}

/// Families are labeled only while ker h is at most a line; otherwise the
/// closed-form catalogue is incomplete and the report degrades to the plain
/// spectrum.
#[derive(Clone, Debug)]
pub enum EigenfamilyReport {
    Labeled(Vec<EigenFamily>),
    NumericOnly(Vec<f64>),
}

impl EigenfamilyReport {
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self {
            EigenfamilyReport::Labeled(fams) => fams.iter().map(|f| f.eigenvalue).collect(),
            EigenfamilyReport::NumericOnly(vals) => vals.clone(),
        }
    }
}

/// Closed-form eigenvalue families of R_ext for a tensor in canonical blocks.
pub fn eigenfamilies(blocks: &CanonicalBlocks) -> Result<EigenfamilyReport> {
    let q = blocks.q();
    let b = blocks.b();
    let m = b.len();

    if blocks.kernel_dim() > 1 {
        let h = ONeillTensor::new(q, blocks.reconstruct())?;
        return Ok(EigenfamilyReport::NumericOnly(r_ext_from_h(&h).eigenvalues()));
    }

    let sqrt_half = 0.5f64.sqrt();
    let f: Vec<Form> = (0..q).map(|c| blocks.frame_one_form(c)).collect();
    let mut fams: Vec<EigenFamily> = Vec::new();

    for i in 0..m {
        for j in (i + 1)..m {
            let c = b[i] * b[j];
            let w_oo = wedge(&f[2 * i], &f[2 * j])?; // odd-odd slots
            let w_ee = wedge(&f[2 * i + 1], &f[2 * j + 1])?;
            let w_oe = wedge(&f[2 * i], &f[2 * j + 1])?;
            let w_eo = wedge(&f[2 * i + 1], &f[2 * j])?;

            let mut theta_plus = w_oo.clone();
            theta_plus.add_scaled(&w_ee, 1.0);
            let mut theta_minus = w_oo;
            theta_minus.add_scaled(&w_ee, -1.0);
            fams.push(EigenFamily {
                label: FamilyLabel::I,
                eigenvalue: c,
                eigenvector: theta_plus.scaled(sqrt_half),
            });
            fams.push(EigenFamily {
                label: FamilyLabel::I,
                eigenvalue: -c,
                eigenvector: theta_minus.scaled(sqrt_half),
            });

            let mut rho_minus = w_oe.clone();
            rho_minus.add_scaled(&w_eo, -1.0);
            let mut rho_plus = w_oe;
            rho_plus.add_scaled(&w_eo, 1.0);
            fams.push(EigenFamily {
                label: FamilyLabel::II,
                eigenvalue: c,
                eigenvector: rho_minus.scaled(sqrt_half),
            });
            fams.push(EigenFamily {
                label: FamilyLabel::II,
                eigenvalue: -c,
                eigenvector: rho_plus.scaled(sqrt_half),
            });
        }
    }

    // dense core on the block planes themselves
    let d = DMatrix::from_fn(m, m, |k, l| {
        if k == l {
            3.0 * b[k] * b[k]
        } else {
            2.0 * b[k] * b[l]
        }
    });
    let (vals, vecs) = jacobi_eigen(&d, EIGEN_THRESHOLD);
    for t in 0..m {
        let mut v = Form::zero(q, 2)?;
        for k in 0..m {
            let plane = wedge(&f[2 * k], &f[2 * k + 1])?;
            v.add_scaled(&plane, vecs[(k, t)]);
        }
        fams.push(EigenFamily { label: FamilyLabel::III, eigenvalue: vals[t], eigenvector: v });
    }

    if q % 2 == 1 {
        for l in 0..(q - 1) {
            fams.push(EigenFamily {
                label: FamilyLabel::IV,
                eigenvalue: 0.0,
                eigenvector: wedge(&f[l], &f[q - 1])?,
            });
        }
    }

    debug_assert_eq!(fams.len(), binomial(q, 2));
    Ok(EigenfamilyReport::Labeled(fams))
}

/// Dense linear operator on degree-p forms.
#[derive(Clone, Debug, PartialEq)]
pub struct FormOperator {
    q: usize,
    p: usize,
    mat: DMatrix<f64>,
}

impl FormOperator {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, omega: &Form) -> Result<Form> {
        if omega.q() != self.q {
            return Err(Error::RankMismatch { expected: self.q, got: omega.q() });
        }
        if omega.degree() != self.p {
            return Err(Error::DegreeMismatch { expected: self.p, got: omega.degree() });
        }
        let v = DVector::from_column_slice(omega.coeffs());
        let out = &self.mat * v;
        Form::from_coeffs(self.q, self.p, out.as_slice().to_vec())
    }

    /// <A omega, omega> / |omega|^2.
    pub fn rayleigh(&self, omega: &Form) -> Result<f64> {
        let img = self.apply(omega)?;
        let nsq = omega.norm_sq();
        if nsq == 0.0 {
            return Err(Error::Internal("Rayleigh quotient of the zero form".into()));
        }
        Ok(crate::exterior::inner(&img, omega)? / nsq)
    }

    /// Eigenvalues ascending (the operator is expected symmetric).
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigen(&self.mat, EIGEN_THRESHOLD).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Smallest eigenvalue with a matching unit eigenvector.
    pub fn min_eigenpair(&self) -> (f64, Form) {
        let (vals, vecs) = jacobi_eigen(&self.mat, EIGEN_THRESHOLD);
        let mut coeffs: Vec<f64> = vecs.column(0).as_slice().to_vec();
        // fix the sign so reports do not flip on equivalent runs
        let lead = coeffs
            .iter()
            .cloned()
            .fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if lead < 0.0 {
            for c in &mut coeffs {
                *c = -*c;
            }
        }
        (vals[0], Form::from_coeffs(self.q, self.p, coeffs).expect("eigenvector length"))
    }
}

/// Precomputed bracket matrices for assembling Bochner operators on degree-p
/// forms from curvature operators; reusable across many operators at fixed
/// (q, p).
pub struct BochnerAssembler {
    q: usize,
    p: usize,
    brackets: Vec<DMatrix<f64>>,
    basis_change: Option<DMatrix<f64>>,
}

impl BochnerAssembler {
    /// Assembler over the lexicographic monomial 2-form basis.
    pub fn new(q: usize, p: usize) -> Result<Self> {
        Self::build(q, p, None)
    }

    /// Assembler over a caller-supplied orthonormal 2-form basis (columns of
    /// `basis`, coefficients in the monomial basis).
    pub fn with_plane_basis(q: usize, p: usize, basis: &DMatrix<f64>) -> Result<Self> {
        let dim2 = binomial(q, 2);
        if basis.nrows() != dim2 || basis.ncols() != dim2 {
            return Err(Error::DimensionMismatch { expected: dim2, got: basis.nrows() });
        }
        let gram = basis.transpose() * basis;
        let residual = max_abs(&(&gram - &DMatrix::identity(dim2, dim2)));
        if residual > 1e-9 {
            return Err(Error::Internal(format!(
                "2-form basis is not orthonormal: residual {residual:.3e}"
            )));
        }
        Self::build(q, p, Some(basis.clone()))
    }

    fn build(q: usize, p: usize, basis_change: Option<DMatrix<f64>>) -> Result<Self> {
        if p > q {
            return Err(Error::DegreeOutOfRange { p, q });
        }
        let dim2 = binomial(q, 2);
        let dim_p = binomial(q, p);
        let monomials = basis_multi_indices(q, p);
        let mut brackets = Vec::with_capacity(dim2);
        for r in 0..dim2 {
            let psi = match &basis_change {
                None => {
                    let idx = crate::exterior::unrank_of(q, 2, r)?;
                    Form::monomial(q, &idx)?
                }
                Some(u) => Form::from_coeffs(q, 2, u.column(r).as_slice().to_vec())?,
            };
            let mut k = DMatrix::zeros(dim_p, dim_p);
            for (col, idx) in monomials.iter().enumerate() {
                let omega = Form::monomial(q, idx)?;
                let img = bracket_two_form(&psi, &omega)?;
                for (row, &c) in img.coeffs().iter().enumerate() {
                    k[(row, col)] = c;
                }
            }
            brackets.push(k);
        }
        Ok(BochnerAssembler { q, p, brackets, basis_change })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    /// Quadratic-form assembly: <B omega, phi> =
    /// 1/4 Σ_{r,s} <R psi_r, psi_s> <[psi_r, omega], [psi_s, phi]>.
    pub fn quadratic(&self, r: &CurvatureOperator) -> Result<FormOperator> {
        if r.q() != self.q {
            return Err(Error::RankMismatch { expected: self.q, got: r.q() });
        }
        let rp: DMatrix<f64> = match &self.basis_change {
            None => r.mat.clone(),
            Some(u) => u.transpose() * &r.mat * u,
        };
        let dim2 = self.brackets.len();
        let dim_p = binomial(self.q, self.p);
        let mut bmat = DMatrix::zeros(dim_p, dim_p);
        let mut l = DMatrix::zeros(dim_p, dim_p);
        for row in 0..dim2 {
            l.fill(0.0);
            for s in 0..dim2 {
                let c = rp[(row, s)];
                if c != 0.0 {
                    l.iter_mut().zip(self.brackets[s].iter()).for_each(|(o, &x)| *o += c * x);
                }
            }
            bmat.gemm_tr(0.25, &self.brackets[row], &l, 1.0);
        }
        Ok(FormOperator { q: self.q, p: self.p, mat: bmat })
    }
}

/// Bochner curvature operator on degree-p forms via the bracket quadratic form.
pub fn bochner_quadratic(r: &CurvatureOperator, p: usize) -> Result<FormOperator> {
    BochnerAssembler::new(r.q(), p)?.quadratic(r)
}

// extends Z -> Z ⌟ psi over each factor of a monomial
fn derivation_on_monomial(psi: &Form, idx: &MultiIndex, q: usize) -> Result<Form> {
    let p = idx.degree();
    let mut out = Form::zero(q, p)?;
    let indices = idx.indices();
    for t in 0..p {
        let e_t = Form::basis_one(q, indices[t])?;
        let v = interior(&e_t, psi)?;
        if v.is_zero(0.0) {
            continue;
        }
        let prefix = Form::monomial(q, &MultiIndex::new(indices[..t].to_vec(), q)?)?;
        let suffix = Form::monomial(q, &MultiIndex::new(indices[t + 1..].to_vec(), q)?)?;
        let term = wedge(&prefix, &wedge(&v, &suffix)?)?;
        out.add_scaled(&term, 1.0);
    }
    Ok(out)
}

/// Bochner curvature operator on degree-p forms assembled directly:
/// B omega = Σ_{i,j} e_j ∧ (e_i ⌟ D_{ji} omega), where D_{ji} is the
/// derivation extending Z -> Z ⌟ R(e_j ∧ e_i). Shares no code path with the
/// quadratic-form assembly.
pub fn bochner_direct(r: &CurvatureOperator, p: usize) -> Result<FormOperator> {
    let q = r.q();
    if p > q {
        return Err(Error::DegreeOutOfRange { p, q });
    }
    let dim_p = binomial(q, p);
    let mut bmat = DMatrix::zeros(dim_p, dim_p);
    if p == 0 {
        return Ok(FormOperator { q, p, mat: bmat });
    }

    // R(e_j ∧ e_i) for all ordered pairs, 0-based [j][i]
    let pairs = pair_list(q);
    let mut images: Vec<Vec<Option<Form>>> = vec![vec![None; q]; q];
    for (rank, &(a, b)) in pairs.iter().enumerate() {
        let col = r.mat.column(rank);
        let plus = Form::from_coeffs(q, 2, col.as_slice().to_vec())?;
        images[a][b] = Some(plus.clone());
        images[b][a] = Some(plus.scaled(-1.0));
    }

    let monomials = basis_multi_indices(q, p);
    for (col, idx) in monomials.iter().enumerate() {
        let mut acc = Form::zero(q, p)?;
        for j in 0..q {
            let ej = Form::basis_one(q, j + 1)?;
            for i in 0..q {
                if i == j {
                    continue;
                }
                let psi = images[j][i].as_ref().expect("off-diagonal image");
                let derived = derivation_on_monomial(psi, idx, q)?;
                if derived.is_zero(0.0) {
                    continue;
                }
                let ei = Form::basis_one(q, i + 1)?;
                let contracted = interior(&ei, &derived)?;
                acc.add_scaled(&wedge(&ej, &contracted)?, 1.0);
            }
        }
        for (row, &c) in acc.coeffs().iter().enumerate() {
            bmat[(row, col)] = c;
        }
    }
    Ok(FormOperator { q, p, mat: bmat })
}

/// Outcome of comparing an ambient space-form block against -h^2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereCheckReport {
    pub residual: f64,
    pub pass: bool,
}

/// For a rank-(q+1) ambient curvature operator whose frame leads with the
/// flow direction, compare the mixed block M_{ij} = <R(ξ∧e_i), ξ∧e_j> against
/// -h^2. Agreement within 1e-9 characterizes ambient curvature operators
/// compatible with a minimal unit flow on a round sphere.
pub fn sphere_oneill_check(
    r_m_full: &CurvatureOperator,
    h: &ONeillTensor,
) -> Result<SphereCheckReport> {
    let q = h.q();
    if r_m_full.q() != q + 1 {
        return Err(Error::RankMismatch { expected: q + 1, got: r_m_full.q() });
    }
    // pairs (0, i) occupy the first q lexicographic slots
    let target = -(&h.mat * &h.mat);
    let mut residual = 0.0f64;
    for i in 0..q {
        for j in 0..q {
            let diff = r_m_full.mat[(j, i)] - target[(j, i)];
            residual = residual.max(diff.abs());
        }
    }
    Ok(SphereCheckReport { residual, pass: residual <= 1e-9 })
}
