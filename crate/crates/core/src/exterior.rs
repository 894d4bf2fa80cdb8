//! Exterior algebra over an orthonormal rank-q frame.
//!
//! Degree-p forms are stored as dense coefficient vectors over the
//! lexicographically ordered basis of strictly increasing multi-indices,
//! so a `Form` is a point in a C(q,p)-dimensional Euclidean space and the
//! frame inner product is the plain coefficient dot product.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Binomial coefficient C(n, k); 0 when k > n.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Strictly increasing tuple of frame indices in 1..=q.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>, q: usize) -> Result<Self> {
        let ok = indices.windows(2).all(|w| w[0] < w[1])
            && indices.iter().all(|&i| i >= 1 && i <= q);
        if ok {
            Ok(MultiIndex(indices))
        } else {
            Err(Error::InvalidMultiIndex { indices, q })
        }
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// Lexicographic position of `idx` among all degree-p multi-indices on 1..=q.
pub fn rank_of(idx: &MultiIndex, q: usize) -> Result<usize> {
    // Re-validate so stale indices can't silently alias another basis slot.
    let idx = MultiIndex::new(idx.0.clone(), q)?;
    let p = idx.degree();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in idx.0.iter().enumerate() {
        for x in (prev + 1)..c {
            rank += binomial(q - x, p - i - 1);
        }
        prev = c;
    }
    Ok(rank)
}

/// Inverse of [`rank_of`]: the degree-p multi-index at lexicographic position `rank`.
pub fn unrank_of(q: usize, p: usize, rank: usize) -> Result<MultiIndex> {
    if p > q || rank >= binomial(q, p) {
        return Err(Error::RankOutOfRange { rank, q, p });
    }
    let mut rank = rank;
    let mut out = Vec::with_capacity(p);
    let mut c = 1;
    for i in 0..p {
        loop {
            let count = binomial(q - c, p - i - 1);
            if rank < count {
                out.push(c);
                c += 1;
                break;
            }
            rank -= count;
            c += 1;
        }
    }
    Ok(MultiIndex(out))
}

/// All degree-p multi-indices on 1..=q in lexicographic order.
pub fn basis_multi_indices(q: usize, p: usize) -> Vec<MultiIndex> {
    let dim = binomial(q, p);
    let mut out = Vec::with_capacity(dim);
    if p > q {
        return out;
    }
    let mut cur: Vec<usize> = (1..=p).collect();
    loop {
        out.push(MultiIndex(cur.clone()));
        // advance to the lexicographic successor
        let mut t = p;
        while t > 0 && cur[t - 1] == q - (p - t) {
            t -= 1;
        }
        if t == 0 {
            break;
        }
        cur[t - 1] += 1;
        for s in t..p {
            cur[s] = cur[s - 1] + 1;
        }
    }
    debug_assert_eq!(out.len(), dim);
    out
}

#[derive(Serialize, Deserialize)]
struct RawForm {
    q: usize,
    p: usize,
    coeffs: Vec<f64>,
}

/// Degree-p form over a rank-q frame, dense in the lexicographic monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawForm", into = "RawForm")]
pub struct Form {
    q: usize,
    p: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<RawForm> for Form {
    type Error = Error;
    fn try_from(raw: RawForm) -> Result<Self> {
        Form::from_coeffs(raw.q, raw.p, raw.coeffs)
    }
}

impl From<Form> for RawForm {
    fn from(f: Form) -> Self {
        RawForm { q: f.q, p: f.p, coeffs: f.coeffs }
    }
}

impl Form {
    pub fn zero(q: usize, p: usize) -> Result<Self> {
        if p > q {
            return Err(Error::DegreeOutOfRange { p, q });
        }
        Ok(Form { q, p, coeffs: vec![0.0; binomial(q, p)] })
    }

    pub fn from_coeffs(q: usize, p: usize, coeffs: Vec<f64>) -> Result<Self> {
        if p > q {
            return Err(Error::DegreeOutOfRange { p, q });
        }
        let expected = binomial(q, p);
        if coeffs.len() != expected {
            return Err(Error::CoefficientLength { expected, got: coeffs.len() });
        }
        Ok(Form { q, p, coeffs })
    }

    /// Unit monomial e_{i1} ∧ … ∧ e_{ip} for the given multi-index.
    pub fn monomial(q: usize, idx: &MultiIndex) -> Result<Self> {
        let rank = rank_of(idx, q)?;
        let mut f = Form::zero(q, idx.degree())?;
        f.coeffs[rank] = 1.0;
        Ok(f)
    }

    /// Degree-0 form with the given value.
    pub fn scalar(q: usize, value: f64) -> Self {
        Form { q, p: 0, coeffs: vec![value] }
    }

    /// Basis 1-form e_k (1-based).
    pub fn basis_one(q: usize, k: usize) -> Result<Self> {
        Form::monomial(q, &MultiIndex::new(vec![k], q)?)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, rank: usize) -> f64 {
        self.coeffs[rank]
    }

    pub fn set_coeff(&mut self, rank: usize, value: f64) {
        self.coeffs[rank] = value;
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    pub fn scaled(&self, s: f64) -> Form {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    fn assert_same_shape(&self, other: &Form) {
        assert_eq!(self.q, other.q, "form rank mismatch");
        assert_eq!(self.p, other.p, "form degree mismatch");
    }

    pub fn add_scaled(&mut self, other: &Form, s: f64) {
        self.assert_same_shape(other);
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += s * o;
        }
    }
}

impl std::ops::Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl std::ops::Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl std::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scaled(-1.0)
    }
}

/// Merge two strictly increasing index tuples; None when they share an index.
/// The sign is the parity of the permutation sorting the concatenation.
pub(crate) fn merge_monomials(sa: &[usize], sb: &[usize]) -> Option<(Vec<usize>, f64)> {
    let (la, lb) = (sa.len(), sb.len());
    let mut out = Vec::with_capacity(la + lb);
    let (mut i, mut j) = (0, 0);
    let mut inversions = 0usize;
    while i < la && j < lb {
        if sa[i] == sb[j] {
            return None;
        }
        if sa[i] < sb[j] {
            out.push(sa[i]);
            i += 1;
        } else {
            out.push(sb[j]);
            j += 1;
            inversions += la - i;
        }
    }
    out.extend_from_slice(&sa[i..]);
    out.extend_from_slice(&sb[j..]);
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((out, sign))
}

/// Remove index k from a strictly increasing tuple; None when k is absent.
/// The sign is (-1)^(position of k), position counted from 0.
pub(crate) fn contract_monomial(k: usize, s: &[usize]) -> Option<(Vec<usize>, f64)> {
    let pos = s.iter().position(|&x| x == k)?;
    let mut out = Vec::with_capacity(s.len() - 1);
    out.extend_from_slice(&s[..pos]);
    out.extend_from_slice(&s[pos + 1..]);
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    Some((out, sign))
}

/// Wedge product alpha ∧ beta. Errors when the combined degree exceeds q.
pub fn wedge(alpha: &Form, beta: &Form) -> Result<Form> {
    if alpha.q != beta.q {
        return Err(Error::RankMismatch { expected: alpha.q, got: beta.q });
    }
    let q = alpha.q;
    let degree = alpha.p + beta.p;
    if degree > q {
        return Err(Error::DegreeOverflow { degree, q });
    }
    let basis_a = basis_multi_indices(q, alpha.p);
    let basis_b = basis_multi_indices(q, beta.p);
    let mut out = Form::zero(q, degree)?;
    for (ra, &ca) in alpha.coeffs.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        for (rb, &cb) in beta.coeffs.iter().enumerate() {
            if cb == 0.0 {
                continue;
            }
            if let Some((merged, sign)) =
                merge_monomials(basis_a[ra].indices(), basis_b[rb].indices())
            {
                let rank = rank_of(&MultiIndex(merged), q)?;
                out.coeffs[rank] += sign * ca * cb;
            }
        }
    }
    Ok(out)
}

/// Interior product X ⌟ omega for a 1-form X, extended linearly in X.
/// Contracting a 0-form gives the zero 0-form.
pub fn interior(x: &Form, omega: &Form) -> Result<Form> {
    if x.q != omega.q {
        return Err(Error::RankMismatch { expected: x.q, got: omega.q });
    }
    if x.p != 1 {
        return Err(Error::DegreeMismatch { expected: 1, got: x.p });
    }
    let q = omega.q;
    if omega.p == 0 {
        return Form::zero(q, 0);
    }
    let basis = basis_multi_indices(q, omega.p);
    let mut out = Form::zero(q, omega.p - 1)?;
    for (k0, &xk) in x.coeffs.iter().enumerate() {
        if xk == 0.0 {
            continue;
        }
        let k = k0 + 1;
        for (r, &c) in omega.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if let Some((rest, sign)) = contract_monomial(k, basis[r].indices()) {
                let rank = rank_of(&MultiIndex(rest), q)?;
                out.coeffs[rank] += sign * xk * c;
            }
        }
    }
    Ok(out)
}

/// Frame inner product of two forms of equal rank and degree.
pub fn inner(alpha: &Form, beta: &Form) -> Result<f64> {
    if alpha.q != beta.q {
        return Err(Error::RankMismatch { expected: alpha.q, got: beta.q });
    }
    if alpha.p != beta.p {
        return Err(Error::DegreeMismatch { expected: alpha.p, got: beta.p });
    }
    Ok(alpha.coeffs.iter().zip(&beta.coeffs).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[usize], q: usize) -> MultiIndex {
        MultiIndex::new(v.to_vec(), q).unwrap()
    }

    #[test]
    fn binomial_table() {
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn rank_matches_lexicographic_order() {
        assert_eq!(rank_of(&mi(&[1, 3], 4), 4).unwrap(), 1);
        assert_eq!(rank_of(&mi(&[3, 4], 4), 4).unwrap(), 5);
        assert_eq!(rank_of(&mi(&[1, 2], 4), 4).unwrap(), 0);
        assert_eq!(rank_of(&MultiIndex::empty(), 6).unwrap(), 0);
    }

    #[test]
    fn unrank_inverts_rank_exhaustively() {
        for q in 0..=10usize {
            for p in 0..=q {
                for rank in 0..binomial(q, p) {
                    let idx = unrank_of(q, p, rank).unwrap();
                    assert_eq!(idx.degree(), p);
                    assert_eq!(rank_of(&idx, q).unwrap(), rank, "q={q} p={p}");
                }
            }
        }
    }

    #[test]
    fn basis_enumeration_is_lexicographic() {
        for q in 0..=8usize {
            for p in 0..=q {
                let basis = basis_multi_indices(q, p);
                assert_eq!(basis.len(), binomial(q, p));
                for (r, idx) in basis.iter().enumerate() {
                    assert_eq!(rank_of(idx, q).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn invalid_multi_indices_rejected() {
        assert!(MultiIndex::new(vec![2, 2], 4).is_err());
        assert!(MultiIndex::new(vec![3, 1], 4).is_err());
        assert!(MultiIndex::new(vec![0, 1], 4).is_err());
        assert!(MultiIndex::new(vec![1, 5], 4).is_err());
        assert!(unrank_of(4, 2, 6).is_err());
    }

    #[test]
    fn wedge_orders_and_signs() {
        let q = 4;
        let e1 = Form::basis_one(q, 1).unwrap();
        let e2 = Form::basis_one(q, 2).unwrap();
        let e13 = Form::monomial(q, &mi(&[1, 3], q)).unwrap();
        let e123 = Form::monomial(q, &mi(&[1, 2, 3], q)).unwrap();

        assert_eq!(wedge(&e13, &e2).unwrap(), e123.scaled(-1.0));
        assert_eq!(wedge(&e2, &e1).unwrap(), wedge(&e1, &e2).unwrap().scaled(-1.0));
        assert!(wedge(&e1, &e1).unwrap().is_zero(0.0));
    }

    #[test]
    fn wedge_rejects_overflowing_degree() {
        let q = 2;
        let e12 = Form::monomial(q, &mi(&[1, 2], q)).unwrap();
        let e1 = Form::basis_one(q, 1).unwrap();
        assert!(matches!(wedge(&e12, &e1), Err(Error::DegreeOverflow { .. })));
    }

    #[test]
    fn interior_position_sign() {
        let q = 3;
        let e123 = Form::monomial(q, &mi(&[1, 2, 3], q)).unwrap();
        let e2 = Form::basis_one(q, 2).unwrap();
        let e13 = Form::monomial(q, &mi(&[1, 3], q)).unwrap();
        assert_eq!(interior(&e2, &e123).unwrap(), e13.scaled(-1.0));

        let e1 = Form::basis_one(q, 1).unwrap();
        let one = Form::scalar(q, 1.0);
        assert_eq!(interior(&e1, &e1).unwrap(), one);
        assert!(interior(&e1, &Form::scalar(q, 3.0)).unwrap().is_zero(0.0));
    }

    #[test]
    fn inner_is_coefficient_dot() {
        let q = 4;
        let a = Form::from_coeffs(q, 2, vec![1.0, 2.0, 0.0, -1.0, 0.0, 3.0]).unwrap();
        let b = Form::from_coeffs(q, 2, vec![0.5, 0.0, 1.0, 2.0, 0.0, -1.0]).unwrap();
        assert_eq!(inner(&a, &b).unwrap(), 0.5 - 2.0 - 3.0);
        assert!(inner(&a, &Form::zero(4, 1).unwrap()).is_err());
    }

    #[test]
    fn interior_is_wedge_adjoint() {
        // <X ∧ a, b> = <a, X ⌟ b> spot-checked on a full basis pairing
        let q = 4;
        let x = Form::from_coeffs(q, 1, vec![0.3, -1.2, 0.0, 2.0]).unwrap();
        for (ra, a_idx) in basis_multi_indices(q, 1).iter().enumerate() {
            let _ = ra;
            let a = Form::monomial(q, a_idx).unwrap();
            for b_idx in basis_multi_indices(q, 2) {
                let b = Form::monomial(q, &b_idx).unwrap();
                let lhs = inner(&wedge(&x, &a).unwrap(), &b).unwrap();
                let rhs = inner(&a, &interior(&x, &b).unwrap()).unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn serde_round_trip() {
        let f = Form::from_coeffs(3, 2, vec![1.5, 0.0, -2.0]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"q\":3") && text.contains("\"p\":2"));
        let back: Form = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad: std::result::Result<Form, _> =
            serde_json::from_str("{\"q\":3,\"p\":2,\"coeffs\":[1.0]}");
        assert!(bad.is_err());
    }
}
