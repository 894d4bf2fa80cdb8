//! Clifford multiplication of forms over an orthonormal frame.
//!
//! A vector acts on a form by X · ω = X ∧ ω − X ⌟ ω, and from the right by
//! ω · X = (−1)^p (X ∧ ω + X ⌟ ω). Products of higher-degree forms expand the
//! left factor monomial by monomial, so results generally mix degrees; the
//! [`Multivector`] map carries those graded sums.

use crate::error::{Error, Result};
use crate::exterior::{basis_multi_indices, interior, wedge, Form};
use std::collections::BTreeMap;

/// Graded sum of forms, keyed by degree. Parts are kept dense; degrees whose
/// part is structurally absent are simply missing from the map.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    q: usize,
    parts: BTreeMap<usize, Form>,
}

impl Multivector {
    pub fn zero(q: usize) -> Self {
        Multivector { q, parts: BTreeMap::new() }
    }

    pub fn from_form(f: &Form) -> Self {
        let mut mv = Multivector::zero(f.q());
        mv.add_form(f, 1.0);
        mv
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn part(&self, p: usize) -> Option<&Form> {
        self.parts.get(&p)
    }

    /// Degrees present, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        self.parts.keys().copied().collect()
    }

    pub fn add_form(&mut self, f: &Form, scale: f64) {
        assert_eq!(self.q, f.q(), "multivector rank mismatch");
        self.parts
            .entry(f.degree())
            .or_insert_with(|| Form::zero(self.q, f.degree()).expect("degree within rank"))
            .add_scaled(f, scale);
    }

    pub fn add_scaled(&mut self, other: &Multivector, scale: f64) {
        assert_eq!(self.q, other.q, "multivector rank mismatch");
        for f in other.parts.values() {
            self.add_form(f, scale);
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.parts.values().map(|f| f.norm_sq()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.parts.values().all(|f| f.is_zero(tol))
    }

    /// The degree-p part if every other part vanishes within tol.
    pub fn pure_part(&self, p: usize, tol: f64) -> Result<Form> {
        for (&deg, f) in &self.parts {
            if deg != p && !f.is_zero(tol) {
                return Err(Error::DegreeMismatch { expected: p, got: deg });
            }
        }
        match self.parts.get(&p) {
            Some(f) => Ok(f.clone()),
            None => Form::zero(self.q, p),
        }
    }
}

// Basis-vector action, the kernel of every product here. Degree q wedges are
// structural zeros and are skipped rather than reported as overflow.
fn basis_clifford_left(k: usize, f: &Form, out: &mut Multivector, scale: f64) -> Result<()> {
    let q = f.q();
    let ek = Form::basis_one(q, k)?;
    if f.degree() + 1 <= q {
        out.add_form(&wedge(&ek, f)?, scale);
    }
    if f.degree() >= 1 {
        out.add_form(&interior(&ek, f)?, -scale);
    }
    Ok(())
}

/// X · ω = X ∧ ω − X ⌟ ω for a 1-form X, extended over all parts of ω.
pub fn clifford_left(x: &Form, omega: &Multivector) -> Result<Multivector> {
    if x.q() != omega.q() {
        return Err(Error::RankMismatch { expected: x.q(), got: omega.q() });
    }
    if x.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, got: x.degree() });
    }
    let q = x.q();
    let mut out = Multivector::zero(q);
    for (k0, &c) in x.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        for p in omega.degrees() {
            basis_clifford_left(k0 + 1, omega.part(p).expect("listed degree"), &mut out, c)?;
        }
    }
    Ok(out)
}

/// ω · X = (−1)^p (X ∧ ω + X ⌟ ω), extended over all parts of ω.
pub fn clifford_right(omega: &Multivector, x: &Form) -> Result<Multivector> {
    if x.q() != omega.q() {
        return Err(Error::RankMismatch { expected: omega.q(), got: x.q() });
    }
    if x.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, got: x.degree() });
    }
    let q = x.q();
    let mut out = Multivector::zero(q);
    for p in omega.degrees() {
        let f = omega.part(p).expect("listed degree");
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        if p + 1 <= q {
            out.add_form(&wedge(x, f)?, sign);
        }
        if p >= 1 {
            out.add_form(&interior(x, f)?, sign);
        }
    }
    Ok(out)
}

/// Clifford product alpha · omega, expanding alpha monomial by monomial:
/// e_{i1} ∧ … ∧ e_{ip} acts as e_{i1} · ( … · (e_{ip} · omega)).
pub fn clifford_product(alpha: &Form, omega: &Multivector) -> Result<Multivector> {
    if alpha.q() != omega.q() {
        return Err(Error::RankMismatch { expected: alpha.q(), got: omega.q() });
    }
    let q = alpha.q();
    let mut out = Multivector::zero(q);
    if alpha.degree() == 0 {
        out.add_scaled(omega, alpha.coeff(0));
        return Ok(out);
    }
    let basis = basis_multi_indices(q, alpha.degree());
    for (r, &c) in alpha.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut acc = omega.clone();
        for &k in basis[r].indices().iter().rev() {
            let mut next = Multivector::zero(q);
            for p in acc.degrees() {
                basis_clifford_left(k, acc.part(p).expect("listed degree"), &mut next, 1.0)?;
            }
            acc = next;
        }
        out.add_scaled(&acc, c);
    }
    Ok(out)
}

/// Commutator [alpha, omega] = alpha · omega − omega · alpha of two forms.
pub fn lie_bracket(alpha: &Form, omega: &Form) -> Result<Multivector> {
    let left = clifford_product(alpha, &Multivector::from_form(omega))?;
    let right = clifford_product(omega, &Multivector::from_form(alpha))?;
    let mut out = left;
    out.add_scaled(&right, -1.0);
    Ok(out)
}

/// Degree-preserving closed form of the commutator with a 2-form:
/// [psi, omega] = 2 Σ_k (e_k ⌟ psi) ∧ (e_k ⌟ omega).
pub fn bracket_two_form(psi: &Form, omega: &Form) -> Result<Form> {
    if psi.q() != omega.q() {
        return Err(Error::RankMismatch { expected: psi.q(), got: omega.q() });
    }
    if psi.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, got: psi.degree() });
    }
    let q = psi.q();
    let p = omega.degree();
    let mut out = Form::zero(q, p)?;
    if p == 0 {
        return Ok(out);
    }
    for k in 1..=q {
        let ek = Form::basis_one(q, k)?;
        let u = interior(&ek, psi)?;
        if u.is_zero(0.0) {
            continue;
        }
        let v = interior(&ek, omega)?;
        out.add_scaled(&wedge(&u, &v)?, 2.0);
    }
    Ok(out)
}
