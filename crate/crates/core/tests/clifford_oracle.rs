//! Cross-checks the Clifford layer against an independently constructed
//! matrix representation on the full 2^q-dimensional exterior algebra, with
//! basis elements indexed by subset bitmasks. Coefficients are kept integral
//! so agreement is exact, not approximate.

use bochner_flow::exterior::{basis_multi_indices, Form, MultiIndex};
use bochner_flow::clifford::{
    bracket_two_form, clifford_left, clifford_product, clifford_right, lie_bracket, Multivector,
};
use nalgebra::{DMatrix, DVector};

fn bitmask(indices: &[usize]) -> usize {
    indices.iter().fold(0usize, |acc, &i| acc | (1 << (i - 1)))
}

/// Matrix of left multiplication by e_i on the subset basis: adding an absent
/// index costs the parity of smaller set members; removing a present one
/// additionally flips sign.
fn gamma(q: usize, i: usize) -> DMatrix<f64> {
    let dim = 1usize << q;
    let bit = 1usize << (i - 1);
    let mut mat = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        let below = (s & (bit - 1)).count_ones();
        let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
        if s & bit == 0 {
            mat[(s | bit, s)] = sign;
        } else {
            mat[(s & !bit, s)] = -sign;
        }
    }
    mat
}

fn gammas(q: usize) -> Vec<DMatrix<f64>> {
    (1..=q).map(|i| gamma(q, i)).collect()
}

fn form_matrix(q: usize, f: &Form, g: &[DMatrix<f64>]) -> DMatrix<f64> {
    let dim = 1usize << q;
    let mut out = DMatrix::zeros(dim, dim);
    for (rank, idx) in basis_multi_indices(q, f.degree()).iter().enumerate() {
        let c = f.coeffs()[rank];
        if c == 0.0 {
            continue;
        }
        let mut prod = DMatrix::identity(dim, dim);
        for &i in idx.indices() {
            prod = prod * &g[i - 1];
        }
        out += prod * c;
    }
    out
}

fn multivector_matrix(q: usize, mv: &Multivector, g: &[DMatrix<f64>]) -> DMatrix<f64> {
    let dim = 1usize << q;
    let mut out = DMatrix::zeros(dim, dim);
    for p in mv.degrees() {
        out += form_matrix(q, mv.part(p).unwrap(), g);
    }
    out
}

fn form_to_vec(q: usize, f: &Form) -> DVector<f64> {
    let mut v = DVector::zeros(1usize << q);
    for (rank, idx) in basis_multi_indices(q, f.degree()).iter().enumerate() {
        v[bitmask(idx.indices())] = f.coeffs()[rank];
    }
    v
}

fn multivector_to_vec(q: usize, mv: &Multivector) -> DVector<f64> {
    let mut v = DVector::zeros(1usize << q);
    for p in mv.degrees() {
        v += form_to_vec(q, mv.part(p).unwrap());
    }
    v
}

/// Integer-valued form with a fixed index-dependent pattern.
fn patterned_form(q: usize, p: usize, salt: usize) -> Form {
    let dim = basis_multi_indices(q, p).len();
    let coeffs: Vec<f64> = (0..dim)
        .map(|r| (((r * 7 + p * 3 + salt) % 9) as f64) - 4.0)
        .collect();
    Form::from_coeffs(q, p, coeffs).unwrap()
}

fn patterned_multivector(q: usize, salt: usize) -> Multivector {
    let mut mv = Multivector::zero(q);
    for p in 0..=q {
        mv.add_form(&patterned_form(q, p, salt + p), 1.0);
    }
    mv
}

fn exact_eq(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x == y)
}

#[test]
fn generators_satisfy_clifford_relations() {
    for q in 1..=5usize {
        let g = gammas(q);
        let dim = 1usize << q;
        for i in 0..q {
            for j in 0..q {
                let anti = &g[i] * &g[j] + &g[j] * &g[i];
                let expected = if i == j {
                    DMatrix::<f64>::identity(dim, dim) * -2.0
                } else {
                    DMatrix::zeros(dim, dim)
                };
                assert_eq!(anti, expected, "q={q} i={i} j={j}");
            }
        }
    }
}

#[test]
fn vector_action_matches_matrix_representation() {
    for q in 2..=5usize {
        let g = gammas(q);
        let mv = patterned_multivector(q, q);
        let target = multivector_to_vec(q, &mv);
        for i in 1..=q {
            let x = Form::basis_one(q, i).unwrap();
            let ours = clifford_left(&x, &mv).unwrap();
            let oracle = &g[i - 1] * &target;
            assert!(exact_eq(&multivector_to_vec(q, &ours), &oracle), "q={q} i={i}");
        }
        // a mixed integer 1-form
        let x = patterned_form(q, 1, 3);
        let ours = clifford_left(&x, &mv).unwrap();
        let oracle = form_matrix(q, &x, &g) * &target;
        assert!(exact_eq(&multivector_to_vec(q, &ours), &oracle), "q={q} mixed");
    }
}

#[test]
fn right_action_matches_matrix_representation() {
    for q in 2..=5usize {
        let g = gammas(q);
        let mv = patterned_multivector(q, q + 1);
        let m_omega = multivector_matrix(q, &mv, &g);
        for i in 1..=q {
            let x = Form::basis_one(q, i).unwrap();
            let ours = clifford_right(&mv, &x).unwrap();
            // right multiplication: act on the vacuum with M(omega) M(x)
            let oracle_vec = &m_omega * form_matrix(q, &x, &g).column(0).into_owned();
            assert!(exact_eq(&multivector_to_vec(q, &ours), &oracle_vec), "q={q} i={i}");
        }
    }
}

#[test]
fn form_products_match_matrix_representation() {
    for q in 2..=4usize {
        let g = gammas(q);
        let mv = patterned_multivector(q, 2 * q);
        let m_omega = multivector_matrix(q, &mv, &g);
        for a in 0..=q {
            let alpha = patterned_form(q, a, a + 5);
            let ours = clifford_product(&alpha, &mv).unwrap();
            let oracle_vec = form_matrix(q, &alpha, &g) * m_omega.column(0).into_owned();
            assert!(exact_eq(&multivector_to_vec(q, &ours), &oracle_vec), "q={q} a={a}");
        }
    }
}

#[test]
fn brackets_match_matrix_commutators() {
    for q in 2..=5usize {
        let g = gammas(q);
        for p in 0..=q {
            let omega = patterned_form(q, p, p + 1);
            let m_omega = form_matrix(q, &omega, &g);
            let alpha = patterned_form(q, 2, 7);
            let m_alpha = form_matrix(q, &alpha, &g);
            let commutator = (&m_alpha * &m_omega - &m_omega * &m_alpha).column(0).into_owned();

            let ours = lie_bracket(&alpha, &omega).unwrap();
            assert!(exact_eq(&multivector_to_vec(q, &ours), &commutator), "q={q} p={p}");

            // the 2-form bracket is the whole commutator: degree is preserved
            let direct = bracket_two_form(&alpha, &omega).unwrap();
            assert!(
                exact_eq(&form_to_vec(q, &direct), &commutator),
                "degree drift q={q} p={p}"
            );
        }
    }
}

#[test]
fn two_form_bracket_of_noncommuting_monomials() {
    // [e1∧e3, e1∧e5] = 2 e3∧e5, fixing the sign convention concretely
    let q = 5;
    let psi = Form::monomial(q, &MultiIndex::new(vec![1, 3], q).unwrap()).unwrap();
    let omega = Form::monomial(q, &MultiIndex::new(vec![1, 5], q).unwrap()).unwrap();
    let g = gammas(q);
    let m_psi = form_matrix(q, &psi, &g);
    let m_omega = form_matrix(q, &omega, &g);
    let commutator = (&m_psi * &m_omega - &m_omega * &m_psi).column(0).into_owned();

    let expected = Form::monomial(q, &MultiIndex::new(vec![3, 5], q).unwrap())
        .unwrap()
        .scaled(2.0);
    assert!(exact_eq(&form_to_vec(q, &expected), &commutator));

    let ours = bracket_two_form(&psi, &omega).unwrap();
    assert!(exact_eq(&form_to_vec(q, &ours), &commutator));
}
