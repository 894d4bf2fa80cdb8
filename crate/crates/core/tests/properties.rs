// Randomized structural laws. Coefficients are small dyadic rationals so
// intermediate products stay exactly representable and any residual above
// roundoff scale is a real defect.

use bochner_flow::linalg::{complete_orthonormal, max_abs, plane_induced_matrix};
use bochner_flow::{
    basis_multi_indices, binomial, bochner_direct, bochner_quadratic, bracket_two_form,
    canonical_form, clifford_left, eigenfamilies, ext_bound_report, inner, interior, lambda_bound,
    lie_bracket, norm_identity_check, r_ext_from_h, split_curvature, tilted_product,
    total_bound_report, wedge, AmbientModel, CanonicalBlocks, CurvatureOperator,
    EigenfamilyReport, EqualityChecker, FamilyLabel, Form, Multivector, ONeillTensor,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn dyadic(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo..=hi).prop_map(|k| f64::from(k) / 8.0)
}

fn coeff_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(dyadic(-40, 40), len)
}

fn form_of(q: usize, p: usize) -> impl Strategy<Value = Form> {
    coeff_vec(binomial(q, p)).prop_map(move |c| Form::from_coeffs(q, p, c).unwrap())
}

fn skew_tensor(q: usize) -> impl Strategy<Value = ONeillTensor> {
    coeff_vec(q * (q - 1) / 2).prop_map(move |vals| {
        let mut mat = DMatrix::zeros(q, q);
        let mut t = 0;
        for a in 0..q {
            for b in (a + 1)..q {
                mat[(a, b)] = vals[t];
                mat[(b, a)] = -vals[t];
                t += 1;
            }
        }
        ONeillTensor::new(q, mat).unwrap()
    })
}

fn symmetric_operator(q: usize) -> impl Strategy<Value = CurvatureOperator> {
    let d = binomial(q, 2);
    coeff_vec(d * d).prop_map(move |vals| {
        let raw = DMatrix::from_fn(d, d, |r, c| vals[r * d + c]);
        let sym = (&raw + raw.transpose()).scale(0.5);
        CurvatureOperator::new(q, sym).unwrap()
    })
}

fn rotation(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    coeff_vec(n).prop_map(move |mut v| {
        v[0] += 8.0;
        complete_orthonormal(&DVector::from_vec(v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wedge_graded_antisymmetry(
        (a, b) in (2usize..=7).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p1| {
                (0usize..=(q - p1)).prop_flat_map(move |p2| (form_of(q, p1), form_of(q, p2)))
            })
        })
    ) {
        let ab = wedge(&a, &b).unwrap();
        let sign = if (a.degree() * b.degree()) % 2 == 0 { 1.0 } else { -1.0 };
        let mut diff = wedge(&b, &a).unwrap().scaled(sign);
        diff.add_scaled(&ab, -1.0);
        prop_assert!(diff.is_zero(1e-12));
    }

    #[test]
    fn wedge_associative(
        (a, b, c) in (2usize..=6).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p1| {
                (0usize..=(q - p1)).prop_flat_map(move |p2| {
                    let rest = q - p1 - p2;
                    (
                        form_of(q, p1),
                        form_of(q, p2),
                        (0usize..=rest).prop_flat_map(move |p3| form_of(q, p3)),
                    )
                })
            })
        })
    ) {
        let mut diff = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        diff.add_scaled(&wedge(&wedge(&a, &b).unwrap(), &c).unwrap(), -1.0);
        prop_assert!(diff.is_zero(1e-10));
    }

    #[test]
    fn interior_adjoint_to_wedge(
        (x, a, b) in (2usize..=7).prop_flat_map(|q| {
            (0usize..q).prop_flat_map(move |p| (form_of(q, 1), form_of(q, p), form_of(q, p + 1)))
        })
    ) {
        let lhs = inner(&wedge(&x, &a).unwrap(), &b).unwrap();
        let rhs = inner(&a, &interior(&x, &b).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn interior_antiderivation(
        (x, a, b) in (2usize..=7).prop_flat_map(|q| {
            (1usize..q).prop_flat_map(move |p1| {
                (1usize..=(q - p1))
                    .prop_flat_map(move |p2| (form_of(q, 1), form_of(q, p1), form_of(q, p2)))
            })
        })
    ) {
        let sign = if a.degree() % 2 == 0 { 1.0 } else { -1.0 };
        let mut diff = wedge(&interior(&x, &a).unwrap(), &b).unwrap();
        diff.add_scaled(&wedge(&a, &interior(&x, &b).unwrap()).unwrap(), sign);
        diff.add_scaled(&interior(&x, &wedge(&a, &b).unwrap()).unwrap(), -1.0);
        prop_assert!(diff.is_zero(1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vector_actions_anticommute(
        (x, y, omega) in (2usize..=6).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p| (form_of(q, 1), form_of(q, 1), form_of(q, p)))
        })
    ) {
        let mv = Multivector::from_form(&omega);
        let mut total = clifford_left(&x, &clifford_left(&y, &mv).unwrap()).unwrap();
        total.add_scaled(&clifford_left(&y, &clifford_left(&x, &mv).unwrap()).unwrap(), 1.0);
        total.add_form(&omega, 2.0 * inner(&x, &y).unwrap());
        prop_assert!(total.is_zero(1e-10));
    }

    #[test]
    fn two_form_bracket_closes_degree(
        (psi, omega) in (2usize..=6).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p| (form_of(q, 2), form_of(q, p)))
        })
    ) {
        let mut general = lie_bracket(&psi, &omega).unwrap();
        general.add_form(&bracket_two_form(&psi, &omega).unwrap(), -1.0);
        prop_assert!(general.is_zero(1e-10));
    }

    #[test]
    fn bracket_is_wedge_derivation(
        (psi, x, omega) in (2usize..=6).prop_flat_map(|q| {
            (1usize..q).prop_flat_map(move |p| (form_of(q, 2), form_of(q, 1), form_of(q, p)))
        })
    ) {
        // [psi, x ∧ ω] = x · [psi, ω] + 2 (x ⌟ psi) · ω + [psi, x ⌟ ω]
        let lhs = bracket_two_form(&psi, &wedge(&x, &omega).unwrap()).unwrap();
        let mut rhs = clifford_left(
            &x,
            &Multivector::from_form(&bracket_two_form(&psi, &omega).unwrap()),
        )
        .unwrap();
        let xpsi = interior(&x, &psi).unwrap();
        rhs.add_scaled(&clifford_left(&xpsi, &Multivector::from_form(&omega)).unwrap(), 2.0);
        rhs.add_form(&bracket_two_form(&psi, &interior(&x, &omega).unwrap()).unwrap(), 1.0);
        rhs.add_form(&lhs, -1.0);
        prop_assert!(rhs.is_zero(1e-9));
    }

    #[test]
    fn bracket_norm_identity(
        omega in (2usize..=6).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p| form_of(q, p))
        })
    ) {
        let rep = norm_identity_check(&omega, 1e-10).unwrap();
        prop_assert!(rep.pass, "residual {:.3e}", rep.residual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deformation_curvature_is_frame_equivariant(
        (h, o) in (2usize..=6).prop_flat_map(|q| (skew_tensor(q), rotation(q)))
    ) {
        let q = h.q();
        let rotated = ONeillTensor::new(q, &o * h.mat() * o.transpose()).unwrap();
        let lam = plane_induced_matrix(&o);
        let lhs = r_ext_from_h(&rotated);
        let rhs = &lam * r_ext_from_h(&h).mat() * lam.transpose();
        let scale = max_abs(&rhs).max(1.0);
        prop_assert!(max_abs(&(lhs.mat() - &rhs)) <= 1e-10 * scale);
    }

    #[test]
    fn canonical_form_roundtrip(h in (2usize..=7).prop_flat_map(skew_tensor)) {
        let q = h.q();
        let blocks = canonical_form(&h).unwrap();
        for w in blocks.b().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert!(blocks.b().iter().all(|&x| x >= 0.0));
        let gram = blocks.frame().transpose() * blocks.frame();
        prop_assert!(max_abs(&(&gram - &DMatrix::identity(q, q))) <= 1e-9);
        let scale = max_abs(h.mat()).max(1.0);
        prop_assert!(max_abs(&(&blocks.reconstruct() - h.mat())) <= 1e-9 * scale);
    }

    #[test]
    fn bochner_routes_agree(
        (p, r) in (2usize..=5).prop_flat_map(|q| {
            (0usize..=q).prop_flat_map(move |p| (Just(p), symmetric_operator(q)))
        })
    ) {
        let direct = bochner_direct(&r, p).unwrap();
        let quad = bochner_quadratic(&r, p).unwrap();
        prop_assert!(max_abs(&(direct.mat() - quad.mat())) <= 1e-10);
    }

    #[test]
    fn eigenvalue_bounds_hold(
        (p, r, h) in (3usize..=6).prop_flat_map(|q| {
            (1usize..q).prop_flat_map(move |p| (Just(p), symmetric_operator(q), skew_tensor(q)))
        })
    ) {
        let rep = total_bound_report(&r, &h, p).unwrap();
        let slack = |bound: f64| 1e-9 * bound.abs().max(1.0);
        prop_assert!(rep.min_eig_res >= rep.bound_res_lower - slack(rep.bound_res_lower));
        prop_assert!(rep.max_eig_res <= rep.bound_res_upper + slack(rep.bound_res_upper));
        prop_assert!(rep.min_eig_ext >= rep.bound_ext - slack(rep.bound_ext));
        prop_assert!(rep.min_eig_total >= rep.bound_total - slack(rep.bound_total));
    }

    #[test]
    fn equality_routes_agree_on_random_forms(
        (pair, omega) in (1usize..=4).prop_flat_map(|p| {
            (
                prop::sample::select(vec![(1usize, 2usize), (1, 3), (2, 3)]),
                form_of(6, p),
            )
        })
    ) {
        let (i, j) = pair;
        let checker = EqualityChecker::new(6, omega.degree(), i, j).unwrap();
        let rep = checker.check(&omega, 1e-10).unwrap();
        prop_assert!(rep.consistent);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn families_match_spectrum(
        (q, mut b) in ((1usize..=4), any::<bool>()).prop_flat_map(|(m, odd)| {
            let q = 2 * m + if odd { 1 } else { 0 };
            let entry = prop_oneof![Just(0.0), dyadic(1, 16)];
            (Just(q.max(2)), prop::collection::vec(entry, m))
        })
    ) {
        b.sort_by(f64::total_cmp);
        let blocks = CanonicalBlocks::new(q, b.clone(), DMatrix::identity(q, q)).unwrap();
        let h = ONeillTensor::new(q, blocks.reconstruct()).unwrap();
        let r = r_ext_from_h(&h);
        let report = eigenfamilies(&blocks).unwrap();

        let mut from_families = report.eigenvalues();
        let mut from_matrix = r.eigenvalues();
        from_families.sort_by(f64::total_cmp);
        from_matrix.sort_by(f64::total_cmp);
        prop_assert_eq!(from_families.len(), from_matrix.len());
        for (u, v) in from_families.iter().zip(&from_matrix) {
            prop_assert!((u - v).abs() <= 1e-9, "{} vs {}", u, v);
        }

        let b_sq: f64 = b.iter().map(|x| x * x).sum();
        prop_assert!((r.trace() - 3.0 * b_sq).abs() <= 1e-9 * (1.0 + 3.0 * b_sq));

        if let EigenfamilyReport::Labeled(fams) = &report {
            for fam in fams {
                if fam.label == FamilyLabel::III {
                    prop_assert!(fam.eigenvalue >= -1e-12);
                }
                let mut res = r.apply(&fam.eigenvector).unwrap();
                res.add_scaled(&fam.eigenvector, -fam.eigenvalue);
                prop_assert!(res.is_zero(1e-9));
            }
        }
    }

    #[test]
    fn separated_top_block_forces_strict_margin(
        (q, mut b) in ((2usize..=4), any::<bool>()).prop_flat_map(|(m, odd)| {
            let q = 2 * m + if odd { 1 } else { 0 };
            (Just(q), prop::collection::vec(dyadic(0, 12), m))
        })
    ) {
        b.sort_by(f64::total_cmp);
        let m = b.len();
        b[m - 1] = 1.25 * b[m - 2] + 0.5;
        let h = ONeillTensor::from_blocks(q, &b).unwrap();
        for p in 1..=m {
            let rep = ext_bound_report(&h, p).unwrap();
            prop_assert!(!rep.equality.attained, "p={}", p);
            prop_assert!(rep.equality.margin > 1e-9, "p={} margin={}", p, rep.equality.margin);
        }
    }

    #[test]
    fn single_block_bound_never_attained(
        (q, b1) in (2usize..=3).prop_flat_map(|q| (Just(q), dyadic(1, 16)))
    ) {
        let h = ONeillTensor::from_blocks(q, &[b1]).unwrap();
        for p in 1..q {
            let rep = ext_bound_report(&h, p).unwrap();
            prop_assert!(!rep.equality.attained, "p={}", p);
            prop_assert!(rep.equality.margin > b1 * b1, "p={} margin={}", p, rep.equality.margin);
        }
    }

    #[test]
    fn lambda_bound_monotone(
        (q, p, g0, dg, b0, db) in (2usize..=8).prop_flat_map(|q| {
            (
                Just(q),
                1usize..=(q / 2),
                dyadic(-16, 16),
                dyadic(0, 16),
                dyadic(-16, 16),
                dyadic(0, 16),
            )
        })
    ) {
        let lo = lambda_bound(g0, b0, p, q).unwrap();
        let hi = lambda_bound(g0 + dg, b0 + db, p, q).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tilted_product_restriction_is_frame_independent(o in rotation(6)) {
        let model = tilted_product(2).unwrap();
        let amb = model.ambient.as_ref().unwrap();
        let lam = plane_induced_matrix(&o);
        let rotated = AmbientModel {
            r_full: CurvatureOperator::new(6, &lam * amb.r_full.mat() * lam.transpose()).unwrap(),
            xi: &o * &amb.xi,
            frame: &o * &amb.frame,
        };
        let r_res = rotated.restrict().unwrap();
        for (u, v) in model.r_res.eigenvalues().iter().zip(&r_res.eigenvalues()) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
        let base = bochner_quadratic(&split_curvature(&model.r_res, &model.h).unwrap(), 2)
            .unwrap()
            .eigenvalues();
        let rot = bochner_quadratic(&split_curvature(&r_res, &model.h).unwrap(), 2)
            .unwrap()
            .eigenvalues();
        for (u, v) in base.iter().zip(&rot) {
            prop_assert!((u - v).abs() <= 1e-9);
        }
    }
}

#[test]
fn equality_routes_agree_exhaustively_small() {
    let q = 6;
    for p in 1..=3usize {
        for (i, j) in [(1usize, 2usize), (1, 3), (2, 3)] {
            let checker = EqualityChecker::new(q, p, i, j).unwrap();
            for idx in basis_multi_indices(q, p) {
                let omega = Form::monomial(q, &idx).unwrap();
                let rep = checker.check(&omega, 1e-10).unwrap();
                assert!(rep.consistent, "p={p} blocks=({i},{j}) {:?}", idx.indices());
            }
        }
    }
}
