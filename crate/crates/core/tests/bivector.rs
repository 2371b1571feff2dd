use lcw_core::bivector::*;
use lcw_core::tensors::{kulkarni_nomizu, Array4};
use lcw_core::weyl_space::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn with_symmetries(n: usize, entries: &[([usize; 4], f64)]) -> Array4 {
    let mut r = Array4::zeros(n);
    for &([i, j, k, l], v) in entries {
        for (idx, s) in [
            ([i, j, k, l], 1.0),
            ([j, i, k, l], -1.0),
            ([i, j, l, k], -1.0),
            ([j, i, l, k], 1.0),
        ] {
            r[idx] = s * v;
            r[[idx[2], idx[3], idx[0], idx[1]]] = s * v;
        }
    }
    r
}

fn cp2() -> CurvatureOperator {
    let r = with_symmetries(
        4,
        &[
            ([0, 1, 0, 1], 4.0),
            ([2, 3, 2, 3], 4.0),
            ([0, 2, 0, 2], 1.0),
            ([0, 3, 0, 3], 1.0),
            ([1, 2, 1, 2], 1.0),
            ([1, 3, 1, 3], 1.0),
            ([0, 1, 2, 3], 2.0),
            ([0, 2, 1, 3], 1.0),
            ([0, 3, 1, 2], -1.0),
        ],
    );
    operator_from_0_4(&r, &DMatrix::identity(4, 4)).unwrap()
}

fn assert_mat_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) {
    assert!((a - b).norm() <= tol, "\n{a}\n{b}");
}

#[test]
fn cp2_blocks() {
    let op = cp2();
    assert!(bianchi_project(&op).norm() < 1e-14);
    let (p, q) = self_dual_bases();
    let a = p.transpose() * &op.mat * &p;
    let c = q.transpose() * &op.mat * &q;
    assert_mat_close(
        &a,
        &DMatrix::from_diagonal(&nalgebra::dvector![6.0, 0.0, 0.0]),
        1e-14,
    );
    assert_mat_close(&c, &(DMatrix::identity(3, 3) * 2.0), 1e-14);
    let split = pm_split(&op).unwrap();
    assert_mat_close(
        &split.w_plus,
        &DMatrix::from_diagonal(&nalgebra::dvector![4.0, -2.0, -2.0]),
        1e-14,
    );
    assert!(split.w_minus.norm() < 1e-14);
    assert!(split.z.norm() < 1e-14);
    assert!((split.scalar_part - 2.0).abs() < 1e-14);
    let ev = op.sorted_eigenvalues();
    let want = [0.0, 0.0, 2.0, 2.0, 2.0, 6.0];
    for (a, b) in ev.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn constant_curvature_operator_is_identity() {
    for n in 3..=5 {
        let g = DMatrix::identity(n, n);
        let r = kulkarni_nomizu(&g, &g).unwrap().scaled(0.5);
        let op = operator_from_0_4(&r, &g).unwrap();
        assert_mat_close(
            &op.mat,
            &DMatrix::identity(op.mat.nrows(), op.mat.nrows()),
            1e-14,
        );
    }
    // A non-orthonormal coordinate frame gives the same operator.
    let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 1.5]);
    let r = kulkarni_nomizu(&g, &g).unwrap().scaled(0.5);
    let op = operator_from_0_4(&r, &g).unwrap();
    assert_mat_close(&op.mat, &DMatrix::identity(3, 3), 1e-13);
}

#[test]
fn operator_rejects_asymmetric_input() {
    let mut r = Array4::zeros(4);
    r[[0, 1, 0, 1]] = 1.0;
    assert!(matches!(
        operator_from_0_4(&r, &DMatrix::identity(4, 4)),
        Err(lcw_core::Error::SymmetryViolation(_))
    ));
}

#[test]
fn kernel_dimensions() {
    for (n, want_b, want_w) in [(3, 6, 0), (4, 20, 10), (5, 50, 35)] {
        assert_eq!(curvature_space_dim(n), want_b, "ker b, n = {n}");
        assert_eq!(weyl_space_basis(n).unwrap().len(), want_w, "weyl, n = {n}");
        assert_eq!(weyl_dim_formula(n), want_w);
    }
}

#[test]
fn bianchi_is_idempotent_and_fixes_four_forms() {
    for n in 4..=5 {
        let b = bianchi_matrix(n);
        assert!((&b * &b - &b).norm() < 1e-13);
    }
    // The volume form of span(e1..e4).
    let mut vol = Array4::zeros(4);
    for (perm, sign) in permutations4() {
        vol[perm] = sign;
    }
    let op = CurvatureOperator::from_tensor(&vol);
    assert_mat_close(&bianchi_project(&op).mat, &op.mat, 1e-14);
}

fn permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        let mut inv = 0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                if p[i] > p[j] {
                                    inv += 1;
                                }
                            }
                        }
                        out.push((p, if inv % 2 == 0 { 1.0 } else { -1.0 }));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn weyl_basis_is_orthonormal_and_constrained() {
    for n in 4..=5 {
        let basis = weyl_space_basis(n).unwrap();
        for (i, a) in basis.iter().enumerate() {
            assert!(bianchi_project(a).norm() < 1e-12);
            assert!(ricci_contract(a).norm() < 1e-12);
            for (j, b) in basis.iter().enumerate() {
                let ip = a.mat.dot(&b.mat);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn phi_dim4_diagonal_form() {
    let lambdas = vec![1.0, 1.0, -2.0];
    let params = EigenflagParams {
        rho: DMatrix::identity(4, 4),
        w2: forced_w2(&lambdas).unwrap(),
        lambdas,
    };
    let w = phi_map(&params).unwrap();
    let (p, q) = self_dual_bases();
    let a = p.transpose() * &w.mat * &p;
    let c = q.transpose() * &w.mat * &q;
    let d = DMatrix::from_diagonal(&nalgebra::dvector![1.0, 1.0, -2.0]);
    assert_mat_close(&a, &d, 1e-14);
    assert_mat_close(&c, &d, 1e-14);
    assert!(discriminant_check(&w).abs() < 1e-20);
}

#[test]
fn phi_zero_is_zero() {
    let params = EigenflagParams {
        rho: DMatrix::identity(5, 5),
        lambdas: vec![0.0; 4],
        w2: CurvatureOperator::zeros(4),
    };
    assert_eq!(phi_map(&params).unwrap().norm(), 0.0);
}

#[test]
fn dimension_reports() {
    let r4 = dimension_report(4).unwrap();
    assert_eq!((r4.dim_weyl, r4.dim_ew, r4.codim), (10, 8, 2));
    assert_eq!(r4.dim_curvature, 20);
    assert!((r4.dim_weyl_literal - 11.5).abs() < 1e-12);
    let r5 = dimension_report(5).unwrap();
    assert_eq!((r5.dim_weyl, r5.dim_ew, r5.codim), (35, 23, 12));
    for n in 4..=6 {
        let r = dimension_report(n).unwrap();
        assert!(
            (r.codim as f64 - r.codim_closed_form).abs() < 1e-9,
            "n = {n}"
        );
    }
    assert!(dimension_report(3).is_err());
}

#[test]
fn pm_split_of_weyl_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let w = random_weyl(4, &mut rng).unwrap();
        let s = pm_split(&w).unwrap();
        assert!(s.z.norm() < 1e-12);
        assert!(s.scalar_part.abs() < 1e-12);
        assert!(s.w_plus.trace().abs() < 1e-12 && s.w_minus.trace().abs() < 1e-12);
    }
}

#[test]
fn round_sphere_four_has_no_weyl_blocks() {
    let g = DMatrix::identity(4, 4);
    let r = kulkarni_nomizu(&g, &g).unwrap().scaled(0.5);
    let s = pm_split(&operator_from_0_4(&r, &g).unwrap()).unwrap();
    assert!(s.w_plus.norm() < 1e-14 && s.w_minus.norm() < 1e-14);
}

fn sym_op(n: usize, seed: u64) -> CurvatureOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = bivector_dim(n);
    let a = DMatrix::from_fn(m, m, |_, _| rand::Rng::random_range(&mut rng, -1.0..1.0));
    CurvatureOperator::new(n, &a + a.transpose()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_reassembles(seed in any::<u64>()) {
        let op = sym_op(4, seed);
        let back = pm_split(&op).unwrap().reassemble();
        prop_assert!((back.mat - &op.mat).norm() <= 1e-12 * op.norm());
    }

    #[test]
    fn b_and_r_are_linear(seed in any::<u64>(), k in -3.0f64..3.0) {
        let a = sym_op(5, seed);
        let b = sym_op(5, seed.wrapping_add(1));
        let lhs = bianchi_project(&(&a + &(&b * k)));
        let rhs = &bianchi_project(&a) + &(&bianchi_project(&b) * k);
        prop_assert!((lhs.mat - rhs.mat).norm() < 1e-12 * (1.0 + a.norm() + b.norm()));
        let lhs = ricci_contract(&(&a + &(&b * k)));
        let rhs = ricci_contract(&a) + ricci_contract(&b) * k;
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + a.norm() + b.norm()));
    }

    #[test]
    fn phi_images_are_weyl_and_rotation_equivariant(seed in any::<u64>(), n in 4usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = EigenflagParams::random(n, &mut rng).unwrap();
        let w = phi_map(&params).unwrap();
        let scale = w.norm().max(1.0);
        prop_assert!(bianchi_project(&w).norm() < 1e-9 * scale);
        prop_assert!(ricci_contract(&w).norm() < 1e-9 * scale);
        let rho2 = random_orthogonal(n, &mut rng);
        let rotated_params = EigenflagParams { rho: &rho2 * &params.rho, ..params.clone() };
        let lhs = phi_map(&rotated_params).unwrap();
        let rhs = rotate_operator(&w, &rho2).unwrap();
        prop_assert!((lhs.mat - rhs.mat).norm() < 1e-10 * scale);
        if n == 4 {
            let s = pm_split(&w).unwrap();
            let mut a: Vec<f64> = s.w_plus.symmetric_eigenvalues().iter().copied().collect();
            let mut b: Vec<f64> = s.w_minus.symmetric_eigenvalues().iter().copied().collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn rotations_preserve_weyl_membership(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_weyl(5, &mut rng).unwrap();
        let rho = random_orthogonal(5, &mut rng);
        let r = rotate_operator(&w, &rho).unwrap();
        prop_assert!(bianchi_project(&r).norm() < 1e-10);
        prop_assert!(ricci_contract(&r).norm() < 1e-10);
        prop_assert!((r.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn rotation_identity_and_non_orthogonal() {
    let op = sym_op(4, 3);
    assert_eq!(rotate_operator(&op, &DMatrix::identity(4, 4)).unwrap(), op);
    let bad = DMatrix::identity(4, 4) * 2.0;
    assert!(matches!(
        rotate_operator(&op, &bad),
        Err(lcw_core::Error::NotOrthogonal(_))
    ));
}
