mod common;

use common::{
    exponents, monomial_derivative, monomial_expr, multi_indices, richardson, ridders, smooth_expr,
};
use lcw_core::expr::{eval_expr, Func};
use lcw_core::{parse_expr, parse_metric, Expr, Jet3};
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
}

fn dim_expr_point() -> impl Strategy<Value = (usize, Expr, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|d| (Just(d), smooth_expr(d), point(d)))
}

#[test]
fn exp_of_lift_matches_finite_differences() {
    let j = Jet3::lift(&[0.0], 0).unwrap().exp();
    let f = |x: &[f64]| x[0].exp();
    for (k, vars) in [vec![0], vec![0, 0], vec![0, 0, 0]].iter().enumerate() {
        let fd = richardson(&f, &[0.0], vars, 1e-2);
        let fd_small = richardson(&f, &[0.0], vars, 1e-3 * 8.0);
        let factorial = [1.0, 2.0, 6.0][k];
        assert!((j.coeff(vars) - fd / factorial).abs() < 1e-7, "{vars:?}");
        assert!(
            (j.coeff(vars) - fd_small / factorial).abs() < 1e-6,
            "{vars:?}"
        );
    }
    assert_eq!(j.coeffs(), &[1.0, 1.0, 0.5, 1.0 / 6.0]);
}

#[test]
fn cutoff_is_flat_at_the_junctions() {
    for (u, value) in [(0.0, 1.0), (0.25, 1.0), (1.0, 0.0), (1.5, 0.0)] {
        let j = eval_expr(&Expr::call(Func::Cutoff, Expr::var(0)), &[u]).unwrap();
        assert_eq!(j.coeffs(), &[value, 0.0, 0.0, 0.0], "{u}");
    }
}

#[test]
fn metric_file_examples() {
    let sol = parse_metric("dim = 3\ng11 = exp(2*x3)\ng22 = exp(-2*x3)\ng33 = 1\n").unwrap();
    let g = sol.eval_matrix(&[0.3, -0.2, 0.5]).unwrap();
    assert!((g[(0, 0)] - 1f64.exp()).abs() < 1e-15);
    assert!((g[(1, 1)] - (-1f64).exp()).abs() < 1e-15);
    assert_eq!(g[(0, 1)], 0.0);

    // dx² + dy² + (dz − x dy)² expanded.
    let nil = parse_metric("dim = 3\ng11 = 1\ng22 = 1 + x1^2\ng23 = -x1\ng33 = 1\n").unwrap();
    let (x, y, z) = (0.7, -0.4, 1.1);
    let g = nil.eval_matrix(&[x, y, z]).unwrap();
    let quad = |v: [f64; 3]| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += g[(i, j)] * v[i] * v[j];
            }
        }
        s
    };
    for v in [[1.0, 0.0, 0.0], [0.2, -1.0, 0.5], [0.0, 0.3, 0.9]] {
        let direct = v[0] * v[0] + v[1] * v[1] + (v[2] - x * v[1]).powi(2);
        assert!((quad(v) - direct).abs() < 1e-14);
    }

    match parse_metric("dim = 3\ng11 = x1 +\n") {
        Err(lcw_core::Error::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected syntax error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomials_are_exact(
        dim in 2usize..=6,
        coeffs in prop::collection::vec(-3.0f64..3.0, 84),
        x in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        let x = &x[..dim];
        let mut monos = vec![vec![]];
        monos.extend(multi_indices(dim));
        let alphas: Vec<Vec<u32>> = monos.iter().map(|m| exponents(dim, m)).collect();
        let poly = Expr::sum(
            alphas.iter().zip(&coeffs).map(|(a, &c)| Expr::constant(c) * monomial_expr(a)),
        );
        let jet = eval_expr(&poly, x).unwrap();
        for beta_vars in &monos {
            let beta = exponents(dim, beta_vars);
            let exact: f64 = alphas
                .iter()
                .zip(&coeffs)
                .map(|(a, &c)| c * monomial_derivative(a, &beta, x))
                .sum();
            let scale: f64 = alphas
                .iter()
                .zip(&coeffs)
                .map(|(a, &c)| (c * monomial_derivative(a, &beta, &x.iter().map(|v| v.abs()).collect::<Vec<_>>())).abs())
                .sum::<f64>()
                .max(1e-300);
            prop_assert!(
                (jet.partial(beta_vars) - exact).abs() <= 1e-13 * scale,
                "{:?}: {} vs {}", beta_vars, jet.partial(beta_vars), exact
            );
        }
    }

    #[test]
    fn derivatives_match_richardson_finite_differences((dim, e, x) in dim_expr_point()) {
        let jet = eval_expr(&e, &x).unwrap();
        let f = |y: &[f64]| e.eval_f64(y).unwrap();
        prop_assert!((jet.value() - f(&x)).abs() <= 1e-14 * (1.0 + f(&x).abs()));
        for vars in multi_indices(dim) {
            let exact = jet.partial(&vars);
            let fd = ridders(&f, &x, &vars, 0.02);
            prop_assert!(
                (exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()),
                "{} {:?}: jet {} vs fd {}", e, vars, exact, fd
            );
        }
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(
        (dim, a, x) in dim_expr_point(),
        b_seed in any::<u64>(),
    ) {
        // A second expression in the same dimension.
        let b = Expr::call(Func::Sin, Expr::var((b_seed % dim as u64) as usize))
            + Expr::constant((b_seed % 7) as f64 / 7.0) * a.clone();
        let ja = eval_expr(&a, &x).unwrap();
        let jb = eval_expr(&b, &x).unwrap();
        prop_assert_eq!(eval_expr(&(a.clone() * b.clone()), &x).unwrap(), ja * jb);
        prop_assert_eq!(eval_expr(&(a.clone() + b.clone()), &x).unwrap(), ja + jb);
        prop_assert_eq!(eval_expr(&(b * a), &x).unwrap(), jb * ja);
    }

    #[test]
    fn parse_print_parse_is_stable((_dim, e, x) in dim_expr_point()) {
        let once = parse_expr(&e.to_string()).unwrap();
        let twice = parse_expr(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.to_string(), twice.to_string());
        let before = e.eval_f64(&x).unwrap();
        let after = once.eval_f64(&x).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * (1.0 + before.abs()));
    }

    #[test]
    fn cutoff_matches_finite_differences(u in 0.0f64..1.2) {
        let e = Expr::call(Func::Cutoff, Expr::var(0));
        let jet = eval_expr(&e, &[u]).unwrap();
        let f = |y: &[f64]| e.eval_f64(y).unwrap();
        // The profile is piecewise polynomial; the stencil, which reaches 3h, stays in one piece.
        let h = 2e-2f64.min((u - 0.25).abs() / 4.0).min((u - 1.0).abs() / 4.0);
        prop_assume!(h >= 5e-3);
        for vars in [vec![0], vec![0, 0], vec![0, 0, 0]] {
            let exact = jet.partial(&vars);
            let fd = richardson(&f, &[u], &vars, h);
            prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{:?}: {} vs {}", vars, exact, fd);
        }
    }
}
