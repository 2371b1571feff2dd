use lcw_core::bivector::{bianchi_project, operator_from_0_4, CurvatureOperator};
use lcw_core::catalog;
use lcw_core::expr::eval_expr;
use lcw_core::metric::MetricDef;
use lcw_core::obstruction::{cotton_york_test, eigenflag_test, EigenflagConfig, Verdict};
use lcw_core::perturb::*;
use lcw_core::tensors::{Array3, Array4, TensorSnapshot};
use lcw_core::weyl_space::{random_orthogonal, random_weyl};
use lcw_core::Expr;
use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn metric(name: &str) -> MetricDef {
    catalog::entry(name).unwrap().metric().unwrap().clone()
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Random algebraic curvature tensor of unit norm in an orthonormal frame.
fn random_curvature(n: usize, rng: &mut ChaCha8Rng) -> Array4 {
    let m = n * (n - 1) / 2;
    let a = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let sym = CurvatureOperator::new(n, (&a + a.transpose()) * 0.5).unwrap();
    let alg = &sym - &bianchi_project(&sym);
    let r = alg.to_tensor();
    r.scaled(1.0 / r.norm())
}

fn random_traceless(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
    let s = (&a + a.transpose()) * 0.5;
    let t = s.trace() / 3.0;
    s - DMatrix::identity(3, 3) * t
}

fn near_flat(n: usize, rng: &mut ChaCha8Rng, amp: f64) -> MetricDef {
    let mut upper = Vec::new();
    for i in 0..n {
        let mut row = Vec::new();
        for j in i..n {
            let mut e = Expr::constant(if i == j { 1.0 } else { 0.0 });
            for k in 0..n {
                let c: f64 = rng.random_range(-amp..amp);
                let d: f64 = rng.random_range(-amp..amp);
                e = e + Expr::constant(c)
                    * Expr::call(
                        lcw_core::expr::Func::Sin,
                        Expr::constant(d + 1.0) * Expr::var(k),
                    );
            }
            row.push(e);
        }
        upper.push(row);
    }
    MetricDef::from_upper(n, upper).unwrap()
}

#[test]
fn normal_charts() {
    for (name, p) in [
        ("nil", vec![0.0, 0.0, 0.0]),
        ("nil", vec![0.4, -0.3, 1.0]),
        ("sphere3", vec![0.2, 0.1, -0.5]),
        ("sl2r", vec![0.3, 0.5, -0.4]),
        ("hyperbolic3", vec![0.0, 0.5, 1.5]),
        ("r_x_sol", vec![0.0, 0.2, 0.1, 0.3]),
    ] {
        let chart = normal_coordinates(&metric(name), &p).unwrap();
        let origin = vec![0.0; p.len()];
        let snap = check_normal(&chart.metric, &origin).unwrap();
        assert!(max_abs(snap.gamma.data()) < 1e-12, "{name}");
        assert_eq!(chart.to_original(&origin), p);
        // Scalar curvature is a chart invariant.
        let before = TensorSnapshot::compute(&metric(name), &p).unwrap();
        assert!(
            (before.scalar - snap.scalar).abs() < 1e-9 * before.scalar.abs().max(1.0),
            "{name}"
        );
    }
    // The round sphere in stereographic coordinates already has g(0) = 4δ and ∂g(0) = 0.
    let chart = normal_coordinates(&metric("sphere3"), &[0.0; 3]).unwrap();
    assert!(chart.quadratic.norm() < 1e-15);
    assert!((&chart.linear - DMatrix::identity(3, 3) * 0.5).norm() < 1e-15);

    let flat = metric("euclidean3");
    let chart = normal_coordinates(&flat, &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(chart.quadratic.norm(), 0.0);
    assert_eq!(chart.linear, DMatrix::identity(3, 3));
    let same = normal_coordinates(&flat, &[0.0; 3]).unwrap();
    assert_eq!(same.metric, flat);
}

#[test]
fn prescriptions_in_general_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = vec![0.3, -0.2, 0.4];
    let m = metric("nil");
    let base = TensorSnapshot::compute(&m, &p).unwrap();
    let cy = base.cotton_york.clone().unwrap();
    // A g-traceless shift: E S Eᵀ is g-traceless when S is traceless, with EᵀgE = I.
    let e = lcw_core::tensors::orthonormal_frame(&base.g).unwrap();
    let f = e.clone().try_inverse().unwrap();
    let target = &cy + f.transpose() * random_traceless(&mut rng) * &f * 0.05;
    let out = prescribe_cotton_york(&CottonPrescription {
        metric: m.clone(),
        point: p.clone(),
        target: target.clone(),
        radius: 0.3,
    })
    .unwrap();
    assert!(
        out.achieved_error < 1e-6 * target.norm().max(1.0),
        "{}",
        out.achieved_error
    );

    let m4 = metric("r_x_nil");
    let p4 = vec![0.1, 0.3, -0.2, 0.4];
    let base = TensorSnapshot::compute(&m4, &p4).unwrap();
    let shift = random_curvature(4, &mut rng).scaled(1e-2);
    let target = Array4::from_fn(4, |idx| base.riemann[idx] + shift[idx]);
    let out = prescribe_curvature(&CurvaturePrescription {
        metric: m4,
        point: p4,
        target: target.clone(),
        radius: 0.3,
    })
    .unwrap();
    assert!(
        out.achieved_error <= 1e-7 * target.norm(),
        "{}",
        out.achieved_error
    );
}

#[test]
fn flat_curvature_prescription() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let flat = MetricDef::euclidean(4).unwrap();
    for _ in 0..5 {
        let target = random_curvature(4, &mut rng).scaled(1e-2);
        let cp = CurvaturePrescription {
            metric: flat.clone(),
            point: vec![0.0; 4],
            target: target.clone(),
            radius: 1.0,
        };
        let out = prescribe_curvature(&cp).unwrap();
        let snap = TensorSnapshot::compute(&out.metric, &[0.0; 4]).unwrap();
        assert!(snap.riemann.max_abs_diff(&target) <= 1e-7 * target.norm());
        assert!(max_abs(snap.gamma.data()) < 1e-14);
        assert!(out.achieved_error <= 1e-7 * target.norm());
        // Outside the support the metric is unchanged.
        let far = out.metric.eval_matrix(&[1.1, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(far, DMatrix::identity(4, 4));
    }
}

#[test]
fn zero_shift_returns_the_input() {
    let flat = MetricDef::euclidean(4).unwrap();
    let cp = CurvaturePrescription {
        metric: flat.clone(),
        point: vec![0.0; 4],
        target: Array4::zeros(4),
        radius: 1.0,
    };
    assert_eq!(prescribe_curvature(&cp).unwrap().metric, flat);

    let base = metric("euclidean3");
    let cp = CottonPrescription {
        metric: base.clone(),
        point: vec![0.0; 3],
        target: DMatrix::zeros(3, 3),
        radius: 1.0,
    };
    let out = prescribe_cotton_york(&cp).unwrap();
    assert_eq!(out.metric, base);
    assert_eq!(out.norm_ratio, 0.0);
}

#[test]
fn asymmetric_targets_are_rejected() {
    let mut bad = Array4::zeros(4);
    bad[[0, 1, 0, 1]] = 1.0;
    let cp = CurvaturePrescription {
        metric: MetricDef::euclidean(4).unwrap(),
        point: vec![0.0; 4],
        target: bad,
        radius: 1.0,
    };
    assert!(matches!(
        prescribe_curvature(&cp),
        Err(lcw_core::Error::SymmetryViolation(_))
    ));

    let cp = CottonPrescription {
        metric: metric("euclidean3"),
        point: vec![0.0; 3],
        target: DMatrix::identity(3, 3),
        radius: 1.0,
    };
    assert!(matches!(
        prescribe_cotton_york(&cp),
        Err(lcw_core::Error::ConstraintViolation(_))
    ));
}

#[test]
fn large_bumps_fail_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let target = random_curvature(4, &mut rng).scaled(1e3);
    let cp = CurvaturePrescription {
        metric: MetricDef::euclidean(4).unwrap(),
        point: vec![0.0; 4],
        target,
        radius: 1.0,
    };
    assert!(matches!(
        prescribe_curvature(&cp),
        Err(lcw_core::Error::NotPositiveDefinite(_))
    ));
}

#[test]
fn bumps_preserve_low_order_jets() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = normal_coordinates(&near_flat(4, &mut rng, 0.05), &[0.0; 4])
        .unwrap()
        .metric;
    let target = random_curvature(4, &mut rng).scaled(1e-2);
    let out = prescribe_curvature(&CurvaturePrescription {
        metric: base.clone(),
        point: vec![0.0; 4],
        target,
        radius: 0.8,
    })
    .unwrap();
    for i in 0..4 {
        for j in i..4 {
            let a = eval_expr(base.component(i, j), &[0.0; 4])
                .unwrap()
                .truncate(1);
            let b = eval_expr(out.metric.component(i, j), &[0.0; 4])
                .unwrap()
                .truncate(1);
            assert!(max_abs((a - b).coeffs()) < 1e-15);
        }
    }

    let base3 = normal_coordinates(&metric("sol"), &[0.1, 0.2, 0.3])
        .unwrap()
        .metric;
    let target = TensorSnapshot::compute(&base3, &[0.0; 3])
        .unwrap()
        .cotton_york
        .unwrap()
        + random_traceless(&mut rng) * 1e-2;
    let out = prescribe_cotton_york(&CottonPrescription {
        metric: base3.clone(),
        point: vec![0.0; 3],
        target,
        radius: 0.5,
    })
    .unwrap();
    for i in 0..3 {
        for j in i..3 {
            let a = eval_expr(base3.component(i, j), &[0.0; 3])
                .unwrap()
                .truncate(2);
            let b = eval_expr(out.metric.component(i, j), &[0.0; 3])
                .unwrap()
                .truncate(2);
            assert!(max_abs((a - b).coeffs()) < 1e-14);
        }
    }
}

#[test]
fn curvature_at_p_is_independent_of_the_cutoff() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let target = random_curvature(4, &mut rng).scaled(1e-2);
    let at = |radius: f64| {
        let out = prescribe_curvature(&CurvaturePrescription {
            metric: MetricDef::euclidean(4).unwrap(),
            point: vec![0.0; 4],
            target: target.clone(),
            radius,
        })
        .unwrap();
        TensorSnapshot::compute(&out.metric, &[0.0; 4])
            .unwrap()
            .riemann
    };
    assert!(at(0.5).max_abs_diff(&at(1.5)) < 1e-10);

    let cy_at = |radius: f64| {
        let out = prescribe_cotton_york(&CottonPrescription {
            metric: metric("euclidean3"),
            point: vec![0.0; 3],
            target: DMatrix::from_diagonal(&DVector::from_vec(vec![1e-3, 1e-3, -2e-3])),
            radius,
        })
        .unwrap();
        TensorSnapshot::compute(&out.metric, &[0.0; 3])
            .unwrap()
            .cotton_york
            .unwrap()
    };
    assert!((cy_at(0.5) - cy_at(1.5)).norm() < 1e-10);
}

#[test]
fn c2_ratio_is_bounded_per_base() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let base = normal_coordinates(&near_flat(4, &mut rng, 0.05), &[0.0; 4])
        .unwrap()
        .metric;
    let r0 = TensorSnapshot::compute(&base, &[0.0; 4]).unwrap().riemann;
    let mut ratios = Vec::new();
    for k in 0..10 {
        let shift = random_curvature(4, &mut rng).scaled(1e-3 * (1 + k) as f64);
        let target = Array4::from_fn(4, |idx| r0[idx] + shift[idx]);
        let out = prescribe_curvature(&CurvaturePrescription {
            metric: base.clone(),
            point: vec![0.0; 4],
            target,
            radius: 0.8,
        })
        .unwrap();
        ratios.push(out.norm_ratio);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max.is_finite() && min > 0.0);
    // The bump is linear in R*, so the ratio depends on its direction only.
    assert!(max / min < 10.0, "{ratios:?}");
}

#[test]
fn weyl_prescription_breaks_the_eigenflag_condition() {
    let p = [0.0, 0.2, -0.1, 0.3];
    let chart = normal_coordinates(&metric("r_x_sol"), &p).unwrap();
    let origin = [0.0; 4];
    let base = TensorSnapshot::compute(&chart.metric, &origin).unwrap();
    let cfg = EigenflagConfig::default();
    let w = operator_from_0_4(&base.weyl, &base.g).unwrap();
    assert!(eigenflag_test(&w, &cfg).unwrap().verdict == Verdict::PassesNecessary);

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let extra = random_weyl(4, &mut rng).unwrap().to_tensor();
    let eps = 0.1 * base.weyl.norm();
    let target = Array4::from_fn(4, |idx| base.riemann[idx] + eps * extra[idx]);
    let out = prescribe_curvature(&CurvaturePrescription {
        metric: chart.metric.clone(),
        point: origin.to_vec(),
        target,
        radius: 0.4,
    })
    .unwrap();
    let after = TensorSnapshot::compute(&out.metric, &origin).unwrap();
    let w = operator_from_0_4(&after.weyl, &after.g).unwrap();
    assert_eq!(
        eigenflag_test(&w, &cfg).unwrap().verdict,
        Verdict::FailsNecessary
    );
}

fn basis_vector(i: usize, j: usize, k: usize, l: usize, m: usize) -> Vec<f64> {
    let mut e = vec![0.0; COTTON_COEFFS];
    e[coeff_index(i, j, k, l, m)] = 1.0;
    e
}

fn rank(cols: &[Array3]) -> usize {
    let mat = DMatrix::from_fn(27, cols.len(), |r, c| cols[c].data()[r]);
    let sv = SVD::new(mat, false, false).singular_values;
    lcw_core::weyl_space::numeric_rank(sv.as_slice())
}

#[test]
fn l_map_rank_and_listed_basis_images() {
    let listed = [
        basis_vector(0, 0, 0, 1, 1),
        basis_vector(0, 0, 0, 1, 2),
        basis_vector(0, 0, 1, 1, 1),
        basis_vector(0, 0, 1, 1, 2),
        basis_vector(0, 1, 1, 1, 2),
    ];
    let images: Vec<Array3> = listed.iter().map(|e| cotton_l_map(e).unwrap()).collect();
    assert_eq!(rank(&images), 5);
    let all: Vec<Array3> = (0..COTTON_COEFFS)
        .map(|c| {
            let mut e = vec![0.0; COTTON_COEFFS];
            e[c] = 1.0;
            cotton_l_map(&e).unwrap()
        })
        .collect();
    assert_eq!(rank(&all), 5);
}

#[test]
fn l_map_matches_the_pipeline_and_cotton_symmetries() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let a: Vec<f64> = (0..COTTON_COEFFS)
            .map(|_| rng.random_range(-0.1..0.1))
            .collect();
        let c = cotton_l_map(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((c[[i, j, k]] + c[[j, i, k]]).abs() < 1e-15);
                    assert!((c[[i, j, k]] + c[[j, k, i]] + c[[k, i, j]]).abs() < 1e-14);
                }
                let tr1: f64 = (0..3).map(|a| c[[i, a, a]]).sum();
                let tr2: f64 = (0..3).map(|a| c[[a, i, a]]).sum();
                assert!(tr1.abs() < 1e-14 && tr2.abs() < 1e-14);
            }
        }

        // δ + (1/6) Σ A x^k x^l x^m has third derivatives A at the origin.
        let x = |i: usize| Expr::var(i);
        let mut upper = Vec::new();
        for i in 0..3 {
            let mut row = Vec::new();
            for j in i..3 {
                let mut e = Expr::constant(if i == j { 1.0 } else { 0.0 });
                for k in 0..3 {
                    for l in 0..3 {
                        for m in 0..3 {
                            let coef = a[coeff_index(i, j, k, l, m)] / 6.0;
                            e = e + Expr::constant(coef) * x(k) * x(l) * x(m);
                        }
                    }
                }
                row.push(e);
            }
            upper.push(row);
        }
        let g = MetricDef::from_upper(3, upper).unwrap();
        let snap = TensorSnapshot::compute(&g, &[0.0; 3]).unwrap();
        assert!(
            snap.cotton.max_abs_diff(&c) < 1e-12,
            "{}",
            snap.cotton.max_abs_diff(&c)
        );
    }
}

#[test]
fn cotton_york_prescriptions() {
    let flat = metric("euclidean3");
    let target = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -2.0])) * 1e-3;
    let out = prescribe_cotton_york(&CottonPrescription {
        metric: flat,
        point: vec![0.0; 3],
        target: target.clone(),
        radius: 1.0,
    })
    .unwrap();
    let got = TensorSnapshot::compute(&out.metric, &[0.0; 3])
        .unwrap()
        .cotton_york
        .unwrap();
    assert!((got - &target).norm() < 1e-6);
    assert!(out.achieved_error < 1e-6);
    assert!(out.bump_norm > 0.0 && out.min_eigenvalue > 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for name in ["sol", "nil", "h2xr"] {
        let e = catalog::entry(name).unwrap();
        let p = e.random_point(&mut rng);
        let chart = normal_coordinates(e.metric().unwrap(), &p).unwrap();
        let cy = TensorSnapshot::compute(&chart.metric, &[0.0; 3])
            .unwrap()
            .cotton_york
            .unwrap();
        let q = random_orthogonal(3, &mut rng);
        let target = &cy + &q * random_traceless(&mut rng) * q.transpose() * 1e-2;
        let out = prescribe_cotton_york(&CottonPrescription {
            metric: chart.metric,
            point: vec![0.0; 3],
            target,
            radius: 0.3,
        })
        .unwrap();
        assert!(out.achieved_error < 1e-6, "{name}: {}", out.achieved_error);
    }
}

#[test]
fn sol_density_step() {
    let p = [0.1, -0.2, 0.3];
    let chart = normal_coordinates(&metric("sol"), &p).unwrap();
    let origin = [0.0; 3];
    assert_eq!(
        cotton_york_test(&chart.metric, &origin, 1e-8)
            .unwrap()
            .verdict,
        Verdict::PassesNecessary
    );
    let cy = TensorSnapshot::compute(&chart.metric, &origin)
        .unwrap()
        .cotton_york
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let target = &cy + random_traceless(&mut rng) * (0.05 * cy.norm());
    assert!(target.determinant().abs() > 1e-4 * target.norm().powi(3));
    let out = prescribe_cotton_york(&CottonPrescription {
        metric: chart.metric,
        point: origin.to_vec(),
        target,
        radius: 0.3,
    })
    .unwrap();
    assert_eq!(
        cotton_york_test(&out.metric, &origin, 1e-8)
            .unwrap()
            .verdict,
        Verdict::FailsNecessary
    );
}
