//! Oracles and generators shared by the integration test targets.
#![allow(dead_code)]

use lcw_core::bivector::{bianchi_project, CurvatureOperator};
use lcw_core::expr::{Expr, Func};
use lcw_core::metric::MetricDef;
use lcw_core::tensors::Array4;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// Multi-indices of total degree 1..=3 as sorted variable lists.
pub fn multi_indices(dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for i in 0..dim {
        out.push(vec![i]);
        for j in i..dim {
            out.push(vec![i, j]);
            for k in j..dim {
                out.push(vec![i, j, k]);
            }
        }
    }
    out
}

/// Central-difference estimate of `∂^vars f` with step `h`: a product of one central
/// difference per listed variable, `O(h²)` accurate.
pub fn central(f: &dyn Fn(&[f64]) -> f64, x: &[f64], vars: &[usize], h: f64) -> f64 {
    let k = vars.len();
    let mut acc = 0.0;
    for signs in 0..(1u32 << k) {
        let mut y = x.to_vec();
        let mut sign = 1.0;
        for (bit, &v) in vars.iter().enumerate() {
            if signs & (1 << bit) != 0 {
                y[v] -= h;
                sign = -sign;
            } else {
                y[v] += h;
            }
        }
        acc += sign * f(&y);
    }
    acc / (2.0 * h).powi(k as i32)
}

/// Two Richardson steps over `h`, `h/2`, `h/4`, cancelling the `h²` and `h⁴` error terms.
pub fn richardson(f: &dyn Fn(&[f64]) -> f64, x: &[f64], vars: &[usize], h: f64) -> f64 {
    let d = [h, h / 2.0, h / 4.0].map(|s| central(f, x, vars, s));
    let r1 = (4.0 * d[1] - d[0]) / 3.0;
    let r2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// Ridders' extrapolation of [`central`]: a Richardson tableau over steps `h0 / 1.4^i`,
/// returning the entry with the smallest error estimate.
pub fn ridders(f: &dyn Fn(&[f64]) -> f64, x: &[f64], vars: &[usize], h0: f64) -> f64 {
    const CON2: f64 = 1.4 * 1.4;
    const NTAB: usize = 10;
    let mut h = h0;
    let mut table = vec![vec![0.0; NTAB]; NTAB];
    table[0][0] = central(f, x, vars, h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= 1.4;
        table[0][i] = central(f, x, vars, h);
        let mut fac = CON2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// Exact `∂^β x^α` at `x` for exponent vectors `α`, `β`.
pub fn monomial_derivative(alpha: &[u32], beta: &[u32], x: &[f64]) -> f64 {
    let mut out = 1.0;
    for i in 0..alpha.len() {
        if beta[i] > alpha[i] {
            return 0.0;
        }
        let falling: u32 = ((alpha[i] - beta[i] + 1)..=alpha[i]).product();
        out *= falling as f64 * x[i].powi((alpha[i] - beta[i]) as i32);
    }
    out
}

pub fn exponents(dim: usize, vars: &[usize]) -> Vec<u32> {
    let mut e = vec![0; dim];
    for &v in vars {
        e[v] += 1;
    }
    e
}

pub fn monomial_expr(alpha: &[u32]) -> Expr {
    let mut e = Expr::constant(1.0);
    for (i, &a) in alpha.iter().enumerate() {
        if a > 0 {
            e = e * Expr::var(i).powi(a as i32);
        }
    }
    e
}

/// Random expression trees that are smooth and finite on `[-1, 1]^dim`.
pub fn smooth_expr(dim: usize) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..dim).prop_map(Expr::var),
        (-1.0f64..1.0).prop_map(Expr::constant),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            // Denominator bounded away from zero.
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| a / (Expr::constant(2.0) + Expr::call(Func::Cos, b))),
            (inner.clone(), 2i32..4).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| -a),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Cos, a)),
            inner.clone().prop_map(|a| Expr::call(Func::Sin, a).exp()),
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Sinh, Expr::call(Func::Sin, a))),
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Cosh, Expr::call(Func::Cos, a))),
            inner
                .clone()
                .prop_map(|a| Expr::call(Func::Sqrt, Expr::constant(1.0) + a.powi(2))),
            inner.prop_map(|a| Expr::call(
                Func::Log,
                Expr::constant(2.0) + Expr::call(Func::Sin, a)
            )),
        ]
    })
}

/// Metric `δ + small polynomial` of degree <= 3 with random coefficients in `(-amp, amp)`.
pub fn near_flat_metric<R: Rng>(dim: usize, rng: &mut R, amp: f64) -> MetricDef {
    let mut upper = Vec::new();
    for i in 0..dim {
        let mut row = Vec::new();
        for j in i..dim {
            let mut terms = vec![Expr::constant(if i == j { 1.0 } else { 0.0 })];
            for a in 0..dim {
                terms.push(Expr::constant(rng.random_range(-amp..amp)) * Expr::var(a));
                for b in a..dim {
                    terms.push(
                        Expr::constant(rng.random_range(-amp..amp)) * Expr::var(a) * Expr::var(b),
                    );
                    let d = rng.random_range(0..dim);
                    terms.push(
                        Expr::constant(rng.random_range(-amp..amp))
                            * Expr::var(a)
                            * Expr::var(b)
                            * Expr::var(d),
                    );
                }
            }
            row.push(Expr::sum(terms));
        }
        upper.push(row);
    }
    MetricDef::from_upper(dim, upper).unwrap()
}

/// Random algebraic curvature tensor of unit norm in an orthonormal frame.
pub fn random_curvature<R: Rng>(n: usize, rng: &mut R) -> Array4 {
    let m = n * (n - 1) / 2;
    let a = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let sym = CurvatureOperator::new(n, (&a + a.transpose()) * 0.5).unwrap();
    let alg = &sym - &bianchi_project(&sym);
    let r = alg.to_tensor();
    r.scaled(1.0 / r.norm())
}

/// Random traceless symmetric 3x3 matrix of unit norm.
pub fn random_traceless<R: Rng>(rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
    let s = (&a + a.transpose()) * 0.5;
    let s = &s - DMatrix::identity(3, 3) * (s.trace() / 3.0);
    &s / s.norm()
}
