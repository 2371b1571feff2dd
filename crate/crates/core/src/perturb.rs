//! Local bumps that prescribe curvature or Cotton-York tensor at a point.
//!
//! Targets are tensors at `p` in the metric's own coordinates. A quadratic bump only
//! changes `∂²g(p)` and a cubic bump only changes `∂³g(p)`, so in either case the shift
//! of the prescribed tensor at `p` is linear in the bump and does not depend on `Γ(p)`.
//! In normal coordinates (see [`normal_coordinates`]) `Γ(p) = 0` is preserved.
//!
//! The bump is multiplied by `cutoff(|x − p|² / r²)`, so the new metric agrees with the
//! old one outside the ball of radius `r` and equals the polynomial correction on the
//! ball of radius `r/2`.

use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bivector::pair_symmetry_defect;
use crate::error::{Error, Result};
use crate::expr::{eval_expr, Expr, Func};
use crate::metric::MetricDef;
use crate::tensors::{levi_civita, orthonormal_frame, Array3, Array4, TensorSnapshot};

/// Tolerance for `g(p) = δ` and `Γ(p) = 0`.
pub const NORMAL_TOL: f64 = 1e-9;

/// Default positivity grid: radii × directions.
pub const GRID_RADII: usize = 10;
pub const GRID_DIRECTIONS: usize = 64;

/// Chart `x = p + A y + ½ Q(y, y)` with `g(0) = δ` and `Γ(0) = 0` in the `y` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalChart {
    pub metric: MetricDef,
    pub center: Vec<f64>,
    pub linear: DMatrix<f64>,
    /// `quadratic[[k, a, b]] = Q^k_ab`.
    pub quadratic: Array3,
}

impl NormalChart {
    /// Original coordinates of the chart point `y`.
    pub fn to_original(&self, y: &[f64]) -> Vec<f64> {
        let n = self.center.len();
        (0..n)
            .map(|k| {
                let mut x = self.center[k];
                for a in 0..n {
                    x += self.linear[(k, a)] * y[a];
                    for b in 0..n {
                        x += 0.5 * self.quadratic[[k, a, b]] * y[a] * y[b];
                    }
                }
                x
            })
            .collect()
    }
}

pub fn normal_coordinates(m: &MetricDef, p: &[f64]) -> Result<NormalChart> {
    let n = m.dim();
    if p.len() != n {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, metric has dimension {n}",
            p.len()
        )));
    }
    let snap = TensorSnapshot::compute(m, p)?;
    let a = orthonormal_frame(&snap.g)
        .ok_or_else(|| Error::SingularMetric("no Cholesky factor at the point".into()))?;
    let q = Array3::from_fn(n, |[k, s, t]| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc -= snap.gamma[[k, i, j]] * a[(i, s)] * a[(j, t)];
            }
        }
        acc
    });
    let trivial = p.iter().all(|&x| x == 0.0)
        && (&a - DMatrix::identity(n, n)).norm() == 0.0
        && q.norm() == 0.0;
    if trivial {
        return Ok(NormalChart {
            metric: m.clone(),
            center: p.to_vec(),
            linear: a,
            quadratic: q,
        });
    }

    let y: Vec<Expr> = (0..n).map(Expr::var).collect();
    let x: Vec<Expr> = (0..n)
        .map(|k| {
            let mut terms = vec![Expr::constant(p[k])];
            for s in 0..n {
                terms.push(Expr::constant(a[(k, s)]) * y[s].clone());
                for t in s..n {
                    let c = if s == t { 0.5 } else { 1.0 } * q[[k, s, t]];
                    terms.push(Expr::constant(c) * y[s].clone() * y[t].clone());
                }
            }
            Expr::sum(terms)
        })
        .collect();
    // Jacobian ∂x^k/∂y^s = A_ks + Q^k_st y^t.
    let jac: Vec<Vec<Expr>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|s| {
                    let mut terms = vec![Expr::constant(a[(k, s)])];
                    for t in 0..n {
                        terms.push(Expr::constant(q[[k, s, t]]) * y[t].clone());
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();
    let g_sub: Vec<Vec<Expr>> = (0..n)
        .map(|i| (0..n).map(|j| m.component(i, j).substitute(&x)).collect())
        .collect();
    let mut upper = Vec::with_capacity(n);
    for s in 0..n {
        let mut row = Vec::with_capacity(n - s);
        for t in s..n {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if g_sub[i][j].is_zero() {
                        continue;
                    }
                    terms.push(jac[i][s].clone() * jac[j][t].clone() * g_sub[i][j].clone());
                }
            }
            row.push(Expr::sum(terms));
        }
        upper.push(row);
    }
    let metric = MetricDef::from_upper(n, upper)?
        .with_name(format!("{} (normal coordinates)", m.name))
        .with_chart(format!(
            "normal coordinates centered at ({})",
            p.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    Ok(NormalChart {
        metric,
        center: p.to_vec(),
        linear: a,
        quadratic: q,
    })
}

/// Check `g(p) = δ` and `Γ(p) = 0`.
pub fn check_normal(m: &MetricDef, p: &[f64]) -> Result<TensorSnapshot> {
    let snap = TensorSnapshot::compute(m, p)?;
    let n = m.dim();
    let g_err = (&snap.g - DMatrix::identity(n, n)).amax();
    let gamma_err = snap.gamma.data().iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if g_err > NORMAL_TOL || gamma_err > NORMAL_TOL {
        return Err(Error::PreconditionViolation(format!(
            "coordinates are not normal at the point (|g - I| = {g_err:e}, |Gamma| = {gamma_err:e})"
        )));
    }
    Ok(snap)
}

/// `cutoff(|x − p|² / r²)`.
pub fn cutoff_expr(p: &[f64], radius: f64) -> Expr {
    let r2 = Expr::sum(displacement(p).into_iter().map(|d| d.powi(2)));
    Expr::call(Func::Cutoff, r2 / Expr::constant(radius * radius))
}

/// `x_i − p_i` as expressions.
fn displacement(p: &[f64]) -> Vec<Expr> {
    p.iter()
        .enumerate()
        .map(|(i, &c)| {
            if c == 0.0 {
                Expr::var(i)
            } else {
                Expr::var(i) - Expr::constant(c)
            }
        })
        .collect()
}

/// `g + bump · cutoff`, where `bump` is symmetric.
fn add_bump(m: &MetricDef, bump: &[Vec<Expr>], cutoff: &Expr) -> Result<MetricDef> {
    let n = m.dim();
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        upper.push(
            (i..n)
                .map(|j| {
                    if bump[i][j].is_zero() {
                        m.component(i, j).clone()
                    } else {
                        m.component(i, j).clone() + bump[i][j].clone() * cutoff.clone()
                    }
                })
                .collect(),
        );
    }
    Ok(MetricDef::from_upper(n, upper)?
        .with_name(m.name.clone())
        .with_chart(m.chart.clone()))
}

/// Deterministic sample `p + r·u` for `GRID_RADII` radii in `(0, radius]` and unit `u`.
pub fn sample_grid(p: &[f64], radius: f64, directions: usize) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let dirs: Vec<Vec<f64>> = (0..directions)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(GRID_RADII * directions);
    for k in 1..=GRID_RADII {
        let r = radius * k as f64 / GRID_RADII as f64;
        for d in &dirs {
            out.push(p.iter().zip(d).map(|(c, u)| c + r * u).collect());
        }
    }
    out
}

/// Smallest eigenvalue of the metric over the sample grid.
pub fn min_eigenvalue_on_grid(m: &MetricDef, grid: &[Vec<f64>]) -> Result<f64> {
    let mut min = f64::INFINITY;
    for x in grid {
        let g = m.eval_matrix(x)?;
        let ev = g.symmetric_eigenvalues().min();
        min = min.min(ev);
    }
    Ok(min)
}

fn ensure_positive(m: &MetricDef, p: &[f64], radius: f64) -> Result<f64> {
    let grid = sample_grid(p, radius, GRID_DIRECTIONS);
    let min = min_eigenvalue_on_grid(m, &grid)?;
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "bumped metric has eigenvalue {min:e} on the bump support"
        )));
    }
    Ok(min)
}

/// Multi-indices `i1 <= … <= ik` of length `order`.
fn sorted_multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..order {
        out = out
            .into_iter()
            .flat_map(|v: Vec<usize>| {
                let start = v.last().copied().unwrap_or(0);
                (start..n).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// Sampled `C^k` norm of a symmetric matrix of expressions: the largest partial derivative
/// of order `<= k` over the grid.
pub fn sampled_ck_norm(entries: &[Vec<Expr>], grid: &[Vec<f64>], k: usize) -> Result<f64> {
    let n = entries.len();
    let indices: Vec<Vec<usize>> = (0..=k).flat_map(|o| sorted_multi_indices(n, o)).collect();
    let mut max = 0.0f64;
    for x in grid {
        for i in 0..n {
            for j in i..n {
                if entries[i][j].is_zero() {
                    continue;
                }
                let jet = eval_expr(&entries[i][j], x)?;
                for idx in &indices {
                    max = max.max(jet.partial(idx).abs());
                }
            }
        }
    }
    Ok(max)
}

/// Curvature target at a point, in the metric's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePrescription {
    pub metric: MetricDef,
    pub point: Vec<f64>,
    /// Target `(0,4)` curvature `R⁰` at the point.
    pub target: Array4,
    pub radius: f64,
}

/// A bumped metric with its measured quality.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub metric: MetricDef,
    /// Distance between the achieved and the target tensor at the point.
    pub achieved_error: f64,
    pub target_norm: f64,
    /// Norm of the prescribed shift (`R*` or the Cotton-York difference).
    pub shift_norm: f64,
    /// Sampled `C²` (curvature) or `C³` (Cotton-York) norm of `g' − g`.
    pub bump_norm: f64,
    /// `bump_norm / shift_norm`, or 0 for a zero shift.
    pub norm_ratio: f64,
    /// `max |Γ'(p)|`.
    pub christoffel_at_p: f64,
    pub min_eigenvalue: f64,
}

fn check_algebraic_curvature(r: &Array4) -> Result<()> {
    let n = r.n();
    let scale = r.norm().max(f64::MIN_POSITIVE);
    let mut anti = 0.0f64;
    let mut bianchi = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    anti = anti
                        .max((r[[i, j, k, l]] + r[[j, i, k, l]]).abs())
                        .max((r[[i, j, k, l]] + r[[i, j, l, k]]).abs());
                    bianchi =
                        bianchi.max((r[[i, j, k, l]] + r[[j, k, i, l]] + r[[k, i, j, l]]).abs());
                }
            }
        }
    }
    let defect = anti.max(bianchi).max(pair_symmetry_defect(r));
    if defect > 1e-9 * scale {
        return Err(Error::SymmetryViolation(format!(
            "target is not an algebraic curvature tensor (defect {defect:e})"
        )));
    }
    Ok(())
}

/// `g' = g − ⅓ Σ R*_{ihjk} (x−p)^h (x−p)^k · cutoff` with `R* = R⁰ − R(p)`.
///
/// The bump leaves `g(p)` and `∂g(p)` unchanged, so the curvature at `p` shifts by exactly `R*`.
pub fn prescribe_curvature(cp: &CurvaturePrescription) -> Result<Perturbation> {
    let n = cp.metric.dim();
    if n < 3 || cp.target.n() != n {
        return Err(Error::Dimension(
            "target and metric dimensions differ".into(),
        ));
    }
    if !(cp.radius > 0.0) {
        return Err(Error::PreconditionViolation(
            "bump radius must be positive".into(),
        ));
    }
    check_algebraic_curvature(&cp.target)?;
    let base = TensorSnapshot::compute(&cp.metric, &cp.point)?;
    let r_star = Array4::from_fn(n, |idx| cp.target[idx] - base.riemann[idx]);
    let shift_norm = r_star.norm();
    if shift_norm <= 1e-14 * base.riemann.norm().max(1.0) {
        return Ok(unchanged(&cp.metric, base, cp.target.norm(), shift_norm));
    }

    let y = displacement(&cp.point);
    let bump: Vec<Vec<Expr>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut terms = Vec::new();
                    for h in 0..n {
                        for k in h..n {
                            let mut c = r_star[[i, h, j, k]];
                            if h != k {
                                c += r_star[[i, k, j, h]];
                            }
                            if c.abs() > 1e-300 {
                                terms.push(Expr::constant(-c / 3.0) * y[h].clone() * y[k].clone());
                            }
                        }
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();
    let cutoff = cutoff_expr(&cp.point, cp.radius);
    let metric = add_bump(&cp.metric, &bump, &cutoff)?;
    let min_eigenvalue = ensure_positive(&metric, &cp.point, cp.radius)?;

    let after = TensorSnapshot::compute(&metric, &cp.point)?;
    let achieved_error = after.riemann.max_abs_diff(&cp.target);
    let windowed: Vec<Vec<Expr>> = bump
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    if e.is_zero() {
                        e.clone()
                    } else {
                        e.clone() * cutoff.clone()
                    }
                })
                .collect()
        })
        .collect();
    let grid = sample_grid(&cp.point, cp.radius, 16);
    let bump_norm = sampled_ck_norm(&windowed, &grid, 2)?;
    Ok(Perturbation {
        metric,
        achieved_error,
        target_norm: cp.target.norm(),
        shift_norm,
        bump_norm,
        norm_ratio: bump_norm / shift_norm,
        christoffel_at_p: after.gamma.data().iter().fold(0.0, |a, b| a.max(b.abs())),
        min_eigenvalue,
    })
}

fn unchanged(
    m: &MetricDef,
    snap: TensorSnapshot,
    target_norm: f64,
    shift_norm: f64,
) -> Perturbation {
    let min_eigenvalue = snap.g.symmetric_eigenvalues().min();
    Perturbation {
        metric: m.clone(),
        achieved_error: shift_norm,
        target_norm,
        shift_norm,
        bump_norm: 0.0,
        norm_ratio: 0.0,
        christoffel_at_p: snap.gamma.data().iter().fold(0.0, |a, b| a.max(b.abs())),
        min_eigenvalue,
    }
}

/// Symmetric pairs `i <= j` of `0..3`, in lexicographic order.
pub fn pair_list() -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            v.push((i, j));
        }
    }
    v
}

/// Monomials `k <= l <= m` of `0..3`, in lexicographic order.
pub fn monomial_list() -> Vec<[usize; 3]> {
    sorted_multi_indices(3, 3)
        .into_iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect()
}

pub const COTTON_COEFFS: usize = 60;

/// Position of `A_{ij}^{klm}` in the 60-vector.
pub fn coeff_index(i: usize, j: usize, k: usize, l: usize, m: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    let mut t = [k, l, m];
    t.sort_unstable();
    let pair = pair_list()
        .iter()
        .position(|&p| p == (i, j))
        .expect("pair in range");
    let mono = monomial_list()
        .iter()
        .position(|&q| q == t)
        .expect("monomial in range");
    pair * 10 + mono
}

/// Full tensor `A[i][j][k][l][m]` from the 60-vector.
fn expand_coeffs(a: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; 243];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        full[(((i * 3 + j) * 3 + k) * 3 + l) * 3 + m] =
                            a[coeff_index(i, j, k, l, m)];
                    }
                }
            }
        }
    }
    full
}

/// Linear map from third derivatives `A_{ij}^{klm} = ∂_k∂_l∂_m g_ij(p)` to the Cotton tensor
/// `C_nab = ∇_n S_ab − ∇_a S_nb` at a point with `g(p) = δ`, `∂g(p) = 0`, `∂²g(p) = 0`.
pub fn cotton_l_map(a: &[f64]) -> Result<Array3> {
    if a.len() != COTTON_COEFFS {
        return Err(Error::SymmetryViolation(format!(
            "expected {COTTON_COEFFS} independent coefficients, got {}",
            a.len()
        )));
    }
    let f = expand_coeffs(a);
    let at = |i: usize, j: usize, k: usize, l: usize, m: usize| {
        f[(((i * 3 + j) * 3 + k) * 3 + l) * 3 + m]
    };
    let ds = |n: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                acc += at(i, k, i, k, n) - at(k, k, i, i, n);
            }
        }
        acc
    };
    Ok(Array3::from_fn(3, |[n, a_, b]| {
        let mut acc = 0.0;
        for k in 0..3 {
            acc +=
                at(a_, k, k, b, n) - at(n, k, k, a_, b) - at(a_, b, k, k, n) + at(n, b, k, k, a_);
        }
        let mut c = 0.5 * acc;
        if a_ == b {
            c -= 0.25 * ds(n);
        }
        if n == b {
            c += 0.25 * ds(a_);
        }
        c
    }))
}

/// `L` as a 27×60 matrix on flattened Cotton tensors.
pub fn cotton_l_matrix() -> DMatrix<f64> {
    let mut mat = DMatrix::zeros(27, COTTON_COEFFS);
    for col in 0..COTTON_COEFFS {
        let mut e = vec![0.0; COTTON_COEFFS];
        e[col] = 1.0;
        let c = cotton_l_map(&e).expect("60 coefficients");
        for (row, v) in c.data().iter().enumerate() {
            mat[(row, col)] = *v;
        }
    }
    mat
}

/// Algebraic Cotton tensor `C_kli = Σ_j ε_klj CY_ij` of a Cotton-York matrix in an orthonormal frame.
pub fn cotton_from_cy(cy: &DMatrix<f64>) -> Array3 {
    Array3::from_fn(3, |[k, l, i]| {
        (0..3).map(|j| levi_civita(k, l, j) * cy[(i, j)]).sum()
    })
}

/// Cotton-York target at a point of a dimension-3 metric, in the metric's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CottonPrescription {
    pub metric: MetricDef,
    pub point: Vec<f64>,
    pub target: DMatrix<f64>,
    pub radius: f64,
}

/// Minimum-norm `A` with `L(A) = C`.
pub fn solve_cotton_coefficients(c: &Array3) -> Result<Vec<f64>> {
    let l = cotton_l_matrix();
    let svd = SVD::new(l.clone(), true, true);
    let rank = crate::weyl_space::numeric_rank(svd.singular_values.as_slice());
    if rank != 5 {
        return Err(Error::LinearSolveFailure(format!(
            "L has rank {rank}, expected 5"
        )));
    }
    let rhs = DVector::from_column_slice(c.data());
    let eps = svd.singular_values.max() * 1e-10;
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::LinearSolveFailure(e.to_string()))?;
    let resid = (&l * &sol - &rhs).norm();
    if resid > 1e-9 * rhs.norm().max(1e-300) {
        return Err(Error::LinearSolveFailure(format!(
            "target Cotton tensor is outside the image of L (residual {resid:e})"
        )));
    }
    Ok(sol.iter().copied().collect())
}

/// Cubic bump that moves the Cotton-York tensor at `p` to the target.
///
/// With `y = E⁻¹(x − p)` for a frame `E` orthonormal at `p`, the bump is
/// `(1/6) Σ A_{ab}^{klm} y^k y^l y^m · cutoff` in the `y` components, summed over ordered
/// triples, with `A` the minimum-norm solution of `L(A) = C⁰ − C(p)` in that frame.
pub fn prescribe_cotton_york(cp: &CottonPrescription) -> Result<Perturbation> {
    if cp.metric.dim() != 3 {
        return Err(Error::Dimension(format!(
            "Cotton-York prescription needs dimension 3, got {}",
            cp.metric.dim()
        )));
    }
    if cp.target.nrows() != 3 || cp.target.ncols() != 3 {
        return Err(Error::Dimension("target must be 3x3".into()));
    }
    if !(cp.radius > 0.0) {
        return Err(Error::PreconditionViolation(
            "bump radius must be positive".into(),
        ));
    }
    let base = TensorSnapshot::compute(&cp.metric, &cp.point)?;
    let e = orthonormal_frame(&base.g).expect("checked positive definite");
    let target_frame = e.transpose() * &cp.target * &e;
    let scale = target_frame.norm().max(f64::MIN_POSITIVE);
    // Roundoff in a computed Cotton-York tensor grows with the condition number of g.
    let tol = 1e-12 * (base.g.norm() * base.g_inv.norm()).max(1.0);
    if (&cp.target - cp.target.transpose()).amax() > tol * cp.target.norm().max(f64::MIN_POSITIVE)
        || target_frame.trace().abs() > tol * scale
    {
        return Err(Error::ConstraintViolation(
            "Cotton-York target must be symmetric and traceless".into(),
        ));
    }
    let cy0 = base.cotton_york.clone().expect("dimension 3");
    let shift = e.transpose() * (&cp.target - &cy0) * &e;
    let shift_norm = shift.norm();
    if shift_norm <= 1e-14 * cy0.norm().max(1.0) {
        return Ok(unchanged(&cp.metric, base, cp.target.norm(), shift_norm));
    }
    let coeffs = solve_cotton_coefficients(&cotton_from_cy(&shift))?;

    let f = e.clone().try_inverse().expect("frame is invertible");
    let x = displacement(&cp.point);
    let y: Vec<Expr> = (0..3)
        .map(|a| {
            Expr::sum(
                (0..3)
                    .filter(|&i| f[(a, i)] != 0.0)
                    .map(|i| Expr::constant(f[(a, i)]) * x[i].clone()),
            )
        })
        .collect();
    let monos = monomial_list();
    let frame_bump: Vec<Vec<Expr>> = (0..3)
        .map(|a| {
            (0..3)
                .map(|b| {
                    let mut terms = Vec::new();
                    for mono in &monos {
                        let c = coeffs[coeff_index(a, b, mono[0], mono[1], mono[2])];
                        if c == 0.0 {
                            continue;
                        }
                        // Ordered triples per monomial: 1, 3 or 6.
                        let mult = match (mono[0] == mono[1], mono[1] == mono[2]) {
                            (true, true) => 1.0,
                            (false, false) if mono[0] != mono[2] => 6.0,
                            _ => 3.0,
                        };
                        terms.push(
                            Expr::constant(c * mult / 6.0)
                                * y[mono[0]].clone()
                                * y[mono[1]].clone()
                                * y[mono[2]].clone(),
                        );
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();
    // Components in x: h_ij = F_ai F_bj h_ab.
    let bump: Vec<Vec<Expr>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let mut terms = Vec::new();
                    for a in 0..3 {
                        for b in 0..3 {
                            let c = f[(a, i)] * f[(b, j)];
                            if c != 0.0 && !frame_bump[a][b].is_zero() {
                                terms.push(Expr::constant(c) * frame_bump[a][b].clone());
                            }
                        }
                    }
                    Expr::sum(terms)
                })
                .collect()
        })
        .collect();
    let cutoff = cutoff_expr(&cp.point, cp.radius);
    let metric = add_bump(&cp.metric, &bump, &cutoff)?;
    let min_eigenvalue = ensure_positive(&metric, &cp.point, cp.radius)?;

    let after = TensorSnapshot::compute(&metric, &cp.point)?;
    let achieved = after.cotton_york.as_ref().expect("dimension 3");
    let windowed: Vec<Vec<Expr>> = bump
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    if e.is_zero() {
                        e.clone()
                    } else {
                        e.clone() * cutoff.clone()
                    }
                })
                .collect()
        })
        .collect();
    let grid = sample_grid(&cp.point, cp.radius, 16);
    let bump_norm = sampled_ck_norm(&windowed, &grid, 3)?;
    Ok(Perturbation {
        metric,
        achieved_error: (achieved - &cp.target).norm(),
        target_norm: cp.target.norm(),
        shift_norm,
        bump_norm,
        norm_ratio: bump_norm / shift_norm,
        christoffel_at_p: after.gamma.data().iter().fold(0.0, |a, b| a.max(b.abs())),
        min_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_indexing_is_a_bijection() {
        let mut seen = [false; COTTON_COEFFS];
        for (i, j) in pair_list() {
            for m in monomial_list() {
                let idx = coeff_index(j, i, m[2], m[0], m[1]);
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn l_of_zero_is_zero() {
        assert_eq!(cotton_l_map(&[0.0; 60]).unwrap().norm(), 0.0);
        assert!(cotton_l_map(&[0.0; 59]).is_err());
    }

    #[test]
    fn cotton_from_cy_inverts_the_hodge_contraction() {
        let cy = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, 2.0, -3.0, 0.1, 0.5, 0.1, 2.0]);
        let c = cotton_from_cy(&cy);
        let back = crate::tensors::cotton_york_from(&c, &DMatrix::identity(3, 3)).unwrap();
        assert!((back - cy).norm() < 1e-14);
    }
}
