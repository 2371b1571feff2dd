//! Pointwise curvature tensors of a coordinate metric.
//!
//! Conventions: `R_ijkl = <R(∂_i, ∂_j)∂_k, ∂_l>` with `R_1212 > 0` on the round
//! sphere, `Ric_jl = g^ik R_ijkl`, `S = (Ric - s g / (2(n-1))) / (n-2)`,
//! `W = R - S ⊙ g` (Kulkarni-Nomizu), `C_ijk = ∇_i S_jk - ∇_j S_ik`.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::json;
use crate::metric::MetricDef;

/// Largest accepted condition number of `g(p)`.
pub const MAX_CONDITION: f64 = 1e12;

macro_rules! dense_array {
    ($name:ident, $rank:literal) => {
        /// Dense array with all extents equal to `n`, row-major.
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            n: usize,
            data: Vec<f64>,
        }

        impl $name {
            pub fn zeros(n: usize) -> Self {
                $name {
                    n,
                    data: vec![0.0; n.pow($rank)],
                }
            }

            pub fn from_fn(n: usize, mut f: impl FnMut([usize; $rank]) -> f64) -> Self {
                let mut out = Self::zeros(n);
                for flat in 0..out.data.len() {
                    let mut idx = [0usize; $rank];
                    let mut r = flat;
                    for slot in idx.iter_mut().rev() {
                        *slot = r % n;
                        r /= n;
                    }
                    out.data[flat] = f(idx);
                }
                out
            }

            pub fn n(&self) -> usize {
                self.n
            }

            pub fn data(&self) -> &[f64] {
                &self.data
            }

            /// Frobenius norm of the component array.
            pub fn norm(&self) -> f64 {
                self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                assert_eq!(self.n, other.n);
                self.data
                    .iter()
                    .zip(&other.data)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            }

            pub fn scaled(&self, k: f64) -> Self {
                $name {
                    n: self.n,
                    data: self.data.iter().map(|x| k * x).collect(),
                }
            }

            fn offset(&self, idx: [usize; $rank]) -> usize {
                idx.iter().fold(0, |acc, &i| {
                    debug_assert!(i < self.n);
                    acc * self.n + i
                })
            }

            pub fn to_json(&self) -> Value {
                json::nested(&self.data, &[self.n; $rank])
            }
        }

        impl Index<[usize; $rank]> for $name {
            type Output = f64;
            fn index(&self, idx: [usize; $rank]) -> &f64 {
                &self.data[self.offset(idx)]
            }
        }

        impl IndexMut<[usize; $rank]> for $name {
            fn index_mut(&mut self, idx: [usize; $rank]) -> &mut f64 {
                let o = self.offset(idx);
                &mut self.data[o]
            }
        }
    };
}

dense_array!(Array3, 3);
dense_array!(Array4, 4);

/// Kulkarni-Nomizu product
/// `(α ⊙ β)_ijkl = α_ik β_jl + β_ik α_jl - α_il β_jk - α_jk β_il`.
pub fn kulkarni_nomizu(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Array4> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(Error::Dimension(
            "Kulkarni-Nomizu factors must be square of equal size".into(),
        ));
    }
    Ok(Array4::from_fn(n, |[i, j, k, l]| {
        a[(i, k)] * b[(j, l)] + b[(i, k)] * a[(j, l)]
            - a[(i, l)] * b[(j, k)]
            - a[(j, k)] * b[(i, l)]
    }))
}

/// Check `g(p)` is positive definite and well conditioned.
pub fn check_metric_matrix(g: &DMatrix<f64>) -> Result<()> {
    let eig = SymmetricEigen::new(g.clone());
    let max = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let scale = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || min.abs() * MAX_CONDITION < scale {
        return Err(Error::SingularMetric(format!(
            "condition number exceeds {MAX_CONDITION:e} (eigenvalues in [{min:e}, {max:e}])"
        )));
    }
    if min < 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue of g is {min:e}"
        )));
    }
    Ok(())
}

/// Christoffel symbols at a point together with their first partials.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelJet {
    /// `Γ^k_ij` at `[k, i, j]`.
    pub gamma: Array3,
    /// `∂_a Γ^k_ij` at `[k, i, j, a]`.
    pub d_gamma: Array4,
}

/// Jets of the metric and its curvature at one point. Orders: g, g⁻¹: 3; Γ: 2; R: 1.
struct JetGeometry {
    n: usize,
    g0: DMatrix<f64>,
    g: Vec<Jet3>,
    g_inv: Vec<Jet3>,
    gamma: Vec<Jet3>,
    riemann: Vec<Jet3>,
}

fn mat_mul(n: usize, a: &[Jet3], b: &[Jet3]) -> Vec<Jet3> {
    let mut out = vec![Jet3::zero(n); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = a[i * n] * b[j];
            for k in 1..n {
                acc = acc + a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

impl JetGeometry {
    fn new(m: &MetricDef, p: &[f64]) -> Result<Self> {
        let n = m.dim();
        let jets = m.eval_jets(p)?;
        let g: Vec<Jet3> = jets.into_iter().flatten().collect();
        let g0 = DMatrix::from_fn(n, n, |i, j| g[i * n + j].value());
        check_metric_matrix(&g0)?;
        let g0_inv = g0
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularMetric("g(p) is not invertible".into()))?;

        // g⁻¹ = (I - X + X² - X³) G0⁻¹ with X = G0⁻¹ (g - G0); X has no constant term.
        let inv0: Vec<Jet3> = (0..n * n)
            .map(|k| Jet3::constant(n, g0_inv[(k / n, k % n)]))
            .collect();
        let h: Vec<Jet3> = (0..n * n).map(|k| g[k].add_const(-g[k].value())).collect();
        let x = mat_mul(n, &inv0, &h);
        let mut term = inv0.clone();
        let mut g_inv = inv0.clone();
        for sign in [-1.0, 1.0, -1.0] {
            term = mat_mul(n, &x, &term);
            for (acc, t) in g_inv.iter_mut().zip(&term) {
                *acc = *acc + t.scale(sign);
            }
        }

        // dg[(a * n + i) * n + j] = ∂_a g_ij
        let mut dg = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for k in 0..n * n {
                dg.push(g[k].d(a));
            }
        }
        let dgi = |a: usize, i: usize, j: usize| dg[(a * n + i) * n + j];
        // Γ_{l,ij} = ½(∂_i g_lj + ∂_j g_li - ∂_l g_ij)
        let mut gamma_low = Vec::with_capacity(n * n * n);
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    gamma_low.push((dgi(i, l, j) + dgi(j, l, i) - dgi(l, i, j)).scale(0.5));
                }
            }
        }
        let gl = |l: usize, i: usize, j: usize| gamma_low[(l * n + i) * n + j];
        let mut gamma = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = g_inv[k * n] * gl(0, i, j);
                    for l in 1..n {
                        acc = acc + g_inv[k * n + l] * gl(l, i, j);
                    }
                    gamma.push(acc);
                }
            }
        }
        let gu = |k: usize, i: usize, j: usize| gamma[(k * n + i) * n + j];

        // R_iklm = ½(g_im,kl + g_kl,im - g_il,km - g_km,il)
        //        + Γ_{p,kl} Γ^p_im - Γ_{p,km} Γ^p_il
        let ddg = |i: usize, j: usize, a: usize, b: usize| dgi(a, i, j).d(b);
        let mut riemann = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for mm in 0..n {
                        let mut acc = (ddg(i, mm, k, l) + ddg(k, l, i, mm)
                            - ddg(i, l, k, mm)
                            - ddg(k, mm, i, l))
                        .scale(0.5);
                        for q in 0..n {
                            acc = acc + gl(q, k, l) * gu(q, i, mm) - gl(q, k, mm) * gu(q, i, l);
                        }
                        riemann.push(acc.truncate(1));
                    }
                }
            }
        }
        Ok(JetGeometry {
            n,
            g0,
            g,
            g_inv,
            gamma,
            riemann,
        })
    }

    fn christoffel(&self) -> ChristoffelJet {
        let n = self.n;
        let idx = |k: usize, i: usize, j: usize| (k * n + i) * n + j;
        ChristoffelJet {
            gamma: Array3::from_fn(n, |[k, i, j]| self.gamma[idx(k, i, j)].value()),
            d_gamma: Array4::from_fn(n, |[k, i, j, a]| self.gamma[idx(k, i, j)].partial(&[a])),
        }
    }

    fn riemann(&self) -> Array4 {
        Array4::from_fn(self.n, |[i, j, k, l]| {
            self.riemann[((i * self.n + j) * self.n + k) * self.n + l].value()
        })
    }

    /// Order-1 jets of Ric, s, S, W.
    fn curvature_split(&self) -> Result<Split> {
        let n = self.n;
        if n < 3 {
            return Err(Error::Dimension(format!(
                "Schouten tensor needs dimension >= 3, got {n}"
            )));
        }
        let r =
            |i: usize, j: usize, k: usize, l: usize| self.riemann[((i * n + j) * n + k) * n + l];
        let gi = |i: usize, j: usize| self.g_inv[i * n + j].truncate(1);
        let mut ric = vec![Jet3::zero(n).truncate(1); n * n];
        for j in 0..n {
            for l in 0..n {
                let mut acc = Jet3::zero(n).truncate(1);
                for i in 0..n {
                    for k in 0..n {
                        acc = acc + gi(i, k) * r(i, j, k, l);
                    }
                }
                ric[j * n + l] = acc;
            }
        }
        let mut s = Jet3::zero(n).truncate(1);
        for j in 0..n {
            for l in 0..n {
                s = s + gi(j, l) * ric[j * n + l];
            }
        }
        let g1: Vec<Jet3> = self.g.iter().map(|j| j.truncate(1)).collect();
        let nf = n as f64;
        let schouten: Vec<Jet3> = (0..n * n)
            .map(|k| (ric[k] - s * g1[k] * (1.0 / (2.0 * (nf - 1.0)))).scale(1.0 / (nf - 2.0)))
            .collect();
        let sg = |a: usize, b: usize| schouten[a * n + b];
        let gg = |a: usize, b: usize| g1[a * n + b];
        let mut weyl = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let kn = sg(i, k) * gg(j, l) + gg(i, k) * sg(j, l)
                            - sg(i, l) * gg(j, k)
                            - sg(j, k) * gg(i, l);
                        weyl.push(r(i, j, k, l) - kn);
                    }
                }
            }
        }
        Ok(Split {
            ric,
            s,
            schouten,
            weyl,
        })
    }

    fn gamma_value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j].value()
    }

    /// `C_ijk = ∇_i S_jk - ∇_j S_ik`, with `∇_a S_bc = ∂_a S_bc - Γ^m_ab S_mc - Γ^m_ac S_bm`.
    fn cotton(&self, split: &Split) -> Array3 {
        let n = self.n;
        let s = |a: usize, b: usize| split.schouten[a * n + b];
        let nabla = |a: usize, b: usize, c: usize| {
            let mut v = s(b, c).partial(&[a]);
            for m in 0..n {
                v -= self.gamma_value(m, a, b) * s(m, c).value()
                    + self.gamma_value(m, a, c) * s(b, m).value();
            }
            v
        };
        Array3::from_fn(n, |[i, j, k]| nabla(i, j, k) - nabla(j, i, k))
    }

    /// `g^ab ∇_b W_akij`.
    fn div_weyl(&self, split: &Split) -> Array3 {
        let n = self.n;
        let w = |a: usize, b: usize, c: usize, d: usize| split.weyl[((a * n + b) * n + c) * n + d];
        let nabla_w = |e: usize, a: usize, b: usize, c: usize, d: usize| {
            let mut v = w(a, b, c, d).partial(&[e]);
            for m in 0..n {
                v -= self.gamma_value(m, e, a) * w(m, b, c, d).value()
                    + self.gamma_value(m, e, b) * w(a, m, c, d).value()
                    + self.gamma_value(m, e, c) * w(a, b, m, d).value()
                    + self.gamma_value(m, e, d) * w(a, b, c, m).value();
            }
            v
        };
        let gi = |a: usize, b: usize| self.g_inv[a * n + b].value();
        Array3::from_fn(n, |[i, j, k]| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in 0..n {
                    let g = gi(a, b);
                    if g != 0.0 {
                        acc += g * nabla_w(b, a, k, i, j);
                    }
                }
            }
            acc
        })
    }
}

struct Split {
    ric: Vec<Jet3>,
    s: Jet3,
    schouten: Vec<Jet3>,
    weyl: Vec<Jet3>,
}

fn values_matrix(n: usize, jets: &[Jet3]) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| jets[i * n + j].value())
}

/// Permutation sign of `(k, l, m)` over `{0, 1, 2}`.
pub fn levi_civita(k: usize, l: usize, m: usize) -> f64 {
    match (k, l, m) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `CY_ij = ½ C_kli g_jm ε^klm / √det g` (dimension 3).
pub fn cotton_york_from(c: &Array3, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if c.n() != 3 || g.nrows() != 3 {
        return Err(Error::Dimension(
            "Cotton-York tensor is defined in dimension 3".into(),
        ));
    }
    let sq = g.determinant().sqrt();
    let mut cy = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        let e = levi_civita(k, l, m);
                        if e != 0.0 {
                            acc += c[[k, l, i]] * g[(j, m)] * e;
                        }
                    }
                }
            }
            cy[(i, j)] = 0.5 * acc / sq;
        }
    }
    Ok(cy)
}

/// Every pointwise tensor at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSnapshot {
    pub dim: usize,
    pub point: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `Γ^k_ij` at `[k, i, j]`.
    pub gamma: Array3,
    pub riemann: Array4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub schouten: DMatrix<f64>,
    pub weyl: Array4,
    pub cotton: Array3,
    /// Dimension 3 only.
    pub cotton_york: Option<DMatrix<f64>>,
    /// `g^ab ∇_b W_akij`; dimension >= 4 only.
    pub div_weyl: Option<Array3>,
}

/// Tensor names accepted by [`TensorSnapshot::to_json`].
pub const TENSOR_KEYS: [&str; 10] = [
    "g",
    "gamma",
    "riemann",
    "ricci",
    "scalar",
    "schouten",
    "weyl",
    "cotton",
    "cotton_york",
    "div_weyl",
];

impl TensorSnapshot {
    pub fn compute(m: &MetricDef, p: &[f64]) -> Result<Self> {
        let geo = JetGeometry::new(m, p)?;
        let split = geo.curvature_split()?;
        let n = geo.n;
        let g = geo.g0.clone();
        let cotton = geo.cotton(&split);
        let cotton_york = if n == 3 {
            Some(cotton_york_from(&cotton, &g)?)
        } else {
            None
        };
        let div_weyl = (n >= 4).then(|| geo.div_weyl(&split));
        Ok(TensorSnapshot {
            dim: n,
            point: p.to_vec(),
            g_inv: values_matrix(n, &geo.g_inv),
            gamma: geo.christoffel().gamma,
            riemann: geo.riemann(),
            ricci: values_matrix(n, &split.ric),
            scalar: split.s.value(),
            schouten: values_matrix(n, &split.schouten),
            weyl: Array4::from_fn(n, |[i, j, k, l]| {
                split.weyl[((i * n + j) * n + k) * n + l].value()
            }),
            cotton,
            cotton_york,
            div_weyl,
            g,
        })
    }

    /// `W^l_ijk = g^lm W_ijkm`, stored at `[i, j, k, l]`.
    pub fn weyl_1_3(&self) -> Array4 {
        let n = self.dim;
        Array4::from_fn(n, |[i, j, k, l]| {
            (0..n)
                .map(|m| self.g_inv[(l, m)] * self.weyl[[i, j, k, m]])
                .sum()
        })
    }

    /// Cotton-York in a g-orthonormal frame: `E^T CY E` with `E = L^{-T}`, `g = L L^T`.
    pub fn cotton_york_orthonormal(&self) -> Option<DMatrix<f64>> {
        let cy = self.cotton_york.as_ref()?;
        let e = orthonormal_frame(&self.g)?;
        Some(e.transpose() * cy * e)
    }

    /// JSON object restricted to `which` (all keys when empty).
    pub fn to_json(&self, which: &[&str]) -> Result<Value> {
        for w in which {
            if !TENSOR_KEYS.contains(w) {
                return Err(Error::Io(format!(
                    "unknown tensor `{w}` (expected one of {})",
                    TENSOR_KEYS.join(", ")
                )));
            }
        }
        let wanted = |k: &str| which.is_empty() || which.contains(&k);
        let mut obj = Map::new();
        obj.insert("dim".into(), json!(self.dim));
        obj.insert("point".into(), json::vec(&self.point));
        for key in TENSOR_KEYS {
            if !wanted(key) {
                continue;
            }
            let v = match key {
                "g" => json::matrix(&self.g),
                "gamma" => self.gamma.to_json(),
                "riemann" => self.riemann.to_json(),
                "ricci" => json::matrix(&self.ricci),
                "scalar" => json::num(self.scalar),
                "schouten" => json::matrix(&self.schouten),
                "weyl" => self.weyl.to_json(),
                "cotton" => self.cotton.to_json(),
                "cotton_york" => self.cotton_york.as_ref().map_or(Value::Null, json::matrix),
                "div_weyl" => self.div_weyl.as_ref().map_or(Value::Null, Array3::to_json),
                _ => unreachable!(),
            };
            obj.insert(key.into(), v);
        }
        Ok(Value::Object(obj))
    }
}

/// Columns form a g-orthonormal frame: `E^T g E = I`.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let l = g.clone().cholesky()?.l();
    l.transpose().try_inverse()
}

pub fn christoffel(m: &MetricDef, p: &[f64]) -> Result<ChristoffelJet> {
    Ok(JetGeometry::new(m, p)?.christoffel())
}

pub fn riemann_0_4(m: &MetricDef, p: &[f64]) -> Result<Array4> {
    Ok(JetGeometry::new(m, p)?.riemann())
}

/// `(Ric, s, S)` at `p`.
pub fn ricci_scalar_schouten(
    m: &MetricDef,
    p: &[f64],
) -> Result<(DMatrix<f64>, f64, DMatrix<f64>)> {
    let geo = JetGeometry::new(m, p)?;
    let split = geo.curvature_split()?;
    let n = geo.n;
    Ok((
        values_matrix(n, &split.ric),
        split.s.value(),
        values_matrix(n, &split.schouten),
    ))
}

pub fn weyl_0_4(m: &MetricDef, p: &[f64]) -> Result<Array4> {
    Ok(TensorSnapshot::compute(m, p)?.weyl)
}

pub fn cotton(m: &MetricDef, p: &[f64]) -> Result<Array3> {
    Ok(TensorSnapshot::compute(m, p)?.cotton)
}

pub fn cotton_york(m: &MetricDef, p: &[f64]) -> Result<DMatrix<f64>> {
    if m.dim() != 3 {
        return Err(Error::Dimension(format!(
            "Cotton-York tensor is defined in dimension 3, got {}",
            m.dim()
        )));
    }
    let snap = TensorSnapshot::compute(m, p)?;
    Ok(snap.cotton_york.expect("dimension 3"))
}

pub fn div_weyl(m: &MetricDef, p: &[f64]) -> Result<Array3> {
    if m.dim() < 4 {
        return Err(Error::Dimension(format!(
            "Weyl divergence needs dimension >= 4, got {}",
            m.dim()
        )));
    }
    let snap = TensorSnapshot::compute(m, p)?;
    Ok(snap.div_weyl.expect("dimension >= 4"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::parse_metric;

    #[test]
    fn kulkarni_nomizu_of_identity() {
        let d = DMatrix::identity(3, 3);
        let kn = kulkarni_nomizu(&d, &d).unwrap();
        assert_eq!(kn[[0, 1, 0, 1]], 2.0);
        assert_eq!(kn[[0, 1, 1, 0]], -2.0);
        assert_eq!(kn[[0, 0, 1, 1]], 0.0);
    }

    #[test]
    fn flat_metric_has_zero_curvature() {
        let m = MetricDef::euclidean(3).unwrap();
        let s = TensorSnapshot::compute(&m, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.riemann.norm(), 0.0);
        assert_eq!(s.cotton.norm(), 0.0);
    }

    #[test]
    fn sol_christoffel_pattern() {
        let m = parse_metric("dim = 3\ng11 = exp(2*x3)\ng22 = exp(-2*x3)\ng33 = 1").unwrap();
        let ch = christoffel(&m, &[0.0, 0.0, 0.0]).unwrap();
        let g = &ch.gamma;
        assert!((g[[0, 0, 2]] - 1.0).abs() < 1e-15);
        assert!((g[[1, 1, 2]] + 1.0).abs() < 1e-15);
        assert!((g[[2, 0, 0]] + 1.0).abs() < 1e-15);
        assert!((g[[2, 1, 1]] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_metric_is_refused() {
        let m = parse_metric("dim = 3\ng11 = x1^2\ng22 = 1\ng33 = 1").unwrap();
        assert!(matches!(
            TensorSnapshot::compute(&m, &[0.0, 0.0, 0.0]),
            Err(Error::SingularMetric(_))
        ));
        let m = parse_metric("dim = 3\ng11 = -1\ng22 = 1\ng33 = 1").unwrap();
        assert!(matches!(
            TensorSnapshot::compute(&m, &[0.0, 0.0, 0.0]),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn two_dimensional_schouten_is_rejected() {
        let m = MetricDef::euclidean(2).unwrap();
        assert!(riemann_0_4(&m, &[0.0, 0.0]).is_ok());
        assert!(matches!(
            ricci_scalar_schouten(&m, &[0.0, 0.0]),
            Err(Error::Dimension(_))
        ));
    }
}
