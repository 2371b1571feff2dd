//! Curvature operators on bivectors.
//!
//! Bivectors use the orthonormal basis `e_i ∧ e_j`, `i < j`, in lexicographic
//! order. An operator `M` and its (0,4) tensor are related by
//! `M[(ij), (kl)] = R_ijkl`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json;
use crate::tensors::{orthonormal_frame, Array4};

/// Ordered pairs `(i, j)`, `i < j`, lexicographic.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// `m = n(n-1)/2`.
pub fn bivector_dim(n: usize) -> usize {
    n * (n.saturating_sub(1)) / 2
}

/// Position of `e_i ∧ e_j` (`i < j`) in the lexicographic basis.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Component of `e_i ∧ e_j` for arbitrary `i, j`: `(index, sign)`, `None` on the diagonal.
fn signed_pair(n: usize, i: usize, j: usize) -> Option<(usize, f64)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Some((pair_index(n, i, j), 1.0)),
        std::cmp::Ordering::Greater => Some((pair_index(n, j, i), -1.0)),
        std::cmp::Ordering::Equal => None,
    }
}

/// Symmetric endomorphism of `Λ²` in the orthonormal lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperator {
    pub dim: usize,
    pub mat: DMatrix<f64>,
}

impl CurvatureOperator {
    pub fn new(dim: usize, mat: DMatrix<f64>) -> Result<Self> {
        let m = bivector_dim(dim);
        if mat.nrows() != m || mat.ncols() != m {
            return Err(Error::Dimension(format!(
                "operator on Λ² of a {dim}-dimensional space must be {m}x{m}"
            )));
        }
        Ok(CurvatureOperator { dim, mat })
    }

    pub fn zeros(dim: usize) -> Self {
        let m = bivector_dim(dim);
        CurvatureOperator {
            dim,
            mat: DMatrix::zeros(m, m),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let m = bivector_dim(dim);
        CurvatureOperator {
            dim,
            mat: DMatrix::identity(m, m),
        }
    }

    /// `a ⊙ b = ½(a bᵀ + b aᵀ)` for bivector coordinate vectors.
    pub fn sym_product(dim: usize, a: &[f64], b: &[f64]) -> Self {
        let m = bivector_dim(dim);
        let mat = DMatrix::from_fn(m, m, |i, j| 0.5 * (a[i] * b[j] + b[i] * a[j]));
        CurvatureOperator { dim, mat }
    }

    /// Operator from orthonormal-frame (0,4) components.
    pub fn from_tensor(r: &Array4) -> Self {
        let n = r.n();
        let ps = pairs(n);
        let m = ps.len();
        let mat = DMatrix::from_fn(m, m, |a, b| {
            let (i, j) = ps[a];
            let (k, l) = ps[b];
            r[[i, j, k, l]]
        });
        CurvatureOperator { dim: n, mat }
    }

    /// Orthonormal-frame (0,4) components; antisymmetric in each pair by construction.
    pub fn to_tensor(&self) -> Array4 {
        let n = self.dim;
        Array4::from_fn(n, |[i, j, k, l]| {
            match (signed_pair(n, i, j), signed_pair(n, k, l)) {
                (Some((a, sa)), Some((b, sb))) => sa * sb * self.mat[(a, b)],
                _ => 0.0,
            }
        })
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn symmetry_defect(&self) -> f64 {
        (&self.mat - self.mat.transpose()).norm()
    }

    pub fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        SymmetricEigen::new(self.symmetrized())
    }

    fn symmetrized(&self) -> DMatrix<f64> {
        (&self.mat + self.mat.transpose()) * 0.5
    }

    /// Eigenvalues sorted ascending.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Image of a bivector given by its coordinates.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        let v = nalgebra::DVector::from_column_slice(w);
        (&self.mat * v).iter().copied().collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "basis": "lex-pairs",
            "mat": json::matrix(&self.mat),
        })
    }
}

impl std::ops::Add for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn add(self, rhs: &CurvatureOperator) -> CurvatureOperator {
        assert_eq!(self.dim, rhs.dim);
        CurvatureOperator {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn sub(self, rhs: &CurvatureOperator) -> CurvatureOperator {
        assert_eq!(self.dim, rhs.dim);
        CurvatureOperator {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul<f64> for &CurvatureOperator {
    type Output = CurvatureOperator;
    fn mul(self, k: f64) -> CurvatureOperator {
        CurvatureOperator {
            dim: self.dim,
            mat: &self.mat * k,
        }
    }
}

/// Largest violation of the pair symmetries `R_ijkl = -R_jikl = -R_ijlk = R_klij`.
pub fn pair_symmetry_defect(r: &Array4) -> f64 {
    let n = r.n();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = r[[i, j, k, l]];
                    worst = worst
                        .max((v + r[[j, i, k, l]]).abs())
                        .max((v + r[[i, j, l, k]]).abs())
                        .max((v - r[[k, l, i, j]]).abs());
                }
            }
        }
    }
    worst
}

/// Coordinate (0,4) tensor expressed in a g-orthonormal frame.
pub fn tensor_to_orthonormal(r: &Array4, g: &DMatrix<f64>) -> Result<Array4> {
    let n = r.n();
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::Dimension(
            "metric and tensor dimensions differ".into(),
        ));
    }
    let e = orthonormal_frame(g)
        .ok_or_else(|| Error::NotPositiveDefinite("metric has no Cholesky factor".into()))?;
    // Contract one slot at a time.
    let mut cur = r.clone();
    for slot in 0..4 {
        cur = Array4::from_fn(n, |idx| {
            let mut acc = 0.0;
            for q in 0..n {
                let mut src = idx;
                src[slot] = q;
                acc += cur[src] * e[(q, idx[slot])];
            }
            acc
        });
    }
    Ok(cur)
}

/// Operator of a coordinate (0,4) curvature-type tensor at a point with metric `g`.
pub fn operator_from_0_4(r: &Array4, g: &DMatrix<f64>) -> Result<CurvatureOperator> {
    let scale = r.norm().max(f64::MIN_POSITIVE);
    let defect = pair_symmetry_defect(r);
    if defect > 1e-9 * scale {
        return Err(Error::SymmetryViolation(format!(
            "tensor violates curvature pair symmetries by {defect:e}"
        )));
    }
    let on = tensor_to_orthonormal(r, g)?;
    Ok(CurvatureOperator::from_tensor(&on))
}

/// Orientation of the frame used for the Hodge star.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Standard,
    Reversed,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Standard => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

/// Hodge star on 2-forms.
///
/// Dimension 4: the involution of `Λ²` in the orthonormal lexicographic basis
/// (independent of `g` once a frame is fixed). Dimension 3: the 3×3 coordinate
/// matrix `M[k, (ij)] = Σ_l g_lk ε^{ijl} / √det g` sending `dx^i ∧ dx^j` to a 1-form.
pub fn hodge_star_matrix(g: &DMatrix<f64>, orientation: Orientation) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let sign = orientation.sign();
    match n {
        4 => {
            let mut h = DMatrix::zeros(6, 6);
            // *e12 = e34, *e13 = -e24, *e14 = e23 and the reverse images.
            for (a, b, s) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)] {
                h[(b, a)] = s * sign;
                h[(a, b)] = s * sign;
            }
            Ok(h)
        }
        3 => {
            let det = g.determinant();
            if !(det > 0.0) {
                return Err(Error::NotPositiveDefinite("det g <= 0".into()));
            }
            let sq = det.sqrt();
            let mut h = DMatrix::zeros(3, 3);
            for (col, &(i, j)) in pairs(3).iter().enumerate() {
                for k in 0..3 {
                    let mut acc = 0.0;
                    for l in 0..3 {
                        acc += g[(l, k)] * crate::tensors::levi_civita(i, j, l);
                    }
                    h[(k, col)] = sign * acc / sq;
                }
            }
            Ok(h)
        }
        _ => Err(Error::Dimension(format!(
            "Hodge star on 2-forms is provided in dimensions 3 and 4, got {n}"
        ))),
    }
}

/// `ω₁₂ω₃₄ − ω₁₃ω₂₄ + ω₁₄ω₂₃`; zero iff `ω` is simple (dimension 4).
pub fn pfaffian(w: &[f64]) -> f64 {
    w[0] * w[5] - w[1] * w[4] + w[2] * w[3]
}

/// Columns `φ₁, φ₂, φ₃` (self-dual) and `ψ₁, ψ₂, ψ₃` (anti-self-dual), each normalized.
///
/// `φ₁ = e12 + e34`, `φ₂ = e13 − e24`, `φ₃ = e14 + e23`,
/// `ψ₁ = e12 − e34`, `ψ₂ = e13 + e24`, `ψ₃ = e14 − e23`.
pub fn self_dual_bases() -> (DMatrix<f64>, DMatrix<f64>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = DMatrix::zeros(6, 3);
    let mut q = DMatrix::zeros(6, 3);
    for (col, (a, b, s)) in [(0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)]
        .into_iter()
        .enumerate()
    {
        p[(a, col)] = r;
        p[(b, col)] = s * r;
        q[(a, col)] = r;
        q[(b, col)] = -s * r;
    }
    (p, q)
}

/// Block decomposition of a dimension-4 operator along `Λ² = Λ⁺ ⊕ Λ⁻`.
#[derive(Debug, Clone, PartialEq)]
pub struct PMSplit {
    pub w_plus: DMatrix<f64>,
    pub w_minus: DMatrix<f64>,
    /// Off-diagonal block `⟨M ψ_j, φ_i⟩`.
    pub z: DMatrix<f64>,
    /// `s/12`: mean of the traces of the two diagonal blocks, divided by 3.
    pub scalar_part: f64,
    /// Half the trace difference of the diagonal blocks, divided by 3; zero for algebraic curvature operators.
    pub four_form_part: f64,
}

pub fn pm_split(op: &CurvatureOperator) -> Result<PMSplit> {
    if op.dim != 4 {
        return Err(Error::Dimension(format!(
            "the ± splitting needs dimension 4, got {}",
            op.dim
        )));
    }
    let (p, q) = self_dual_bases();
    let a = p.transpose() * &op.mat * &p;
    let c = q.transpose() * &op.mat * &q;
    let z = p.transpose() * &op.mat * &q;
    let ta = a.trace() / 3.0;
    let tc = c.trace() / 3.0;
    let id = DMatrix::identity(3, 3);
    Ok(PMSplit {
        w_plus: a - &id * ta,
        w_minus: c - &id * tc,
        z,
        scalar_part: 0.5 * (ta + tc),
        four_form_part: 0.5 * (ta - tc),
    })
}

impl PMSplit {
    pub fn reassemble(&self) -> CurvatureOperator {
        let (p, q) = self_dual_bases();
        let id = DMatrix::identity(3, 3);
        let a = &self.w_plus + &id * (self.scalar_part + self.four_form_part);
        let c = &self.w_minus + &id * (self.scalar_part - self.four_form_part);
        let mat = &p * a * p.transpose()
            + &q * c * q.transpose()
            + &p * &self.z * q.transpose()
            + &q * self.z.transpose() * p.transpose();
        CurvatureOperator { dim: 4, mat }
    }
}

/// `b(R)_xyzt = ⅓(R_xyzt + R_yzxt + R_zxyt)`.
pub fn bianchi_project(op: &CurvatureOperator) -> CurvatureOperator {
    let r = op.to_tensor();
    let n = op.dim;
    let b = Array4::from_fn(n, |[x, y, z, t]| {
        (r[[x, y, z, t]] + r[[y, z, x, t]] + r[[z, x, y, t]]) / 3.0
    });
    CurvatureOperator::from_tensor(&b)
}

/// `r(R)_xy = Σ_a R_xaya`.
pub fn ricci_contract(op: &CurvatureOperator) -> DMatrix<f64> {
    let r = op.to_tensor();
    let n = op.dim;
    DMatrix::from_fn(n, n, |x, y| (0..n).map(|a| r[[x, a, y, a]]).sum())
}

/// `B(ρ)[(kl), (ij)] = ρ_ki ρ_lj − ρ_li ρ_kj`, so that `B(ρ)(v ∧ w) = ρv ∧ ρw`.
pub fn bivector_rotation(rho: &DMatrix<f64>) -> DMatrix<f64> {
    let n = rho.nrows();
    let ps = pairs(n);
    let m = ps.len();
    DMatrix::from_fn(m, m, |row, col| {
        let (k, l) = ps[row];
        let (i, j) = ps[col];
        rho[(k, i)] * rho[(l, j)] - rho[(l, i)] * rho[(k, j)]
    })
}

/// Orthogonality defect `‖ρᵀρ − I‖`.
pub fn orthogonality_defect(rho: &DMatrix<f64>) -> f64 {
    let n = rho.nrows();
    (rho.transpose() * rho - DMatrix::identity(n, n)).norm()
}

pub fn rotate_operator(op: &CurvatureOperator, rho: &DMatrix<f64>) -> Result<CurvatureOperator> {
    if rho.nrows() != op.dim || rho.ncols() != op.dim {
        return Err(Error::Dimension(
            "rotation and operator dimensions differ".into(),
        ));
    }
    let defect = orthogonality_defect(rho);
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal(defect));
    }
    let b = bivector_rotation(rho);
    Ok(CurvatureOperator {
        dim: op.dim,
        mat: &b * &op.mat * b.transpose(),
    })
}

/// Discriminant of `det(W − tI)`: `Π_{i<j} (λ_i − λ_j)²`.
pub fn discriminant_check(op: &CurvatureOperator) -> f64 {
    let ev = op.sorted_eigenvalues();
    let mut d = 1.0;
    for i in 0..ev.len() {
        for j in i + 1..ev.len() {
            d *= (ev[i] - ev[j]).powi(2);
        }
    }
    d
}

/// Discriminant of `W / ‖W‖`, comparable across scales.
pub fn normalized_discriminant(op: &CurvatureOperator) -> f64 {
    let norm = op.norm();
    if norm == 0.0 {
        return 0.0;
    }
    discriminant_check(&(op * (1.0 / norm)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing() {
        let ps = pairs(5);
        for (k, &(i, j)) in ps.iter().enumerate() {
            assert_eq!(pair_index(5, i, j), k);
        }
        assert_eq!(ps.len(), 10);
    }

    #[test]
    fn tensor_round_trip() {
        let mut op = CurvatureOperator::zeros(4);
        op.mat[(0, 5)] = 2.0;
        op.mat[(5, 0)] = 2.0;
        op.mat[(1, 1)] = 3.0;
        let t = op.to_tensor();
        assert_eq!(t[[0, 1, 2, 3]], 2.0);
        assert_eq!(t[[1, 0, 2, 3]], -2.0);
        assert_eq!(t[[0, 2, 2, 0]], -3.0);
        assert_eq!(CurvatureOperator::from_tensor(&t), op);
    }

    #[test]
    fn hodge_star_dim4() {
        let g = DMatrix::identity(4, 4);
        let h = hodge_star_matrix(&g, Orientation::Standard).unwrap();
        assert_eq!(h[(5, 0)], 1.0);
        assert_eq!(&h * &h, DMatrix::identity(6, 6));
        let (p, q) = self_dual_bases();
        assert!((&h * &p - &p).norm() < 1e-15);
        assert!((&h * &q + &q).norm() < 1e-15);
    }

    #[test]
    fn hodge_star_dim3_euclidean() {
        let g = DMatrix::identity(3, 3);
        let h = hodge_star_matrix(&g, Orientation::Standard).unwrap();
        // *(dx1 ∧ dx2) = dx3
        assert_eq!(h[(2, 0)], 1.0);
        assert_eq!(h[(0, 0)], 0.0);
        assert!(hodge_star_matrix(&DMatrix::identity(5, 5), Orientation::Standard).is_err());
    }

    #[test]
    fn pfaffian_detects_simple_bivectors() {
        assert_eq!(pfaffian(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 0.0);
        assert_eq!(pfaffian(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn ricci_of_identity_and_symmetric_products() {
        for n in 3..=5 {
            let r = ricci_contract(&CurvatureOperator::identity(n));
            assert!((r - DMatrix::identity(n, n) * (n as f64 - 1.0)).norm() < 1e-14);
            let m = bivector_dim(n);
            for k in 1..n {
                let mut e = vec![0.0; m];
                e[pair_index(n, 0, k)] = 1.0;
                let r = ricci_contract(&CurvatureOperator::sym_product(n, &e, &e));
                let mut want = DMatrix::zeros(n, n);
                want[(0, 0)] = 1.0;
                want[(k, k)] = 1.0;
                assert_eq!(r, want);
            }
        }
    }

    #[test]
    fn rotation_in_the_12_plane() {
        let mut rho = DMatrix::identity(3, 3);
        rho[(0, 0)] = 0.0;
        rho[(1, 1)] = 0.0;
        rho[(1, 0)] = 1.0;
        rho[(0, 1)] = -1.0;
        let b = bivector_rotation(&rho);
        // e1 ∧ e3 ↦ e2 ∧ e3
        assert_eq!(b.column(pair_index(3, 0, 2))[pair_index(3, 1, 2)], 1.0);
    }

    #[test]
    fn discriminant_of_distinct_spectrum() {
        let mut op = CurvatureOperator::zeros(4);
        for i in 0..6 {
            op.mat[(i, i)] = i as f64 + 1.0;
        }
        assert!(discriminant_check(&op) > 1.0);
        op.mat[(1, 1)] = 1.0;
        assert_eq!(discriminant_check(&op), 0.0);
    }
}
