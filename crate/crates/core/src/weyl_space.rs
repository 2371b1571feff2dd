//! Algebraic Weyl tensors, eigenflag parametrization and dimension counts.

use std::sync::OnceLock;

use log::debug;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::bivector::{
    bianchi_project, bivector_dim, orthogonality_defect, pair_index, pairs, ricci_contract,
    rotate_operator, CurvatureOperator,
};
use crate::error::{Error, Result};
use crate::json;
use crate::tensors::kulkarni_nomizu;

/// Smallest gap between consecutive singular values that separates rank from noise.
pub const RANK_GAP: f64 = 1e6;

/// Frobenius-orthonormal basis of symmetric `m×m` matrices:
/// `E_aa` then `(E_ab + E_ba)/√2` for `a < b`.
pub fn sym_basis(n: usize) -> Vec<CurvatureOperator> {
    let m = bivector_dim(n);
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for a in 0..m {
        for b in a..m {
            let mut op = CurvatureOperator::zeros(n);
            if a == b {
                op.mat[(a, a)] = 1.0;
            } else {
                op.mat[(a, b)] = std::f64::consts::FRAC_1_SQRT_2;
                op.mat[(b, a)] = std::f64::consts::FRAC_1_SQRT_2;
            }
            out.push(op);
        }
    }
    out
}

fn sym_coords(op: &CurvatureOperator) -> Vec<f64> {
    let m = op.mat.nrows();
    let mut out = Vec::with_capacity(m * (m + 1) / 2);
    for a in 0..m {
        for b in a..m {
            out.push(if a == b {
                op.mat[(a, a)]
            } else {
                std::f64::consts::SQRT_2 * 0.5 * (op.mat[(a, b)] + op.mat[(b, a)])
            });
        }
    }
    out
}

/// Matrix of the Bianchi projector on `S²(Λ²)` in the [`sym_basis`] coordinates.
pub fn bianchi_matrix(n: usize) -> DMatrix<f64> {
    let basis = sym_basis(n);
    let d = basis.len();
    let mut out = DMatrix::zeros(d, d);
    for (col, e) in basis.iter().enumerate() {
        for (row, v) in sym_coords(&bianchi_project(e)).into_iter().enumerate() {
            out[(row, col)] = v;
        }
    }
    out
}

/// Stacked constraint matrix `[b; r]` whose null space is the Weyl space.
pub fn weyl_constraint_matrix(n: usize) -> DMatrix<f64> {
    let basis = sym_basis(n);
    let d = basis.len();
    let rdim = n * (n + 1) / 2;
    let mut out = DMatrix::zeros(d + rdim, d);
    for (col, e) in basis.iter().enumerate() {
        for (row, v) in sym_coords(&bianchi_project(e)).into_iter().enumerate() {
            out[(row, col)] = v;
        }
        let r = ricci_contract(e);
        let mut row = d;
        for i in 0..n {
            for j in i..n {
                out[(row, col)] = r[(i, j)];
                row += 1;
            }
        }
    }
    out
}

/// Numeric rank: the number of singular values before the first drop by at least [`RANK_GAP`]
/// (or below an absolute floor).
pub fn numeric_rank(singular_values: &[f64]) -> usize {
    let mut sv: Vec<f64> = singular_values.to_vec();
    sv.sort_by(|a, b| b.total_cmp(a));
    let Some(&top) = sv.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    for k in 0..sv.len() {
        if sv[k] <= top * 1e-12 {
            return k;
        }
        if k + 1 < sv.len() && sv[k + 1] * RANK_GAP <= sv[k] {
            return k + 1;
        }
    }
    sv.len()
}

/// Null space of a tall matrix `a` as orthonormal vectors, with the numeric rank.
fn null_space(a: &DMatrix<f64>) -> (usize, Vec<Vec<f64>>) {
    debug_assert!(a.nrows() >= a.ncols());
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = numeric_rank(&sv);
    let null = order[rank..]
        .iter()
        .map(|&i| v_t.row(i).iter().copied().collect())
        .collect();
    (rank, null)
}

/// `dim ker b` on `S²(Λ²)`, by numeric rank.
pub fn curvature_space_dim(n: usize) -> usize {
    let b = bianchi_matrix(n);
    let sv: Vec<f64> = b
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    b.ncols() - numeric_rank(&sv)
}

static WEYL_BASES: [OnceLock<Vec<CurvatureOperator>>; 7] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

/// Orthonormal basis of `ker b ∩ ker r`. Empty for `n = 3`.
pub fn weyl_space_basis(n: usize) -> Result<&'static [CurvatureOperator]> {
    if !(3..=6).contains(&n) {
        return Err(Error::Dimension(format!(
            "Weyl spaces are provided for 3 <= n <= 6, got {n}"
        )));
    }
    Ok(WEYL_BASES[n].get_or_init(|| {
        let c = weyl_constraint_matrix(n);
        let (rank, null) = null_space(&c);
        debug!(
            "weyl constraint matrix for n = {n}: rank {rank}, nullity {}",
            null.len()
        );
        let basis = sym_basis(n);
        null.into_iter()
            .map(|coords| {
                let mut op = CurvatureOperator::zeros(n);
                for (k, e) in coords.iter().zip(&basis) {
                    op.mat += &e.mat * *k;
                }
                op
            })
            .collect()
    }))
}

/// `n²(n²−1)/12 − n(n+1)/2`.
pub fn weyl_dim_formula(n: usize) -> usize {
    let n2 = n * n;
    n2 * (n2 - 1) / 12 - n * (n + 1) / 2
}

/// The closed form `n⁴/12 − 7n²/12 − 1/2` as printed in the literature; see [`DimensionReport`].
pub fn weyl_dim_literal_closed_form(n: usize) -> f64 {
    let n = n as f64;
    // Common denominator keeps the value exact for small n.
    (n.powi(4) - 7.0 * n * n - 6.0) / 12.0
}

/// Uniform sample from the unit sphere of the Weyl space.
pub fn random_weyl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CurvatureOperator> {
    let basis = weyl_space_basis(n)?;
    let mut op = CurvatureOperator::zeros(n);
    if basis.is_empty() {
        return Ok(op);
    }
    loop {
        let mut acc = CurvatureOperator::zeros(n);
        for e in basis {
            let c: f64 = rng.sample(StandardNormal);
            acc.mat += &e.mat * c;
        }
        let norm = acc.norm();
        if norm > 1e-12 {
            op.mat = acc.mat / norm;
            return Ok(op);
        }
    }
}

/// Haar-distributed orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

/// Parameters of an eigenflag Weyl tensor
/// `W = B(ρ)(Σ_k λ_k e_1k ⊙ e_1k + [0 ⊕ W₂]) B(ρ)ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenflagParams {
    pub rho: DMatrix<f64>,
    /// `λ₂ … λₙ`, summing to zero.
    pub lambdas: Vec<f64>,
    /// Operator on `Λ²` of `span(e₂ … eₙ)` with `r(W₂) = −diag(λ)` and `b(W₂) = 0`.
    pub w2: CurvatureOperator,
}

impl EigenflagParams {
    /// Random valid parameters: Haar `ρ`, Gaussian `λ` projected to zero sum, and `W₂`
    /// as the forced solution of its Ricci constraint plus a random Weyl element of dimension `n − 1`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if !(4..=6).contains(&n) {
            return Err(Error::Dimension(format!(
                "eigenflag parameters need 4 <= n <= 6, got {n}"
            )));
        }
        let rho = random_orthogonal(n, rng);
        let mut lambdas: Vec<f64> = (1..n).map(|_| rng.sample(StandardNormal)).collect();
        let mean = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
        for l in &mut lambdas {
            *l -= mean;
        }
        let mut w2 = forced_w2(&lambdas)?;
        if n > 4 {
            let extra = random_weyl(n - 1, rng)?;
            let scale: f64 = rng.sample::<f64, _>(StandardNormal).abs();
            w2 = &w2 + &(&extra * scale);
        }
        Ok(EigenflagParams { rho, lambdas, w2 })
    }

    pub fn witness(&self) -> Vec<f64> {
        self.rho.column(0).iter().copied().collect()
    }
}

/// `W₂ = (h ⊙ δ)` with `h = −diag(λ) / (m − 2)`, the solution of `r(W₂) = −diag(λ)`
/// orthogonal to the Weyl space of dimension `m = λ.len()`.
pub fn forced_w2(lambdas: &[f64]) -> Result<CurvatureOperator> {
    let m = lambdas.len();
    if m < 3 {
        return Err(Error::Dimension("W₂ lives in dimension >= 3".into()));
    }
    let h = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            -lambdas[i] / (m as f64 - 2.0)
        } else {
            0.0
        }
    });
    let kn = kulkarni_nomizu(&h, &DMatrix::identity(m, m))?;
    Ok(CurvatureOperator::from_tensor(&kn))
}

/// The eigenflag parametrization `Φ(ρ, λ, W₂)`.
pub fn phi_map(params: &EigenflagParams) -> Result<CurvatureOperator> {
    let n = params.rho.nrows();
    if params.rho.ncols() != n || params.lambdas.len() + 1 != n || params.w2.dim + 1 != n {
        return Err(Error::Dimension(
            "inconsistent eigenflag parameter sizes".into(),
        ));
    }
    let defect = orthogonality_defect(&params.rho);
    if defect > 1e-12 * n as f64 {
        return Err(Error::NotOrthogonal(defect));
    }
    let lam_scale = params.lambdas.iter().map(|l| l.abs()).fold(1.0, f64::max);
    let sum: f64 = params.lambdas.iter().sum();
    if sum.abs() > 1e-12 * lam_scale {
        return Err(Error::ConstraintViolation(format!(
            "eigenvalues λ must sum to zero (sum = {sum:e})"
        )));
    }
    let w2_scale = params.w2.norm().max(lam_scale);
    let r2 = ricci_contract(&params.w2);
    let mut target = DMatrix::zeros(n - 1, n - 1);
    for (k, l) in params.lambdas.iter().enumerate() {
        target[(k, k)] = -l;
    }
    let r_err = (&r2 - &target).norm();
    let b_err = bianchi_project(&params.w2).norm();
    if r_err > 1e-9 * w2_scale || b_err > 1e-9 * w2_scale {
        return Err(Error::ConstraintViolation(format!(
            "W₂ must satisfy r(W₂) = −diag(λ) and b(W₂) = 0 (errors {r_err:e}, {b_err:e})"
        )));
    }

    let mut inner = CurvatureOperator::zeros(n);
    for (k, l) in params.lambdas.iter().enumerate() {
        let a = pair_index(n, 0, k + 1);
        inner.mat[(a, a)] += l;
    }
    let sub = pairs(n - 1);
    for (a, &(i, j)) in sub.iter().enumerate() {
        for (b, &(k, l)) in sub.iter().enumerate() {
            inner.mat[(pair_index(n, i + 1, j + 1), pair_index(n, k + 1, l + 1))] +=
                params.w2.mat[(a, b)];
        }
    }
    rotate_operator(&inner, &params.rho)
}

/// Dimension bookkeeping for Weyl tensors and the eigenflag subset.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub n: usize,
    pub dim_s2_lambda2: usize,
    pub dim_lambda4: usize,
    /// Numeric rank count.
    pub dim_curvature: usize,
    /// Numeric rank count.
    pub dim_weyl: usize,
    /// `dim R_n − dim S²V`.
    pub dim_weyl_assembled: usize,
    /// `n⁴/12 − 7n²/12 − 1/2`; disagrees with the assembled count.
    pub dim_weyl_literal: f64,
    pub dim_so: usize,
    pub dim_weyl_sub: usize,
    /// `dim SO(n) + (n − 2) + dim W_{n−1}`.
    pub dim_ew: usize,
    pub codim: usize,
    /// `n³/3 − n² − 4n/3 + 2`.
    pub codim_closed_form: f64,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn dimension_report(n: usize) -> Result<DimensionReport> {
    if !(4..=6).contains(&n) {
        return Err(Error::Dimension(format!(
            "dimension report covers 4 <= n <= 6, got {n}"
        )));
    }
    let m = bivector_dim(n);
    let dim_weyl = weyl_space_basis(n)?.len();
    let dim_weyl_sub = weyl_space_basis(n - 1)?.len();
    let dim_so = binomial(n, 2);
    let dim_ew = dim_so + (n - 2) + dim_weyl_sub;
    let nf = n as f64;
    Ok(DimensionReport {
        n,
        dim_s2_lambda2: m * (m + 1) / 2,
        dim_lambda4: binomial(n, 4),
        dim_curvature: curvature_space_dim(n),
        dim_weyl,
        dim_weyl_assembled: weyl_dim_formula(n),
        dim_weyl_literal: weyl_dim_literal_closed_form(n),
        dim_so,
        dim_weyl_sub,
        dim_ew,
        codim: dim_weyl - dim_ew,
        codim_closed_form: (nf.powi(3) - 3.0 * nf * nf - 4.0 * nf + 6.0) / 3.0,
    })
}

impl DimensionReport {
    pub fn to_json(&self) -> Value {
        let literal_matches = (self.dim_weyl_literal - self.dim_weyl as f64).abs() < 1e-9;
        json!({
            "n": self.n,
            "dim_s2_lambda2": self.dim_s2_lambda2,
            "dim_lambda4": self.dim_lambda4,
            "dim_curvature": self.dim_curvature,
            "dim_weyl": self.dim_weyl,
            "dim_weyl_assembled": self.dim_weyl_assembled,
            "dim_weyl_literal_closed_form": json::num(self.dim_weyl_literal),
            "dim_weyl_literal_matches": literal_matches,
            "dim_so": self.dim_so,
            "dim_weyl_sub": self.dim_weyl_sub,
            "dim_ew": self.dim_ew,
            "codim": self.codim,
            "codim_closed_form": json::num(self.codim_closed_form),
            "note": if literal_matches {
                String::new()
            } else {
                format!(
                    "closed form n^4/12 - 7n^2/12 - 1/2 gives {} at n = {}, but the assembled count dim R_n - dim S^2 V is {}",
                    self.dim_weyl_literal, self.n, self.dim_weyl
                )
            },
        })
    }
}
