//! Necessary conditions for limiting Carleman weights at a point.
//!
//! A failed condition certifies that no limiting Carleman weight exists near
//! the point. A passed condition certifies nothing.

use log::{debug, warn};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Map, Value};

use crate::bivector::{
    hodge_star_matrix, operator_from_0_4, pm_split, CurvatureOperator, Orientation,
};
use crate::error::{Error, Result};
use crate::json;
use crate::metric::MetricDef;
use crate::tensors::{orthonormal_frame, TensorSnapshot};

pub const PASS_NOTE: &str =
    "passing a necessary condition does not imply that a limiting Carleman weight exists";

/// Below this Frobenius norm a Cotton-York tensor is treated as zero.
pub const CY_ZERO_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FailsNecessary,
    PassesNecessary,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::FailsNecessary => "fails_lcw_necessary",
            Verdict::PassesNecessary => "passes_necessary",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Tri-state decision for a scaled residual: pass at or below `tol/10`, fail above `10·tol`.
    pub fn from_scaled(residual: f64, tol: f64) -> Verdict {
        if residual <= tol / 10.0 {
            Verdict::PassesNecessary
        } else if residual > 10.0 * tol {
            Verdict::FailsNecessary
        } else {
            Verdict::Inconclusive
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Eigenflag,
    CottonYork,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Eigenflag => "eigenflag",
            TestKind::CottonYork => "cotton-york",
        }
    }
}

/// Eigenvalue cluster of a dimension-4 operator and whether its eigenspace contains simple bivectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenClass {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub contains_simple: bool,
    /// Dimension of the span of the simple vectors in the eigenspace.
    pub simple_rank: usize,
    /// `min |ω ∧ ω|` over unit `ω` in the eigenspace, as a multiple of the volume form.
    pub min_wedge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub dim: usize,
    pub test: TestKind,
    pub verdict: Verdict,
    pub witness: Option<Vec<f64>>,
    /// Scaled residual: `min F / ‖W‖²` or `|det CY| / ‖CY‖³`.
    pub residual: f64,
    pub det_cy: Option<f64>,
    pub eigen_data: Vec<EigenClass>,
    pub tol_rel: f64,
    pub note: String,
    /// Test-specific details.
    pub extras: Map<String, Value>,
}

impl ObstructionReport {
    pub fn passes(&self) -> bool {
        self.verdict == Verdict::PassesNecessary
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("dim".into(), json!(self.dim));
        obj.insert("test".into(), json!(self.test.as_str()));
        obj.insert("verdict".into(), json!(self.verdict.as_str()));
        obj.insert(
            "witness".into(),
            self.witness.as_deref().map_or(Value::Null, json::vec),
        );
        obj.insert("residual".into(), json::num(self.residual));
        obj.insert("det_cy".into(), self.det_cy.map_or(Value::Null, json::num));
        obj.insert(
            "tolerances".into(),
            json!({ "tol_rel": json::num(self.tol_rel) }),
        );
        obj.insert("note".into(), json!(self.note));
        if !self.eigen_data.is_empty() {
            let classes: Vec<Value> = self
                .eigen_data
                .iter()
                .map(|c| {
                    json!({
                        "eigenvalue": json::num(c.eigenvalue),
                        "multiplicity": c.multiplicity,
                        "contains_simple": c.contains_simple,
                        "simple_rank": c.simple_rank,
                        "min_wedge": json::num(c.min_wedge),
                    })
                })
                .collect();
            obj.insert("eigen_data".into(), Value::Array(classes));
        }
        for (k, v) in &self.extras {
            obj.insert(k.clone(), v.clone());
        }
        Value::Object(obj)
    }
}

/// Search settings for [`eigenflag_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct EigenflagConfig {
    pub tol_rel: f64,
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for EigenflagConfig {
    fn default() -> Self {
        EigenflagConfig {
            tol_rel: 1e-8,
            starts: 64,
            seed: 0,
            max_iter: 400,
            grad_tol: 1e-12,
        }
    }
}

/// Quartic residual `F(v) = ½ Σ (v^a W_abcd)² − Σ (v^a v^c W_abcd)²` and its ambient gradient.
struct Residual {
    n: usize,
    w: Vec<f64>,
}

impl Residual {
    fn new(op: &CurvatureOperator) -> Self {
        Residual {
            n: op.dim,
            w: op.to_tensor().data().to_vec(),
        }
    }

    fn at(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.w[((a * self.n + b) * self.n + c) * self.n + d]
    }

    /// `(F, ∇F)` at `v`.
    fn eval(&self, v: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let n = self.n;
        let mut t = vec![0.0; n * n * n];
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    t[(b * n + c) * n + d] = (0..n).map(|a| v[a] * self.at(a, b, c, d)).sum();
                }
            }
        }
        let mut m = vec![0.0; n * n];
        for b in 0..n {
            for d in 0..n {
                m[b * n + d] = (0..n).map(|c| t[(b * n + c) * n + d] * v[c]).sum();
            }
        }
        let f = 0.5 * t.iter().map(|x| x * x).sum::<f64>() - m.iter().map(|x| x * x).sum::<f64>();
        if !want_grad {
            return (f, Vec::new());
        }
        let mut grad = vec![0.0; n];
        for (e, ge) in grad.iter_mut().enumerate() {
            let mut acc = 0.0;
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let w = self.at(e, b, c, d);
                        acc += w * (t[(b * n + c) * n + d] - 4.0 * m[b * n + d] * v[c]);
                    }
                }
            }
            *ge = acc;
        }
        (f, grad)
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal `f₂ … fₙ` completing the unit vector `v`.
pub fn orthonormal_completion(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = vec![v.to_vec()];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()));
    for &k in &order {
        if basis.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&e, b);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        if normalize(&mut e) > 1e-6 {
            basis.push(e);
        }
    }
    basis.remove(0);
    basis
}

/// `Σ_{j, k<l} ⟨W(v ∧ f_j), f_k ∧ f_l⟩²` over an orthonormal completion of `v`.
pub fn eigenflag_residual(op: &CurvatureOperator, v: &[f64]) -> Result<f64> {
    let n = op.dim;
    if n < 4 {
        return Err(Error::Dimension(format!(
            "the eigenflag condition concerns dimension >= 4, got {n}"
        )));
    }
    if v.len() != n {
        return Err(Error::Dimension(
            "vector and operator dimensions differ".into(),
        ));
    }
    let norm = dot(v, v).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::PreconditionViolation(format!(
            "eigenflag residual needs a unit vector, got norm {norm}"
        )));
    }
    let f = orthonormal_completion(v);
    let r = op.to_tensor();
    let w4 = |x: &[f64], y: &[f64], z: &[f64], t: &[f64]| {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        acc += xy * z[c] * t[d] * r[[a, b, c, d]];
                    }
                }
            }
        }
        acc
    };
    let mut total = 0.0;
    for fj in &f {
        for k in 0..f.len() {
            for l in k + 1..f.len() {
                total += w4(v, fj, &f[k], &f[l]).powi(2);
            }
        }
    }
    Ok(total)
}

/// Local minimization of `F` on the sphere: projected gradient, Barzilai-Borwein steps, Armijo backtracking.
fn descend(res: &Residual, mut v: Vec<f64>, cfg: &EigenflagConfig) -> (f64, Vec<f64>, usize) {
    normalize(&mut v);
    let (mut f, mut g) = res.eval(&v, true);
    let project = |g: &[f64], v: &[f64]| {
        let p = dot(g, v);
        g.iter()
            .zip(v)
            .map(|(a, b)| a - p * b)
            .collect::<Vec<f64>>()
    };
    let mut rg = project(&g, &v);
    let mut step = 0.1;
    let mut iters = 0;
    while iters < cfg.max_iter {
        let gnorm2 = dot(&rg, &rg);
        if gnorm2.sqrt() <= cfg.grad_tol || f <= 1e-30 {
            break;
        }
        let mut alpha = step;
        let mut accepted = None;
        for _ in 0..40 {
            let mut cand: Vec<f64> = v.iter().zip(&rg).map(|(a, b)| a - alpha * b).collect();
            normalize(&mut cand);
            let (fc, _) = res.eval(&cand, false);
            if fc <= f - 1e-4 * alpha * gnorm2 {
                accepted = Some((cand, fc));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let (_, gc) = res.eval(&cand, true);
        let rgc = project(&gc, &cand);
        let s: Vec<f64> = cand.iter().zip(&v).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = rgc.iter().zip(&rg).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y).abs();
        step = if sy > 0.0 {
            (dot(&s, &s) / sy).clamp(1e-6, 1e3)
        } else {
            alpha * 2.0
        };
        let stalled = (f - fc) <= 1e-16 * f.abs();
        v = cand;
        f = fc;
        g = gc;
        rg = rgc;
        iters += 1;
        if stalled {
            break;
        }
    }
    let _ = g;
    (f, v, iters)
}

/// Sorted spectra of `W⁺` and `W⁻` and their largest difference.
pub fn pm_spectral_gap(op: &CurvatureOperator) -> Result<f64> {
    let s = pm_split(op)?;
    let mut a: Vec<f64> = s.w_plus.symmetric_eigenvalues().iter().copied().collect();
    let mut b: Vec<f64> = s.w_minus.symmetric_eigenvalues().iter().copied().collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Multi-start search for a direction satisfying the eigenflag condition.
pub fn eigenflag_test(op: &CurvatureOperator, cfg: &EigenflagConfig) -> Result<ObstructionReport> {
    let n = op.dim;
    if n < 4 {
        return Err(Error::Dimension(format!(
            "the eigenflag condition concerns dimension >= 4, got {n}"
        )));
    }
    let norm = op.norm();
    let mut extras = Map::new();
    extras.insert("weyl_norm".into(), json::num(norm));
    extras.insert("starts".into(), json!(cfg.starts));
    extras.insert("seed".into(), json!(cfg.seed));
    if norm <= 1e-12 {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        return Ok(ObstructionReport {
            dim: n,
            test: TestKind::Eigenflag,
            verdict: Verdict::PassesNecessary,
            witness: Some(e1),
            residual: 0.0,
            det_cy: None,
            eigen_data: Vec::new(),
            tol_rel: cfg.tol_rel,
            note: format!("Weyl tensor vanishes; every direction is an eigenflag; {PASS_NOTE}"),
            extras,
        });
    }
    let unit = op * (1.0 / norm);
    let res = Residual::new(&unit);

    let mut precheck_fail = false;
    if n == 4 {
        let gap = pm_spectral_gap(&unit)?;
        let threshold = 10.0 * cfg.tol_rel.sqrt();
        precheck_fail = gap > threshold;
        extras.insert(
            "pm_precheck".into(),
            json!({
                "spectral_gap": json::num(gap),
                "threshold": json::num(threshold),
                "certified_fail": precheck_fail,
            }),
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut evaluated = 0;
    for start in 0..cfg.starts {
        let v0: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let (f, v, iters) = descend(&res, v0, cfg);
        evaluated += 1;
        debug!("eigenflag start {start}: F = {f:e} after {iters} iterations");
        if best.as_ref().is_none_or(|(bf, _, _)| f < *bf) {
            best = Some((f, v, start));
        }
        if best
            .as_ref()
            .is_some_and(|(bf, _, _)| *bf <= 1e-3 * cfg.tol_rel)
        {
            break;
        }
    }
    let (_, mut v, best_start) = best.expect("at least one start");
    normalize(&mut v);
    // Completion-based evaluation avoids the cancellation in the quartic form.
    let residual = eigenflag_residual(&unit, &v)?.max(0.0);
    extras.insert("starts_evaluated".into(), json!(evaluated));
    extras.insert("best_start".into(), json!(best_start));

    let mut verdict = Verdict::from_scaled(residual, cfg.tol_rel);
    let mut note = String::new();
    if precheck_fail {
        if verdict != Verdict::FailsNecessary {
            note.push_str("search residual is small but W+ and W- spectra differ; ");
        }
        verdict = Verdict::FailsNecessary;
        note.push_str("W+ and W- are not isospectral, so no eigenflag direction exists");
    } else {
        note.push_str(match verdict {
            Verdict::FailsNecessary => {
                "no eigenflag direction found; the Weyl tensor obstructs limiting Carleman weights"
            }
            Verdict::PassesNecessary => "eigenflag direction found",
            Verdict::Inconclusive => "minimum residual is within a factor 10 of the tolerance",
        });
    }
    if verdict == Verdict::PassesNecessary {
        note.push_str("; ");
        note.push_str(PASS_NOTE);
    }
    let eigen_data = if n == 4 {
        classify_simplicity(op, 1e-8)?
    } else {
        Vec::new()
    };
    Ok(ObstructionReport {
        dim: n,
        test: TestKind::Eigenflag,
        verdict,
        witness: Some(v),
        residual,
        det_cy: None,
        eigen_data,
        tol_rel: cfg.tol_rel,
        note,
        extras,
    })
}

/// [`eigenflag_test`], re-run with tolerance `/100` and four times the starts when the
/// first pass does not fail. For operators expected to be generic.
pub fn eigenflag_test_reexamined(
    op: &CurvatureOperator,
    cfg: &EigenflagConfig,
) -> Result<ObstructionReport> {
    let first = eigenflag_test(op, cfg)?;
    if first.verdict == Verdict::FailsNecessary {
        return Ok(first);
    }
    warn!(
        "eigenflag verdict {} (residual {:e}); re-examining with tightened tolerance",
        first.verdict.as_str(),
        first.residual
    );
    let tight = EigenflagConfig {
        tol_rel: cfg.tol_rel / 100.0,
        starts: cfg.starts * 4,
        max_iter: cfg.max_iter * 4,
        ..cfg.clone()
    };
    let mut second = eigenflag_test(op, &tight)?;
    second.extras.insert(
        "reexamined".into(),
        json!({
            "first_verdict": first.verdict.as_str(),
            "first_residual": json::num(first.residual),
        }),
    );
    Ok(second)
}

/// Eigenvalue clusters of a dimension-4 operator with simplicity information.
///
/// An eigenspace `E` contains a simple bivector iff the restriction of the quadratic
/// form `ω ↦ ω ∧ ω` to `E` is indefinite or singular.
pub fn classify_simplicity(op: &CurvatureOperator, tol: f64) -> Result<Vec<EigenClass>> {
    if op.dim != 4 {
        return Err(Error::Dimension(format!(
            "simplicity classification needs dimension 4, got {}",
            op.dim
        )));
    }
    let eig = op.eigen();
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let scale = op.norm().max(f64::MIN_POSITIVE);
    let h = hodge_star_matrix(&DMatrix::identity(4, 4), Orientation::Standard)?;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(c)
                if (eig.eigenvalues[i] - eig.eigenvalues[*c.last().unwrap()]).abs()
                    <= tol * scale =>
            {
                c.push(i)
            }
            _ => clusters.push(vec![i]),
        }
    }
    let mut out = Vec::new();
    for c in clusters {
        let k = c.len();
        let e = DMatrix::from_fn(6, k, |r, col| eig.eigenvectors[(r, c[col])]);
        // ωᵀHω = 2 Pf(ω), and ω ∧ ω = 2 Pf(ω) vol.
        let q = e.transpose() * &h * &e;
        let qe = SymmetricEigen::new(q).eigenvalues;
        let min_abs = qe.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let has_pos = qe.iter().any(|&x| x > tol);
        let has_neg = qe.iter().any(|&x| x < -tol);
        let nullity = qe.iter().filter(|x| x.abs() <= tol).count();
        let (contains_simple, simple_rank, min_wedge) = if has_pos && has_neg {
            (true, k, 0.0)
        } else {
            (nullity > 0, nullity, min_abs)
        };
        let mean = c.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / k as f64;
        out.push(EigenClass {
            eigenvalue: mean,
            multiplicity: k,
            contains_simple,
            simple_rank,
            min_wedge,
        });
    }
    Ok(out)
}

/// Plane `P` and normal `w` for a traceless symmetric `A` with `det A = 0`:
/// `⟨Ap, p'⟩ = 0` on `P` and `⟨Aw, w⟩ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullPlane {
    pub basis: [DVector<f64>; 2],
    pub normal: DVector<f64>,
}

fn canonical_sign(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

pub fn plane_from_traceless_degenerate(a: &DMatrix<f64>, tol: f64) -> Result<NullPlane> {
    if a.nrows() != 3 || a.ncols() != 3 {
        return Err(Error::Dimension(
            "plane construction needs a 3x3 matrix".into(),
        ));
    }
    let norm = a.norm();
    let e = |i: usize| DVector::from_fn(3, |r, _| if r == i { 1.0 } else { 0.0 });
    if norm == 0.0 {
        return Ok(NullPlane {
            basis: [e(0), e(1)],
            normal: e(2),
        });
    }
    let tr = a.trace();
    let det = a.determinant();
    if tr.abs() > tol * norm || det.abs() > tol * norm.powi(3) {
        return Err(Error::PreconditionViolation(format!(
            "matrix must be traceless and singular (trace {tr:e}, det {det:e})"
        )));
    }
    let eig = SymmetricEigen::new((a + a.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let col = |i: usize| canonical_sign(eig.eigenvectors.column(i).into_owned());
    let (v1, v3, v2) = (col(order[0]), col(order[1]), col(order[2]));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Ok(NullPlane {
        basis: [(&v1 + &v2) * r, v3],
        normal: (&v1 - &v2) * r,
    })
}

/// `det(CY) = 0` test in dimension 3.
pub fn cotton_york_test(m: &MetricDef, p: &[f64], tol: f64) -> Result<ObstructionReport> {
    if m.dim() != 3 {
        return Err(Error::Dimension(format!(
            "the Cotton-York test concerns dimension 3, got {}",
            m.dim()
        )));
    }
    let snap = TensorSnapshot::compute(m, p)?;
    cotton_york_report(&snap, tol)
}

/// [`cotton_york_test`] on a precomputed snapshot.
pub fn cotton_york_report(snap: &TensorSnapshot, tol: f64) -> Result<ObstructionReport> {
    let cy_on = snap
        .cotton_york_orthonormal()
        .ok_or_else(|| Error::Dimension("Cotton-York tensor needs dimension 3".into()))?;
    let frame = orthonormal_frame(&snap.g).expect("checked positive definite");
    let norm = cy_on.norm();
    let det = cy_on.determinant();
    let mut extras = Map::new();
    extras.insert(
        "cotton_york".into(),
        json::matrix(snap.cotton_york.as_ref().unwrap()),
    );
    extras.insert("cotton_york_orthonormal".into(), json::matrix(&cy_on));
    extras.insert("cy_norm".into(), json::num(norm));
    extras.insert("point".into(), json::vec(&snap.point));

    let (residual, verdict, mut note) = if norm <= CY_ZERO_FLOOR {
        (
            0.0,
            Verdict::PassesNecessary,
            "Cotton-York tensor vanishes (locally conformally flat at this point)".to_string(),
        )
    } else {
        let r = det.abs() / norm.powi(3);
        let v = Verdict::from_scaled(r, tol);
        let note = match v {
            Verdict::FailsNecessary => {
                "det(CY) != 0; no limiting Carleman weight exists near this point".to_string()
            }
            Verdict::PassesNecessary => "det(CY) = 0 within tolerance".to_string(),
            Verdict::Inconclusive => {
                "|det CY| / |CY|^3 is within a factor 10 of the tolerance".to_string()
            }
        };
        (r, v, note)
    };
    if verdict == Verdict::PassesNecessary {
        if norm > CY_ZERO_FLOOR {
            let plane = plane_from_traceless_degenerate(&cy_on, (tol * 10.0).max(1e-12))?;
            let to_coords = |u: &DVector<f64>| (&frame * u).iter().copied().collect::<Vec<f64>>();
            extras.insert(
                "plane".into(),
                json!({
                    "basis": [json::vec(&to_coords(&plane.basis[0])), json::vec(&to_coords(&plane.basis[1]))],
                    "normal": json::vec(&to_coords(&plane.normal)),
                }),
            );
        }
        note.push_str("; ");
        note.push_str(PASS_NOTE);
    }
    Ok(ObstructionReport {
        dim: 3,
        test: TestKind::CottonYork,
        verdict,
        witness: None,
        residual,
        det_cy: Some(det),
        eigen_data: Vec::new(),
        tol_rel: tol,
        note,
        extras,
    })
}

/// Eigenflag test on the Weyl operator of a metric at a point (dimension >= 4).
pub fn weyl_report(snap: &TensorSnapshot, cfg: &EigenflagConfig) -> Result<ObstructionReport> {
    // Weyl parts at roundoff level relative to the curvature are zero.
    let op = if snap.weyl.norm() <= 1e-9 * snap.riemann.norm().max(1.0) {
        CurvatureOperator::zeros(snap.dim)
    } else {
        operator_from_0_4(&snap.weyl, &snap.g)?
    };
    let mut report = eigenflag_test(&op, cfg)?;
    if let Some(v) = &report.witness {
        let frame = orthonormal_frame(&snap.g).expect("checked positive definite");
        let coords: Vec<f64> = (&frame * DVector::from_column_slice(v))
            .iter()
            .copied()
            .collect();
        report
            .extras
            .insert("witness_coordinates".into(), json::vec(&coords));
    }
    report.extras.insert("point".into(), json::vec(&snap.point));
    Ok(report)
}

/// Dimension 3: Cotton-York test; dimension >= 4: eigenflag test on the Weyl operator.
pub fn auto_test(m: &MetricDef, p: &[f64], cfg: &EigenflagConfig) -> Result<ObstructionReport> {
    match m.dim() {
        3 => cotton_york_test(m, p, cfg.tol_rel),
        d if d >= 4 => weyl_report(&TensorSnapshot::compute(m, p)?, cfg),
        d => Err(Error::Dimension(format!(
            "obstruction tests need dimension >= 3, got {d}"
        ))),
    }
}
