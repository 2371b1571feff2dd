//! Built-in geometries with reference values.

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::{json, Value};

use crate::bivector::{operator_from_0_4, CurvatureOperator};
use crate::error::{Error, Result};
use crate::expr::{eval_expr, Expr};
use crate::json;
use crate::metric::{parse_metric, MetricDef};
use crate::parse::parse_expr;
use crate::tensors::{kulkarni_nomizu, Array4};

pub const THURSTON: [&str; 8] = [
    "euclidean3",
    "sphere3",
    "hyperbolic3",
    "s2xr",
    "h2xr",
    "sol",
    "nil",
    "sl2r",
];

const EXTENSIONS: [&str; 7] = [
    "r_cross_surface",
    "cp2_algebraic",
    "cp2_chart",
    "r_x_sol",
    "r_x_nil",
    "r_x_s3",
    "sphere4",
];

pub const R_CROSS_SURFACE_DEFAULT_F: &str = "sin(x2)*cosh(x3)";

/// All entry names. `r_cross_surface` also accepts `r_cross_surface:<f(x2,x3)>`.
pub fn list_catalog() -> Vec<&'static str> {
    THURSTON.iter().chain(EXTENSIONS.iter()).copied().collect()
}

/// Curvature of an algebraic point model, in an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicPointData {
    pub dim: usize,
    pub riemann: Array4,
}

impl AlgebraicPointData {
    pub fn operator(&self) -> Result<CurvatureOperator> {
        operator_from_0_4(&self.riemann, &DMatrix::identity(self.dim, self.dim))
    }

    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |j, l| {
            (0..n).map(|i| self.riemann[[i, j, i, l]]).sum()
        })
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    pub fn schouten(&self) -> DMatrix<f64> {
        let n = self.dim as f64;
        let g = DMatrix::identity(self.dim, self.dim);
        (self.ricci() - g * (self.scalar() / (2.0 * (n - 1.0)))) / (n - 2.0)
    }

    pub fn weyl(&self) -> Array4 {
        let g = DMatrix::identity(self.dim, self.dim);
        let ks = kulkarni_nomizu(&self.schouten(), &g).expect("square matrices of equal size");
        Array4::from_fn(self.dim, |idx| self.riemann[idx] - ks[idx])
    }

    pub fn weyl_operator(&self) -> Result<CurvatureOperator> {
        operator_from_0_4(&self.weyl(), &DMatrix::identity(self.dim, self.dim))
    }

    pub fn to_json(&self, which: &[&str]) -> Result<Value> {
        let mut obj = serde_json::Map::new();
        obj.insert("dim".into(), json!(self.dim));
        obj.insert("frame".into(), json!("orthonormal"));
        for &key in which {
            let v = match key {
                "riemann" => self.riemann.to_json(),
                "ricci" => json::matrix(&self.ricci()),
                "scalar" => json::num(self.scalar()),
                "schouten" => json::matrix(&self.schouten()),
                "weyl" => self.weyl().to_json(),
                "operator" => self.operator()?.to_json(),
                other => {
                    return Err(Error::MetricDefinition(format!(
                        "tensor `{other}` is not available for algebraic point data"
                    )))
                }
            };
            obj.insert(key.into(), v);
        }
        Ok(Value::Object(obj))
    }
}

/// Antisymmetric in each pair and symmetric under pair exchange.
fn curvature_from_table(n: usize, entries: &[([usize; 4], f64)]) -> Array4 {
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

/// Fubini-Study curvature at a point in a unitary frame `(e1, Je1, e3, Je3)`.
pub fn cp2_algebraic() -> AlgebraicPointData {
    AlgebraicPointData {
        dim: 4,
        riemann: curvature_from_table(
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
        ),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EntryData {
    Metric(MetricDef),
    Algebraic(AlgebraicPointData),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub data: EntryData,
    /// Box from which test points are drawn.
    pub domain: Vec<(f64, f64)>,
    /// Point used when none is given.
    pub base_point: Vec<f64>,
    pub description: String,
}

impl CatalogEntry {
    pub fn metric(&self) -> Option<&MetricDef> {
        match &self.data {
            EntryData::Metric(m) => Some(m),
            EntryData::Algebraic(_) => None,
        }
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.domain
            .iter()
            .map(|&(a, b)| rng.random_range(a..b))
            .collect()
    }

    /// Metric file text for coordinate entries.
    pub fn metric_file(&self) -> Result<String> {
        self.metric()
            .map(MetricDef::to_file_string)
            .ok_or_else(|| Error::UnknownEntry(format!("{} has no coordinate metric", self.name)))
    }
}

fn metric_entry(
    name: &str,
    text: &str,
    chart: &str,
    description: &str,
    domain: Vec<(f64, f64)>,
    base_point: Vec<f64>,
) -> Result<CatalogEntry> {
    let m = parse_metric(text)?.with_name(name).with_chart(chart);
    Ok(CatalogEntry {
        name: name.to_string(),
        dim: m.dim(),
        data: EntryData::Metric(m),
        domain,
        base_point,
        description: description.to_string(),
    })
}

fn cube(n: usize, r: f64) -> Vec<(f64, f64)> {
    vec![(-r, r); n]
}

pub const SOL_METRIC: &str = "dim = 3\ng11 = exp(2*x3)\ng22 = exp(-2*x3)\ng33 = 1\n";
pub const NIL_METRIC: &str = "dim = 3\ng11 = 1\ng22 = 1 + x1^2\ng23 = -x1\ng33 = 1\n";
pub const SL2R_METRIC: &str = "dim = 3
g11 = (4*x3^2 + 1)*exp(2*x2) + ((x3^2 - 1)*exp(x2) + exp(-x2))^2
g12 = ((x3^2 - 1)*exp(x2) + exp(-x2))*x3 + 2*x3*exp(x2)
g13 = (x3^2 - 1)*exp(x2) + exp(-x2)
g22 = x3^2 + 1
g23 = x3
g33 = 1
";
const SPHERE3_METRIC: &str = "dim = 3
g11 = 4/(1 + x1^2 + x2^2 + x3^2)^2
g22 = 4/(1 + x1^2 + x2^2 + x3^2)^2
g33 = 4/(1 + x1^2 + x2^2 + x3^2)^2
";

/// Prepend a flat line `dx1²` to a metric given as component strings.
fn line_times(base: &MetricDef) -> Result<MetricDef> {
    let n = base.dim() + 1;
    let shift: Vec<Expr> = (0..base.dim()).map(|i| Expr::var(i + 1)).collect();
    let mut comps = vec![vec![Expr::constant(0.0); n]; n];
    comps[0][0] = Expr::constant(1.0);
    for i in 0..base.dim() {
        for j in 0..base.dim() {
            comps[i + 1][j + 1] = base.component(i, j).substitute(&shift);
        }
    }
    MetricDef::new(n, comps)
}

fn product_entry(name: &str, base: &CatalogEntry) -> Result<CatalogEntry> {
    let m = line_times(base.metric().expect("coordinate base"))?
        .with_name(name)
        .with_chart(format!(
            "x1 along the line, (x2, x3, x4) as in {}",
            base.name
        ));
    let mut domain = vec![(-1.0, 1.0)];
    domain.extend(base.domain.iter().copied());
    let mut base_point = vec![0.0];
    base_point.extend(base.base_point.iter().copied());
    Ok(CatalogEntry {
        name: name.to_string(),
        dim: 4,
        data: EntryData::Metric(m),
        domain,
        base_point,
        description: format!("line times {}", base.name),
    })
}

/// `dx1² + e^f (dx2² + dx3²)` for `f = f(x2, x3)`.
pub fn r_cross_surface_metric(f: &Expr) -> Result<MetricDef> {
    check_surface_function(f)?;
    let ef = f.clone().exp();
    MetricDef::from_upper(
        3,
        vec![
            vec![
                Expr::constant(1.0),
                Expr::constant(0.0),
                Expr::constant(0.0),
            ],
            vec![ef.clone(), Expr::constant(0.0)],
            vec![ef],
        ],
    )
}

fn check_surface_function(f: &Expr) -> Result<()> {
    if f.uses_var(0) || f.max_var().is_some_and(|v| v > 2) {
        return Err(Error::MetricDefinition(
            "the surface function may only depend on x2 and x3".into(),
        ));
    }
    Ok(())
}

/// Fubini-Study metric in the affine chart `z1 = x1 + i x2`, `z2 = x3 + i x4`.
pub fn cp2_chart_metric() -> Result<MetricDef> {
    let r2 = "(1 + x1^2 + x2^2 + x3^2 + x4^2)";
    let a = ["x1", "x2", "x3", "x4"];
    let b = ["(0 - x2)", "x1", "(0 - x4)", "x3"];
    let mut text = String::from("dim = 4\n");
    for i in 0..4 {
        for j in i..4 {
            let delta = if i == j {
                format!("1/{r2} - ")
            } else {
                "0 - ".to_string()
            };
            text.push_str(&format!(
                "g{}{} = {delta}({}*{} + {}*{})/{r2}^2\n",
                i + 1,
                j + 1,
                a[i],
                a[j],
                b[i],
                b[j]
            ));
        }
    }
    parse_metric(&text)
}

/// Look up an entry by name.
pub fn entry(name: &str) -> Result<CatalogEntry> {
    if let Some(f_text) = name.strip_prefix("r_cross_surface:") {
        let f = parse_expr(f_text)?;
        return r_cross_surface_entry(&f, name);
    }
    match name {
        "euclidean3" => metric_entry(
            name,
            "dim = 3\ng11 = 1\ng22 = 1\ng33 = 1\n",
            "Cartesian coordinates",
            "Euclidean space",
            cube(3, 2.0),
            vec![0.0; 3],
        ),
        "sphere3" => metric_entry(
            name,
            SPHERE3_METRIC,
            "stereographic coordinates",
            "round unit 3-sphere",
            cube(3, 2.0),
            vec![0.0; 3],
        ),
        "hyperbolic3" => metric_entry(
            name,
            "dim = 3\ng11 = 1/x3^2\ng22 = 1/x3^2\ng33 = 1/x3^2\n",
            "upper half space, x3 > 0",
            "hyperbolic 3-space",
            vec![(-2.0, 2.0), (-2.0, 2.0), (0.5, 3.0)],
            vec![0.0, 0.0, 1.0],
        ),
        "s2xr" => metric_entry(
            name,
            "dim = 3\ng11 = 4/(1 + x1^2 + x2^2)^2\ng22 = 4/(1 + x1^2 + x2^2)^2\ng33 = 1\n",
            "stereographic (x1, x2) on the sphere, x3 along the line",
            "unit 2-sphere times a line",
            cube(3, 2.0),
            vec![0.0; 3],
        ),
        "h2xr" => metric_entry(
            name,
            "dim = 3\ng11 = 1/x2^2\ng22 = 1/x2^2\ng33 = 1\n",
            "upper half plane (x1, x2), x2 > 0, x3 along the line",
            "hyperbolic plane times a line",
            vec![(-2.0, 2.0), (0.5, 3.0), (-2.0, 2.0)],
            vec![0.0, 1.0, 0.0],
        ),
        "sol" => metric_entry(
            name,
            SOL_METRIC,
            "(x, y, z) = (x1, x2, x3)",
            "Sol geometry",
            cube(3, 1.0),
            vec![0.0; 3],
        ),
        "nil" => metric_entry(
            name,
            NIL_METRIC,
            "(x, y, z) = (x1, x2, x3); g = dx^2 + dy^2 + (dz - x dy)^2",
            "Nil geometry (Heisenberg group)",
            cube(3, 2.0),
            vec![0.0; 3],
        ),
        "sl2r" => metric_entry(
            name,
            SL2R_METRIC,
            "Iwasawa coordinates (theta, t, s) = (x1, x2, x3), |t|, |s| < 2",
            "universal cover of SL(2,R) with its left-invariant metric",
            vec![(-3.0, 3.0), (-1.5, 1.5), (-1.5, 1.5)],
            vec![0.0; 3],
        ),
        "r_cross_surface" => r_cross_surface_entry(&parse_expr(R_CROSS_SURFACE_DEFAULT_F)?, name),
        "cp2_algebraic" => Ok(CatalogEntry {
            name: name.to_string(),
            dim: 4,
            data: EntryData::Algebraic(cp2_algebraic()),
            domain: Vec::new(),
            base_point: Vec::new(),
            description: "complex projective plane, curvature at a point".to_string(),
        }),
        "cp2_chart" => {
            let m = cp2_chart_metric()?
                .with_name(name)
                .with_chart("affine chart z1 = x1 + i x2, z2 = x3 + i x4");
            Ok(CatalogEntry {
                name: name.to_string(),
                dim: 4,
                data: EntryData::Metric(m),
                domain: cube(4, 1.0),
                base_point: vec![0.0; 4],
                description: "Fubini-Study metric, holomorphic sectional curvature 4".to_string(),
            })
        }
        "r_x_sol" => product_entry(name, &entry("sol")?),
        "r_x_nil" => product_entry(name, &entry("nil")?),
        "r_x_s3" => product_entry(name, &entry("sphere3")?),
        "sphere4" => metric_entry(
            name,
            "dim = 4
g11 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g22 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g33 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2
g44 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2
",
            "stereographic coordinates",
            "round unit 4-sphere",
            cube(4, 1.0),
            vec![0.0; 4],
        ),
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

fn r_cross_surface_entry(f: &Expr, name: &str) -> Result<CatalogEntry> {
    let m = r_cross_surface_metric(f)?
        .with_name(name)
        .with_chart(format!("x1 along the line, isothermal (x2, x3), f = {f}"));
    Ok(CatalogEntry {
        name: name.to_string(),
        dim: 3,
        data: EntryData::Metric(m),
        domain: cube(3, 1.0),
        base_point: vec![0.0; 3],
        description: "line times a surface in isothermal coordinates".to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcwExpectation {
    /// Some conformal metric carries a parallel unit field.
    Exists,
    /// The necessary condition fails.
    None,
}

/// Reference values for a catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedTruth {
    pub name: String,
    pub lcw: LcwExpectation,
    /// Exit code of `lcw check` at any point.
    pub check_exit: i32,
    /// Determinant of CY in an orthonormal frame, when point-independent.
    pub det_cy: Option<f64>,
    /// A point with its CY matrix in coordinates.
    pub cy_at: Option<(Vec<f64>, DMatrix<f64>)>,
    pub scalar: Option<f64>,
    pub reason: String,
    pub citation: String,
    pub notes: Vec<String>,
}

impl ExpectedTruth {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "lcw": match self.lcw {
                LcwExpectation::Exists => "exists",
                LcwExpectation::None => "none",
            },
            "check_exit": self.check_exit,
            "det_cy": self.det_cy.map_or(Value::Null, json::num),
            "cy_at": self.cy_at.as_ref().map_or(Value::Null, |(p, m)| json!({
                "point": json::vec(p),
                "cy": json::matrix(m),
            })),
            "scalar": self.scalar.map_or(Value::Null, json::num),
            "reason": self.reason,
            "citation": self.citation,
            "notes": self.notes,
        })
    }
}

pub fn expected_truth(name: &str) -> Result<ExpectedTruth> {
    let base = name.split(':').next().unwrap_or(name);
    let exists =
        |reason: &str, det: Option<f64>, scalar: Option<f64>, citation: &str| ExpectedTruth {
            name: name.to_string(),
            lcw: LcwExpectation::Exists,
            check_exit: 0,
            det_cy: det,
            cy_at: None,
            scalar,
            reason: reason.to_string(),
            citation: citation.to_string(),
            notes: Vec::new(),
        };
    const THURSTON_CITE: &str =
        "classification of the eight Thurston geometries by LCW admissibility";
    Ok(match base {
        "euclidean3" => {
            let mut t = exists("flat", Some(0.0), Some(0.0), THURSTON_CITE);
            t.cy_at = Some((vec![0.0; 3], DMatrix::zeros(3, 3)));
            t
        }
        "sphere3" | "hyperbolic3" => {
            let s = if base == "sphere3" { 6.0 } else { -6.0 };
            let mut t = exists("conformally flat", Some(0.0), Some(s), THURSTON_CITE);
            t.cy_at = Some((entry(base)?.base_point, DMatrix::zeros(3, 3)));
            t
        }
        "s2xr" => exists("product with a line", Some(0.0), Some(2.0), THURSTON_CITE),
        "h2xr" => exists("product with a line", Some(0.0), Some(-2.0), THURSTON_CITE),
        "sol" => exists(
            "e^{-2z} g splits along the x direction",
            Some(0.0),
            Some(-2.0),
            THURSTON_CITE,
        ),
        "nil" => ExpectedTruth {
            name: name.to_string(),
            lcw: LcwExpectation::None,
            check_exit: 10,
            det_cy: Some(-0.25),
            cy_at: Some((vec![0.0; 3], nil_closed_forms(&[0.0; 3]).cotton_york)),
            scalar: Some(-0.5),
            reason: "det CY != 0 at every point".to_string(),
            citation: "Nil geometry: Ricci, Schouten and Cotton-York tensors in the (x, y, z) chart".to_string(),
            notes: vec![
                "a determinant of -1/2 is also quoted for this CY matrix; the displayed matrix itself has determinant -1/4".to_string(),
            ],
        },
        "sl2r" => ExpectedTruth {
            name: name.to_string(),
            lcw: LcwExpectation::None,
            check_exit: 10,
            det_cy: Some(16.0),
            cy_at: Some((vec![0.0; 3], sl2r_full_tensors(&[0.0; 3]).cotton_york)),
            scalar: Some(-2.0),
            reason: "det CY != 0 at every point (left-invariant metric)".to_string(),
            citation: "SL(2,R) geometry: Schouten and Cotton-York tensors in Iwasawa coordinates".to_string(),
            notes: Vec::new(),
        },
        "r_cross_surface" => exists(
            "product with a line",
            Some(0.0),
            None,
            "Cotton-York tensor of a line times a surface",
        ),
        "cp2_algebraic" | "cp2_chart" => ExpectedTruth {
            name: name.to_string(),
            lcw: LcwExpectation::None,
            check_exit: 10,
            det_cy: None,
            cy_at: None,
            scalar: Some(24.0),
            reason: "W+ = diag(4,-2,-2) and W- = 0 are not isospectral, so the eigenflag condition fails".to_string(),
            citation: "Fubini-Study curvature components and W+/W- blocks".to_string(),
            notes: Vec::new(),
        },
        "r_x_sol" | "r_x_nil" | "r_x_s3" => exists(
            "parallel field along the line factor",
            None,
            None,
            "product metrics carry a parallel unit field",
        ),
        "sphere4" => exists("conformally flat", None, Some(12.0), "space forms are conformally flat"),
        other => return Err(Error::UnknownEntry(other.to_string())),
    })
}

/// Closed-form tensors of a reference metric at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForms {
    pub point: Vec<f64>,
    pub ricci: Option<DMatrix<f64>>,
    pub scalar: f64,
    pub schouten: DMatrix<f64>,
    pub cotton_york: DMatrix<f64>,
}

impl ClosedForms {
    pub fn to_json(&self) -> Value {
        json!({
            "point": json::vec(&self.point),
            "ricci": self.ricci.as_ref().map_or(Value::Null, json::matrix),
            "scalar": json::num(self.scalar),
            "schouten": json::matrix(&self.schouten),
            "cotton_york": json::matrix(&self.cotton_york),
        })
    }
}

fn sym3(m: [[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[i][j])
}

/// Nil tensors at `(x, y, z)`; they depend on `x` only.
pub fn nil_closed_forms(point: &[f64]) -> ClosedForms {
    let x = point[0];
    let x2 = x * x;
    ClosedForms {
        point: point.to_vec(),
        ricci: Some(sym3([
            [-0.5, 0.0, 0.0],
            [0.0, 0.5 * x2 - 0.5, -0.5 * x],
            [0.0, -0.5 * x, 0.5],
        ])),
        scalar: -0.5,
        schouten: sym3([
            [-0.375, 0.0, 0.0],
            [0.0, 0.625 * x2 - 0.375, -0.625 * x],
            [0.0, -0.625 * x, 0.625],
        ]),
        cotton_york: sym3([[0.5, 0.0, 0.0], [0.0, 0.5 - x2, x], [0.0, x, -1.0]]),
    }
}

/// SL(2,R) tensors at `(θ, t, s)`; they do not depend on `θ`.
pub fn sl2r_full_tensors(point: &[f64]) -> ClosedForms {
    let (t, s) = (point[1], point[2]);
    let e = t.exp();
    let a = (s * s - 1.0) * e + 1.0 / e;
    let schouten = sym3([
        [
            -8.0 * s * s * e * e + 0.5 * (4.0 * s * s + 1.0) * e * e + 0.5 * a * a,
            (0.5 * s.powi(3) - 3.5 * s) * e + 0.5 * s / e,
            0.5 * (s * s - 1.0) * e + 0.5 / e,
        ],
        [0.0, -1.5 + 0.5 * s * s, 0.5 * s],
        [0.0, 0.0, 0.5],
    ]);
    let cy = sym3([
        [
            4.0 * s.powi(4) * e * e - 28.0 * s * s * e * e
                + 8.0 * s * s
                + 8.0 * e * e
                + 4.0 / (e * e)
                - 12.0,
            4.0 * s.powi(3) * e + 4.0 * s / e - 14.0 * s * e,
            4.0 * s * s * e + 4.0 / e - 6.0 * e,
        ],
        [0.0, 4.0 * s * s - 4.0, 4.0 * s],
        [0.0, 0.0, 4.0],
    ]);
    let symmetrize = |m: DMatrix<f64>| {
        let upper = m.upper_triangle();
        &upper + upper.transpose() - DMatrix::from_diagonal(&upper.diagonal())
    };
    let ricci = sym3([
        [-8.0 * s * s * e * e, -4.0 * s * e, 0.0],
        [-4.0 * s * e, -2.0, 0.0],
        [0.0, 0.0, 0.0],
    ]);
    ClosedForms {
        point: point.to_vec(),
        ricci: Some(ricci),
        scalar: -2.0,
        schouten: symmetrize(schouten),
        cotton_york: symmetrize(cy),
    }
}

/// CY of `dx1² + e^f (dx2² + dx3²)` as `½ dx1 · (∗ds)`, where `s = −Δf e^{−f}` is the
/// scalar curvature of the surface and `a · b = ½(a ⊗ b + b ⊗ a)`.
pub fn r_cross_surface_cy(f: &Expr, point: &[f64]) -> Result<DMatrix<f64>> {
    check_surface_function(f)?;
    let fj = eval_expr(f, point)?;
    let lap = fj.d(1).d(1) + fj.d(2).d(2);
    let s = -(lap * (-fj.truncate(1)).exp());
    // ∗dx2 = dx3 and ∗dx3 = −dx2 on a surface in isothermal coordinates.
    let star_ds = [0.0, -s.partial(&[2]), s.partial(&[1])];
    Ok(DMatrix::from_fn(3, 3, |i, j| {
        let dx1 = |k: usize| if k == 0 { 1.0 } else { 0.0 };
        0.25 * (dx1(i) * star_ds[j] + star_ds[i] * dx1(j))
    }))
}

/// CY of `dx1² + e^f (dx2² + dx3²)` from the explicit `CY₁₂`, `CY₁₃` component formulas.
pub fn r_cross_surface_cy_components(f: &Expr, point: &[f64]) -> Result<DMatrix<f64>> {
    check_surface_function(f)?;
    let fj = eval_expr(f, point)?;
    let lap = |j: &crate::jet::Jet3| j.d(1).d(1) + j.d(2).d(2);
    let lap_f = lap(&fj).value();
    let d_lap = |k: usize| lap(&fj.d(k)).value();
    let emf = (-fj.value()).exp();
    let cy12 = -0.25 * (lap_f * fj.partial(&[2]) - d_lap(2)) * emf;
    let cy13 = 0.25 * (lap_f * fj.partial(&[1]) - d_lap(1)) * emf;
    Ok(sym3([
        [0.0, cy12, cy13],
        [cy12, 0.0, 0.0],
        [cy13, 0.0, 0.0],
    ]))
}
