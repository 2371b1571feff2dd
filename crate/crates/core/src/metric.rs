//! Coordinate metrics: a symmetric matrix of expressions plus metadata.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Jet3, MAX_DIM};
use crate::parse::parse_expr_located;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricDef {
    dim: usize,
    components: Vec<Vec<Expr>>,
    pub name: String,
    pub chart: String,
}

impl MetricDef {
    /// Build from the upper triangle (`upper[i][j - i]` holds `g_ij` for `j >= i`).
    pub fn from_upper(dim: usize, upper: Vec<Vec<Expr>>) -> Result<Self> {
        if upper.len() != dim || upper.iter().enumerate().any(|(i, r)| r.len() != dim - i) {
            return Err(Error::MetricDefinition(
                "upper triangle has wrong shape".into(),
            ));
        }
        let mut full = vec![vec![Expr::Const(0.0); dim]; dim];
        for (i, row) in upper.into_iter().enumerate() {
            for (k, e) in row.into_iter().enumerate() {
                let j = i + k;
                full[j][i] = e.clone();
                full[i][j] = e;
            }
        }
        Self::new(dim, full)
    }

    /// Build from a full component array, which must be structurally symmetric.
    pub fn new(dim: usize, components: Vec<Vec<Expr>>) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(format!(
                "metric dimension must be in 2..={MAX_DIM}, got {dim}"
            )));
        }
        if components.len() != dim || components.iter().any(|r| r.len() != dim) {
            return Err(Error::MetricDefinition(format!(
                "component array is not {dim}x{dim}"
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if components[i][j] != components[j][i] {
                    return Err(Error::MetricDefinition(format!(
                        "g{}{} and g{}{} differ",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
            for e in &components[i] {
                if let Some(v) = e.max_var() {
                    if v >= dim {
                        return Err(Error::MetricDefinition(format!(
                            "component uses x{} in a {dim}-dimensional metric",
                            v + 1
                        )));
                    }
                }
            }
        }
        Ok(MetricDef {
            dim,
            components,
            name: String::new(),
            chart: String::new(),
        })
    }

    /// Euclidean metric in `dim` coordinates.
    pub fn euclidean(dim: usize) -> Result<Self> {
        let comps = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Expr::Const(if i == j { 1.0 } else { 0.0 }))
                    .collect()
            })
            .collect();
        Self::new(dim, comps)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_chart(mut self, chart: impl Into<String>) -> Self {
        self.chart = chart.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[i][j]
    }

    pub fn components(&self) -> &[Vec<Expr>] {
        &self.components
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, metric has dimension {}",
                point.len(),
                self.dim
            )));
        }
        if point.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("point has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// Jets of all components at `point`, exact to order 3.
    pub fn eval_jets(&self, point: &[f64]) -> Result<Vec<Vec<Jet3>>> {
        self.check_point(point)?;
        let vars = Jet3::lift_all(point)?;
        let mut out = vec![vec![Jet3::zero(self.dim); self.dim]; self.dim];
        for i in 0..self.dim {
            for j in i..self.dim {
                let jet = self.components[i][j].eval_jet(&vars)?;
                if !jet.is_finite() {
                    return Err(Error::Domain(format!(
                        "g{}{} is not finite at the point",
                        i + 1,
                        j + 1
                    )));
                }
                out[i][j] = jet;
                out[j][i] = jet;
            }
        }
        Ok(out)
    }

    /// Numeric metric matrix at `point`.
    pub fn eval_matrix(&self, point: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(point)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.components[i][j].eval_f64(point)?;
                if !v.is_finite() {
                    return Err(Error::Domain(format!("g{}{} is not finite", i + 1, j + 1)));
                }
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Components `e^{2f} g_ij`.
    pub fn conformal_rescale(&self, f: &ConformalFactor) -> MetricDef {
        let factor = (Expr::Const(2.0) * f.exponent.clone()).exp();
        let comps = self
            .components
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        if e.is_zero() {
                            Expr::Const(0.0)
                        } else {
                            factor.clone() * e.clone()
                        }
                    })
                    .collect()
            })
            .collect();
        MetricDef {
            dim: self.dim,
            components: comps,
            name: format!("{} (conformal)", self.name),
            chart: self.chart.clone(),
        }
    }

    /// Serialize in the metric file format. Zero off-diagonal entries are omitted.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dim = {}", self.dim);
        if !self.name.is_empty() {
            let _ = writeln!(s, "name = \"{}\"", self.name.replace('"', "'"));
        }
        if !self.chart.is_empty() {
            let _ = writeln!(s, "chart = \"{}\"", self.chart.replace('"', "'"));
        }
        for i in 0..self.dim {
            for j in i..self.dim {
                let e = &self.components[i][j];
                if i != j && e.is_zero() {
                    continue;
                }
                let _ = writeln!(s, "g{}{} = {}", i + 1, j + 1, e);
            }
        }
        s
    }
}

/// Exponent `f` of a conformal change `e^{2f} g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactor {
    pub exponent: Expr,
}

impl ConformalFactor {
    pub fn new(exponent: Expr) -> Self {
        ConformalFactor { exponent }
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn quoted(value: &str, line: usize, column: usize) -> Result<String> {
    let v = value.trim();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        Ok(v[1..v.len() - 1].to_string())
    } else {
        Err(Error::Syntax {
            line,
            column,
            message: "expected a double-quoted string".into(),
        })
    }
}

/// Parse a metric definition file.
///
/// ```text
/// # Sol
/// dim = 3
/// name = "sol"
/// g11 = exp(2*x3)
/// g22 = exp(-2*x3)
/// g33 = 1
/// ```
///
/// Unlisted off-diagonal entries are zero; every diagonal entry must be given.
pub fn parse_metric(text: &str) -> Result<MetricDef> {
    let mut dim: Option<usize> = None;
    let mut name = String::new();
    let mut chart = String::new();
    // (i, j, expr, line)
    let mut entries: Vec<(usize, usize, Expr, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(Error::Syntax {
                line: line_no,
                column: col,
                message: "expected `key = value`".into(),
            });
        };
        let key: String = line[..eq].chars().filter(|c| !c.is_whitespace()).collect();
        let value = &line[eq + 1..];
        let value_col = eq + 1;
        match key.as_str() {
            "dim" => {
                let d: usize = value.trim().parse().map_err(|_| Error::Syntax {
                    line: line_no,
                    column: value_col + 1,
                    message: "dim must be an integer".into(),
                })?;
                if dim.is_some() {
                    return Err(Error::MetricDefinition(format!(
                        "line {line_no}: dim given twice"
                    )));
                }
                if !(2..=MAX_DIM).contains(&d) {
                    return Err(Error::Dimension(format!(
                        "line {line_no}: dim must be in 2..={MAX_DIM}, got {d}"
                    )));
                }
                dim = Some(d);
            }
            "name" => name = quoted(value, line_no, value_col + 1)?,
            "chart" => chart = quoted(value, line_no, value_col + 1)?,
            k if k.len() == 3 && k.starts_with('g') => {
                let Some(d) = dim else {
                    return Err(Error::MetricDefinition(format!(
                        "line {line_no}: `dim = n` must come before components"
                    )));
                };
                let idx: Vec<usize> = k[1..]
                    .chars()
                    .map(|c| c.to_digit(10).map(|v| v as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Syntax {
                        line: line_no,
                        column: 1,
                        message: format!("bad component name `{k}`"),
                    })?;
                let (i, j) = (idx[0], idx[1]);
                if i == 0 || j == 0 || i > d || j > d {
                    return Err(Error::Dimension(format!(
                        "line {line_no}: component {k} outside a {d}-dimensional metric"
                    )));
                }
                let e = parse_expr_located(value, line_no, value_col, d)?;
                entries.push((i - 1, j - 1, e, line_no));
            }
            other => {
                return Err(Error::Syntax {
                    line: line_no,
                    column: 1,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let dim = dim.ok_or_else(|| Error::MetricDefinition("missing `dim = n` header".into()))?;
    let mut slots: Vec<Vec<Option<(Expr, usize)>>> = vec![vec![None; dim]; dim];
    for (i, j, e, line) in entries {
        if let Some((_, prev)) = &slots[i][j] {
            return Err(Error::MetricDefinition(format!(
                "g{}{} defined on line {prev} and again on line {line}",
                i + 1,
                j + 1
            )));
        }
        slots[i][j] = Some((e, line));
    }
    let mut comps = vec![vec![Expr::Const(0.0); dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let upper = slots[i][j].take();
            let lower = slots[j][i].take();
            let e = match (upper, lower) {
                (Some((a, _)), Some((b, line))) if i != j => {
                    if a != b {
                        return Err(Error::MetricDefinition(format!(
                            "line {line}: g{}{} differs from g{}{} (metric must be symmetric)",
                            j + 1,
                            i + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                    a
                }
                (Some((a, _)), _) | (None, Some((a, _))) => a,
                (None, None) if i == j => {
                    return Err(Error::MetricDefinition(format!(
                        "diagonal entry g{}{} is missing",
                        i + 1,
                        i + 1
                    )))
                }
                (None, None) => Expr::Const(0.0),
            };
            comps[j][i] = e.clone();
            comps[i][j] = e;
        }
    }
    Ok(MetricDef::new(dim, comps)?
        .with_name(name)
        .with_chart(chart))
}
