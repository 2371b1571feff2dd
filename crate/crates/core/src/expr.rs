//! Expression trees for metric components.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::jet::Jet3;

/// Unary functions available in metric expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    /// Smooth cutoff of a squared normalized radius `u`: 1 for `u <= 1/4`,
    /// 0 for `u >= 1`, and a degree-7 smoothstep in between (C³ at both junctions).
    Cutoff,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Cutoff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
            Func::Cutoff => "cutoff",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply_jet(self, u: &Jet3) -> Result<Jet3> {
        Ok(match self {
            Func::Exp => u.exp(),
            Func::Log => u.ln()?,
            Func::Sin => u.sin(),
            Func::Cos => u.cos(),
            Func::Sinh => u.sinh(),
            Func::Cosh => u.cosh(),
            Func::Sqrt => u.sqrt()?,
            Func::Cutoff => u.compose(cutoff_taylor(u.value())),
        })
    }

    fn apply_f64(self, u: f64) -> Result<f64> {
        Ok(match self {
            Func::Exp => u.exp(),
            Func::Log => {
                if u <= 0.0 {
                    return Err(Error::Domain(format!("log of nonpositive value {u}")));
                }
                u.ln()
            }
            Func::Sin => u.sin(),
            Func::Cos => u.cos(),
            Func::Sinh => u.sinh(),
            Func::Cosh => u.cosh(),
            Func::Sqrt => {
                if u < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {u}")));
                }
                u.sqrt()
            }
            Func::Cutoff => cutoff_taylor(u)[0],
        })
    }
}

/// Taylor coefficients of the cutoff profile at `u`.
pub(crate) fn cutoff_taylor(u: f64) -> [f64; 4] {
    const INNER: f64 = 0.25;
    if u <= INNER {
        return [1.0, 0.0, 0.0, 0.0];
    }
    if u >= 1.0 {
        return [0.0; 4];
    }
    let k = 1.0 / (1.0 - INNER);
    let t = (u - INNER) * k;
    let s = 1.0 - t;
    let step = t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t.powi(3));
    let d1 = 140.0 * t.powi(3) * s.powi(3);
    let d2 = 420.0 * t * t * s * s * (1.0 - 2.0 * t);
    let d3 = 840.0 * t * s * (1.0 - 5.0 * t + 5.0 * t * t);
    [
        1.0 - step,
        -d1 * k,
        -d2 * k * k / 2.0,
        -d3 * k * k * k / 6.0,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Zero-based coordinate index; printed as `x{index+1}`.
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn powi(self, exp: i32) -> Expr {
        match (exp, &self) {
            (0, _) => Expr::Const(1.0),
            (1, _) => self,
            (_, Expr::Const(c)) => Expr::Const(c.powi(exp)),
            _ => Expr::Pow(Box::new(self), exp),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    /// Sum of terms, dropping literal zeros. The tree is balanced, so its depth is
    /// logarithmic in the number of terms.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut terms: Vec<Expr> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        while terms.len() > 1 {
            let mut next = Vec::with_capacity(terms.len().div_ceil(2));
            let mut it = terms.into_iter();
            while let Some(a) = it.next() {
                next.push(match it.next() {
                    Some(b) => a + b,
                    None => a,
                });
            }
            terms = next;
        }
        terms.pop().unwrap_or(Expr::Const(0.0))
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Const(_) => None,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
        }
    }

    /// Whether `Var(index)` occurs.
    pub fn uses_var(&self, index: usize) -> bool {
        match self {
            Expr::Var(i) => *i == index,
            Expr::Const(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.uses_var(index) || b.uses_var(index)
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => a.uses_var(index),
        }
    }

    /// Replace each `Var(i)` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self {
            Expr::Var(i) => subs[*i].clone(),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Add(a, b) => a.substitute(subs) + b.substitute(subs),
            Expr::Sub(a, b) => a.substitute(subs) - b.substitute(subs),
            Expr::Mul(a, b) => a.substitute(subs) * b.substitute(subs),
            Expr::Div(a, b) => a.substitute(subs) / b.substitute(subs),
            Expr::Pow(a, n) => a.substitute(subs).powi(*n),
            Expr::Neg(a) => -a.substitute(subs),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(subs)),
        }
    }

    /// Evaluate on lifted coordinate jets.
    pub fn eval_jet(&self, vars: &[Jet3]) -> Result<Jet3> {
        let dim = vars.first().map(Jet3::dim).unwrap_or(1);
        Ok(match self {
            Expr::Var(i) => *vars.get(*i).ok_or(Error::IndexOutOfRange {
                index: *i,
                dim: vars.len(),
            })?,
            Expr::Const(c) => Jet3::constant(dim, *c),
            Expr::Add(a, b) => a.eval_jet(vars)? + b.eval_jet(vars)?,
            Expr::Sub(a, b) => a.eval_jet(vars)? - b.eval_jet(vars)?,
            Expr::Mul(a, b) => a.eval_jet(vars)? * b.eval_jet(vars)?,
            Expr::Div(a, b) => a.eval_jet(vars)?.checked_div(&b.eval_jet(vars)?)?,
            Expr::Pow(a, n) => a.eval_jet(vars)?.powi(*n)?,
            Expr::Neg(a) => -a.eval_jet(vars)?,
            Expr::Call(f, a) => f.apply_jet(&a.eval_jet(vars)?)?,
        })
    }

    /// Plain value at a point.
    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Var(i) => *x.get(*i).ok_or(Error::IndexOutOfRange {
                index: *i,
                dim: x.len(),
            })?,
            Expr::Const(c) => *c,
            Expr::Add(a, b) => a.eval_f64(x)? + b.eval_f64(x)?,
            Expr::Sub(a, b) => a.eval_f64(x)? - b.eval_f64(x)?,
            Expr::Mul(a, b) => a.eval_f64(x)? * b.eval_f64(x)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval_f64(x)? / d
            }
            Expr::Pow(a, n) => {
                let v = a.eval_f64(x)?;
                if v == 0.0 && *n < 0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                v.powi(*n)
            }
            Expr::Neg(a) => -a.eval_f64(x)?,
            Expr::Call(f, a) => f.apply_f64(a.eval_f64(x)?)?,
        })
    }
}

/// Jet of `e` at `point`, exact to order 3.
pub fn eval_expr(e: &Expr, point: &[f64]) -> Result<Jet3> {
    if let Some(v) = e.max_var() {
        if v >= point.len() {
            return Err(Error::IndexOutOfRange {
                index: v,
                dim: point.len(),
            });
        }
    }
    let vars = Jet3::lift_all(point)?;
    let jet = e.eval_jet(&vars)?;
    if !jet.is_finite() {
        return Err(Error::Domain(
            "expression is not finite at the point".into(),
        ));
    }
    Ok(jet)
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            (Some(a), Some(b)) => Expr::Const(a + b),
            _ => Expr::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (_, Some(0.0)) => self,
            (Some(0.0), _) => -rhs,
            (Some(a), Some(b)) => Expr::Const(a - b),
            _ => Expr::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(0.0), _) | (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            (Some(a), Some(b)) => Expr::Const(a * b),
            _ => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match rhs.as_const() {
            Some(1.0) => self,
            _ if self.is_zero() => Expr::Const(0.0),
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::Const(c)
    }
}

fn format_number(c: f64) -> String {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{a}")
    } else {
        format!("{a:e}")
    }
}

// Printing mirrors the grammar levels so that printing then parsing
// reproduces the tree exactly.
fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            write_expr(a, out);
            out.push_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            });
            write_term(b, out);
        }
        _ => write_term(e, out),
    }
}

fn write_term(e: &Expr, out: &mut String) {
    match e {
        Expr::Mul(a, b) | Expr::Div(a, b) => {
            write_term(a, out);
            out.push_str(if matches!(e, Expr::Mul(..)) { "*" } else { "/" });
            write_factor(b, out);
        }
        _ => write_factor(e, out),
    }
}

fn write_factor(e: &Expr, out: &mut String) {
    match e {
        Expr::Pow(a, n) => {
            write_base(a, out);
            out.push('^');
            out.push_str(&n.to_string());
        }
        _ => write_base(e, out),
    }
}

fn write_base(e: &Expr, out: &mut String) {
    match e {
        Expr::Var(i) => {
            out.push('x');
            out.push_str(&(i + 1).to_string());
        }
        Expr::Const(c) => {
            if c.is_sign_negative() && *c != 0.0 {
                out.push('-');
            }
            out.push_str(&format_number(*c));
        }
        Expr::Neg(a) => {
            out.push('-');
            write_base(a, out);
        }
        Expr::Call(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(a, out);
            out.push(')');
        }
        _ => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(self, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_derivatives() {
        let j = eval_expr(&Expr::Const(7.0), &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(j.value(), 7.0);
        assert!(j.coeffs()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn monomial_jet() {
        // x1^2 * x2 at (1, 1, 0)
        let e = Expr::Var(0).powi(2) * Expr::Var(1);
        let j = eval_expr(&e, &[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.gradient(), vec![2.0, 1.0, 0.0]);
        assert_eq!(j.coeff(&[0, 0, 1]), 1.0);
        assert_eq!(j.partial(&[0, 0, 1]), 2.0);
    }

    #[test]
    fn exp_of_scaled_variable() {
        let e = (Expr::Const(2.0) * Expr::Var(2)).exp();
        let j = eval_expr(&e, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(j.value(), 1.0);
        assert!((j.coeff(&[2]) - 2.0).abs() < 1e-15);
        assert!((j.coeff(&[2, 2]) - 2.0).abs() < 1e-15);
        assert!((j.coeff(&[2, 2, 2]) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn poles_and_branches_are_domain_errors() {
        let inv = Expr::Const(1.0) / Expr::Var(0);
        assert!(matches!(eval_expr(&inv, &[0.0]), Err(Error::Domain(_))));
        let l = Expr::call(Func::Log, Expr::Var(0));
        assert!(matches!(eval_expr(&l, &[-1.0]), Err(Error::Domain(_))));
        let s = Expr::call(Func::Sqrt, Expr::Var(0));
        assert!(matches!(eval_expr(&s, &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn variable_beyond_point_dimension() {
        assert!(matches!(
            eval_expr(&Expr::Var(3), &[0.0, 0.0]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn cutoff_profile_is_c3_at_junctions() {
        for u in [0.25, 1.0] {
            let lo = cutoff_taylor(u - 1e-9);
            let hi = cutoff_taylor(u + 1e-9);
            for k in 0..4 {
                assert!((lo[k] - hi[k]).abs() < 1e-5, "u={u} k={k}");
            }
        }
        assert_eq!(cutoff_taylor(0.1), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(cutoff_taylor(2.0), [0.0; 4]);
    }

    #[test]
    fn printer_uses_grammar_precedence() {
        let e = -(Expr::Var(0).powi(2));
        assert_eq!(e.to_string(), "-(x1^2)");
        let e = Expr::Var(0) - (Expr::Var(1) - Expr::Var(2));
        assert_eq!(e.to_string(), "x1 - (x2 - x3)");
        let e = Expr::Const(-0.5) * Expr::Var(0);
        assert_eq!(e.to_string(), "-0.5*x1");
    }
}
