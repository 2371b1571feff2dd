//! Truncated multivariate Taylor arithmetic up to total degree 3.
//!
//! A [`Jet3`] stores the Taylor coefficients (derivative divided by the
//! multi-index factorial) of a function of `dim` variables around a point.
//! Multi-indices are laid out in graded lexicographic order, so a product is a
//! truncated convolution driven by a precomputed index table.
//!
//! Each jet also carries the order up to which its coefficients are exact.
//! Lifted coordinates and constants are exact to order 3; differentiating a
//! jet lowers the order by one, and arithmetic keeps the smaller of the two
//! operand orders. This lets the tensor pipeline take up to three derivatives
//! of a metric without ever building order-4 jets.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest number of variables a jet may carry.
pub const MAX_DIM: usize = 6;
/// Highest retained total degree.
pub const MAX_ORDER: usize = 3;
/// `C(MAX_DIM + 3, 3)`.
pub const MAX_COEFFS: usize = 84;

/// Index tables for one dimension.
#[derive(Debug)]
pub struct Layout {
    dim: usize,
    /// Variables of each monomial as a sorted list, padded with `u8::MAX`.
    monomials: Vec<([u8; 3], u8)>,
    /// First index of each degree block, plus the total count.
    degree_start: [usize; 5],
    /// `raise[idx * dim + var]`: index of `monomial(idx) * x_var`, if degree allows.
    raise: Vec<Option<u16>>,
    /// Product pairs `(a, b, a*b)` with `deg(a) + deg(b) <= k`, bucketed by that sum.
    products: [Vec<(u8, u8, u8)>; 4],
}

impl Layout {
    fn build(dim: usize) -> Self {
        let mut monomials = Vec::new();
        let mut degree_start = [0usize; 5];
        for deg in 0..=MAX_ORDER {
            degree_start[deg] = monomials.len();
            match deg {
                0 => monomials.push(([u8::MAX; 3], 0)),
                1 => {
                    for i in 0..dim {
                        monomials.push(([i as u8, u8::MAX, u8::MAX], 1));
                    }
                }
                2 => {
                    for i in 0..dim {
                        for j in i..dim {
                            monomials.push(([i as u8, j as u8, u8::MAX], 2));
                        }
                    }
                }
                _ => {
                    for i in 0..dim {
                        for j in i..dim {
                            for k in j..dim {
                                monomials.push(([i as u8, j as u8, k as u8], 3));
                            }
                        }
                    }
                }
            }
        }
        degree_start[4] = monomials.len();

        let find = |vars: &[u8]| -> usize {
            let mut key = [u8::MAX; 3];
            let mut sorted: Vec<u8> = vars.to_vec();
            sorted.sort_unstable();
            key[..sorted.len()].copy_from_slice(&sorted);
            monomials
                .iter()
                .position(|(m, d)| *m == key && *d as usize == sorted.len())
                .expect("monomial in layout")
        };

        let vars_of = |idx: usize| -> Vec<u8> {
            let (m, d) = monomials[idx];
            m[..d as usize].to_vec()
        };

        let mut raise = vec![None; monomials.len() * dim];
        for idx in 0..monomials.len() {
            let vars = vars_of(idx);
            if vars.len() < MAX_ORDER {
                for var in 0..dim {
                    let mut v = vars.clone();
                    v.push(var as u8);
                    raise[idx * dim + var] = Some(find(&v) as u16);
                }
            }
        }

        let mut products: [Vec<(u8, u8, u8)>; 4] = Default::default();
        for a in 0..monomials.len() {
            for b in 0..monomials.len() {
                let da = monomials[a].1 as usize;
                let db = monomials[b].1 as usize;
                if da + db > MAX_ORDER {
                    continue;
                }
                let mut v = vars_of(a);
                v.extend(vars_of(b));
                let c = find(&v);
                products[da + db].push((a as u8, b as u8, c as u8));
            }
        }

        Layout {
            dim,
            monomials,
            degree_start,
            raise,
            products,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coefficients up to total degree `order`.
    pub fn len_to(&self, order: usize) -> usize {
        self.degree_start[order + 1]
    }

    pub fn len(&self) -> usize {
        self.degree_start[4]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sorted variable list of coefficient `idx`.
    pub fn vars(&self, idx: usize) -> &[u8] {
        let (m, d) = &self.monomials[idx];
        &m[..*d as usize]
    }

    /// Storage index of the monomial with the given variables (any order).
    pub fn index_of(&self, vars: &[usize]) -> Option<usize> {
        if vars.len() > MAX_ORDER || vars.iter().any(|&v| v >= self.dim) {
            return None;
        }
        let mut idx = 0usize;
        for &v in vars {
            idx = self.raise[idx * self.dim + v]? as usize;
        }
        Some(idx)
    }
}

/// Shared layout table for `dim` variables.
pub fn layout(dim: usize) -> &'static Layout {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    let all = LAYOUTS.get_or_init(|| (0..=MAX_DIM).map(Layout::build).collect());
    &all[dim]
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Truncated Taylor expansion in `dim` variables, exact to `order <= 3`.
#[derive(Clone, Copy)]
pub struct Jet3 {
    dim: u8,
    order: u8,
    coeffs: [f64; MAX_COEFFS],
}

impl std::fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet3")
            .field("dim", &self.dim)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl PartialEq for Jet3 {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.order == other.order && self.coeffs() == other.coeffs()
    }
}

impl Jet3 {
    /// Number of stored coefficients for `dim` variables: `C(dim + 3, 3)`.
    pub fn coeff_count(dim: usize) -> usize {
        binomial(dim + 3, 3)
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "jet dimension {dim} out of range"
        );
        let mut coeffs = [0.0; MAX_COEFFS];
        coeffs[0] = value;
        Jet3 {
            dim: dim as u8,
            order: MAX_ORDER as u8,
            coeffs,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    /// Jet of the coordinate function `x_var` at `point`.
    pub fn lift(point: &[f64], var: usize) -> Result<Self> {
        let dim = point.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(format!(
                "jets support 1..={MAX_DIM} variables, got {dim}"
            )));
        }
        if var >= dim {
            return Err(Error::IndexOutOfRange { index: var, dim });
        }
        let mut jet = Self::constant(dim, point[var]);
        jet.coeffs[1 + var] = 1.0;
        Ok(jet)
    }

    /// Lift every coordinate of `point`.
    pub fn lift_all(point: &[f64]) -> Result<Vec<Self>> {
        (0..point.len()).map(|v| Self::lift(point, v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Highest degree whose coefficients are exact.
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn layout(&self) -> &'static Layout {
        layout(self.dim())
    }

    /// Coefficients in graded lexicographic order, `C(dim + 3, 3)` of them.
    /// Entries above [`order`](Self::order) are zero.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..Self::coeff_count(self.dim())]
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of the monomial with the given variables.
    pub fn coeff(&self, vars: &[usize]) -> f64 {
        match self.layout().index_of(vars) {
            Some(i) if vars.len() <= self.order() => self.coeffs[i],
            _ => 0.0,
        }
    }

    /// Partial derivative `∂^|vars| f / ∂x_{vars[0]} ...` at the expansion point.
    pub fn partial(&self, vars: &[usize]) -> f64 {
        let mut counts = [0usize; MAX_DIM];
        for &v in vars {
            counts[v] += 1;
        }
        let fact: usize = counts.iter().map(|&c| (1..=c).product::<usize>()).product();
        self.coeff(vars) * fact as f64
    }

    /// Gradient at the expansion point.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.partial(&[i])).collect()
    }

    /// Copy truncated to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let mut out = *self;
        let n = self.layout().len_to(order);
        let total = Self::coeff_count(self.dim());
        out.coeffs[n..total].fill(0.0);
        out.order = order as u8;
        out
    }

    /// Jet of `∂f/∂x_var`; exact to one order less than `self`.
    pub fn d(&self, var: usize) -> Self {
        assert!(var < self.dim(), "derivative variable out of range");
        let lay = self.layout();
        let new_order = self.order().saturating_sub(1);
        let mut out = Jet3 {
            dim: self.dim,
            order: new_order as u8,
            coeffs: [0.0; MAX_COEFFS],
        };
        if self.order() == 0 {
            return out;
        }
        for idx in 0..lay.len_to(new_order) {
            if let Some(up) = lay.raise[idx * lay.dim + var] {
                let mult = lay.vars(idx).iter().filter(|&&v| v as usize == var).count() + 1;
                out.coeffs[idx] = mult as f64 * self.coeffs[up as usize];
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = *self;
        for c in out.coeffs.iter_mut() {
            *c *= k;
        }
        out
    }

    pub fn add_const(&self, k: f64) -> Self {
        let mut out = *self;
        out.coeffs[0] += k;
        out
    }

    fn check_dims(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
    }

    fn mul_jet(&self, other: &Self) -> Self {
        self.check_dims(other);
        let order = self.order.min(other.order) as usize;
        let lay = self.layout();
        let mut coeffs = [0.0; MAX_COEFFS];
        for bucket in &lay.products[..=order] {
            for &(a, b, c) in bucket {
                coeffs[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
            }
        }
        Jet3 {
            dim: self.dim,
            order: order as u8,
            coeffs,
        }
    }

    /// `f(self)` where `taylor[k] = f^{(k)}(u0) / k!` at `u0 = self.value()`.
    pub fn compose(&self, taylor: [f64; 4]) -> Self {
        let mut h = *self;
        h.coeffs[0] = 0.0;
        let mut out = Jet3::constant(self.dim(), taylor[0]).truncate(self.order());
        let mut power = h;
        for (k, &t) in taylor.iter().enumerate().skip(1) {
            if k > self.order() {
                break;
            }
            if k > 1 {
                power = power * h;
            }
            out = out + power.scale(t);
        }
        out
    }

    /// Multiplicative inverse by series inversion of `u0 + h`.
    pub fn recip(&self) -> Result<Self> {
        let u0 = self.value();
        if u0 == 0.0 || !u0.is_finite() {
            return Err(Error::Domain(
                "division by an expression that vanishes at the point".into(),
            ));
        }
        let r = 1.0 / u0;
        Ok(self.compose([r, -r * r, r * r * r, -r * r * r * r]))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(*self * other.recip()?)
    }

    pub fn powi(&self, exp: i32) -> Result<Self> {
        if exp < 0 {
            return self.recip()?.powi(-exp);
        }
        let mut out = Jet3::constant(self.dim(), 1.0).truncate(self.order());
        let mut base = *self;
        let mut e = exp as u32;
        while e > 0 {
            if e & 1 == 1 {
                out = out * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        Ok(out)
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0])
    }

    pub fn ln(&self) -> Result<Self> {
        let u = self.value();
        if u <= 0.0 || !u.is_finite() {
            return Err(Error::Domain(format!("log of nonpositive value {u}")));
        }
        let r = 1.0 / u;
        Ok(self.compose([u.ln(), r, -r * r / 2.0, r * r * r / 3.0]))
    }

    pub fn sqrt(&self) -> Result<Self> {
        let u = self.value();
        if u <= 0.0 || !u.is_finite() {
            return Err(Error::Domain(format!("sqrt of nonpositive value {u}")));
        }
        let s = u.sqrt();
        Ok(self.compose([s, 0.5 / s, -0.125 / (s * u), 0.0625 / (s * u * u)]))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s / 2.0, -c / 6.0])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c / 2.0, s / 6.0])
    }

    pub fn sinh(&self) -> Self {
        let u = self.value();
        let (s, c) = (u.sinh(), u.cosh());
        self.compose([s, c, s / 2.0, c / 6.0])
    }

    pub fn cosh(&self) -> Self {
        let u = self.value();
        let (s, c) = (u.sinh(), u.cosh());
        self.compose([c, s, c / 2.0, s / 6.0])
    }

    /// True when every stored coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        self.check_dims(&rhs);
        let order = self.order.min(rhs.order);
        let mut out = self;
        for (o, r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o += r;
        }
        out.truncate(order as usize)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        self + (-rhs)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        self.mul_jet(&rhs)
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        self.scale(rhs)
    }
}

/// Panics on a zero constant term; use [`Jet3::checked_div`] for fallible division.
impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, rhs: Jet3) -> Jet3 {
        self.checked_div(&rhs).expect("jet division by zero")
    }
}
