use std::fmt;

use num_traits::{One, Zero};

use super::{BigFloat, Rat};

/// Arithmetic needed from a series coefficient.
///
/// Method names avoid the std operator traits so `Rat` and `BigFloat` can
/// implement this directly.
pub trait Coefficient: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scale_rat(&self, r: &Rat) -> Self;

    fn add_product(&mut self, a: &Self, b: &Self) {
        *self = self.plus(&a.times(b));
    }
}

impl Coefficient for Rat {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        self * r
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Coefficient for BigFloat {
    fn zero_elem() -> Self {
        BigFloat::zero()
    }
    fn one_elem() -> Self {
        BigFloat::one()
    }
    fn is_zero_elem(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        self * &BigFloat::from_rat(r, self.precision())
    }
}

/// Polynomial in `x` with rational coefficients, dense, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XPoly(Vec<Rat>);

impl XPoly {
    pub fn from_coeffs(mut c: Vec<Rat>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        XPoly(c)
    }

    pub fn monomial(coef: Rat, deg: usize) -> Self {
        let mut c = vec![<Rat as Zero>::zero(); deg + 1];
        c[deg] = coef;
        Self::from_coeffs(c)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.0.get(k).cloned().unwrap_or_else(<Rat as Zero>::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(<Rat as Zero>::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_integer((k as i64).into()))
                .collect(),
        )
    }
}

impl Coefficient for XPoly {
    fn zero_elem() -> Self {
        XPoly(Vec::new())
    }
    fn one_elem() -> Self {
        XPoly(vec![<Rat as One>::one()])
    }
    fn is_zero_elem(&self) -> bool {
        self.0.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        let n = self.0.len().max(rhs.0.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negated())
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.0.is_empty() || rhs.0.is_empty() {
            return Self::zero_elem();
        }
        let mut out = vec![<Rat as Zero>::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }
    fn negated(&self) -> Self {
        XPoly(self.0.iter().map(|c| -c).collect())
    }
    fn scale_rat(&self, r: &Rat) -> Self {
        Self::from_coeffs(self.0.iter().map(|c| c * r).collect())
    }
}

/// Second-order jet at a point: `c0 + c1*e + c2*e^2` modulo `e^3`.
///
/// With `x = x0 + e`, a polynomial `p(x)` maps to
/// `(p(x0), p'(x0), p''(x0)/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet(pub [Rat; 3]);

impl Jet {
    pub fn value(&self) -> &Rat {
        &self.0[0]
    }
    pub fn d1(&self) -> &Rat {
        &self.0[1]
    }
    /// Second derivative (twice the `e^2` coefficient).
    pub fn d2(&self) -> Rat {
        &self.0[2] * Rat::from_integer(2.into())
    }
}

impl Coefficient for Jet {
    fn zero_elem() -> Self {
        Jet([<Rat as Zero>::zero(), <Rat as Zero>::zero(), <Rat as Zero>::zero()])
    }
    fn one_elem() -> Self {
        Jet([<Rat as One>::one(), <Rat as Zero>::zero(), <Rat as Zero>::zero()])
    }
    fn is_zero_elem(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
    fn plus(&self, r: &Self) -> Self {
        Jet([&self.0[0] + &r.0[0], &self.0[1] + &r.0[1], &self.0[2] + &r.0[2]])
    }
    fn minus(&self, r: &Self) -> Self {
        Jet([&self.0[0] - &r.0[0], &self.0[1] - &r.0[1], &self.0[2] - &r.0[2]])
    }
    fn times(&self, r: &Self) -> Self {
        let [a0, a1, a2] = &self.0;
        let [b0, b1, b2] = &r.0;
        Jet([a0 * b0, a0 * b1 + a1 * b0, a0 * b2 + a1 * b1 + a2 * b0])
    }
    fn negated(&self) -> Self {
        Jet([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
    fn scale_rat(&self, s: &Rat) -> Self {
        Jet([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }
}

/// Coefficients with a (partial) inverse, needed for series division.
pub trait Field: Coefficient {
    fn inverse(&self) -> Option<Self>;
}

impl Field for Rat {
    fn inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Field for BigFloat {
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
}

impl Field for Jet {
    fn inverse(&self) -> Option<Self> {
        let [c0, c1, c2] = &self.0;
        if Zero::is_zero(c0) {
            return None;
        }
        let i0 = c0.recip();
        let a1 = -(c1 * &i0 * &i0);
        let a2 = (c1 * c1 - c0 * c2) * &i0 * &i0 * &i0;
        Some(Jet([i0, a1, a2]))
    }
}

/// Maps a polynomial term `coef * x^e` into a coefficient ring.
pub trait Ring: Sync {
    type Elem: Coefficient;
    fn term(&self, coef: &Rat, x_exp: u32) -> Self::Elem;
}

/// Exact rationals with `x` fixed to a rational value.
#[derive(Clone, Debug)]
pub struct RatRing {
    pub x: Rat,
}

impl Default for RatRing {
    fn default() -> Self {
        RatRing { x: <Rat as One>::one() }
    }
}

impl Ring for RatRing {
    type Elem = Rat;
    fn term(&self, coef: &Rat, e: u32) -> Rat {
        if e == 0 {
            coef.clone()
        } else {
            coef * num_traits::pow(self.x.clone(), e as usize)
        }
    }
}

/// Floating coefficients at a fixed precision, `x` fixed.
#[derive(Clone, Debug)]
pub struct FloatRing {
    pub prec: usize,
    pub x: BigFloat,
}

impl FloatRing {
    pub fn new(prec: usize) -> Self {
        FloatRing { prec, x: BigFloat::one().with_precision(prec) }
    }
}

impl Ring for FloatRing {
    type Elem = BigFloat;
    fn term(&self, coef: &Rat, e: u32) -> BigFloat {
        let c = BigFloat::from_rat(coef, self.prec);
        if e == 0 {
            c
        } else {
            c * self.x.with_precision(self.prec).powi(e as usize)
        }
    }
}

/// Keeps `x` symbolic.
#[derive(Clone, Debug, Default)]
pub struct XPolyRing;

impl Ring for XPolyRing {
    type Elem = XPoly;
    fn term(&self, coef: &Rat, e: u32) -> XPoly {
        XPoly::monomial(coef.clone(), e as usize)
    }
}

/// Second-order jets in `x` around `x0`.
#[derive(Clone, Debug)]
pub struct JetRing {
    pub x0: Rat,
}

impl Default for JetRing {
    fn default() -> Self {
        JetRing { x0: <Rat as One>::one() }
    }
}

impl Ring for JetRing {
    type Elem = Jet;
    fn term(&self, coef: &Rat, e: u32) -> Jet {
        let e_r = Rat::from_integer(e.into());
        let pw = |k: u32| -> Rat {
            if k > e {
                <Rat as Zero>::zero()
            } else {
                num_traits::pow(self.x0.clone(), (e - k) as usize)
            }
        };
        let half = Rat::new(1.into(), 2.into());
        Jet([
            coef * pw(0),
            coef * &e_r * pw(1),
            coef * &e_r * (&e_r - <Rat as One>::one()) * half * pw(2),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn jets_differentiate_polynomials() {
        // p(x) = 3x^4 at x0 = 2: p = 48, p' = 96, p'' = 144
        let j = JetRing { x0: rat(2, 1) }.term(&rat(3, 1), 4);
        assert_eq!(j.value(), &rat(48, 1));
        assert_eq!(j.d1(), &rat(96, 1));
        assert_eq!(j.d2(), rat(144, 1));
        // product rule through times
        let a = JetRing::default().term(&rat(1, 1), 2);
        let b = JetRing::default().term(&rat(1, 1), 3);
        assert_eq!(a.times(&b), JetRing::default().term(&rat(1, 1), 5));
    }

    #[test]
    fn xpoly_arithmetic() {
        let p = XPoly::from_coeffs(vec![rat(1, 1), rat(1, 1)]);
        let q = p.times(&p);
        assert_eq!(q.coeffs(), &[rat(1, 1), rat(2, 1), rat(1, 1)]);
        assert!(q.minus(&q).is_zero_elem());
        assert_eq!(q.eval(&rat(2, 1)), rat(9, 1));
        assert_eq!(q.derivative().coeffs(), &[rat(2, 1), rat(2, 1)]);
    }
}
