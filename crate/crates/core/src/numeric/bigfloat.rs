//! Binary floating point with configurable precision.
//!
//! A thin newtype over [`astro_float::BigFloat`] that never holds NaN or an
//! infinity. Binary operators take the larger of the two operand precisions.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::Rat;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;
/// Smallest precision a value may carry.
pub const MIN_PRECISION: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

#[derive(Clone)]
pub struct BigFloat(astro_float::BigFloat);

impl BigFloat {
    fn wrap(v: astro_float::BigFloat) -> Result<Self> {
        if v.is_nan() || v.is_inf() {
            Err(Error::Numeric(format!("non-finite result ({v})")))
        } else {
            Ok(BigFloat(v))
        }
    }

    fn wrap_op(v: astro_float::BigFloat, what: &str) -> Self {
        match Self::wrap(v) {
            Ok(x) => x,
            Err(_) => panic!("BigFloat {what} produced a non-finite value"),
        }
    }

    fn clamp_precision(p: usize) -> usize {
        p.max(MIN_PRECISION)
    }

    pub fn zero() -> Self {
        BigFloat(astro_float::BigFloat::from_u64(0, MIN_PRECISION))
    }

    pub fn one() -> Self {
        Self::from_i64(1, MIN_PRECISION)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        BigFloat(astro_float::BigFloat::from_i64(v, Self::clamp_precision(prec)))
    }

    /// Exact conversion of a finite `f64`, then rounding to `prec` bits.
    pub fn from_f64(v: f64, prec: usize) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("cannot represent {v}")));
        }
        Self::wrap(astro_float::BigFloat::from_f64(v, Self::clamp_precision(prec)))
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        if v.is_zero() {
            return Self::zero().with_precision(prec);
        }
        let digits = v.magnitude().to_u64_digits();
        let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
        let e = (digits.len() * 64) as i32;
        let mut x = astro_float::BigFloat::from_words(&digits, sign, e);
        x.set_precision(Self::clamp_precision(prec), RM)
            .expect("precision in range");
        BigFloat(x)
    }

    /// Correctly rounded quotient of numerator and denominator.
    pub fn from_rat(r: &Rat, prec: usize) -> Self {
        let p = Self::clamp_precision(prec);
        let n = Self::from_bigint(r.numer(), p + 64);
        if r.denom().is_one() {
            return n.with_precision(p);
        }
        let d = Self::from_bigint(r.denom(), p + 64);
        Self::wrap_op(n.0.div(&d.0, p, RM), "division")
    }

    pub fn pi(prec: usize) -> Self {
        let p = Self::clamp_precision(prec);
        BigFloat(with_consts(|cc| cc.pi(p, RM)))
    }

    pub fn precision(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(MIN_PRECISION).max(MIN_PRECISION)
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        let mut x = self.0.clone();
        x.set_precision(Self::clamp_precision(prec), RM)
            .expect("precision in range");
        BigFloat(x)
    }

    fn op_prec(&self, other: &Self) -> usize {
        self.precision().max(other.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        BigFloat(self.0.abs())
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::Numeric("division by zero".into()));
        }
        Self::wrap(self.0.div(&other.0, self.op_prec(other), RM))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().with_precision(self.precision()).try_div(self)
    }

    pub fn try_sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Numeric("square root of a negative number".into()));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        Self::wrap(self.0.sqrt(self.precision(), RM))
    }

    /// Square root; panics on negative input.
    pub fn sqrt(&self) -> Self {
        self.try_sqrt().expect("sqrt of a negative BigFloat")
    }

    pub fn try_ln(&self) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::Numeric("logarithm of a non-positive number".into()));
        }
        let p = self.precision();
        Self::wrap(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        let p = self.precision();
        Self::wrap_op(with_consts(|cc| self.0.exp(p, RM, cc)), "exp")
    }

    pub fn powi(&self, n: usize) -> Self {
        if n == 0 {
            return Self::one().with_precision(self.precision());
        }
        Self::wrap_op(self.0.powi(n, self.precision(), RM), "powi")
    }

    /// `self^e` for positive `self`.
    pub fn try_pow(&self, e: &Self) -> Result<Self> {
        if e.is_zero() {
            return Ok(Self::one().with_precision(self.precision()));
        }
        if !self.is_positive() {
            return Err(Error::Numeric("real power of a non-positive base".into()));
        }
        let p = self.op_prec(e);
        Self::wrap(with_consts(|cc| self.0.pow(&e.0, p, RM, cc)))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Value as `(mantissa, binary exponent)` with `self == mantissa * 2^exp`.
    fn to_scaled_integer(&self) -> (BigInt, i64) {
        match self.0.as_raw_parts() {
            Some((words, _, sign, e, _)) if !self.is_zero() => {
                let mag = BigUint::from_slice(
                    &words
                        .iter()
                        .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
                        .collect::<Vec<_>>(),
                );
                let mut m = BigInt::from(mag);
                if sign == Sign::Neg {
                    m = -m;
                }
                (m, e as i64 - (words.len() * 64) as i64)
            }
            _ => (BigInt::zero(), 0),
        }
    }

    /// Exact rational value.
    pub fn to_rat(&self) -> Rat {
        let (m, e) = self.to_scaled_integer();
        if e >= 0 {
            Rat::from_integer(m << (e as usize))
        } else {
            Rat::new(m, BigInt::one() << ((-e) as usize))
        }
    }

    /// Nearest integer, ties to even.
    pub fn round_to_integer(&self) -> BigInt {
        let (m, e) = self.to_scaled_integer();
        if e >= 0 {
            return m << (e as usize);
        }
        let d = BigInt::one() << ((-e) as usize);
        let (q, r) = m.div_mod_floor(&d);
        let twice: BigInt = &r * 2;
        match twice.cmp(&d) {
            Ordering::Less => q,
            Ordering::Greater => q + 1,
            Ordering::Equal => {
                if q.is_even() {
                    q
                } else {
                    q + 1
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self.0.as_raw_parts() {
            Some((words, _, sign, e, _)) if !self.is_zero() => {
                let top = *words.last().unwrap() as f64;
                let next = if words.len() > 1 {
                    words[words.len() - 2] as f64 / 18446744073709551616.0
                } else {
                    0.0
                };
                let v = (top + next) * 2f64.powf(e as f64 - 64.0);
                if sign == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
            _ => 0.0,
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".into();
        }
        let p = self.precision() + 64;
        let a = self.abs().with_precision(p);
        let approx = a.to_f64();
        let mut e10 = if approx > 0.0 && approx.is_finite() {
            approx.log10().floor() as i64
        } else {
            let l2 = a.try_ln().map(|l| l.to_f64()).unwrap_or(0.0) / std::f64::consts::LN_10;
            l2.floor() as i64
        };
        let ten = BigFloat::from_i64(10, p);
        let scaled_int = |e10: i64| -> BigInt {
            let shift = digits as i64 - 1 - e10;
            let s = if shift >= 0 {
                &a * &ten.powi(shift as usize)
            } else {
                a.try_div(&ten.powi((-shift) as usize)).expect("nonzero")
            };
            s.round_to_integer()
        };
        let mut m = scaled_int(e10);
        let lim = BigInt::from(10u32).pow(digits as u32);
        if m >= lim {
            e10 += 1;
            m = scaled_int(e10);
        } else if m < BigInt::from(10u32).pow(digits as u32 - 1) {
            e10 -= 1;
            m = scaled_int(e10);
        }
        let s = m.to_string();
        let (head, tail) = s.split_at(1);
        let tail = tail.trim_end_matches('0');
        let sign = if self.is_negative() { "-" } else { "" };
        let mant = if tail.is_empty() {
            head.to_string()
        } else {
            format!("{head}.{tail}")
        };
        if e10 == 0 {
            format!("{sign}{mant}")
        } else {
            format!("{sign}{mant}e{e10}")
        }
    }

    /// Parse a decimal literal such as `0.125`, `-3`, `1e-10`.
    pub fn parse_decimal(s: &str, prec: usize) -> Result<Self> {
        let bad = || Error::Numeric(format!("invalid decimal literal `{s}`"));
        let t = s.trim();
        let (mant, exp) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
            None => (t, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (ip, fp) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if ip.is_empty() && fp.is_empty() {
            return Err(bad());
        }
        if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{ip}{fp}0").parse::<BigInt>().map_err(|_| bad())? / 10;
        let e = exp - fp.len() as i64;
        let ten = BigInt::from(10u32);
        let mut r = if e >= 0 {
            Rat::from_integer(digits * ten.pow(e as u32))
        } else {
            Rat::new(digits, ten.pow((-e) as u32))
        };
        if neg {
            r = -r;
        }
        Ok(Self::from_rat(&r, prec))
    }
}

impl Default for BigFloat {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            _ => self.0.partial_cmp(&other.0),
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(((self.precision() as f64) * std::f64::consts::LOG10_2) as usize);
        f.write_str(&self.to_decimal(digits))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_decimal(24))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr<&BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: &BigFloat) -> BigFloat {
                let p = self.op_prec(rhs);
                BigFloat::wrap_op(self.0.$inner(&rhs.0, p, RM), stringify!($m))
            }
        }
        impl $tr<BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: &BigFloat) -> BigFloat {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigFloat> for &BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(astro_float::BigFloat::neg(&self.0))
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(astro_float::BigFloat::neg(&self.0))
    }
}

impl From<&BigFloat> for f64 {
    fn from(v: &BigFloat) -> f64 {
        v.to_f64()
    }
}

impl ToPrimitive for BigFloat {
    fn to_i64(&self) -> Option<i64> {
        self.round_to_integer().to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.round_to_integer().to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(BigFloat::to_f64(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn rational_round_trip() {
        let r = rat(-7, 3);
        let x = BigFloat::from_rat(&r, 256);
        let back = &x * &BigFloat::from_i64(3, 256);
        assert!((back + BigFloat::from_i64(7, 64)).abs() < BigFloat::from_f64(1e-70, 64).unwrap());
        assert_eq!(BigFloat::from_rat(&rat(5, 8), 64).to_rat(), rat(5, 8));
    }

    #[test]
    fn big_integers_convert_exactly() {
        let n: BigInt = "123456789012345678901234567890123".parse().unwrap();
        let x = BigFloat::from_bigint(&n, 256);
        assert_eq!(x.round_to_integer(), n);
        assert_eq!(BigFloat::from_bigint(&-n.clone(), 256).round_to_integer(), -n);
    }

    #[test]
    fn sqrt_and_pi() {
        let two = BigFloat::from_i64(2, 256);
        let s = two.sqrt();
        assert!((&s * &s - &two).abs() < BigFloat::from_f64(1e-75, 64).unwrap());
        assert!(BigFloat::pi(256).to_decimal(20).starts_with("3.141592653589793238"));
        assert!(BigFloat::from_i64(-1, 64).try_sqrt().is_err());
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(BigFloat::from_rat(&rat(1, 8), 128).to_decimal(10), "1.25e-1");
        assert_eq!(BigFloat::from_i64(-12, 128).to_decimal(5), "-1.2e1");
        assert_eq!(BigFloat::from_i64(3, 128).to_decimal(5), "3");
        let x = BigFloat::parse_decimal("0.333333333333333333333", 256).unwrap();
        assert_eq!(x.to_decimal(6), "3.33333e-1");
        assert_eq!(BigFloat::parse_decimal("1e-10", 128).unwrap().to_decimal(3), "1e-10");
        assert!(BigFloat::parse_decimal("abc", 64).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(BigFloat::from_f64(f64::NAN, 64).is_err());
        assert!(BigFloat::one().try_div(&BigFloat::zero()).is_err());
    }

    #[test]
    fn precision_follows_operands() {
        let a = BigFloat::from_i64(1, 128);
        let b = BigFloat::from_i64(3, 512);
        assert_eq!((&a / &b).precision(), 512);
        assert_eq!(BigFloat::zero().precision(), MIN_PRECISION);
    }
}
