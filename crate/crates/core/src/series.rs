//! Truncated power series in `z` and in `(z, u)`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{binomial, rat_powers, BigFloat, Coefficient, Field, Rat};
use crate::poly::{MultiPoly, Var};

/// Coefficients `c_0 .. c_{N-1}` of a series in `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniSeries<C> {
    coeffs: Vec<C>,
}

impl<C: Coefficient> UniSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        UniSeries { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        UniSeries { coeffs: vec![C::zero_elem(); n] }
    }

    /// Truncation order (exclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn truncated(&self, n: usize) -> Self {
        UniSeries { coeffs: self.coeffs[..n.min(self.order())].to_vec() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        UniSeries { coeffs: (0..n).map(|i| self.coeffs[i].plus(&rhs.coeffs[i])).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        UniSeries { coeffs: (0..n).map(|i| self.coeffs[i].minus(&rhs.coeffs[i])).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let mut out = vec![C::zero_elem(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero_elem() {
                continue;
            }
            for j in 0..n - i {
                out[i + j].add_product(a, &rhs.coeffs[j]);
            }
        }
        UniSeries { coeffs: out }
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> UniSeries<D> {
        UniSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Multiplication by `z^k`, keeping the order.
    pub fn shift_z(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![C::zero_elem(); n];
        for i in k..n {
            coeffs[i] = self.coeffs[i - k].clone();
        }
        UniSeries { coeffs }
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.times(c))
    }

    /// Index of the first coefficient that differs, if any.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..n).find(|&i| self.coeffs[i] != other.coeffs[i])
    }
}

impl<C: Field> UniSeries<C> {
    /// `self / rhs`; fails when the constant term of `rhs` is not invertible.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let n = self.order().min(rhs.order());
        if n == 0 {
            return Ok(UniSeries { coeffs: vec![] });
        }
        let inv = rhs.coeffs[0]
            .inverse()
            .ok_or_else(|| Error::Numeric("series division by a non-unit".into()))?;
        let mut out: Vec<C> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.coeffs[i].clone();
            for j in 1..=i {
                if !rhs.coeffs[j].is_zero_elem() {
                    acc = acc.minus(&rhs.coeffs[j].times(&out[i - j]));
                }
            }
            out.push(acc.times(&inv));
        }
        Ok(UniSeries { coeffs: out })
    }
}

/// Dense coefficient grid `c[n][k]` of a series in `z` (rows) and `u` (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<C> {
    rows: Vec<Vec<C>>,
    n_u: usize,
}

impl<C: Coefficient> BiSeries<C> {
    pub fn from_fn(n_z: usize, n_u: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        BiSeries { rows: (0..n_z).map(|n| (0..n_u).map(|k| f(n, k)).collect()).collect(), n_u }
    }

    pub fn zeros(n_z: usize, n_u: usize) -> Self {
        Self::from_fn(n_z, n_u, |_, _| C::zero_elem())
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let n_u = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == n_u), "ragged BiSeries rows");
        BiSeries { rows, n_u }
    }

    /// `(N_z, N_u)`.
    pub fn order(&self) -> (usize, usize) {
        (self.rows.len(), self.n_u)
    }

    pub fn get(&self, n: usize, k: usize) -> &C {
        &self.rows[n][k]
    }

    pub fn row(&self, n: usize) -> &[C] {
        &self.rows[n]
    }

    pub fn truncated(&self, n_z: usize, n_u: usize) -> Self {
        let n_u = n_u.min(self.n_u);
        BiSeries {
            rows: self.rows.iter().take(n_z).map(|r| r[..n_u].to_vec()).collect(),
            n_u,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (nz, nu) = min_order(self, rhs);
        Self::from_fn(nz, nu, |n, k| self.rows[n][k].plus(&rhs.rows[n][k]))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let (nz, nu) = min_order(self, rhs);
        Self::from_fn(nz, nu, |n, k| self.rows[n][k].minus(&rhs.rows[n][k]))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (nz, nu) = min_order(self, rhs);
        let mut out = Self::zeros(nz, nu);
        for i in 0..nz {
            for j in 0..nu {
                let a = &self.rows[i][j];
                if a.is_zero_elem() {
                    continue;
                }
                for n in i..nz {
                    let r = &rhs.rows[n - i];
                    for k in j..nu {
                        out.rows[n][k].add_product(a, &r[k - j]);
                    }
                }
            }
        }
        out
    }

    /// `(s(z,u) - s(z,0)) / u`, with u-order reduced by one.
    pub fn divided_difference(&self) -> Self {
        let nu = self.n_u.saturating_sub(1);
        Self::from_fn(self.rows.len(), nu, |n, k| self.rows[n][k + 1].clone())
    }

    /// Substitute `u -> u + c`, treating each row as a polynomial of degree `< N_u`.
    ///
    /// Exact whenever the rows really are polynomials of that degree, which is
    /// the case for series built from polynomials.
    pub fn shift_u(&self, c: &Rat) -> Self {
        let nu = self.n_u;
        let cp = rat_powers(c, nu);
        Self::from_fn(self.rows.len(), nu, |n, k| {
            let mut acc = C::zero_elem();
            for j in k..nu {
                let a = &self.rows[n][j];
                if a.is_zero_elem() {
                    continue;
                }
                let w = Rat::from_integer(binomial(j as u32, k as u32)) * &cp[j - k];
                acc = acc.plus(&a.scale_rat(&w));
            }
            acc
        })
    }

    /// The row `s(z, 0)`.
    pub fn u_constant(&self) -> UniSeries<C> {
        UniSeries::new(self.rows.iter().map(|r| r[0].clone()).collect())
    }

    /// Row sums `sum_k c[n][k] * u0^k` over the stored columns.
    pub fn eval_u(&self, u0: &Rat) -> UniSeries<C> {
        let p = rat_powers(u0, self.n_u);
        UniSeries::new(
            self.rows
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(&p)
                        .filter(|(c, w)| !c.is_zero_elem() && !Zero::is_zero(*w))
                        .fold(C::zero_elem(), |acc, (c, w)| acc.plus(&c.scale_rat(w)))
                })
                .collect(),
        )
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> BiSeries<D> {
        BiSeries {
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
            n_u: self.n_u,
        }
    }
}

impl BiSeries<Rat> {
    /// Coefficients of a polynomial in `z, u` (other variables must be absent).
    pub fn from_poly(p: &MultiPoly, n_z: usize, n_u: usize) -> Self {
        let mut s = Self::zeros(n_z, n_u);
        for (e, c) in p.terms() {
            assert!(
                e[Var::A0.index()] == 0 && e[Var::A1.index()] == 0 && e[Var::X.index()] == 0,
                "from_poly needs a polynomial in z and u"
            );
            let (n, k) = (e[Var::Z.index()] as usize, e[Var::U.index()] as usize);
            if n < n_z && k < n_u {
                s.rows[n][k] += c;
            }
        }
        s
    }
}

fn min_order<C: Coefficient>(a: &BiSeries<C>, b: &BiSeries<C>) -> (usize, usize) {
    let (az, au) = a.order();
    let (bz, bu) = b.order();
    (az.min(bz), au.min(bu))
}

/// Conversion of exact or floating coefficients for numeric evaluation.
pub trait ToFloat {
    fn to_float(&self, prec: usize) -> BigFloat;
}

impl ToFloat for Rat {
    fn to_float(&self, prec: usize) -> BigFloat {
        BigFloat::from_rat(self, prec)
    }
}

impl ToFloat for BigFloat {
    fn to_float(&self, prec: usize) -> BigFloat {
        self.with_precision(prec)
    }
}

/// Result of [`eval_numeric`].
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: BigFloat,
    /// Estimated size of the neglected terms `sum_{n >= N} c_n z^n`.
    pub tail: BigFloat,
}

/// Horner evaluation at `z` with `|z| < bound`, the caller's bound on the radius.
///
/// The tail estimate is the geometric continuation of the last stored term
/// with ratio `|z| / bound`. Fails with `PRECISION_UNDERFLOW` when that tail is
/// not smaller than the value itself, i.e. no significant bits survive.
pub fn eval_numeric<C: Coefficient + ToFloat>(
    s: &UniSeries<C>,
    z: &BigFloat,
    bound: &BigFloat,
) -> Result<Evaluation> {
    let prec = z.precision();
    let az = z.abs();
    if az >= bound.abs() {
        return Err(Error::NotApplicable(format!(
            "|z| = {} is not below the bound {}",
            az.to_decimal(12),
            bound.to_decimal(12)
        )));
    }
    let zero = BigFloat::zero().with_precision(prec);
    if s.order() == 0 {
        return Ok(Evaluation { value: zero.clone(), tail: zero });
    }
    let value = s
        .coeffs()
        .iter()
        .rev()
        .fold(zero.clone(), |acc, c| &(&acc * z) + &c.to_float(prec));
    let tail = if az.is_zero() {
        zero
    } else {
        let last = s.coeffs().iter().rposition(|c| !c.is_zero_elem());
        match last {
            None => zero,
            Some(i) => {
                let ratio = &az / &bound.abs();
                let one = BigFloat::one().with_precision(prec);
                let lead = s.coeff(i).to_float(prec).abs() * az.powi(i);
                let steps = s.order() - i;
                &(&lead * &ratio.powi(steps)) / &(&one - &ratio)
            }
        }
    };
    if !value.is_zero() && tail >= value.abs() {
        return Err(Error::PrecisionUnderflow(format!(
            "truncation tail {} dominates the value {}",
            tail.to_decimal(6),
            value.to_decimal(6)
        )));
    }
    Ok(Evaluation { value, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};
    use num_traits::One;

    fn uni(v: &[i64]) -> UniSeries<Rat> {
        UniSeries::new(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn product_of_series() {
        let a = BiSeries::from_rows(vec![vec![int(1)], vec![int(1)], vec![int(0)]]);
        let b = BiSeries::from_rows(vec![vec![int(1)], vec![int(-1)], vec![int(0)]]);
        let p = a.mul(&b);
        assert_eq!(p.u_constant(), uni(&[1, 0, -1]));
        assert!(a.mul(&BiSeries::zeros(3, 1)).u_constant().coeffs().iter().all(|c| c.is_zero_elem()));
        let g = uni(&[1; 10]);
        assert_eq!(g.mul(&g), uni(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
    }

    #[test]
    fn divided_difference_examples() {
        let u = |k: usize| BiSeries::from_fn(3, 4, move |n, j| if n == 0 && j == k { int(1) } else { int(0) });
        assert_eq!(u(2).divided_difference(), u(1).truncated(3, 3));
        assert_eq!(u(0).divided_difference(), BiSeries::zeros(3, 3));
    }

    #[test]
    fn shift_round_trip() {
        let s = BiSeries::from_fn(4, 4, |n, k| rat((n * 3 + k) as i64 - 5, 1 + k as i64));
        let c = rat(2, 3);
        assert_eq!(s.shift_u(&c).shift_u(&-c.clone()), s);
        let sq = BiSeries::from_fn(1, 3, |_, k| if k == 2 { int(1) } else { int(0) });
        assert_eq!(sq.shift_u(&int(1)).row(0), &[int(1), int(2), int(1)]);
    }

    #[test]
    fn geometric_series_evaluates() {
        let g = UniSeries::new(vec![Rat::one(); 100]);
        let ev = eval_numeric(&g, &BigFloat::from_rat(&rat(1, 2), 256), &BigFloat::one()).unwrap();
        let err = (ev.value - BigFloat::from_i64(2, 256)).abs();
        assert!(err <= BigFloat::from_i64(2, 256).powi(99).recip().unwrap());
        assert!(ev.tail.is_positive());
        let at0 = eval_numeric(&uni(&[7, 1, 2]), &BigFloat::zero(), &BigFloat::one()).unwrap();
        assert_eq!(at0.value, BigFloat::from_i64(7, 64));
        assert!(eval_numeric(&g, &BigFloat::from_i64(2, 64), &BigFloat::one()).is_err());
        let short = UniSeries::new(vec![Rat::one(); 2]);
        let z = BigFloat::from_rat(&rat(99, 100), 128);
        assert!(matches!(eval_numeric(&short, &z, &BigFloat::one()), Err(Error::PrecisionUnderflow(_))));
    }
}
