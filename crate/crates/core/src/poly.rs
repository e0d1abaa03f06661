//! Sparse polynomials over the rationals in `M, D, z, u, x`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::numeric::{binomial, BigFloat, Coefficient, Rat};

/// Polynomial variables. `A0` stands for `M` and `A1` for the divided difference `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    A0,
    A1,
    Z,
    U,
    X,
}

impl Var {
    pub const ALL: [Var; 5] = [Var::A0, Var::A1, Var::Z, Var::U, Var::X];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name used by the equation language.
    pub fn name(self) -> &'static str {
        match self {
            Var::A0 => "M",
            Var::A1 => "D",
            Var::Z => "z",
            Var::U => "u",
            Var::X => "x",
        }
    }
}

pub type Exps = [u32; 5];

#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct MultiPoly {
    terms: BTreeMap<Exps, Rat>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, [0; 5])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 5];
        e[v.index()] = 1;
        Self::monomial(Rat::one(), e)
    }

    pub fn monomial(c: Rat, e: Exps) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// Accumulates `c * e`, dropping the entry if it cancels.
    pub fn add_term(&mut self, e: Exps, c: Rat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exps) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&[0; 5])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == [0; 5])
    }

    pub fn degree(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v.index()]).max()
    }

    pub fn min_degree(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v.index()]).min()
    }

    /// Largest combined degree in the given variables.
    pub fn total_degree(&self, vars: &[Var]) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| vars.iter().map(|v| e[v.index()]).sum())
            .max()
    }

    pub fn is_free_of(&self, v: Var) -> bool {
        self.terms.keys().all(|e| e[v.index()] == 0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        !self.is_free_of(v)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact formal partial derivative.
    pub fn partial(&self, v: Var) -> Self {
        let i = v.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = *e;
            f[i] -= 1;
            out.add_term(f, c * Rat::from_integer(e[i].into()));
        }
        out
    }

    /// Terms of degree exactly `d` in `v`, with `v` removed.
    pub fn coefficient(&self, v: Var, d: u32) -> Self {
        let i = v.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == d {
                let mut f = *e;
                f[i] = 0;
                out.add_term(f, c.clone());
            }
        }
        out
    }

    /// Exact division by `v^k`; `None` if some term has lower degree.
    pub fn div_var_pow(&self, v: Var, k: u32) -> Option<Self> {
        let i = v.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] < k {
                return None;
            }
            let mut f = *e;
            f[i] -= k;
            out.add_term(f, c.clone());
        }
        Some(out)
    }

    pub fn mul_var_pow(&self, v: Var, k: u32) -> Self {
        let i = v.index();
        MultiPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    f[i] += k;
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Replace `v` by the polynomial `q`.
    pub fn substitute(&self, v: Var, q: &MultiPoly) -> Self {
        let i = v.index();
        let maxd = self.degree(v).unwrap_or(0) as usize;
        let mut powers = vec![Self::one()];
        for k in 1..=maxd {
            let next = &powers[k - 1] * q;
            powers.push(next);
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut f = *e;
            let d = f[i] as usize;
            f[i] = 0;
            let rest = Self::monomial(c.clone(), f);
            out = out + &rest * &powers[d];
        }
        out
    }

    /// Substitute `v -> v + c` by binomial expansion.
    pub fn shift(&self, v: Var, c: &Rat) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let i = v.index();
        let mut out = Self::zero();
        for (e, coef) in &self.terms {
            let d = e[i];
            let mut cpow = Rat::one();
            for j in (0..=d).rev() {
                // coefficient of v^j in (v + c)^d is C(d, j) c^(d-j)
                let mut f = *e;
                f[i] = j;
                out.add_term(f, coef * Rat::from_integer(binomial(d, j)) * &cpow);
                cpow *= c;
            }
        }
        out
    }

    pub fn shift_u(&self, c: &Rat) -> Self {
        self.shift(Var::U, c)
    }

    /// Substitute rational values for some variables (others unchanged).
    pub fn eval_partial(&self, assignment: &[(Var, Rat)]) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut f = *e;
            let mut coef = c.clone();
            for (v, val) in assignment {
                let d = f[v.index()];
                if d > 0 {
                    coef *= num_traits::pow(val.clone(), d as usize);
                    f[v.index()] = 0;
                }
            }
            out.add_term(f, coef);
        }
        out
    }

    pub fn eval_rat(&self, point: &[Rat; 5]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, d) in e.iter().enumerate() {
                if *d > 0 {
                    t *= num_traits::pow(point[k].clone(), *d as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluation with coefficients and point in any coefficient ring.
    pub fn eval_in<C: Coefficient>(&self, point: &[C; 5]) -> C {
        let mut pows: Vec<Vec<C>> = Vec::with_capacity(5);
        for (k, v) in Var::ALL.iter().enumerate() {
            let maxd = self.degree(*v).unwrap_or(0) as usize;
            let mut row = vec![C::one_elem()];
            for d in 1..=maxd {
                let next = row[d - 1].times(&point[k]);
                row.push(next);
            }
            pows.push(row);
        }
        let mut acc = C::zero_elem();
        for (e, c) in &self.terms {
            let mut t = C::one_elem().scale_rat(c);
            for (k, d) in e.iter().enumerate() {
                if *d > 0 {
                    t = t.times(&pows[k][*d as usize]);
                }
            }
            acc = acc.plus(&t);
        }
        acc
    }

    pub fn compile(&self, prec: usize) -> CompiledPoly {
        CompiledPoly::new(self, prec)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

/// Prints in the equation language, e.g. `1 + 2*z*u^2*M - 1/2*D`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // z and u first reads more naturally than the internal ordering
        let order = [Var::Z, Var::U, Var::X, Var::A0, Var::A1];
        let mut keys: Vec<&Exps> = self.terms.keys().collect();
        keys.sort_by_key(|e| order.map(|v| e[v.index()]));
        for (idx, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mut factors = Vec::new();
            for v in order {
                let d = e[v.index()];
                match d {
                    0 => {}
                    1 => factors.push(v.name().to_string()),
                    _ => factors.push(format!("{}^{}", v.name(), d)),
                }
            }
            let cs = crate::numeric::rat_to_string(&a);
            if factors.is_empty() {
                f.write_str(&cs)?;
            } else if a.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{}*{}", cs, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for k in 0..5 {
                    e[k] += eb[k];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rat::one())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                self.$m(&rhs)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// A polynomial with coefficients pre-rounded for repeated floating evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(BigFloat, Exps)>,
    maxdeg: [u32; 5],
}

impl CompiledPoly {
    pub fn new(p: &MultiPoly, prec: usize) -> Self {
        let mut maxdeg = [0; 5];
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| {
                for k in 0..5 {
                    maxdeg[k] = maxdeg[k].max(e[k]);
                }
                (BigFloat::from_rat(c, prec), *e)
            })
            .collect();
        CompiledPoly { terms, maxdeg }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, point: &[BigFloat; 5]) -> BigFloat {
        let prec = point.iter().map(|p| p.precision()).max().unwrap_or(64);
        let mut pows: [Vec<BigFloat>; 5] = Default::default();
        for k in 0..5 {
            let mut row = vec![BigFloat::one().with_precision(prec)];
            for d in 1..=self.maxdeg[k] as usize {
                let next = &row[d - 1] * &point[k];
                row.push(next);
            }
            pows[k] = row;
        }
        let mut acc = BigFloat::zero().with_precision(prec);
        for (c, e) in &self.terms {
            let mut t = c.clone();
            for k in 0..5 {
                if e[k] > 0 {
                    t = &t * &pows[k][e[k] as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    fn v(x: Var) -> MultiPoly {
        MultiPoly::var(x)
    }

    #[test]
    fn shift_expands_binomially() {
        let p = v(Var::U).pow(2);
        let s = p.shift_u(&int(1));
        assert_eq!(s, v(Var::U).pow(2) + v(Var::U).scale(&int(2)) + MultiPoly::one());
        assert_eq!(s.shift_u(&int(-1)), p);
    }

    #[test]
    fn partial_derivatives() {
        let u1 = v(Var::U) + MultiPoly::one();
        let p = &u1.pow(2) * &v(Var::A0).pow(2);
        assert_eq!(p.partial(Var::A0), (&u1.pow(2) * &v(Var::A0)).scale(&int(2)));
        assert!(p.partial(Var::X).is_zero());
    }

    #[test]
    fn substitution_and_coefficients() {
        let p = v(Var::Z) * v(Var::U) + v(Var::U).pow(3);
        let q = p.substitute(Var::U, &(v(Var::Z) + MultiPoly::one()));
        assert_eq!(q.eval_rat(&[int(0), int(0), int(2), int(0), int(0)]), int(2 * 3 + 27));
        assert_eq!(p.coefficient(Var::U, 1), v(Var::Z));
        assert_eq!(p.div_var_pow(Var::U, 1).unwrap(), v(Var::Z) + v(Var::U).pow(2));
        assert!(p.div_var_pow(Var::Z, 1).is_none());
    }

    #[test]
    fn display_uses_equation_names() {
        let p = MultiPoly::one() + (v(Var::Z) * v(Var::A0).pow(2)).scale(&rat(-3, 2));
        assert_eq!(p.to_string(), "1 - 3/2*z*M^2");
        assert_eq!(MultiPoly::zero().to_string(), "0");
    }

    #[test]
    fn compiled_evaluation_matches_exact() {
        let p = (v(Var::Z) + v(Var::U).scale(&rat(1, 3))).pow(3);
        let pt = [int(0), int(0), rat(1, 2), rat(3, 4), int(0)];
        let exact = p.eval_rat(&pt);
        let fp = pt.clone().map(|r| BigFloat::from_rat(&r, 128));
        let got = p.compile(128).eval(&fp);
        let err = (got - BigFloat::from_rat(&exact, 128)).abs();
        assert!(err < BigFloat::from_f64(1e-35, 64).unwrap());
        assert_eq!(p.eval_in(&pt), exact);
    }
}
