//! Kernel method for linear equations and their square-root singularity.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::equation::{EquationClass, LinearDecomposition};
use crate::error::{Error, Result};
use crate::extrapolate::{coefficient_asymptotics, series_precision, AsymptoticForm};
use crate::fixedpoint::{Fold, PolySystem};
use crate::numeric::{BigFloat, FloatRing, Rat, RatRing};
use crate::poly::{MultiPoly, Var};
use crate::puiseux::{self, TFit};
use crate::report::ser_float;
use crate::series::UniSeries;

/// `u = z*Q2 + z*u*Q1` with observable `Q0(z,u) / (1 - z*Q1(z,u))`.
pub fn kernel_system(dec: &LinearDecomposition) -> PolySystem {
    let z = MultiPoly::var(Var::Z);
    let u = MultiPoly::var(Var::U);
    let g = &(&z * &dec.q2) + &(&(&z * &u) * &dec.q1);
    let den = &MultiPoly::one() - &(&z * &dec.q1);
    PolySystem::new(vec![Var::U], vec![g], dec.q0.clone(), den)
}

/// A rational function of `z` (and possibly `x`).
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalForm {
    /// Exact series at `x = 1`.
    pub fn series(&self, n: usize) -> Result<UniSeries<Rat>> {
        let ring = RatRing::default();
        let expand = |p: &MultiPoly| {
            let mut c = vec![<Rat as Zero>::zero(); n];
            for (e, v) in p.terms() {
                let k = e[Var::Z.index()] as usize;
                if k < n {
                    c[k] += crate::numeric::Ring::term(&ring, v, e[Var::X.index()]);
                }
            }
            UniSeries::new(c)
        };
        expand(&self.num).div(&expand(&self.den))
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl Serialize for RationalForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RationalForm", 2)?;
        st.serialize_field("numerator", &self.num.to_string())?;
        st.serialize_field("denominator", &self.den.to_string())?;
        st.end()
    }
}

#[derive(Clone, Debug)]
pub struct KernelSolution {
    pub class: EquationClass,
    pub u_series: UniSeries<Rat>,
    pub m0_formula: UniSeries<Rat>,
    pub rational_form: Option<RationalForm>,
}

pub fn kernel_solve(dec: &LinearDecomposition, class: EquationClass, n: usize) -> Result<KernelSolution> {
    if !matches!(
        class,
        EquationClass::LinearDegenerate1
            | EquationClass::LinearDegenerate2
            | EquationClass::LinearDegenerate3
            | EquationClass::LinearGeneric
    ) {
        return Err(Error::NotApplicable(format!("kernel method on a {} equation", class.as_str())));
    }
    let sys = kernel_system(dec);
    let ring = RatRing::default();
    let u = sys.series_in(&ring, n)?;
    let m0 = sys.observable_series(&ring, &u)?;
    let rational_form = match class {
        EquationClass::LinearDegenerate1 => Some(reduce(dec.q0.clone(), &MultiPoly::one() - &z_times(&dec.q1))),
        EquationClass::LinearDegenerate2 => Some(degenerate2(dec)),
        EquationClass::LinearDegenerate3 => {
            let at0 = |p: &MultiPoly| p.eval_partial(&[(Var::U, <Rat as Zero>::zero())]);
            Some(reduce(at0(&dec.q0), &MultiPoly::one() - &z_times(&at0(&dec.q1))))
        }
        _ => None,
    };
    Ok(KernelSolution { class, u_series: u.into_iter().next().unwrap(), m0_formula: m0, rational_form })
}

fn z_times(p: &MultiPoly) -> MultiPoly {
    p.mul_var_pow(Var::Z, 1)
}

/// `Q1` free of `u`, `Q2 = T0 + u T1`: `u = z T0 / (1 - z Q1 - z T1)`.
fn degenerate2(dec: &LinearDecomposition) -> RationalForm {
    let t0 = dec.q2.coefficient(Var::U, 0);
    let t1 = dec.q2.coefficient(Var::U, 1);
    let nu = z_times(&t0);
    let du = &(&MultiPoly::one() - &z_times(&dec.q1)) - &z_times(&t1);
    let d = dec.q0.degree(Var::U).unwrap_or(0);
    let mut num = MultiPoly::zero();
    for j in 0..=d {
        let qj = dec.q0.coefficient(Var::U, j);
        if qj.is_zero() {
            continue;
        }
        num = &num + &(&(&qj * &nu.pow(j)) * &du.pow(d - j));
    }
    let den = &du.pow(d) * &(&MultiPoly::one() - &z_times(&dec.q1));
    reduce(num, den)
}

fn univariate(p: &MultiPoly) -> Option<Vec<Rat>> {
    let mut c: Vec<Rat> = Vec::new();
    for (e, v) in p.terms() {
        if Var::ALL.iter().any(|&w| w != Var::Z && e[w.index()] > 0) {
            return None;
        }
        let k = e[Var::Z.index()] as usize;
        if c.len() <= k {
            c.resize(k + 1, <Rat as Zero>::zero());
        }
        c[k] = v.clone();
    }
    Some(c)
}

fn from_univariate(c: &[Rat]) -> MultiPoly {
    let mut p = MultiPoly::zero();
    for (k, v) in c.iter().enumerate() {
        if !v.is_zero() {
            let mut e = [0; 5];
            e[Var::Z.index()] = k as u32;
            p.add_term(e, v.clone());
        }
    }
    p
}

fn trim(mut c: Vec<Rat>) -> Vec<Rat> {
    while c.last().is_some_and(|v| v.is_zero()) {
        c.pop();
    }
    c
}

/// Quotient and remainder of univariate polynomials, lowest degree first.
fn divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut q = vec![<Rat as Zero>::zero(); r.len() - b.len() + 1];
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &f * bi;
        }
        q[shift] = f;
        r = trim(r);
    }
    (q, r)
}

fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Cancel common factors (when the form is univariate) and normalize `den(0) = 1`.
fn reduce(num: MultiPoly, den: MultiPoly) -> RationalForm {
    let (Some(n), Some(d)) = (univariate(&num), univariate(&den)) else {
        return RationalForm { num, den };
    };
    let g = poly_gcd(&n, &d);
    let (mut n, mut d) = if g.len() > 1 { (divmod(&n, &g).0, divmod(&d, &g).0) } else { (n, d) };
    let scale = d.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(<Rat as One>::one);
    if !d.is_empty() && !d[0].is_zero() {
        let s = d[0].clone();
        n.iter_mut().for_each(|c| *c /= &s);
        d.iter_mut().for_each(|c| *c /= &s);
    } else {
        n.iter_mut().for_each(|c| *c /= &scale);
        d.iter_mut().for_each(|c| *c /= &scale);
    }
    RationalForm { num: from_univariate(&n), den: from_univariate(&d) }
}

/// Outcome of [`kernel_identity_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelIdentity {
    /// First index where `K(z, u(z))` is nonzero.
    pub kernel_mismatch: Option<usize>,
    /// First index where the formula and the engine's `M(z,0)` differ.
    pub m0_mismatch: Option<usize>,
}

impl KernelIdentity {
    pub fn holds(&self) -> bool {
        self.kernel_mismatch.is_none() && self.m0_mismatch.is_none()
    }
}

pub fn kernel_identity_check(dec: &LinearDecomposition, u: &UniSeries<Rat>, m0_formula: &UniSeries<Rat>, engine_m0: &UniSeries<Rat>) -> KernelIdentity {
    let sys = PolySystem::new(vec![Var::U], vec![dec.kernel()], MultiPoly::zero(), MultiPoly::one());
    let k = crate::fixedpoint::eval_series(sys.rhs(0), sys.vars(), &RatRing::default(), std::slice::from_ref(u));
    let kernel_mismatch = k.coeffs().iter().position(|c| !c.is_zero());
    KernelIdentity { kernel_mismatch, m0_mismatch: m0_formula.first_difference(engine_m0) }
}

/// `(z0, u0)` with diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct LinearCriticalPoint {
    #[serde(serialize_with = "ser_float")]
    pub z0: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub u0: BigFloat,
    /// `1 - G_u(z0, u0)`.
    #[serde(serialize_with = "ser_float")]
    pub det_residual: BigFloat,
    /// `|u0 - G(z0, u0)|`.
    #[serde(serialize_with = "ser_float")]
    pub residual: BigFloat,
}

pub fn linear_critical_point(dec: &LinearDecomposition, class: EquationClass, prec: usize) -> Result<(LinearCriticalPoint, Fold)> {
    if class != EquationClass::LinearGeneric {
        return Err(Error::NotApplicable(format!("no square-root singularity for a {} equation", class.as_str())));
    }
    let sys = kernel_system(dec);
    let ns = sys.compile(prec, &BigFloat::one().with_precision(prec));
    let fold = ns.find_fold()?;
    let cp = LinearCriticalPoint {
        z0: fold.z0.clone(),
        u0: fold.y[0].clone(),
        det_residual: fold.det.clone(),
        residual: fold.residual.clone(),
    };
    Ok((cp, fold))
}

/// `M(z,0) = a0 + a1 t + a2 t^2 + ...` with `t^2 = 1 - z/z0`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearExpansion {
    #[serde(serialize_with = "ser_float")]
    pub a0: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub a1: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub a2: BigFloat,
    pub fit: TFit,
}

/// Floating `M(z,0)` coefficients through the kernel root series.
pub fn m0_float_series(dec: &LinearDecomposition, n: usize, prec: usize) -> Result<Vec<BigFloat>> {
    let sys = kernel_system(dec);
    let ring = FloatRing::new(prec);
    let u = sys.series_in(&ring, n)?;
    Ok(sys.observable_series(&ring, &u)?.into_coeffs())
}

/// Local expansion of `M(z,0)` fitted on the kernel branch.
pub fn linear_expansion(dec: &LinearDecomposition, fold: &Fold, prec: usize) -> Result<LinearExpansion> {
    let sys = kernel_system(dec);
    let ns = sys.compile(prec, &BigFloat::one().with_precision(prec));
    let samples = puiseux::sample_branch(&ns, &fold.z0)?;
    let fit = puiseux::fit(&samples.t, &samples.observable, puiseux::FIT_DEGREE)?;
    let t_max = samples.t.last().unwrap().clone();
    puiseux::check_fit(&fit, &t_max, 1, &fit.coeffs[0])?;
    let (a0, a1, a2) = (fit.coeffs[0].clone(), fit.coeffs[1].clone(), fit.coeffs[2].clone());
    Ok(LinearExpansion { a0, a1, a2, fit })
}

/// `c_j` from `n_max` floating coefficients, with the transfer constant `-a1 / (2 sqrt(pi))`.
pub fn linear_asymptotics(
    dec: &LinearDecomposition,
    fold: &Fold,
    expansion: &LinearExpansion,
    n_max: usize,
    prec: usize,
) -> Result<AsymptoticForm> {
    let coeffs = m0_float_series(dec, n_max + 1, series_precision(prec))?;
    coefficient_asymptotics(&coeffs, &fold.z0, 3, &expansion.a1, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::{classify, CatalyticEquation};
    use crate::numeric::int;

    fn dec_of(text: &str) -> (LinearDecomposition, EquationClass) {
        let eq = CatalyticEquation::parse(text).unwrap();
        let c = classify(&eq);
        (c.decomposition.unwrap(), c.class)
    }

    #[test]
    fn start_height_rational_form() {
        for k0 in 1..=3u32 {
            let (dec, class) = dec_of(&format!("M = u^{k0} + z^2*M + z*D"));
            assert_eq!(class, EquationClass::LinearDegenerate2);
            let sol = kernel_solve(&dec, class, 30).unwrap();
            let rf = sol.rational_form.unwrap();
            let z = MultiPoly::var(Var::Z);
            assert_eq!(rf.num, z.pow(k0));
            let one_minus = &MultiPoly::one() - &(&z * &z);
            assert_eq!(rf.den, one_minus.pow(k0 + 1));
            assert_eq!(rf.series(30).unwrap(), sol.m0_formula);
        }
    }

    #[test]
    fn u_factor_in_q2_gives_zero_root() {
        let (dec, class) = dec_of("M = 1 + z*(z+u)*M + z*u*D");
        assert_eq!(class, EquationClass::LinearDegenerate3);
        let sol = kernel_solve(&dec, class, 12).unwrap();
        assert!(sol.u_series.coeffs().iter().all(|c| c.is_zero()));
        let rf = sol.rational_form.unwrap();
        assert_eq!(rf.num, MultiPoly::one());
        let z = MultiPoly::var(Var::Z);
        assert_eq!(rf.den, &MultiPoly::one() - &(&z * &z));
        assert_eq!(sol.m0_formula.coeff(4), &int(1));
        assert_eq!(sol.m0_formula.coeff(5), &int(0));
    }

    #[test]
    fn gcd_cancels_common_factor() {
        let z = MultiPoly::var(Var::Z);
        let f = &MultiPoly::one() - &z;
        let rf = reduce(&f * &f, &f * &(&MultiPoly::one() + &z));
        assert_eq!(rf.num, f);
        assert_eq!(rf.den, &MultiPoly::one() + &z);
    }
}
