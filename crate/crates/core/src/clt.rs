//! Limit laws for a parameter marked by `x`.
//!
//! The dominant singularity `rho(x)` of the marked system is followed by
//! Newton continuation in `x` from the fold at `x = 1`. Its first two
//! derivatives come from central differences with Richardson extrapolation,
//! and the exact moments of the first coefficients serve as a cross-check.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::eval_u1_in;
use crate::equation::CatalyticEquation;
use crate::error::{Error, Result};
use crate::extrapolate::{periodicity, Periodicity};
use crate::fixedpoint::{BranchPoint, Fold, PolySystem};
use crate::numeric::{rat, BigFloat, JetRing, Rat};
use crate::report::{ser_float, ser_rat};

/// Largest continuation step in `x`.
const X_STEP: f64 = 0.05;
/// Finite-difference steps, coarsest first.
pub const STENCIL_STEPS: [i64; 3] = [10_000, 100_000, 1_000_000];
/// Grid on which `rho` must decrease.
pub const RHO_GRID: [(i64, i64); 5] = [(4, 5), (9, 10), (1, 1), (11, 10), (6, 5)];
/// Relative disagreement tolerated between successive Richardson estimates.
const STENCIL_TOLERANCE: f64 = 1e-10;
/// Below this `sigma^2` counts as zero.
const DEGENERATE_VARIANCE: f64 = 1e-8;

/// Fold of the system at `x`, continued from `base` (the fold at `x = 1`).
pub fn rho_of_x(sys: &PolySystem, base: &Fold, x: &BigFloat) -> Result<Fold> {
    let prec = base.z0.precision();
    if !x.is_positive() {
        return Err(Error::NotApplicable(format!("x = {} is not positive", x.to_decimal(10))));
    }
    let one = BigFloat::one().with_precision(prec);
    let gap = (x - &one).to_f64();
    let steps = ((gap.abs() / X_STEP).ceil() as usize).max(1);
    let step = &(x - &one) / &BigFloat::from_i64(steps as i64, prec);
    let mut fold = base.clone();
    for k in 1..=steps {
        let xk = if k == steps { x.with_precision(prec) } else { &one + &(&step * &BigFloat::from_i64(k as i64, prec)) };
        let ns = sys.compile(prec, &xk);
        let start = BranchPoint { z: fold.z0.clone(), y: fold.y.clone() };
        fold = ns.extended_newton(&start).map_err(|e| {
            Error::NoConvergence(format!("continuation in x stopped at x = {}: {e}", xk.to_decimal(8)))
        })?;
        if !fold.z0.is_positive() {
            return Err(Error::NoConvergence(format!("continuation in x left z > 0 at x = {}", xk.to_decimal(8))));
        }
    }
    Ok(fold)
}

/// `rho(1)`, `rho'(1)`, `rho''(1)` with error estimates.
#[derive(Clone, Debug, Serialize)]
pub struct RhoDerivatives {
    #[serde(serialize_with = "ser_float")]
    pub rho1: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub d1: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub d1_error: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub d2: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub d2_error: BigFloat,
}

/// Richardson on an `h^2` expansion with step ratio 10, on consecutive pairs.
fn richardson(d: &[BigFloat]) -> (BigFloat, BigFloat) {
    let prec = d[0].precision();
    let r = BigFloat::from_i64(100, prec);
    let den = BigFloat::from_i64(99, prec);
    let est: Vec<BigFloat> = d.windows(2).map(|w| &(&(&r * &w[1]) - &w[0]) / &den).collect();
    let last = est.last().unwrap().clone();
    let err = (&last - &est[est.len() - 2]).abs();
    (last, err)
}

fn consistent(name: &str, value: &BigFloat, err: &BigFloat) -> Result<()> {
    let scale = value.abs().to_f64().max(1.0);
    if err.to_f64() > STENCIL_TOLERANCE * scale {
        return Err(Error::StencilInconsistent(format!(
            "{name}: estimates differ by {} on the stencil",
            err.to_decimal(6)
        )));
    }
    Ok(())
}

pub fn rho_derivatives(sys: &PolySystem, base: &Fold) -> Result<RhoDerivatives> {
    let prec = base.z0.precision();
    let rho1 = base.z0.clone();
    let one = BigFloat::one().with_precision(prec);
    let hs: Vec<BigFloat> = STENCIL_STEPS.iter().map(|&d| BigFloat::from_rat(&rat(1, d), prec)).collect();
    let xs: Vec<BigFloat> = hs.iter().flat_map(|h| [&one + h, &one - h]).collect();
    let rhos: Vec<BigFloat> =
        xs.par_iter().map(|x| rho_of_x(sys, base, x).map(|f| f.z0)).collect::<Result<Vec<_>>>()?;
    let two = BigFloat::from_i64(2, prec);
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (i, h) in hs.iter().enumerate() {
        let (p, m) = (&rhos[2 * i], &rhos[2 * i + 1]);
        first.push(&(p - m) / &(&two * h));
        second.push(&(&(p - &(&two * &rho1)) + m) / &(h * h));
    }
    let (d1, d1_error) = richardson(&first);
    let (d2, d2_error) = richardson(&second);
    consistent("rho'(1)", &d1, &d1_error)?;
    consistent("rho''(1)", &d2, &d2_error)?;
    Ok(RhoDerivatives { rho1, d1, d1_error, d2, d2_error })
}

/// Exact mean and variance of `X_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Moment {
    pub n: usize,
    #[serde(serialize_with = "ser_rat")]
    pub mean: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub variance: Rat,
}

/// Means and variances from `[z^n] M(z, x, 1)` for `n < n_max`, on the support only.
pub fn exact_moments(eq: &CatalyticEquation, n_max: usize) -> Result<Vec<Moment>> {
    let s = eval_u1_in(eq, &JetRing::default(), n_max)?;
    let mut out = Vec::new();
    for (n, j) in s.coeffs().iter().enumerate() {
        let p = j.value();
        if num_traits::Zero::is_zero(p) {
            continue;
        }
        let mean = j.d1() / p;
        let variance = &(&(j.d2() / p) + &mean) - &(&mean * &mean);
        out.push(Moment { n, mean, variance });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoSample {
    #[serde(serialize_with = "ser_rat")]
    pub x: Rat,
    #[serde(serialize_with = "ser_float")]
    pub rho: BigFloat,
}

#[derive(Clone, Debug, Serialize)]
pub struct CltReport {
    pub derivatives: RhoDerivatives,
    #[serde(serialize_with = "ser_float")]
    pub mu: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub sigma2: BigFloat,
    /// `sigma^2 != 0`.
    pub clt_applicable: bool,
    pub periodicity: Periodicity,
    pub empirical: Vec<Moment>,
    /// `max |E[X_n] - mu n|` over all computed `n`, and over the upper half.
    #[serde(serialize_with = "ser_float")]
    pub mean_offset: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub late_mean_offset: BigFloat,
    pub rho_grid: Vec<RhoSample>,
    pub rho_decreasing: bool,
    pub notes: Vec<String>,
}

/// Full limit-law report. `base` is the fold of `sys` at `x = 1`.
pub fn clt(eq: &CatalyticEquation, sys: &PolySystem, base: &Fold, n_max: usize) -> Result<CltReport> {
    let prec = base.z0.precision();
    let derivatives = rho_derivatives(sys, base)?;
    if !derivatives.rho1.is_positive() {
        return Err(Error::NoConvergence("rho(1) is not positive".into()));
    }
    let mut notes = Vec::new();
    if derivatives.d1.is_positive() {
        notes.push("rho'(1) is positive: the marked parameter is not increasing along the branch".into());
    }
    let mu = -(&derivatives.d1 / &derivatives.rho1);
    let sigma2 = &(&mu + &(&mu * &mu)) - &(&derivatives.d2 / &derivatives.rho1);
    let clt_applicable = sigma2.abs().to_f64() > DEGENERATE_VARIANCE;

    let grid: Vec<Rat> = RHO_GRID.iter().map(|&(p, q)| rat(p, q)).collect();
    let rho_grid = grid
        .par_iter()
        .map(|x| {
            let f = rho_of_x(sys, base, &BigFloat::from_rat(x, prec))?;
            Ok(RhoSample { x: x.clone(), rho: f.z0 })
        })
        .collect::<Result<Vec<_>>>()?;
    let rho_decreasing = rho_grid.windows(2).all(|w| w[1].rho < w[0].rho);

    let empirical = exact_moments(eq, n_max)?;
    let support: Vec<bool> = {
        let mut v = vec![false; n_max];
        for m in &empirical {
            v[m.n] = true;
        }
        v
    };
    let per = periodicity(&support, n_max / 2);
    let offset = |m: &Moment| {
        let mean = BigFloat::from_rat(&m.mean, prec);
        (&mean - &(&mu * &BigFloat::from_i64(m.n as i64, prec))).abs()
    };
    let zero = BigFloat::zero().with_precision(prec);
    let mean_offset = empirical.iter().map(offset).fold(zero.clone(), |a, b| a.max(b));
    let late_mean_offset = empirical.iter().filter(|m| 2 * m.n >= n_max).map(offset).fold(zero, |a, b| a.max(b));
    notes.push(
        "moments use [z^n] M(z, x, 1); positivity of the support is checked on the same evaluation, not on M(z, 1, 0)"
            .into(),
    );
    Ok(CltReport {
        derivatives,
        mu,
        sigma2,
        clt_applicable,
        periodicity: per,
        empirical,
        mean_offset,
        late_mean_offset,
        rho_grid,
        rho_decreasing,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::derive_system;
    use crate::numeric::int;

    fn setup(text: &str) -> (CatalyticEquation, PolySystem, Fold) {
        let eq = CatalyticEquation::parse(text).unwrap();
        let sys = derive_system(&eq).to_poly_system();
        let prec = 256;
        let fold = sys.compile(prec, &BigFloat::one().with_precision(prec)).find_fold().unwrap();
        (eq, sys, fold)
    }

    #[test]
    fn vertex_marked_derivatives() {
        let (_, sys, fold) = setup("M = x + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D");
        let d = rho_derivatives(&sys, &fold).unwrap();
        assert!((d.rho1.to_f64() - 1.0 / 12.0).abs() < 1e-15);
        assert!((d.d1.to_f64() + 1.0 / 24.0).abs() < 1e-12);
        assert!((d.d2.to_f64() - 19.0 / 384.0).abs() < 1e-12);
    }

    #[test]
    fn every_edge_marked_is_degenerate() {
        let (eq, sys, fold) = setup("M = 1 + x*z*(u+1)^2*M^2 + x*z*(u+1)*M + x*z*(u+1)*D");
        let r = clt(&eq, &sys, &fold, 12).unwrap();
        assert!((r.mu.to_f64() - 1.0).abs() < 1e-12);
        assert!(!r.clt_applicable);
        assert!(r.empirical.iter().all(|m| m.variance == int(0) && m.mean == int(m.n as i64)));
        assert!(r.rho_decreasing);
    }

    #[test]
    fn unmarked_equation_has_flat_rho() {
        let (_, sys, fold) = setup("M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D");
        let d = rho_derivatives(&sys, &fold).unwrap();
        assert!(d.d1.abs().to_f64() < 1e-40);
        assert!(d.d2.abs().to_f64() < 1e-30);
    }
}
