//! Local expansions at a fold by least squares on `z = z0 (1 - t^2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixedpoint::{BranchPoint, NumericSystem};
use crate::linalg::{self, Matrix};
use crate::numeric::BigFloat;

/// Collocation parameters `t_j = j / 200`, `j = 1..=24`.
pub const NODE_COUNT: usize = 24;
pub const NODE_DENOMINATOR: i64 = 200;
/// Degree of the least-squares polynomial in `t`.
pub const FIT_DEGREE: usize = 15;

pub fn nodes(prec: usize) -> Vec<BigFloat> {
    let d = BigFloat::from_i64(NODE_DENOMINATOR, prec);
    (1..=NODE_COUNT as i64).map(|j| &BigFloat::from_i64(j, prec) / &d).collect()
}

/// Branch values at every node, from the node farthest from `z0` inwards.
#[derive(Clone, Debug)]
pub struct BranchSamples {
    pub t: Vec<BigFloat>,
    pub points: Vec<BranchPoint>,
    pub observable: Vec<BigFloat>,
}

pub fn sample_branch(ns: &NumericSystem, z0: &BigFloat) -> Result<BranchSamples> {
    let prec = ns.precision();
    let ts = nodes(prec);
    let one = BigFloat::one().with_precision(prec);
    let z_at = |t: &BigFloat| z0 * &(&one - &(t * t));
    let mut points: Vec<Option<BranchPoint>> = vec![None; ts.len()];
    let last = ts.len() - 1;
    let z_far = z_at(&ts[last]);
    points[last] = Some(ns.march(Some(&z_far))?);
    for j in (0..last).rev() {
        // extrapolate in t, where the branch is analytic
        let known: Vec<(&BigFloat, &BranchPoint)> =
            (j + 1..ts.len()).take(3).map(|k| (&ts[k], points[k].as_ref().unwrap())).collect();
        let guess: Vec<BigFloat> = (0..ns.dim())
            .map(|i| {
                let pts: Vec<(BigFloat, BigFloat)> =
                    known.iter().map(|(t, p)| (*t - &ts[j], p.y[i].clone())).collect();
                crate::extrapolate::neville(&pts).0
            })
            .collect();
        let z = z_at(&ts[j]);
        let y = ns.solve_at(&z, &guess, 60)?;
        points[j] = Some(BranchPoint { z, y });
    }
    let points: Vec<BranchPoint> = points.into_iter().map(Option::unwrap).collect();
    let observable = points.iter().map(|p| ns.observable(&p.z, &p.y)).collect::<Result<Vec<_>>>()?;
    Ok(BranchSamples { t: ts, points, observable })
}

/// Polynomial fit `y(t) = sum c_k t^k`.
#[derive(Clone, Debug, Serialize)]
pub struct TFit {
    #[serde(serialize_with = "crate::report::ser_floats")]
    pub coeffs: Vec<BigFloat>,
    #[serde(serialize_with = "crate::report::ser_float")]
    pub residual: BigFloat,
}

pub fn fit(t: &[BigFloat], y: &[BigFloat], degree: usize) -> Result<TFit> {
    let a: Matrix = t.iter().map(|ti| (0..=degree).map(|k| ti.powi(k)).collect()).collect();
    let (coeffs, residual) = linalg::least_squares(&a, y)?;
    Ok(TFit { coeffs, residual })
}

/// Shared sanity checks on a fit: small residual and a last coefficient that
/// does not dominate the leading singular term `t^lead`.
pub fn check_fit(f: &TFit, t_max: &BigFloat, lead: usize, scale: &BigFloat) -> Result<()> {
    let tol = scale.abs().max(BigFloat::one()).to_f64() * 1e-8;
    if f.residual.to_f64() > tol {
        return Err(Error::FitUnstable(format!(
            "least-squares residual {} above {tol:e}",
            f.residual.to_decimal(6)
        )));
    }
    let k = f.coeffs.len() - 1;
    let tail = f.coeffs[k].abs() * t_max.powi(k);
    let head = f.coeffs[lead].abs() * t_max.powi(lead);
    if !head.is_zero() && tail > head {
        return Err(Error::FitUnstable(format!(
            "sentinel t^{k} term {} dominates the t^{lead} term {}",
            tail.to_decimal(6),
            head.to_decimal(6)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_square_root() {
        // sqrt(1 - z/z0) = t exactly, plus analytic part 2 - t^2
        let prec = 256;
        let ts = nodes(prec);
        let ys: Vec<BigFloat> = ts.iter().map(|t| &(&BigFloat::from_i64(2, prec) + t) - &(t * t)).collect();
        let f = fit(&ts, &ys, FIT_DEGREE).unwrap();
        assert!((f.coeffs[0].to_f64() - 2.0).abs() < 1e-30);
        assert!((f.coeffs[1].to_f64() - 1.0).abs() < 1e-25);
        assert!((f.coeffs[2].to_f64() + 1.0).abs() < 1e-20);
        check_fit(&f, &ts[NODE_COUNT - 1], 1, &BigFloat::from_i64(2, prec)).unwrap();
    }
}
