//! Coefficient asymptotics: support periodicity, Richardson extrapolation of
//! `M_n n^alpha z0^n`, and ratio estimates of the radius.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::BigFloat;
use crate::report::{ser_float, ser_floats, ser_opt_float};

/// Nonzero coefficients live on `n = a mod b` for `a` in `residues`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub period: usize,
    pub residues: Vec<usize>,
}

/// gcd of index gaps between nonzero coefficients with index `>= start`.
pub fn periodicity(nonzero: &[bool], start: usize) -> Periodicity {
    let idx: Vec<usize> = (start..nonzero.len()).filter(|&n| nonzero[n]).collect();
    let b = idx.windows(2).fold(0usize, |g, w| g.gcd(&(w[1] - w[0])));
    let b = b.max(1);
    let mut residues: Vec<usize> = idx.iter().map(|n| n % b).collect();
    residues.sort_unstable();
    residues.dedup();
    Periodicity { period: b, residues }
}

/// Polynomial extrapolation to `h = 0` through `(h_i, y_i)`.
///
/// Returns the estimate from all points and the change against the estimate
/// that drops the point farthest from zero.
pub fn neville(points: &[(BigFloat, BigFloat)]) -> (BigFloat, BigFloat) {
    let full = neville_value(points);
    if points.len() < 2 {
        return (full, BigFloat::zero());
    }
    let rest = neville_value(&points[1..]);
    let err = (&full - &rest).abs();
    (full, err)
}

fn neville_value(points: &[(BigFloat, BigFloat)]) -> BigFloat {
    let mut p: Vec<BigFloat> = points.iter().map(|(_, y)| y.clone()).collect();
    let h: Vec<&BigFloat> = points.iter().map(|(h, _)| h).collect();
    let k = p.len();
    for m in 1..k {
        for i in 0..k - m {
            // p_i <- (h_{i+m} p_i - h_i p_{i+1}) / (h_{i+m} - h_i)
            let num = &(h[i + m] * &p[i]) - &(h[i] * &p[i + 1]);
            p[i] = &num / &(h[i + m] - h[i]);
        }
    }
    p.swap_remove(0)
}

/// Extrapolated constant `c` in `M_n ~ c n^{-alpha} z0^{-n}` along one residue class.
#[derive(Clone, Debug)]
pub struct ConstantEstimate {
    pub residue: usize,
    pub value: BigFloat,
    pub error: BigFloat,
}

/// `alpha2` is twice the exponent, so 3 stands for `n^{3/2}`.
pub fn scaled_term(m_n: &BigFloat, n: usize, alpha2: u32, z0: &BigFloat) -> BigFloat {
    let prec = z0.precision();
    let nf = BigFloat::from_i64(n as i64, prec);
    let half = nf.sqrt().powi(alpha2 as usize);
    &(m_n * &half) * &z0.powi(n)
}

/// Richardson extrapolation in `1/n` using `nodes` indices of the class spread over `[lo, hi]`.
pub fn extrapolate_constant(
    coeffs: &[BigFloat],
    z0: &BigFloat,
    alpha2: u32,
    period: usize,
    residue: usize,
    lo: usize,
    hi: usize,
    nodes: usize,
) -> Result<ConstantEstimate> {
    let prec = z0.precision();
    let hi = hi.min(coeffs.len() - 1);
    let class: Vec<usize> = (lo..=hi).filter(|n| n % period == residue && *n > 0).collect();
    if class.len() < nodes.max(2) {
        return Err(Error::FitUnstable(format!(
            "only {} coefficients of class {residue} mod {period} in [{lo}, {hi}]",
            class.len()
        )));
    }
    let step = (class.len() - 1) as f64 / (nodes - 1) as f64;
    let mut picks: Vec<usize> = (0..nodes).map(|i| class[(i as f64 * step).round() as usize]).collect();
    picks.dedup();
    // farthest from h = 0 first, so the error estimate drops the smallest n
    let points: Vec<(BigFloat, BigFloat)> = picks
        .iter()
        .map(|&n| {
            let h = BigFloat::from_i64(n as i64, prec).recip().expect("n > 0");
            (h, scaled_term(&coeffs[n], n, alpha2, z0))
        })
        .collect();
    let (value, error) = neville(&points);
    Ok(ConstantEstimate { residue, value, error })
}

/// `(M_n / M_{n+b})^{1/b}` at the largest usable `n` of the class.
pub fn ratio_radius(coeffs: &[BigFloat], period: usize, residue: usize) -> Option<BigFloat> {
    let n_max = coeffs.len().checked_sub(1)?;
    let mut n = n_max.checked_sub(period)?;
    while n % period != residue {
        n = n.checked_sub(1)?;
    }
    let a = &coeffs[n];
    let b = &coeffs[n + period];
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let r = (a / b).abs();
    if period == 1 {
        return Some(r);
    }
    let inv = BigFloat::from_i64(period as i64, r.precision()).recip().ok()?;
    r.try_pow(&inv).ok()
}

/// Per-residue constant with its stability check.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantReport {
    pub residue: usize,
    #[serde(serialize_with = "ser_float")]
    pub value: BigFloat,
    /// Neville error estimate on the full window.
    #[serde(serialize_with = "ser_float")]
    pub error: BigFloat,
    /// Estimate from the last quarter of the coefficients.
    #[serde(serialize_with = "ser_float")]
    pub late_window: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub window_relative_change: BigFloat,
}

/// Constants on every residue class, on `[N/2, N]` and on `[3N/4, N]`.
pub fn constants_on_classes(
    coeffs: &[BigFloat],
    z0: &BigFloat,
    alpha2: u32,
    per: &Periodicity,
) -> Result<Vec<ConstantReport>> {
    let n = coeffs.len() - 1;
    let nodes = 10;
    per.residues
        .iter()
        .map(|&r| {
            let full = extrapolate_constant(coeffs, z0, alpha2, per.period, r, n / 2, n, nodes)?;
            let late = extrapolate_constant(coeffs, z0, alpha2, per.period, r, 3 * n / 4, n, nodes)?;
            let change = (&(&full.value - &late.value) / &full.value).abs();
            Ok(ConstantReport {
                residue: r,
                value: full.value,
                error: full.error,
                late_window: late.value,
                window_relative_change: change,
            })
        })
        .collect()
}

/// Working precision for long floating coefficient sequences.
///
/// Corpus coefficients are sums of positive terms, so 128 bits already leave
/// far more accuracy than the extrapolation can use.
pub fn series_precision(prec: usize) -> usize {
    prec.clamp(128, 192)
}

/// Growth, exponent and constants of `[z^n] M(z, 0)`.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticForm {
    #[serde(serialize_with = "ser_float")]
    pub growth: BigFloat,
    /// `"-3/2"` or `"-5/2"`.
    pub exponent: String,
    pub periodicity: Periodicity,
    pub constants: Vec<ConstantReport>,
    /// Constant predicted by the local expansion (period 1 only).
    #[serde(serialize_with = "ser_opt_float")]
    pub transfer_constant: Option<BigFloat>,
    #[serde(serialize_with = "ser_opt_float")]
    pub transfer_relative_error: Option<BigFloat>,
    #[serde(serialize_with = "ser_floats")]
    pub empirical_radius: Vec<BigFloat>,
    pub n_max: usize,
}

/// Coefficient asymptotics with exponent `-alpha2/2` from floating coefficients.
///
/// `singular` is the local coefficient (`a1` or `a3`) that predicts `c` when there is one class.
pub fn coefficient_asymptotics(
    coeffs: &[BigFloat],
    z0: &BigFloat,
    alpha2: u32,
    singular: &BigFloat,
    prec: usize,
) -> Result<AsymptoticForm> {
    let n_max = coeffs.len() - 1;
    let nonzero: Vec<bool> = coeffs.iter().map(|c| !c.is_zero()).collect();
    let per = periodicity(&nonzero, n_max / 2);
    let sp = coeffs.first().map_or(prec, |c| c.precision().max(64));
    let z0s = z0.with_precision(sp);
    let constants = constants_on_classes(coeffs, &z0s, alpha2, &per)?;
    let empirical_radius =
        per.residues.iter().filter_map(|&r| ratio_radius(coeffs, per.period, r)).collect();
    let sqrt_pi = BigFloat::pi(prec).sqrt();
    let predicted = match alpha2 {
        // a1 (1 - z/z0)^{1/2}: c = -a1 / (2 sqrt(pi))
        3 => -(singular / &(&BigFloat::from_i64(2, prec) * &sqrt_pi)),
        // a3 (1 - z/z0)^{3/2}: c = 3 a3 / (4 sqrt(pi))
        5 => &(singular * &BigFloat::from_i64(3, prec)) / &(&BigFloat::from_i64(4, prec) * &sqrt_pi),
        _ => return Err(Error::NotApplicable(format!("exponent -{alpha2}/2"))),
    };
    let (transfer_constant, transfer_relative_error) = if per.period == 1 {
        let rel = (&(&constants[0].value.with_precision(prec) - &predicted) / &predicted).abs();
        (Some(predicted), Some(rel))
    } else {
        (None, None)
    };
    Ok(AsymptoticForm {
        growth: z0.recip()?,
        exponent: format!("-{alpha2}/2"),
        periodicity: per,
        constants,
        transfer_constant,
        transfer_relative_error,
        empirical_radius,
        n_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64(v, 192).unwrap()
    }

    #[test]
    fn support_period() {
        let nz: Vec<bool> = (0..40).map(|n| n % 2 == 0).collect();
        assert_eq!(periodicity(&nz, 20), Periodicity { period: 2, residues: vec![0] });
        let all = vec![true; 10];
        assert_eq!(periodicity(&all, 0).period, 1);
    }

    #[test]
    fn neville_removes_polynomial_corrections() {
        // y(h) = 2 + 3h - h^2 + 5h^3
        let pts: Vec<_> = [0.1, 0.05, 0.02, 0.01, 0.005]
            .iter()
            .map(|&h| (bf(h), bf(2.0 + 3.0 * h - h * h + 5.0 * h * h * h)))
            .collect();
        let (v, e) = neville(&pts);
        // inputs carry f64 rounding
        assert!((v.to_f64() - 2.0).abs() < 1e-13);
        assert!(e.to_f64() < 1e-12);
    }

    #[test]
    fn catalan_constant() {
        // C_n ~ 4^n n^{-3/2} / sqrt(pi)
        let prec = 192;
        let mut c = vec![BigFloat::one().with_precision(prec)];
        for n in 0..600usize {
            let next = &(&c[n] * &BigFloat::from_i64(2 * (2 * n as i64 + 1), prec)) / &BigFloat::from_i64(n as i64 + 2, prec);
            c.push(next);
        }
        let z0 = BigFloat::from_f64(0.25, prec).unwrap();
        let est = extrapolate_constant(&c, &z0, 3, 1, 0, 300, 600, 12).unwrap();
        let expected = 1.0 / std::f64::consts::PI.sqrt();
        assert!((est.value.to_f64() - expected).abs() < 1e-12);
        let r = ratio_radius(&c, 1, 0).unwrap();
        assert!((r.to_f64() - 0.25).abs() < 1e-3);
    }
}
