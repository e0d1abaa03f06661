use serde::Serialize;

use crate::equation::{CatalyticEquation, NonlinearDegeneracy};
use crate::error::{Error, Result};
use crate::fixedpoint::{BranchPoint, Fold, NumericSystem, PolySystem};
use crate::linalg::{self, Matrix};
use crate::numeric::{BigFloat, FloatRing, Rat, RatRing};
use crate::poly::{MultiPoly, Var};
use crate::puiseux::{self, TFit};
use crate::report::{ser_float, ser_floats, ser_matrix, ser_opt_float};

use super::system::{derive_system, Unknown};

/// Fold of the three-equation system with its certificates.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    #[serde(serialize_with = "ser_float")]
    pub z0: BigFloat,
    /// Values of the unknowns at `z0`, in system order.
    #[serde(serialize_with = "ser_floats")]
    pub values: Vec<BigFloat>,
    pub unknowns: Vec<String>,
    #[serde(serialize_with = "ser_matrix")]
    pub jacobian: Matrix,
    /// `det(I - J)` at the point.
    #[serde(serialize_with = "ser_float")]
    pub det_residual: BigFloat,
    /// max-norm of the fixed-point residual.
    #[serde(serialize_with = "ser_float")]
    pub residual: BigFloat,
    #[serde(serialize_with = "ser_opt_float")]
    pub perron_root: Option<BigFloat>,
    #[serde(serialize_with = "ser_opt_float")]
    pub perron_lower: Option<BigFloat>,
    #[serde(serialize_with = "ser_opt_float")]
    pub perron_upper: Option<BigFloat>,
    pub jacobian_nonnegative: bool,
    pub certified: bool,
}

impl CriticalPoint {
    pub fn value(&self, y: Unknown) -> Option<&BigFloat> {
        self.unknowns.iter().position(|n| n == y.name()).map(|i| &self.values[i])
    }
}

fn relative_gap(a: &BigFloat, b: &BigFloat) -> f64 {
    (&(a - b) / b).abs().to_f64()
}

/// March to the fold of `ns`, refine it and certify it when the system is positive.
///
/// Without positivity the continuation branch is only accepted as is (with a
/// warning) or checked against `hint`.
pub fn critical_point(
    ns: &NumericSystem,
    names: &[&str],
    hint: Option<&BigFloat>,
    warnings: &mut Vec<String>,
) -> Result<(CriticalPoint, Fold)> {
    let mut fold = ns.find_fold()?;
    if let Some(h) = hint {
        if relative_gap(&fold.z0, h) > 1e-8 {
            // reseed the extended Newton at the hint with the branch below it
            let z = if *h < fold.z0 { h.clone() } else { fold.z0.clone() };
            let below = &z * &ns.float(1.0 - 1e-6);
            let start = ns.march(Some(&below)).and_then(|p| {
                let seeded = BranchPoint { z: h.clone(), y: p.y };
                ns.extended_newton(&seeded)
            });
            match start {
                Ok(f) if relative_gap(&f.z0, h) <= 1e-8 => fold = f,
                _ => {
                    return Err(Error::NoConvergence(format!(
                        "continuation found a fold at z = {} which does not match the expected z0 = {}",
                        fold.z0.to_decimal(20),
                        h.to_decimal(20)
                    )))
                }
            }
        }
    } else if !ns.is_positive() {
        warnings.push(format!(
            "generic mode: branch accepted from continuation along the real axis (z0 = {}); pass --expect-z0 to confirm",
            fold.z0.to_decimal(16)
        ));
    }
    let tol = ns.tolerance();
    let mut jacobian_nonnegative = true;
    if ns.is_positive() {
        let slack = -(&tol * &ns.float(1e6));
        if let Some((i, v)) = fold.y.iter().enumerate().find(|(_, v)| **v < slack) {
            return Err(Error::NegativeCoordinate(format!(
                "{} = {} at the fold of a positive system",
                names.get(i).copied().unwrap_or("?"),
                v.to_decimal(12)
            )));
        }
        jacobian_nonnegative = fold.jacobian.iter().flatten().all(|v| *v >= slack);
        if !jacobian_nonnegative {
            return Err(Error::NegativeCoordinate("Jacobian has a negative entry at the fold".into()));
        }
    }
    let perron = fold.perron.clone();
    let certified = perron.as_ref().is_some_and(|p| {
        let one = BigFloat::one().with_precision(ns.precision());
        (&p.root - &one).abs().to_f64() <= 1e-20 && fold.det.abs().to_f64() <= 1e-30
    });
    let cp = CriticalPoint {
        z0: fold.z0.clone(),
        values: fold.y.clone(),
        unknowns: names.iter().map(|s| s.to_string()).collect(),
        jacobian: fold.jacobian.clone(),
        det_residual: fold.det.clone(),
        residual: fold.residual.clone(),
        perron_root: perron.as_ref().map(|p| p.root.clone()),
        perron_lower: perron.as_ref().map(|p| p.lower.clone()),
        perron_upper: perron.as_ref().map(|p| p.upper.clone()),
        jacobian_nonnegative,
        certified,
    };
    Ok((cp, fold))
}

/// First coefficients in `t = sqrt(1 - z/z0)` of one unknown.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentExpansion {
    pub unknown: String,
    #[serde(serialize_with = "ser_floats")]
    pub coeffs: Vec<BigFloat>,
}

/// `y(z) = a0 + y1 t + a2 t^2 + a3 t^3 + a4 t^4 + ...` with `t^2 = 1 - z/z0`.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxExpansion {
    #[serde(serialize_with = "ser_float")]
    pub a0: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub a2: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub a3: BigFloat,
    #[serde(serialize_with = "ser_float")]
    pub a4: BigFloat,
    /// `|coefficient of t|`, which must vanish.
    #[serde(serialize_with = "ser_float")]
    pub y1_residual: BigFloat,
    pub components: Vec<ComponentExpansion>,
    pub fit: TFit,
}

impl PuiseuxExpansion {
    /// `y1 <= 1e-6 |a3|`: the leading singular exponent is 3/2.
    pub fn three_halves(&self) -> bool {
        !self.a3.is_zero() && self.y1_residual.to_f64() <= 1e-6 * self.a3.abs().to_f64()
    }

    pub fn component(&self, y: Unknown) -> Option<&ComponentExpansion> {
        self.components.iter().find(|c| c.unknown == y.name())
    }
}

pub fn puiseux_expansion(
    ns: &NumericSystem,
    cp: &CriticalPoint,
    hypotheses_hold: bool,
    warnings: &mut Vec<String>,
) -> Result<PuiseuxExpansion> {
    let samples = puiseux::sample_branch(ns, &cp.z0)?;
    let fit = puiseux::fit(&samples.t, &samples.observable, puiseux::FIT_DEGREE)?;
    let t_max = samples.t.last().unwrap().clone();
    puiseux::check_fit(&fit, &t_max, 3, &fit.coeffs[0])?;
    let mut components = Vec::new();
    for (i, name) in cp.unknowns.iter().enumerate() {
        let ys: Vec<BigFloat> = samples.points.iter().map(|p| p.y[i].clone()).collect();
        let f = puiseux::fit(&samples.t, &ys, puiseux::FIT_DEGREE)?;
        components.push(ComponentExpansion { unknown: name.clone(), coeffs: f.coeffs[..4].to_vec() });
    }
    let c = &fit.coeffs;
    let pe = PuiseuxExpansion {
        a0: c[0].clone(),
        a2: c[2].clone(),
        a3: c[3].clone(),
        a4: c[4].clone(),
        y1_residual: c[1].abs(),
        components,
        fit: fit.clone(),
    };
    if !pe.three_halves() {
        let bound = &pe.a3.abs() * &ns.float(1e-6);
        if hypotheses_hold {
            return Err(Error::Y1Nonzero { residual: pe.y1_residual.to_decimal(6), bound: bound.to_decimal(6) });
        }
        warnings.push(format!(
            "coefficient of (1 - z/z0)^(1/2) is {} (above {}): no 3/2 singularity",
            pe.y1_residual.to_decimal(6),
            bound.to_decimal(6)
        ));
    } else if hypotheses_hold && !pe.a3.is_positive() {
        return Err(Error::FitUnstable(format!("a3 = {} is not positive", pe.a3.to_decimal(12))));
    }
    Ok(pe)
}

/// Floating coefficients of the observable through the system's series.
pub fn observable_float_series(sys: &PolySystem, n: usize, prec: usize, x: &BigFloat) -> Result<Vec<BigFloat>> {
    let ring = FloatRing { prec, x: x.with_precision(prec) };
    let ys = sys.series_in(&ring, n)?;
    Ok(sys.observable_series(&ring, &ys)?.into_coeffs())
}

/// One-unknown system for the degenerate cases, with its unknown's name.
pub fn reduced_system(eq: &CatalyticEquation, deg: NonlinearDegeneracy) -> (PolySystem, &'static str) {
    let q = eq.q();
    let f0 = eq.f0();
    let z = MultiPoly::var(Var::Z);
    let zero = <Rat as num_traits::Zero>::zero();
    match deg {
        NonlinearDegeneracy::WVanishes | NonlinearDegeneracy::NoDividedDifference => {
            // M(z,0) = f with f = F0(0) + z Q(f, 0, z, 0)
            let q0 = q.eval_partial(&[(Var::A1, zero.clone()), (Var::U, zero.clone())]);
            let f00 = f0.eval_partial(&[(Var::U, zero)]);
            let rhs = &f00 + &(&z * &q0);
            (PolySystem::new(vec![Var::A0], vec![rhs], MultiPoly::var(Var::A0), MultiPoly::one()), "f")
        }
        NonlinearDegeneracy::OnlyDividedDifference => {
            // w = F0'(u), u = z Q_D(w, z), M(z,0) = z Q(w, z) + F0(u) - u F0'(u)
            let w = f0.partial(Var::U);
            let rhs = &z * &q.partial(Var::A1).substitute(Var::A1, &w);
            let obs = &(&(&z * &q.substitute(Var::A1, &w)) + f0) - &(&MultiPoly::var(Var::U) * &w);
            (PolySystem::new(vec![Var::U], vec![rhs], obs, MultiPoly::one()), "u")
        }
    }
}

/// Compares `f - w*u` from the system's exact series with `M(z,0)` from the engine.
///
/// Returns the first index where they differ.
pub fn system_identity(eq: &CatalyticEquation, n: usize) -> Result<Option<usize>> {
    let sys = derive_system(eq).to_poly_system();
    let ring = RatRing::default();
    let ys = sys.series_in(&ring, n)?;
    let obs = sys.observable_series(&ring, &ys)?;
    let m0 = crate::engine::solve_series(eq, n, 1)?.m0;
    Ok(obs.first_difference(&m0))
}

/// Perron root of `J` along the branch at the given `z` values.
pub fn perron_along_branch(ns: &NumericSystem, zs: &[BigFloat]) -> Result<Vec<BigFloat>> {
    let mut out = Vec::with_capacity(zs.len());
    for z in zs {
        let p = ns.march(Some(z))?;
        out.push(linalg::perron_root(&ns.jacobian(z, &p.y)).root);
    }
    Ok(out)
}
