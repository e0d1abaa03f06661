//! The full pipeline: classification, exact coefficients, singular analysis,
//! coefficient asymptotics and the optional limit law.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::clt::{self, CltReport};
use crate::engine;
use crate::equation::{classify, dependency_digraph, Classification, DependencyDigraph, EquationClass, Form, LinearDecomposition};
use crate::equation::CatalyticEquation;
use crate::error::{Error, Result};
use crate::extrapolate::{coefficient_asymptotics, series_precision, AsymptoticForm};
use crate::fixedpoint::{Fold, PolySystem};
use crate::linear::{self, KernelIdentity, KernelSolution, LinearCriticalPoint, LinearExpansion};
use crate::nonlinear::{self, derive_system, CriticalPoint, PuiseuxExpansion, Unknown};
use crate::numeric::{BigFloat, Rat, DEFAULT_PRECISION};
use crate::series::UniSeries;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Working precision in bits.
    pub precision: usize,
    /// Exact coefficients `[z^0 .. z^(n-1)] M(z,0)` to report.
    pub coefficients: Option<usize>,
    pub asymptotics: bool,
    /// Largest index used by the coefficient extrapolation.
    pub asymptotic_terms: usize,
    pub clt: bool,
    /// Exact moments are computed for `n` below this.
    pub moment_terms: usize,
    /// Expected dominant singularity, used to pick the branch in generic mode.
    pub expect_z0: Option<Rat>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            precision: DEFAULT_PRECISION,
            coefficients: None,
            asymptotics: false,
            asymptotic_terms: 1000,
            clt: false,
            moment_terms: 31,
            expect_z0: None,
        }
    }
}

/// Kernel-method outcome for linear equations.
#[derive(Clone, Debug)]
pub struct KernelOutcome {
    pub solution: KernelSolution,
    pub identity: KernelIdentity,
}

/// The dominant singularity and the local expansion there.
#[derive(Clone, Debug)]
pub enum Singular {
    Linear { point: LinearCriticalPoint, expansion: LinearExpansion },
    Nonlinear { point: CriticalPoint, expansion: PuiseuxExpansion, reduction: Option<&'static str> },
}

impl Singular {
    pub fn z0(&self) -> &BigFloat {
        match self {
            Singular::Linear { point, .. } => &point.z0,
            Singular::Nonlinear { point, .. } => &point.z0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub equation: CatalyticEquation,
    pub classification: Classification,
    pub digraph: Option<DependencyDigraph>,
    pub coefficients: Option<UniSeries<Rat>>,
    pub kernel: Option<KernelOutcome>,
    /// First index where `f - w*u` and `M(z,0)` differ, if any.
    pub system_identity: Option<Option<usize>>,
    pub singular: Option<Singular>,
    pub asymptotics: Option<AsymptoticForm>,
    pub clt: Option<CltReport>,
    pub precision: usize,
    /// Seconds per stage.
    pub timing: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    branch: Option<(PolySystem, Fold)>,
}

impl Analysis {
    /// The polynomial system behind the singular analysis and its fold at `x = 1`.
    pub fn branch(&self) -> Option<(&PolySystem, &Fold)> {
        self.branch.as_ref().map(|(s, f)| (s, f))
    }
}

struct Clock(BTreeMap<String, f64>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.0.entry(stage.to_string()).or_insert(0.0) += t.elapsed().as_secs_f64();
        out
    }
}

/// Terms of the exact kernel check for linear equations.
const KERNEL_CHECK_TERMS: usize = 41;
/// Terms of the exact `f - w*u = M(z,0)` check for nonlinear equations.
pub const SYSTEM_CHECK_TERMS: usize = 31;

pub fn analyze(eq: &CatalyticEquation, opts: &AnalysisOptions) -> Result<Analysis> {
    let prec = opts.precision;
    let mut clock = Clock(BTreeMap::new());
    let classification = clock.time("classification", || classify(eq));
    let mut warnings = classification.warnings.clone();
    let digraph = if eq.is_linear() { None } else { dependency_digraph(eq).ok() };
    let coefficients = match opts.coefficients {
        Some(n) => Some(clock.time("coefficients", || engine::solve_series(eq, n.max(1), 1))?.m0),
        None => None,
    };
    let mut out = Analysis {
        equation: eq.clone(),
        classification: classification.clone(),
        digraph,
        coefficients,
        kernel: None,
        system_identity: None,
        singular: None,
        asymptotics: None,
        clt: None,
        precision: prec,
        timing: BTreeMap::new(),
        warnings: Vec::new(),
        branch: None,
    };
    let hint = opts.expect_z0.as_ref().map(|r| BigFloat::from_rat(r, prec));

    if eq.is_linear() {
        let dec = match &classification.decomposition {
            Some(d) => Some(d.clone()),
            // generic mode keeps the kernel method when the equation is in BMJ form
            None if eq.form() == Form::Bmj => Some(LinearDecomposition::of(eq)?),
            None => None,
        };
        match dec {
            Some(dec) => clock.time("singular", || linear_branch(eq, &dec, &classification, opts, hint.as_ref(), &mut out, &mut warnings))?,
            None => warnings.push("no singular analysis for a linear equation outside BMJ form".into()),
        }
    } else {
        clock.time("singular", || nonlinear_branch(eq, &classification, opts, hint.as_ref(), &mut out, &mut warnings))?;
    }

    if opts.clt {
        if !eq.has_x() {
            warnings.push("--clt requested but the equation has no marking variable x".into());
        } else if let Some((sys, fold)) = out.branch.clone() {
            out.clt = Some(clock.time("clt", || clt::clt(eq, &sys, &fold, opts.moment_terms))?);
        } else {
            warnings.push("no square-root singularity available for the limit law".into());
        }
    }
    out.timing = clock.0;
    out.warnings = warnings;
    Ok(out)
}

fn linear_branch(
    eq: &CatalyticEquation,
    dec: &LinearDecomposition,
    c: &Classification,
    opts: &AnalysisOptions,
    hint: Option<&BigFloat>,
    out: &mut Analysis,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let prec = opts.precision;
    let class = if c.class == EquationClass::GenericMode { EquationClass::LinearGeneric } else { c.class };
    let solution = linear::kernel_solve(dec, class, KERNEL_CHECK_TERMS)?;
    let engine_m0 = engine::solve_series(eq, KERNEL_CHECK_TERMS, 1)?.m0;
    let identity = linear::kernel_identity_check(dec, &solution.u_series, &solution.m0_formula, &engine_m0);
    if !identity.holds() {
        warnings.push(format!("kernel identity fails: {identity:?}"));
    }
    out.kernel = Some(KernelOutcome { solution, identity });
    if class != EquationClass::LinearGeneric {
        return Ok(());
    }
    let (point, fold) = linear::linear_critical_point(dec, class, prec)?;
    if let Some(h) = hint {
        let gap = (&(&point.z0 - h) / h).abs().to_f64();
        if gap > 1e-8 {
            return Err(Error::NoConvergence(format!(
                "kernel branch singularity {} does not match the expected z0 = {}",
                point.z0.to_decimal(20),
                h.to_decimal(20)
            )));
        }
    }
    let expansion = linear::linear_expansion(dec, &fold, prec)?;
    if opts.asymptotics {
        out.asymptotics = Some(linear::linear_asymptotics(dec, &fold, &expansion, opts.asymptotic_terms, prec)?);
    }
    out.branch = Some((linear::kernel_system(dec), fold));
    out.singular = Some(Singular::Linear { point, expansion });
    Ok(())
}

fn nonlinear_branch(
    eq: &CatalyticEquation,
    c: &Classification,
    opts: &AnalysisOptions,
    hint: Option<&BigFloat>,
    out: &mut Analysis,
    warnings: &mut Vec<String>,
) -> Result<()> {
    let prec = opts.precision;
    let (sys, names, reduction): (PolySystem, Vec<&str>, Option<&'static str>) = match c.degeneracy {
        Some(deg) => {
            let (sys, name) = nonlinear::reduced_system(eq, deg);
            (sys, vec![name], Some(name))
        }
        None => {
            out.system_identity = Some(nonlinear::system_identity(eq, SYSTEM_CHECK_TERMS)?);
            if let Some(Some(n)) = out.system_identity {
                warnings.push(format!("f - w*u differs from M(z,0) at [z^{n}]"));
            }
            (derive_system(eq).to_poly_system(), Unknown::ALL.iter().map(|u| u.name()).collect(), None)
        }
    };
    let ns = sys.compile(prec, &BigFloat::one().with_precision(prec));
    let (point, fold) = nonlinear::critical_point(&ns, &names, hint, warnings)?;
    let strongly_connected = out.digraph.as_ref().is_some_and(|g| g.strongly_connected);
    let hypotheses_hold = c.positive
        && reduction.is_none()
        && eq.form() == Form::Bmj
        && strongly_connected
        && c.hypotheses.all_hold();
    if c.positive && reduction.is_none() && !point.certified {
        warnings.push("critical point certificate failed (Perron root or determinant out of tolerance)".into());
    }
    let expansion = nonlinear::puiseux_expansion(&ns, &point, hypotheses_hold, warnings)?;
    if opts.asymptotics {
        let coeffs = nonlinear::observable_float_series(
            &sys,
            opts.asymptotic_terms + 1,
            series_precision(prec),
            &BigFloat::one(),
        )?;
        let (alpha2, singular) = if expansion.three_halves() {
            (5, expansion.a3.clone())
        } else {
            (3, expansion.fit.coeffs[1].clone())
        };
        out.asymptotics = Some(coefficient_asymptotics(&coeffs, &point.z0, alpha2, &singular, prec)?);
    }
    out.branch = Some((sys, fold));
    out.singular = Some(Singular::Nonlinear { point, expansion, reduction });
    Ok(())
}
