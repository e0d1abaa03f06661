//! Serialization helpers: floats as decimal strings, rationals as `"p/q"`.

use serde::ser::{SerializeSeq, Serializer};

use crate::numeric::{rat_to_string, BigFloat, Rat};

/// Significant decimal digits carried by a value at its precision, less a guard.
pub fn digits_for(prec: usize) -> usize {
    ((prec as f64 * std::f64::consts::LOG10_2) as usize).saturating_sub(3).max(10)
}

pub fn float_string(x: &BigFloat) -> String {
    x.to_decimal(digits_for(x.precision()))
}

pub fn ser_float<S: Serializer>(x: &BigFloat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&float_string(x))
}

pub fn ser_opt_float<S: Serializer>(x: &Option<BigFloat>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&float_string(v)),
        None => s.serialize_none(),
    }
}

pub fn ser_floats<S: Serializer>(xs: &[BigFloat], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&float_string(x))?;
    }
    seq.end()
}

pub fn ser_matrix<S: Serializer>(m: &[Vec<BigFloat>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(float_string).collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

pub fn ser_rat<S: Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(x))
}

pub fn ser_rats<S: Serializer>(xs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&rat_to_string(x))?;
    }
    seq.end()
}

// ---------------------------------------------------------------------------
// Report

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{Analysis, Singular};
use crate::equation::{HypothesisRecord, NonlinearDegeneracy};

/// Schema tag written into every report.
pub const SCHEMA: &str = "catalytic-report/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub class: String,
    pub form: String,
    pub positive: bool,
    pub linear: bool,
    pub degeneracy: Option<NonlinearDegeneracy>,
    pub hypotheses: HypothesisRecord,
    pub strongly_connected: Option<bool>,
    /// Edges `"a->b"` of the dependency digraph.
    pub digraph_edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemIdentityReport {
    pub terms: usize,
    pub first_mismatch: Option<usize>,
}

/// Serialized view of an [`Analysis`]; field names are fixed (see `docs/report-schema.md`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub equation: String,
    pub u_shift: String,
    pub precision: usize,
    pub classification: ClassificationReport,
    pub coefficients: Option<Vec<String>>,
    pub kernel: Option<Value>,
    pub system_identity: Option<SystemIdentityReport>,
    pub critical_point: Option<Value>,
    pub puiseux: Option<Value>,
    pub asymptotics: Option<Value>,
    pub clt: Option<Value>,
    /// Seconds per stage, as decimal strings.
    pub timing: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    /// Copy with timing removed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        AnalysisReport { timing: BTreeMap::new(), ..self.clone() }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

impl From<&Analysis> for AnalysisReport {
    fn from(a: &Analysis) -> Self {
        let c = &a.classification;
        let classification = ClassificationReport {
            class: c.class.as_str().to_string(),
            form: c.form.to_string(),
            positive: c.positive,
            linear: c.linear,
            degeneracy: c.degeneracy,
            hypotheses: c.hypotheses.clone(),
            strongly_connected: a.digraph.as_ref().map(|g| g.strongly_connected),
            digraph_edges: a
                .digraph
                .as_ref()
                .map(|g| g.edges.iter().map(|(s, t)| format!("{s}->{t}")).collect())
                .unwrap_or_default(),
        };
        let kernel = a.kernel.as_ref().map(|k| {
            json!({
                "class": k.solution.class.as_str(),
                "rational_form": k.solution.rational_form,
                "u_series": k.solution.u_series.coeffs().iter().take(12).map(rat_to_string).collect::<Vec<_>>(),
                "identity": k.identity,
            })
        });
        let (critical_point, puiseux) = match &a.singular {
            Some(Singular::Linear { point, expansion }) => (Some(to_value(point)), Some(to_value(expansion))),
            Some(Singular::Nonlinear { point, expansion, reduction }) => {
                let mut p = to_value(point);
                p["reduction"] = json!(reduction);
                (Some(p), Some(to_value(expansion)))
            }
            None => (None, None),
        };
        AnalysisReport {
            schema: SCHEMA.to_string(),
            equation: a.equation.to_text(),
            u_shift: rat_to_string(a.equation.u_shift()),
            precision: a.precision,
            classification,
            coefficients: a.coefficients.as_ref().map(|s| s.coeffs().iter().map(rat_to_string).collect()),
            kernel,
            system_identity: a.system_identity.map(|m| SystemIdentityReport {
                terms: crate::analysis::SYSTEM_CHECK_TERMS,
                first_mismatch: m,
            }),
            critical_point,
            puiseux,
            asymptotics: a.asymptotics.as_ref().map(to_value),
            clt: a.clt.as_ref().map(to_value),
            timing: a.timing.iter().map(|(k, v)| (k.clone(), format!("{v:.6}"))).collect(),
            warnings: a.warnings.clone(),
        }
    }
}

fn short(x: &BigFloat) -> String {
    x.to_decimal(20)
}

/// Human-readable summary.
pub fn render_text(a: &Analysis) -> String {
    let mut s = String::new();
    let c = &a.classification;
    let _ = writeln!(s, "equation      M = {}", a.equation.rhs());
    if !num_traits::Zero::is_zero(a.equation.u_shift()) {
        let _ = writeln!(s, "u shift       {}", rat_to_string(a.equation.u_shift()));
    }
    let _ = writeln!(s, "class         {} ({} form, positive: {})", c.class, c.form, c.positive);
    if let Some(d) = c.degeneracy {
        let _ = writeln!(s, "degeneracy    {d:?}");
    }
    if let Some(g) = &a.digraph {
        let _ = writeln!(s, "digraph       strongly connected: {}", g.strongly_connected);
    }
    if let Some(m) = &a.coefficients {
        let list: Vec<String> = m.coeffs().iter().map(rat_to_string).collect();
        let _ = writeln!(s, "M(z,0)        {}", list.join(", "));
    }
    if let Some(k) = &a.kernel {
        if let Some(rf) = &k.solution.rational_form {
            let _ = writeln!(s, "M(z,0) =      {rf}");
        }
        let _ = writeln!(s, "kernel check  {}", if k.identity.holds() { "ok" } else { "FAILED" });
    }
    if let Some(id) = a.system_identity {
        let _ = writeln!(s, "f - w*u       {}", match id {
            None => "equals M(z,0)".to_string(),
            Some(n) => format!("differs at [z^{n}]"),
        });
    }
    match &a.singular {
        Some(Singular::Linear { point, expansion }) => {
            let _ = writeln!(s, "z0            {}", short(&point.z0));
            let _ = writeln!(s, "u0            {}", short(&point.u0));
            let _ = writeln!(s, "a0, a1, a2    {}, {}, {}", short(&expansion.a0), short(&expansion.a1), short(&expansion.a2));
        }
        Some(Singular::Nonlinear { point, expansion, .. }) => {
            let _ = writeln!(s, "z0            {}", short(&point.z0));
            for (n, v) in point.unknowns.iter().zip(&point.values) {
                let _ = writeln!(s, "  {n:<12}{}", short(v));
            }
            let _ = writeln!(s, "det(I-J)      {}", point.det_residual.to_decimal(3));
            if let Some(p) = &point.perron_root {
                let _ = writeln!(s, "Perron root   {} (certified: {})", short(p), point.certified);
            }
            let _ = writeln!(s, "a0, a2, a3    {}, {}, {}", short(&expansion.a0), short(&expansion.a2), short(&expansion.a3));
            let _ = writeln!(s, "|y1|          {}", expansion.y1_residual.to_decimal(3));
        }
        None => {}
    }
    if let Some(f) = &a.asymptotics {
        let _ = writeln!(s, "growth        {}", short(&f.growth));
        let _ = writeln!(s, "exponent      {}", f.exponent);
        let _ = writeln!(s, "period        {} (residues {:?})", f.periodicity.period, f.periodicity.residues);
        for k in &f.constants {
            let _ = writeln!(
                s,
                "c[{}]          {} (window change {})",
                k.residue,
                short(&k.value),
                k.window_relative_change.to_decimal(3)
            );
        }
        if let (Some(t), Some(e)) = (&f.transfer_constant, &f.transfer_relative_error) {
            let _ = writeln!(s, "transfer c    {} (relative gap {})", short(t), e.to_decimal(3));
        }
    }
    if let Some(r) = &a.clt {
        let d = &r.derivatives;
        let _ = writeln!(s, "rho(1)        {}", short(&d.rho1));
        let _ = writeln!(s, "rho'(1)       {} (+- {})", short(&d.d1), d.d1_error.to_decimal(3));
        let _ = writeln!(s, "rho''(1)      {} (+- {})", short(&d.d2), d.d2_error.to_decimal(3));
        let _ = writeln!(s, "mu            {}", short(&r.mu));
        let _ = writeln!(s, "sigma^2       {}", short(&r.sigma2));
        let _ = writeln!(s, "CLT applies   {}", r.clt_applicable);
        if let Some(m) = r.empirical.last() {
            let _ = writeln!(s, "E[X_{}]       {}  Var {}", m.n, rat_to_string(&m.mean), rat_to_string(&m.variance));
        }
    }
    for (k, v) in &a.timing {
        let _ = writeln!(s, "time {k:<16} {v:.3}s");
    }
    for w in &a.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}
