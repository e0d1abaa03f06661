//! Built-in equations with machine-readable expected values.
//!
//! Every entry is a plain equation file. Lines starting with `#!` carry
//! metadata and are comments to the equation parser:
//!
//! ```text
//! #! name = motzkin
//! #! u-shift = 0
//! #! expect z0 = 1/3 @ 1e-20
//! #! expect c = 3*sqrt(3)/(2*sqrt(pi)) @ 5e-3 rel
//! M = 1 + z*(u+1)*M + z*D
//! ```
//!
//! `u-shift = c` records that the stored equation is already in the variable
//! `u - c` of the original problem. Expected values are exact strings:
//! rationals, radical expressions (see [`expr`]), booleans or lists.

pub mod expr;

use num_traits::Zero;
use serde::Serialize;

use crate::analysis::{analyze, Analysis, AnalysisOptions, Singular};
use crate::equation::parser::parse_poly;
use crate::equation::CatalyticEquation;
use crate::error::{Error, Result};
use crate::numeric::{parse_rat, rat_to_string, BigFloat, Rat, DEFAULT_PRECISION};
use crate::poly::Var;

const FILES: &[(&str, &str)] = &[
    ("bipartite-v", include_str!("../../corpus/bipartite-v.cat")),
    ("dyck", include_str!("../../corpus/dyck.cat")),
    ("lattice-deg-2", include_str!("../../corpus/lattice-deg-2.cat")),
    ("lattice-deg-2-k2", include_str!("../../corpus/lattice-deg-2-k2.cat")),
    ("lattice-deg-2-k3", include_str!("../../corpus/lattice-deg-2-k3.cat")),
    ("lattice-deg-3", include_str!("../../corpus/lattice-deg-3.cat")),
    ("motzkin", include_str!("../../corpus/motzkin.cat")),
    ("planar-maps", include_str!("../../corpus/planar-maps.cat")),
    ("planar-maps-vertices", include_str!("../../corpus/planar-maps-vertices.cat")),
    ("simple-maps", include_str!("../../corpus/simple-maps.cat")),
    ("triangulations-tilde", include_str!("../../corpus/triangulations-tilde.cat")),
    ("two-connected", include_str!("../../corpus/two-connected.cat")),
];

/// Quantities an entry may pin down.
pub const VOCABULARY: &[&str] = &[
    "class",
    "form",
    "positive",
    "m0",
    "kernel_identity",
    "rational_numerator",
    "rational_denominator",
    "system_identity",
    "strongly_connected",
    "certified",
    "z0",
    "u0",
    "a0",
    "a1",
    "a2",
    "a3",
    "three_halves",
    "exponent",
    "period",
    "residues",
    "c",
    "transfer_gap",
    "rho1",
    "rho_d1",
    "rho_d2",
    "mu",
    "sigma2",
    "clt_applicable",
    "mean_linear",
    "variance_per_n",
    "rho_decreasing",
    "quartic",
    "warning",
];

const ASYMPTOTIC_KEYS: &[&str] = &["exponent", "period", "residues", "c", "transfer_gap"];
const CLT_KEYS: &[&str] =
    &["rho1", "rho_d1", "rho_d2", "mu", "sigma2", "clt_applicable", "mean_linear", "variance_per_n", "rho_decreasing", "quartic"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ToleranceKind {
    Absolute,
    Relative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub value: f64,
    pub kind: ToleranceKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub key: String,
    pub value: String,
    pub tolerance: Option<Tolerance>,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub note: String,
    pub text: String,
    pub equation: CatalyticEquation,
    pub expected: Vec<Expectation>,
}

impl CorpusEntry {
    pub fn expectation(&self, key: &str) -> Option<&Expectation> {
        self.expected.iter().find(|e| e.key == key)
    }
}

/// An equation file: metadata plus the parsed equation with its recorded shift.
#[derive(Clone, Debug)]
pub struct Document {
    pub name: Option<String>,
    pub note: String,
    pub equation: CatalyticEquation,
    pub expected: Vec<Expectation>,
}

fn parse_tolerance(s: &str) -> Result<Tolerance> {
    let bad = || Error::Parse { offset: 0, line: 0, column: 0, message: format!("bad tolerance `{s}`") };
    let mut parts = s.split_whitespace();
    let value: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let kind = match parts.next() {
        None => ToleranceKind::Absolute,
        Some("rel") => ToleranceKind::Relative,
        Some(_) => return Err(bad()),
    };
    Ok(Tolerance { value, kind })
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut name = None;
    let mut note = String::new();
    let mut shift = Rat::zero();
    let mut expected = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(meta) = line.trim_start().strip_prefix("#!") else { continue };
        let err = |m: String| Error::Parse { offset: 0, line: i + 1, column: 1, message: m };
        let (key, value) = meta.split_once('=').ok_or_else(|| err(format!("expected `key = value` in `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["name"] => name = Some(value.to_string()),
            ["note"] => note = value.to_string(),
            ["u-shift"] => shift = parse_rat(value).ok_or_else(|| err(format!("bad shift `{value}`")))?,
            ["expect", k] => {
                if !VOCABULARY.contains(k) {
                    return Err(err(format!("unknown expected quantity `{k}`")));
                }
                let (v, tol) = match value.rsplit_once('@') {
                    Some((v, t)) => (v.trim(), Some(parse_tolerance(t.trim()).map_err(|e| err(e.to_string()))?)),
                    None => (value, None),
                };
                expected.push(Expectation { key: k.to_string(), value: v.to_string(), tolerance: tol });
            }
            _ => return Err(err(format!("unknown directive `{key}`"))),
        }
    }
    let equation = CatalyticEquation::parse(text)?.with_recorded_shift(shift);
    Ok(Document { name, note, equation, expected })
}

pub fn list() -> Vec<&'static str> {
    FILES.iter().map(|(n, _)| *n).collect()
}

/// Source text of an entry.
pub fn source(name: &str) -> Result<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

pub fn load(name: &str) -> Result<CorpusEntry> {
    let text = source(name)?;
    let doc = parse_document(text)?;
    Ok(CorpusEntry {
        name: doc.name.unwrap_or_else(|| name.to_string()),
        note: doc.note,
        text: text.to_string(),
        equation: doc.equation,
        expected: doc.expected,
    })
}

/// Outcome of one expected quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub key: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: Option<Tolerance>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub entry: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Analysis error, in which case every check fails.
    pub error: Option<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

/// Options that produce every quantity the entry expects.
pub fn options_for(entry: &CorpusEntry, precision: usize) -> AnalysisOptions {
    let has = |keys: &[&str]| entry.expected.iter().any(|e| keys.contains(&e.key.as_str()));
    let m0_len = entry.expectation("m0").map_or(0, |e| e.value.split(',').count());
    AnalysisOptions {
        precision,
        coefficients: Some(m0_len.max(1)),
        asymptotics: has(ASYMPTOTIC_KEYS),
        clt: has(CLT_KEYS),
        ..AnalysisOptions::default()
    }
}

pub fn validate(name: &str) -> Result<ValidationReport> {
    validate_at(name, DEFAULT_PRECISION)
}

pub fn validate_at(name: &str, precision: usize) -> Result<ValidationReport> {
    let entry = load(name)?;
    let opts = options_for(&entry, precision);
    Ok(match analyze(&entry.equation, &opts) {
        Ok(a) => check_analysis(&entry, &a),
        Err(e) => ValidationReport {
            entry: entry.name.clone(),
            checks: entry
                .expected
                .iter()
                .map(|x| Check {
                    key: x.key.clone(),
                    expected: x.value.clone(),
                    observed: "not computed".into(),
                    tolerance: x.tolerance.clone(),
                    pass: false,
                })
                .collect(),
            warnings: Vec::new(),
            error: Some(e.to_string()),
        },
    })
}

/// Compare an analysis against the entry's expectations.
pub fn check_analysis(entry: &CorpusEntry, a: &Analysis) -> ValidationReport {
    let checks = entry.expected.iter().map(|x| check_one(x, entry, a, a.precision)).collect();
    ValidationReport { entry: entry.name.clone(), checks, warnings: a.warnings.clone(), error: None }
}

enum Observed {
    Number(BigFloat),
    Text(String),
    Missing,
}

fn observe(key: &str, a: &Analysis, prec: usize) -> Observed {
    use Observed::*;
    let text = |s: String| Text(s);
    let flag = |b: bool| Text(b.to_string());
    let opt = |v: Option<&BigFloat>| v.map_or(Missing, |x| Number(x.clone()));
    let c = &a.classification;
    let clt = a.clt.as_ref();
    let asy = a.asymptotics.as_ref();
    match key {
        "class" => text(c.class.as_str().to_string()),
        "form" => text(c.form.to_string()),
        "positive" => flag(c.positive),
        "m0" => a.coefficients.as_ref().map_or(Missing, |s| {
            text(s.coeffs().iter().map(rat_to_string).collect::<Vec<_>>().join(", "))
        }),
        "kernel_identity" => a.kernel.as_ref().map_or(Missing, |k| flag(k.identity.holds())),
        "system_identity" => a.system_identity.map_or(Missing, |m| flag(m.is_none())),
        "strongly_connected" => a.digraph.as_ref().map_or(Missing, |g| flag(g.strongly_connected)),
        "certified" => match &a.singular {
            Some(Singular::Nonlinear { point, .. }) => flag(point.certified),
            _ => Missing,
        },
        "z0" => opt(a.singular.as_ref().map(|s| s.z0())),
        "u0" => match &a.singular {
            Some(Singular::Linear { point, .. }) => Number(point.u0.clone()),
            Some(Singular::Nonlinear { point, .. }) => opt(point.value(crate::nonlinear::Unknown::U)),
            None => Missing,
        },
        "a0" | "a1" | "a2" | "a3" => {
            let k: usize = key[1..].parse().unwrap();
            match &a.singular {
                Some(Singular::Linear { expansion, .. }) => opt(expansion.fit.coeffs.get(k)),
                Some(Singular::Nonlinear { expansion, .. }) => opt(expansion.fit.coeffs.get(k)),
                None => Missing,
            }
        }
        "three_halves" => match &a.singular {
            Some(Singular::Nonlinear { expansion, .. }) => flag(expansion.three_halves()),
            _ => Missing,
        },
        "exponent" => asy.map_or(Missing, |f| text(f.exponent.clone())),
        "period" => asy.map_or(Missing, |f| text(f.periodicity.period.to_string())),
        "residues" => asy.map_or(Missing, |f| {
            text(f.periodicity.residues.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))
        }),
        "c" => opt(asy.and_then(|f| f.constants.first()).map(|k| &k.value)),
        "transfer_gap" => opt(asy.and_then(|f| f.transfer_relative_error.as_ref())),
        "rho1" => opt(clt.map(|r| &r.derivatives.rho1)),
        "rho_d1" => opt(clt.map(|r| &r.derivatives.d1)),
        "rho_d2" => opt(clt.map(|r| &r.derivatives.d2)),
        "mu" => opt(clt.map(|r| &r.mu)),
        "sigma2" => opt(clt.map(|r| &r.sigma2)),
        "clt_applicable" => clt.map_or(Missing, |r| flag(r.clt_applicable)),
        "rho_decreasing" => clt.map_or(Missing, |r| flag(r.rho_decreasing)),
        "variance_per_n" => clt.and_then(|r| r.empirical.last()).map_or(Missing, |m| {
            let v = BigFloat::from_rat(&m.variance, prec);
            Number(&v / &BigFloat::from_i64(m.n.max(1) as i64, prec))
        }),
        "warning" => text(a.warnings.join(" | ")),
        _ => Missing,
    }
}

fn check_one(x: &Expectation, entry: &CorpusEntry, a: &Analysis, prec: usize) -> Check {
    let mut check =
        Check { key: x.key.clone(), expected: x.value.clone(), observed: String::new(), tolerance: x.tolerance.clone(), pass: false };
    let (observed, pass) = match x.key.as_str() {
        "rational_numerator" | "rational_denominator" => rational_check(x, entry, a),
        "mean_linear" => mean_check(x, a),
        "quartic" => quartic_check(x, a, prec),
        "warning" => {
            let Observed::Text(all) = observe("warning", a, prec) else { unreachable!() };
            let pass = all.to_lowercase().contains(&x.value.to_lowercase());
            (all, pass)
        }
        key => match observe(key, a, prec) {
            Observed::Missing => ("not computed".into(), false),
            Observed::Text(t) => {
                let pass = t == x.value;
                (t, pass)
            }
            Observed::Number(v) => match expr::evaluate(&x.value, prec) {
                Ok(target) => {
                    let pass = within(&v, &target, x.tolerance.as_ref());
                    (v.to_decimal(24), pass)
                }
                Err(e) => (format!("bad expected value: {e}"), false),
            },
        },
    };
    check.observed = observed;
    check.pass = pass;
    check
}

fn within(v: &BigFloat, target: &BigFloat, tol: Option<&Tolerance>) -> bool {
    let gap = (v - target).abs();
    match tol {
        None => gap.is_zero(),
        Some(Tolerance { value, kind: ToleranceKind::Absolute }) => gap.to_f64() <= *value,
        Some(Tolerance { value, kind: ToleranceKind::Relative }) => gap.to_f64() <= *value * target.abs().to_f64(),
    }
}

/// `num_obs * den_exp == num_exp * den_obs`, with the expected pair read from the entry.
fn rational_check(x: &Expectation, entry: &CorpusEntry, a: &Analysis) -> (String, bool) {
    let Some(rf) = a.kernel.as_ref().and_then(|k| k.solution.rational_form.as_ref()) else {
        return ("not computed".into(), false);
    };
    let observed = if x.key == "rational_numerator" { rf.num.to_string() } else { rf.den.to_string() };
    let parse = |k: &str| entry.expectation(k).map(|e| parse_poly(&e.value));
    let (Some(Ok(num)), Some(Ok(den))) = (parse("rational_numerator"), parse("rational_denominator")) else {
        return (observed, false);
    };
    let pass = &rf.num * &den == &num * &rf.den;
    (observed, pass)
}

/// `E[X_n] = s*n + t` exactly for every computed `n`, written `s, t`.
fn mean_check(x: &Expectation, a: &Analysis) -> (String, bool) {
    let Some(r) = a.clt.as_ref() else { return ("not computed".into(), false) };
    let parts: Vec<Option<Rat>> = x.value.split(',').map(parse_rat).collect();
    let [Some(s), Some(t)] = parts.as_slice() else { return ("bad expected value".into(), false) };
    let bad = r.empirical.iter().find(|m| m.mean != s * Rat::from_integer(m.n.into()) + t);
    match bad {
        None => (format!("exact for n < {}", r.empirical.last().map_or(0, |m| m.n + 1)), !r.empirical.is_empty()),
        Some(m) => (format!("E[X_{}] = {}", m.n, rat_to_string(&m.mean)), false),
    }
}

/// Largest `|P(x, rho(x))|` at `x = 9/10` and `x = 11/10`.
fn quartic_check(x: &Expectation, a: &Analysis, prec: usize) -> (String, bool) {
    let Some(r) = a.clt.as_ref() else { return ("not computed".into(), false) };
    let Ok(p) = parse_poly(&x.value) else { return ("bad expected value".into(), false) };
    let cp = p.compile(prec);
    let mut worst = BigFloat::zero().with_precision(prec);
    let mut count = 0;
    let points = [crate::numeric::rat(9, 10), crate::numeric::rat(11, 10)];
    for s in r.rho_grid.iter().filter(|s| points.contains(&s.x)) {
        let mut pt: [BigFloat; 5] = Default::default();
        for v in pt.iter_mut() {
            *v = BigFloat::zero().with_precision(prec);
        }
        pt[Var::Z.index()] = s.rho.clone();
        pt[Var::X.index()] = BigFloat::from_rat(&s.x, prec);
        worst = worst.max(cp.eval(&pt).abs());
        count += 1;
    }
    let tol = x.tolerance.as_ref().map_or(0.0, |t| t.value);
    (format!("max residual {} at {count} points", worst.to_decimal(3)), count > 0 && worst.to_f64() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        for name in list() {
            let e = load(name).unwrap();
            assert_eq!(e.name, name);
            assert!(!e.expected.is_empty(), "{name}");
        }
        assert_eq!(load("no-such").unwrap_err().code(), "UNKNOWN_ENTRY");
    }

    #[test]
    fn directives_are_checked() {
        assert!(parse_document("#! expect colour = red\nM = 1").is_err());
        assert!(parse_document("#! bogus = 1\nM = 1").is_err());
        let d = parse_document("#! u-shift = 1\n#! expect z0 = 1/3 @ 1e-9 rel\nM = 1 + z*M").unwrap();
        assert_eq!(d.equation.u_shift(), &crate::numeric::int(1));
        assert_eq!(d.expected[0].tolerance, Some(Tolerance { value: 1e-9, kind: ToleranceKind::Relative }));
    }
}
