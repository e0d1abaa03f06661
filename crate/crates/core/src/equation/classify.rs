use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nonlinear::{derive_system, Unknown};
use crate::poly::{MultiPoly, Var};

use super::model::{CatalyticEquation, Form, HypothesisRecord};

/// `M = Q0 + z*M*Q1 + z*D*Q2` with `Q0, Q1, Q2` free of `M` and `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearDecomposition {
    pub q0: MultiPoly,
    pub q1: MultiPoly,
    pub q2: MultiPoly,
}

impl LinearDecomposition {
    /// Decompose a linear BMJ equation.
    pub fn of(eq: &CatalyticEquation) -> Result<Self> {
        if !eq.is_linear() || eq.form() != Form::Bmj {
            return Err(Error::NotApplicable("kernel decomposition needs a linear equation in BMJ form".into()));
        }
        let q = eq.q();
        let a = q.coefficient(Var::A0, 0).coefficient(Var::A1, 0);
        let q1 = q.coefficient(Var::A0, 1).coefficient(Var::A1, 0);
        let q2 = q.coefficient(Var::A1, 1).coefficient(Var::A0, 0);
        let q0 = eq.f0() + &a.mul_var_pow(Var::Z, 1);
        Ok(LinearDecomposition { q0, q1, q2 })
    }

    /// The right-hand side this decomposition stands for.
    pub fn reconstruct(&self) -> MultiPoly {
        let z = MultiPoly::var(Var::Z);
        &self.q0 + &(&(&z * &MultiPoly::var(Var::A0)) * &self.q1) + (&(&z * &MultiPoly::var(Var::A1)) * &self.q2)
    }

    /// Kernel `K(z,u) = u - z*u*Q1 - z*Q2`.
    pub fn kernel(&self) -> MultiPoly {
        let z = MultiPoly::var(Var::Z);
        let u = MultiPoly::var(Var::U);
        &(&u - &(&(&z * &u) * &self.q1)) - &(&z * &self.q2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EquationClass {
    #[serde(rename = "LINEAR_DEGENERATE_1")]
    LinearDegenerate1,
    #[serde(rename = "LINEAR_DEGENERATE_2")]
    LinearDegenerate2,
    #[serde(rename = "LINEAR_DEGENERATE_3")]
    LinearDegenerate3,
    LinearGeneric,
    NonlinearDegenerate,
    NonlinearGeneric,
    GenericMode,
}

impl EquationClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EquationClass::LinearDegenerate1 => "LINEAR_DEGENERATE_1",
            EquationClass::LinearDegenerate2 => "LINEAR_DEGENERATE_2",
            EquationClass::LinearDegenerate3 => "LINEAR_DEGENERATE_3",
            EquationClass::LinearGeneric => "LINEAR_GENERIC",
            EquationClass::NonlinearDegenerate => "NONLINEAR_DEGENERATE",
            EquationClass::NonlinearGeneric => "NONLINEAR_GENERIC",
            EquationClass::GenericMode => "GENERIC_MODE",
        }
    }

    pub fn is_linear_degenerate(self) -> bool {
        matches!(
            self,
            EquationClass::LinearDegenerate1 | EquationClass::LinearDegenerate2 | EquationClass::LinearDegenerate3
        )
    }
}

impl fmt::Display for EquationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which reduction applies to a degenerate nonlinear equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NonlinearDegeneracy {
    /// `Q_u = 0` and `F0' = 0`: `w = 0`, `f = F0 + z*Q(f, 0, z)`.
    WVanishes,
    /// `Q_u = Q_M = 0`, `F0' != 0`: `u = z*Q_D(F0'(u), z)`.
    OnlyDividedDifference,
    /// `Q_D = 0`: the catalytic variable can be set to 0.
    NoDividedDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: EquationClass,
    pub degeneracy: Option<NonlinearDegeneracy>,
    pub form: Form,
    pub positive: bool,
    pub linear: bool,
    pub hypotheses: HypothesisRecord,
    pub decomposition: Option<LinearDecomposition>,
    pub warnings: Vec<String>,
}

/// Pure function of the equation's right-hand side.
pub fn classify(eq: &CatalyticEquation) -> Classification {
    let flags = eq.flags();
    let mut out = Classification {
        class: EquationClass::GenericMode,
        degeneracy: None,
        form: eq.form(),
        positive: flags.positive,
        linear: flags.linear,
        hypotheses: flags.hypotheses.clone(),
        decomposition: None,
        warnings: Vec::new(),
    };
    if !flags.positive {
        out.warnings.push(
            "equation has negative coefficients: positivity certificates unavailable, analysed in generic mode".into(),
        );
        return out;
    }
    if flags.linear {
        if eq.form() == Form::Generalized {
            out.warnings.push(
                "linear equation not in BMJ form: the kernel decomposition does not apply, using generic mode".into(),
            );
            return out;
        }
        let dec = LinearDecomposition::of(eq).expect("linear BMJ");
        out.class = if dec.q0.is_free_of(Var::U) && dec.q1.is_free_of(Var::U) {
            EquationClass::LinearDegenerate1
        } else if dec.q1.is_free_of(Var::U) && dec.q2.degree(Var::U).unwrap_or(0) <= 1 {
            EquationClass::LinearDegenerate2
        } else if dec.q2.terms().all(|(e, _)| e[Var::U.index()] >= 1) {
            EquationClass::LinearDegenerate3
        } else {
            EquationClass::LinearGeneric
        };
        out.decomposition = Some(dec);
        return out;
    }
    out.class = EquationClass::NonlinearGeneric;
    if eq.form() == Form::Bmj {
        let q = eq.q();
        let f0_const = eq.f0().is_free_of(Var::U);
        let qu_zero = q.partial(Var::U).is_zero();
        let qa0_zero = q.partial(Var::A0).is_zero();
        let qa1_zero = q.partial(Var::A1).is_zero();
        let deg = if qu_zero && f0_const {
            Some(NonlinearDegeneracy::WVanishes)
        } else if qu_zero && qa0_zero {
            Some(NonlinearDegeneracy::OnlyDividedDifference)
        } else if qa1_zero {
            Some(NonlinearDegeneracy::NoDividedDifference)
        } else {
            None
        };
        if deg.is_some() {
            out.class = EquationClass::NonlinearDegenerate;
            out.degeneracy = deg;
        }
    } else {
        out.warnings.push(
            "GENERALIZED form: theorem hypotheses are stated for BMJ form; conclusions are checked numerically".into(),
        );
    }
    out
}

/// Dependency digraph of the `(f, u, w)` system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyDigraph {
    /// `(a, b)` means the right-hand side for `b` depends on `a`.
    pub edges: Vec<(Unknown, Unknown)>,
    pub strongly_connected: bool,
}

pub fn dependency_digraph(eq: &CatalyticEquation) -> Result<DependencyDigraph> {
    if eq.is_linear() {
        return Err(Error::NotApplicable("dependency digraph is defined for nonlinear equations".into()));
    }
    let sys = derive_system(eq);
    let mut g = DiGraph::<Unknown, ()>::new();
    let nodes = Unknown::ALL.map(|u| g.add_node(u));
    let mut edges = Vec::new();
    for (j, target) in Unknown::ALL.iter().enumerate() {
        for (i, source) in Unknown::ALL.iter().enumerate() {
            if sys.rhs(*target).depends_on(source.var()) {
                edges.push((*source, *target));
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let strongly_connected = tarjan_scc(&g).len() == 1;
    Ok(DependencyDigraph { edges, strongly_connected })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class_of(t: &str) -> EquationClass {
        classify(&CatalyticEquation::parse(t).unwrap()).class
    }

    #[test]
    fn corpus_style_classes() {
        assert_eq!(class_of("M = 1 + z*(u+1)*M + z*D"), EquationClass::LinearGeneric);
        assert_eq!(class_of("M = u + z^2*M + z*D"), EquationClass::LinearDegenerate2);
        assert_eq!(class_of("M = 1 + z*(z+u)*M + z*u*D"), EquationClass::LinearDegenerate3);
        assert_eq!(class_of("M = 1"), EquationClass::LinearDegenerate1);
        assert_eq!(class_of("M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D"), EquationClass::NonlinearGeneric);
        assert_eq!(class_of("M = 1 - z*M^2 + z*D"), EquationClass::GenericMode);
        assert_eq!(class_of("M = 1 + z*M^2"), EquationClass::NonlinearDegenerate);
    }

    #[test]
    fn decomposition_reconstructs() {
        let eq = CatalyticEquation::parse("M = 1 + z*(u+1)*M + z*D").unwrap();
        let c = classify(&eq);
        let d = c.decomposition.unwrap();
        assert_eq!(d.q0, MultiPoly::one());
        assert_eq!(d.q1, MultiPoly::var(Var::U) + MultiPoly::one());
        assert_eq!(d.q2, MultiPoly::one());
        assert_eq!(&d.reconstruct(), eq.rhs());
    }

    #[test]
    fn digraph_connectivity() {
        let maps = CatalyticEquation::parse("M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D").unwrap();
        let g = dependency_digraph(&maps).unwrap();
        assert!(g.strongly_connected);
        for e in [(Unknown::W, Unknown::F), (Unknown::F, Unknown::U), (Unknown::U, Unknown::W)] {
            assert!(g.edges.contains(&e), "{e:?}");
        }
        let q = CatalyticEquation::parse("M = 1 + z^2*D^2").unwrap();
        let g = dependency_digraph(&q).unwrap();
        assert!(!g.strongly_connected);
        assert_eq!(g.edges, vec![(Unknown::W, Unknown::F), (Unknown::W, Unknown::U)]);
        let lin = CatalyticEquation::parse("M = 1 + z*M").unwrap();
        assert!(dependency_digraph(&lin).is_err());
    }
}
