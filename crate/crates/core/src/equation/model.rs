use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::Rat;
use crate::poly::{MultiPoly, Var};

use super::parser::parse_rhs;

/// How the right-hand side is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    /// `M = F0(u, x) + z*Q(M, D, z, u, x)`.
    #[serde(rename = "BMJ")]
    Bmj,
    /// `M = R(M, D, z, u, x)` where some `M`/`D` term carries no factor `z`.
    #[serde(rename = "GENERALIZED")]
    Generalized,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Bmj => "BMJ",
            Form::Generalized => "GENERALIZED",
        })
    }
}

/// Structural hypotheses used by the nonlinear theorem.
///
/// The last two only make sense in BMJ form and are `None` otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub q_a1_nonzero: bool,
    pub q_a0u_nonzero: bool,
    pub nonlinear: bool,
    pub f0_prime_at_zero_vanishes: Option<bool>,
    pub q_a1_at_origin_nonzero: Option<bool>,
}

impl HypothesisRecord {
    /// The extra hypotheses that force `y1 = 0` and `a3 > 0`.
    pub fn extra_hold(&self) -> bool {
        self.f0_prime_at_zero_vanishes == Some(true) && self.q_a1_at_origin_nonzero == Some(true)
    }

    pub fn all_hold(&self) -> bool {
        self.q_a1_nonzero && self.q_a0u_nonzero && self.nonlinear && self.extra_hold()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationFlags {
    /// Every expanded coefficient is nonnegative.
    pub positive: bool,
    /// Total degree in `(M, D)` is at most one.
    pub linear: bool,
    pub hypotheses: HypothesisRecord,
}

/// A parsed catalytic equation `M = R`.
///
/// Flags are derived from the right-hand side and never supplied by callers.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalyticEquation {
    rhs: MultiPoly,
    form: Form,
    f0: MultiPoly,
    q: MultiPoly,
    flags: EquationFlags,
    u_shift: Rat,
}

fn has_alpha(e: &crate::poly::Exps) -> bool {
    e[Var::A0.index()] > 0 || e[Var::A1.index()] > 0
}

impl CatalyticEquation {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_rhs(parse_rhs(text)?))
    }

    pub fn from_rhs(rhs: MultiPoly) -> Self {
        let generalized = rhs.terms().any(|(e, _)| has_alpha(e) && e[Var::Z.index()] == 0);
        let (form, f0, q) = if generalized {
            (Form::Generalized, MultiPoly::zero(), rhs.clone())
        } else {
            let f0 = rhs.coefficient(Var::Z, 0);
            let q = (&rhs - &f0).div_var_pow(Var::Z, 1).expect("remaining terms carry z");
            (Form::Bmj, f0, q)
        };
        let flags = compute_flags(form, &f0, &q, &rhs);
        CatalyticEquation { rhs, form, f0, q, flags, u_shift: Rat::zero() }
    }

    /// Right-hand side `R`, equal to `F0 + z*Q` in BMJ form.
    pub fn rhs(&self) -> &MultiPoly {
        &self.rhs
    }

    pub fn form(&self) -> Form {
        self.form
    }

    /// `F0(u, x)`; zero in GENERALIZED form.
    pub fn f0(&self) -> &MultiPoly {
        &self.f0
    }

    /// `Q` in BMJ form, `R` in GENERALIZED form.
    pub fn q(&self) -> &MultiPoly {
        &self.q
    }

    pub fn flags(&self) -> &EquationFlags {
        &self.flags
    }

    pub fn is_positive(&self) -> bool {
        self.flags.positive
    }

    pub fn is_linear(&self) -> bool {
        self.flags.linear
    }

    pub fn has_x(&self) -> bool {
        self.rhs.depends_on(Var::X)
    }

    /// Total shift applied to `u` so far: the stored equation is in the variable
    /// `u' = u - shift` of the original problem.
    pub fn u_shift(&self) -> &Rat {
        &self.u_shift
    }

    /// Value of the stored `u` that corresponds to `u = 1` of the original equation.
    pub fn original_u_one(&self) -> Rat {
        Rat::one() - &self.u_shift
    }

    /// Substitute `u -> u + c`.
    ///
    /// The input's `D` is read as the divided difference at `u = c`, which
    /// becomes the ordinary divided difference at 0 after the substitution.
    pub fn shift_u(&self, c: &Rat) -> Self {
        let mut eq = Self::from_rhs(self.rhs.shift_u(c));
        eq.u_shift = &self.u_shift + c;
        eq
    }

    /// Record an already-applied shift (used for pre-shifted stored equations).
    pub fn with_recorded_shift(mut self, c: Rat) -> Self {
        self.u_shift = c;
        self
    }

    /// Replace `x` by a rational constant.
    pub fn specialize_x(&self, x: &Rat) -> Self {
        let mut eq = Self::from_rhs(self.rhs.eval_partial(&[(Var::X, x.clone())]));
        eq.u_shift = self.u_shift.clone();
        eq
    }

    /// Replace `z` by `z^k` (changes the period of the solution).
    pub fn substitute_z_power(&self, k: u32) -> Self {
        let rhs = self.rhs.substitute(Var::Z, &MultiPoly::var(Var::Z).pow(k));
        let mut eq = Self::from_rhs(rhs);
        eq.u_shift = self.u_shift.clone();
        eq
    }

    /// Largest power of `u` appearing in `R`.
    pub fn max_u_degree(&self) -> u32 {
        self.rhs.degree(Var::U).unwrap_or(0)
    }

    /// Text form that reparses to the same polynomial.
    pub fn to_text(&self) -> String {
        format!("M = {}", self.rhs)
    }
}

impl fmt::Display for CatalyticEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn compute_flags(form: Form, f0: &MultiPoly, q: &MultiPoly, rhs: &MultiPoly) -> EquationFlags {
    let positive = rhs.all_nonnegative();
    let linear = rhs.total_degree(&[Var::A0, Var::A1]).unwrap_or(0) <= 1;
    let q_a1 = q.partial(Var::A1);
    let (f0_prime, q_a1_origin) = match form {
        Form::Bmj => {
            let fp = f0.partial(Var::U).eval_partial(&[(Var::U, Rat::zero())]);
            let f00 = f0.eval_partial(&[(Var::U, Rat::zero())]);
            let at = q_a1
                .substitute(Var::A0, &f00)
                .eval_partial(&[(Var::A1, Rat::zero()), (Var::Z, Rat::zero()), (Var::U, Rat::zero())]);
            (Some(fp.is_zero()), Some(!at.is_zero()))
        }
        Form::Generalized => (None, None),
    };
    EquationFlags {
        positive,
        linear,
        hypotheses: HypothesisRecord {
            q_a1_nonzero: !q_a1.is_zero(),
            q_a0u_nonzero: !q.partial(Var::A0).partial(Var::U).is_zero(),
            nonlinear: !linear,
            f0_prime_at_zero_vanishes: f0_prime,
            q_a1_at_origin_nonzero: q_a1_origin,
        },
    }
}
