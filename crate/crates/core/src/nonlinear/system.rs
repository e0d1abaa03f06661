use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equation::{CatalyticEquation, Form};
use crate::fixedpoint::PolySystem;
use crate::poly::{MultiPoly, Var};

/// Unknown series of the nonlinear system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unknown {
    F,
    U,
    W,
}

impl Unknown {
    pub const ALL: [Unknown; 3] = [Unknown::F, Unknown::U, Unknown::W];

    /// Polynomial variable standing for this unknown: `f` is `M`, `w` is `D`, `u` is `u`.
    pub fn var(self) -> Var {
        match self {
            Unknown::F => Var::A0,
            Unknown::U => Var::U,
            Unknown::W => Var::A1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Unknown::F => "f",
            Unknown::U => "u",
            Unknown::W => "w",
        }
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `f = R`, `u = u R_M + R_D`, `w = R_u + w R_M` with `R` the right-hand side.
///
/// In BMJ form this is `f = F0 + zQ`, `u = zuQ_M + zQ_D`, `w = F0' + zQ_u + zwQ_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearSystem {
    rhs: [MultiPoly; 3],
    pub form: Form,
}

impl NonlinearSystem {
    pub fn rhs(&self, y: Unknown) -> &MultiPoly {
        &self.rhs[y as usize]
    }

    /// `M(z,0) = f - w*u`.
    pub fn observable() -> MultiPoly {
        MultiPoly::var(Var::A0) - MultiPoly::var(Var::A1) * MultiPoly::var(Var::U)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.rhs.iter().all(|p| p.all_nonnegative())
    }

    pub fn to_poly_system(&self) -> PolySystem {
        PolySystem::new(
            Unknown::ALL.iter().map(|y| y.var()).collect(),
            self.rhs.to_vec(),
            Self::observable(),
            MultiPoly::one(),
        )
    }
}

pub fn derive_system(eq: &CatalyticEquation) -> NonlinearSystem {
    let r = eq.rhs();
    let r_m = r.partial(Var::A0);
    let u = MultiPoly::var(Var::U);
    let w = MultiPoly::var(Var::A1);
    let rhs_f = r.clone();
    let rhs_u = &u * &r_m + r.partial(Var::A1);
    let rhs_w = r.partial(Var::U) + &w * &r_m;
    NonlinearSystem { rhs: [rhs_f, rhs_u, rhs_w], form: eq.form() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_map_u_equation() {
        let eq = CatalyticEquation::parse("M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D").unwrap();
        let sys = derive_system(&eq);
        let expected = CatalyticEquation::parse("M = z*u*(2*(u+1)^2*M + (u+1)) + z*(u+1)").unwrap();
        assert_eq!(sys.rhs(Unknown::U), expected.rhs());
        assert!(sys.all_nonnegative());
    }

    #[test]
    fn u_free_q_has_zero_w_equation() {
        let eq = CatalyticEquation::parse("M = 1 + z*M^2 + z*D").unwrap();
        let sys = derive_system(&eq);
        // w = w * 2zM: w = 0 solves it
        assert!(sys.rhs(Unknown::W).coefficient(Var::A1, 0).is_zero());
    }
}
