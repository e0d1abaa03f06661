use num_traits::{Signed, Zero};
use proptest::prelude::*;

use catalytic::analysis::{analyze, AnalysisOptions};
use catalytic::engine::solve_series;
use catalytic::equation::CatalyticEquation;
use catalytic::numeric::{int, rat, Rat};
use catalytic::poly::Var;

/// A positive equation `M = F0 + z*Q` as text. Every monomial of Q gets a
/// small nonnegative coefficient.
fn positive_equation() -> impl Strategy<Value = String> {
    let monomials = ["1", "u", "u^2", "M", "u*M", "M^2", "D", "u*D", "M*D"];
    (0u32..3, prop::collection::vec(0u32..3, monomials.len())).prop_filter_map("empty Q", move |(f0u, cs)| {
        let terms: Vec<String> =
            cs.iter().zip(monomials).filter(|(c, _)| **c > 0).map(|(c, m)| format!("{c}*z*{m}")).collect();
        if terms.is_empty() {
            return None;
        }
        let f0 = if f0u == 0 { "1".to_string() } else { format!("1 + u^{f0u}") };
        Some(format!("M = {f0} + {}", terms.join(" + ")))
    })
}

fn linear_equation() -> impl Strategy<Value = String> {
    (1u32..3, 0u32..3, 0u32..3, 1u32..3).prop_map(|(a, b, c, d)| {
        let mut q1 = vec![format!("{a}*u")];
        if b > 0 {
            q1.push(format!("{b}"));
        }
        if c > 0 {
            q1.push(format!("{c}*u^2"));
        }
        format!("M = 1 + z*({})*M + {d}*z*D", q1.join(" + "))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn text_round_trip(text in positive_equation()) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let again = CatalyticEquation::parse(&eq.to_text()).unwrap();
        prop_assert_eq!(eq.rhs(), again.rhs());
    }

    #[test]
    fn shift_is_an_involution(text in positive_equation(), p in -5i64..6, q in 1i64..4) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let c = rat(p, q);
        let back = eq.shift_u(&c).shift_u(&-c.clone());
        prop_assert_eq!(eq.rhs(), back.rhs());
    }

    #[test]
    fn coefficients_are_nonnegative(text in positive_equation()) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let m0 = solve_series(&eq, 16, 1).unwrap().m0;
        prop_assert!(m0.coeffs().iter().all(|c| !c.is_negative()));
    }

    #[test]
    fn truncation_growth_is_stable(text in positive_equation()) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let small = solve_series(&eq, 10, 1).unwrap();
        let large = solve_series(&eq, 16, 4).unwrap();
        prop_assert_eq!(large.m0.truncated(10), small.m0);
        prop_assert!(large.residual_ok);
    }

    #[test]
    fn z_power_substitution_spreads_coefficients(text in positive_equation()) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let m0 = solve_series(&eq, 8, 1).unwrap().m0;
        let sq = solve_series(&eq.substitute_z_power(2), 16, 1).unwrap().m0;
        for n in 0..16 {
            let want = if n % 2 == 0 { m0.coeff(n / 2).clone() } else { Rat::zero() };
            prop_assert_eq!(sq.coeff(n), &want);
        }
    }

    #[test]
    fn product_rule(a in positive_equation(), b in positive_equation()) {
        let p = CatalyticEquation::parse(&a).unwrap().rhs().clone();
        let q = CatalyticEquation::parse(&b).unwrap().rhs().clone();
        for v in [Var::U, Var::A0, Var::Z] {
            let lhs = (&p * &q).partial(v);
            let rhs = &(&p.partial(v) * &q) + &(&p * &q.partial(v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn kernel_identity_holds(text in linear_equation()) {
        let eq = CatalyticEquation::parse(&text).unwrap();
        let a = analyze(&eq, &AnalysisOptions::default()).unwrap();
        let k = a.kernel.expect("linear equations go through the kernel method");
        prop_assert!(k.identity.holds(), "{:?}", k.identity);
    }
}

/// Excursions of length n with steps up 1, flat (weighted) and down 1.
fn excursions(n: usize, flat: i64) -> Vec<Rat> {
    let mut row = vec![int(0); n + 2];
    row[0] = int(1);
    let mut out = vec![row[0].clone()];
    for _ in 1..=n {
        let mut next = vec![int(0); n + 2];
        for h in 0..=n {
            if row[h].is_zero() {
                continue;
            }
            next[h + 1] += &row[h];
            next[h] += &row[h] * int(flat);
            if h > 0 {
                next[h - 1] += &row[h];
            }
        }
        row = next;
        out.push(row[0].clone());
    }
    out
}

#[test]
fn dyck_and_motzkin_match_lattice_paths() {
    for (text, flat) in [("M = 1 + z*u*M + z*D", 0), ("M = 1 + z*(u+1)*M + z*D", 1)] {
        let eq = CatalyticEquation::parse(text).unwrap();
        let m0 = solve_series(&eq, 31, 1).unwrap().m0;
        assert_eq!(m0.coeffs(), &excursions(30, flat)[..], "{text}");
    }
}

#[test]
fn dyck_support_has_period_two() {
    let eq = CatalyticEquation::parse("M = 1 + z*u*M + z*D").unwrap();
    let m0 = solve_series(&eq, 40, 1).unwrap().m0;
    for (n, c) in m0.coeffs().iter().enumerate() {
        assert_eq!(c.is_zero(), n % 2 == 1, "n = {n}");
    }
}
