//! Power-series solution of `M = R(M, D, z, u, x)` by graded recursion.
//!
//! Coefficients are produced in the order `(n, k)` lexicographic, `n` the
//! power of `z`. Each one is the corresponding coefficient of the right-hand
//! side evaluated on the entries known so far. Products `M^a D^b` are computed
//! lazily with memoization. When a product entry needs a coefficient that is
//! not known yet:
//!
//! * against a known nonzero partner, the coefficient depends linearly on
//!   itself and the equation is rejected (`NON_WELL_FOUNDED`);
//! * against another unknown, the term has order two in the unknowns and is
//!   taken as zero, which selects the minimal power-series solution; such
//!   provisional values are never memoized.

use std::collections::HashMap;

use num_traits::Zero;

use crate::equation::CatalyticEquation;
use crate::error::{Error, Result};
use crate::numeric::{Coefficient, Rat, RatRing, Ring, XPoly, XPolyRing};
use crate::poly::{MultiPoly, Var};
use crate::series::{BiSeries, UniSeries};

/// Solution of the equation, truncated to `orders`.
#[derive(Clone, Debug)]
pub struct SolutionSeries<C> {
    pub m: BiSeries<C>,
    /// Row `M(z, 0)`.
    pub m0: UniSeries<C>,
    pub residual_ok: bool,
    pub orders: (usize, usize),
}

#[derive(Clone, Debug)]
enum Val<C> {
    Known(C),
    Provisional(C),
    Dependent,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Factor {
    M,
    D,
}

#[derive(Clone, Debug)]
enum Node {
    One,
    Base(Factor),
    Prod { left: usize, right: Factor },
}

struct Term<C> {
    coef: C,
    node: usize,
    dz: usize,
    du: usize,
}

/// Mutable state of one solve.
struct Grid<C> {
    widths: Vec<usize>,
    m: Vec<Vec<Option<C>>>,
    nodes: Vec<Node>,
    memo: Vec<Vec<Vec<Option<C>>>>,
}

impl<C: Coefficient> Grid<C> {
    fn raw(&self, f: Factor, n: usize, k: usize) -> Val<C> {
        let k = match f {
            Factor::M => k,
            Factor::D => k + 1,
        };
        if k >= self.widths[n] {
            return Val::Unknown;
        }
        match &self.m[n][k] {
            Some(c) => Val::Known(c.clone()),
            None => Val::Unknown,
        }
    }

    fn value(&mut self, node: usize, n: usize, k: usize) -> Val<C> {
        match self.nodes[node].clone() {
            Node::One => Val::Known(if n == 0 && k == 0 { C::one_elem() } else { C::zero_elem() }),
            Node::Base(f) => self.raw(f, n, k),
            Node::Prod { left, right } => {
                if k < self.widths[n] {
                    if let Some(c) = &self.memo[node][n][k] {
                        return Val::Known(c.clone());
                    }
                }
                let v = self.convolve(left, right, n, k);
                if let Val::Known(c) = &v {
                    if k < self.widths[n] {
                        self.memo[node][n][k] = Some(c.clone());
                    }
                }
                v
            }
        }
    }

    fn convolve(&mut self, left: usize, right: Factor, n: usize, k: usize) -> Val<C> {
        let mut acc = C::zero_elem();
        let mut provisional = false;
        for i in 0..=n {
            for j in 0..=k {
                let r = self.raw(right, n - i, k - j);
                if let Val::Known(b) = &r {
                    if b.is_zero_elem() {
                        continue;
                    }
                }
                let l = self.value(left, i, j);
                match (l, r) {
                    (Val::Known(a), Val::Known(b)) => acc.add_product(&a, &b),
                    (Val::Provisional(a), Val::Known(b)) => {
                        acc.add_product(&a, &b);
                        provisional = true;
                    }
                    (Val::Known(a), _) | (Val::Provisional(a), _) => {
                        if !a.is_zero_elem() {
                            return Val::Dependent;
                        }
                    }
                    (_, Val::Known(_)) => return Val::Dependent,
                    _ => provisional = true,
                }
            }
        }
        if provisional {
            Val::Provisional(acc)
        } else {
            Val::Known(acc)
        }
    }
}

fn node_for(nodes: &mut Vec<Node>, index: &mut HashMap<(u32, u32), usize>, a: u32, b: u32) -> usize {
    if let Some(&i) = index.get(&(a, b)) {
        return i;
    }
    let node = match (a, b) {
        (0, 0) => Node::One,
        (1, 0) => Node::Base(Factor::M),
        (0, 1) => Node::Base(Factor::D),
        (a, b) if b > 0 => Node::Prod { left: node_for(nodes, index, a, b - 1), right: Factor::D },
        (a, _) => Node::Prod { left: node_for(nodes, index, a - 1, 0), right: Factor::M },
    };
    nodes.push(node);
    let i = nodes.len() - 1;
    index.insert((a, b), i);
    i
}

fn compile_terms<R: Ring>(rhs: &MultiPoly, ring: &R, nodes: &mut Vec<Node>) -> Vec<Term<R::Elem>> {
    let mut index = HashMap::new();
    rhs.terms()
        .map(|(e, c)| Term {
            coef: ring.term(c, e[Var::X.index()]),
            node: node_for(nodes, &mut index, e[Var::A0.index()], e[Var::A1.index()]),
            dz: e[Var::Z.index()] as usize,
            du: e[Var::U.index()] as usize,
        })
        .collect()
}

/// Solve in an arbitrary coefficient ring.
pub fn solve_series_in<R: Ring>(eq: &CatalyticEquation, ring: &R, n_z: usize, n_u: usize) -> Result<SolutionSeries<R::Elem>> {
    assert!(n_z >= 1 && n_u >= 1, "orders must be positive");
    let widths: Vec<usize> = (0..n_z).map(|n| n_u + (n_z - 1 - n)).collect();
    let mut nodes = Vec::new();
    let terms = compile_terms(eq.rhs(), ring, &mut nodes);
    let mut grid = Grid {
        m: widths.iter().map(|&w| vec![None; w]).collect(),
        memo: Vec::new(),
        widths: widths.clone(),
        nodes,
    };
    grid.memo = grid
        .nodes
        .iter()
        .map(|nd| match nd {
            Node::Prod { .. } => widths.iter().map(|&w| vec![None; w]).collect(),
            _ => Vec::new(),
        })
        .collect();

    for n in 0..n_z {
        for k in 0..widths[n] {
            let mut acc = R::Elem::zero_elem();
            for t in &terms {
                if t.dz > n || t.du > k {
                    continue;
                }
                match grid.value(t.node, n - t.dz, k - t.du) {
                    Val::Known(v) | Val::Provisional(v) => acc.add_product(&t.coef, &v),
                    Val::Dependent | Val::Unknown => return Err(Error::NonWellFounded { n, k }),
                }
            }
            grid.m[n][k] = Some(acc);
        }
    }

    let m = BiSeries::from_fn(n_z, n_u, |n, k| grid.m[n][k].clone().expect("filled"));
    let m0 = m.u_constant();
    let residual_ok = residual_vanishes(eq, ring, &m);
    Ok(SolutionSeries { m, m0, residual_ok, orders: (n_z, n_u) })
}

/// Exact solution with `x = 1`.
pub fn solve_series(eq: &CatalyticEquation, n_z: usize, n_u: usize) -> Result<SolutionSeries<Rat>> {
    solve_series_in(eq, &RatRing::default(), n_z, n_u)
}

/// Exact solution with coefficients polynomial in `x`.
pub fn solve_series_marked(eq: &CatalyticEquation, n_z: usize, n_u: usize) -> Result<SolutionSeries<XPoly>> {
    solve_series_in(eq, &XPolyRing, n_z, n_u)
}

/// Plug `m` back into the equation and compare on the exact window.
pub fn residual_vanishes<R: Ring>(eq: &CatalyticEquation, ring: &R, m: &BiSeries<R::Elem>) -> bool {
    let (n_z, n_u) = m.order();
    let window = n_u.saturating_sub(eq.max_u_degree().max(1) as usize);
    if window == 0 {
        return true;
    }
    let win = window + 1;
    let mm = m.truncated(n_z, win);
    let dd = m.truncated(n_z, win + 1).divided_difference();
    let mut powers_m = vec![BiSeries::from_fn(n_z, win, |n, k| if n == 0 && k == 0 { R::Elem::one_elem() } else { R::Elem::zero_elem() })];
    let mut powers_d = powers_m.clone();
    let mut rhs = BiSeries::<R::Elem>::zeros(n_z, window);
    for (e, c) in eq.rhs().terms() {
        let (a, b) = (e[Var::A0.index()] as usize, e[Var::A1.index()] as usize);
        while powers_m.len() <= a {
            let next = powers_m.last().unwrap().mul(&mm);
            powers_m.push(next);
        }
        while powers_d.len() <= b {
            let next = powers_d.last().unwrap().mul(&dd);
            powers_d.push(next);
        }
        let prod = powers_m[a].mul(&powers_d[b]);
        let coef = ring.term(c, e[Var::X.index()]);
        let (dz, du) = (e[Var::Z.index()] as usize, e[Var::U.index()] as usize);
        rhs = rhs.add(&BiSeries::from_fn(n_z, window, |n, k| {
            if n < dz || k < du {
                R::Elem::zero_elem()
            } else {
                coef.times(prod.get(n - dz, k - du))
            }
        }));
    }
    (0..n_z).all(|n| (0..window).all(|k| rhs.get(n, k) == m.get(n, k)))
}

/// `M` at the original `u = 1`, with a stability certificate in `N_u`.
///
/// For equations shifted by `u -> u + 1` this is the exact row `M(z, 0)`.
/// Otherwise the rows are summed at the stored `u = 1 - shift` with `N_u` and
/// `N_u + 4` columns and must agree.
pub fn eval_u1(eq: &CatalyticEquation, n_z: usize) -> Result<UniSeries<Rat>> {
    eval_u1_in(eq, &RatRing::default(), n_z)
}

/// [`eval_u1`] in an arbitrary coefficient ring.
pub fn eval_u1_in<R: Ring>(eq: &CatalyticEquation, ring: &R, n_z: usize) -> Result<UniSeries<R::Elem>> {
    let u1 = eq.original_u_one();
    if Zero::is_zero(&u1) {
        return Ok(solve_series_in(eq, ring, n_z, 1)?.m0);
    }
    let base = n_z * (eq.max_u_degree() as usize).max(1) + 4;
    let a = solve_series_in(eq, ring, n_z, base)?.m.eval_u(&u1);
    let b = solve_series_in(eq, ring, n_z, base + 4)?.m.eval_u(&u1);
    if let Some(n) = a.first_difference(&b) {
        return Err(Error::UTruncationUnstable { n, n_u: base });
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    fn ints(s: &UniSeries<Rat>) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_integer().try_into().unwrap()).collect()
    }

    #[test]
    fn motzkin_prefix() {
        let eq = CatalyticEquation::parse("M = 1 + z*(u+1)*M + z*D").unwrap();
        let s = solve_series(&eq, 7, 3).unwrap();
        assert_eq!(ints(&s.m0), vec![1, 1, 2, 4, 9, 21, 51]);
        assert!(s.residual_ok);
    }

    #[test]
    fn planar_maps_prefix() {
        let eq = CatalyticEquation::parse("M = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D").unwrap();
        let s = solve_series(&eq, 6, 4).unwrap();
        assert_eq!(ints(&s.m0), vec![1, 2, 9, 54, 378, 2916]);
        assert!(s.residual_ok);
    }

    #[test]
    fn q_zero_returns_f0() {
        let eq = CatalyticEquation::parse("M = 1 + 2*u + u^3").unwrap();
        let s = solve_series(&eq, 3, 5).unwrap();
        assert_eq!(s.m.row(0), &[int(1), int(2), int(0), int(1), int(0)]);
        assert!(s.m.row(1).iter().all(|c| *c == int(0)));
    }

    #[test]
    fn triangulation_row_zero_is_geometric() {
        let eq = CatalyticEquation::parse("M = 1 + u*M + z*(1+M)*D").unwrap();
        let s = solve_series(&eq, 4, 6).unwrap();
        assert!(s.m.row(0).iter().all(|c| *c == int(1)));
        assert!(s.residual_ok);
        assert!(matches!(eval_u1(&eq, 4), Err(Error::UTruncationUnstable { .. })));
    }

    #[test]
    fn self_dependence_is_rejected() {
        let eq = CatalyticEquation::parse("M = 1 + M").unwrap();
        assert_eq!(solve_series(&eq, 3, 2).unwrap_err(), Error::NonWellFounded { n: 0, k: 0 });
        let eq = CatalyticEquation::parse("M = 1 + 2*u*D").unwrap();
        assert!(matches!(solve_series(&eq, 3, 3), Err(Error::NonWellFounded { .. })));
    }

    #[test]
    fn marked_series_specializes() {
        let eq = CatalyticEquation::parse("M = x + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D").unwrap();
        let s = solve_series_marked(&eq, 4, 2).unwrap();
        let at1: Vec<Rat> = s.m0.coeffs().iter().map(|p| p.eval(&int(1))).collect();
        assert_eq!(at1, vec![int(1), int(2), int(9), int(54)]);
        // one edge: the loop (1 vertex) and the bridge (2 vertices)
        assert_eq!(s.m0.coeff(1).coeffs(), &[int(0), int(1), int(1)]);
    }
}
