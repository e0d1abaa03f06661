//! Polynomial fixed-point systems `Y = G(z, Y)` in a few unknowns.
//!
//! Both the kernel equation `u = G(z, u)` of the linear case and the
//! three-equation system of the nonlinear case are instances. This module
//! provides exact and floating power series, branch continuation in `z`, and
//! the extended Newton solve for a fold `Y = G, det(I - G_Y) = 0`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, PerronRoot};
use crate::numeric::{BigFloat, Coefficient, Field, FloatRing, Rat, Ring};
use crate::poly::{CompiledPoly, MultiPoly, Var};
use crate::series::{eval_numeric, UniSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    vars: Vec<Var>,
    rhs: Vec<MultiPoly>,
    obs_num: MultiPoly,
    obs_den: MultiPoly,
}

impl PolySystem {
    /// `rhs[i]` is the right-hand side for `vars[i]`; the observable is `num/den`.
    pub fn new(vars: Vec<Var>, rhs: Vec<MultiPoly>, obs_num: MultiPoly, obs_den: MultiPoly) -> Self {
        assert_eq!(vars.len(), rhs.len());
        for p in rhs.iter().chain([&obs_num, &obs_den]) {
            for (e, _) in p.terms() {
                for v in Var::ALL {
                    assert!(
                        e[v.index()] == 0 || v == Var::Z || v == Var::X || vars.contains(&v),
                        "variable {} is neither an unknown nor z or x",
                        v.name()
                    );
                }
            }
        }
        PolySystem { vars, rhs, obs_num, obs_den }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rhs(&self, i: usize) -> &MultiPoly {
        &self.rhs[i]
    }

    pub fn observable(&self) -> (&MultiPoly, &MultiPoly) {
        (&self.obs_num, &self.obs_den)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.rhs.iter().all(|p| p.all_nonnegative())
    }

    /// `J[i][j] = dG_i / dY_j`.
    pub fn jacobian(&self) -> Vec<Vec<MultiPoly>> {
        self.rhs.iter().map(|g| self.vars.iter().map(|&v| g.partial(v)).collect()).collect()
    }

    /// `det(I - J)` as a polynomial.
    pub fn kernel_determinant(&self) -> MultiPoly {
        let j = self.jacobian();
        let n = self.dim();
        let m: Vec<Vec<MultiPoly>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let id = if r == c { MultiPoly::one() } else { MultiPoly::zero() };
                        &id - &j[r][c]
                    })
                    .collect()
            })
            .collect();
        symbolic_det(&m)
    }

    /// Replaces `x` by a rational value everywhere.
    pub fn specialize_x(&self, x: &Rat) -> Self {
        let f = |p: &MultiPoly| p.eval_partial(&[(Var::X, x.clone())]);
        PolySystem {
            vars: self.vars.clone(),
            rhs: self.rhs.iter().map(f).collect(),
            obs_num: f(&self.obs_num),
            obs_den: f(&self.obs_den),
        }
    }

    /// Power series of every unknown up to `z^{n-1}`.
    pub fn series_in<R: Ring>(&self, ring: &R, n: usize) -> Result<Vec<UniSeries<R::Elem>>> {
        SeriesSolver::new(self, ring, n).run()
    }

    /// Series of the observable `num/den` from the unknowns' series.
    pub fn observable_series<R: Ring>(&self, ring: &R, ys: &[UniSeries<R::Elem>]) -> Result<UniSeries<R::Elem>>
    where
        R::Elem: Field,
    {
        let num = eval_series(&self.obs_num, &self.vars, ring, ys);
        if self.obs_den == MultiPoly::one() {
            return Ok(num);
        }
        let den = eval_series(&self.obs_den, &self.vars, ring, ys);
        num.div(&den)
    }

    pub fn compile(&self, prec: usize, x: &BigFloat) -> NumericSystem {
        NumericSystem::new(self, prec, x)
    }
}

fn symbolic_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    match n {
        0 => MultiPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = MultiPoly::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, p)| p.clone()).collect()).collect();
                let t = &m[0][c] * &symbolic_det(&minor);
                acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Plain truncated evaluation of a polynomial at series arguments.
pub fn eval_series<R: Ring>(p: &MultiPoly, vars: &[Var], ring: &R, ys: &[UniSeries<R::Elem>]) -> UniSeries<R::Elem> {
    let n = ys.first().map_or(0, |s| s.order());
    let mut powers: Vec<Vec<UniSeries<R::Elem>>> = vars.iter().map(|_| Vec::new()).collect();
    let mut one = vec![R::Elem::zero_elem(); n];
    if n > 0 {
        one[0] = R::Elem::one_elem();
    }
    let one = UniSeries::new(one);
    let mut acc = UniSeries::zeros(n);
    for (e, c) in p.terms() {
        let mut t = one.clone();
        for (i, v) in vars.iter().enumerate() {
            let d = e[v.index()] as usize;
            if d == 0 {
                continue;
            }
            while powers[i].len() < d {
                let next = match powers[i].last() {
                    None => ys[i].clone(),
                    Some(last) => last.mul(&ys[i]),
                };
                powers[i].push(next);
            }
            t = t.mul(&powers[i][d - 1]);
        }
        let k = ring.term(c, e[Var::X.index()]);
        t = t.scale(&k).shift_z(e[Var::Z.index()] as usize);
        acc = acc.add(&t);
    }
    acc
}

// ---------------------------------------------------------------------------
// Graded series solve

#[derive(Clone, Debug)]
enum St<C> {
    Known(C),
    Provisional(C),
    Dependent,
    Unknown,
}

impl<C: Coefficient> St<C> {
    fn is_known_zero(&self) -> bool {
        matches!(self, St::Known(c) if c.is_zero_elem())
    }

    fn mul(&self, other: &St<C>) -> St<C> {
        use St::*;
        if self.is_known_zero() || other.is_known_zero() {
            return Known(C::zero_elem());
        }
        match (self, other) {
            (Known(a), Known(b)) => Known(a.times(b)),
            (Known(a), Provisional(b)) | (Provisional(b), Known(a)) | (Provisional(a), Provisional(b)) => {
                Provisional(a.times(b))
            }
            (Dependent, _) | (_, Dependent) => Dependent,
            (Known(_), Unknown) | (Unknown, Known(_)) => Dependent,
            // product of two still-unknown entries of the same order: skipped
            _ => Provisional(C::zero_elem()),
        }
    }
}

struct Acc<C> {
    value: C,
    provisional: bool,
    dependent: bool,
}

impl<C: Coefficient> Acc<C> {
    fn new() -> Self {
        Acc { value: C::zero_elem(), provisional: false, dependent: false }
    }

    fn add(&mut self, s: St<C>) {
        match s {
            St::Known(c) => self.value = self.value.plus(&c),
            St::Provisional(c) => {
                self.value = self.value.plus(&c);
                self.provisional = true;
            }
            St::Dependent | St::Unknown => self.dependent = true,
        }
    }

    fn finish(self) -> St<C> {
        if self.dependent {
            St::Dependent
        } else if self.provisional {
            St::Provisional(self.value)
        } else {
            St::Known(self.value)
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Node {
    One,
    Base(usize),
    Prod(usize, usize),
}

struct SeriesSolver<'a, R: Ring> {
    ring: &'a R,
    n: usize,
    nodes: Vec<Node>,
    /// per equation: (node, z exponent, coefficient)
    eqs: Vec<Vec<(usize, usize, R::Elem)>>,
    memo: Vec<Vec<Option<R::Elem>>>,
    y: Vec<Vec<R::Elem>>,
    order: usize,
    one: R::Elem,
    zero: R::Elem,
}

impl<'a, R: Ring> SeriesSolver<'a, R> {
    fn new(sys: &PolySystem, ring: &'a R, n: usize) -> Self {
        let d = sys.dim();
        let mut keys: Vec<Vec<u32>> = vec![vec![0; d]];
        let mut nodes = vec![Node::One];
        fn node_for(keys: &mut Vec<Vec<u32>>, nodes: &mut Vec<Node>, k: &[u32]) -> usize {
            if let Some(i) = keys.iter().position(|x| x == k) {
                return i;
            }
            let j = k.iter().position(|&e| e > 0).unwrap();
            let mut parent = k.to_vec();
            parent[j] -= 1;
            let node = if parent.iter().all(|&e| e == 0) {
                Node::Base(j)
            } else {
                let p = node_for(keys, nodes, &parent);
                Node::Prod(p, j)
            };
            keys.push(k.to_vec());
            nodes.push(node);
            nodes.len() - 1
        }
        let mut eqs = Vec::with_capacity(d);
        for g in &sys.rhs {
            let mut terms = Vec::new();
            for (e, c) in g.terms() {
                let k: Vec<u32> = sys.vars.iter().map(|v| e[v.index()]).collect();
                let node = node_for(&mut keys, &mut nodes, &k);
                terms.push((node, e[Var::Z.index()] as usize, ring.term(c, e[Var::X.index()])));
            }
            eqs.push(terms);
        }
        let memo = vec![vec![None; n]; nodes.len()];
        SeriesSolver {
            ring,
            n,
            nodes,
            eqs,
            memo,
            y: vec![Vec::with_capacity(n); d],
            order: 0,
            one: R::Elem::one_elem(),
            zero: R::Elem::zero_elem(),
        }
    }

    fn base(&self, j: usize, m: usize) -> St<R::Elem> {
        if m < self.y[j].len() {
            St::Known(self.y[j][m].clone())
        } else {
            St::Unknown
        }
    }

    /// Reference to an entry strictly below the current order.
    fn settled(&self, node: usize, m: usize) -> &R::Elem {
        match self.nodes[node] {
            Node::One => {
                if m == 0 {
                    &self.one
                } else {
                    &self.zero
                }
            }
            Node::Base(j) => &self.y[j][m],
            Node::Prod(..) => self.memo[node][m].as_ref().expect("settled entry"),
        }
    }

    fn value(&mut self, node: usize, m: usize) -> St<R::Elem> {
        match self.nodes[node] {
            Node::One => St::Known(if m == 0 { self.one.clone() } else { self.zero.clone() }),
            Node::Base(j) => self.base(j, m),
            Node::Prod(l, j) => {
                if let Some(c) = &self.memo[node][m] {
                    return St::Known(c.clone());
                }
                let settled_below = self.order;
                for i in 0..(m + 1).min(settled_below) {
                    if matches!(self.nodes[l], Node::Prod(..)) && self.memo[l][i].is_none() {
                        let s = self.value(l, i);
                        debug_assert!(matches!(s, St::Known(_)));
                    }
                }
                let mut fast = R::Elem::zero_elem();
                let mut acc = Acc::new();
                for i in 0..=m {
                    let k = m - i;
                    if i < settled_below && k < settled_below {
                        let a = self.settled(l, i);
                        if !a.is_zero_elem() {
                            let b = &self.y[j][k];
                            fast.add_product(a, b);
                        }
                    } else {
                        let a = if i < settled_below { St::Known(self.settled(l, i).clone()) } else { self.value(l, i) };
                        let b = self.base(j, k);
                        acc.add(a.mul(&b));
                    }
                }
                acc.add(St::Known(fast));
                let out = acc.finish();
                if let St::Known(c) = &out {
                    self.memo[node][m] = Some(c.clone());
                }
                out
            }
        }
    }

    fn rhs(&mut self, i: usize, n: usize) -> St<R::Elem> {
        let mut acc = Acc::new();
        for t in 0..self.eqs[i].len() {
            let (node, ze, ref c) = self.eqs[i][t];
            if ze > n {
                continue;
            }
            let c = c.clone();
            let v = self.value(node, n - ze);
            acc.add(St::Known(c).mul(&v));
        }
        acc.finish()
    }

    fn run(mut self) -> Result<Vec<UniSeries<R::Elem>>> {
        let d = self.y.len();
        let _ = self.ring;
        for n in 0..self.n {
            self.order = n;
            let mut pending: Vec<usize> = (0..d).collect();
            let mut any_provisional = false;
            while !pending.is_empty() {
                let mut progressed = false;
                let mut still = Vec::new();
                for &i in &pending {
                    match self.rhs(i, n) {
                        St::Known(c) => {
                            self.y[i].push(c);
                            progressed = true;
                        }
                        St::Provisional(c) => {
                            self.y[i].push(c);
                            any_provisional = true;
                            progressed = true;
                        }
                        _ => still.push(i),
                    }
                }
                if !progressed {
                    return Err(Error::NonWellFounded { n, k: still[0] });
                }
                pending = still;
            }
            if any_provisional {
                // all entries of this order are set now: the equations must hold exactly
                for i in 0..d {
                    match self.rhs(i, n) {
                        St::Known(c) if c == self.y[i][n] => {}
                        _ => return Err(Error::NonWellFounded { n, k: i }),
                    }
                }
            }
        }
        Ok(self.y.into_iter().map(UniSeries::new).collect())
    }
}

// ---------------------------------------------------------------------------
// Numerics

/// A system with coefficients rounded to a working precision and `x` fixed.
#[derive(Clone, Debug)]
pub struct NumericSystem {
    vars: Vec<Var>,
    prec: usize,
    x: BigFloat,
    g: Vec<CompiledPoly>,
    jac: Vec<Vec<CompiledPoly>>,
    gz: Vec<CompiledPoly>,
    det: CompiledPoly,
    det_grad: Vec<CompiledPoly>,
    det_z: CompiledPoly,
    obs_num: CompiledPoly,
    obs_den: CompiledPoly,
    positive: bool,
    source: PolySystem,
}

/// A point `(z, Y)` on the solution branch.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub z: BigFloat,
    pub y: Vec<BigFloat>,
}

/// Solution of the extended system at a fold.
#[derive(Clone, Debug)]
pub struct Fold {
    pub z0: BigFloat,
    pub y: Vec<BigFloat>,
    /// `det(I - J)` at the computed point.
    pub det: BigFloat,
    /// max-norm of `Y - G(z0, Y)`.
    pub residual: BigFloat,
    pub jacobian: Matrix,
    pub perron: Option<PerronRoot>,
}

impl NumericSystem {
    fn new(sys: &PolySystem, prec: usize, x: &BigFloat) -> Self {
        let c = |p: &MultiPoly| p.compile(prec);
        let det = sys.kernel_determinant();
        NumericSystem {
            vars: sys.vars.clone(),
            prec,
            x: x.with_precision(prec),
            g: sys.rhs.iter().map(c).collect(),
            jac: sys.jacobian().iter().map(|r| r.iter().map(c).collect()).collect(),
            gz: sys.rhs.iter().map(|g| c(&g.partial(Var::Z))).collect(),
            det_grad: sys.vars.iter().map(|&v| c(&det.partial(v))).collect(),
            det_z: c(&det.partial(Var::Z)),
            det: c(&det),
            obs_num: c(&sys.obs_num),
            obs_den: c(&sys.obs_den),
            positive: sys.all_nonnegative(),
            source: sys.clone(),
        }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn float(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.prec).expect("finite constant")
    }

    fn point(&self, z: &BigFloat, y: &[BigFloat]) -> [BigFloat; 5] {
        let mut p: [BigFloat; 5] = Default::default();
        for k in 0..5 {
            p[k] = BigFloat::zero().with_precision(self.prec);
        }
        p[Var::Z.index()] = z.clone();
        p[Var::X.index()] = self.x.clone();
        for (v, val) in self.vars.iter().zip(y) {
            p[v.index()] = val.clone();
        }
        p
    }

    pub fn rhs(&self, z: &BigFloat, y: &[BigFloat]) -> Vec<BigFloat> {
        let p = self.point(z, y);
        self.g.iter().map(|g| g.eval(&p)).collect()
    }

    pub fn jacobian(&self, z: &BigFloat, y: &[BigFloat]) -> Matrix {
        let p = self.point(z, y);
        self.jac.iter().map(|r| r.iter().map(|c| c.eval(&p)).collect()).collect()
    }

    pub fn rhs_z(&self, z: &BigFloat, y: &[BigFloat]) -> Vec<BigFloat> {
        let p = self.point(z, y);
        self.gz.iter().map(|g| g.eval(&p)).collect()
    }

    pub fn kernel_determinant(&self, z: &BigFloat, y: &[BigFloat]) -> BigFloat {
        self.det.eval(&self.point(z, y))
    }

    pub fn observable(&self, z: &BigFloat, y: &[BigFloat]) -> Result<BigFloat> {
        let p = self.point(z, y);
        self.obs_num.eval(&p).try_div(&self.obs_den.eval(&p))
    }

    pub fn residual(&self, z: &BigFloat, y: &[BigFloat]) -> BigFloat {
        let g = self.rhs(z, y);
        linalg::max_norm(&y.iter().zip(&g).map(|(a, b)| a - b).collect::<Vec<_>>())
    }

    /// Newton tolerance: a few bits above the working precision.
    pub fn tolerance(&self) -> BigFloat {
        let two = BigFloat::from_i64(2, self.prec);
        two.powi(self.prec.saturating_sub(24)).recip().expect("nonzero")
    }

    fn i_minus_j(&self, z: &BigFloat, y: &[BigFloat]) -> Matrix {
        let j = self.jacobian(z, y);
        let n = self.dim();
        let one = BigFloat::one().with_precision(self.prec);
        (0..n).map(|r| (0..n).map(|c| if r == c { &one - &j[r][c] } else { -&j[r][c] }).collect()).collect()
    }

    /// Solves `Y = G(z, Y)` near `guess` at fixed `z`.
    pub fn solve_at(&self, z: &BigFloat, guess: &[BigFloat], max_iter: usize) -> Result<Vec<BigFloat>> {
        let tol = self.tolerance();
        let out = linalg::newton(guess.to_vec(), &tol, max_iter, |y| {
            let g = self.rhs(z, y);
            let r: Vec<BigFloat> = y.iter().zip(&g).map(|(a, b)| a - b).collect();
            Ok((r, self.i_minus_j(z, y)))
        })?;
        Ok(out.x)
    }

    /// `dY/dz = (I - J)^{-1} G_z` along the branch.
    pub fn tangent(&self, z: &BigFloat, y: &[BigFloat]) -> Result<Vec<BigFloat>> {
        linalg::solve(&self.i_minus_j(z, y), &self.rhs_z(z, y))
    }

    /// Starting point on the branch through the power series at the origin.
    pub fn initial_point(&self) -> Result<(BranchPoint, BigFloat)> {
        let terms = 48;
        let ring = FloatRing { prec: self.prec, x: self.x.clone() };
        let series = self.source.series_in(&ring, terms)?;
        let r = radius_hint(&series, self.prec);
        let z = &r / &self.float(8.0);
        let mut y = Vec::with_capacity(self.dim());
        for s in &series {
            let e = eval_numeric(s, &z, &r)?;
            y.push(e.value);
        }
        let y = self.solve_at(&z, &y, 60)?;
        Ok((BranchPoint { z, y }, r))
    }

    /// Follows the branch from the origin while `det(I - J)` keeps its sign.
    ///
    /// With `target = None` the march stops close to the first fold; otherwise at `target`.
    pub fn march(&self, target: Option<&BigFloat>) -> Result<BranchPoint> {
        let (mut pt, r) = self.initial_point()?;
        if let Some(t) = target {
            if *t <= pt.z {
                let y = self.solve_at(t, &pt.y, 60)?;
                return Ok(BranchPoint { z: t.clone(), y });
            }
        }
        let det0 = self.kernel_determinant(&pt.z, &pt.y);
        if det0.is_zero() {
            return Err(Error::NoConvergence("singular Jacobian near the origin".into()));
        }
        let sign = det0.is_positive();
        let mut step = &r / &self.float(16.0);
        let min_step = &r * &self.float(1e-40);
        for _ in 0..4000 {
            let mut z_next = &pt.z + &step;
            let mut last = false;
            if let Some(t) = target {
                if z_next >= *t {
                    z_next = t.clone();
                    last = true;
                }
            }
            let dz = &z_next - &pt.z;
            let accepted = self.tangent(&pt.z, &pt.y).ok().and_then(|tan| {
                let guess: Vec<BigFloat> = pt.y.iter().zip(&tan).map(|(a, b)| a + &(&dz * b)).collect();
                let y = self.solve_at(&z_next, &guess, 16).ok()?;
                let d = self.kernel_determinant(&z_next, &y);
                if d.is_zero() || d.is_positive() != sign {
                    return None;
                }
                // reject jumps far off the tangent prediction
                let jump = linalg::max_norm(&y.iter().zip(&guess).map(|(a, b)| a - b).collect::<Vec<_>>());
                let scale = linalg::max_norm(&pt.y).max(self.float(1.0));
                if jump.to_f64() > 0.25 * scale.to_f64() {
                    return None;
                }
                Some((y, d))
            });
            match accepted {
                Some((y, d)) => {
                    pt = BranchPoint { z: z_next, y };
                    if last {
                        return Ok(pt);
                    }
                    if target.is_none() && (d.abs() / det0.abs()).to_f64() < 1e-5 {
                        return Ok(pt);
                    }
                    step = &step * &self.float(1.5);
                }
                None => {
                    step = &step / &self.float(2.0);
                    if step < min_step {
                        if target.is_some() {
                            return Err(Error::NoConvergence(format!(
                                "branch continuation stalled at z = {}",
                                pt.z.to_decimal(20)
                            )));
                        }
                        return Ok(pt);
                    }
                }
            }
        }
        Err(Error::NoConvergence("branch continuation did not terminate".into()))
    }

    /// Newton on `Y = G(z, Y), det(I - J) = 0` in the unknowns `(Y, z)`.
    pub fn extended_newton(&self, start: &BranchPoint) -> Result<Fold> {
        let d = self.dim();
        let mut x0 = start.y.clone();
        x0.push(start.z.clone());
        let tol = self.tolerance();
        let out = linalg::newton(x0, &tol, 80, |v| {
            let (y, z) = (&v[..d], &v[d]);
            let p = self.point(z, y);
            let g = self.rhs(z, y);
            let mut r: Vec<BigFloat> = y.iter().zip(&g).map(|(a, b)| a - b).collect();
            r.push(self.det.eval(&p));
            let mut jac = self.i_minus_j(z, y);
            let gz = self.rhs_z(z, y);
            for (row, gzi) in jac.iter_mut().zip(&gz) {
                row.push(-gzi);
            }
            let mut last: Vec<BigFloat> = self.det_grad.iter().map(|c| c.eval(&p)).collect();
            last.push(self.det_z.eval(&p));
            jac.push(last);
            Ok((r, jac))
        })?;
        let y = out.x[..d].to_vec();
        let z0 = out.x[d].clone();
        let jacobian = self.jacobian(&z0, &y);
        let perron = if self.positive { Some(linalg::perron_root(&jacobian)) } else { None };
        Ok(Fold { det: self.kernel_determinant(&z0, &y), residual: self.residual(&z0, &y), z0, y, jacobian, perron })
    }

    /// March to the first fold, then refine it.
    pub fn find_fold(&self) -> Result<Fold> {
        let start = self.march(None)?;
        self.extended_newton(&start)
    }

    /// Hessian contraction `H[i] = sum_jk d2G_i/dY_j dY_k v_j v_k` by polynomial differentiation.
    pub fn hessian_along(&self, z: &BigFloat, y: &[BigFloat], v: &[BigFloat]) -> Vec<BigFloat> {
        let p = self.point(z, y);
        self.source
            .rhs
            .iter()
            .map(|g| {
                let mut acc = BigFloat::zero().with_precision(self.prec);
                for (a, va) in self.vars.iter().zip(v) {
                    let ga = g.partial(*a);
                    for (b, vb) in self.vars.iter().zip(v) {
                        let h = ga.partial(*b).compile(self.prec).eval(&p);
                        acc = &acc + &(&h * &(va * vb));
                    }
                }
                acc
            })
            .collect()
    }
}

/// Root-test estimate of the radius of convergence from floating series.
pub fn radius_hint(series: &[UniSeries<BigFloat>], prec: usize) -> BigFloat {
    let n = series.first().map_or(0, |s| s.order());
    let mut best: Option<f64> = None;
    for k in (n / 2..n).rev() {
        let mag: f64 = series.iter().map(|s| s.coeff(k).abs().to_f64()).sum();
        if mag > 0.0 && k > 0 {
            let r = mag.powf(-1.0 / k as f64);
            if r.is_finite() {
                best = Some(best.map_or(r, |b: f64| b.min(r)));
            }
        }
    }
    let r = best.unwrap_or(1.0).clamp(1e-12, 1e6);
    BigFloat::from_f64(r, prec).expect("finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rat, RatRing};

    fn motzkin_kernel() -> PolySystem {
        // u = z + z*u*(u+1)
        let g = crate::equation::parser::parse_poly("z + z*u*(u+1)").unwrap();
        let q0 = MultiPoly::one();
        let den = crate::equation::parser::parse_poly("1 - z*(u+1)").unwrap();
        PolySystem::new(vec![Var::U], vec![g], q0, den)
    }

    #[test]
    fn kernel_root_series() {
        let sys = motzkin_kernel();
        let ys = sys.series_in(&RatRing::default(), 8).unwrap();
        // u(z) = z M(z) for Motzkin M
        let motzkin = [1, 1, 2, 4, 9, 21, 51];
        for (n, m) in motzkin.iter().enumerate() {
            assert_eq!(ys[0].coeff(n + 1), &rat(*m, 1));
        }
        let m0 = sys.observable_series(&RatRing::default(), &ys).unwrap();
        for (n, m) in motzkin.iter().enumerate() {
            assert_eq!(m0.coeff(n), &rat(*m, 1));
        }
    }

    #[test]
    fn fold_of_motzkin_kernel() {
        let sys = motzkin_kernel();
        let ns = sys.compile(192, &BigFloat::one().with_precision(192));
        let fold = ns.find_fold().unwrap();
        assert!((fold.z0.to_f64() - 1.0 / 3.0).abs() < 1e-30);
        assert!((fold.y[0].to_f64() - 1.0).abs() < 1e-20);
        assert!(fold.det.abs().to_f64() < 1e-40);
        let p = fold.perron.unwrap();
        assert!((p.root.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn self_dependent_system_is_rejected() {
        let g = crate::equation::parser::parse_poly("1 + u").unwrap();
        let sys = PolySystem::new(vec![Var::U], vec![g], MultiPoly::var(Var::U), MultiPoly::one());
        let err = sys.series_in(&RatRing::default(), 3).unwrap_err();
        assert_eq!(err, Error::NonWellFounded { n: 0, k: 0 });
    }

    #[test]
    fn determinant_of_coupled_system() {
        // Y1 = z*Y2, Y2 = z*Y1: det = 1 - z^2
        let a = MultiPoly::var(Var::A0);
        let b = MultiPoly::var(Var::A1);
        let z = MultiPoly::var(Var::Z);
        let sys = PolySystem::new(vec![Var::A0, Var::A1], vec![&z * &b, &z * &a], a.clone(), MultiPoly::one());
        let det = sys.kernel_determinant();
        assert_eq!(det, &MultiPoly::one() - &(&z * &z));
    }
}
