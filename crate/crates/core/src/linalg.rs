//! Small dense linear algebra over [`BigFloat`].

use crate::error::{Error, Result};
use crate::numeric::BigFloat;

pub type Matrix = Vec<Vec<BigFloat>>;

fn zero(prec: usize) -> BigFloat {
    BigFloat::zero().with_precision(prec)
}

fn prec_of(a: &Matrix) -> usize {
    a.iter().flatten().map(|x| x.precision()).max().unwrap_or(64)
}

pub fn max_norm(v: &[BigFloat]) -> BigFloat {
    v.iter().fold(BigFloat::zero(), |m, x| m.max(x.abs()))
}

pub fn identity(n: usize, prec: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigFloat::one().with_precision(prec) } else { zero(prec) })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[BigFloat]) -> Vec<BigFloat> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(zero(prec_of(a)), |acc, (x, y)| &acc + &(x * y)))
        .collect()
}

/// Gaussian elimination with partial pivoting; returns the solution and the determinant.
pub fn solve_with_det(a: &Matrix, b: &[BigFloat]) -> Result<(Vec<BigFloat>, BigFloat)> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let prec = prec_of(a);
    let mut m: Matrix = a.clone();
    let mut rhs = b.to_vec();
    let mut det = BigFloat::one().with_precision(prec);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[piv][col].is_zero() {
            return Err(Error::Numeric("singular matrix".into()));
        }
        if piv != col {
            m.swap(piv, col);
            rhs.swap(piv, col);
            det = -det;
        }
        det = &det * &m[col][col];
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let t = &f * &m[col][c];
                m[r][c] = &m[r][c] - &t;
            }
            let t = &f * &rhs[col];
            rhs[r] = &rhs[r] - &t;
        }
    }
    let mut x = vec![zero(prec); n];
    for r in (0..n).rev() {
        let mut s = rhs[r].clone();
        for c in r + 1..n {
            s = &s - &(&m[r][c] * &x[c]);
        }
        x[r] = &s / &m[r][r];
    }
    Ok((x, det))
}

pub fn solve(a: &Matrix, b: &[BigFloat]) -> Result<Vec<BigFloat>> {
    solve_with_det(a, b).map(|(x, _)| x)
}

pub fn det(a: &Matrix) -> BigFloat {
    let n = a.len();
    let prec = prec_of(a);
    match solve_with_det(a, &vec![zero(prec); n]) {
        Ok((_, d)) => d,
        Err(_) => zero(prec),
    }
}

/// Least squares `min |Ax - b|` by Householder QR. Returns `x` and the residual norm.
pub fn least_squares(a: &Matrix, b: &[BigFloat]) -> Result<(Vec<BigFloat>, BigFloat)> {
    let rows = a.len();
    let cols = a[0].len();
    assert!(rows >= cols);
    let prec = prec_of(a);
    let mut r = a.clone();
    let mut y = b.to_vec();
    for k in 0..cols {
        let norm = (k..rows)
            .fold(zero(prec), |s, i| &s + &(&r[i][k] * &r[i][k]))
            .sqrt();
        if norm.is_zero() {
            return Err(Error::Numeric("rank deficient least squares".into()));
        }
        let alpha = if r[k][k].is_negative() { norm } else { -norm };
        let mut v: Vec<BigFloat> = (k..rows).map(|i| r[i][k].clone()).collect();
        v[0] = &v[0] - &alpha;
        let vnorm2 = v.iter().fold(zero(prec), |s, x| &s + &(x * x));
        if vnorm2.is_zero() {
            continue;
        }
        for c in k..cols {
            let dot = v.iter().enumerate().fold(zero(prec), |s, (i, vi)| &s + &(vi * &r[k + i][c]));
            let f = &(&dot + &dot) / &vnorm2;
            for (i, vi) in v.iter().enumerate() {
                r[k + i][c] = &r[k + i][c] - &(&f * vi);
            }
        }
        let dot = v.iter().enumerate().fold(zero(prec), |s, (i, vi)| &s + &(vi * &y[k + i]));
        let f = &(&dot + &dot) / &vnorm2;
        for (i, vi) in v.iter().enumerate() {
            y[k + i] = &y[k + i] - &(&f * vi);
        }
    }
    let mut x = vec![zero(prec); cols];
    for k in (0..cols).rev() {
        let mut s = y[k].clone();
        for c in k + 1..cols {
            s = &s - &(&r[k][c] * &x[c]);
        }
        x[k] = s.try_div(&r[k][k])?;
    }
    let resid = (cols..rows).fold(zero(prec), |s, i| &s + &(&y[i] * &y[i])).sqrt();
    Ok((x, resid))
}

/// Characteristic polynomial `det(tI - A)` by Faddeev-LeVerrier, lowest degree first.
pub fn char_poly(a: &Matrix) -> Vec<BigFloat> {
    let n = a.len();
    let prec = prec_of(a);
    let mut coeffs = vec![zero(prec); n + 1];
    coeffs[n] = BigFloat::one().with_precision(prec);
    let mut m = vec![vec![zero(prec); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![zero(prec); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = zero(prec);
                for l in 0..n {
                    s = &s + &(&a[i][l] * &m[l][j]);
                }
                if i == j {
                    s = &s + &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = zero(prec);
        for i in 0..n {
            for l in 0..n {
                tr = &tr + &(&a[i][l] * &m[l][i]);
            }
        }
        coeffs[n - k] = -(&tr / &BigFloat::from_i64(k as i64, prec));
    }
    coeffs
}

fn eval_poly(c: &[BigFloat], t: &BigFloat) -> (BigFloat, BigFloat) {
    let prec = t.precision();
    let mut p = zero(prec);
    let mut dp = zero(prec);
    for ci in c.iter().rev() {
        dp = &(&dp * t) + &p;
        p = &(&p * t) + ci;
    }
    (p, dp)
}

/// Perron root of a nonnegative matrix with Collatz-Wielandt bounds.
#[derive(Clone, Debug)]
pub struct PerronRoot {
    pub root: BigFloat,
    pub lower: BigFloat,
    pub upper: BigFloat,
    pub vector: Vec<BigFloat>,
}

/// Power iteration on `A + I`, then Newton polishing on the characteristic polynomial.
pub fn perron_root(a: &Matrix) -> PerronRoot {
    let n = a.len();
    let prec = prec_of(a);
    let one = BigFloat::one().with_precision(prec);
    let shifted: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { &a[i][j] + &one } else { a[i][j].clone() }).collect())
        .collect();
    let mut v = vec![one.clone(); n];
    let mut estimate = zero(prec);
    for _ in 0..400 {
        let w = mat_vec(&shifted, &v);
        let norm = max_norm(&w);
        if norm.is_zero() {
            break;
        }
        let next: Vec<BigFloat> = w.iter().map(|x| x / &norm).collect();
        let delta = max_norm(&next.iter().zip(&v).map(|(a, b)| a - b).collect::<Vec<_>>());
        v = next;
        estimate = &norm - &one;
        if delta.to_f64() < 1e-25 {
            break;
        }
    }
    let av = mat_vec(a, &v);
    let mut lower: Option<BigFloat> = None;
    let mut upper: Option<BigFloat> = None;
    for i in 0..n {
        if v[i].is_positive() {
            let q = &av[i] / &v[i];
            lower = Some(match lower {
                Some(l) => l.min(q.clone()),
                None => q.clone(),
            });
            upper = Some(match upper {
                Some(u) => u.max(q),
                None => q,
            });
        }
    }
    let cp = char_poly(a);
    let mut t = estimate.clone();
    for _ in 0..200 {
        let (p, dp) = eval_poly(&cp, &t);
        if dp.is_zero() {
            break;
        }
        let step = &p / &dp;
        t = &t - &step;
        if step.is_zero() || step.abs().to_f64() <= t.abs().to_f64() * 2f64.powi(-(prec as i32) + 8) {
            break;
        }
    }
    // keep the polished value only if it stayed near the power iteration estimate
    let root = if (&t - &estimate).abs().to_f64() < 1e-6 { t } else { estimate };
    PerronRoot {
        lower: lower.unwrap_or_else(|| root.clone()),
        upper: upper.unwrap_or_else(|| root.clone()),
        root,
        vector: v,
    }
}

/// Result of [`newton`].
#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<BigFloat>,
    pub residual: BigFloat,
    pub iterations: usize,
}

/// Newton iteration for `F(x) = 0` given `F` and its Jacobian.
///
/// Stops when the residual falls below `tol` or stops shrinking.
pub fn newton<F>(mut x: Vec<BigFloat>, tol: &BigFloat, max_iter: usize, mut f: F) -> Result<NewtonOutcome>
where
    F: FnMut(&[BigFloat]) -> Result<(Vec<BigFloat>, Matrix)>,
{
    let mut best: Option<NewtonOutcome> = None;
    for it in 0..max_iter {
        let (r, jac) = f(&x)?;
        let res = max_norm(&r);
        if res <= *tol {
            return Ok(NewtonOutcome { x, residual: res, iterations: it });
        }
        if let Some(b) = &best {
            // residual grew by more than a factor 4 since the best iterate: diverging
            if res.to_f64() > 4.0 * b.residual.to_f64() && it > 3 {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| res < b.residual) {
            best = Some(NewtonOutcome { x: x.clone(), residual: res.clone(), iterations: it });
        }
        let dx = solve(&jac, &r)?;
        x = x.iter().zip(&dx).map(|(a, b)| a - b).collect();
    }
    let (r, _) = f(&x)?;
    let res = max_norm(&r);
    if res <= *tol {
        return Ok(NewtonOutcome { x, residual: res, iterations: max_iter });
    }
    Err(Error::NoConvergence(format!(
        "newton residual {} above tolerance {}",
        best.map(|b| b.residual).unwrap_or(res).to_decimal(6),
        tol.to_decimal(3)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> BigFloat {
        BigFloat::from_f64(v, 192).unwrap()
    }

    #[test]
    fn solves_and_determinant() {
        let a = vec![vec![f(2.0), f(1.0)], vec![f(1.0), f(3.0)]];
        let (x, d) = solve_with_det(&a, &[f(3.0), f(5.0)]).unwrap();
        assert!((x[0].to_f64() - 0.8).abs() < 1e-30);
        assert!((x[1].to_f64() - 1.4).abs() < 1e-30);
        assert!((d.to_f64() - 5.0).abs() < 1e-30);
    }

    #[test]
    fn least_squares_recovers_polynomial() {
        let a: Matrix = (0..10).map(|i| (0..3).map(|k| f((i as f64).powi(k))).collect()).collect();
        let b: Vec<BigFloat> = (0..10).map(|i| f(1.0 + 2.0 * i as f64 - 0.5 * (i * i) as f64)).collect();
        let (x, r) = least_squares(&a, &b).unwrap();
        assert!((x[0].to_f64() - 1.0).abs() < 1e-25);
        assert!((x[1].to_f64() - 2.0).abs() < 1e-25);
        assert!((x[2].to_f64() + 0.5).abs() < 1e-25);
        assert!(r.to_f64() < 1e-25);
    }

    #[test]
    fn perron_root_of_known_matrix() {
        // eigenvalues 3 and -1
        let a = vec![vec![f(1.0), f(2.0)], vec![f(2.0), f(1.0)]];
        let p = perron_root(&a);
        assert!((p.root.to_f64() - 3.0).abs() < 1e-40);
        assert!(p.lower.to_f64() <= 3.0 + 1e-20 && p.upper.to_f64() >= 3.0 - 1e-20);
    }

    #[test]
    fn char_poly_of_triangular() {
        let a = vec![vec![f(2.0), f(5.0)], vec![f(0.0), f(3.0)]];
        let c = char_poly(&a);
        // t^2 - 5t + 6
        assert!((c[0].to_f64() - 6.0).abs() < 1e-30);
        assert!((c[1].to_f64() + 5.0).abs() < 1e-30);
    }
}
