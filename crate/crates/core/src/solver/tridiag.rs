//! Cyclic tridiagonal systems.
//!
//! Row `i` reads `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`
//! with indices taken modulo `n`.

use crate::error::{Error, Result};
use crate::{as_f64, Real};

fn thomas<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T], scratch: &mut [T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut x = vec![T::zero(); n];
    let mut beta = diag[0];
    if beta == T::zero() || !beta.is_finite() {
        return Err(Error::SingularMatrix { row: 0, pivot: as_f64(beta) });
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        scratch[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * scratch[i];
        if beta == T::zero() || !beta.is_finite() {
            return Err(Error::SingularMatrix { row: i, pivot: as_f64(beta) });
        }
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] = x[i] - scratch[i + 1] * x[i + 1];
    }
    Ok(x)
}

/// `A x` for the cyclic tridiagonal `A`.
pub fn apply_periodic<T: Real>(sub: &[T], diag: &[T], sup: &[T], x: &[T]) -> Vec<T> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let im = if i == 0 { n - 1 } else { i - 1 };
            let ip = if i + 1 == n { 0 } else { i + 1 };
            sub[i] * x[im] + diag[i] * x[i] + sup[i] * x[ip]
        })
        .collect()
}

/// Solves the cyclic system by Sherman–Morrison on top of the Thomas
/// algorithm, then refines iteratively until the residual is below
/// `tol·‖rhs‖∞` (or stops improving).
pub fn solve_periodic<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T], tol: T) -> Result<Vec<T>> {
    let n = diag.len();
    assert!(n >= 3 && sub.len() == n && sup.len() == n && rhs.len() == n);
    let corner_lo = sub[0]; // coefficient of x[n−1] in row 0
    let corner_hi = sup[n - 1]; // coefficient of x[0] in row n−1
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] = diag[0] - gamma;
    d[n - 1] = diag[n - 1] - corner_lo * corner_hi / gamma;
    let mut scratch = vec![T::zero(); n];

    let mut col = vec![T::zero(); n];
    col[0] = gamma;
    col[n - 1] = corner_hi;
    let z = thomas(sub, &d, sup, &col, &mut scratch)?;
    let denom = T::one() + z[0] + corner_lo * z[n - 1] / gamma;
    if denom == T::zero() || !denom.is_finite() {
        return Err(Error::SingularMatrix { row: 0, pivot: as_f64(denom) });
    }

    let solve = |b: &[T], scratch: &mut [T]| -> Result<Vec<T>> {
        let y = thomas(sub, &d, sup, b, scratch)?;
        let fact = (y[0] + corner_lo * y[n - 1] / gamma) / denom;
        Ok(y.iter().zip(&z).map(|(&yi, &zi)| yi - fact * zi).collect())
    };

    let mut x = solve(rhs, &mut scratch)?;
    let scale = rhs.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
    let mut prev_res = T::infinity();
    for _ in 0..4 {
        let ax = apply_periodic(sub, diag, sup, &x);
        let r: Vec<T> = rhs.iter().zip(&ax).map(|(&b, &a)| b - a).collect();
        let res = r.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if !res.is_finite() {
            return Err(Error::NonFinite("tridiagonal solve"));
        }
        if res <= tol * scale || res >= prev_res {
            break;
        }
        prev_res = res;
        let dx = solve(&r, &mut scratch)?;
        for (xi, di) in x.iter_mut().zip(dx) {
            *xi = *xi + di;
        }
    }
    Ok(x)
}
