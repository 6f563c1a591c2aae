//! Conservative `(ρ, m = ρu)` step: explicit local Lax–Friedrichs convection
//! followed by backward-Euler singular viscosity on `u`.

use crate::constitutive::{lambda_total, ModelParams};
use crate::error::{Error, Result};
use crate::grid::{Field, State};
use crate::solver::tridiag::solve_periodic;
use crate::solver::SolverConfig;
use crate::{as_f64, lit, Real};

/// Harmonic mean of two positive viscosities.
#[inline]
pub(crate) fn harmonic<T: Real>(a: T, b: T) -> T {
    lit::<T>(2.0) * a * b / (a + b)
}

/// Rejects densities outside `(0, 1)` so the caller can retry with a smaller step.
pub(crate) fn check_admissible<T: Real>(rho: &[T]) -> Result<()> {
    for (cell, &r) in rho.iter().enumerate() {
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::StepRejected { cell, rho: as_f64(r) });
        }
    }
    Ok(())
}

/// Solves `ρ (v − v*) / dt = ∂x(κ ∂x v)` with face coefficients `kappa_face[j]`
/// living between cells `j` and `j+1`, and returns the face fluxes
/// `κ (v_{j+1} − v_j) / dx` of the solution.
pub(crate) fn implicit_diffusion_fluxes<T: Real>(
    weight: &[T],
    rhs: &[T],
    kappa_face: &[T],
    dt: T,
    dx: T,
    tol: T,
) -> Result<Vec<T>> {
    let n = weight.len();
    let c = dt / (dx * dx);
    let mut sub = vec![T::zero(); n];
    let mut sup = vec![T::zero(); n];
    let mut diag = vec![T::zero(); n];
    for j in 0..n {
        let left = kappa_face[if j == 0 { n - 1 } else { j - 1 }];
        let right = kappa_face[j];
        sub[j] = -c * left;
        sup[j] = -c * right;
        diag[j] = weight[j] + c * (left + right);
    }
    let v = solve_periodic(&sub, &diag, &sup, rhs, tol)?;
    Ok((0..n)
        .map(|j| {
            let jp = if j + 1 == n { 0 } else { j + 1 };
            kappa_face[j] * (v[jp] - v[j]) / dx
        })
        .collect())
}

/// One Lie-split step of the primitive formulation.
pub fn step_primitive<T: Real>(
    state: &State<T>,
    params: &ModelParams<T>,
    dt: T,
    config: &SolverConfig,
) -> Result<State<T>> {
    let grid = *state.grid();
    let n = grid.n_cells();
    let dx = grid.dx();
    let ratio = dt / dx;
    let half = lit::<T>(0.5);
    let rho = state.rho.values();
    let u = state.u.values();
    let m: Vec<T> = rho.iter().zip(u).map(|(&r, &v)| r * v).collect();

    // (a) convection, interface j+1/2 between j and j+1
    let mut f_rho = vec![T::zero(); n];
    let mut f_m = vec![T::zero(); n];
    for j in 0..n {
        let jp = grid.next(j);
        let a = u[j].abs().max(u[jp].abs());
        f_rho[j] = half * (m[j] + m[jp]) - half * a * (rho[jp] - rho[j]);
        f_m[j] = half * (m[j] * u[j] + m[jp] * u[jp]) - half * a * (m[jp] - m[j]);
    }
    let mut rho_s = vec![T::zero(); n];
    let mut m_s = vec![T::zero(); n];
    for j in 0..n {
        let jm = grid.prev(j);
        rho_s[j] = rho[j] - ratio * (f_rho[j] - f_rho[jm]);
        m_s[j] = m[j] - ratio * (f_m[j] - f_m[jm]);
    }
    check_admissible(&rho_s)?;

    // (b) implicit viscosity at the post-convection density
    let lam = rho_s
        .iter()
        .map(|&r| lambda_total(r, params))
        .collect::<Result<Vec<_>>>()?;
    let lam_face: Vec<T> = (0..n).map(|j| harmonic(lam[j], lam[grid.next(j)])).collect();
    let flux = implicit_diffusion_fluxes(&rho_s, &m_s, &lam_face, dt, dx, lit(config.linear_tol))?;

    // flux-form momentum update keeps ∫ρu exact up to roundoff
    let mut u_new = vec![T::zero(); n];
    for j in 0..n {
        let m_new = m_s[j] + ratio * (flux[j] - flux[grid.prev(j)]);
        u_new[j] = m_new / rho_s[j];
    }
    if u_new.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("step_primitive"));
    }
    Ok(State {
        rho: Field::from_vec_unchecked(&grid, rho_s),
        u: Field::from_vec_unchecked(&grid, u_new),
        time: state.time + dt,
    })
}
