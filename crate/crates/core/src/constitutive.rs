//! Closed-form singular laws: the barrier `p`, the vacuum regularizer `φ`,
//! the viscosity `λ`, the potential `π`, the enthalpy `H` and the offset
//! velocity `w`.

use crate::error::{Error, Result};
use crate::grid::{deriv_x, Field, State};
use crate::quadrature::integrate_adaptive;
use crate::{as_f64, lit, Real};

/// Parameters of the singular law `p(ρ) = ε ρ^γ / (1 − ρ)^β` and of the
/// regularizer `φ(ρ) = ε ρ^(α−1) / (α − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ModelParams<T> {
    pub epsilon: T,
    pub gamma: T,
    pub beta: T,
    pub alpha: T,
    /// Relative tolerance of the quadratures behind [`pi_potential`] and [`enthalpy_h`].
    pub quad_tol: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(epsilon: T, gamma: T, beta: T, alpha: T) -> Result<Self> {
        Self::with_quad_tol(epsilon, gamma, beta, alpha, lit(1e-10))
    }

    pub fn with_quad_tol(epsilon: T, gamma: T, beta: T, alpha: T, quad_tol: T) -> Result<Self> {
        let p = Self {
            epsilon,
            gamma,
            beta,
            alpha,
            quad_tol,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.beta > T::one()) || !self.beta.is_finite() {
            return bad(format!("beta must be > 1, got {}", self.beta));
        }
        if !(self.alpha > T::zero() && self.alpha < lit(0.5)) {
            return bad(format!("alpha must lie in (0, 1/2), got {}", self.alpha));
        }
        if !(self.quad_tol > T::zero()) {
            return bad(format!("quad_tol must be positive, got {}", self.quad_tol));
        }
        Ok(())
    }

    /// Ceiling-margin exponent `1 / (β − 1)`.
    pub fn ceiling_exponent(&self) -> T {
        T::one() / (self.beta - T::one())
    }
}

fn check_below_one<T: Real>(what: &'static str, rho: T) -> Result<()> {
    if !(rho >= T::zero() && rho < T::one()) {
        return Err(Error::Domain {
            what,
            value: as_f64(rho),
        });
    }
    Ok(())
}

/// `(1 − ρ)^(−k)` through `log1p` so that relative accuracy survives `ρ → 1`.
#[inline]
fn inv_gap_pow<T: Real>(rho: T, k: T) -> T {
    (-k * (-rho).ln_1p()).exp()
}

/// Barrier `p(ρ) = ε ρ^γ (1 − ρ)^(−β)` on `[0, 1)`.
pub fn pressure<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    check_below_one("pressure", rho)?;
    Ok(params.epsilon * rho.powf(params.gamma) * inv_gap_pow(rho, params.beta))
}

#[inline]
fn dpressure_unchecked<T: Real>(rho: T, params: &ModelParams<T>) -> T {
    let ModelParams {
        epsilon: e,
        gamma: g,
        beta: b,
        ..
    } = *params;
    // ε (1−ρ)^(−β−1) [γ ρ^(γ−1) (1−ρ) + β ρ^γ]
    let first = if g == T::zero() {
        T::zero()
    } else {
        g * rho.powf(g - T::one()) * (T::one() - rho)
    };
    e * inv_gap_pow(rho, b + T::one()) * (first + b * rho.powf(g))
}

/// `p'(ρ)`; at `ρ = 0` it is `0` for `γ > 1`, `ε` for `γ = 1`, `εβ` for `γ = 0`,
/// and unbounded (rejected) for `0 < γ < 1`.
pub fn dpressure<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    check_below_one("dpressure", rho)?;
    if rho == T::zero() && params.gamma > T::zero() && params.gamma < T::one() {
        return Err(Error::Domain {
            what: "dpressure (infinite slope at vacuum for 0 < gamma < 1)",
            value: 0.0,
        });
    }
    Ok(dpressure_unchecked(rho, params))
}

/// Regularizer `φ(ρ) = ε ρ^(α−1) / (α − 1)`, negative on `(0, ∞)`.
pub fn phi<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain {
            what: "phi",
            value: as_f64(rho),
        });
    }
    let a = params.alpha;
    Ok(params.epsilon / (a - T::one()) * rho.powf(a - T::one()))
}

/// `φ'(ρ) = ε ρ^(α−2)`.
pub fn dphi<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(Error::Domain {
            what: "dphi",
            value: as_f64(rho),
        });
    }
    Ok(params.epsilon * rho.powf(params.alpha - lit(2.0)))
}

/// Viscosity `λ(ρ) = ρ² p'(ρ) + ε ρ^α`; always satisfies `λ(ρ)/ρ ≥ ε` on `(0, 1)`.
pub fn lambda_total<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    if !(rho > T::zero() && rho < T::one()) {
        return Err(Error::Domain {
            what: "lambda_total",
            value: as_f64(rho),
        });
    }
    Ok(rho * rho * dpressure_unchecked(rho, params) + params.epsilon * rho.powf(params.alpha))
}

/// Porous-medium mobility `ρ (p'(ρ) + φ'(ρ))` of the density equation in
/// the offset formulation. Equals `λ(ρ)/ρ`.
pub fn mobility<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    Ok(lambda_total(rho, params)? / rho)
}

fn quad_abs_tol<T: Real>(params: &ModelParams<T>) -> T {
    params.quad_tol * params.epsilon * lit(1e-6)
}

/// Singular potential `π(ρ) = ∫₀^ρ s p'(s) ds + (ε/α) ρ^α`, with `π(0) = 0`.
///
/// The `ε s^(α−1)` part is integrated in closed form; the barrier part by
/// adaptive Gauss–Kronrod.
pub fn pi_potential<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    check_below_one("pi_potential", rho)?;
    let singular = params.epsilon / params.alpha * rho.powf(params.alpha);
    let smooth = integrate_adaptive(
        |s| s * dpressure_unchecked(s, params),
        T::zero(),
        rho,
        params.quad_tol,
        quad_abs_tol(params),
    )?;
    Ok(smooth + singular)
}

/// Closed-form `∫₀^ρ φ(s) ds = ε ρ^α / (α (α − 1))`.
pub fn enthalpy_phi_part<T: Real>(rho: T, params: &ModelParams<T>) -> T {
    let a = params.alpha;
    params.epsilon * rho.powf(a) / (a * (a - T::one()))
}

/// Enthalpy `H(ρ) = ∫₀^ρ (p(s) + φ(s)) ds`.
pub fn enthalpy_h<T: Real>(rho: T, params: &ModelParams<T>) -> Result<T> {
    check_below_one("enthalpy_h", rho)?;
    let p_part = integrate_adaptive(
        |s| params.epsilon * s.powf(params.gamma) * inv_gap_pow(s, params.beta),
        T::zero(),
        rho,
        params.quad_tol,
        quad_abs_tol(params),
    )?;
    Ok(p_part + enthalpy_phi_part(rho, params))
}

/// `p(ρ) + φ(ρ)` cellwise.
pub fn offset_potential<T: Real>(rho: &Field<T>, params: &ModelParams<T>) -> Result<Field<T>> {
    rho.try_map(|r| {
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::Domain {
                what: "offset_potential",
                value: as_f64(r),
            });
        }
        Ok(pressure(r, params)? + phi(r, params)?)
    })
}

/// Offset velocity `w = u + ∂x(p(ρ) + φ(ρ))` with the centered difference.
pub fn offset_w<T: Real>(state: &State<T>, params: &ModelParams<T>) -> Result<Field<T>> {
    let g = deriv_x(&offset_potential(&state.rho, params)?);
    state.u.add(&g)
}

pub fn lambda_field<T: Real>(rho: &Field<T>, params: &ModelParams<T>) -> Result<Field<T>> {
    rho.try_map(|r| lambda_total(r, params))
}

pub fn pi_field<T: Real>(rho: &Field<T>, params: &ModelParams<T>) -> Result<Field<T>> {
    rho.try_map(|r| pi_potential(r, params))
}
