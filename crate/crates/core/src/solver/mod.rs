//! Time integration of the approximate system.
//!
//! Two formulations are available: the primitive `(ρ, ρu)` system with
//! singular viscosity, and the offset `(ρ, ρw)` system in which the density
//! obeys a porous-medium equation. Both are first order: explicit convection,
//! implicit diffusion, periodic tridiagonal solves.

mod dual;
mod primitive;
pub mod tridiag;

use serde::{Deserialize, Serialize};

pub use dual::{step_dual, velocity_from_offset, DualState};
pub use primitive::step_primitive;
pub(crate) use primitive::harmonic;

use crate::constitutive::{offset_w, ModelParams};
use crate::diagnostics::{energy, oleinik_a, sample_row, DiagnosticsRecord, OleinikConstant};
use crate::error::{Error, Result};
use crate::grid::State;
use crate::{as_f64, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Primitive,
    Dual,
}

impl std::str::FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primitive" => Ok(Self::Primitive),
            "dual" => Ok(Self::Dual),
            other => Err(Error::Config {
                key: Some("formulation".into()),
                message: format!("unknown formulation {other:?} (expected primitive|dual)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub cfl: f64,
    pub max_dt_halvings: u32,
    /// Mobility refreshes per step, dual formulation only.
    pub picard_iters: usize,
    pub linear_tol: f64,
    /// Diagnostics are sampled every this many accepted steps (and at the end).
    pub sample_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            max_dt_halvings: 20,
            picard_iters: 2,
            linear_tol: 1e-12,
            sample_every: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: String| {
            Err(Error::Config {
                key: Some(key.into()),
                message,
            })
        };
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl", format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if self.picard_iters == 0 {
            return bad("picard_iters", "picard_iters must be >= 1".into());
        }
        if !(self.linear_tol > 0.0) {
            return bad("linear_tol", format!("linear_tol must be positive, got {}", self.linear_tol));
        }
        if self.sample_every == 0 {
            return bad("sample_every", "sample_every must be >= 1".into());
        }
        Ok(())
    }
}

/// `cfl·dx / max_j(|u_j| + |w_j − u_j| + 1e-12)`, capped by `remaining`.
pub fn stable_dt<T: Real>(state: &State<T>, params: &ModelParams<T>, config: &SolverConfig, remaining: T) -> Result<T> {
    let w = offset_w(state, params)?;
    let speed = state
        .u
        .values()
        .iter()
        .zip(w.values())
        .map(|(&u, &w)| u.abs() + (w - u).abs())
        .fold(T::zero(), T::max)
        + lit(1e-12);
    let dt = lit::<T>(config.cfl) * state.grid().dx() / speed;
    Ok(dt.min(remaining))
}

/// Whole-run statistics gathered at every accepted step, not only at samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStats<T> {
    pub max_rho: T,
    pub max_rho_time: T,
    pub min_rho: T,
    pub mass0: T,
    /// Conserved momentum: `∫ρu` (primitive) or `∫ρw` (dual).
    pub momentum0: T,
    pub max_mass_drift: T,
    pub max_momentum_drift: T,
    /// Largest relative increase of `∫ρu²` over a single step.
    pub max_energy_increase: T,
    pub energy0: T,
    pub energy_final: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    /// Sampled states, the initial state first.
    pub samples: Vec<State<T>>,
    pub terminal: State<T>,
    pub steps: usize,
    pub rejections: usize,
    pub dt_history: Vec<T>,
    pub oleinik: OleinikConstant<T>,
    pub stats: RunStats<T>,
}

enum Current<T> {
    Primitive(State<T>),
    Dual(DualState<T>),
}

impl<T: Real> Current<T> {
    fn view(&self, params: &ModelParams<T>) -> Result<State<T>> {
        match self {
            Current::Primitive(s) => Ok(s.clone()),
            Current::Dual(d) => Ok(State {
                u: velocity_from_offset(&d.rho, &d.w, params)?,
                rho: d.rho.clone(),
                time: d.time,
            }),
        }
    }

    fn time(&self) -> T {
        match self {
            Current::Primitive(s) => s.time,
            Current::Dual(d) => d.time,
        }
    }

    fn set_time(&mut self, t: T) {
        match self {
            Current::Primitive(s) => s.time = t,
            Current::Dual(d) => d.time = t,
        }
    }

    fn step(&self, params: &ModelParams<T>, dt: T, config: &SolverConfig) -> Result<Self> {
        Ok(match self {
            Current::Primitive(s) => Current::Primitive(step_primitive(s, params, dt, config)?),
            Current::Dual(d) => Current::Dual(step_dual(d, params, dt, config)?),
        })
    }

    /// Conserved momentum and its `L¹` scale.
    fn momentum(&self) -> (T, T) {
        let (rho, v) = match self {
            Current::Primitive(s) => (&s.rho, &s.u),
            Current::Dual(d) => (&d.rho, &d.w),
        };
        let dx = rho.grid().dx();
        let (m, scale) = rho
            .values()
            .iter()
            .zip(v.values())
            .fold((T::zero(), T::zero()), |(m, s), (&r, &v)| (m + r * v, s + (r * v).abs()));
        (m * dx, scale * dx)
    }
}

/// Advances `initial` to `t_end`, sampling diagnostics every
/// `config.sample_every` accepted steps and at `t_end`.
///
/// A step whose density leaves `(0, 1)` is retried with half the time step,
/// at most `config.max_dt_halvings` times; after that the run fails with the
/// time and cell of the violation.
pub fn run<T: Real>(
    initial: &State<T>,
    params: &ModelParams<T>,
    t_end: T,
    config: &SolverConfig,
    formulation: Formulation,
) -> Result<(Trajectory<T>, DiagnosticsRecord<T>)> {
    config.validate()?;
    params.validate()?;
    initial.validate()?;
    if !(t_end >= initial.time) || !t_end.is_finite() {
        return Err(Error::Config {
            key: Some("t_end".into()),
            message: format!("t_end {} precedes the initial time {}", t_end, initial.time),
        });
    }

    let a = oleinik_a(initial, params)?;
    let mut record = DiagnosticsRecord::default();
    record.push(sample_row(initial, None, params, a)?)?;

    let mut current = match formulation {
        Formulation::Primitive => Current::Primitive(initial.clone()),
        Formulation::Dual => Current::Dual(DualState {
            rho: initial.rho.clone(),
            w: offset_w(initial, params)?,
            time: initial.time,
        }),
    };
    let mass0 = initial.mass();
    let (momentum0, momentum_scale) = current.momentum();
    let momentum_scale = momentum_scale.max(T::min_positive_value());
    let energy0 = energy(initial);
    let mut stats = RunStats {
        max_rho: initial.rho.max(),
        max_rho_time: initial.time,
        min_rho: initial.rho.min(),
        mass0,
        momentum0,
        max_mass_drift: T::zero(),
        max_momentum_drift: T::zero(),
        max_energy_increase: T::zero(),
        energy0,
        energy_final: energy0,
    };

    let mut samples = vec![initial.clone()];
    let mut dt_history = Vec::new();
    let mut steps = 0usize;
    let mut rejections = 0usize;
    let mut view = initial.clone();
    let mut last_sampled_step = 0usize;

    while current.time() < t_end {
        let remaining = t_end - current.time();
        let dt_full = stable_dt(&view, params, config, remaining)?;
        let mut dt = dt_full;
        let mut halvings = 0u32;
        let next = loop {
            match current.step(params, dt, config) {
                Ok(next) => break next,
                Err(Error::StepRejected { cell, .. }) => {
                    rejections += 1;
                    if halvings >= config.max_dt_halvings {
                        return Err(Error::PositivityFailure {
                            time: as_f64(current.time()),
                            cell,
                            halvings,
                        });
                    }
                    halvings += 1;
                    dt = dt * lit(0.5);
                }
                Err(e) => return Err(e),
            }
        };
        let finishing = halvings == 0 && dt_full >= remaining;
        current = next;
        if finishing {
            current.set_time(t_end);
        }
        steps += 1;
        dt_history.push(dt);

        let before = std::mem::replace(&mut view, current.view(params)?);
        let e_before = energy(&before);
        let e_after = energy(&view);
        let rel_increase = (e_after - e_before) / e_before.max(T::min_positive_value());
        stats.max_energy_increase = stats.max_energy_increase.max(rel_increase);
        stats.energy_final = e_after;
        let rmax = view.rho.max();
        if rmax > stats.max_rho {
            stats.max_rho = rmax;
            stats.max_rho_time = view.time;
        }
        stats.min_rho = stats.min_rho.min(view.rho.min());
        stats.max_mass_drift = stats.max_mass_drift.max(((view.mass() - mass0) / mass0).abs());
        let (mom, _) = current.momentum();
        stats.max_momentum_drift = stats.max_momentum_drift.max(((mom - momentum0) / momentum_scale).abs());

        let done = current.time() >= t_end;
        if steps - last_sampled_step >= config.sample_every || done {
            record.push(sample_row(&view, Some((&before, dt)), params, a)?)?;
            samples.push(view.clone());
            last_sampled_step = steps;
        }
    }

    Ok((
        Trajectory {
            samples,
            terminal: view,
            steps,
            rejections,
            dt_history,
            oleinik: a,
            stats,
        },
        record,
    ))
}
