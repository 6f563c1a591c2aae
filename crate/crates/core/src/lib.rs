//! Singular Aw-Rascle / pressureless viscous flow on the one-dimensional torus.
//!
//! The crate simulates the approximate system
//!
//! ```text
//! ∂t ρ + ∂x(ρ u) = 0
//! ∂t(ρ u) + ∂x(ρ u²) − ∂x(λ(ρ) ∂x u) = 0,   λ(ρ) = ρ² p'(ρ) + ρ² φ'(ρ)
//! ```
//!
//! with the singular offset `p(ρ) = ε ρ^γ (1 − ρ)^(−β)`, monitors the a-priori
//! quantities that control it (energy, BD norm, density ceiling, one-sided
//! Lipschitz bound, singular potential), and compares the ε → 0 behaviour with
//! an event-driven sticky-blocks solver for the free/congested limit.
//!
//! All numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases at the crate root fix the scalar to `f64`, which is what the
//! harness and CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0)` is how NaN gets rejected
pub mod constitutive;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod quadrature;
pub mod solver;
pub mod sticky;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use constitutive::ModelParams;
pub use diagnostics::{DiagnosticsRecord, DiagnosticsRow, OleinikConstant};
pub use error::{Error, Result};
pub use grid::{Field, Grid, State};
pub use solver::{Formulation, SolverConfig, Trajectory};
pub use sticky::{BlockSystem, Cluster, DensityCdf};

/// Floating point scalar accepted by every numerical kernel in the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub(crate) fn as_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type State64 = State<f64>;
pub type Params64 = ModelParams<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type BlockSystem64 = BlockSystem<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type State32 = State<f32>;
pub type Params32 = ModelParams<f32>;
