//! Smooth periodic initial data and the admissibility checks run before any solve.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constitutive::ModelParams;
use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid, State};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InitialData {
    /// `ρ = ρ̄ + a_ρ sin(2πx/L + φ_ρ)`, `u = −a_u sin(2πx/L + φ_u)`.
    Sinusoidal {
        rho_bar: f64,
        a_rho: f64,
        phase_rho: f64,
        a_u: f64,
        phase_u: f64,
    },
    /// Left state on `(0, L/2)`, right state on `(L/2, L)`, joined by periodic tanh ramps of width `sigma`.
    TwoPlateau {
        rho_left: f64,
        rho_right: f64,
        u_left: f64,
        u_right: f64,
        sigma: f64,
    },
}

impl InitialData {
    /// Parameter sanity independent of the grid and of ε.
    pub fn check(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: Some(key.into()),
                message: message.into(),
            })
        };
        let values: Vec<f64> = match *self {
            InitialData::Sinusoidal {
                rho_bar,
                a_rho,
                phase_rho,
                a_u,
                phase_u,
            } => vec![rho_bar, a_rho, phase_rho, a_u, phase_u],
            InitialData::TwoPlateau {
                rho_left,
                rho_right,
                u_left,
                u_right,
                sigma,
            } => {
                if !(sigma > 0.0) {
                    return bad("sigma", "sigma must be positive");
                }
                vec![rho_left, rho_right, u_left, u_right]
            }
        };
        if values.iter().any(|v| !v.is_finite()) {
            return bad("initial", "non-finite initial-data parameter");
        }
        Ok(())
    }

    /// Density and velocity sampled at the cell centers.
    pub fn sample(&self, grid: &Grid<f64>) -> (Field<f64>, Field<f64>) {
        let k = 2.0 * PI / grid.length();
        match *self {
            InitialData::Sinusoidal {
                rho_bar,
                a_rho,
                phase_rho,
                a_u,
                phase_u,
            } => (
                grid.sample(|x| rho_bar + a_rho * (k * x + phase_rho).sin()),
                grid.sample(|x| -a_u * (k * x + phase_u).sin()),
            ),
            InitialData::TwoPlateau {
                rho_left,
                rho_right,
                u_left,
                u_right,
                sigma,
            } => {
                let l = grid.length();
                let ramp = |x: f64| two_plateau_ramp(x, l, sigma);
                (
                    grid.sample(|x| rho_left + (rho_right - rho_left) * ramp(x)),
                    grid.sample(|x| u_left + (u_right - u_left) * ramp(x)),
                )
            }
        }
    }
}

/// Smooth periodic indicator of `(L/2, L)`: a rising tanh at `L/2` and a
/// falling one at `L`, summed over enough periodic images to be exact in f64.
pub fn two_plateau_ramp(x: f64, length: f64, sigma: f64) -> f64 {
    let images = (40.0 * sigma / length).ceil() as i64 + 2;
    (-images..=images)
        .map(|k| {
            let s = k as f64 * length;
            0.5 * (((x - 0.5 * length + s) / sigma).tanh() - ((x - length + s) / sigma).tanh())
        })
        .sum()
}

/// Largest density allowed by the margin hypothesis `ρ⁰ ≤ 1 − C₀ ε^{1/(β−1)}`.
pub fn ceiling_margin(params: &ModelParams<f64>, c0: f64) -> f64 {
    1.0 - c0 * params.epsilon.powf(1.0 / (params.beta - 1.0))
}

/// Checks `0 < ρ⁰ < 1`, the ceiling margin and `0 < M⁰ < |T|`, naming the violated hypothesis.
pub fn validate_initial(state: &State<f64>, params: &ModelParams<f64>, c0: f64) -> Result<()> {
    let (lo, hi) = (state.rho.min(), state.rho.max());
    if !(lo > 0.0 && hi < 1.0) {
        return Err(Error::Validation {
            hypothesis: "hyp:rho",
            detail: format!("initial density range [{lo}, {hi}] leaves (0, 1)"),
        });
    }
    if !state.u.is_finite() {
        return Err(Error::Validation {
            hypothesis: "hyp:rho",
            detail: "initial velocity is not finite".into(),
        });
    }
    let margin = ceiling_margin(params, c0);
    if hi > margin {
        return Err(Error::Validation {
            hypothesis: "hyp:rho",
            detail: format!("max initial density {hi} exceeds 1 - C0 eps^(1/(beta-1)) = {margin}"),
        });
    }
    let mass = integrate(&state.rho);
    let length = state.grid().length();
    if !(mass > 0.0 && mass < length) {
        return Err(Error::Validation {
            hypothesis: "hyp:mass",
            detail: format!("initial mass {mass} outside (0, {length})"),
        });
    }
    Ok(())
}

/// Samples `desc` on `grid` and validates the result.
pub fn build_initial(desc: &InitialData, grid: &Grid<f64>, params: &ModelParams<f64>, c0: f64) -> Result<State<f64>> {
    desc.check()?;
    let (rho, u) = desc.sample(grid);
    let state = State {
        rho,
        u,
        time: 0.0,
    };
    validate_initial(&state, params, c0)?;
    Ok(state)
}

/// Band-limited random perturbation: the first three Fourier modes with
/// coefficients uniform in `[−amplitude, amplitude]`, added to both fields.
///
/// Member `k` of a seed draws from its own stream, so ensemble members are
/// independent of evaluation order.
pub fn perturb(state: &State<f64>, amplitude: f64, seed: u64, member: u64) -> State<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    let grid = *state.grid();
    let k0 = 2.0 * PI / grid.length();
    let mut modes = || -> [(f64, f64); 3] {
        let mut c = [(0.0, 0.0); 3];
        for slot in &mut c {
            *slot = (rng.gen_range(-amplitude..=amplitude), rng.gen_range(-amplitude..=amplitude));
        }
        c
    };
    let (mr, mu) = (modes(), modes());
    let bump = |c: &[(f64, f64); 3], x: f64| -> f64 {
        c.iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let kx = (i as f64 + 1.0) * k0 * x;
                a * kx.cos() + b * kx.sin()
            })
            .sum()
    };
    let dr = grid.sample(|x| bump(&mr, x));
    let du = grid.sample(|x| bump(&mu, x));
    State {
        rho: state.rho.add(&dr).expect("same grid"),
        u: state.u.add(&du).expect("same grid"),
        time: state.time,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(eps: f64) -> ModelParams<f64> {
        ModelParams::new(eps, 2.0, 3.0, 0.25).unwrap()
    }

    fn sinusoid(rho_bar: f64, a_rho: f64) -> InitialData {
        InitialData::Sinusoidal {
            rho_bar,
            a_rho,
            phase_rho: 0.0,
            a_u: 0.5,
            phase_u: 0.0,
        }
    }

    #[test]
    fn sinusoid_extrema_and_mass() {
        let g = Grid::new(512, 1.0).unwrap();
        let s = build_initial(&sinusoid(0.7, 0.2), &g, &params(1e-2), 0.5).unwrap();
        // 512 is divisible by 4, but centers sit half a cell off the peaks
        let off = (PI / 512.0).cos();
        assert_relative_eq!(s.rho.max(), 0.7 + 0.2 * off, epsilon = 1e-14);
        assert_relative_eq!(s.rho.min(), 0.7 - 0.2 * off, epsilon = 1e-14);
        assert!((s.rho.max() - 0.9).abs() < 1e-5 && (s.rho.min() - 0.5).abs() < 1e-5);
        assert_relative_eq!(s.mass(), 0.7, epsilon = 1e-14);
        assert!((s.u.values()[0] + 0.5 * (PI / 512.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn overshoot_names_hyp_rho() {
        let g = Grid::new(64, 1.0).unwrap();
        let r = build_initial(&sinusoid(0.7, 0.35), &g, &params(1e-2), 0.5);
        assert!(matches!(r, Err(Error::Validation { hypothesis: "hyp:rho", .. })));
    }

    #[test]
    fn margin_is_enforced() {
        let g = Grid::new(64, 1.0).unwrap();
        // max ≈ 0.97 is admissible in (0, 1) but above 1 − 0.5·0.1 = 0.95
        let r = build_initial(&sinusoid(0.75, 0.22), &g, &params(1e-2), 0.5);
        assert!(matches!(r, Err(Error::Validation { hypothesis: "hyp:rho", .. })));
        assert!(build_initial(&sinusoid(0.75, 0.22), &g, &params(1e-4), 0.5).is_ok());
        assert_relative_eq!(ceiling_margin(&params(1e-2), 0.5), 0.95);
    }

    #[test]
    fn mass_hypothesis() {
        let g = Grid::new(64, 2.0).unwrap();
        let s = State::new(g.constant(0.5), g.constant(0.0), 0.0).unwrap();
        assert!(validate_initial(&s, &params(1e-4), 0.5).is_ok());
        let neg = State {
            rho: g.constant(-0.1),
            u: g.constant(0.0),
            time: 0.0,
        };
        assert!(matches!(validate_initial(&neg, &params(1e-4), 0.5), Err(Error::Validation { hypothesis: "hyp:rho", .. })));
    }

    #[test]
    fn equal_plateaus_are_constant() {
        let g = Grid::new(128, 1.0).unwrap();
        let d = InitialData::TwoPlateau {
            rho_left: 0.6,
            rho_right: 0.6,
            u_left: 0.3,
            u_right: 0.3,
            sigma: 0.05,
        };
        let s = build_initial(&d, &g, &params(1e-2), 0.5).unwrap();
        assert!(s.rho.values().iter().all(|&r| (r - 0.6).abs() < 1e-15));
        assert!(s.u.values().iter().all(|&u| (u - 0.3).abs() < 1e-15));
    }

    #[test]
    fn ramp_shape() {
        let l = 1.0;
        assert!((two_plateau_ramp(0.25, l, 0.01) - 0.0).abs() < 1e-12);
        assert!((two_plateau_ramp(0.75, l, 0.01) - 1.0).abs() < 1e-12);
        // wider ramps leave a tanh(L/4σ) tail on the plateaus
        let tail = 0.5 * ((-5.0f64).tanh() - (-15.0f64).tanh());
        assert!((two_plateau_ramp(0.25, l, 0.05) - 2.0 * tail).abs() < 1e-12);
        assert!((two_plateau_ramp(0.5, l, 0.05) - 0.5).abs() < 1e-12);
        // periodic and bounded
        for i in 0..100 {
            let x = i as f64 / 100.0;
            let r = two_plateau_ramp(x, l, 0.05);
            assert!((r - two_plateau_ramp(x + l, l, 0.05)).abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&r));
        }
    }

    #[test]
    fn perturbation_is_seeded_and_band_limited() {
        let g = Grid::new(64, 1.0).unwrap();
        let base = State::new(g.constant(0.5), g.constant(0.0), 0.0).unwrap();
        let a = perturb(&base, 0.01, 7, 3);
        assert_eq!(a, perturb(&base, 0.01, 7, 3));
        assert_ne!(a, perturb(&base, 0.01, 7, 4));
        assert_relative_eq!(a.mass(), 0.5, epsilon = 1e-14);
        // energy only in modes 1..=3: the mode-4 discrete Fourier coefficient vanishes
        let c4: f64 = a
            .rho
            .values()
            .iter()
            .enumerate()
            .map(|(j, &r)| r * (2.0 * PI * 4.0 * g.center(j)).cos())
            .sum();
        assert!(c4.abs() < 1e-12);
        assert!(a.rho.values().iter().all(|&r| (r - 0.5).abs() <= 0.06 + 1e-12));
    }
}
