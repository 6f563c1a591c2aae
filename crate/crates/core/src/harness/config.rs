//! Flat `key = value` configuration files.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Unknown
//! keys are rejected so that typos do not silently fall back to defaults.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `epsilon` | singular scale ε (required unless `epsilons` is given) | |
//! | `gamma`, `beta`, `alpha` | pressure and potential exponents | required |
//! | `n_cells`, `length` | grid | `length = 1` |
//! | `t_end` | final time | required |
//! | `formulation` | `primitive` or `dual` | `primitive` |
//! | `cfl`, `max_dt_halvings`, `picard_iters`, `linear_tol`, `sample_every` | solver | see [`SolverConfig`] |
//! | `initial` | `sinusoidal` or `two_plateau` | required |
//! | `rho_bar`, `a_rho`, `phase_rho`, `a_u`, `phase_u` | sinusoidal family | phases `0` |
//! | `rho_left`, `rho_right`, `u_left`, `u_right`, `sigma` | two-plateau family | |
//! | `ceiling_c0` | margin constant in `ρ⁰ ≤ 1 − C₀ ε^{1/(β−1)}` | `0.5` |
//! | `output_dir` | where results are written | `out` |
//! | `seed`, `ensemble_size`, `perturbation` | seeded ensemble of perturbed data | `0`, `1`, `0` |
//! | `epsilons` | comma separated sweep values | |
//! | `with_oracle`, `n_particles` | sweep oracle comparison | `false`, `400` |
//! | `workers` | sweep/ensemble threads, `0` = all cores | `0` |
//! | `oracle_snapshots` | number of block snapshots written by `oracle` | `11` |

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::constitutive::ModelParams;
use crate::error::{Error, Result};
use crate::harness::initial::InitialData;
use crate::solver::{Formulation, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSettings {
    pub epsilons: Vec<f64>,
    pub with_oracle: bool,
    pub n_particles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ModelParams<f64>,
    pub n_cells: usize,
    pub length: f64,
    pub t_end: f64,
    pub solver: SolverConfig,
    pub formulation: Formulation,
    pub initial: InitialData,
    pub ceiling_c0: f64,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub ensemble_size: usize,
    pub perturbation: f64,
    pub sweep: SweepSettings,
    pub workers: usize,
    pub oracle_snapshots: usize,
}

impl RunConfig {
    /// Same configuration with a different ε.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let mut c = self.clone();
        let p = c.params;
        c.params = ModelParams::with_quad_tol(epsilon, p.gamma, p.beta, p.alpha, p.quad_tol)?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }
}

const KNOWN_KEYS: &[&str] = &[
    "epsilon",
    "gamma",
    "beta",
    "alpha",
    "n_cells",
    "length",
    "t_end",
    "formulation",
    "cfl",
    "max_dt_halvings",
    "picard_iters",
    "linear_tol",
    "sample_every",
    "initial",
    "rho_bar",
    "a_rho",
    "phase_rho",
    "a_u",
    "phase_u",
    "rho_left",
    "rho_right",
    "u_left",
    "u_right",
    "sigma",
    "ceiling_c0",
    "output_dir",
    "seed",
    "ensemble_size",
    "perturbation",
    "epsilons",
    "with_oracle",
    "n_particles",
    "workers",
    "oracle_snapshots",
];

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: Some(key.to_string()),
        message: message.into(),
    }
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                key: None,
                message: format!("line {}: expected `key = value`, got {line:?}", lineno + 1),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(config_err(k, format!("line {}: unknown key", lineno + 1)));
            }
            if v.is_empty() {
                return Err(config_err(k, format!("line {}: empty value", lineno + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(config_err(k, format!("line {}: duplicate key", lineno + 1)));
            }
        }
        Ok(Self(map))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| config_err(key, format!("cannot parse value {v:?}"))),
        }
    }

    fn req<T: FromStr>(&self, key: &str) -> Result<T> {
        self.opt(key)?.ok_or_else(|| config_err(key, "missing required key"))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.opt(key)?.unwrap_or(default))
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let e = Entries::parse(text)?;
        let epsilons: Vec<f64> = match e.0.get("epsilons") {
            None => Vec::new(),
            Some(list) => list
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| config_err("epsilons", format!("cannot parse list {list:?}")))?,
        };
        let epsilon = match (e.opt::<f64>("epsilon")?, epsilons.first()) {
            (Some(x), _) => x,
            (None, Some(&x)) => x,
            (None, None) => return Err(config_err("epsilon", "missing required key")),
        };
        let params = ModelParams::new(epsilon, e.req("gamma")?, e.req("beta")?, e.req("alpha")?)
            .map_err(|err| config_err("epsilon", err.to_string()))?;

        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            cfl: e.or("cfl", defaults.cfl)?,
            max_dt_halvings: e.or("max_dt_halvings", defaults.max_dt_halvings)?,
            picard_iters: e.or("picard_iters", defaults.picard_iters)?,
            linear_tol: e.or("linear_tol", defaults.linear_tol)?,
            sample_every: e.or("sample_every", defaults.sample_every)?,
        };
        solver.validate()?;

        let family: String = e.req("initial")?;
        let initial = match family.as_str() {
            "sinusoidal" => InitialData::Sinusoidal {
                rho_bar: e.req("rho_bar")?,
                a_rho: e.req("a_rho")?,
                phase_rho: e.or("phase_rho", 0.0)?,
                a_u: e.req("a_u")?,
                phase_u: e.or("phase_u", 0.0)?,
            },
            "two_plateau" => InitialData::TwoPlateau {
                rho_left: e.req("rho_left")?,
                rho_right: e.req("rho_right")?,
                u_left: e.req("u_left")?,
                u_right: e.req("u_right")?,
                sigma: e.req("sigma")?,
            },
            other => {
                return Err(config_err(
                    "initial",
                    format!("unknown family {other:?} (expected sinusoidal|two_plateau)"),
                ))
            }
        };
        initial.check()?;

        let cfg = RunConfig {
            params,
            n_cells: e.req("n_cells")?,
            length: e.or("length", 1.0)?,
            t_end: e.req("t_end")?,
            solver,
            formulation: e.or("formulation", Formulation::Primitive)?,
            initial,
            ceiling_c0: e.or("ceiling_c0", 0.5)?,
            output_dir: PathBuf::from(e.or("output_dir", "out".to_string())?),
            seed: e.or("seed", 0)?,
            ensemble_size: e.or("ensemble_size", 1)?,
            perturbation: e.or("perturbation", 0.0)?,
            sweep: SweepSettings {
                epsilons,
                with_oracle: e.or("with_oracle", false)?,
                n_particles: e.or("n_particles", 400)?,
            },
            workers: e.or("workers", 0)?,
            oracle_snapshots: e.or("oracle_snapshots", 11)?,
        };
        if !(cfg.length > 0.0 && cfg.length.is_finite()) {
            return Err(config_err("length", "length must be positive"));
        }
        if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
            return Err(config_err("t_end", "t_end must be finite and non-negative"));
        }
        if !(cfg.ceiling_c0 >= 0.0) {
            return Err(config_err("ceiling_c0", "ceiling_c0 must be non-negative"));
        }
        if cfg.ensemble_size == 0 {
            return Err(config_err("ensemble_size", "ensemble_size must be >= 1"));
        }
        if !(cfg.perturbation >= 0.0 && cfg.perturbation.is_finite()) {
            return Err(config_err("perturbation", "perturbation must be non-negative"));
        }
        if cfg.oracle_snapshots < 2 {
            return Err(config_err("oracle_snapshots", "need at least 2 snapshots"));
        }
        Ok(cfg)
    }
}
