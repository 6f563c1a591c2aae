//! Single runs, ε-sweeps with power-law fits, ensembles and oracle comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{powerlaw_fit, DiagnosticsRecord, PowerLawFit};
use crate::error::{Error, Result};
use crate::grid::{Grid, State};
use crate::harness::config::RunConfig;
use crate::harness::initial::{build_initial, perturb, validate_initial};
use crate::solver::{run, Trajectory};
use crate::sticky::{block_cdf, cdf_distance, discretize, state_cdf, BlockSnapshot, BlockSystem};

/// Scalar outcome of one run; serialized as the run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epsilon: f64,
    pub n_cells: usize,
    pub t_end: f64,
    pub steps: usize,
    pub rejections: usize,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub energy0: f64,
    pub energy_final: f64,
    /// `(E(T) − E(0)) / E(0)`, zero for data at rest.
    pub energy_drift: f64,
    pub max_energy_increase: f64,
    pub max_rho: f64,
    pub max_rho_time: f64,
    pub min_rho: f64,
    pub ceiling_gap: f64,
    pub terminal_ceiling_gap: f64,
    pub oleinik_a: f64,
    pub oleinik_excess_max: f64,
    pub pi_h1_sup: f64,
    pub visc_flux_l1_sup: f64,
    pub bd_norm0: f64,
    pub bd_norm_max: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub initial: State<f64>,
    pub trajectory: Trajectory<f64>,
    pub record: DiagnosticsRecord<f64>,
    pub summary: RunSummary,
}

pub fn grid_of(config: &RunConfig) -> Result<Grid<f64>> {
    Grid::new(config.n_cells, config.length).map_err(|e| Error::Config {
        key: Some("n_cells".into()),
        message: e.to_string(),
    })
}

/// Validated initial state of `config`.
pub fn initial_state(config: &RunConfig) -> Result<State<f64>> {
    build_initial(&config.initial, &grid_of(config)?, &config.params, config.ceiling_c0)
}

/// Oleinik excess is reported from `t ≥ 5% of the horizon` on, away from the initial layer.
pub const OLEINIK_WINDOW: f64 = 0.05;

fn summarize(config: &RunConfig, tr: &Trajectory<f64>, record: &DiagnosticsRecord<f64>) -> RunSummary {
    let s = &tr.stats;
    let max_of = |f: &dyn Fn(&crate::diagnostics::DiagnosticsRow<f64>) -> f64| record.max_over(0.0, f).unwrap_or(f64::NAN);
    let energy_drift = if s.energy0 > 0.0 {
        (s.energy_final - s.energy0) / s.energy0
    } else {
        s.energy_final - s.energy0
    };
    RunSummary {
        epsilon: config.params.epsilon,
        n_cells: config.n_cells,
        t_end: config.t_end,
        steps: tr.steps,
        rejections: tr.rejections,
        mass_drift: s.max_mass_drift,
        momentum_drift: s.max_momentum_drift,
        energy0: s.energy0,
        energy_final: s.energy_final,
        energy_drift,
        max_energy_increase: s.max_energy_increase,
        max_rho: s.max_rho,
        max_rho_time: s.max_rho_time,
        min_rho: s.min_rho,
        ceiling_gap: 1.0 - s.max_rho,
        terminal_ceiling_gap: 1.0 - tr.terminal.rho.max(),
        oleinik_a: tr.oleinik.value(),
        oleinik_excess_max: record
            .max_over(OLEINIK_WINDOW * config.t_end, |r| r.oleinik_excess())
            .unwrap_or(f64::NEG_INFINITY),
        pi_h1_sup: max_of(&|r| r.pi_h1),
        visc_flux_l1_sup: max_of(&|r| r.visc_flux_l1),
        bd_norm0: record.rows.first().map_or(f64::NAN, |r| r.bd_norm),
        bd_norm_max: max_of(&|r| r.bd_norm),
    }
}

/// Runs `config` from `initial` (already validated against the configuration).
pub fn run_from(config: &RunConfig, initial: State<f64>) -> Result<RunOutcome> {
    validate_initial(&initial, &config.params, config.ceiling_c0)?;
    let (trajectory, record) = run(&initial, &config.params, config.t_end, &config.solver, config.formulation)?;
    let summary = summarize(config, &trajectory, &record);
    Ok(RunOutcome {
        initial,
        trajectory,
        record,
        summary,
    })
}

pub fn run_config(config: &RunConfig) -> Result<RunOutcome> {
    run_from(config, initial_state(config)?)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config {
            key: Some("workers".into()),
            message: e.to_string(),
        })
}

/// `config.ensemble_size` runs from seeded, band-limited perturbations of the
/// configured data, in member order. Member 0 is the unperturbed data.
pub fn ensemble(config: &RunConfig) -> Result<Vec<RunSummary>> {
    let base = initial_state(config)?;
    pool(config.workers)?.install(|| {
        (0..config.ensemble_size as u64)
            .into_par_iter()
            .map(|k| {
                let init = if k == 0 {
                    base.clone()
                } else {
                    perturb(&base, config.perturbation, config.seed, k)
                };
                run_from(config, init).map(|o| o.summary)
            })
            .collect()
    })
}

/// Sticky-blocks run from the configured data with `n_particles` clusters.
pub fn oracle_blocks(initial: &State<f64>, n_particles: usize, t_end: f64) -> Result<BlockSystem<f64>> {
    let mut blocks = discretize(&initial.rho, &initial.u, n_particles)?;
    blocks.evolve(t_end)?;
    Ok(blocks)
}

/// Snapshots at `count` evenly spaced times in `[0, t_end]`.
pub fn oracle_series(initial: &State<f64>, n_particles: usize, t_end: f64, count: usize) -> Result<Vec<BlockSnapshot>> {
    let mut blocks = discretize(&initial.rho, &initial.u, n_particles)?;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let t = if i + 1 == count {
            t_end
        } else {
            t_end * i as f64 / (count - 1) as f64
        };
        blocks.evolve(t)?;
        out.push(blocks.snapshot());
    }
    Ok(out)
}

/// L¹ distance between the cumulative masses of a state and a block system.
pub fn compare_to_oracle(state: &State<f64>, blocks: &BlockSystem<f64>) -> Result<f64> {
    let grid = state.grid();
    cdf_distance(&state_cdf(state), &block_cdf(blocks, grid)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub max_rho: f64,
    pub ceiling_gap: f64,
    pub terminal_ceiling_gap: f64,
    pub oleinik_excess_max: f64,
    pub pi_h1_sup: f64,
    pub visc_flux_l1_sup: f64,
    pub energy_drift: f64,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub min_rho: f64,
    pub oracle_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub ceiling_slope: f64,
    pub ceiling_r2: f64,
    pub pi_h1_slope: f64,
    pub pi_h1_r2: f64,
    pub visc_flux_slope: f64,
    pub visc_flux_r2: f64,
}

fn fit(rows: &[SweepRow], f: impl Fn(&SweepRow) -> f64) -> Result<PowerLawFit> {
    powerlaw_fit(&rows.iter().map(|r| (r.epsilon, f(r))).collect::<Vec<_>>())
}

/// Runs every ε of `epsilons` from the data of `base` and fits the scaling laws.
///
/// Members run concurrently; rows come back sorted by ε descending, so the
/// report does not depend on completion order.
pub fn sweep(base: &RunConfig, epsilons: &[f64], with_oracle: bool, n_particles: usize) -> Result<(SweepReport, Vec<RunOutcome>)> {
    let mut eps = epsilons.to_vec();
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Config {
            key: Some("epsilons".into()),
            message: "every epsilon must be positive".into(),
        });
    }
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    if eps.len() < 3 {
        return Err(Error::Fit(format!("a sweep needs at least 3 distinct values of epsilon, got {}", eps.len())));
    }
    let configs = eps.iter().map(|&e| base.with_epsilon(e)).collect::<Result<Vec<_>>>()?;

    let oracle = if with_oracle {
        // the sampled data is ε-independent; the margin is checked per member
        let grid = grid_of(base)?;
        let (rho, u) = base.initial.sample(&grid);
        Some(oracle_blocks(&State { rho, u, time: 0.0 }, n_particles, base.t_end)?)
    } else {
        None
    };

    let outcomes: Vec<RunOutcome> = pool(base.workers)?.install(|| {
        configs
            .par_iter()
            .map(|c| {
                run_config(c).map_err(|e| Error::SweepMember {
                    epsilon: c.params.epsilon,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let rows = outcomes
        .iter()
        .map(|o| {
            let s = &o.summary;
            let oracle_distance = match &oracle {
                Some(b) => Some(compare_to_oracle(&o.trajectory.terminal, b)?),
                None => None,
            };
            Ok(SweepRow {
                epsilon: s.epsilon,
                max_rho: s.max_rho,
                ceiling_gap: s.ceiling_gap,
                terminal_ceiling_gap: s.terminal_ceiling_gap,
                oleinik_excess_max: s.oleinik_excess_max,
                pi_h1_sup: s.pi_h1_sup,
                visc_flux_l1_sup: s.visc_flux_l1_sup,
                energy_drift: s.energy_drift,
                mass_drift: s.mass_drift,
                momentum_drift: s.momentum_drift,
                min_rho: s.min_rho,
                oracle_distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ceiling = fit(&rows, |r| r.ceiling_gap)?;
    let pi = fit(&rows, |r| r.pi_h1_sup)?;
    let visc = fit(&rows, |r| r.visc_flux_l1_sup)?;
    let report = SweepReport {
        rows,
        ceiling_slope: ceiling.slope,
        ceiling_r2: ceiling.r_squared,
        pi_h1_slope: pi.slope,
        pi_h1_r2: pi.r_squared,
        visc_flux_slope: visc.slope,
        visc_flux_r2: visc.r_squared,
    };
    Ok((report, outcomes))
}
