use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use awcongest::harness::output::{
    epsilon_tag, plot_script, read_blocks, read_state, write_blocks, write_diagnostics, write_json, write_state,
    write_sweep_csv, write_text,
};
use awcongest::harness::sweep::{initial_state, oracle_series};
use awcongest::harness::{compare_to_oracle, ensemble, run_config, sweep, RunConfig};
use awcongest::{BlockSystem, Error};
use clap::{Parser, Subcommand};
use serde_json::json;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  usage error (unknown flag, missing argument)
  3  configuration error (missing, unknown or malformed key)
  4  validation error (initial data violates hyp:rho or hyp:mass, bad grid or parameters,
     state and blocks on different lengths)
  5  solver or oracle failure (positivity failure, singular system, fit failure)
  6  i/o error

On failure a JSON object {\"error\", \"key\", \"message\"} is printed to stderr.";

#[derive(Parser)]
#[command(name = "awcongest", version, about = "Singular Aw-Rascle simulator and hard-congestion harness", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One simulation: diagnostics CSV, terminal-state CSV and summary JSON.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// ε-sweep: report JSON, per-ε CSVs and a gnuplot script.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Sticky-blocks oracle alone: cluster JSON time series.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `n_particles` from the config.
        #[arg(long)]
        n_particles: Option<usize>,
    },
    /// CDF distance between a terminal state (from `run`) and the last oracle snapshot.
    Compare {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        blocks: PathBuf,
        /// Also write the result to this JSON file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load(config: &Path, output_dir: Option<PathBuf>) -> Result<RunConfig, Error> {
    let mut c = RunConfig::from_file(config)?;
    if let Some(d) = output_dir {
        c.output_dir = d;
    }
    Ok(c)
}

fn execute(cmd: Command) -> Result<serde_json::Value, Error> {
    match cmd {
        Command::Run { config, output_dir } => {
            let c = load(&config, output_dir)?;
            let out = c.output_dir.clone();
            let o = run_config(&c)?;
            write_diagnostics(&out.join("diagnostics.csv"), &o.record)?;
            write_state(&out.join("terminal_state.csv"), &o.trajectory.terminal)?;
            write_json(&out.join("summary.json"), &json!({ "config": c, "summary": o.summary }))?;
            let mut written = vec!["diagnostics.csv", "terminal_state.csv", "summary.json"];
            if c.ensemble_size > 1 {
                write_json(&out.join("ensemble.json"), &ensemble(&c)?)?;
                written.push("ensemble.json");
            }
            Ok(json!({ "output_dir": out, "written": written, "summary": o.summary }))
        }
        Command::Sweep { config, output_dir } => {
            let c = load(&config, output_dir)?;
            let out = c.output_dir.clone();
            let (report, outcomes) = sweep(&c, &c.sweep.epsilons, c.sweep.with_oracle, c.sweep.n_particles)?;
            write_json(&out.join("sweep_report.json"), &report)?;
            write_sweep_csv(&out.join("sweep.csv"), &report)?;
            write_text(&out.join("ceiling_gap.gp"), &plot_script("sweep.csv", &report))?;
            for o in &outcomes {
                let tag = epsilon_tag(o.summary.epsilon);
                write_diagnostics(&out.join(format!("diagnostics_eps_{tag}.csv")), &o.record)?;
            }
            Ok(json!({
                "output_dir": out,
                "ceiling_slope": report.ceiling_slope,
                "pi_h1_slope": report.pi_h1_slope,
                "visc_flux_slope": report.visc_flux_slope,
            }))
        }
        Command::Oracle {
            config,
            output_dir,
            n_particles,
        } => {
            let c = load(&config, output_dir)?;
            let n = n_particles.unwrap_or(c.sweep.n_particles);
            let series = oracle_series(&initial_state(&c)?, n, c.t_end, c.oracle_snapshots)?;
            write_blocks(&c.output_dir.join("blocks.json"), &series)?;
            let last = series.last().map_or(0, |s| s.clusters.len());
            Ok(json!({ "output_dir": c.output_dir, "snapshots": series.len(), "final_clusters": last }))
        }
        Command::Compare { state, blocks, output } => {
            let s = read_state(&state)?;
            let series = read_blocks(&blocks)?;
            let last = series
                .last()
                .ok_or_else(|| Error::Io(format!("{}: no snapshots", blocks.display())))?;
            let b = BlockSystem::from_snapshot(last)?;
            let d = compare_to_oracle(&s, &b)?;
            let result = json!({
                "cdf_distance": d,
                "state_time": s.time,
                "oracle_time": last.time,
            });
            if let Some(p) = output {
                write_json(&p, &result)?;
            }
            Ok(result)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(v) => {
            // a closed pipe (e.g. `| head`) is not a failure of the run
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let key = match &e {
                Error::Config { key, .. } => key.clone(),
                _ => None,
            };
            let body = json!({ "error": e.kind(), "key": key, "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
