//! File outputs. Every CSV starts with a `#` comment carrying its format version.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, State};
use crate::harness::sweep::SweepReport;
use crate::sticky::BlockSnapshot;

pub const STATE_CSV_VERSION: &str = "awcongest-state v1";
pub const SWEEP_CSV_VERSION: &str = "awcongest-sweep v1";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io(format!("{}: {e}", path.display()))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w).map_err(io(path))?;
    w.flush().map_err(io(path))
}

pub fn write_diagnostics(path: &Path, record: &DiagnosticsRecord<f64>) -> Result<()> {
    let mut w = create(path)?;
    record.write_csv(&mut w)?;
    w.flush().map_err(io(path))
}

pub fn write_state(path: &Path, state: &State<f64>) -> Result<()> {
    let mut w = create(path)?;
    let g = state.grid();
    writeln!(w, "# {STATE_CSV_VERSION} length={:e} time={:e}", g.length(), state.time).map_err(io(path))?;
    writeln!(w, "x,rho,u").map_err(io(path))?;
    for (j, x) in g.centers().enumerate() {
        writeln!(w, "{:e},{:e},{:e}", x, state.rho.get(j), state.u.get(j)).map_err(io(path))?;
    }
    w.flush().map_err(io(path))
}

/// Reads a state written by [`write_state`].
pub fn read_state(path: &Path) -> Result<State<f64>> {
    let file = File::open(path).map_err(io(path))?;
    let bad = |msg: String| Error::Io(format!("{}: {msg}", path.display()));
    let mut lines = BufReader::new(file).lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(io(path))?;
    let field = |name: &str| -> Result<f64> {
        header
            .split_whitespace()
            .find_map(|tok| tok.strip_prefix(name).and_then(|v| v.strip_prefix('=')))
            .ok_or_else(|| bad(format!("header lacks {name}")))?
            .parse()
            .map_err(|_| bad(format!("bad {name} in header")))
    };
    if !header.contains(STATE_CSV_VERSION) {
        return Err(bad(format!("expected a `{STATE_CSV_VERSION}` header")));
    }
    let (length, time) = (field("length")?, field("time")?);
    let mut rho = Vec::new();
    let mut u = Vec::new();
    for (i, line) in lines.enumerate().skip(1) {
        let line = line.map_err(io(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |k: usize| -> Result<f64> {
            cols.get(k)
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| bad(format!("line {}: malformed row", i + 2)))
        };
        rho.push(parse(1)?);
        u.push(parse(2)?);
    }
    let grid = Grid::new(rho.len(), length)?;
    State::new(Field::from_values(&grid, rho)?, Field::from_values(&grid, u)?, time)
}

#[derive(Serialize)]
struct Series<'a> {
    snapshots: &'a [BlockSnapshot],
}

pub fn write_blocks(path: &Path, snapshots: &[BlockSnapshot]) -> Result<()> {
    write_json(path, &Series { snapshots })
}

/// Reads a series written by [`write_blocks`] (or a single snapshot).
pub fn read_blocks(path: &Path) -> Result<Vec<BlockSnapshot>> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Either {
        Series { snapshots: Vec<BlockSnapshot> },
        One(BlockSnapshot),
    }
    let text = fs::read_to_string(path).map_err(io(path))?;
    match serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))? {
        Either::Series { snapshots } => Ok(snapshots),
        Either::One(s) => Ok(vec![s]),
    }
}

pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# {SWEEP_CSV_VERSION}").map_err(io(path))?;
    writeln!(
        w,
        "epsilon,max_rho,ceiling_gap,terminal_ceiling_gap,oleinik_excess_max,pi_h1_sup,visc_flux_l1_sup,energy_drift,oracle_distance"
    )
    .map_err(io(path))?;
    for r in &report.rows {
        let oracle = r.oracle_distance.map_or(String::new(), |d| format!("{d:e}"));
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            r.epsilon,
            r.max_rho,
            r.ceiling_gap,
            r.terminal_ceiling_gap,
            r.oleinik_excess_max,
            r.pi_h1_sup,
            r.visc_flux_l1_sup,
            r.energy_drift,
            oracle
        )
        .map_err(io(path))?;
    }
    w.flush().map_err(io(path))
}

/// Gnuplot script drawing `ceiling_gap` against ε on log-log axes from `csv_name`.
pub fn plot_script(csv_name: &str, report: &SweepReport) -> String {
    format!(
        "# ceiling gap vs epsilon; run with: gnuplot -p ceiling_gap.gp\n\
         set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'epsilon'\n\
         set ylabel '1 - max rho'\n\
         set key top left\n\
         set title 'fitted slope {:.3} (r^2 = {:.3})'\n\
         plot '{csv_name}' using 1:3 skip 2 with linespoints title 'ceiling gap', \\\n     \
         '{csv_name}' using 1:4 skip 2 with linespoints title 'terminal gap'\n",
        report.ceiling_slope, report.ceiling_r2
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(io(path))?;
    w.flush().map_err(io(path))
}

/// File-name-safe rendering of ε, e.g. `3e-4`.
pub fn epsilon_tag(eps: f64) -> String {
    format!("{eps:e}").replace('.', "p")
}
