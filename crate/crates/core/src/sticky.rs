//! Event-driven sticky blocks on the torus.
//!
//! Every cluster is an interval of unit density (width = mass) moving at
//! constant velocity. When two neighbours touch while approaching, they merge
//! into one cluster conserving mass, momentum and center of mass. This is the
//! reference dynamics for the free/congested limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, Field, Grid, State};
use crate::{as_f64, lit, Real};

/// Contact tolerance relative to the torus length.
const CONTACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster<T> {
    pub mass: T,
    /// Center in lifted coordinates; consecutive clusters have increasing centers.
    pub center: T,
    pub velocity: T,
}

impl<T: Real> Cluster<T> {
    fn left(&self) -> T {
        self.center - lit::<T>(0.5) * self.mass
    }
    fn right(&self) -> T {
        self.center + lit::<T>(0.5) * self.mass
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeEvent<T> {
    pub time: T,
    pub kinetic_before: T,
    pub kinetic_after: T,
    pub clusters_after: usize,
}

/// Cyclically ordered unit-density clusters on a torus of given length.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem<T> {
    clusters: Vec<Cluster<T>>,
    length: T,
    time: T,
    initial_count: usize,
}

/// JSON view: centers reduced to `[0, length)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSnapshot {
    pub time: f64,
    pub length: f64,
    pub clusters: Vec<Cluster<f64>>,
}

impl<T: Real> BlockSystem<T> {
    /// Builds a system from clusters given in cyclic order.
    pub fn new(clusters: Vec<Cluster<T>>, length: T, time: T) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::Oracle("no clusters".into()));
        }
        if clusters.iter().any(|c| !(c.mass > T::zero()) || !c.center.is_finite() || !c.velocity.is_finite()) {
            return Err(Error::Oracle("clusters need positive mass and finite state".into()));
        }
        let s = Self {
            initial_count: clusters.len(),
            clusters,
            length,
            time,
        };
        s.check_invariants()?;
        Ok(s)
    }

    pub fn clusters(&self) -> &[Cluster<T>] {
        &self.clusters
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn total_mass(&self) -> T {
        self.clusters.iter().map(|c| c.mass).sum()
    }

    pub fn total_momentum(&self) -> T {
        self.clusters.iter().map(|c| c.mass * c.velocity).sum()
    }

    pub fn kinetic_energy(&self) -> T {
        self.clusters
            .iter()
            .map(|c| lit::<T>(0.5) * c.mass * c.velocity * c.velocity)
            .sum()
    }

    /// Gap between cluster `i` and its cyclic successor.
    fn gap(&self, i: usize) -> T {
        let n = self.clusters.len();
        if n == 1 {
            return self.length - self.clusters[0].mass;
        }
        if i + 1 < n {
            self.clusters[i + 1].left() - self.clusters[i].right()
        } else {
            self.clusters[0].left() + self.length - self.clusters[n - 1].right()
        }
    }

    fn closing_speed(&self, i: usize) -> T {
        let n = self.clusters.len();
        self.clusters[i].velocity - self.clusters[(i + 1) % n].velocity
    }

    pub fn check_invariants(&self) -> Result<()> {
        let mass = self.total_mass();
        if !(mass < self.length) {
            return Err(Error::Oracle(format!(
                "total mass {} not below torus length {}",
                as_f64(mass),
                as_f64(self.length)
            )));
        }
        let tol = lit::<T>(CONTACT_TOL) * self.length;
        for i in 0..self.clusters.len() {
            let g = self.gap(i);
            if g < -tol {
                return Err(Error::Oracle(format!(
                    "clusters {i} and its successor overlap by {}",
                    as_f64(-g)
                )));
            }
        }
        Ok(())
    }

    fn advance(&mut self, dt: T) {
        for c in &mut self.clusters {
            c.center = c.center + c.velocity * dt;
        }
        self.time = self.time + dt;
    }

    /// Merges cluster `i` with its cyclic successor.
    fn merge(&mut self, i: usize) {
        let n = self.clusters.len();
        let j = (i + 1) % n;
        let a = self.clusters[i];
        let mut b = self.clusters[j];
        if j == 0 {
            b.center = b.center + self.length;
        }
        let mass = a.mass + b.mass;
        let merged = Cluster {
            mass,
            center: (a.mass * a.center + b.mass * b.center) / mass,
            velocity: (a.mass * a.velocity + b.mass * b.velocity) / mass,
        };
        self.clusters[i] = merged;
        self.clusters.remove(j);
    }

    fn next_contact(&self) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.clusters.len() {
            let s = self.closing_speed(i);
            if s > T::zero() {
                let t = self.gap(i).max(T::zero()) / s;
                if best.is_none_or(|(_, bt)| t < bt) {
                    best = Some((i, t));
                }
            }
        }
        best
    }

    /// Evolves to `t_end` and returns every merge in order.
    pub fn evolve_recorded(&mut self, t_end: T) -> Result<Vec<MergeEvent<T>>> {
        if t_end < self.time {
            return Err(Error::Oracle(format!(
                "t_end {} precedes current time {}",
                as_f64(t_end),
                as_f64(self.time)
            )));
        }
        let tol = lit::<T>(CONTACT_TOL) * self.length;
        let mut events = Vec::new();
        loop {
            let remaining = t_end - self.time;
            let contact = if self.clusters.len() > 1 { self.next_contact() } else { None };
            let (first, dt) = match contact {
                Some((i, dt)) if dt <= remaining => (i, dt),
                _ => {
                    self.advance(remaining);
                    self.time = t_end;
                    break;
                }
            };
            self.advance(dt);
            let kinetic_before = self.kinetic_energy();
            self.merge(first);
            // simultaneous contacts: repeated pairwise merges, lowest cyclic index first
            while self.clusters.len() > 1 {
                let touching =
                    (0..self.clusters.len()).find(|&i| self.gap(i) <= tol && self.closing_speed(i) > T::zero());
                match touching {
                    Some(i) => self.merge(i),
                    None => break,
                }
            }
            if self.initial_count - self.clusters.len() > self.initial_count.saturating_sub(1) {
                return Err(Error::Oracle("merge count exceeded the cluster bound".into()));
            }
            events.push(MergeEvent {
                time: self.time,
                kinetic_before,
                kinetic_after: self.kinetic_energy(),
                clusters_after: self.clusters.len(),
            });
            self.check_invariants()?;
        }
        self.check_invariants()?;
        Ok(events)
    }

    pub fn evolve(&mut self, t_end: T) -> Result<()> {
        self.evolve_recorded(t_end).map(|_| ())
    }

    pub fn snapshot(&self) -> BlockSnapshot {
        let length = as_f64(self.length);
        BlockSnapshot {
            time: as_f64(self.time),
            length,
            clusters: self
                .clusters
                .iter()
                .map(|c| Cluster {
                    mass: as_f64(c.mass),
                    center: as_f64(c.center).rem_euclid(length),
                    velocity: as_f64(c.velocity),
                })
                .collect(),
        }
    }
}

impl BlockSystem<f64> {
    pub fn from_snapshot(s: &BlockSnapshot) -> Result<Self> {
        let mut clusters = s.clusters.clone();
        // restore lifted, increasing centers
        for i in 1..clusters.len() {
            while clusters[i].center < clusters[i - 1].center {
                clusters[i].center += s.length;
            }
        }
        BlockSystem::new(clusters, s.length, s.time)
    }
}

fn wrap<T: Real>(x: T, len: T) -> T {
    let r = x - (x / len).floor() * len;
    if r >= len { r - len } else { r }
}

/// Linear interpolation of a periodic cell-centered field at `x`.
fn interpolate<T: Real>(f: &Field<T>, x: T) -> T {
    let g = f.grid();
    let xr = wrap(x, g.length());
    let s = xr / g.dx() - lit(0.5);
    let base = s.floor();
    let n = g.n_cells() as i64;
    let frac = s - base;
    let j0 = (base.to_i64().unwrap_or(0)).rem_euclid(n) as usize;
    let j1 = (j0 + 1) % g.n_cells();
    f.get(j0) * (T::one() - frac) + f.get(j1) * frac
}

/// Equal-mass clusters placed at the inverse cumulative-mass points
/// `X((i − 1/2) m)` of the piecewise-constant density `rho0`, with
/// velocities interpolated from `u0`.
pub fn discretize<T: Real>(rho0: &Field<T>, u0: &Field<T>, n_particles: usize) -> Result<BlockSystem<T>> {
    rho0.check_same_grid(u0)?;
    if n_particles < 2 {
        return Err(Error::Oracle(format!("need at least 2 particles, got {n_particles}")));
    }
    let g = *rho0.grid();
    if rho0.values().iter().any(|&r| !(r > T::zero() && r < T::one())) {
        return Err(Error::Validation {
            hypothesis: "0 < rho < 1",
            detail: "initial density for the oracle".into(),
        });
    }
    let total = integrate(rho0);
    if !(total < g.length()) {
        return Err(Error::Validation {
            hypothesis: "hyp:mass",
            detail: format!("mass {} not below length", as_f64(total)),
        });
    }
    let m = total / lit(n_particles as f64);
    let mut clusters = Vec::with_capacity(n_particles);
    let mut cell = 0usize;
    let mut below = T::zero(); // mass strictly left of `cell`
    for i in 0..n_particles {
        let target = (lit::<T>(i as f64) + lit(0.5)) * m;
        while cell + 1 < g.n_cells() && below + rho0.get(cell) * g.dx() < target {
            below = below + rho0.get(cell) * g.dx();
            cell += 1;
        }
        let x = lit::<T>(cell as f64) * g.dx() + (target - below) / rho0.get(cell);
        clusters.push(Cluster {
            mass: m,
            center: x,
            velocity: interpolate(u0, x),
        });
    }
    BlockSystem::new(clusters, g.length(), T::zero()).map_err(|e| match e {
        Error::Oracle(msg) => Error::Oracle(format!("initial overlap ({msg}); use more particles")),
        other => other,
    })
}

/// Cumulative mass `∫₀^x ρ` of the block indicator at each cell center of `grid`.
pub fn block_cdf<T: Real>(blocks: &BlockSystem<T>, grid: &Grid<T>) -> Result<Field<T>> {
    if (blocks.length() - grid.length()).abs() > lit::<T>(1e-12) * grid.length() {
        return Err(Error::GridMismatch);
    }
    let len = grid.length();
    let values = grid
        .centers()
        .map(|x| {
            blocks
                .clusters()
                .iter()
                .map(|c| {
                    let a = wrap(c.left(), len);
                    let b = a + c.mass;
                    let main = (b.min(len).min(x) - a).max(T::zero());
                    let wrapped = if b > len { (b - len).min(x).max(T::zero()) } else { T::zero() };
                    main + wrapped
                })
                .sum()
        })
        .collect();
    Ok(Field::from_vec_unchecked(grid, values))
}

/// Cumulative mass of a cell-averaged density at each cell center.
pub fn state_cdf<T: Real>(state: &State<T>) -> Field<T> {
    let g = state.grid();
    let dx = g.dx();
    let half = lit::<T>(0.5);
    let mut acc = T::zero();
    let values = state
        .rho
        .values()
        .iter()
        .map(|&r| {
            let v = acc + half * r * dx;
            acc = acc + r * dx;
            v
        })
        .collect();
    Field::from_vec_unchecked(g, values)
}

/// Cumulative mass `M(x) = ∫₀^x ρ` sampled at the cell centers of a query grid.
pub trait DensityCdf<T> {
    fn density_cdf(&self, grid: &Grid<T>) -> Result<Field<T>>;
}

impl<T: Real> DensityCdf<T> for BlockSystem<T> {
    fn density_cdf(&self, grid: &Grid<T>) -> Result<Field<T>> {
        block_cdf(self, grid)
    }
}

impl<T: Real> DensityCdf<T> for State<T> {
    /// Exact for the piecewise-constant density; on the state's own grid this
    /// is [`state_cdf`].
    fn density_cdf(&self, grid: &Grid<T>) -> Result<Field<T>> {
        let own = self.grid();
        if (own.length() - grid.length()).abs() > lit::<T>(1e-12) * grid.length() {
            return Err(Error::GridMismatch);
        }
        if own == grid {
            return Ok(state_cdf(self));
        }
        let dx = own.dx();
        let rho = self.rho.values();
        let mut prefix = Vec::with_capacity(rho.len() + 1);
        prefix.push(T::zero());
        for &r in rho {
            let last = *prefix.last().expect("nonempty");
            prefix.push(last + r * dx);
        }
        let n = rho.len();
        let values = grid
            .centers()
            .map(|x| {
                let k = (x / dx).floor().to_usize().unwrap_or(0).min(n - 1);
                prefix[k] + rho[k] * (x - dx * lit::<T>(k as f64))
            })
            .collect();
        Ok(Field::from_vec_unchecked(grid, values))
    }
}

/// `∫ |a − b| dx`.
pub fn cdf_distance<T: Real>(a: &Field<T>, b: &Field<T>) -> Result<T> {
    let diff = a.sub(b)?;
    Ok(diff.values().iter().map(|v| v.abs()).sum::<T>() * a.grid().dx())
}
