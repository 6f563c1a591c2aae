//! Periodic uniform grid, cell-averaged fields and the discrete calculus used
//! by the monitors.

use crate::error::{Error, Result};
use crate::{as_f64, lit, Real};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

/// Uniform periodic grid on the torus `[0, length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    n_cells: usize,
    length: T,
    dx: T,
}

impl<T: Real> Grid<T> {
    pub fn new(n_cells: usize, length: T) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        let dx = length / lit::<T>(n_cells as f64);
        Ok(Self { n_cells, length, dx })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    /// Cell center `x_j = (j + 1/2) dx`.
    #[inline]
    pub fn center(&self, j: usize) -> T {
        (lit::<T>(j as f64) + lit(0.5)) * self.dx
    }

    pub fn centers(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_cells).map(move |j| self.center(j))
    }

    #[inline]
    pub fn next(&self, j: usize) -> usize {
        if j + 1 == self.n_cells {
            0
        } else {
            j + 1
        }
    }

    #[inline]
    pub fn prev(&self, j: usize) -> usize {
        if j == 0 {
            self.n_cells - 1
        } else {
            j - 1
        }
    }

    /// Samples `f` at the cell centers.
    pub fn sample(&self, f: impl Fn(T) -> T) -> Field<T> {
        Field {
            values: self.centers().map(f).collect(),
            grid: *self,
        }
    }

    pub fn constant(&self, c: T) -> Field<T> {
        Field {
            values: vec![c; self.n_cells],
            grid: *self,
        }
    }
}

/// Cell values of a scalar on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    values: Vec<T>,
    grid: Grid<T>,
}

impl<T: Real> Field<T> {
    pub fn from_values(grid: &Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::FieldLength {
                expected: grid.n_cells(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Field::from_values"));
        }
        Ok(Self {
            values,
            grid: *grid,
        })
    }

    /// Builds a field without the finiteness scan; used on hot paths whose
    /// inputs are already checked.
    pub(crate) fn from_vec_unchecked(grid: &Grid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        Self {
            values,
            grid: *grid,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, j: usize) -> T {
        self.values[j]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Field<T> {
        Field::from_vec_unchecked(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn try_map(&self, f: impl Fn(T) -> Result<T>) -> Result<Field<T>> {
        let values = self.values.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(Field::from_vec_unchecked(&self.grid, values))
    }

    pub fn zip_map(&self, other: &Field<T>, f: impl Fn(T, T) -> T) -> Result<Field<T>> {
        self.check_same_grid(other)?;
        Ok(Field::from_vec_unchecked(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, c: T) -> Field<T> {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Field<T>) -> Result<Field<T>> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Index of the first maximal entry.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = j;
            }
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn check_same_grid(&self, other: &Field<T>) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

/// Density and velocity at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub rho: Field<T>,
    pub u: Field<T>,
    pub time: T,
}

impl<T: Real> State<T> {
    pub fn new(rho: Field<T>, u: Field<T>, time: T) -> Result<Self> {
        rho.check_same_grid(&u)?;
        Ok(Self { rho, u, time })
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        self.rho.grid()
    }

    /// Checks `0 < ρ < 1` cellwise and `0 < ∫ρ < |T|`.
    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() || !self.u.is_finite() {
            return Err(Error::NonFinite("State::validate"));
        }
        for (j, &r) in self.rho.values().iter().enumerate() {
            if !(r > T::zero() && r < T::one()) {
                return Err(Error::Validation {
                    hypothesis: "0 < rho < 1",
                    detail: format!("rho = {} at cell {j}", as_f64(r)),
                });
            }
        }
        let mass = integrate(&self.rho);
        if !(mass > T::zero() && mass < self.grid().length()) {
            return Err(Error::Validation {
                hypothesis: "hyp:mass",
                detail: format!(
                    "total mass {} not in (0, {})",
                    as_f64(mass),
                    as_f64(self.grid().length())
                ),
            });
        }
        Ok(())
    }

    pub fn mass(&self) -> T {
        integrate(&self.rho)
    }

    pub fn momentum(&self) -> T {
        let m = self.rho.values().iter().zip(self.u.values()).map(|(&r, &u)| r * u).sum::<T>();
        m * self.grid().dx()
    }
}

/// Centered periodic difference `(f_{j+1} − f_{j−1}) / 2dx`.
///
/// Input is assumed periodic; a non-periodic profile (e.g. `f = x`) shows a
/// large spike at the seam.
pub fn deriv_x<T: Real>(f: &Field<T>) -> Field<T> {
    let g = f.grid();
    let inv = T::one() / (lit::<T>(2.0) * g.dx());
    let v = f.values();
    let out = (0..g.n_cells())
        .map(|j| (v[g.next(j)] - v[g.prev(j)]) * inv)
        .collect();
    Field::from_vec_unchecked(g, out)
}

/// Periodic second difference `(f_{j+1} − 2f_j + f_{j−1}) / dx²`.
pub fn second_diff<T: Real>(f: &Field<T>) -> Field<T> {
    let g = f.grid();
    let inv = T::one() / (g.dx() * g.dx());
    let v = f.values();
    let two = lit::<T>(2.0);
    let out = (0..g.n_cells())
        .map(|j| (v[g.next(j)] - two * v[j] + v[g.prev(j)]) * inv)
        .collect();
    Field::from_vec_unchecked(g, out)
}

/// Midpoint rule `dx Σ f_j`.
pub fn integrate<T: Real>(f: &Field<T>) -> T {
    f.values().iter().copied().sum::<T>() * f.grid().dx()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

pub fn lp_norm<T: Real>(f: &Field<T>, p: Norm) -> T {
    let v = f.values();
    match p {
        Norm::L1 => v.iter().map(|x| x.abs()).sum::<T>() * f.grid().dx(),
        Norm::L2 => (v.iter().map(|&x| x * x).sum::<T>() * f.grid().dx()).sqrt(),
        Norm::Inf => v.iter().fold(T::zero(), |m, x| m.max(x.abs())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn grid_examples() {
        let g = Grid::new(8, 1.0).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.center(0), 0.0625);
        assert_eq!(Grid::new(100, 1.0).unwrap().dx(), 0.01);
        assert_eq!(Grid::new(512, 2.0).unwrap().dx(), 0.00390625);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -1.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn index_wraps() {
        let g = Grid::new(8, 1.0).unwrap();
        assert_eq!(g.next(7), 0);
        assert_eq!(g.prev(0), 7);
    }

    #[test]
    fn deriv_of_constant_is_zero() {
        let g = Grid::new(32, 1.0).unwrap();
        let d = deriv_x(&g.constant(3.7));
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deriv_of_sine() {
        let g = Grid::new(256, 1.0).unwrap();
        let f = g.sample(|x| (2.0 * PI * x).sin());
        let d = deriv_x(&f);
        for (j, x) in g.centers().enumerate() {
            assert!((d.get(j) - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-3);
        }
    }

    #[test]
    fn deriv_is_second_order() {
        let err = |n: usize| {
            let g = Grid::new(n, 1.0).unwrap();
            let d = deriv_x(&g.sample(|x| (2.0 * PI * x).sin()));
            g.centers()
                .enumerate()
                .map(|(j, x)| (d.get(j) - 2.0 * PI * (2.0 * PI * x).cos()).abs())
                .fold(0.0, f64::max)
        };
        for n in [32, 64, 128] {
            let ratio = err(n) / err(2 * n);
            assert!((ratio - 4.0).abs() < 0.05, "n = {n}: ratio {ratio}");
        }
    }

    #[test]
    fn deriv_of_nonperiodic_data_spikes_at_seam() {
        let g = Grid::new(64, 1.0).unwrap();
        let d = deriv_x(&g.sample(|x| x));
        assert!(d.get(0) < -10.0);
        assert_relative_eq!(d.get(10), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::new(256, 1.0).unwrap();
        assert_eq!(integrate(&g.constant(1.0)), 1.0);
        assert_eq!(integrate(&g.constant(0.0)), 0.0);
        let s2 = g.sample(|x| (2.0 * PI * x).sin().powi(2));
        assert!((integrate(&s2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn norm_examples() {
        let g = Grid::new(256, 1.0).unwrap();
        assert_relative_eq!(lp_norm(&g.constant(2.0), Norm::L2), 2.0, epsilon = 1e-14);
        assert_eq!(lp_norm(&g.constant(-3.0), Norm::Inf), 3.0);
        let s = g.sample(|x| (2.0 * PI * x).sin());
        assert!((lp_norm(&s, Norm::L2) - 0.5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn field_rejects_wrong_length_and_nan() {
        let g = Grid::new(8, 1.0).unwrap();
        assert!(matches!(
            Field::from_values(&g, vec![0.0; 7]),
            Err(Error::FieldLength { expected: 8, got: 7 })
        ));
        assert!(Field::from_values(&g, vec![f64::NAN; 8]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::new(64, 1.0).unwrap();
        let f = g.sample(|x| (2.0 * std::f32::consts::PI * x).sin());
        assert!(integrate(&deriv_x(&f)).abs() < 1e-5);
        assert!((lp_norm(&f, Norm::L2) - 0.5f32.sqrt()).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn discrete_divergence_theorem(vals in prop::collection::vec(-10.0f64..10.0, 8..64)) {
                let g = Grid::new(vals.len(), 1.0).unwrap();
                let f = Field::from_values(&g, vals.clone()).unwrap();
                let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
                prop_assert!(integrate(&deriv_x(&f)).abs() <= 1e-12 * scale * vals.len() as f64);
            }

            #[test]
            fn norms_are_absolutely_homogeneous(
                vals in prop::collection::vec(-10.0f64..10.0, 8..64),
                c in -5.0f64..5.0,
            ) {
                let g = Grid::new(vals.len(), 1.0).unwrap();
                let f = Field::from_values(&g, vals).unwrap();
                for p in [Norm::L1, Norm::L2, Norm::Inf] {
                    let lhs = lp_norm(&f.scale(c), p);
                    let rhs = c.abs() * lp_norm(&f, p);
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
                }
            }
        }
    }
}
