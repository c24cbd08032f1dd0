//! Phase-space grids and reconstruction of operators from characteristic
//! functions.
//!
//! The inversion formula `rho = (2 pi)^{-1} integral phi(z) W(-z) d^2 z` is
//! discretized on a centered square grid. Accuracy then rests on two
//! conditions: the grid must reach far enough out that `phi` has decayed at
//! the boundary, and the step must resolve the fastest oscillation the
//! truncated space can represent. Both are enforced as hard guards rather
//! than left to the caller's judgment, since a reconstruction from an
//! inadequate grid looks plausible while being quietly wrong.

use nalgebra::{Complex, DMatrix};

use super::displacement::DisplacementTable;
use super::FockOperator;
use crate::error::{Error, Result};

const MIN_EXTENT: f64 = 6.0;
const MAX_STEP: f64 = 0.1;
/// Largest admissible `|phi|` on the boundary ring of the grid.
const BOUNDARY_DECAY_LIMIT: f64 = 0.5;
const MAX_POINTS_PER_AXIS: usize = 2001;

/// Quadrature parameters for the Fock-space checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockConfig {
    pub n_max: usize,
    pub extent: f64,
    pub step: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            n_max: 60,
            extent: 6.0,
            step: 0.05,
        }
    }
}

/// Characteristic-function samples on the centered square grid
/// `{-h s, ..., h s}^2` with spacing `s` and `h` steps per half-axis.
pub struct CharFnGrid {
    extent: f64,
    step: f64,
    half: usize,
    values: Vec<Complex<f64>>,
}

impl CharFnGrid {
    /// Samples `f(x, y)` over the grid. The linear index runs row-major in
    /// `(ix, iy)`, which makes the point at `len() - 1 - m` the reflection
    /// `-z` of the point at `m`.
    pub fn sample(
        extent: f64,
        step: f64,
        mut f: impl FnMut(f64, f64) -> Complex<f64>,
    ) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) || !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid extent and step must be positive and finite".into(),
            ));
        }
        let half = (extent / step).round() as usize;
        if half == 0 {
            return Err(Error::InvalidParameter(
                "grid extent must cover at least one step".into(),
            ));
        }
        let n = 2 * half + 1;
        if n > MAX_POINTS_PER_AXIS {
            return Err(Error::GridGuard(format!(
                "{n} points per axis exceeds the limit {MAX_POINTS_PER_AXIS}; \
                 coarsen the step or shrink the extent"
            )));
        }
        let mut values = Vec::with_capacity(n * n);
        for ix in 0..n {
            let x = (ix as f64 - half as f64) * step;
            for iy in 0..n {
                let y = (iy as f64 - half as f64) * step;
                values.push(f(x, y));
            }
        }
        Ok(Self {
            extent: half as f64 * step,
            step,
            half,
            values,
        })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Points per axis.
    pub fn axis_len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, index: usize) -> Complex<f64> {
        self.values[index]
    }

    /// Coordinates of the point at a linear index.
    pub fn point(&self, index: usize) -> [f64; 2] {
        let n = self.axis_len();
        let ix = index / n;
        let iy = index % n;
        [
            (ix as f64 - self.half as f64) * self.step,
            (iy as f64 - self.half as f64) * self.step,
        ]
    }

    /// Largest `|phi|` over the outermost ring.
    pub fn boundary_max(&self) -> f64 {
        let n = self.axis_len();
        let mut max = 0.0f64;
        for ix in 0..n {
            for iy in 0..n {
                if ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1 {
                    max = max.max(self.values[ix * n + iy].norm());
                }
            }
        }
        max
    }
}

/// Reconstructs the operator `(2 pi)^{-1} sum phi(z) W(-z) step^2` from
/// sampled characteristic-function values.
pub fn inverse_fourier(grid: &CharFnGrid, n_max: usize) -> Result<FockOperator> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if grid.extent() + 1e-12 < MIN_EXTENT {
        return Err(Error::GridGuard(format!(
            "extent {:.3} is below the minimum {MIN_EXTENT}; the quadrature \
             cannot be trusted on a shorter grid",
            grid.extent()
        )));
    }
    if grid.step() > MAX_STEP + 1e-12 {
        return Err(Error::GridGuard(format!(
            "step {:.3} exceeds the maximum {MAX_STEP}; oscillations of the \
             integrand would alias",
            grid.step()
        )));
    }
    let boundary = grid.boundary_max();
    if boundary > BOUNDARY_DECAY_LIMIT {
        return Err(Error::GridGuard(format!(
            "|phi| reaches {boundary:.3} on the grid boundary (limit \
             {BOUNDARY_DECAY_LIMIT}); the function has not decayed within \
             the extent"
        )));
    }

    let mut table = DisplacementTable::new(n_max);
    let dim = n_max + 1;
    let mut acc = DMatrix::zeros(dim, dim);
    let weight = grid.step() * grid.step() / (2.0 * std::f64::consts::PI);
    let total = grid.len();
    let center = (total - 1) / 2;
    for m in 0..center {
        let z = grid.point(m);
        let phi_plus = grid.value(m);
        let phi_minus = grid.value(total - 1 - m);
        // The summand pairs as phi(z) W(-z) + phi(-z) W(z).
        table.accumulate_pair(z, phi_minus * weight, phi_plus * weight, &mut acc)?;
    }
    let phi0 = grid.value(center) * weight;
    for n in 0..dim {
        acc[(n, n)] += phi0;
    }
    FockOperator::from_matrix(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_index_reflection_negates_the_point() {
        let grid = CharFnGrid::sample(2.0, 0.5, |_, _| Complex::new(1.0, 0.0)).unwrap();
        assert_eq!(grid.axis_len(), 9);
        for m in 0..grid.len() {
            let a = grid.point(m);
            let b = grid.point(grid.len() - 1 - m);
            assert!((a[0] + b[0]).abs() < 1e-15);
            assert!((a[1] + b[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn extent_snaps_to_a_whole_number_of_steps() {
        let grid = CharFnGrid::sample(6.0, 0.05, |_, _| Complex::new(0.0, 0.0)).unwrap();
        assert_eq!(grid.axis_len(), 241);
        assert!((grid.extent() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn short_grids_coarse_grids_and_flat_integrands_are_rejected() {
        let short = CharFnGrid::sample(4.0, 0.05, |x, y| {
            Complex::new((-0.25 * (x * x + y * y)).exp(), 0.0)
        })
        .unwrap();
        assert!(matches!(
            inverse_fourier(&short, 10),
            Err(Error::GridGuard(_))
        ));

        let coarse = CharFnGrid::sample(6.0, 0.2, |x, y| {
            Complex::new((-0.25 * (x * x + y * y)).exp(), 0.0)
        })
        .unwrap();
        assert!(matches!(
            inverse_fourier(&coarse, 10),
            Err(Error::GridGuard(_))
        ));

        let flat = CharFnGrid::sample(6.0, 0.1, |_, _| Complex::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            inverse_fourier(&flat, 10),
            Err(Error::GridGuard(_))
        ));
    }

    #[test]
    fn oversized_grids_are_rejected_up_front() {
        assert!(matches!(
            CharFnGrid::sample(200.0, 0.05, |_, _| Complex::new(0.0, 0.0)),
            Err(Error::GridGuard(_))
        ));
    }

    #[test]
    fn vacuum_round_trip_reconstructs_the_projector() {
        let grid = CharFnGrid::sample(6.0, 0.1, |x, y| {
            Complex::new((-0.25 * (x * x + y * y)).exp(), 0.0)
        })
        .unwrap();
        let rho = inverse_fourier(&grid, 20).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let expected = if r == 0 && c == 0 { 1.0 } else { 0.0 };
                let dev = (rho.matrix[(r, c)] - Complex::new(expected, 0.0)).norm();
                assert!(dev < 1e-3, "entry ({r}, {c}): dev {dev:.3e}");
            }
        }
    }

    #[test]
    fn default_config_matches_the_documented_grid() {
        let cfg = FockConfig::default();
        assert_eq!(cfg.n_max, 60);
        assert!((cfg.extent - 6.0).abs() < 1e-15);
        assert!((cfg.step - 0.05).abs() < 1e-15);
    }
}
