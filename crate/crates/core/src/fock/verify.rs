//! Quadrature checks of the Gaussian formalism against truncated matrices.
//!
//! Each check here computes one quantity two ways: once through the Gaussian
//! closed forms and once through dense Fock-space quadrature that never
//! touches them. Agreement is reported as a max-norm deviation for the
//! caller to gate; disagreement is evidence against either the formulas or
//! the numerics, which is exactly what an oracle is for.

use nalgebra::{Complex, DMatrix, DVector};

use super::displacement::DisplacementTable;
use super::grid::{inverse_fourier, CharFnGrid, FockConfig};
use super::FockOperator;
use crate::channels::GaussianChannel;
use crate::error::{Error, Result};
use crate::states::GaussianState;

/// Side length of the matrix block on which reconstructions are compared.
/// Entries far above the occupied levels carry only quadrature noise, so
/// the comparison stays near the origin where the states actually live.
const COMPARISON_BLOCK: usize = 10;

/// Result of a duality quadrature check.
#[derive(Debug, Clone, Copy)]
pub struct DualityCheck {
    pub max_deviation: f64,
    /// `1 / |det K|`, the trace scale of the dual.
    pub scale: f64,
}

struct OneMode {
    k: [[f64; 2]; 2],
    l: [f64; 2],
    mu: [[f64; 2]; 2],
}

impl OneMode {
    fn of(channel: &GaussianChannel) -> Result<Self> {
        if channel.modes_in() != 1 || channel.modes_out() != 1 {
            return Err(Error::Dimension(format!(
                "Fock-space checks cover one-mode channels; got {} -> {} modes",
                channel.modes_in(),
                channel.modes_out()
            )));
        }
        Ok(Self {
            k: [
                [channel.k[(0, 0)], channel.k[(0, 1)]],
                [channel.k[(1, 0)], channel.k[(1, 1)]],
            ],
            l: [channel.l[0], channel.l[1]],
            mu: [
                [channel.mu[(0, 0)], channel.mu[(0, 1)]],
                [channel.mu[(1, 0)], channel.mu[(1, 1)]],
            ],
        })
    }

    fn map(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.k[0][0] * x + self.k[0][1] * y,
            self.k[1][0] * x + self.k[1][1] * y,
        ]
    }

    fn noise(&self, x: f64, y: f64) -> Complex<f64> {
        let quad = self.mu[0][0] * x * x + 2.0 * self.mu[0][1] * x * y + self.mu[1][1] * y * y;
        Complex::new(-0.5 * quad, self.l[0] * x + self.l[1] * y).exp()
    }
}

fn check_normalized(rho: &FockOperator) -> Result<()> {
    let defect = (rho.trace() - Complex::new(1.0, 0.0)).norm();
    if defect > super::NORMALIZATION_TOL {
        return Err(Error::NotNormalized { defect });
    }
    Ok(())
}

fn block_deviation(a: &DMatrix<Complex<f64>>, b: &DMatrix<Complex<f64>>, block: usize) -> f64 {
    let n = block.min(a.nrows()).min(b.nrows());
    let mut max = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            max = max.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    max
}

/// Samples the channel-output characteristic function
/// `phi_out(z) = Tr(rho_in W(Kz)) f(z)` on the configured grid.
fn sample_output(
    channel: &OneMode,
    input: &FockOperator,
    cfg: &FockConfig,
) -> Result<CharFnGrid> {
    let mut table = DisplacementTable::new(input.n_max());
    let diagonal = input.diagonal_part();
    CharFnGrid::sample(cfg.extent, cfg.step, |x, y| {
        let w = channel.map(x, y);
        let phi_in = match &diagonal {
            Some(p) => table
                .trace_against_diagonal(p, w)
                .expect("dimension fixed by the table"),
            None => table
                .trace_against(&input.matrix, w)
                .expect("dimension fixed by the table"),
        };
        phi_in * channel.noise(x, y)
    })
}

/// Pushes `input` through the channel in Fock space by quadrature and
/// compares against the Gaussian prediction, both reconstructed through the
/// same grid so discretization bias cancels. Returns the max deviation on
/// the leading block.
pub fn verify_apply(
    channel: &GaussianChannel,
    input: &FockOperator,
    predicted: &GaussianState,
    cfg: &FockConfig,
) -> Result<f64> {
    if predicted.modes() != 1 {
        return Err(Error::Dimension(format!(
            "predicted state has {} modes, expected 1",
            predicted.modes()
        )));
    }
    check_normalized(input)?;
    let one = OneMode::of(channel)?;
    let reconstructed = inverse_fourier(&sample_output(&one, input, cfg)?, cfg.n_max)?;
    let reference_grid = CharFnGrid::sample(cfg.extent, cfg.step, |x, y| {
        predicted.char_fn(&DVector::from_column_slice(&[x, y]))
    })?;
    let reference = inverse_fourier(&reference_grid, cfg.n_max)?;
    Ok(block_deviation(
        &reconstructed.matrix,
        &reference.matrix,
        COMPARISON_BLOCK,
    ))
}

/// Like [`verify_apply`] but compares against an explicitly given output
/// operator instead of a Gaussian prediction.
pub fn verify_apply_operator(
    channel: &GaussianChannel,
    input: &FockOperator,
    expected: &FockOperator,
    cfg: &FockConfig,
) -> Result<f64> {
    check_normalized(input)?;
    let one = OneMode::of(channel)?;
    let reconstructed = inverse_fourier(&sample_output(&one, input, cfg)?, cfg.n_max)?;
    Ok(block_deviation(
        &reconstructed.matrix,
        &expected.matrix,
        COMPARISON_BLOCK,
    ))
}

/// Quadrature check of the duality identity. The operator
///
/// ```text
///     Psi = (2 pi)^{-1} integral phi_tau(u) f(-u) W(-K u) d^2 u
/// ```
///
/// is accumulated on a grid, and `Tr(Psi W(z))` is compared against
/// `|det K|^{-1} phi_tau(K^{-1} z) f(-K^{-1} z)` at the sample points.
///
/// The substitution `u -> K u` contracts the covered region by the smallest
/// singular value of `K`, so the quadrature box is widened by its inverse;
/// a channel contracting by more than a factor four is rejected rather than
/// integrated over an enormous grid.
pub fn verify_duality(
    channel: &GaussianChannel,
    tau: &FockOperator,
    samples: &[[f64; 2]],
    cfg: &FockConfig,
    tol: f64,
) -> Result<DualityCheck> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter(
            "duality check needs at least one sample point".into(),
        ));
    }
    check_normalized(tau)?;
    let one = OneMode::of(channel)?;
    let dual = channel.dual(tol)?;

    let sigma_min = channel.k.clone().svd(false, false).singular_values.min();
    let stretch = 1.0 / sigma_min.min(1.0);
    if stretch > 4.0 {
        return Err(Error::GridGuard(format!(
            "K contracts by {:.3e}; the compensated quadrature box would be \
             {stretch:.1} times the configured extent",
            sigma_min
        )));
    }
    let extent = cfg.extent * stretch;

    let mut tau_table = DisplacementTable::new(tau.n_max());
    let tau_diagonal = tau.diagonal_part();
    let mut phi_tau = |x: f64, y: f64| -> Complex<f64> {
        match &tau_diagonal {
            Some(p) => tau_table
                .trace_against_diagonal(p, [x, y])
                .expect("dimension fixed by the table"),
            None => tau_table
                .trace_against(&tau.matrix, [x, y])
                .expect("dimension fixed by the table"),
        }
    };

    // g(u) = phi_tau(u) f(-u); the summand is g(u) W(-K u).
    let grid = CharFnGrid::sample(extent, cfg.step, |x, y| {
        phi_tau(x, y) * one.noise(-x, -y)
    })?;

    let dim = cfg.n_max + 1;
    let mut psi_table = DisplacementTable::new(cfg.n_max);
    let mut psi = DMatrix::zeros(dim, dim);
    let weight = grid.step() * grid.step() / (2.0 * std::f64::consts::PI);
    let total = grid.len();
    let center = (total - 1) / 2;
    for m in 0..center {
        let [x, y] = grid.point(m);
        let ku = one.map(x, y);
        psi_table.accumulate_pair(
            ku,
            grid.value(total - 1 - m) * weight,
            grid.value(m) * weight,
            &mut psi,
        )?;
    }
    let g0 = grid.value(center) * weight;
    for n in 0..dim {
        psi[(n, n)] += g0;
    }

    let k_hat = &dual.channel.k;
    let mut max_deviation = 0.0f64;
    for &[x, y] in samples {
        let lhs = psi_table.trace_against(&psi, [x, y])?;
        let wx = k_hat[(0, 0)] * x + k_hat[(0, 1)] * y;
        let wy = k_hat[(1, 0)] * x + k_hat[(1, 1)] * y;
        let rhs = phi_tau(wx, wy) * one.noise(-wx, -wy) * dual.scale;
        max_deviation = max_deviation.max((lhs - rhs).norm());
    }
    Ok(DualityCheck {
        max_deviation,
        scale: dual.scale,
    })
}

/// Smallest eigenvalue of the twisted kernel matrix
/// `M[r, s] = f(z_r - z_s) exp((i/2) z_r^T Delta_K z_s)` over the given
/// points. Complete positivity of a channel with noise function `f` and
/// noise form `Delta_K` forces this to be nonnegative for every point set.
pub fn sample_nonneg_definite<F>(
    mut f: F,
    delta_k: &DMatrix<f64>,
    points: &[DVector<f64>],
) -> Result<f64>
where
    F: FnMut(&DVector<f64>) -> Complex<f64>,
{
    let n = delta_k.nrows();
    if delta_k.ncols() != n {
        return Err(Error::Dimension(format!(
            "noise form must be square, got {}x{}",
            n,
            delta_k.ncols()
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "kernel test needs at least one point".into(),
        ));
    }
    for z in points {
        if z.len() != n {
            return Err(Error::Dimension(format!(
                "point has length {}, noise form is {n}x{n}",
                z.len()
            )));
        }
    }
    let m = points.len();
    let mut mat = DMatrix::zeros(m, m);
    for r in 0..m {
        for s in 0..m {
            let diff = &points[r] - &points[s];
            let twist = 0.5 * (delta_k * &points[s]).dot(&points[r]);
            mat[(r, s)] = f(&diff) * Complex::new(0.0, twist).exp();
        }
    }
    let mat = (&mat + mat.adjoint()) * Complex::new(0.5, 0.0);
    Ok(mat.symmetric_eigen().eigenvalues.min())
}
