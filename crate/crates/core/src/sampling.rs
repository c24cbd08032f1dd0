//! Deterministic random instances for stress tests and self-checks.
//!
//! Everything here is seeded, so a failing case can be replayed from its
//! seed alone. Draws are rejected and retried only where a property is
//! needed that holds generically but not always (nondegeneracy of a noise
//! form, conditioning of an antisymmetric draw).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::GaussianChannel;
use crate::error::{Error, Result};
use crate::states::GaussianState;
use crate::symplectic::{random_symplectic, skew_canonical_factor, SymplecticForm};

const MAX_REDRAWS: usize = 200;

/// Symmetric positive definite matrix of size `2 modes`, eigenvalues
/// bounded away from zero by construction.
pub fn random_spd(modes: usize, seed: u64) -> Result<DMatrix<f64>> {
    if modes == 0 {
        return Err(Error::InvalidParameter("modes must be positive".into()));
    }
    let n = 2 * modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    Ok(&b * b.transpose() / n as f64 + DMatrix::from_diagonal_element(n, n, 0.3))
}

/// Antisymmetric matrix of size `2 modes` whose pair values stay well away
/// from zero, so canonical factorization is well conditioned.
pub fn random_antisymmetric(modes: usize, seed: u64) -> Result<DMatrix<f64>> {
    if modes == 0 {
        return Err(Error::InvalidParameter("modes must be positive".into()));
    }
    let n = 2 * modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REDRAWS {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let a = (&g - g.transpose()) * 0.5;
        let singular = a.clone().svd(false, false).singular_values;
        if singular.min() > 1e-3 * singular.max() {
            return Ok(a);
        }
    }
    Err(Error::Singular {
        sigma_min: 0.0,
        threshold: 1e-3,
    })
}

/// Valid Gaussian state with covariance `S^T D S` for a random symplectic
/// `S`. Pure states use symplectic eigenvalues exactly `1/2`; mixed states
/// draw them from `[0.55, 2.5]`, bounded away from the purity boundary so
/// the two classes stay distinguishable numerically.
pub fn random_valid_state(modes: usize, seed: u64, pure: bool) -> Result<GaussianState> {
    if modes == 0 {
        return Err(Error::InvalidParameter("modes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_symplectic(modes, rng.gen())?;
    let n = 2 * modes;
    let mut d = DMatrix::zeros(n, n);
    for j in 0..modes {
        let val = if pure { 0.5 } else { rng.gen_range(0.55..2.5) };
        d[(2 * j, 2 * j)] = val;
        d[(2 * j + 1, 2 * j + 1)] = val;
    }
    let cov = s.transpose() * d * &s;
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
    GaussianState::new(mean, cov)
}

/// Completely positive channel with nondegenerate noise form. `K` is drawn
/// dense; `mu` is synthesized from a random environment covariance, so cp
/// holds by construction.
pub fn random_channel(modes_in: usize, modes_out: usize, seed: u64) -> Result<GaussianChannel> {
    random_channel_with(modes_in, modes_out, seed, false)
}

/// Like [`random_channel`] but with a pure environment, so the channel has
/// minimal noise for its `K`.
pub fn random_minimal_channel(
    modes_in: usize,
    modes_out: usize,
    seed: u64,
) -> Result<GaussianChannel> {
    random_channel_with(modes_in, modes_out, seed, true)
}

fn random_channel_with(
    modes_in: usize,
    modes_out: usize,
    seed: u64,
    minimal: bool,
) -> Result<GaussianChannel> {
    if modes_in == 0 || modes_out == 0 {
        return Err(Error::InvalidParameter("modes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (2 * modes_in, 2 * modes_out);
    let form_in = SymplecticForm::standard(modes_in)?;
    let form_out = SymplecticForm::standard(modes_out)?;

    let mut chosen = None;
    for _ in 0..MAX_REDRAWS {
        let k = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
        let delta_k = form_out.matrix() - k.transpose() * form_in.matrix() * &k;
        let delta_k = (&delta_k - delta_k.transpose()) * 0.5;
        let singular = delta_k.clone().svd(false, false).singular_values;
        if singular.min() > 0.05 * singular.max() {
            chosen = Some((k, delta_k));
            break;
        }
    }
    let (k, delta_k) = chosen.ok_or(Error::Singular {
        sigma_min: 0.0,
        threshold: 0.05,
    })?;

    let env = random_valid_state(modes_out, rng.gen(), minimal)?;
    let l = DVector::from_fn(cols, |_, _| rng.gen_range(-1.0..1.0));
    let k_d = skew_canonical_factor(&delta_k, crate::DEFAULT_TOL)?.factor;
    let mu = k_d.transpose() * &env.cov * &k_d;
    let mu = (&mu + mu.transpose()) * 0.5;
    GaussianChannel::new(modes_in, modes_out, k, l, mu)
}
