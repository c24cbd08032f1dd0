//! Gaussian channels between finite-mode systems.
//!
//! A channel from an `s_A`-mode system to an `s_B`-mode system acts on Weyl
//! operators as
//!
//! ```text
//!     Phi[W(z)] = W(K z) f(z),      f(z) = exp(i l^T z - (1/2) z^T mu z)
//! ```
//!
//! with `K` of shape `2 s_A x 2 s_B`, `l` of length `2 s_B`, and symmetric
//! `mu`. Complete positivity is controlled by the noise form
//! `Delta_K = Delta_B - K^T Delta_A K`: the channel is cp iff
//! `mu - (i/2) Delta_K >= 0`. Everything in this module that goes beyond
//! validity (environment, dilation, extremality) assumes `Delta_K` is
//! nondegenerate; degenerate channels are reported as indeterminate rather
//! than silently misclassified.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::states::{GaussianState, PurityReport};
use crate::symplectic::{skew_canonical_factor, SymplecticForm};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    modes_in: usize,
    modes_out: usize,
    pub k: DMatrix<f64>,
    pub l: DVector<f64>,
    pub mu: DMatrix<f64>,
}

/// Noise form of a channel.
#[derive(Debug, Clone)]
pub struct NoiseForm {
    /// `Delta_K = Delta_B - K^T Delta_A K`, antisymmetric of output size.
    pub delta_k: DMatrix<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Singular-value test `sigma_min > tol * sigma_max`.
    pub nondegenerate: bool,
}

/// Outcome of the complete-positivity check.
#[derive(Debug, Clone, Copy)]
pub struct ChannelValidity {
    pub cp: bool,
    /// Smallest eigenvalue of `mu - (i/2) Delta_K`.
    pub cp_margin: f64,
    pub nondegenerate: bool,
}

/// Extremality verdict among channels with the same `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremality {
    Extreme,
    NotExtreme,
    /// Degenerate noise form: outside the nondegenerate analysis.
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct ExtremalityReport {
    pub verdict: Extremality,
    pub noise: NoiseForm,
    /// Purity evidence for the environment state; absent when indeterminate.
    pub environment: Option<PurityReport>,
}

/// Gaussian environment representation of the channel noise.
#[derive(Debug, Clone)]
pub struct Environment {
    /// `K_D` with `K_D^T Delta_D K_D = Delta_K`.
    pub k_d: DMatrix<f64>,
    /// State with covariance `K_D^{-T} mu K_D^{-1}` and mean solving
    /// `K_D^T l_D = l`.
    pub state: GaussianState,
}

/// Minimal Gaussian dilation data: the symplectic block matrix
///
/// ```text
///     T = [ K    L   ]
///         [ K_D  L_D ]
/// ```
///
/// satisfying `T^T diag(Delta_A, Delta_D) T = diag(Delta_B, Delta_E)` with
/// `Delta_E = Delta_A`.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub k_d: DMatrix<f64>,
    pub l_mat: DMatrix<f64>,
    pub l_d: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub env: GaussianState,
    pub residuals: DilationResiduals,
}

/// Residuals of the identities every dilation must satisfy; reported so that
/// results certify themselves.
#[derive(Debug, Clone, Copy)]
pub struct DilationResiduals {
    /// `|K_D^T Delta_D K_D - Delta_K|_max`
    pub noise_factor: f64,
    /// `|K^T Delta_A K + K_D^T Delta_D K_D - Delta_B|_max`
    pub form_sum: f64,
    /// `|T^T diag(Delta_A, Delta_D) T - diag(Delta_B, Delta_E)|_max`
    pub symplectic: f64,
    /// `|det L|`; must stay away from zero.
    pub det_l: f64,
    /// Smallest eigenvalue of `alpha_D - (i/2) Delta_D`.
    pub env_margin: f64,
}

/// A dual channel together with the trace-scaling constant.
#[derive(Debug, Clone)]
pub struct DualChannel {
    pub channel: GaussianChannel,
    /// `1 / |det K|`: the dual transports trace up to this factor.
    pub scale: f64,
}

impl GaussianChannel {
    /// Builds a channel from its Weyl parameterization. Shapes are enforced
    /// here and `mu` must be symmetric; complete positivity is checked
    /// lazily via [`Self::validate`] so invalid channels can be built for
    /// negative tests.
    pub fn new(
        modes_in: usize,
        modes_out: usize,
        k: DMatrix<f64>,
        l: DVector<f64>,
        mu: DMatrix<f64>,
    ) -> Result<Self> {
        if modes_in == 0 || modes_out == 0 {
            return Err(Error::InvalidParameter(
                "mode counts must be positive".into(),
            ));
        }
        let (rows, cols) = (2 * modes_in, 2 * modes_out);
        if k.nrows() != rows || k.ncols() != cols {
            return Err(Error::Dimension(format!(
                "K is {}x{}, expected {rows}x{cols}",
                k.nrows(),
                k.ncols()
            )));
        }
        if l.len() != cols {
            return Err(Error::Dimension(format!(
                "l has length {}, expected {cols}",
                l.len()
            )));
        }
        if mu.nrows() != cols || mu.ncols() != cols {
            return Err(Error::Dimension(format!(
                "mu is {}x{}, expected {cols}x{cols}",
                mu.nrows(),
                mu.ncols()
            )));
        }
        let scale = mu.amax().max(1.0);
        let asym = (&mu - mu.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(Error::NotSymmetric {
                residual: asym,
                bound: 1e-9 * scale,
            });
        }
        let mu = (&mu + mu.transpose()) * 0.5;
        Ok(Self {
            modes_in,
            modes_out,
            k,
            l,
            mu,
        })
    }

    pub fn modes_in(&self) -> usize {
        self.modes_in
    }

    pub fn modes_out(&self) -> usize {
        self.modes_out
    }

    /// Identity channel on `modes` modes.
    pub fn identity(modes: usize) -> Result<Self> {
        let n = 2 * modes;
        Self::new(
            modes,
            modes,
            DMatrix::identity(n, n),
            DVector::zeros(n),
            DMatrix::zeros(n, n),
        )
    }

    /// One-mode attenuator with transmission `eta` coupling to a thermal
    /// environment with occupation `nbar`: `K = sqrt(eta) I`,
    /// `mu = (1 - eta)(nbar + 1/2) I`. Minimal noise at `nbar = 0`.
    pub fn attenuator(eta: f64, nbar: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "attenuator transmission must lie in (0, 1), got {eta}"
            )));
        }
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "environment occupation must be nonnegative, got {nbar}"
            )));
        }
        Self::new(
            1,
            1,
            DMatrix::from_diagonal_element(2, 2, eta.sqrt()),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, (1.0 - eta) * (nbar + 0.5)),
        )
    }

    /// One-mode amplifier with gain `g > 1`: `K = sqrt(g) I`,
    /// `mu = (g - 1)(nbar + 1/2) I`. Minimal noise at `nbar = 0`.
    pub fn amplifier(gain: f64, nbar: f64) -> Result<Self> {
        if !(gain > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "amplifier gain must exceed 1, got {gain}"
            )));
        }
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "environment occupation must be nonnegative, got {nbar}"
            )));
        }
        Self::new(
            1,
            1,
            DMatrix::from_diagonal_element(2, 2, gain.sqrt()),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, (gain - 1.0) * (nbar + 0.5)),
        )
    }

    /// One-mode additive classical noise: `K = I`, `mu = nu I`. Its noise
    /// form vanishes, so the nondegenerate analysis never applies.
    pub fn classical_noise(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be nonnegative, got {nu}"
            )));
        }
        Self::new(
            1,
            1,
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, nu),
        )
    }

    fn form_in(&self) -> SymplecticForm {
        SymplecticForm::standard(self.modes_in).expect("modes >= 1 by construction")
    }

    fn form_out(&self) -> SymplecticForm {
        SymplecticForm::standard(self.modes_out).expect("modes >= 1 by construction")
    }

    /// The Gaussian noise factor `f(z) = exp(i l^T z - z^T mu z / 2)`.
    pub fn noise_fn(&self, z: &DVector<f64>) -> Complex<f64> {
        let quad = (&self.mu * z).dot(z);
        let lin = self.l.dot(z);
        Complex::new(-0.5 * quad, lin).exp()
    }

    /// Noise form `Delta_K` with its singular-value degeneracy test.
    pub fn noise_form(&self, tol: f64) -> NoiseForm {
        let delta_k = self.form_out().matrix()
            - self.k.transpose() * self.form_in().matrix() * &self.k;
        let delta_k = (&delta_k - delta_k.transpose()) * 0.5;
        let singular = delta_k.clone().svd(false, false).singular_values;
        let sigma_max = singular.max();
        let sigma_min = singular.min();
        NoiseForm {
            delta_k,
            sigma_min,
            sigma_max,
            nondegenerate: sigma_min > tol * sigma_max && sigma_max > 0.0,
        }
    }

    /// Complete positivity: `mu - (i/2) Delta_K >= 0` (up to `-tol`).
    pub fn validate(&self, tol: f64) -> Result<ChannelValidity> {
        let scale = self.mu.amax().max(1.0);
        let asym = (&self.mu - self.mu.transpose()).amax();
        if asym > tol * scale {
            return Err(Error::NotSymmetric {
                residual: asym,
                bound: tol * scale,
            });
        }
        let noise = self.noise_form(tol);
        let n = 2 * self.modes_out;
        let obstruction = DMatrix::from_fn(n, n, |r, c| {
            Complex::new(self.mu[(r, c)], -0.5 * noise.delta_k[(r, c)])
        });
        let cp_margin = obstruction.symmetric_eigen().eigenvalues.min();
        Ok(ChannelValidity {
            cp: cp_margin >= -tol,
            cp_margin,
            nondegenerate: noise.nondegenerate,
        })
    }

    /// Environment representation `(K_D, rho_D)` of the channel noise:
    /// `f(z) = phi_{rho_D}(K_D z)`. Requires a nondegenerate noise form.
    pub fn environment(&self, tol: f64) -> Result<Environment> {
        let noise = self.noise_form(tol);
        if !noise.nondegenerate {
            return Err(Error::DegenerateNoise(format!(
                "sigma_min = {:.3e} <= tol * sigma_max = {:.3e}; the environment \
                 construction needs det Delta_K != 0",
                noise.sigma_min,
                tol * noise.sigma_max
            )));
        }
        let k_d = skew_canonical_factor(&noise.delta_k, tol)?.factor;
        let inv_k_d = k_d.clone().try_inverse().ok_or(Error::Singular {
            sigma_min: noise.sigma_min,
            threshold: tol * noise.sigma_max,
        })?;
        let alpha_d = inv_k_d.transpose() * &self.mu * &inv_k_d;
        let alpha_d = (&alpha_d + alpha_d.transpose()) * 0.5;
        let mean_d = inv_k_d.transpose() * &self.l;
        Ok(Environment {
            k_d,
            state: GaussianState::new(mean_d, alpha_d)?,
        })
    }

    /// Extremality among channels sharing this `K`: holds iff the
    /// environment state is pure, i.e. iff the noise is minimal. The verdict
    /// follows the symplectic-eigenvalue purity test; the full purity
    /// evidence is attached.
    pub fn is_extreme(&self, tol: f64, rank_tol: f64) -> Result<ExtremalityReport> {
        let validity = self.validate(tol)?;
        let noise = self.noise_form(tol);
        if !validity.nondegenerate {
            return Ok(ExtremalityReport {
                verdict: Extremality::Indeterminate,
                noise,
                environment: None,
            });
        }
        if !validity.cp {
            return Err(Error::NotCompletelyPositive {
                eigenvalue: validity.cp_margin,
            });
        }
        let env = self.environment(tol)?;
        let purity = env.state.purity_report(tol, rank_tol)?;
        let verdict = if purity.verdicts.eigenvalues_half {
            Extremality::Extreme
        } else {
            Extremality::NotExtreme
        };
        Ok(ExtremalityReport {
            verdict,
            noise,
            environment: Some(purity),
        })
    }

    /// Minimal Gaussian dilation of a cp channel with nondegenerate noise
    /// form. Every identity in [`DilationResiduals`] is checked against
    /// `10 * tol` (at the scale of the matrices involved) and any violation
    /// aborts with the failed identity named.
    pub fn dilate(&self, tol: f64) -> Result<Dilation> {
        let validity = self.validate(tol)?;
        if !validity.cp {
            return Err(Error::NotCompletelyPositive {
                eigenvalue: validity.cp_margin,
            });
        }
        let noise = self.noise_form(tol);
        if !noise.nondegenerate {
            return Err(Error::DegenerateNoise(format!(
                "sigma_min = {:.3e} <= tol * sigma_max = {:.3e}; no nondegenerate dilation",
                noise.sigma_min,
                tol * noise.sigma_max
            )));
        }

        let env = self.environment(tol)?;
        let k_d = env.k_d.clone();
        let delta_a = self.form_in();
        let delta_d = self.form_out();
        let delta_b = delta_d.matrix();

        // M = Delta_A + Delta_A K K_D^{-1} Delta_D^{-1} K_D^{-T} K^T Delta_A
        // is antisymmetric and nondegenerate; its skew factor G gives the
        // remaining blocks via L = G^{-1} (so L^T M L = Delta_E) and
        // L_D = -(K_D^T Delta_D)^{-1} K^T Delta_A L.
        let inv_k_d = k_d.clone().try_inverse().expect("checked in environment");
        let b = &self.k * &inv_k_d;
        let m = delta_a.matrix()
            + delta_a.matrix() * &b * (delta_d.matrix() * -1.0) * b.transpose() * delta_a.matrix();
        let m = (&m - m.transpose()) * 0.5;
        let g = skew_canonical_factor(&m, tol)?.factor;
        let l_mat = g.try_inverse().ok_or(Error::Singular {
            sigma_min: 0.0,
            threshold: tol,
        })?;
        let lhs = (k_d.transpose() * delta_d.matrix())
            .lu()
            .solve(&(self.k.transpose() * delta_a.matrix() * &l_mat))
            .ok_or(Error::Singular {
                sigma_min: noise.sigma_min,
                threshold: tol * noise.sigma_max,
            })?;
        let l_d = -lhs;

        let (na, nb) = (2 * self.modes_in, 2 * self.modes_out);
        let mut t = DMatrix::zeros(na + nb, na + nb);
        t.view_mut((0, 0), (na, nb)).copy_from(&self.k);
        t.view_mut((0, nb), (na, na)).copy_from(&l_mat);
        t.view_mut((na, 0), (nb, nb)).copy_from(&k_d);
        t.view_mut((na, nb), (nb, na)).copy_from(&l_d);

        // diag(Delta_A, Delta_D) and diag(Delta_B, Delta_E) both equal the
        // standard form on s_A + s_B modes in the interleaved ordering.
        let total = SymplecticForm::standard(self.modes_in + self.modes_out)?;
        let residuals = DilationResiduals {
            noise_factor: (k_d.transpose() * delta_d.matrix() * &k_d - &noise.delta_k).amax(),
            form_sum: (self.k.transpose() * delta_a.matrix() * &self.k
                + k_d.transpose() * delta_d.matrix() * &k_d
                - delta_b)
                .amax(),
            symplectic: (t.transpose() * total.matrix() * &t - total.matrix()).amax(),
            det_l: l_mat.determinant().abs(),
            env_margin: env.state.validity_margin(),
        };

        let bound = 10.0 * tol * self.k.amax().max(1.0).powi(2);
        for (identity, residual) in [
            ("K_D^T Delta_D K_D = Delta_K", residuals.noise_factor),
            (
                "K^T Delta_A K + K_D^T Delta_D K_D = Delta_B",
                residuals.form_sum,
            ),
            (
                "T^T diag(Delta_A, Delta_D) T = diag(Delta_B, Delta_E)",
                residuals.symplectic,
            ),
        ] {
            if residual > bound {
                return Err(Error::ResidualExceeded {
                    identity,
                    residual,
                    bound,
                });
            }
        }
        if residuals.det_l <= tol {
            return Err(Error::Singular {
                sigma_min: residuals.det_l,
                threshold: tol,
            });
        }
        if residuals.env_margin < -10.0 * tol {
            return Err(Error::NotCompletelyPositive {
                eigenvalue: residuals.env_margin,
            });
        }

        Ok(Dilation {
            k_d,
            l_mat,
            l_d,
            t,
            env: env.state,
            residuals,
        })
    }

    /// Weak complementary channel, read off the dilation: it maps the
    /// environment output as `W(z_E) -> W(L z_E) phi_{rho_D}(L_D z_E)`, so
    /// its parameters are `(L, L_D^T l_D, L_D^T alpha_D L_D)`. The result is
    /// always cp; that is re-checked numerically.
    pub fn complementary(&self, tol: f64) -> Result<GaussianChannel> {
        let dilation = self.dilate(tol)?;
        let mu = dilation.l_d.transpose() * &dilation.env.cov * &dilation.l_d;
        let mu = (&mu + mu.transpose()) * 0.5;
        let l = dilation.l_d.transpose() * &dilation.env.mean;
        let channel = GaussianChannel::new(self.modes_in, self.modes_in, dilation.l_mat, l, mu)?;
        let validity = channel.validate(tol)?;
        if !validity.cp {
            return Err(Error::ResidualExceeded {
                identity: "complementary channel cp margin",
                residual: -validity.cp_margin,
                bound: tol,
            });
        }
        Ok(channel)
    }

    /// Dual channel `(K^{-1}, -(K^{-1})^T l, (K^{-1})^T mu K^{-1})` together
    /// with the scale `1 / |det K|`. Defined for square channels with
    /// invertible `K`; duality composes to the identity.
    pub fn dual(&self, tol: f64) -> Result<DualChannel> {
        if self.modes_in != self.modes_out {
            return Err(Error::DualityUndefined(format!(
                "K is {}x{}; the dual needs a square invertible K",
                2 * self.modes_in,
                2 * self.modes_out
            )));
        }
        let singular = self.k.clone().svd(false, false).singular_values;
        let sigma_min = singular.min();
        let sigma_max = singular.max();
        if !(sigma_min > tol * sigma_max) || sigma_max == 0.0 {
            return Err(Error::DualityUndefined(format!(
                "K is numerically singular: sigma_min = {sigma_min:.3e}"
            )));
        }
        let k_hat = self.k.clone().try_inverse().ok_or(Error::Singular {
            sigma_min,
            threshold: tol * sigma_max,
        })?;
        let l_hat = -(k_hat.transpose() * &self.l);
        let mu_hat = k_hat.transpose() * &self.mu * &k_hat;
        let mu_hat = (&mu_hat + mu_hat.transpose()) * 0.5;
        let scale = 1.0 / self.k.determinant().abs();
        Ok(DualChannel {
            channel: GaussianChannel::new(self.modes_in, self.modes_out, k_hat, l_hat, mu_hat)?,
            scale,
        })
    }

    /// Action on a Gaussian state:
    /// `l -> K^T l + l_ch`, `alpha -> K^T alpha K + mu`.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.modes() != self.modes_in {
            return Err(Error::Dimension(format!(
                "state has {} modes, channel expects {}",
                state.modes(),
                self.modes_in
            )));
        }
        let mean = self.k.transpose() * &state.mean + &self.l;
        let cov = self.k.transpose() * &state.cov * &self.k + &self.mu;
        let cov = (&cov + cov.transpose()) * 0.5;
        GaussianState::new(mean, cov)
    }

    /// Composition in application order: `self` acts first, `then` second,
    /// giving `(K_1 K_2, K_2^T l_1 + l_2, K_2^T mu_1 K_2 + mu_2)`.
    pub fn compose(&self, then: &GaussianChannel) -> Result<GaussianChannel> {
        if self.modes_out != then.modes_in {
            return Err(Error::Dimension(format!(
                "cannot chain {} output modes into {} input modes",
                self.modes_out, then.modes_in
            )));
        }
        let k = &self.k * &then.k;
        let l = then.k.transpose() * &self.l + &then.l;
        let mu = then.k.transpose() * &self.mu * &then.k + &then.mu;
        let mu = (&mu + mu.transpose()) * 0.5;
        GaussianChannel::new(self.modes_in, then.modes_out, k, l, mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DEFAULT_RANK_TOL, DEFAULT_TOL};

    fn minimal_attenuator() -> GaussianChannel {
        GaussianChannel::attenuator(0.5, 0.0).unwrap()
    }

    #[test]
    fn attenuator_noise_form_is_scaled_standard_form() {
        let ch = minimal_attenuator();
        let noise = ch.noise_form(DEFAULT_TOL);
        let form = SymplecticForm::standard(1).unwrap();
        assert!((&noise.delta_k - form.matrix() * 0.5).amax() < 1e-14);
        assert!(noise.nondegenerate);
    }

    #[test]
    fn zero_k_channel_keeps_the_full_output_form() {
        let ch = GaussianChannel::new(
            1,
            1,
            DMatrix::zeros(2, 2),
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let noise = ch.noise_form(DEFAULT_TOL);
        let form = SymplecticForm::standard(1).unwrap();
        assert!((&noise.delta_k - form.matrix()).amax() < 1e-14);
        assert!(noise.nondegenerate);
        assert!(ch.validate(DEFAULT_TOL).unwrap().cp);
    }

    #[test]
    fn attenuator_cp_margins() {
        let good = minimal_attenuator();
        let v = good.validate(DEFAULT_TOL).unwrap();
        assert!(v.cp);
        assert!(v.cp_margin.abs() < 1e-12);

        let bad = GaussianChannel::new(
            1,
            1,
            DMatrix::from_diagonal_element(2, 2, 0.5f64.sqrt()),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, 0.1),
        )
        .unwrap();
        let v = bad.validate(DEFAULT_TOL).unwrap();
        assert!(!v.cp);
        assert!((v.cp_margin + 0.15).abs() < 1e-12);
    }

    #[test]
    fn classical_noise_is_degenerate() {
        let ch = GaussianChannel::classical_noise(1.0).unwrap();
        let noise = ch.noise_form(DEFAULT_TOL);
        assert!(!noise.nondegenerate);
        assert!(noise.sigma_max < 1e-14);
        let report = ch.is_extreme(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(report.verdict, Extremality::Indeterminate);
        assert!(report.environment.is_none());
        assert!(matches!(
            ch.environment(DEFAULT_TOL),
            Err(Error::DegenerateNoise(_))
        ));
    }

    #[test]
    fn attenuator_environment_is_thermal() {
        for nbar in [0.0, 0.7] {
            let ch = GaussianChannel::attenuator(0.4, nbar).unwrap();
            let env = ch.environment(DEFAULT_TOL).unwrap();
            let d = env.state.symplectic_eigenvalues(DEFAULT_TOL).unwrap();
            assert!((d[0] - (nbar + 0.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn minimal_noise_channels_are_extreme() {
        let report = minimal_attenuator()
            .is_extreme(DEFAULT_TOL, DEFAULT_RANK_TOL)
            .unwrap();
        assert_eq!(report.verdict, Extremality::Extreme);
        assert!(report.environment.unwrap().pure());

        let noisy = GaussianChannel::attenuator(0.5, 1.0).unwrap();
        let report = noisy.is_extreme(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(report.verdict, Extremality::NotExtreme);

        let amp = GaussianChannel::amplifier(2.0, 0.0).unwrap();
        let report = amp.is_extreme(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(report.verdict, Extremality::Extreme);
    }

    #[test]
    fn is_extreme_rejects_non_cp_channels() {
        let bad = GaussianChannel::new(
            1,
            1,
            DMatrix::from_diagonal_element(2, 2, 0.5f64.sqrt()),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, 0.1),
        )
        .unwrap();
        assert!(matches!(
            bad.is_extreme(DEFAULT_TOL, DEFAULT_RANK_TOL),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn dilation_identities_hold_for_the_attenuator() {
        let ch = GaussianChannel::attenuator(0.3, 0.2).unwrap();
        let d = ch.dilate(DEFAULT_TOL).unwrap();
        assert!(d.residuals.noise_factor < 1e-12);
        assert!(d.residuals.form_sum < 1e-12);
        assert!(d.residuals.symplectic < 1e-12);
        assert!(d.residuals.det_l > 1e-9);
        assert!(d.residuals.env_margin > -1e-12);
        let total = SymplecticForm::standard(2).unwrap();
        assert!(crate::symplectic::is_symplectic(&d.t, &total, &total, 1e-10).unwrap());
    }

    #[test]
    fn dilation_refuses_degenerate_and_non_cp_channels() {
        let id = GaussianChannel::identity(1).unwrap();
        assert!(matches!(
            id.dilate(DEFAULT_TOL),
            Err(Error::DegenerateNoise(_))
        ));
        let bad = GaussianChannel::new(
            1,
            1,
            DMatrix::from_diagonal_element(2, 2, 0.5f64.sqrt()),
            DVector::zeros(2),
            DMatrix::from_diagonal_element(2, 2, 0.1),
        )
        .unwrap();
        assert!(matches!(
            bad.dilate(DEFAULT_TOL),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn complementary_of_attenuator_is_cp_with_nondegenerate_noise() {
        for eta in [0.25, 0.5, 0.75] {
            let ch = GaussianChannel::attenuator(eta, 0.0).unwrap();
            let comp = ch.complementary(DEFAULT_TOL).unwrap();
            assert_eq!(comp.modes_in(), 1);
            assert_eq!(comp.modes_out(), 1);
            let v = comp.validate(DEFAULT_TOL).unwrap();
            assert!(v.cp);
            assert!(v.nondegenerate, "eta = {eta}");
        }
    }

    #[test]
    fn dual_of_scaled_identity_matches_closed_form() {
        let ch = GaussianChannel::new(
            1,
            1,
            DMatrix::identity(2, 2) * 2.0,
            DVector::from_column_slice(&[1.0, 0.0]),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let dual = ch.dual(DEFAULT_TOL).unwrap();
        assert!((&dual.channel.k - DMatrix::identity(2, 2) * 0.5).amax() < 1e-14);
        assert!(
            (&dual.channel.l - DVector::from_column_slice(&[-0.5, 0.0])).amax() < 1e-14
        );
        assert!((&dual.channel.mu - DMatrix::identity(2, 2) * 0.25).amax() < 1e-14);
        assert!((dual.scale - 0.25).abs() < 1e-14);
    }

    #[test]
    fn dual_is_an_involution() {
        let ch = GaussianChannel::attenuator(0.7, 0.3).unwrap();
        let back = ch.dual(DEFAULT_TOL).unwrap().channel.dual(DEFAULT_TOL).unwrap();
        assert!((&back.channel.k - &ch.k).amax() < 1e-12);
        assert!((&back.channel.l - &ch.l).amax() < 1e-12);
        assert!((&back.channel.mu - &ch.mu).amax() < 1e-12);
        let fwd_scale = ch.dual(DEFAULT_TOL).unwrap().scale;
        assert!((fwd_scale * back.scale - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dual_rejects_rectangular_and_singular_channels() {
        let rect = GaussianChannel::new(
            2,
            1,
            DMatrix::zeros(4, 2),
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        assert!(matches!(
            rect.dual(DEFAULT_TOL),
            Err(Error::DualityUndefined(_))
        ));
        let sing = GaussianChannel::new(
            1,
            1,
            DMatrix::zeros(2, 2),
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        assert!(matches!(
            sing.dual(DEFAULT_TOL),
            Err(Error::DualityUndefined(_))
        ));
    }

    #[test]
    fn apply_attenuates_thermal_input_to_the_fixed_point() {
        let ch = GaussianChannel::attenuator(0.5, 0.0).unwrap();
        let out = ch.apply(&GaussianState::thermal(1.0).unwrap()).unwrap();
        // 0.5 * 1.5 + 0.25 = 1.0 on the diagonal.
        assert!((&out.cov - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!(out.is_valid(DEFAULT_TOL));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let first = GaussianChannel::attenuator(0.6, 0.1).unwrap();
        let second = GaussianChannel::amplifier(1.8, 0.4).unwrap();
        let chained = first.compose(&second).unwrap();
        let state = GaussianState::coherent(0.8, -0.4).unwrap();
        let direct = chained.apply(&state).unwrap();
        let staged = second.apply(&first.apply(&state).unwrap()).unwrap();
        assert!((&direct.mean - &staged.mean).amax() < 1e-12);
        assert!((&direct.cov - &staged.cov).amax() < 1e-12);
    }

    #[test]
    fn attenuators_compose_within_the_family() {
        let a = GaussianChannel::attenuator(0.5, 0.0).unwrap();
        let b = GaussianChannel::attenuator(0.8, 0.0).unwrap();
        let ab = a.compose(&b).unwrap();
        let expected = GaussianChannel::attenuator(0.4, 0.0).unwrap();
        assert!((&ab.k - &expected.k).amax() < 1e-14);
        assert!((&ab.mu - &expected.mu).amax() < 1e-14);
    }
}
