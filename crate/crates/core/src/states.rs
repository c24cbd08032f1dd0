//! Gaussian states in the characteristic-function parameterization
//!
//! ```text
//!     phi(z) = exp(i l^T z - (1/2) z^T alpha z)
//! ```
//!
//! with mean vector `l` and real symmetric covariance `alpha`. A covariance
//! is admissible iff `alpha - (i/2) Delta >= 0`; the state is pure exactly
//! when the covariance is a minimal admissible one.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symplectic::{self, SymplecticForm};

/// Multiplier on `tol` for the symplectic-eigenvalue purity test. Absorbs
/// eigenvalue-extraction noise while staying orders of magnitude below any
/// honest mixing.
const EIGENVALUE_MARGIN: f64 = 100.0;

/// Multiplier on `tol` for the complex-structure residual, applied on the
/// squared scale of `J`.
const STRUCTURE_MARGIN: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from mean and covariance; the covariance must be
    /// square of matching even dimension and symmetric to `1e-9` relative to
    /// its max entry (the stored copy is the exact symmetric part).
    /// Admissibility is deliberately not enforced here so that invalid
    /// covariances can be constructed for negative tests; see [`Self::is_valid`].
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = symplectic::square_even_dim(&cov)?;
        if mean.len() != n {
            return Err(Error::Dimension(format!(
                "mean has length {} but the covariance is {n}x{n}",
                mean.len()
            )));
        }
        let scale = cov.amax().max(1.0);
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(Error::NotSymmetric {
                residual: asym,
                bound: 1e-9 * scale,
            });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self {
            modes: n / 2,
            mean,
            cov,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    /// One-mode vacuum: `l = 0`, `alpha = I/2`.
    pub fn vacuum() -> Self {
        Self {
            modes: 1,
            mean: DVector::zeros(2),
            cov: DMatrix::from_diagonal_element(2, 2, 0.5),
        }
    }

    /// One-mode thermal state with mean occupation `nbar`:
    /// `alpha = (nbar + 1/2) I`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean occupation must be nonnegative, got {nbar}"
            )));
        }
        Ok(Self {
            modes: 1,
            mean: DVector::zeros(2),
            cov: DMatrix::from_diagonal_element(2, 2, nbar + 0.5),
        })
    }

    /// One-mode coherent state centered at `(q, p)`.
    pub fn coherent(q: f64, p: f64) -> Result<Self> {
        if !q.is_finite() || !p.is_finite() {
            return Err(Error::InvalidParameter(
                "coherent displacement must be finite".into(),
            ));
        }
        Ok(Self {
            modes: 1,
            mean: DVector::from_column_slice(&[q, p]),
            cov: DMatrix::from_diagonal_element(2, 2, 0.5),
        })
    }

    /// One-mode squeezed vacuum: `alpha = diag(e^{2r}, e^{-2r}) / 2`, so
    /// positive `r` stretches the position quadrature.
    pub fn squeezed(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidParameter(
                "squeezing parameter must be finite".into(),
            ));
        }
        let cov = DMatrix::from_diagonal(&DVector::from_column_slice(&[
            0.5 * (2.0 * r).exp(),
            0.5 * (-2.0 * r).exp(),
        ]));
        Ok(Self {
            modes: 1,
            mean: DVector::zeros(2),
            cov,
        })
    }

    /// Direct sum of two states on disjoint mode sets.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim() + other.dim();
        let mut mean = DVector::zeros(n);
        mean.rows_mut(0, self.dim()).copy_from(&self.mean);
        mean.rows_mut(self.dim(), other.dim()).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(n, n);
        cov.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.cov);
        cov.view_mut((self.dim(), self.dim()), (other.dim(), other.dim()))
            .copy_from(&other.cov);
        Self {
            modes: self.modes + other.modes,
            mean,
            cov,
        }
    }

    fn form(&self) -> SymplecticForm {
        SymplecticForm::standard(self.modes).expect("modes >= 1 by construction")
    }

    /// Hermitian admissibility obstruction `alpha - (i/2) Delta`.
    fn obstruction(&self) -> DMatrix<Complex<f64>> {
        let form = self.form();
        DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            Complex::new(self.cov[(r, c)], -0.5 * form.matrix()[(r, c)])
        })
    }

    /// Smallest eigenvalue of `alpha - (i/2) Delta`; nonnegative (up to
    /// tolerance) exactly for admissible covariances.
    pub fn validity_margin(&self) -> f64 {
        self.obstruction().symmetric_eigen().eigenvalues.min()
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.validity_margin() >= -tol
    }

    /// Characteristic function `exp(i l^T z - z^T alpha z / 2)`.
    pub fn char_fn(&self, z: &DVector<f64>) -> Complex<f64> {
        let quad = (&self.cov * z).dot(z);
        let lin = self.mean.dot(z);
        Complex::new(-0.5 * quad, lin).exp()
    }

    pub fn symplectic_eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        symplectic::symplectic_eigenvalues(&self.cov, tol)
    }

    /// Evaluates the five equivalent purity conditions independently; see
    /// [`PurityReport`].
    pub fn purity_report(&self, tol: f64, rank_tol: f64) -> Result<PurityReport> {
        let s = self.modes;
        let form = self.form();

        let d = self.symplectic_eigenvalues(tol)?;
        let eigenvalue_deviation = d.iter().map(|x| (x - 0.5).abs()).fold(0.0, f64::max);
        let eigenvalues_half = eigenvalue_deviation <= EIGENVALUE_MARGIN * tol;

        let obstruction_eigs = self.obstruction().symmetric_eigen().eigenvalues;
        let largest = obstruction_eigs.amax();
        let obstruction_rank = obstruction_eigs
            .iter()
            .filter(|&&e| e > rank_tol * largest)
            .count();
        let rank_matches = obstruction_rank == s;

        let scale = self.cov.amax();
        let inv = self.cov.clone().try_inverse().ok_or(Error::Singular {
            sigma_min: 0.0,
            threshold: 0.0,
        })?;
        let inverse_residual =
            (&self.cov + form.matrix() * inv * form.matrix() * 0.25).amax();
        let inverse_matches = inverse_residual <= tol * scale;

        // J = 2 Delta alpha solves alpha = -(1/2) Delta J exactly; purity is
        // equivalent to J being a complex structure, J^2 = -I.
        let j = form.matrix() * &self.cov * 2.0;
        let complex_structure_residual =
            (&j * &j + DMatrix::identity(2 * s, 2 * s)).amax();
        let j_scale = j.amax().powi(2).max(1.0);
        let structure_ok = complex_structure_residual <= STRUCTURE_MARGIN * tol * j_scale;

        let verdicts = PurityVerdicts {
            minimal: eigenvalues_half,
            eigenvalues_half,
            rank_matches,
            inverse_matches,
            complex_structure: structure_ok,
        };
        let pure = verdicts.agree() && eigenvalues_half;
        Ok(PurityReport {
            symplectic_eigenvalues: d,
            eigenvalue_deviation,
            obstruction_rank,
            inverse_residual,
            complex_structure_residual,
            complex_structure: pure.then_some(j),
            verdicts,
        })
    }
}

/// Validity check for a covariance given separately from a state.
pub fn validate_state(mean: &DVector<f64>, cov: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(GaussianState::new(mean.clone(), cov.clone())?.is_valid(tol))
}

/// The five purity criteria, each evaluated on its own:
///
/// 1. `minimal`: the covariance is minimal among admissible ones. Minimality
///    is equivalent to criterion 2 and is evaluated through it.
/// 2. `eigenvalues_half`: every symplectic eigenvalue equals 1/2.
/// 3. `rank_matches`: `rank(alpha - (i/2) Delta) = s`.
/// 4. `inverse_matches`: `alpha = -(1/4) Delta alpha^{-1} Delta`.
/// 5. `complex_structure`: `J = 2 Delta alpha` satisfies `J^2 = -I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurityVerdicts {
    pub minimal: bool,
    pub eigenvalues_half: bool,
    pub rank_matches: bool,
    pub inverse_matches: bool,
    pub complex_structure: bool,
}

impl PurityVerdicts {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.minimal,
            self.eigenvalues_half,
            self.rank_matches,
            self.inverse_matches,
            self.complex_structure,
        ]
    }

    /// All five verdicts coincide.
    pub fn agree(&self) -> bool {
        let first = self.minimal;
        self.as_array().iter().all(|&v| v == first)
    }
}

#[derive(Debug, Clone)]
pub struct PurityReport {
    pub verdicts: PurityVerdicts,
    /// Ascending symplectic eigenvalues of the covariance.
    pub symplectic_eigenvalues: Vec<f64>,
    /// `max_j |d_j - 1/2|`.
    pub eigenvalue_deviation: f64,
    /// Numerical rank of `alpha - (i/2) Delta` at the relative threshold.
    pub obstruction_rank: usize,
    /// `|alpha + (1/4) Delta alpha^{-1} Delta|_max`.
    pub inverse_residual: f64,
    /// `|J^2 + I|_max` for `J = 2 Delta alpha`.
    pub complex_structure_residual: f64,
    /// The complex structure `J`, present exactly when the state is pure.
    pub complex_structure: Option<DMatrix<f64>>,
}

impl PurityReport {
    pub fn consensus(&self) -> bool {
        self.verdicts.agree()
    }

    pub fn pure(&self) -> bool {
        self.verdicts.agree() && self.verdicts.eigenvalues_half
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DEFAULT_RANK_TOL, DEFAULT_TOL};

    #[test]
    fn vacuum_sits_on_the_admissibility_boundary() {
        let v = GaussianState::vacuum();
        assert!(v.is_valid(DEFAULT_TOL));
        assert!(v.validity_margin().abs() < 1e-12);
    }

    #[test]
    fn quarter_identity_covariance_is_inadmissible() {
        let cov = DMatrix::from_diagonal_element(2, 2, 0.25);
        let state = GaussianState::new(DVector::zeros(2), cov).unwrap();
        assert!(!state.is_valid(DEFAULT_TOL));
        assert!((state.validity_margin() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn validity_is_monotone_under_added_noise() {
        let base = GaussianState::vacuum();
        let bumped =
            GaussianState::new(DVector::zeros(2), &base.cov + DMatrix::identity(2, 2) * 0.3)
                .unwrap();
        assert!(bumped.validity_margin() >= base.validity_margin());
        assert!(bumped.is_valid(DEFAULT_TOL));
    }

    #[test]
    fn state_constructor_rejects_bad_shapes() {
        assert!(GaussianState::new(DVector::zeros(3), DMatrix::identity(2, 2)).is_err());
        assert!(GaussianState::new(DVector::zeros(3), DMatrix::identity(3, 3)).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, -0.2, 1.0]);
        assert!(GaussianState::new(DVector::zeros(2), asym).is_err());
    }

    #[test]
    fn thermal_state_covariance_and_char_fn() {
        let t = GaussianState::thermal(1.0).unwrap();
        assert_eq!(t.cov, DMatrix::from_diagonal_element(2, 2, 1.5));
        let z = DVector::from_column_slice(&[0.7, -0.3]);
        let phi = t.char_fn(&z);
        let expected = (-0.75f64 * (0.7f64.powi(2) + 0.3f64.powi(2))).exp();
        assert!((phi.re - expected).abs() < 1e-14);
        assert!(phi.im.abs() < 1e-14);
        assert!(GaussianState::thermal(-0.1).is_err());
    }

    #[test]
    fn coherent_state_char_fn_carries_the_mean_phase() {
        let c = GaussianState::coherent(1.0, -2.0).unwrap();
        let z = DVector::from_column_slice(&[0.4, 0.1]);
        let phi = c.char_fn(&z);
        let modulus = (-0.25f64 * (0.4f64.powi(2) + 0.1f64.powi(2))).exp();
        let phase = 1.0 * 0.4 + (-2.0) * 0.1;
        assert!((phi - Complex::new(0.0, phase).exp() * modulus).norm() < 1e-14);
    }

    #[test]
    fn squeezed_state_is_pure_for_any_squeezing() {
        for &r in &[0.0, 0.4, -0.8, 1.3] {
            let s = GaussianState::squeezed(r).unwrap();
            assert!(s.is_valid(DEFAULT_TOL));
            let report = s.purity_report(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
            assert!(report.consensus(), "verdicts disagree at r = {r}");
            assert!(report.pure(), "squeezed vacuum must be pure at r = {r}");
            assert!(report.complex_structure.is_some());
        }
    }

    #[test]
    fn thermal_state_fails_all_purity_criteria() {
        let t = GaussianState::thermal(1.0).unwrap();
        let report = t.purity_report(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert!(report.consensus());
        assert!(!report.pure());
        assert_eq!(report.verdicts.as_array(), [false; 5]);
        assert_eq!(report.obstruction_rank, 2);
        assert!(report.complex_structure.is_none());
        assert!((report.symplectic_eigenvalues[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn purity_rank_counts_the_obstruction_kernel() {
        let v = GaussianState::vacuum();
        let report = v.purity_report(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(report.obstruction_rank, 1);
        assert!(report.pure());
        // J for the vacuum is 2 * Delta * I/2 = Delta.
        let j = report.complex_structure.unwrap();
        let form = SymplecticForm::standard(1).unwrap();
        assert!((&j - form.matrix()).amax() < 1e-14);
    }

    #[test]
    fn direct_sum_stacks_blocks() {
        let two = GaussianState::vacuum().direct_sum(&GaussianState::thermal(0.5).unwrap());
        assert_eq!(two.modes(), 2);
        assert_eq!(two.cov[(0, 0)], 0.5);
        assert_eq!(two.cov[(2, 2)], 1.0);
        assert_eq!(two.cov[(0, 2)], 0.0);
        assert!(two.is_valid(DEFAULT_TOL));
        let report = two.purity_report(DEFAULT_TOL, DEFAULT_RANK_TOL).unwrap();
        assert!(report.consensus());
        assert!(!report.pure());
    }

    #[test]
    fn validate_state_free_function_matches_method() {
        let cov = DMatrix::from_diagonal_element(2, 2, 0.25);
        assert!(!validate_state(&DVector::zeros(2), &cov, DEFAULT_TOL).unwrap());
        let cov = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(validate_state(&DVector::zeros(2), &cov, DEFAULT_TOL).unwrap());
    }
}
