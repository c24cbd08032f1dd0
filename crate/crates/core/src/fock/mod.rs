//! Truncated Fock-space oracle.
//!
//! Everything in this module works with dense operators on the span of the
//! number states `|0>, ..., |n_max>` and knows nothing about symplectic
//! forms or canonical factorizations. That independence is the point: the
//! Gaussian formalism elsewhere in the crate predicts characteristic
//! functions and channel actions in closed form, and this module re-derives
//! the same quantities from matrix quadrature so the two can be compared.
//!
//! Truncation is treated as a contract, not an approximation to silently
//! absorb: state builders reject parameters whose population leaks past
//! `n_max`, and grid reconstruction refuses grids too coarse or too short
//! for the integrand it is handed.

mod displacement;
mod grid;
mod verify;

pub use displacement::{weyl, DisplacementTable};
pub use grid::{inverse_fourier, CharFnGrid, FockConfig};
pub use verify::{
    sample_nonneg_definite, verify_apply, verify_apply_operator, verify_duality, DualityCheck,
};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Truncation defect allowed when building states with known amplitudes.
const TRUNCATION_TOL: f64 = 1e-10;

/// Trace defect allowed before a characteristic function is evaluated.
const NORMALIZATION_TOL: f64 = 1e-10;

/// Dense operator on the truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex<f64>>,
}

impl FockOperator {
    pub fn from_matrix(matrix: DMatrix<Complex<f64>>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 2 {
            return Err(Error::Dimension(format!(
                "operator must be square of dimension >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn trace(&self) -> Complex<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Populations if the operator is numerically diagonal with a real
    /// diagonal; `None` otherwise. Lets quadratures skip the off-diagonal
    /// bands for number-diagonal states.
    pub fn diagonal_part(&self) -> Option<Vec<f64>> {
        let scale = self.matrix.camax().max(1.0);
        let dim = self.dim();
        for r in 0..dim {
            for c in 0..dim {
                let v = self.matrix[(r, c)];
                let off = if r == c { v.im.abs() } else { v.norm() };
                if off > 1e-13 * scale {
                    return None;
                }
            }
        }
        Some((0..dim).map(|n| self.matrix[(n, n)].re).collect())
    }

    fn pure(dim: usize, amplitudes: &[(usize, Complex<f64>)]) -> Result<Self> {
        let weight: f64 = amplitudes.iter().map(|(_, c)| c.norm_sqr()).sum();
        let defect = (1.0 - weight).abs();
        if defect > TRUNCATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "state does not fit below the truncation: population defect {defect:.3e}"
            )));
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        for &(m, cm) in amplitudes {
            for &(n, cn) in amplitudes {
                matrix[(m, n)] = cm * cn.conj();
            }
        }
        Ok(Self { matrix })
    }

    pub fn vacuum(n_max: usize) -> Result<Self> {
        Self::number_state(0, n_max)
    }

    pub fn number_state(n: usize, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if n > n_max {
            return Err(Error::InvalidParameter(format!(
                "number state {n} exceeds truncation {n_max}"
            )));
        }
        let mut matrix = DMatrix::zeros(n_max + 1, n_max + 1);
        matrix[(n, n)] = Complex::new(1.0, 0.0);
        Ok(Self { matrix })
    }

    /// Coherent state centered at `(q0, p0)`, amplitude `(q0 + i p0)/sqrt(2)`.
    pub fn coherent(q0: f64, p0: f64, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(q0.is_finite() && p0.is_finite()) {
            return Err(Error::InvalidParameter(
                "coherent amplitude must be finite".into(),
            ));
        }
        let beta = Complex::new(q0, p0) / 2f64.sqrt();
        let mut amps = Vec::with_capacity(n_max + 1);
        let mut c = Complex::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
        amps.push((0, c));
        for n in 1..=n_max {
            c = c * beta / (n as f64).sqrt();
            amps.push((n, c));
        }
        Self::pure(n_max + 1, &amps)
    }

    /// Squeezed vacuum with covariance `diag(e^{2r}, e^{-2r})/2`.
    pub fn squeezed(r: f64, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !r.is_finite() {
            return Err(Error::InvalidParameter(
                "squeezing parameter must be finite".into(),
            ));
        }
        let nu = r.tanh();
        let norm = 1.0 / r.cosh().sqrt();
        let mut amps = Vec::new();
        let mut t = norm;
        amps.push((0, Complex::new(t, 0.0)));
        let mut k = 1;
        while 2 * k <= n_max {
            let kf = k as f64;
            t *= nu * ((2.0 * kf - 1.0) / (2.0 * kf)).sqrt();
            amps.push((2 * k, Complex::new(t, 0.0)));
            k += 1;
        }
        Self::pure(n_max + 1, &amps)
    }

    /// Thermal state with mean occupation `nbar`.
    pub fn thermal(nbar: f64, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        if !(nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mean occupation must be nonnegative, got {nbar}"
            )));
        }
        let q = nbar / (nbar + 1.0);
        let mut p = 1.0 / (nbar + 1.0);
        let mut total = 0.0;
        let mut matrix = DMatrix::zeros(n_max + 1, n_max + 1);
        for n in 0..=n_max {
            matrix[(n, n)] = Complex::new(p, 0.0);
            total += p;
            p *= q;
        }
        let defect = (1.0 - total).abs();
        if defect > TRUNCATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "thermal tail leaks past the truncation: population defect {defect:.3e}"
            )));
        }
        Ok(Self { matrix })
    }
}

/// Annihilation, creation, and number operators on `n_max + 1` levels.
pub fn ladder(
    n_max: usize,
) -> Result<(
    DMatrix<Complex<f64>>,
    DMatrix<Complex<f64>>,
    DMatrix<Complex<f64>>,
)> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let dim = n_max + 1;
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    let number = &adag * &a;
    Ok((a, adag, number))
}

/// Quantum characteristic function `Tr(rho W(z))` of a normalized operator.
pub fn char_fn(rho: &FockOperator, z: [f64; 2]) -> Result<Complex<f64>> {
    let defect = (rho.trace() - Complex::new(1.0, 0.0)).norm();
    if defect > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { defect });
    }
    let mut table = DisplacementTable::new(rho.n_max());
    if let Some(populations) = rho.diagonal_part() {
        table.trace_against_diagonal(&populations, z)
    } else {
        table.trace_against(&rho.matrix, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders_produce_normalized_hermitian_operators() {
        let ops = [
            FockOperator::vacuum(30).unwrap(),
            FockOperator::number_state(3, 30).unwrap(),
            FockOperator::thermal(1.0, 60).unwrap(),
            FockOperator::coherent(1.0, -0.5, 40).unwrap(),
            FockOperator::squeezed(0.6, 60).unwrap(),
        ];
        for op in &ops {
            assert!((op.trace() - Complex::new(1.0, 0.0)).norm() < 1e-10);
            assert!(op.hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn truncation_leaks_are_rejected() {
        assert!(matches!(
            FockOperator::coherent(20.0, 0.0, 30),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            FockOperator::squeezed(2.0, 10),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            FockOperator::thermal(5.0, 20),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            FockOperator::number_state(31, 30),
            Err(Error::InvalidParameter(_))
        ));
        assert!(FockOperator::vacuum(0).is_err());
    }

    #[test]
    fn diagonal_part_detects_number_diagonal_states() {
        assert!(FockOperator::thermal(0.5, 40).unwrap().diagonal_part().is_some());
        assert!(FockOperator::vacuum(10).unwrap().diagonal_part().is_some());
        assert!(FockOperator::coherent(1.0, 0.0, 40)
            .unwrap()
            .diagonal_part()
            .is_none());
        let p = FockOperator::thermal(1.0, 50).unwrap().diagonal_part().unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15);
        assert!((p[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn char_fn_requires_unit_trace() {
        let mut op = FockOperator::vacuum(10).unwrap();
        op.matrix *= Complex::new(0.5, 0.0);
        assert!(matches!(
            char_fn(&op, [0.1, 0.2]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn ladder_satisfies_the_commutator_below_the_truncation() {
        let (a, adag, number) = ladder(12).unwrap();
        let comm = &a * &adag - &adag * &a;
        for n in 0..12 {
            assert!((comm[(n, n)] - Complex::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((&number - adag * a).camax() < 1e-14);
    }
}
