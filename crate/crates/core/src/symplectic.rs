//! Symplectic linear algebra for systems of `s` canonical mode pairs.
//!
//! Coordinates are ordered `(q_1, p_1, ..., q_s, p_s)`. The standard form on
//! `s` modes is the block-diagonal matrix `Delta` built from `s` copies of
//!
//! ```text
//!     J = [ 0  -1 ]
//!         [ 1   0 ]
//! ```
//!
//! so the commutation relations read `[R z, R z'] = -i z^T Delta z'`. A real
//! matrix `T` mapping one coordinate space into another is symplectic when
//! `T^T Delta_in T = Delta_out`.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The standard antisymmetric form on a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    modes: usize,
    matrix: DMatrix<f64>,
}

impl SymplecticForm {
    /// Standard form on `modes` mode pairs.
    pub fn standard(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter(
                "mode count must be positive".into(),
            ));
        }
        let n = 2 * modes;
        let mut matrix = DMatrix::zeros(n, n);
        for j in 0..modes {
            matrix[(2 * j, 2 * j + 1)] = -1.0;
            matrix[(2 * j + 1, 2 * j)] = 1.0;
        }
        Ok(Self { modes, matrix })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// Checks `T^T Delta_in T = Delta_out` in max norm.
pub fn is_symplectic(
    t: &DMatrix<f64>,
    form_in: &SymplecticForm,
    form_out: &SymplecticForm,
    tol: f64,
) -> Result<bool> {
    if t.nrows() != form_in.dim() || t.ncols() != form_out.dim() {
        return Err(Error::Dimension(format!(
            "map is {}x{} but the forms expect {}x{}",
            t.nrows(),
            t.ncols(),
            form_in.dim(),
            form_out.dim()
        )));
    }
    let residual = (t.transpose() * form_in.matrix() * t - form_out.matrix()).amax();
    Ok(residual <= tol)
}

/// Result of factoring an antisymmetric matrix through the standard form.
#[derive(Debug, Clone)]
pub struct SkewFactorization {
    /// `F` with `F^T Delta F = A`.
    pub factor: DMatrix<f64>,
    /// Canonical block values `a_j > 0`, ascending; `A` is orthogonally
    /// equivalent to `blockdiag(a_j J)`.
    pub pair_values: Vec<f64>,
}

/// Factors a nondegenerate antisymmetric `A` as `F^T Delta F = A`.
///
/// `A` must be antisymmetric to `tol` (relative to its max entry) and
/// nondegenerate: smallest singular value above `tol` times the largest.
/// The factor is `D^{1/2} Q^T` from the orthogonal canonical reduction, and
/// the returned residual identity is re-checked against `10 * tol * |A|_max`.
pub fn skew_canonical_factor(a: &DMatrix<f64>, tol: f64) -> Result<SkewFactorization> {
    let n = square_even_dim(a)?;
    let scale = a.amax().max(1.0);
    let asym = (a + a.transpose()).amax();
    if asym > tol * scale {
        return Err(Error::NotAntisymmetric {
            residual: asym,
            bound: tol * scale,
        });
    }
    let work = (a - a.transpose()) * 0.5;
    let singular = work.clone().svd(false, false).singular_values;
    let sigma_max = singular.max();
    let sigma_min = singular.min();
    if !(sigma_min > tol * sigma_max) || sigma_max == 0.0 {
        return Err(Error::Singular {
            sigma_min,
            threshold: tol * sigma_max,
        });
    }

    let (q, pair_values) = orthogonal_canonical(&work)?;
    let mut factor = q.transpose();
    for (j, &aj) in pair_values.iter().enumerate() {
        let r = aj.sqrt();
        factor.row_mut(2 * j).scale_mut(r);
        factor.row_mut(2 * j + 1).scale_mut(r);
    }

    let form = SymplecticForm::standard(n / 2)?;
    let residual = (factor.transpose() * form.matrix() * &factor - a).amax();
    let bound = 10.0 * tol * scale;
    if residual > bound {
        return Err(Error::ResidualExceeded {
            identity: "F^T Delta F = A",
            residual,
            bound,
        });
    }
    Ok(SkewFactorization {
        factor,
        pair_values,
    })
}

/// Symplectic diagonalization of a positive definite matrix.
#[derive(Debug, Clone)]
pub struct Williamson {
    /// Symplectic `S` with `S^T diag(d_1, d_1, ..., d_s, d_s) S = alpha`.
    pub s: DMatrix<f64>,
    /// Symplectic eigenvalues, ascending.
    pub d: Vec<f64>,
}

/// Williamson decomposition of a symmetric positive definite `alpha`.
///
/// Built from the orthogonal canonical reduction of
/// `alpha^{1/2} Delta alpha^{1/2}`: with `Q^T (alpha^{1/2} Delta alpha^{1/2}) Q
/// = blockdiag(d_j J)` the matrix `S = D^{-1/2} Q^T alpha^{1/2}` is symplectic
/// and satisfies `S^T D S = alpha`. Both identities are re-checked against
/// `10 * tol * |alpha|_max`.
pub fn williamson(alpha: &DMatrix<f64>, tol: f64) -> Result<Williamson> {
    let n = square_even_dim(alpha)?;
    let scale = alpha.amax().max(1.0);
    let (sym, sqrt_alpha) = symmetric_sqrt(alpha, tol, scale)?;

    let form = SymplecticForm::standard(n / 2)?;
    let core = &sqrt_alpha * form.matrix() * &sqrt_alpha;
    let core = (&core - core.transpose()) * 0.5;
    let (q, d) = orthogonal_canonical(&core)?;

    let mut s = q.transpose() * &sqrt_alpha;
    for (j, &dj) in d.iter().enumerate() {
        let r = 1.0 / dj.sqrt();
        s.row_mut(2 * j).scale_mut(r);
        s.row_mut(2 * j + 1).scale_mut(r);
    }

    let bound = 10.0 * tol * scale;
    let dmat = pair_diagonal(&d);
    let round_trip = (s.transpose() * &dmat * &s - &sym).amax();
    if round_trip > bound {
        return Err(Error::ResidualExceeded {
            identity: "S^T D S = alpha",
            residual: round_trip,
            bound,
        });
    }
    let symplectic = (s.transpose() * form.matrix() * &s - form.matrix()).amax();
    if symplectic > bound {
        return Err(Error::ResidualExceeded {
            identity: "S^T Delta S = Delta",
            residual: symplectic,
            bound,
        });
    }
    Ok(Williamson { s, d })
}

/// Symplectic eigenvalues of a symmetric positive definite `alpha`,
/// ascending: the moduli of the (paired, purely imaginary) eigenvalues of
/// `Delta alpha`.
pub fn symplectic_eigenvalues(alpha: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = square_even_dim(alpha)?;
    let scale = alpha.amax().max(1.0);
    let (_, sqrt_alpha) = symmetric_sqrt(alpha, tol, scale)?;
    let form = SymplecticForm::standard(n / 2)?;
    let core = &sqrt_alpha * form.matrix() * &sqrt_alpha;
    let core = (&core - core.transpose()) * 0.5;
    let (_, d) = orthogonal_canonical(&core)?;
    Ok(d)
}

/// Deterministic random symplectic matrix: `exp(Delta H)` for a random
/// symmetric `H` whose spectrum is kept small, so conditioning stays modest
/// across dimensions.
pub fn random_symplectic(modes: usize, seed: u64) -> Result<DMatrix<f64>> {
    let form = SymplecticForm::standard(modes)?;
    let n = 2 * modes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 0.9 / (n as f64).sqrt();
    let mut h = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..=r {
            let v = rng.gen_range(-bound..bound);
            h[(r, c)] = v;
            h[(c, r)] = v;
        }
    }
    Ok((form.matrix() * h).exp())
}

/// Orthogonal reduction of a nondegenerate antisymmetric `A`: returns
/// `(Q, a)` with `Q` orthogonal, `a` ascending positive, and
/// `Q^T A Q = blockdiag(a_j J)`.
///
/// Eigenpairs of the Hermitian matrix `iA` come in `(+a, u)`, `(-a, conj u)`
/// pairs; the rescaled real and imaginary parts of `u` form the orthonormal
/// block basis. Real orthogonality across pairs holds because `conj(u_j)`
/// belongs to the eigenvalue `-a_j < 0 < a_k`, so it survives degeneracies
/// among the positive values.
fn orthogonal_canonical(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let n = a.nrows();
    let pairs = n / 2;
    let h = a.map(|x| Complex::new(0.0, x));
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    idx.sort_by(|&p, &q| eig.eigenvalues[p].partial_cmp(&eig.eigenvalues[q]).unwrap());
    if idx.len() != pairs {
        let near_zero = eig.eigenvalues.iter().fold(f64::MAX, |m, &e| m.min(e.abs()));
        return Err(Error::Singular {
            sigma_min: near_zero,
            threshold: 0.0,
        });
    }

    let sqrt2 = std::f64::consts::SQRT_2;
    let mut q = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(pairs);
    for (j, &k) in idx.iter().enumerate() {
        let u = eig.eigenvectors.column(k);
        for r in 0..n {
            q[(r, 2 * j)] = sqrt2 * u[r].re;
            q[(r, 2 * j + 1)] = sqrt2 * u[r].im;
        }
        values.push(eig.eigenvalues[k]);
    }
    Ok((q, values))
}

/// Symmetry-gates `alpha` and returns its symmetric part together with the
/// principal square root.
fn symmetric_sqrt(
    alpha: &DMatrix<f64>,
    tol: f64,
    scale: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let asym = (alpha - alpha.transpose()).amax();
    if asym > tol * scale {
        return Err(Error::NotSymmetric {
            residual: asym,
            bound: tol * scale,
        });
    }
    let sym = (alpha + alpha.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.max();
    let lambda_min = eig.eigenvalues.min();
    if !(lambda_min > tol * lambda_max.max(0.0)) {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: lambda_min,
        });
    }
    let mut scaled = eig.eigenvectors.clone();
    for j in 0..sym.nrows() {
        scaled.column_mut(j).scale_mut(eig.eigenvalues[j].sqrt());
    }
    let root = &scaled * eig.eigenvectors.transpose();
    let root = (&root + root.transpose()) * 0.5;
    Ok((sym, root))
}

pub(crate) fn square_even_dim(m: &DMatrix<f64>) -> Result<usize> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 || n % 2 != 0 {
        return Err(Error::Dimension(format!(
            "expected an even positive dimension, got {n}"
        )));
    }
    Ok(n)
}

/// `diag(d_1, d_1, ..., d_s, d_s)`.
pub(crate) fn pair_diagonal(d: &[f64]) -> DMatrix<f64> {
    let n = 2 * d.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &dj) in d.iter().enumerate() {
        m[(2 * j, 2 * j)] = dj;
        m[(2 * j + 1, 2 * j + 1)] = dj;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;

    fn assert_factor_residual(a: &DMatrix<f64>, f: &SkewFactorization) {
        let form = SymplecticForm::standard(a.nrows() / 2).unwrap();
        let residual = (f.factor.transpose() * form.matrix() * &f.factor - a).amax();
        assert!(
            residual <= 1e-9 * a.amax().max(1.0),
            "residual {residual:.3e}"
        );
    }

    #[test]
    fn standard_form_interleaves_mode_blocks() {
        let form = SymplecticForm::standard(2).unwrap();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        assert_eq!(form.matrix(), &expected);
        assert_eq!(form.modes(), 2);
        assert_eq!(form.dim(), 4);
    }

    #[test]
    fn standard_form_rejects_zero_modes() {
        assert!(SymplecticForm::standard(0).is_err());
    }

    #[test]
    fn identity_and_rotations_are_symplectic() {
        let form = SymplecticForm::standard(1).unwrap();
        let id = DMatrix::identity(2, 2);
        assert!(is_symplectic(&id, &form, &form, DEFAULT_TOL).unwrap());
        let rot = (form.matrix() * 0.7).exp();
        assert!(is_symplectic(&rot, &form, &form, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn uniform_scaling_is_not_symplectic() {
        let form = SymplecticForm::standard(1).unwrap();
        let t = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(!is_symplectic(&t, &form, &form, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn is_symplectic_rejects_mismatched_dimensions() {
        let f1 = SymplecticForm::standard(1).unwrap();
        let f2 = SymplecticForm::standard(2).unwrap();
        let t = DMatrix::identity(2, 2);
        assert!(is_symplectic(&t, &f1, &f2, DEFAULT_TOL).is_err());
    }

    #[test]
    fn skew_factor_of_the_standard_form_is_orthosymplectic() {
        let form = SymplecticForm::standard(1).unwrap();
        let fac = skew_canonical_factor(form.matrix(), DEFAULT_TOL).unwrap();
        assert_eq!(fac.pair_values.len(), 1);
        assert!((fac.pair_values[0] - 1.0).abs() < 1e-12);
        assert_factor_residual(form.matrix(), &fac);
        // With unit pair value the factor must be orthogonal.
        let residual = (fac.factor.transpose() * &fac.factor - DMatrix::identity(2, 2)).amax();
        assert!(residual < 1e-12);
    }

    #[test]
    fn skew_factor_orders_pair_values_ascending() {
        let form = SymplecticForm::standard(2).unwrap();
        let mut a = form.matrix().clone();
        a[(0, 1)] = -2.0;
        a[(1, 0)] = 2.0;
        a[(2, 3)] = -0.5;
        a[(3, 2)] = 0.5;
        let fac = skew_canonical_factor(&a, DEFAULT_TOL).unwrap();
        assert_eq!(fac.pair_values.len(), 2);
        assert!((fac.pair_values[0] - 0.5).abs() < 1e-12);
        assert!((fac.pair_values[1] - 2.0).abs() < 1e-12);
        assert_factor_residual(&a, &fac);
    }

    #[test]
    fn skew_factor_handles_reversed_orientation() {
        let form = SymplecticForm::standard(1).unwrap();
        let a = form.matrix() * -3.0;
        let fac = skew_canonical_factor(&a, DEFAULT_TOL).unwrap();
        assert!((fac.pair_values[0] - 3.0).abs() < 1e-12);
        assert_factor_residual(&a, &fac);
    }

    #[test]
    fn skew_factor_rejects_symmetric_and_singular_input() {
        let sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        assert!(matches!(
            skew_canonical_factor(&sym, DEFAULT_TOL),
            Err(Error::NotAntisymmetric { .. })
        ));
        let zero = DMatrix::zeros(2, 2);
        assert!(matches!(
            skew_canonical_factor(&zero, DEFAULT_TOL),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn williamson_of_scaled_identity_is_degenerate() {
        let alpha = DMatrix::from_diagonal_element(4, 4, 0.5);
        let w = williamson(&alpha, DEFAULT_TOL).unwrap();
        assert_eq!(w.d.len(), 2);
        for &d in &w.d {
            assert!((d - 0.5).abs() < 1e-12);
        }
        let form = SymplecticForm::standard(2).unwrap();
        assert!(is_symplectic(&w.s, &form, &form, 1e-10).unwrap());
    }

    #[test]
    fn williamson_diagonal_eigenvalue_is_geometric_mean() {
        let alpha = DMatrix::from_diagonal(&nalgebra::dvector![2.0, 0.5]);
        let w = williamson(&alpha, DEFAULT_TOL).unwrap();
        assert!((w.d[0] - 1.0).abs() < 1e-12);
        let round = (w.s.transpose() * pair_diagonal(&w.d) * &w.s - &alpha).amax();
        assert!(round < 1e-12);
    }

    #[test]
    fn williamson_two_mode_block_example() {
        let alpha = DMatrix::from_diagonal(&nalgebra::dvector![1.0, 1.0, 0.5, 0.5]);
        let w = williamson(&alpha, DEFAULT_TOL).unwrap();
        assert!((w.d[0] - 0.5).abs() < 1e-12);
        assert!((w.d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn williamson_rejects_non_positive_matrices() {
        let indefinite = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]);
        assert!(matches!(
            williamson(&indefinite, DEFAULT_TOL),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.3, 1.0]);
        assert!(matches!(
            williamson(&asym, DEFAULT_TOL),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn symplectic_eigenvalues_match_williamson() {
        let b = DMatrix::from_fn(4, 4, |r, c| ((r * 7 + c * 3) as f64).sin());
        let alpha = &b * b.transpose() + DMatrix::from_diagonal_element(4, 4, 1.0);
        let d1 = symplectic_eigenvalues(&alpha, DEFAULT_TOL).unwrap();
        let d2 = williamson(&alpha, DEFAULT_TOL).unwrap().d;
        for (a, b) in d1.iter().zip(&d2) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn random_symplectic_is_reproducible_and_symplectic() {
        for &modes in &[1usize, 2, 4] {
            let s1 = random_symplectic(modes, 7).unwrap();
            let s2 = random_symplectic(modes, 7).unwrap();
            assert_eq!(s1, s2);
            let other = random_symplectic(modes, 8).unwrap();
            assert!((&s1 - &other).amax() > 1e-6);
            let form = SymplecticForm::standard(modes).unwrap();
            assert!(is_symplectic(&s1, &form, &form, DEFAULT_TOL).unwrap());
            assert!((s1.determinant() - 1.0).abs() < 1e-9);
        }
    }
}
