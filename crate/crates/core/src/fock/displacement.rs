//! Matrix elements of Weyl displacement operators in the number basis.
//!
//! For `z = (x, y)` let `xi = (-y + i x)/sqrt(2)` and `t = |xi|^2`, so that
//! `W(z) = exp(i (x q + y p)) = exp(xi a^dag - conj(xi) a)`. The closed-form
//! elements are
//!
//! ```text
//!     <n+k| W(z) |n> = sqrt(n!/(n+k)!) xi^k        e^{-t/2} L_n^{(k)}(t)
//!     <n| W(z) |n+k> = sqrt(n!/(n+k)!) (-conj xi)^k e^{-t/2} L_n^{(k)}(t)
//! ```
//!
//! with generalized Laguerre polynomials `L_n^{(k)}`. The factorial ratios
//! are cached per table and the Laguerre values come from the three-term
//! recurrence, band by band, so evaluating all elements at one `z` costs
//! `O(dim^2)` flops with no factorials ever materialized. Since
//! `xi(-z) = -xi(z)` at the same `t`, the elements of `W(-z)` reuse the same
//! band data with a parity sign; the pair-accumulation entry point exploits
//! that, which matters because every quadrature here sums symmetric grids.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub struct DisplacementTable {
    dim: usize,
    /// `ratio[k][n] = sqrt(n!/(n+k)!)`, stored for `n < dim - k`.
    ratio: Vec<Vec<f64>>,
    /// Scratch for one Laguerre band.
    lag: Vec<f64>,
}

fn xi(z: [f64; 2]) -> Complex<f64> {
    Complex::new(-z[1], z[0]) / 2f64.sqrt()
}

impl DisplacementTable {
    pub fn new(n_max: usize) -> Self {
        let dim = n_max + 1;
        let mut ratio = Vec::with_capacity(dim);
        ratio.push(vec![1.0; dim]);
        for k in 1..dim {
            let prev = &ratio[k - 1];
            let row: Vec<f64> = (0..dim - k)
                .map(|n| prev[n] / ((n + k) as f64).sqrt())
                .collect();
            ratio.push(row);
        }
        Self {
            dim,
            ratio,
            lag: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fills `self.lag[0..len]` with `L_n^{(k)}(t)` for `n < len`.
    fn band(&mut self, k: usize, t: f64) {
        let len = self.dim - k;
        self.lag[0] = 1.0;
        if len > 1 {
            self.lag[1] = 1.0 + k as f64 - t;
        }
        for n in 2..len {
            let nf = n as f64;
            let kf = k as f64;
            self.lag[n] = ((2.0 * nf - 1.0 + kf - t) * self.lag[n - 1]
                - (nf - 1.0 + kf) * self.lag[n - 2])
                / nf;
        }
    }

    /// Dense `W(z)` on the truncated space.
    pub fn matrix(&mut self, z: [f64; 2]) -> DMatrix<Complex<f64>> {
        let xi = xi(z);
        let t = xi.norm_sqr();
        let g = (-0.5 * t).exp();
        let mut out = DMatrix::zeros(self.dim, self.dim);
        let mut pw = Complex::new(1.0, 0.0);
        for k in 0..self.dim {
            self.band(k, t);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let lower = pw * g;
            let upper = pw.conj() * (sign * g);
            for n in 0..self.dim - k {
                let v = self.ratio[k][n] * self.lag[n];
                out[(n + k, n)] = lower * v;
                if k > 0 {
                    out[(n, n + k)] = upper * v;
                }
            }
            pw *= xi;
        }
        out
    }

    /// `Tr(rho W(z))` without materializing `W(z)`.
    pub fn trace_against(&mut self, rho: &DMatrix<Complex<f64>>, z: [f64; 2]) -> Result<Complex<f64>> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "operator is {}x{}, table dimension is {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        let xi = xi(z);
        let t = xi.norm_sqr();
        let g = (-0.5 * t).exp();
        let data = rho.as_slice();
        let dim = self.dim;
        let mut total = Complex::new(0.0, 0.0);
        let mut pw = Complex::new(1.0, 0.0);
        for k in 0..dim {
            self.band(k, t);
            // W[(n+k, n)] pairs with rho[(n, n+k)]; W[(n, n+k)] with
            // rho[(n+k, n)]. Column-major layout: (r, c) -> c * dim + r.
            let mut s_lower = Complex::new(0.0, 0.0);
            let mut s_upper = Complex::new(0.0, 0.0);
            for n in 0..dim - k {
                let v = self.ratio[k][n] * self.lag[n];
                s_lower += data[(n + k) * dim + n] * v;
                if k > 0 {
                    s_upper += data[n * dim + n + k] * v;
                }
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += s_lower * (pw * g);
            if k > 0 {
                total += s_upper * (pw.conj() * (sign * g));
            }
            pw *= xi;
        }
        Ok(total)
    }

    /// `Tr(rho W(z))` for diagonal `rho` with the given populations; only
    /// the `k = 0` band contributes.
    pub fn trace_against_diagonal(&mut self, populations: &[f64], z: [f64; 2]) -> Result<Complex<f64>> {
        if populations.len() != self.dim {
            return Err(Error::Dimension(format!(
                "{} populations, table dimension is {}",
                populations.len(),
                self.dim
            )));
        }
        let t = xi(z).norm_sqr();
        let g = (-0.5 * t).exp();
        self.band(0, t);
        let mut total = 0.0;
        for n in 0..self.dim {
            total += populations[n] * self.lag[n];
        }
        Ok(Complex::new(total * g, 0.0))
    }

    /// Adds `c_plus W(z) + c_minus W(-z)` into `into`, sharing one band
    /// evaluation between the pair.
    pub fn accumulate_pair(
        &mut self,
        z: [f64; 2],
        c_plus: Complex<f64>,
        c_minus: Complex<f64>,
        into: &mut DMatrix<Complex<f64>>,
    ) -> Result<()> {
        if into.nrows() != self.dim || into.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "accumulator is {}x{}, table dimension is {}",
                into.nrows(),
                into.ncols(),
                self.dim
            )));
        }
        let xi = xi(z);
        let t = xi.norm_sqr();
        let g = (-0.5 * t).exp();
        let dim = self.dim;
        let data = into.as_mut_slice();
        let mut pw = Complex::new(1.0, 0.0);
        for k in 0..dim {
            self.band(k, t);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            // xi(-z) = -xi(z), so W(-z) carries (-1)^k on the lower band and
            // loses it on the upper one.
            let lower = (c_plus + c_minus * sign) * pw * g;
            let upper = (c_plus * sign + c_minus) * pw.conj() * g;
            for n in 0..dim - k {
                let v = self.ratio[k][n] * self.lag[n];
                data[n * dim + n + k] += lower * v;
                if k > 0 {
                    data[(n + k) * dim + n] += upper * v;
                }
            }
            pw *= xi;
        }
        Ok(())
    }
}

/// `W(z)` built independently of the table: exponentiate the Hermitian
/// generator `x q + y p` by eigendecomposition. Exactly unitary on the
/// truncated space, which makes it the natural cross-check for the
/// closed-form elements.
pub fn weyl(z: [f64; 2], n_max: usize) -> Result<DMatrix<Complex<f64>>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter(
            "n_max must be at least 1".into(),
        ));
    }
    let (a, adag, _) = super::ladder(n_max)?;
    let root = Complex::new(2f64.sqrt(), 0.0);
    let q = (&a + &adag) / root;
    let p = (&adag - &a) * Complex::new(0.0, 1.0) / root;
    let gen = q * Complex::new(z[0], 0.0) + p * Complex::new(z[1], 0.0);
    let eig = gen.symmetric_eigen();
    let phases = nalgebra::DVector::from_iterator(
        n_max + 1,
        eig.eigenvalues.iter().map(|&l| Complex::new(0.0, l).exp()),
    );
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn toy_density(dim: usize) -> DMatrix<Complex<f64>> {
        let v = DVector::from_fn(dim, |n, _| {
            Complex::new((0.3 * n as f64).cos(), (0.17 * n as f64).sin()) / (1.0 + n as f64)
        });
        let norm = v.norm();
        let v = v / Complex::new(norm, 0.0);
        &v * v.adjoint()
    }

    #[test]
    fn zero_displacement_is_the_identity() {
        let mut table = DisplacementTable::new(8);
        let w = table.matrix([0.0, 0.0]);
        assert!((w - DMatrix::identity(9, 9)).camax() < 1e-15);
    }

    #[test]
    fn reflection_is_the_adjoint() {
        let mut table = DisplacementTable::new(14);
        let z = [0.8, -1.1];
        let w = table.matrix(z);
        let w_neg = table.matrix([-z[0], -z[1]]);
        assert!((w_neg - w.adjoint()).camax() < 1e-14);
    }

    #[test]
    fn trace_against_matches_dense_contraction() {
        let mut table = DisplacementTable::new(12);
        let rho = toy_density(13);
        let z = [0.6, 0.9];
        let dense = (&rho * table.matrix(z)).trace();
        let streamed = table.trace_against(&rho, z).unwrap();
        assert!((dense - streamed).norm() < 1e-13);
    }

    #[test]
    fn diagonal_trace_matches_general_trace() {
        let mut table = DisplacementTable::new(12);
        let p: Vec<f64> = (0..13).map(|n| 0.5f64.powi(n + 1)).collect();
        let rho = DMatrix::from_fn(13, 13, |r, c| {
            if r == c {
                Complex::new(p[r], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let z = [-0.4, 1.3];
        let a = table.trace_against(&rho, z).unwrap();
        let b = table.trace_against_diagonal(&p, z).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn accumulate_pair_matches_explicit_sum() {
        let mut table = DisplacementTable::new(10);
        let z = [1.2, 0.5];
        let c_plus = Complex::new(0.3, -0.7);
        let c_minus = Complex::new(-0.2, 0.4);
        let mut acc = DMatrix::zeros(11, 11);
        table.accumulate_pair(z, c_plus, c_minus, &mut acc).unwrap();
        let direct = table.matrix(z) * c_plus + table.matrix([-z[0], -z[1]]) * c_minus;
        assert!((acc - direct).camax() < 1e-13);
    }

    #[test]
    fn generator_exponential_agrees_with_the_closed_form() {
        let mut table = DisplacementTable::new(25);
        for z in [[0.5, 0.0], [0.0, -0.8], [1.0, 1.0]] {
            let w = weyl(z, 25).unwrap();
            let reference = table.matrix(z);
            let mut dev = 0.0f64;
            for r in 0..8 {
                for c in 0..8 {
                    dev = dev.max((w[(r, c)] - reference[(r, c)]).norm());
                }
            }
            assert!(dev < 1e-10, "z = {z:?}: dev {dev:.3e}");
        }
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let mut table = DisplacementTable::new(5);
        let rho = DMatrix::zeros(4, 4);
        assert!(table.trace_against(&rho, [0.1, 0.1]).is_err());
        assert!(table.trace_against_diagonal(&[1.0; 4], [0.1, 0.1]).is_err());
        let mut acc = DMatrix::zeros(4, 4);
        assert!(table
            .accumulate_pair([0.1, 0.1], Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), &mut acc)
            .is_err());
    }
}
