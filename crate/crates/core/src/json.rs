//! Serialized form of states and channels.
//!
//! Matrices are row-major nested arrays. Mode counts are carried explicitly
//! and re-validated against the array shapes on the way in, so a mangled
//! document fails loudly instead of producing a misshapen object.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::GaussianChannel;
use crate::error::{Error, Result};
use crate::states::GaussianState;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub s: usize,
    pub l: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDoc {
    #[serde(rename = "s_A")]
    pub s_a: usize,
    #[serde(rename = "s_B")]
    pub s_b: usize,
    #[serde(rename = "K")]
    pub k: Vec<Vec<f64>>,
    pub l: Vec<f64>,
    pub mu: Vec<Vec<f64>>,
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>], nrows: usize, ncols: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nrows || rows.iter().any(|row| row.len() != ncols) {
        return Err(Error::Dimension(format!(
            "{name} must be {nrows}x{ncols}, got {} rows of lengths {:?}",
            rows.len(),
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

impl StateDoc {
    pub fn from_state(state: &GaussianState) -> Self {
        Self {
            s: state.modes(),
            l: state.mean.iter().copied().collect(),
            alpha: matrix_rows(&state.cov),
        }
    }

    pub fn to_state(&self) -> Result<GaussianState> {
        let n = 2 * self.s;
        if self.l.len() != n {
            return Err(Error::Dimension(format!(
                "l must have length {n}, got {}",
                self.l.len()
            )));
        }
        let cov = rows_to_matrix(&self.alpha, n, n, "alpha")?;
        GaussianState::new(DVector::from_column_slice(&self.l), cov)
    }
}

impl ChannelDoc {
    pub fn from_channel(channel: &GaussianChannel) -> Self {
        Self {
            s_a: channel.modes_in(),
            s_b: channel.modes_out(),
            k: matrix_rows(&channel.k),
            l: channel.l.iter().copied().collect(),
            mu: matrix_rows(&channel.mu),
        }
    }

    pub fn to_channel(&self) -> Result<GaussianChannel> {
        let (rows, cols) = (2 * self.s_a, 2 * self.s_b);
        if self.l.len() != cols {
            return Err(Error::Dimension(format!(
                "l must have length {cols}, got {}",
                self.l.len()
            )));
        }
        let k = rows_to_matrix(&self.k, rows, cols, "K")?;
        let mu = rows_to_matrix(&self.mu, cols, cols, "mu")?;
        GaussianChannel::new(self.s_a, self.s_b, k, DVector::from_column_slice(&self.l), mu)
    }
}
