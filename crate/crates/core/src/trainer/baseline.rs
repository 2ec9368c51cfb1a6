use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::DataTable;

/// `1 − SS_res/SS_tot`. Negative when the prediction is worse than the mean.
pub fn r2_score(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    if y_true.len() != y_pred.len() || y_true.len() < 2 {
        return Err(Error::invalid(format!(
            "r2 needs two equal-length series of at least 2 values, got {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|y| (y - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(Error::invalid("r2 is undefined for a constant target"));
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// `ŷ_l = Σ_{m≥1} x_lm W_m`.
pub fn predict(table: &DataTable, weights: &[f64]) -> Result<Vec<f64>> {
    if weights.len() != table.features() {
        return Err(Error::invalid(format!("{} weights for {} features", weights.len(), table.features())));
    }
    Ok((0..table.rows()).map(|l| table.row(l)[1..].iter().zip(weights).map(|(x, w)| x * w).sum()).collect())
}

/// R² of `weights` on `table`.
pub fn r2_of(table: &DataTable, weights: &[f64]) -> Result<f64> {
    r2_score(&table.response(), &predict(table, weights)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresFit {
    pub weights: Vec<f64>,
    pub r2: f64,
    pub rank: usize,
}

/// Minimum-norm least squares of column 0 on the other columns, without an
/// intercept.
pub fn fit_classical_least_squares(table: &DataTable) -> Result<LeastSquaresFit> {
    let (l, m) = (table.rows(), table.features());
    let x = DMatrix::from_fn(l, m, |i, j| table.get(i, j + 1));
    let y = DVector::from_vec(table.response());
    let svd = x.svd(true, true);
    let tol = svd.singular_values.max() * (l.max(m) as f64) * f64::EPSILON;
    let rank = svd.rank(tol);
    if rank < m {
        warn!("feature matrix has rank {rank} < {m}; using the pseudo-inverse");
    }
    let w = svd.solve(&y, tol).map_err(|e| Error::invalid(e.to_string()))?;
    let weights: Vec<f64> = w.iter().copied().collect();
    let r2 = r2_of(table, &weights)?;
    Ok(LeastSquaresFit { weights, r2, rank })
}
