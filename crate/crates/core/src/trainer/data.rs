use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::DataTable;

/// Per-column mean and standard deviation fitted on one table and applied
/// to others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Population statistics of every column. Constant columns keep a unit
    /// divisor and are only centered.
    pub fn fit(table: &DataTable) -> Self {
        let n = table.rows() as f64;
        let mut means = Vec::with_capacity(table.cols());
        let mut stds = Vec::with_capacity(table.cols());
        for m in 0..table.cols() {
            let col = table.column(m);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd < 1e-12 {
                warn!("column {m} is constant; it is centered but not scaled");
            }
            means.push(mean);
            stds.push(if sd < 1e-12 { 1.0 } else { sd });
        }
        Standardizer { means, stds }
    }

    pub fn apply(&self, table: &DataTable) -> Result<DataTable> {
        if table.cols() != self.means.len() {
            return Err(Error::invalid(format!("standardizer has {} columns, table has {}", self.means.len(), table.cols())));
        }
        let values = table
            .values()
            .chunks(table.cols())
            .flat_map(|row| row.iter().enumerate().map(|(m, v)| (v - self.means[m]) / self.stds[m]))
            .collect();
        DataTable::new(table.rows(), table.cols(), values)
    }
}

/// Seeded shuffle of `0..n` cut into train and test index lists. The train
/// part has `round(n·fraction)` rows.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&train_fraction) || train_fraction.is_nan() {
        return Err(Error::invalid(format!("train fraction {train_fraction} outside [0, 1]")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (n as f64 * train_fraction).round() as usize;
    let test = idx.split_off(cut);
    Ok((idx, test))
}

/// Splits `table` and standardizes both parts with the train statistics.
pub fn split_and_standardize(table: &DataTable, train_fraction: f64, seed: u64) -> Result<(DataTable, DataTable)> {
    let (tr, te) = split_indices(table.rows(), train_fraction, seed)?;
    if tr.len() < 2 {
        return Err(Error::invalid(format!("train split has {} rows, need at least 2", tr.len())));
    }
    let train = table.select_rows(&tr)?;
    let st = Standardizer::fit(&train);
    let test = if te.is_empty() { train.clone() } else { table.select_rows(&te)? };
    Ok((st.apply(&train)?, st.apply(&test)?))
}

/// Consecutive row blocks of `batch_size`, each scaled to unit L2 norm. A
/// short final block is kept.
pub fn batches(table: &DataTable, batch_size: usize) -> Result<Vec<DataTable>> {
    if batch_size == 0 || batch_size > table.rows() {
        return Err(Error::invalid(format!("batch size {batch_size} must be in 1..={}", table.rows())));
    }
    (0..table.rows())
        .step_by(batch_size)
        .map(|start| {
            let idx: Vec<usize> = (start..(start + batch_size).min(table.rows())).collect();
            table.select_rows(&idx)?.normalized()
        })
        .collect()
}

/// Rows of `y = Σ w_m x_m + noise·ε` with standard-normal features and
/// noise; the response is column 0.
pub fn synthetic_linear(rows: usize, weights: &[f64], noise: f64, seed: u64) -> Result<DataTable> {
    if weights.is_empty() {
        return Err(Error::invalid("at least one weight is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(rows * (weights.len() + 1));
    for _ in 0..rows {
        let x: Vec<f64> = weights.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
        let eps: f64 = StandardNormal.sample(&mut rng);
        values.push(x.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>() + noise * eps);
        values.extend(x);
    }
    DataTable::new(rows, weights.len() + 1, values)
}
