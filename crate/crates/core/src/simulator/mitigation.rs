//! Readout-error calibration and correction.

use std::collections::BTreeMap;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

use super::noise::NoiseModel;
use super::sampling::{sample, Counts};

/// Per-qubit column-stochastic confusion matrices, `m[read][true]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionSet {
    matrices: Vec<[[f64; 2]; 2]>,
}

fn from_rates(p10: f64, p01: f64) -> [[f64; 2]; 2] {
    [[1.0 - p10, p01], [p10, 1.0 - p01]]
}

impl ConfusionSet {
    pub fn identity(width: usize) -> Self {
        ConfusionSet { matrices: vec![from_rates(0.0, 0.0); width] }
    }

    /// The exact confusion implied by a noise model's readout rates.
    pub fn from_noise(noise: &NoiseModel, width: usize) -> Self {
        ConfusionSet {
            matrices: (0..width)
                .map(|q| {
                    let r = noise.readout_for(q);
                    from_rates(r.p10, r.p01)
                })
                .collect(),
        }
    }

    pub fn from_matrices(matrices: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        for (q, m) in matrices.iter().enumerate() {
            let ok = (0..2).all(|c| (m[0][c] + m[1][c] - 1.0).abs() < 1e-9 && m[0][c] >= 0.0 && m[1][c] >= 0.0);
            if !ok {
                return Err(Error::invalid(format!("confusion matrix for qubit {q} is not column-stochastic")));
            }
        }
        Ok(ConfusionSet { matrices })
    }

    pub fn width(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, qubit: usize) -> [[f64; 2]; 2] {
        self.matrices[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.matrices.iter().all(|m| *m == from_rates(0.0, 0.0))
    }

    fn entry(&self, read: usize, truth: usize) -> f64 {
        self.matrices.iter().enumerate().map(|(q, m)| m[read >> q & 1][truth >> q & 1]).product()
    }
}

/// Estimates readout confusion by sampling the all-zeros and all-ones
/// preparations under `noise`.
pub fn calibrate_readout(noise: &NoiseModel, width: usize, shots: u64, seed: u64) -> Result<ConfusionSet> {
    if shots < 1000 {
        return Err(Error::invalid(format!("calibration needs at least 1000 shots, got {shots}")));
    }
    let zeros = Circuit::new(width)?;
    let ones = Circuit::from_gates(width, (0..width).map(Gate::x))?;
    let c0 = sample(&zeros, shots, seed, Some(noise))?;
    let c1 = sample(&ones, shots, seed.wrapping_add(1), Some(noise))?;
    let n = shots as f64;
    let matrices = (0..width)
        .map(|q| {
            let p10 = c0.iter().filter(|(k, _)| k >> q & 1 == 1).map(|(_, v)| v).sum::<u64>() as f64 / n;
            let p01 = c1.iter().filter(|(k, _)| k >> q & 1 == 0).map(|(_, v)| v).sum::<u64>() as f64 / n;
            from_rates(p10, p01)
        })
        .collect();
    Ok(ConfusionSet { matrices })
}

/// Corrected probabilities keyed by basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiDistribution {
    pub width: usize,
    pub probs: BTreeMap<usize, f64>,
}

impl QuasiDistribution {
    pub fn get(&self, index: usize) -> f64 {
        self.probs.get(&index).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

const RESTRICTED_LIMIT: usize = 2048;
const FULL_INVERSE_WIDTH: usize = 16;

/// Undoes readout errors on observed counts.
///
/// The tensor-product confusion matrix is restricted to the observed
/// bitstrings, its columns renormalized, and the system solved for the
/// corrected distribution. If that system is singular (or too large), the
/// per-qubit inverses are applied to the full distribution instead.
/// Negative entries are clipped and the result renormalized. Identity
/// confusion returns the empirical frequencies unchanged.
pub fn mitigate_counts(counts: &Counts, confusion: &ConfusionSet) -> Result<QuasiDistribution> {
    if counts.is_empty() {
        return Err(Error::invalid("no counts to mitigate"));
    }
    if confusion.width() != counts.width() {
        return Err(Error::WidthMismatch(counts.width(), confusion.width()));
    }
    let width = counts.width();
    if confusion.is_identity() {
        return Ok(QuasiDistribution { width, probs: counts.frequencies() });
    }
    let freqs = counts.frequencies();
    let observed: Vec<usize> = freqs.keys().copied().collect();
    let restricted = (observed.len() <= RESTRICTED_LIMIT).then(|| solve_restricted(&observed, &freqs, confusion)).flatten();
    let raw: BTreeMap<usize, f64> = match restricted {
        Some(v) => observed.iter().copied().zip(v).collect(),
        None => {
            warn!("restricted readout system unusable; applying full per-qubit inverse");
            full_inverse(&freqs, confusion, width)?
        }
    };
    let clipped: BTreeMap<usize, f64> = raw.into_iter().map(|(k, v)| (k, v.max(0.0))).collect();
    let total: f64 = clipped.values().sum();
    if total <= 0.0 {
        return Err(Error::invalid("mitigated distribution has no positive mass"));
    }
    Ok(QuasiDistribution { width, probs: clipped.into_iter().map(|(k, v)| (k, v / total)).collect() })
}

fn solve_restricted(observed: &[usize], freqs: &BTreeMap<usize, f64>, confusion: &ConfusionSet) -> Option<Vec<f64>> {
    let n = observed.len();
    let mut a = DMatrix::from_fn(n, n, |i, j| confusion.entry(observed[i], observed[j]));
    for j in 0..n {
        let s: f64 = a.column(j).sum();
        if s <= 0.0 {
            return None;
        }
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let b = DVector::from_iterator(n, observed.iter().map(|k| freqs[k]));
    let x = a.lu().solve(&b)?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}

fn full_inverse(freqs: &BTreeMap<usize, f64>, confusion: &ConfusionSet, width: usize) -> Result<BTreeMap<usize, f64>> {
    if width > FULL_INVERSE_WIDTH {
        return Err(Error::Capacity { what: "full-inverse mitigation width", got: width, limit: FULL_INVERSE_WIDTH });
    }
    let mut v = vec![0.0; 1 << width];
    for (k, f) in freqs {
        v[*k] = *f;
    }
    for q in 0..width {
        let m = confusion.matrix(q);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-12 {
            return Err(Error::invalid(format!("confusion matrix for qubit {q} is singular")));
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        let bit = 1 << q;
        for i in 0..v.len() {
            if i & bit == 0 {
                let (a, b) = (v[i], v[i | bit]);
                v[i] = inv[0][0] * a + inv[0][1] * b;
                v[i | bit] = inv[1][0] * a + inv[1][1] * b;
            }
        }
    }
    Ok(v.into_iter().enumerate().filter(|(_, x)| *x != 0.0).collect())
}
