use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{loss_from_run, ConfusionSet, Estimator, NoiseModel, RunMode};
use crate::synthesis::{build_regression_circuit, BuildMode, DataTable, RegressionParams};

/// Threshold on `|cos φ_0|` below which weights are undefined.
pub const DEGENERATE_COS: f64 = 1e-9;

/// `W_m = −cos φ_m / cos φ_0` for `m = 1..=M`.
pub fn weights_from_phis(phis: &[f64]) -> Result<Vec<f64>> {
    let c0 = phis.first().ok_or_else(|| Error::invalid("no angles"))?.cos();
    if c0.abs() <= DEGENERATE_COS {
        return Err(Error::DegenerateParameterization(c0));
    }
    Ok(phis[1..].iter().map(|p| -p.cos() / c0).collect())
}

/// `Σ_l (Σ_m x_lm cos φ_m)²`, equal to
/// `cos²φ_0 · Σ_l (y_l − Σ_{m≥1} x_lm W_m)²` whenever the weights exist.
pub fn loss_closed_form(table: &DataTable, phis: &[f64]) -> Result<f64> {
    check_len(table, phis)?;
    let cos: Vec<f64> = phis.iter().map(|p| p.cos()).collect();
    Ok((0..table.rows())
        .map(|l| table.row(l).iter().zip(&cos).map(|(x, c)| x * c).sum::<f64>().powi(2))
        .sum())
}

fn check_len(table: &DataTable, phis: &[f64]) -> Result<()> {
    if phis.len() != table.cols() {
        return Err(Error::invalid(format!("{} angles for {} columns", phis.len(), table.cols())));
    }
    Ok(())
}

/// Anything that can score a table at given angles.
pub trait LossEvaluator {
    fn evaluate(&mut self, table: &DataTable, phis: &[f64]) -> Result<f64>;

    /// Loss evaluations performed so far.
    fn executions(&self) -> u64;

    /// Mean post-selection success probability since the last call, for
    /// evaluators that run circuits.
    fn take_success(&mut self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Default)]
pub struct ClosedFormEvaluator {
    executions: u64,
}

impl ClosedFormEvaluator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl LossEvaluator for ClosedFormEvaluator {
    fn evaluate(&mut self, table: &DataTable, phis: &[f64]) -> Result<f64> {
        self.executions += 1;
        loss_closed_form(table, phis)
    }

    fn executions(&self) -> u64 {
        self.executions
    }
}

#[derive(Debug, Default)]
struct SuccessTally {
    sum: f64,
    n: u64,
}

impl SuccessTally {
    fn add(&mut self, p: f64) {
        self.sum += p;
        self.n += 1;
    }

    fn take(&mut self) -> Option<f64> {
        let out = (self.n > 0).then(|| self.sum / self.n as f64);
        *self = SuccessTally::default();
        out
    }
}

/// Runs the optimized regression circuit on the statevector simulator.
#[derive(Debug, Default)]
pub struct ExactEvaluator {
    executions: u64,
    success: SuccessTally,
}

impl ExactEvaluator {
    pub fn new() -> Self {
        Self::default()
    }
}

impl LossEvaluator for ExactEvaluator {
    fn evaluate(&mut self, table: &DataTable, phis: &[f64]) -> Result<f64> {
        check_len(table, phis)?;
        let (c, layout) = build_regression_circuit(table, &RegressionParams::new(phis.to_vec())?, BuildMode::Optimized)?;
        self.executions += 1;
        let est = loss_from_run(&c, &layout, &RunMode::Exact, Estimator::XBasis)?;
        self.success.add(est.success_probability);
        Ok(est.loss)
    }

    fn executions(&self) -> u64 {
        self.executions
    }

    fn take_success(&mut self) -> Option<f64> {
        self.success.take()
    }
}

/// Samples the optimized regression circuit. Each evaluation draws a fresh
/// seed from a counter started at the configured seed.
#[derive(Debug)]
pub struct SampledEvaluator {
    pub shots: u64,
    pub noise: Option<NoiseModel>,
    pub mitigation: Option<ConfusionSet>,
    pub estimator: Estimator,
    seed: u64,
    executions: u64,
    success: SuccessTally,
}

impl SampledEvaluator {
    pub fn new(shots: u64, seed: u64, noise: Option<NoiseModel>, mitigation: Option<ConfusionSet>, estimator: Estimator) -> Self {
        SampledEvaluator { shots, noise, mitigation, estimator, seed, executions: 0, success: SuccessTally::default() }
    }
}

impl LossEvaluator for SampledEvaluator {
    fn evaluate(&mut self, table: &DataTable, phis: &[f64]) -> Result<f64> {
        check_len(table, phis)?;
        let (c, layout) = build_regression_circuit(table, &RegressionParams::new(phis.to_vec())?, BuildMode::Optimized)?;
        let seed = self.seed.wrapping_add(self.executions);
        self.executions += 1;
        let mode = RunMode::Sampled { shots: self.shots, seed, noise: self.noise.clone(), mitigation: self.mitigation.clone() };
        let est = loss_from_run(&c, &layout, &mode, self.estimator)?;
        self.success.add(est.success_probability);
        Ok(est.loss)
    }

    fn executions(&self) -> u64 {
        self.executions
    }

    fn take_success(&mut self) -> Option<f64> {
        self.success.take()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum GradientMode {
    /// Four shifted evaluations per angle; exact for the loss's
    /// frequency-2 dependence.
    #[default]
    #[serde(rename = "exact-shift")]
    ExactShift,
    /// `(L(φ+π/2) − L(φ−π/2))/2`, two evaluations per angle.
    #[serde(rename = "paper-2term")]
    PaperTwoTerm,
}

/// Shift rule gradient of the loss with respect to each angle.
pub fn gradient(table: &DataTable, phis: &[f64], evaluator: &mut dyn LossEvaluator, mode: GradientMode) -> Result<Vec<f64>> {
    check_len(table, phis)?;
    let rule: Vec<(f64, f64)> = match mode {
        GradientMode::PaperTwoTerm => vec![(PI / 2.0, 0.5), (-PI / 2.0, -0.5)],
        GradientMode::ExactShift => (1..=4)
            .map(|mu| {
                let x = (2 * mu - 1) as f64 * PI / 4.0;
                let sign = if mu % 2 == 1 { 1.0 } else { -1.0 };
                (x, sign / (8.0 * (x / 2.0).sin().powi(2)))
            })
            .collect(),
    };
    let mut grad = Vec::with_capacity(phis.len());
    let mut shifted = phis.to_vec();
    for j in 0..phis.len() {
        let mut g = 0.0;
        for &(shift, coeff) in &rule {
            shifted[j] = phis[j] + shift;
            g += coeff * evaluator.evaluate(table, &shifted)?;
        }
        shifted[j] = phis[j];
        grad.push(g);
    }
    Ok(grad)
}
