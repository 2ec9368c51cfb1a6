use std::cell::RefCell;
use std::f64::consts::FRAC_PI_4;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::{calibrate_readout, Estimator, NoiseModel, DEFAULT_SHADOW_BATCHES};
use crate::synthesis::{DataTable, RegisterLayout};

use super::baseline::r2_of;
use super::data::batches;
use super::loss::{
    gradient, weights_from_phis, ClosedFormEvaluator, ExactEvaluator, GradientMode, LossEvaluator, SampledEvaluator,
};
use super::optim::{adam_step, nelder_mead_minimize, AdamConfig, AdamState, NelderMeadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    #[default]
    Adam,
    NelderMead,
}

/// Which loss oracle drives training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluatorKind {
    ClosedForm,
    Exact,
    #[default]
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    #[default]
    Xbasis,
    Shadow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub iterations: usize,
    pub batch_size: usize,
    pub evaluator: EvaluatorKind,
    pub shots: u64,
    pub gradient: GradientMode,
    pub estimator: EstimatorKind,
    pub shadow_batches: u64,
    pub noise: Option<NoiseModel>,
    pub mitigate: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: OptimizerKind::Adam,
            learning_rate: 0.01,
            iterations: 100,
            batch_size: 8,
            evaluator: EvaluatorKind::Sampled,
            shots: 20000,
            gradient: GradientMode::ExactShift,
            estimator: EstimatorKind::Xbasis,
            shadow_batches: DEFAULT_SHADOW_BATCHES,
            noise: None,
            mitigate: false,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, rows: usize) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::invalid(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 || self.batch_size > rows {
            return Err(Error::invalid(format!("batch size {} must be in 1..={rows}", self.batch_size)));
        }
        if self.evaluator == EvaluatorKind::Sampled && self.shots == 0 {
            return Err(Error::invalid("sampled evaluation needs at least one shot"));
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        Ok(())
    }

    fn estimator(&self) -> Estimator {
        match self.estimator {
            EstimatorKind::Xbasis => Estimator::XBasis,
            EstimatorKind::Shadow => Estimator::Shadow { batches: self.shadow_batches },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub loss: f64,
    pub train_r2: f64,
    pub test_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub initial_phis: Vec<f64>,
    pub phis: Vec<f64>,
    pub weights: Vec<f64>,
    pub history: Vec<HistoryRow>,
    /// Mean post-selection success probability per iteration (circuit
    /// evaluators only).
    pub success_probability: Vec<f64>,
    /// Iterations whose update was skipped after estimator starvation.
    pub skipped: usize,
    pub executions: u64,
}

/// Angles drawn uniformly from `[π/4 − 0.2, π/4 + 0.2]`.
pub fn initial_phis(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(FRAC_PI_4 - 0.2..=FRAC_PI_4 + 0.2)).collect()
}

fn r2_pair(train: &DataTable, test: &DataTable, phis: &[f64]) -> (f64, f64) {
    match weights_from_phis(phis) {
        Ok(w) => (r2_of(train, &w).unwrap_or(f64::NAN), r2_of(test, &w).unwrap_or(f64::NAN)),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

fn evaluator_for(config: &TrainConfig, train: &DataTable) -> Result<Box<dyn LossEvaluator>> {
    Ok(match config.evaluator {
        EvaluatorKind::ClosedForm => Box::new(ClosedFormEvaluator::new()),
        EvaluatorKind::Exact => Box::new(ExactEvaluator::new()),
        EvaluatorKind::Sampled => {
            let mitigation = match (&config.noise, config.mitigate) {
                (Some(noise), true) => {
                    let width = RegisterLayout::for_shape(config.batch_size, train.cols()).width();
                    Some(calibrate_readout(noise, width, config.shots.max(1000), config.seed ^ 0xCA11_B8A7)?)
                }
                _ => None,
            };
            Box::new(SampledEvaluator::new(config.shots, config.seed, config.noise.clone(), mitigation, config.estimator()))
        }
    })
}

fn mean_loss(eval: &mut dyn LossEvaluator, parts: &[DataTable], phis: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for b in parts {
        sum += eval.evaluate(b, phis)?;
    }
    Ok(sum / parts.len() as f64)
}

/// Trains the coefficient angles on `train`, reporting R² on both tables
/// after every iteration.
///
/// ADAM iterations average the per-batch gradients; Nelder-Mead minimizes
/// the mean batch loss. An iteration whose loss estimate is starved of
/// post-selected shots is skipped with a warning.
pub fn fit_quantum(train: &DataTable, test: &DataTable, config: &TrainConfig) -> Result<TrainedModel> {
    config.validate(train.rows())?;
    if test.cols() != train.cols() {
        return Err(Error::invalid(format!("test table has {} columns, train has {}", test.cols(), train.cols())));
    }
    let parts = batches(train, config.batch_size)?;
    let init = initial_phis(train.cols(), config.seed);
    let mut eval = evaluator_for(config, train)?;
    let mut history = Vec::with_capacity(config.iterations);
    let mut success = Vec::new();
    let mut skipped = 0;

    let phis = match config.optimizer {
        OptimizerKind::Adam => {
            let adam = AdamConfig { learning_rate: config.learning_rate, ..AdamConfig::default() };
            let mut state = AdamState::new(init.clone());
            for it in 1..=config.iterations {
                let step = (|| -> Result<(f64, Vec<f64>)> {
                    let mut grad = vec![0.0; state.params.len()];
                    let mut loss = 0.0;
                    for b in &parts {
                        loss += eval.evaluate(b, &state.params)?;
                        for (g, d) in grad.iter_mut().zip(gradient(b, &state.params, eval.as_mut(), config.gradient)?) {
                            *g += d;
                        }
                    }
                    let n = parts.len() as f64;
                    Ok((loss / n, grad.into_iter().map(|g| g / n).collect()))
                })();
                let loss = match step {
                    Ok((loss, grad)) => {
                        adam_step(&mut state, &grad, &adam)?;
                        loss
                    }
                    Err(Error::EstimatorStarved) => {
                        warn!("iteration {it}: estimator starved, update skipped");
                        skipped += 1;
                        f64::NAN
                    }
                    Err(e) => return Err(e),
                };
                if let Some(p) = eval.take_success() {
                    success.push(p);
                }
                let (train_r2, test_r2) = r2_pair(train, test, &state.params);
                history.push(HistoryRow { iteration: it, loss, train_r2, test_r2 });
            }
            state.params
        }
        OptimizerKind::NelderMead => {
            let nm = NelderMeadConfig { max_iterations: config.iterations, ..NelderMeadConfig::default() };
            let shared = RefCell::new(eval);
            let mut failure = None;
            let mut starved = 0;
            let result = nelder_mead_minimize(
                |x| match mean_loss(shared.borrow_mut().as_mut(), &parts, x) {
                    Ok(v) => v,
                    Err(Error::EstimatorStarved) => {
                        starved += 1;
                        f64::INFINITY
                    }
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
                &init,
                &nm,
                |it, best, value| {
                    if let Some(p) = shared.borrow_mut().take_success() {
                        success.push(p);
                    }
                    let (train_r2, test_r2) = r2_pair(train, test, best);
                    history.push(HistoryRow { iteration: it, loss: value, train_r2, test_r2 });
                },
            );
            eval = shared.into_inner();
            if let Some(e) = failure {
                return Err(e);
            }
            if starved > 0 {
                warn!("{starved} loss evaluations starved and were scored as infinite");
                skipped = starved;
            }
            // a converged simplex repeats its final row
            while history.len() < config.iterations {
                let last = history.last().copied().unwrap_or_else(|| {
                    let (train_r2, test_r2) = r2_pair(train, test, &result.best);
                    HistoryRow { iteration: 0, loss: result.value, train_r2, test_r2 }
                });
                history.push(HistoryRow { iteration: history.len() + 1, ..last });
            }
            result.best
        }
    };

    let weights = weights_from_phis(&phis)?;
    Ok(TrainedModel {
        initial_phis: init,
        phis,
        weights,
        history,
        success_probability: success,
        skipped,
        executions: eval.executions(),
    })
}
