//! Loss evaluation, shift-rule gradients, optimizers, the least-squares
//! baseline, and the training loop.

mod baseline;
mod data;
mod fit;
mod loss;
mod optim;

pub use baseline::{fit_classical_least_squares, predict, r2_of, r2_score, LeastSquaresFit};
pub use data::{batches, split_and_standardize, split_indices, synthetic_linear, Standardizer};
pub use fit::{
    fit_quantum, initial_phis, EstimatorKind, EvaluatorKind, HistoryRow, OptimizerKind, TrainConfig, TrainedModel,
};
pub use loss::{
    gradient, loss_closed_form, weights_from_phis, ClosedFormEvaluator, ExactEvaluator, GradientMode, LossEvaluator,
    SampledEvaluator, DEGENERATE_COS,
};
pub use optim::{adam_step, nelder_mead_minimize, AdamConfig, AdamState, NelderMeadConfig, NelderMeadResult};
