//! Statevector simulation, sampling with noise, readout mitigation, and the
//! loss estimators.

mod estimate;
mod mitigation;
mod noise;
mod sampling;
mod state;

pub use estimate::{
    expectation_mhat_counts, expectation_mhat_state, loss_from_run, median, shadow_estimate, Estimator, LossEstimate,
    RunMode, DEFAULT_SHADOW_BATCHES,
};
pub use mitigation::{calibrate_readout, mitigate_counts, ConfusionSet, QuasiDistribution};
pub use noise::{NoiseModel, ReadoutError, DEFAULT_P1, DEFAULT_P2, DEFAULT_READOUT};
pub use sampling::{bitstring, sample, Counts};
pub use state::{project, simulate, Statevector, DEGENERATE_PROBABILITY, MAX_SIM_WIDTH};
