//! Circuit construction: `MCRZ` decomposition, uniformly controlled
//! rotations, the regression circuits, and standalone state preparation.

mod gray;
mod regression;
mod state_prep;
mod uniform;

pub use gray::{gray_code, gray_sequence, walsh_angles, MAX_GRAY_BITS};
pub use regression::{
    build_regression_circuit, build_uc_naive, build_ud_naive, naive_gate_count_formula, BuildMode, DataTable,
    LayoutInfo, NaiveCountFormula, RegisterLayout, RegressionParams,
};
pub use state_prep::{build_state_prep, synthesize_reference_real_state, MAX_PREP_LEN};
pub use uniform::{decompose_all, decompose_mcrz, synthesize_uniform_z, MAX_MCRZ_CONTROLS};
