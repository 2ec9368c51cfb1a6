//! Rewrite passes: Pauli pushing, phase folding and Hadamard pushing.
//!
//! Every pass takes a circuit by reference and returns a new one together
//! with a [`PassReport`]. All passes preserve the unitary up to a global
//! phase.

mod fold;
mod phase;
mod push;
mod report;

pub use fold::fold_phases;
pub use phase::{annotate, extract_phase_polynomial, resynthesize, PhasePolynomial, MAX_PHASE_WIDTH, ZERO_COEFFICIENT};
pub use push::{push_hadamards, push_paulis};
pub use report::{PassReport, Rewrite};

use crate::circuit::Circuit;
use crate::error::Result;
use crate::synthesis::decompose_all;

use report::Tally;

/// Decomposes every `MCRZ`, pushes `X` gates to the end, folds each
/// `{X, CNOT, RZ}` run, then pushes Hadamards through.
///
/// On a naive regression circuit the result is gate-for-gate the circuit
/// [`crate::synthesis::build_regression_circuit`] emits in optimized mode.
pub fn optimize_pipeline(circuit: &Circuit) -> Result<(Circuit, PassReport)> {
    let decomposed = decompose_all(circuit)?;
    let (pushed, r1) = push_paulis(&decomposed)?;
    let (folded, r2) = fold_phases(&pushed)?;
    let (out, r3) = push_hadamards(&folded)?;
    let mut tally = Tally::default();
    tally.add("decompose: mcrz expanded", circuit.counts().mcrz);
    tally.absorb("push_paulis", &r1);
    tally.absorb("fold_phases", &r2);
    tally.absorb("push_hadamards", &r3);
    Ok((out.clone(), tally.finish("pipeline", circuit, &out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::synthesis::{build_regression_circuit, BuildMode, DataTable, RegressionParams};

    #[test]
    fn empty_circuit_stays_empty() {
        let c = Circuit::new(3).unwrap();
        let (out, report) = optimize_pipeline(&c).unwrap();
        assert!(out.is_empty());
        assert_eq!(report.after.total(), 0);
    }

    #[test]
    fn naive_regression_becomes_direct_form() {
        let table = DataTable::from_rows(&[vec![0.3, -0.2], vec![0.5, 0.1]]).unwrap().normalized().unwrap();
        let params = RegressionParams::new(vec![0.4, 1.2]).unwrap();
        let (naive, _) = build_regression_circuit(&table, &params, BuildMode::Naive).unwrap();
        let (direct, _) = build_regression_circuit(&table, &params, BuildMode::Optimized).unwrap();
        let (out, report) = optimize_pipeline(&naive).unwrap();
        assert_eq!(out, direct);
        assert_eq!(report.after, direct.counts());
        assert!(out.gates().iter().all(|g| matches!(g, Gate::Rx { .. } | Gate::Cnot { .. })));
    }
}
