//! Multi-controlled and uniformly controlled `RZ` as `{CNOT, RZ}` networks.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

use super::gray::{gray_sequence, walsh_angles};

pub const MAX_MCRZ_CONTROLS: usize = 12;

/// Gate list for `∏_j exp(−i(α_j/2) Z_t ⊗ |j⟩⟨j|)` where bit `b` of `j`
/// refers to `controls[b]`.
pub(crate) fn uniform_z_gates(controls: &[usize], target: usize, alphas: &[f64]) -> Result<Vec<Gate>> {
    let n = controls.len();
    if alphas.len() != 1 << n {
        return Err(Error::invalid(format!(
            "{} controls need {} angles, got {}",
            n,
            1usize << n,
            alphas.len()
        )));
    }
    if n == 0 {
        return Ok(vec![Gate::rz(target, alphas[0])]);
    }
    let angles = walsh_angles(alphas)?;
    let seq = gray_sequence(n)?;
    let mut gates = Vec::with_capacity(2 << n);
    for (angle, bit) in angles.into_iter().zip(seq) {
        gates.push(Gate::rz(target, angle));
        gates.push(Gate::cnot(controls[bit], target));
    }
    Ok(gates)
}

pub(crate) fn mcrz_gates(controls: &[usize], target: usize, angle: f64) -> Result<Vec<Gate>> {
    if controls.len() > MAX_MCRZ_CONTROLS {
        return Err(Error::Capacity { what: "mcrz controls", got: controls.len(), limit: MAX_MCRZ_CONTROLS });
    }
    let mut alphas = vec![0.0; 1 << controls.len()];
    *alphas.last_mut().expect("non-empty") = angle;
    uniform_z_gates(controls, target, &alphas)
}

/// Expands an `MCRZ` node into `2^n` rotations interleaved with `2^n`
/// CNOTs on its target.
///
/// ```
/// use vqreg::circuit::Gate;
/// use vqreg::synthesis::decompose_mcrz;
/// let c = decompose_mcrz(&Gate::mcrz(vec![0, 1, 2], 3, 0.8), 4).unwrap();
/// assert_eq!((c.counts().rz, c.counts().cnot), (8, 8));
/// ```
pub fn decompose_mcrz(gate: &Gate, width: usize) -> Result<Circuit> {
    gate.validate(width)?;
    match gate {
        Gate::Mcrz { controls, target, angle } => Circuit::from_gates(width, mcrz_gates(controls, *target, *angle)?),
        other => Err(Error::UnsupportedGate { gate: other.name().into(), context: "mcrz decomposition" }),
    }
}

/// Replaces every `MCRZ` in a circuit by its decomposition.
pub fn decompose_all(circuit: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(circuit.len());
    for g in circuit.gates() {
        match g {
            Gate::Mcrz { controls, target, angle } => gates.extend(mcrz_gates(controls, *target, *angle)?),
            other => gates.push(other.clone()),
        }
    }
    Circuit::from_gates(circuit.width(), gates)
}

/// Folded form of a uniformly controlled `RZ`: one rotation and one CNOT per
/// control value, angles from [`walsh_angles`].
pub fn synthesize_uniform_z(controls: &[usize], target: usize, alphas: &[f64], width: usize) -> Result<Circuit> {
    Circuit::from_gates(width, uniform_z_gates(controls, target, alphas)?)
}
