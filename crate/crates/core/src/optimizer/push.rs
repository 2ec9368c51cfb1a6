//! Pauli-X and Hadamard pushing.

use std::f64::consts::PI;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

use super::report::{PassReport, Tally};

/// Moves every `X` to the end of the circuit.
///
/// `X` on a CNOT control spawns an `X` on its target, an `X` crossing an
/// `RZ` negates the angle, and pairs meeting on a wire cancel. An `X` that
/// reaches an `H` is emitted just before it. `MCRZ` must be decomposed first.
pub fn push_paulis(circuit: &Circuit) -> Result<(Circuit, PassReport)> {
    let width = circuit.width();
    let mut pending = vec![false; width];
    let mut out = Vec::with_capacity(circuit.len());
    let mut tally = Tally::default();
    for g in circuit.gates() {
        match g {
            Gate::X { qubit } => pending[*qubit] = !pending[*qubit],
            Gate::Cnot { control, target } => {
                if pending[*control] {
                    tally.bump("x copied through cnot control");
                }
                pending[*target] ^= pending[*control];
                out.push(g.clone());
            }
            Gate::Rz { qubit, angle } => {
                if pending[*qubit] {
                    tally.bump("rz negated");
                    out.push(Gate::rz(*qubit, -angle));
                } else {
                    out.push(g.clone());
                }
            }
            Gate::Rx { .. } => out.push(g.clone()),
            Gate::H { qubit } => {
                if pending[*qubit] {
                    tally.bump("x stopped at h");
                    out.push(Gate::x(*qubit));
                    pending[*qubit] = false;
                }
                out.push(g.clone());
            }
            Gate::Mcrz { .. } => {
                return Err(Error::UnsupportedGate { gate: "mcrz".into(), context: "pauli pushing (decompose first)" })
            }
        }
    }
    out.extend((0..width).filter(|&q| pending[q]).map(Gate::x));
    let result = Circuit::from_gates(width, out)?;
    tally.add("x removed", circuit.counts().x.saturating_sub(result.counts().x));
    let report = tally.finish("push_paulis", circuit, &result);
    Ok((result, report))
}

/// Moves every `H` towards the end of the circuit, cancelling pairs.
///
/// While an `H` is pending on a wire, `RZ` and `RX` swap, `X` becomes
/// `RZ(π)` and a CNOT whose both wires carry a pending `H` is reversed. A
/// gate touching only some pending wires forces those `H` out first.
/// Whatever is still pending at the end is emitted in ascending qubit order.
pub fn push_hadamards(circuit: &Circuit) -> Result<(Circuit, PassReport)> {
    let width = circuit.width();
    let mut pending = vec![false; width];
    let mut out = Vec::with_capacity(circuit.len());
    let mut tally = Tally::default();
    let flush = |q: usize, pending: &mut Vec<bool>, out: &mut Vec<Gate>, tally: &mut Tally| {
        if pending[q] {
            out.push(Gate::h(q));
            pending[q] = false;
            tally.bump("h blocked");
        }
    };
    for g in circuit.gates() {
        match g {
            Gate::H { qubit } => {
                if pending[*qubit] {
                    tally.bump("h pair cancelled");
                }
                pending[*qubit] = !pending[*qubit];
            }
            Gate::X { qubit } if pending[*qubit] => {
                tally.bump("x to rz(pi)");
                out.push(Gate::rz(*qubit, PI));
            }
            Gate::Rz { qubit, angle } if pending[*qubit] => {
                tally.bump("rz to rx");
                out.push(Gate::rx(*qubit, *angle));
            }
            Gate::Rx { qubit, angle } if pending[*qubit] => {
                tally.bump("rx to rz");
                out.push(Gate::rz(*qubit, *angle));
            }
            Gate::Cnot { control, target } => match (pending[*control], pending[*target]) {
                (true, true) => {
                    tally.bump("cnot reversed");
                    out.push(Gate::cnot(*target, *control));
                }
                (false, false) => out.push(g.clone()),
                _ => {
                    flush(*control, &mut pending, &mut out, &mut tally);
                    flush(*target, &mut pending, &mut out, &mut tally);
                    out.push(g.clone());
                }
            },
            Gate::Mcrz { .. } => {
                for q in g.qubits() {
                    flush(q, &mut pending, &mut out, &mut tally);
                }
                out.push(g.clone());
            }
            other => out.push(other.clone()),
        }
    }
    out.extend((0..width).filter(|&q| pending[q]).map(Gate::h));
    let result = Circuit::from_gates(width, out)?;
    let report = tally.finish("push_hadamards", circuit, &result);
    Ok((result, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::phase_distance;

    #[test]
    fn x_through_cnot_and_rz() {
        let c = Circuit::from_gates(2, [Gate::x(0), Gate::cnot(0, 1), Gate::rz(1, 0.4), Gate::cnot(0, 1)]).unwrap();
        let (out, report) = push_paulis(&c).unwrap();
        assert_eq!(out.gates(), &[Gate::cnot(0, 1), Gate::rz(1, -0.4), Gate::cnot(0, 1), Gate::x(0)]);
        assert_eq!(report.fired("rz negated"), 1);
        assert!(phase_distance(&c, &out).unwrap() <= 1e-12);
    }

    #[test]
    fn no_x_means_no_change() {
        let c = Circuit::from_gates(2, [Gate::h(0), Gate::cnot(0, 1), Gate::rz(1, 0.4), Gate::rx(0, 0.1)]).unwrap();
        assert_eq!(push_paulis(&c).unwrap().0, c);
    }

    #[test]
    fn x_stops_at_hadamard() {
        let c = Circuit::from_gates(1, [Gate::x(0), Gate::rz(0, 0.3), Gate::h(0), Gate::x(0)]).unwrap();
        let (out, _) = push_paulis(&c).unwrap();
        assert_eq!(out.gates(), &[Gate::rz(0, -0.3), Gate::x(0), Gate::h(0), Gate::x(0)]);
        assert!(phase_distance(&c, &out).unwrap() <= 1e-12);
    }

    #[test]
    fn mcrz_is_rejected() {
        let c = Circuit::from_gates(2, [Gate::mcrz(vec![0], 1, 0.2)]).unwrap();
        assert!(matches!(push_paulis(&c), Err(Error::UnsupportedGate { .. })));
    }

    #[test]
    fn hadamards_through_phase_gadget() {
        let c = Circuit::from_gates(
            2,
            [Gate::h(0), Gate::h(1), Gate::cnot(0, 1), Gate::rz(1, 0.7), Gate::cnot(0, 1)],
        )
        .unwrap();
        let (out, report) = push_hadamards(&c).unwrap();
        assert_eq!(
            out.gates(),
            &[Gate::cnot(1, 0), Gate::rx(1, 0.7), Gate::cnot(1, 0), Gate::h(0), Gate::h(1)]
        );
        assert_eq!(report.fired("cnot reversed"), 2);
        assert!(phase_distance(&c, &out).unwrap() <= 1e-12);
    }

    #[test]
    fn hadamard_pair_cancels() {
        let c = Circuit::from_gates(1, [Gate::h(0), Gate::h(0)]).unwrap();
        let (out, report) = push_hadamards(&c).unwrap();
        assert!(out.is_empty());
        assert_eq!(report.after.total(), 0);
    }

    #[test]
    fn partial_pending_is_flushed() {
        let c = Circuit::from_gates(
            3,
            [Gate::h(0), Gate::x(0), Gate::cnot(0, 1), Gate::mcrz(vec![1], 2, 0.3), Gate::h(2), Gate::rx(2, 0.2)],
        )
        .unwrap();
        let (out, _) = push_hadamards(&c).unwrap();
        assert!(phase_distance(&c, &out).unwrap() <= 1e-12);
    }
}
