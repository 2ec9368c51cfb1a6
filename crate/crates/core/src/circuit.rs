//! Gate-level circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over a fixed number of
//! qubits. Qubit indices are 0-based and basis states are little-endian:
//! qubit 0 is the least significant bit of a basis-state index.
//!
//! Rotations follow `RZ(θ) = exp(-iθZ/2)` and `RX(θ) = exp(-iθX/2)`.
//! `MCRZ` applies `RZ(θ)` to its target when every control is `|1⟩`; it is
//! kept as a first-class node so naive constructions can be counted before
//! and after decomposition.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single gate. Angles are radians and are never reduced modulo 2π here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    X { qubit: usize },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Rz { qubit: usize, angle: f64 },
    Rx { qubit: usize, angle: f64 },
    Mcrz { controls: Vec<usize>, target: usize, angle: f64 },
}

impl Gate {
    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }

    pub fn h(qubit: usize) -> Self {
        Gate::H { qubit }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle }
    }

    pub fn mcrz(controls: Vec<usize>, target: usize, angle: f64) -> Self {
        Gate::Mcrz { controls, target, angle }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::X { .. } => "x",
            Gate::H { .. } => "h",
            Gate::Cnot { .. } => "cnot",
            Gate::Rz { .. } => "rz",
            Gate::Rx { .. } => "rx",
            Gate::Mcrz { .. } => "mcrz",
        }
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { qubit } | Gate::H { qubit } | Gate::Rz { qubit, .. } | Gate::Rx { qubit, .. } => {
                vec![*qubit]
            }
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Mcrz { controls, target, .. } => {
                let mut q = controls.clone();
                q.push(*target);
                q
            }
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Rz { angle, .. } | Gate::Rx { angle, .. } | Gate::Mcrz { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    /// Checks the gate against a circuit width.
    pub fn validate(&self, width: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= width {
                return Err(Error::QubitOutOfRange { qubit: q, width });
            }
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidGate(format!("{} angle is not finite", self.name())));
            }
        }
        match self {
            Gate::Cnot { control, target } if control == target => Err(Error::InvalidGate(format!(
                "cnot control and target are both {control}"
            ))),
            Gate::Mcrz { controls, target, .. } => {
                let mut seen = controls.clone();
                seen.sort_unstable();
                if seen.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::InvalidGate("duplicate mcrz controls".into()));
                }
                if controls.contains(target) {
                    return Err(Error::InvalidGate("mcrz target is also a control".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X { qubit } => write!(f, "x q{qubit}"),
            Gate::H { qubit } => write!(f, "h q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "cnot q{control} -> q{target}"),
            Gate::Rz { qubit, angle } => write!(f, "rz({angle}) q{qubit}"),
            Gate::Rx { qubit, angle } => write!(f, "rx({angle}) q{qubit}"),
            Gate::Mcrz { controls, target, angle } => {
                write!(f, "mcrz({angle}) {controls:?} -> q{target}")
            }
        }
    }
}

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    X,
}

/// Keep only runs where `qubit`, measured in `basis`, gives `outcome`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostSelection {
    pub qubit: usize,
    pub basis: Basis,
    pub outcome: u8,
}

/// Ordered gate list over `width` qubits.
///
/// `annotations`, when present, holds one optional label per gate position
/// (parity labels written by [`crate::optimizer::annotate`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    width: usize,
    gates: Vec<Gate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    annotations: Vec<Option<String>>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid("circuit width must be at least 1"));
        }
        Ok(Circuit { width, gates: Vec::new(), annotations: Vec::new() })
    }

    /// Builds a circuit from a gate list, validating every gate.
    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(width)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn annotations(&self) -> &[Option<String>] {
        &self.annotations
    }

    /// Appends in place. Annotations are dropped because they no longer
    /// line up with the gate list.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.width)?;
        self.gates.push(gate);
        self.annotations.clear();
        Ok(())
    }

    /// Consumes the circuit and returns it with `gate` appended.
    pub fn append(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    /// Concatenates `other` after `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.width != self.width {
            return Err(Error::WidthMismatch(self.width, other.width));
        }
        self.gates.extend(other.gates.iter().cloned());
        self.annotations.clear();
        Ok(())
    }

    pub(crate) fn with_annotations(mut self, labels: Vec<Option<String>>) -> Self {
        debug_assert_eq!(labels.len(), self.gates.len());
        self.annotations = labels;
        self
    }

    pub fn counts(&self) -> CountReport {
        gate_counts(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    /// Parses and validates a circuit from its JSON form.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Circuit = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if !raw.annotations.is_empty() && raw.annotations.len() != raw.gates.len() {
            return Err(Error::Parse("annotation count does not match gate count".into()));
        }
        let annotations = raw.annotations.clone();
        let c = Circuit::from_gates(raw.width, raw.gates)?;
        Ok(if annotations.is_empty() { c } else { c.with_annotations(annotations) })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit[{} qubits, {} gates]", self.width, self.gates.len())?;
        for g in &self.gates {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

/// Per-kind gate tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub x: usize,
    pub h: usize,
    pub cnot: usize,
    pub rz: usize,
    pub rx: usize,
    pub mcrz: usize,
}

impl CountReport {
    pub fn total(&self) -> usize {
        self.x + self.h + self.cnot + self.rz + self.rx + self.mcrz
    }

    pub fn rotations(&self) -> usize {
        self.rz + self.rx
    }

    /// True when the circuit still holds multi-controlled gates, i.e. the
    /// total is not a count of elementary gates.
    pub fn has_non_elementary(&self) -> bool {
        self.mcrz > 0
    }
}

impl Add for CountReport {
    type Output = CountReport;

    fn add(self, o: CountReport) -> CountReport {
        CountReport {
            x: self.x + o.x,
            h: self.h + o.h,
            cnot: self.cnot + o.cnot,
            rz: self.rz + o.rz,
            rx: self.rx + o.rx,
            mcrz: self.mcrz + o.mcrz,
        }
    }
}

pub fn gate_counts(circuit: &Circuit) -> CountReport {
    let mut r = CountReport::default();
    for g in circuit.gates() {
        match g {
            Gate::X { .. } => r.x += 1,
            Gate::H { .. } => r.h += 1,
            Gate::Cnot { .. } => r.cnot += 1,
            Gate::Rz { .. } => r.rz += 1,
            Gate::Rx { .. } => r.rx += 1,
            Gate::Mcrz { .. } => r.mcrz += 1,
        }
    }
    r
}
