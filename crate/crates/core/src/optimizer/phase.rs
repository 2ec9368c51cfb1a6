//! Phase-polynomial view of `{X, CNOT, RZ}` circuits.
//!
//! Such a circuit maps `|x⟩ ↦ e^{iP(x)} |Ax ⊕ b⟩` up to a global phase, with
//! `P(x) = Σ_y a_y·χ_y(x)` and `χ_y(x) = popcount(x & y) mod 2`. An `RZ(θ)`
//! on a wire holding `χ_y ⊕ c` adds `θ` to `a_y` when `c = 0` and `−θ` when
//! `c = 1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::synthesis::{gray_code, gray_sequence};

pub const MAX_PHASE_WIDTH: usize = 64;
pub const ZERO_COEFFICIENT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePolynomial {
    width: usize,
    terms: BTreeMap<u64, f64>,
    /// Row `t` lists the input bits whose parity ends up on wire `t`.
    rows: Vec<u64>,
    offset: u64,
}

impl PhasePolynomial {
    /// Polynomial with identity affine part.
    pub fn new(width: usize, terms: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        check_width(width)?;
        let mut map = BTreeMap::new();
        for (y, a) in terms {
            if y == 0 || (width < 64 && y >> width != 0) {
                return Err(Error::invalid(format!("parity mask {y:#b} is empty or exceeds width {width}")));
            }
            if !a.is_finite() {
                return Err(Error::invalid("coefficients must be finite"));
            }
            *map.entry(y).or_insert(0.0) += a;
        }
        map.retain(|_, a: &mut f64| a.abs() > ZERO_COEFFICIENT);
        Ok(PhasePolynomial { width, terms: map, rows: (0..width).map(|q| 1 << q).collect(), offset: 0 })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &BTreeMap<u64, f64> {
        &self.terms
    }

    pub fn coefficient(&self, y: u64) -> f64 {
        self.terms.get(&y).copied().unwrap_or(0.0)
    }

    pub fn affine_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn is_affine_identity(&self) -> bool {
        self.offset == 0 && self.rows.iter().enumerate().all(|(q, r)| *r == 1 << q)
    }

    /// `P(x)` in radians.
    pub fn evaluate(&self, x: u64) -> f64 {
        self.terms.iter().filter(|(y, _)| (*y & x).count_ones() % 2 == 1).map(|(_, a)| a).sum()
    }

    /// `Ax ⊕ b`.
    pub fn output(&self, x: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (t, r)| acc | (((r & x).count_ones() as u64) & 1) << t)
            ^ self.offset
    }
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_PHASE_WIDTH {
        return Err(Error::Capacity { what: "phase polynomial width", got: width, limit: MAX_PHASE_WIDTH });
    }
    Ok(())
}

/// Everything folding needs from one pass over a gate run.
pub(crate) struct Trace {
    pub rows: Vec<u64>,
    pub offset: u64,
    /// Raw per-parity sums, zeros kept, in circuit order of accumulation.
    pub sums: HashMap<u64, f64>,
    /// `(parity, complemented)` seen by each gate that is an `RZ`.
    pub seen: Vec<Option<(u64, bool)>>,
    /// CNOT sources feeding each wire.
    pub fan_in: Vec<BTreeSet<usize>>,
}

pub(crate) fn trace(gates: &[Gate], width: usize) -> Result<Trace> {
    check_width(width)?;
    let mut rows: Vec<u64> = (0..width).map(|q| 1 << q).collect();
    let mut offset = 0u64;
    let mut sums = HashMap::new();
    let mut seen = Vec::with_capacity(gates.len());
    let mut fan_in = vec![BTreeSet::new(); width];
    for g in gates {
        let mut hit = None;
        match g {
            Gate::X { qubit } => offset ^= 1 << qubit,
            Gate::Cnot { control, target } => {
                rows[*target] ^= rows[*control];
                offset ^= (offset >> control & 1) << target;
                fan_in[*target].insert(*control);
            }
            Gate::Rz { qubit, angle } => {
                let y = rows[*qubit];
                let flipped = offset >> qubit & 1 == 1;
                *sums.entry(y).or_insert(0.0) += if flipped { -angle } else { *angle };
                hit = Some((y, flipped));
            }
            other => {
                return Err(Error::UnsupportedGate { gate: other.name().into(), context: "phase polynomial extraction" })
            }
        }
        seen.push(hit);
    }
    Ok(Trace { rows, offset, sums, seen, fan_in })
}

/// Reads off `(P, A, b)`. Coefficients with magnitude at most `1e-12` are
/// dropped.
pub fn extract_phase_polynomial(circuit: &Circuit) -> Result<PhasePolynomial> {
    let t = trace(circuit.gates(), circuit.width())?;
    let terms = t.sums.into_iter().filter(|(_, a)| a.abs() > ZERO_COEFFICIENT).collect();
    Ok(PhasePolynomial { width: circuit.width(), terms, rows: t.rows, offset: t.offset })
}

/// Gray walk over `controls` on wire `pivot`: rotation `i` lands on parity
/// `pivot ⊕ g(i)` and is followed by the CNOT from `gray_sequence`.
pub(crate) fn gray_walk(
    pivot: usize,
    controls: &[usize],
    coefficient: impl Fn(u64) -> Option<f64>,
    keep_zeros: bool,
    out: &mut Vec<Gate>,
) -> Result<()> {
    let emit = |y: u64, out: &mut Vec<Gate>| match coefficient(y) {
        Some(a) => out.push(Gate::rz(pivot, a)),
        None if keep_zeros => out.push(Gate::rz(pivot, 0.0)),
        None => {}
    };
    if controls.is_empty() {
        emit(1 << pivot, out);
        return Ok(());
    }
    let seq = gray_sequence(controls.len())?;
    for (i, bit) in seq.into_iter().enumerate() {
        let g = gray_code(i);
        let y = controls.iter().enumerate().filter(|(b, _)| g >> b & 1 == 1).fold(1u64 << pivot, |m, (_, &c)| m | 1 << c);
        emit(y, out);
        out.push(Gate::cnot(controls[bit], pivot));
    }
    Ok(())
}

pub(crate) fn pivot_of(y: u64) -> usize {
    63 - y.leading_zeros() as usize
}

/// Builds a `{CNOT, RZ}` circuit for a polynomial with identity affine
/// part: terms are grouped by their highest qubit, and each group is a
/// Gray walk over the lower qubits its terms mention. Groups run in
/// ascending pivot order, so every walk reads control wires that are back
/// in their original state.
///
/// ```
/// use vqreg::optimizer::{extract_phase_polynomial, resynthesize, PhasePolynomial};
/// let p = PhasePolynomial::new(2, [(0b10, 0.9), (0b11, -0.3)])?;
/// let c = resynthesize(&p)?;
/// assert_eq!((c.counts().rz, c.counts().cnot), (2, 2));
/// assert_eq!(extract_phase_polynomial(&c)?, p);
/// # Ok::<(), vqreg::Error>(())
/// ```
pub fn resynthesize(poly: &PhasePolynomial) -> Result<Circuit> {
    if !poly.is_affine_identity() {
        return Err(Error::NonIdentityAffine);
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for y in poly.terms.keys() {
        let p = pivot_of(*y);
        let entry = groups.entry(p).or_default();
        entry.extend((0..p).filter(|b| y >> b & 1 == 1));
    }
    let mut gates = Vec::new();
    for (pivot, controls) in groups {
        let controls: Vec<usize> = controls.into_iter().collect();
        gray_walk(pivot, &controls, |y| poly.terms.get(&y).copied(), false, &mut gates)?;
    }
    Circuit::from_gates(poly.width.max(1), gates)
}

fn parity_label(y: u64, flipped: bool) -> String {
    let body: Vec<String> = (0..64).filter(|b| y >> b & 1 == 1).map(|b| format!("x{b}")).collect();
    let body = body.join("⊕");
    if flipped {
        format!("1⊕{body}")
    } else {
        body
    }
}

/// Labels every gate with the parity its target wire holds afterwards.
pub fn annotate(circuit: &Circuit) -> Result<Circuit> {
    check_width(circuit.width())?;
    let mut rows: Vec<u64> = (0..circuit.width()).map(|q| 1 << q).collect();
    let mut offset = 0u64;
    let mut labels = Vec::with_capacity(circuit.len());
    for g in circuit.gates() {
        let wire = match g {
            Gate::X { qubit } => {
                offset ^= 1 << qubit;
                *qubit
            }
            Gate::Cnot { control, target } => {
                rows[*target] ^= rows[*control];
                offset ^= (offset >> control & 1) << target;
                *target
            }
            Gate::Rz { qubit, .. } => *qubit,
            other => {
                return Err(Error::UnsupportedGate { gate: other.name().into(), context: "parity annotation" })
            }
        };
        labels.push(Some(parity_label(rows[wire], offset >> wire & 1 == 1)));
    }
    Ok(circuit.clone().with_annotations(labels))
}
