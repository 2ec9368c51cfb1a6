//! Brute-force unitary oracle.
//!
//! Every gate is expanded to its sparse `2^n × 2^n` matrix by an explicit
//! per-entry formula and multiplied onto the running product. This path
//! shares no code with the statevector simulator so the two can check each
//! other.

use num_complex::Complex64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Widest circuit the oracle accepts.
pub const MAX_ORACLE_WIDTH: usize = 10;

/// Dense complex matrix, row-major, little-endian basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        UnitaryMatrix { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// `min_c ‖self − c·other‖_max` with the unit scalar `c` taken from the
    /// ratio at the largest-magnitude entry of `other`.
    pub fn distance_up_to_phase(&self, other: &UnitaryMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let (idx, _) = other
            .data
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
        let ratio = self.data[idx] / other.data[idx];
        let c = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { Complex64::new(1.0, 0.0) };
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - c * b).norm())
            .fold(0.0, f64::max)
    }

    /// Left-multiplies by a sparse matrix given as `(row, col, value)` triples.
    fn left_mul_sparse(&mut self, entries: &[(usize, usize, Complex64)]) {
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for &(r, k, v) in entries {
            let src = &self.data[k * n..(k + 1) * n];
            let dst = &mut out[r * n..(r + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
        self.data = out;
    }
}

fn bit(index: usize, q: usize) -> usize {
    (index >> q) & 1
}

/// Nonzero entries `⟨row|G|col⟩` of one gate on `width` qubits.
fn gate_entries(gate: &Gate, width: usize) -> Vec<(usize, usize, Complex64)> {
    let dim = 1usize << width;
    let one = Complex64::new(1.0, 0.0);
    let mut e = Vec::with_capacity(2 * dim);
    let rz_phase = |angle: f64, b: usize| {
        let s = if b == 0 { -0.5 } else { 0.5 };
        Complex64::from_polar(1.0, s * angle)
    };
    for col in 0..dim {
        match gate {
            Gate::X { qubit } => e.push((col ^ (1 << qubit), col, one)),
            Gate::H { qubit } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let b = bit(col, *qubit);
                let flipped = col ^ (1 << qubit);
                // ⟨0|H|b⟩ = 1/√2, ⟨1|H|b⟩ = (−1)^b/√2
                let (r0, r1) = if b == 0 { (col, flipped) } else { (flipped, col) };
                e.push((r0, col, Complex64::new(h, 0.0)));
                e.push((r1, col, Complex64::new(if b == 0 { h } else { -h }, 0.0)));
            }
            Gate::Cnot { control, target } => {
                let row = if bit(col, *control) == 1 { col ^ (1 << target) } else { col };
                e.push((row, col, one));
            }
            Gate::Rz { qubit, angle } => e.push((col, col, rz_phase(*angle, bit(col, *qubit)))),
            Gate::Rx { qubit, angle } => {
                let c = (angle / 2.0).cos();
                let s = (angle / 2.0).sin();
                e.push((col, col, Complex64::new(c, 0.0)));
                e.push((col ^ (1 << qubit), col, Complex64::new(0.0, -s)));
            }
            Gate::Mcrz { controls, target, angle } => {
                let active = controls.iter().all(|&c| bit(col, c) == 1);
                let v = if active { rz_phase(*angle, bit(col, *target)) } else { one };
                e.push((col, col, v));
            }
        }
    }
    e
}

/// The circuit's unitary: `U = G_last ⋯ G_1`.
pub fn unitary_of(circuit: &Circuit) -> Result<UnitaryMatrix> {
    let n = circuit.width();
    if n > MAX_ORACLE_WIDTH {
        return Err(Error::Capacity { what: "oracle width", got: n, limit: MAX_ORACLE_WIDTH });
    }
    let mut u = UnitaryMatrix::identity(1 << n);
    for g in circuit.gates() {
        u.left_mul_sparse(&gate_entries(g, n));
    }
    Ok(u)
}

/// True iff the two circuits implement the same unitary up to a global phase.
pub fn equivalent_up_to_phase(a: &Circuit, b: &Circuit, tol: f64) -> Result<bool> {
    Ok(phase_distance(a, b)? <= tol)
}

/// Oracle distance `min_c ‖U_a − c·U_b‖_max` (see [`UnitaryMatrix::distance_up_to_phase`]).
pub fn phase_distance(a: &Circuit, b: &Circuit) -> Result<f64> {
    if a.width() != b.width() {
        return Err(Error::WidthMismatch(a.width(), b.width()));
    }
    Ok(unitary_of(a)?.distance_up_to_phase(&unitary_of(b)?))
}
