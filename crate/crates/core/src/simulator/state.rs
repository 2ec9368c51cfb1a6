use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuit::{Basis, Circuit, Gate};
use crate::error::{Error, Result};

pub const MAX_SIM_WIDTH: usize = 24;
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

/// Dense little-endian state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

fn check_width(width: usize) -> Result<()> {
    if width > MAX_SIM_WIDTH {
        return Err(Error::Capacity { what: "simulated qubits", got: width, limit: MAX_SIM_WIDTH });
    }
    if width == 0 {
        return Err(Error::invalid("state needs at least one qubit"));
    }
    Ok(())
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(width: usize) -> Result<Self> {
        check_width(width)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { width, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {} is not a power of two ≥ 2", amps.len())));
        }
        let width = amps.len().trailing_zeros() as usize;
        check_width(width)?;
        Ok(Statevector { width, amps })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width() != self.width {
            return Err(Error::WidthMismatch(self.width, circuit.width()));
        }
        for g in circuit.gates() {
            self.apply(g);
        }
        Ok(())
    }

    /// Applies one gate. The gate must already be valid for this width.
    pub fn apply(&mut self, gate: &Gate) {
        match *gate {
            Gate::X { qubit } => {
                let m = 1 << qubit;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Gate::H { qubit } => {
                let m = 1 << qubit;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            Gate::Rz { qubit, angle } => {
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = lo.conj();
                let m = 1 << qubit;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & m == 0 { lo } else { hi };
                }
            }
            Gate::Rx { qubit, angle } => {
                let c = Complex64::new((angle / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(angle / 2.0).sin());
                let m = 1 << qubit;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = c * a + s * b;
                        self.amps[i | m] = s * a + c * b;
                    }
                }
            }
            Gate::Mcrz { ref controls, target, angle } => {
                let cm = controls.iter().fold(0usize, |m, q| m | 1 << q);
                let lo = Complex64::from_polar(1.0, -angle / 2.0);
                let hi = lo.conj();
                let t = 1 << target;
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cm == cm {
                        *a *= if i & t == 0 { lo } else { hi };
                    }
                }
            }
        }
    }

    /// Applies `X`, `Y` or `Z` (codes 1, 2, 3; 0 is identity), ignoring the
    /// global phase of `Y`.
    pub fn apply_pauli(&mut self, qubit: usize, code: u8) {
        let m = 1 << qubit;
        if code == 1 || code == 2 {
            for i in 0..self.amps.len() {
                if i & m == 0 {
                    self.amps.swap(i, i | m);
                }
            }
        }
        if code >= 2 {
            // Y = iXZ; the phase factor is global, so Y acts as XZ here
            let z_sign_on_one = code == 3;
            for (i, a) in self.amps.iter_mut().enumerate() {
                let bit = i & m != 0;
                if bit == z_sign_on_one {
                    *a = -*a;
                }
            }
        }
    }

    /// Projects `qubit` onto an outcome in the given basis. The projected
    /// state keeps the qubit in its post-measurement eigenstate and is not
    /// renormalized; its squared norm is returned alongside.
    pub fn project(&self, qubit: usize, basis: Basis, outcome: u8) -> Result<(Statevector, f64)> {
        if qubit >= self.width {
            return Err(Error::QubitOutOfRange { qubit, width: self.width });
        }
        if outcome > 1 {
            return Err(Error::invalid("outcome must be 0 or 1"));
        }
        let m = 1 << qubit;
        let mut amps = self.amps.clone();
        match basis {
            Basis::Z => {
                for (i, a) in amps.iter_mut().enumerate() {
                    if ((i & m != 0) as u8) != outcome {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
            }
            Basis::X => {
                let sign = if outcome == 0 { 1.0 } else { -1.0 };
                for i in 0..amps.len() {
                    if i & m == 0 {
                        let (a, b) = (self.amps[i], self.amps[i | m]);
                        let c = (a + b * sign) * 0.5;
                        amps[i] = c;
                        amps[i | m] = c * sign;
                    }
                }
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < DEGENERATE_PROBABILITY {
            return Err(Error::DegenerateProjection(p));
        }
        Ok((Statevector { width: self.width, amps }, p))
    }

    /// Amplitudes of the other qubits after contracting `qubit` with the
    /// outcome state, i.e. `(⟨e| ⊗ I)|ψ⟩` on `width − 1` qubits.
    pub fn contract(&self, qubit: usize, basis: Basis, outcome: u8) -> Result<Vec<Complex64>> {
        if qubit >= self.width {
            return Err(Error::QubitOutOfRange { qubit, width: self.width });
        }
        let low = (1usize << qubit) - 1;
        let half = self.amps.len() / 2;
        Ok((0..half)
            .map(|r| {
                let i0 = (r & low) | ((r & !low) << 1);
                let i1 = i0 | 1 << qubit;
                let (a, b) = (self.amps[i0], self.amps[i1]);
                match (basis, outcome) {
                    (Basis::Z, 0) => a,
                    (Basis::Z, _) => b,
                    (Basis::X, 0) => (a + b) * FRAC_1_SQRT_2,
                    (Basis::X, _) => (a - b) * FRAC_1_SQRT_2,
                }
            })
            .collect())
    }
}

/// Runs a circuit on `|0…0⟩`.
pub fn simulate(circuit: &Circuit) -> Result<Statevector> {
    let mut s = Statevector::zero(circuit.width())?;
    s.apply_circuit(circuit)?;
    Ok(s)
}

/// Free-function form of [`Statevector::project`].
pub fn project(state: &Statevector, qubit: usize, basis: Basis, outcome: u8) -> Result<(Statevector, f64)> {
    state.project(qubit, basis, outcome)
}
