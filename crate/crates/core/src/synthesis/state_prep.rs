//! Standalone amplitude preparation.
//!
//! [`build_state_prep`] is the phase-kickback construction used inside the
//! regression circuit: it prepares `Σ_k sin(x_k)|k⟩` once ancilla 1 is
//! found in `|−⟩`. [`synthesize_reference_real_state`] is a deterministic
//! uniformly-controlled-`RY` cascade used as a gate-count baseline.

use crate::circuit::{Basis, Circuit, Gate, PostSelection};
use crate::error::{Error, Result};

use super::gray::{gray_sequence, walsh_angles};
use super::uniform::uniform_z_gates;

pub const MAX_PREP_LEN: usize = 1 << 10;

fn register_bits(len: usize) -> usize {
    len.next_power_of_two().trailing_zeros() as usize
}

/// Data qubits `0..n`, ancilla at `n`. Rotations use `2x_k`, so the
/// post-selected amplitudes are proportional to `sin(x_k)`.
pub fn build_state_prep(x: &[f64], normalize: bool) -> Result<(Circuit, PostSelection)> {
    if x.is_empty() || x.len() > MAX_PREP_LEN {
        return Err(Error::invalid(format!("vector length must be in 1..={MAX_PREP_LEN}, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("vector entries must be finite"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::invalid("cannot prepare the zero vector"));
    }
    let n = register_bits(x.len());
    let mut alphas = vec![0.0; 1 << n];
    for (a, v) in alphas.iter_mut().zip(x) {
        *a = 2.0 * if normalize { v / norm } else { *v };
    }
    let data: Vec<usize> = (0..n).collect();
    let mut gates: Vec<Gate> = (0..=n).map(Gate::h).collect();
    gates.extend(uniform_z_gates(&data, n, &alphas)?);
    let circuit = Circuit::from_gates(n + 1, gates)?;
    Ok((circuit, PostSelection { qubit: n, basis: Basis::X, outcome: 1 }))
}

/// `RY(θ)` written in the `{RZ, RX}` basis.
fn ry_gates(qubit: usize, theta: f64) -> [Gate; 3] {
    [
        Gate::rz(qubit, -std::f64::consts::FRAC_PI_2),
        Gate::rx(qubit, theta),
        Gate::rz(qubit, std::f64::consts::FRAC_PI_2),
    ]
}

/// Prepares `Σ_k x_k|k⟩` exactly from `|0…0⟩` for a real unit vector.
///
/// The most significant qubit is rotated first; each lower qubit gets a
/// `RY` multiplexed on all higher qubits, with signed `atan2` angles on the
/// last level so negative amplitudes come out right.
pub fn synthesize_reference_real_state(x: &[f64]) -> Result<Circuit> {
    if x.len() < 2 || !x.len().is_power_of_two() || x.len() > MAX_PREP_LEN {
        return Err(Error::invalid(format!("length must be a power of two in 2..={MAX_PREP_LEN}, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("vector entries must be finite"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("vector must have unit norm, got {norm}")));
    }
    let n = register_bits(x.len());
    let mut gates = Vec::new();
    for q in (0..n).rev() {
        let controls: Vec<usize> = (q + 1..n).collect();
        let block = 1usize << (q + 1);
        let half = 1usize << q;
        let alphas: Vec<f64> = (0..1usize << controls.len())
            .map(|j| {
                let chunk = &x[j * block..(j + 1) * block];
                let (a0, a1) = if q == 0 {
                    (chunk[0], chunk[1])
                } else {
                    let n0 = chunk[..half].iter().map(|v| v * v).sum::<f64>().sqrt();
                    let n1 = chunk[half..].iter().map(|v| v * v).sum::<f64>().sqrt();
                    (n0, n1)
                };
                2.0 * a1.atan2(a0)
            })
            .collect();
        if controls.is_empty() {
            gates.extend(ry_gates(q, alphas[0]));
            continue;
        }
        let seq = gray_sequence(controls.len())?;
        for (theta, bit) in walsh_angles(&alphas)?.into_iter().zip(seq) {
            gates.extend(ry_gates(q, theta));
            gates.push(Gate::cnot(controls[bit], q));
        }
    }
    Circuit::from_gates(n, gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unitary::unitary_of;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn first_column(c: &Circuit) -> Vec<Complex64> {
        let u = unitary_of(c).unwrap();
        (0..u.dim()).map(|i| u.get(i, 0)).collect()
    }

    fn random_unit(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / n).collect()
    }

    #[test]
    fn ry_expansion_matches_rotation_about_y() {
        let theta = 0.83;
        let c = Circuit::from_gates(1, ry_gates(0, theta)).unwrap();
        let u = unitary_of(&c).unwrap();
        let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let want = [[cs, -sn], [sn, cs]];
        let phase = u.get(0, 0) / cs;
        for i in 0..2 {
            for j in 0..2 {
                assert!((u.get(i, j) - phase * want[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reference_basis_vector() {
        let c = synthesize_reference_real_state(&[1.0, 0.0]).unwrap();
        assert_eq!(c.len(), 3);
        let psi = first_column(&c);
        assert!((psi[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reference_uniform_and_random() {
        let c = synthesize_reference_real_state(&[0.5; 4]).unwrap();
        let psi = first_column(&c);
        let phase = psi[0] / 0.5;
        for a in &psi {
            assert!((a - phase * 0.5).norm() < 1e-10);
        }
        for (len, seed) in [(2, 1), (8, 2), (16, 3), (32, 4)] {
            let x = random_unit(len, seed);
            let psi = first_column(&synthesize_reference_real_state(&x).unwrap());
            let phase = psi.iter().zip(&x).max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|(p, v)| p / v).unwrap();
            for (p, v) in psi.iter().zip(&x) {
                assert!((p - phase * v).norm() < 1e-10, "len {len}");
            }
        }
        assert!(synthesize_reference_real_state(&[1.0, 1.0]).is_err());
        assert!(synthesize_reference_real_state(&[1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn reference_counts() {
        let c = synthesize_reference_real_state(&random_unit(64, 5)).unwrap();
        let r = c.counts();
        assert_eq!(r.cnot, 62);
        assert_eq!(r.rx, 63);
        assert_eq!(r.rz, 126);
    }

    #[test]
    fn prep_post_selected_amplitudes() {
        let x = random_unit(8, 11);
        let (c, post) = build_state_prep(&x, false).unwrap();
        assert_eq!(post, PostSelection { qubit: 3, basis: Basis::X, outcome: 1 });
        let psi = first_column(&c);
        // <−|_anc ⊗ <k| applied to the final state
        let amp: Vec<Complex64> = (0..8).map(|k| (psi[k] - psi[k | 8]) / 2f64.sqrt()).collect();
        let p: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
        let expected_p: f64 = x.iter().map(|v| v.sin().powi(2)).sum::<f64>() / 8.0;
        assert!((p - expected_p).abs() < 1e-12);
        let s: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let sn = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let phase = amp[0] / (s[0] / sn) / p.sqrt();
        for (a, v) in amp.iter().zip(&s) {
            assert!((a / p.sqrt() - phase * (v / sn)).norm() < 1e-10);
        }
    }

    #[test]
    fn prep_validation() {
        assert!(build_state_prep(&[0.0, 0.0], true).is_err());
        assert!(build_state_prep(&[], true).is_err());
        assert!(build_state_prep(&vec![0.1; 1025], true).is_err());
        let (c, post) = build_state_prep(&[0.3, 0.1, 0.2], true).unwrap();
        assert_eq!((c.width(), post.qubit), (3, 2));
    }
}
