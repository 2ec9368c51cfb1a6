use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use vqreg::simulator::simulate;
use vqreg::synthesis::build_state_prep;
use vqreg::{Circuit, CountReport, PostSelection};

#[derive(Debug, Clone, Serialize)]
pub struct PrepareReport {
    pub length: usize,
    pub qubits: usize,
    pub counts: CountReport,
    pub post_selection: PostSelection,
    /// Largest deviation of the post-selected amplitudes from the
    /// normalized `sin(x_k)` target, after removing the global phase.
    pub max_amplitude_error: f64,
    pub success_probability: f64,
    /// `Σ sin²(x_k) / K_pad` for comparison.
    pub expected_success_probability: f64,
}

/// Parses a JSON array of numbers or a list separated by commas or
/// whitespace.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let t = text.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).context("parsing vector JSON");
    }
    t.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("`{s}` is not a number")))
        .collect()
}

/// Builds the post-selected preparation circuit for `x` and checks it on the
/// simulator.
pub fn prepare(x: &[f64], normalize: bool) -> Result<(Circuit, PrepareReport)> {
    let (circuit, post) = build_state_prep(x, normalize)?;
    let n = circuit.width() - 1;
    let k_pad = 1usize << n;
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut target = vec![0.0; k_pad];
    for (t, v) in target.iter_mut().zip(x) {
        *t = (if normalize { v / norm } else { *v }).sin();
    }
    let sin_norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    if sin_norm == 0.0 {
        bail!("every sin(x_k) vanishes; nothing can be post-selected");
    }

    let state = simulate(&circuit)?;
    let amps = state.contract(post.qubit, post.basis, post.outcome)?;
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let (big, _) = amps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .expect("non-empty register");
    let phase = (if target[big] < 0.0 { -amps[big] } else { amps[big] }) / amps[big].norm();
    let max_err = amps
        .iter()
        .zip(&target)
        .map(|(a, t)| (a / (phase * p.sqrt()) - Complex64::new(t / sin_norm, 0.0)).norm())
        .fold(0.0, f64::max);

    let report = PrepareReport {
        length: x.len(),
        qubits: circuit.width(),
        counts: circuit.counts(),
        post_selection: post,
        max_amplitude_error: max_err,
        success_probability: p,
        expected_success_probability: sin_norm * sin_norm / k_pad as f64,
    };
    Ok((circuit, report))
}
