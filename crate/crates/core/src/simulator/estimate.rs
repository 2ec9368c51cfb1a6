//! Measurement-operator expectation and loss estimators.

use log::warn;
use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::synthesis::RegisterLayout;

use super::mitigation::{mitigate_counts, ConfusionSet};
use super::noise::NoiseModel;
use super::sampling::{sample, Counts};
use super::state::{simulate, Statevector};

/// `⟨ψ|I ⊗ (I+X)^{⊗n_m}|ψ⟩` for a state whose low `n_m` qubits are the
/// m-register. The state may cover the data register alone or the full
/// layout.
pub fn expectation_mhat_state(state: &Statevector, layout: &RegisterLayout) -> Result<f64> {
    let data = layout.n_l + layout.n_m;
    if state.width() != data && state.width() != layout.width() {
        return Err(Error::WidthMismatch(layout.width(), state.width()));
    }
    let m_pad = layout.m_pad();
    Ok(state
        .amplitudes()
        .chunks(m_pad)
        .map(|block| block.iter().sum::<Complex64>().norm_sqr())
        .sum())
}

/// Frequency estimate of `⟨M̂⟩` from counts taken in the measurement basis:
/// `2^{n_m}` times the fraction of shots with every m-register bit 0.
pub fn expectation_mhat_counts(counts: &Counts, layout: &RegisterLayout) -> Result<f64> {
    let data = layout.n_l + layout.n_m;
    if counts.width() != data && counts.width() != layout.width() {
        return Err(Error::WidthMismatch(layout.width(), counts.width()));
    }
    if counts.shots() == 0 {
        return Err(Error::invalid("no shots"));
    }
    let mask = layout.m_pad() - 1;
    let hits: u64 = counts.iter().filter(|(k, _)| k & mask == 0).map(|(_, n)| n).sum();
    Ok(layout.m_pad() as f64 * hits as f64 / counts.shots() as f64)
}

/// How a loss circuit is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum RunMode {
    /// Probabilities read off the final statevector.
    Exact,
    /// Finite-shot sampling. A confusion set turns on readout mitigation.
    Sampled { shots: u64, seed: u64, noise: Option<NoiseModel>, mitigation: Option<ConfusionSet> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    XBasis,
    /// Median of per-batch X-basis estimates.
    Shadow { batches: u64 },
}

pub const DEFAULT_SHADOW_BATCHES: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEstimate {
    pub loss: f64,
    /// Probability that both ancillas land on their selected outcome.
    pub success_probability: f64,
    /// Probability that the data ancilla alone lands on its selected outcome.
    pub anc1_probability: f64,
    /// Shots that survived both ancilla selections.
    pub effective_shots: u64,
}

struct Masks {
    anc1: usize,
    anc2: usize,
    m: usize,
}

impl Masks {
    fn new(layout: &RegisterLayout) -> Self {
        Masks { anc1: 1 << layout.anc1, anc2: 1 << layout.anc2, m: layout.m_pad() - 1 }
    }

    fn anc1_ok(&self, k: usize) -> bool {
        k & self.anc1 != 0
    }

    fn selected(&self, k: usize) -> bool {
        self.anc1_ok(k) && k & self.anc2 == 0
    }

    fn hit(&self, k: usize) -> bool {
        self.selected(k) && k & self.m == 0
    }
}

/// Loss of a regression circuit whose final layer already maps the
/// measurement basis onto computational outcomes.
///
/// The loss is `C·P(anc1 = 1, anc2 = 0, m = 0…0)` with
/// `C = K_pad·2^{n_m}`.
pub fn loss_from_run(circuit: &Circuit, layout: &RegisterLayout, mode: &RunMode, estimator: Estimator) -> Result<LossEstimate> {
    layout.check_width(circuit.width())?;
    match (mode, estimator) {
        (_, Estimator::XBasis) | (RunMode::Exact, _) => single_run(circuit, layout, mode),
        (RunMode::Sampled { shots, seed, .. }, Estimator::Shadow { batches }) => {
            let loss = shadow_with(circuit, layout, mode, *shots, batches, *seed)?;
            Ok(LossEstimate { loss: loss.0, ..loss.1 })
        }
    }
}

fn single_run(circuit: &Circuit, layout: &RegisterLayout, mode: &RunMode) -> Result<LossEstimate> {
    let masks = Masks::new(layout);
    let c = layout.loss_constant();
    match mode {
        RunMode::Exact => {
            let probs = simulate(circuit)?.probabilities();
            let sum = |f: &dyn Fn(usize) -> bool| -> f64 { probs.iter().enumerate().filter(|(k, _)| f(*k)).map(|(_, p)| p).sum() };
            Ok(LossEstimate {
                loss: c * sum(&|k| masks.hit(k)),
                success_probability: sum(&|k| masks.selected(k)),
                anc1_probability: sum(&|k| masks.anc1_ok(k)),
                effective_shots: 0,
            })
        }
        RunMode::Sampled { shots, seed, noise, mitigation } => {
            let counts = sample(circuit, *shots, *seed, noise.as_ref())?;
            let count = |f: &dyn Fn(usize) -> bool| -> u64 { counts.iter().filter(|(k, _)| f(*k)).map(|(_, n)| n).sum() };
            let survivors = count(&|k| masks.selected(k));
            if survivors == 0 {
                return Err(Error::EstimatorStarved);
            }
            let n = *shots as f64;
            let (p_hit, p_sel, p_anc1) = match mitigation {
                Some(conf) => {
                    let q = mitigate_counts(&counts, conf)?;
                    let sum = |f: &dyn Fn(usize) -> bool| -> f64 { q.probs.iter().filter(|(k, _)| f(**k)).map(|(_, p)| p).sum() };
                    (sum(&|k| masks.hit(k)), sum(&|k| masks.selected(k)), sum(&|k| masks.anc1_ok(k)))
                }
                None => (
                    count(&|k| masks.hit(k)) as f64 / n,
                    survivors as f64 / n,
                    count(&|k| masks.anc1_ok(k)) as f64 / n,
                ),
            };
            Ok(LossEstimate { loss: c * p_hit, success_probability: p_sel, anc1_probability: p_anc1, effective_shots: survivors })
        }
    }
}

/// Median of a non-empty slice; the mean of the middle pair for even length.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn batch_seed(seed: u64, b: u64) -> u64 {
    seed.wrapping_add(b.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Median-of-batches loss estimate: `shots` are split evenly into `batches`
/// independent X-basis runs and the median batch loss is returned. Batches
/// with no surviving shots are dropped.
pub fn shadow_estimate(
    circuit: &Circuit,
    layout: &RegisterLayout,
    shots: u64,
    batches: u64,
    seed: u64,
    noise: Option<&NoiseModel>,
    mitigation: Option<&ConfusionSet>,
) -> Result<f64> {
    layout.check_width(circuit.width())?;
    let mode = RunMode::Sampled { shots, seed, noise: noise.cloned(), mitigation: mitigation.cloned() };
    Ok(shadow_with(circuit, layout, &mode, shots, batches, seed)?.0)
}

fn shadow_with(
    circuit: &Circuit,
    layout: &RegisterLayout,
    mode: &RunMode,
    shots: u64,
    batches: u64,
    seed: u64,
) -> Result<(f64, LossEstimate)> {
    if batches == 0 || shots % batches != 0 {
        return Err(Error::invalid(format!("{shots} shots cannot be split into {batches} batches")));
    }
    let per = shots / batches;
    if batches == 1 {
        let est = single_run(circuit, layout, mode)?;
        return Ok((est.loss, est));
    }
    let (noise, mitigation) = match mode {
        RunMode::Sampled { noise, mitigation, .. } => (noise.clone(), mitigation.clone()),
        RunMode::Exact => (None, None),
    };
    let mut losses = Vec::new();
    let mut total = LossEstimate { loss: 0.0, success_probability: 0.0, anc1_probability: 0.0, effective_shots: 0 };
    for b in 0..batches {
        let m = RunMode::Sampled { shots: per, seed: batch_seed(seed, b), noise: noise.clone(), mitigation: mitigation.clone() };
        match single_run(circuit, layout, &m) {
            Ok(est) => {
                losses.push(est.loss);
                total.success_probability += est.success_probability;
                total.anc1_probability += est.anc1_probability;
                total.effective_shots += est.effective_shots;
            }
            Err(Error::EstimatorStarved) => warn!("shadow batch {b} starved; dropped"),
            Err(e) => return Err(e),
        }
    }
    let kept = losses.len() as f64;
    let loss = median(&losses).ok_or(Error::EstimatorStarved)?;
    total.success_probability /= kept;
    total.anc1_probability /= kept;
    Ok((loss, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn mhat_extremes() {
        let layout = RegisterLayout::new(1, 2);
        let plus = Circuit::from_gates(3, [Gate::h(0), Gate::h(1)]).unwrap();
        let s = simulate(&plus).unwrap();
        assert!((expectation_mhat_state(&s, &layout).unwrap() - 4.0).abs() < 1e-12);
        let minus = Circuit::from_gates(3, [Gate::x(0), Gate::h(0), Gate::h(1)]).unwrap();
        let s = simulate(&minus).unwrap();
        assert!(expectation_mhat_state(&s, &layout).unwrap().abs() < 1e-12);
        assert!(expectation_mhat_state(&Statevector::zero(2).unwrap(), &layout).is_err());
    }

    #[test]
    fn exact_loss_matches_sine_closed_form() {
        use crate::synthesis::{build_regression_circuit, BuildMode, DataTable, RegressionParams};
        let table = DataTable::from_rows(&[vec![0.3, -0.2, 0.5], vec![0.1, 0.4, -0.3], vec![-0.2, 0.2, 0.1]])
            .unwrap()
            .normalized()
            .unwrap();
        let phis = vec![0.4, 1.1, 2.0];
        let params = RegressionParams::new(phis.clone()).unwrap();
        let expected: f64 = (0..3)
            .map(|l| (0..3).map(|m| table.get(l, m).sin() * phis[m].cos()).sum::<f64>().powi(2))
            .sum();
        for mode in [BuildMode::Naive, BuildMode::Optimized] {
            let (c, layout) = build_regression_circuit(&table, &params, mode).unwrap();
            let est = loss_from_run(&c, &layout, &RunMode::Exact, Estimator::XBasis).unwrap();
            assert!((est.loss - expected).abs() < 1e-9, "{mode:?}: {} vs {expected}", est.loss);
            let sin2: f64 = table.values().iter().map(|x| x.sin().powi(2)).sum();
            assert!((est.anc1_probability - sin2 / layout.k_pad() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn median_handles_parity() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn starvation_is_reported() {
        let layout = RegisterLayout::new(0, 0);
        let c = Circuit::new(2).unwrap();
        let mode = RunMode::Sampled { shots: 100, seed: 1, noise: None, mitigation: None };
        assert_eq!(loss_from_run(&c, &layout, &mode, Estimator::XBasis), Err(Error::EstimatorStarved));
        assert_eq!(
            loss_from_run(&c, &layout, &mode, Estimator::Shadow { batches: 4 }),
            Err(Error::EstimatorStarved)
        );
        assert!(loss_from_run(&c, &layout, &mode, Estimator::Shadow { batches: 3 }).is_err());
    }
}
