use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

use super::noise::NoiseModel;
use super::state::{simulate, Statevector};

/// Measurement outcomes keyed by basis-state index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    width: usize,
    shots: u64,
    seed: u64,
    counts: BTreeMap<usize, u64>,
}

#[derive(Serialize, Deserialize)]
struct CountsJson {
    counts: BTreeMap<String, u64>,
    shots: u64,
    seed: u64,
}

/// Bitstring with qubit `width − 1` leftmost.
pub fn bitstring(index: usize, width: usize) -> String {
    (0..width).rev().map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
}

impl Counts {
    pub fn new(width: usize, seed: u64) -> Self {
        Counts { width, shots: 0, seed, counts: BTreeMap::new() }
    }

    pub fn add(&mut self, index: usize, n: u64) {
        if n > 0 {
            *self.counts.entry(index).or_insert(0) += n;
            self.shots += n;
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn frequencies(&self) -> BTreeMap<usize, f64> {
        let n = self.shots as f64;
        self.counts.iter().map(|(k, v)| (*k, *v as f64 / n)).collect()
    }

    pub fn to_json(&self) -> String {
        let j = CountsJson {
            counts: self.counts.iter().map(|(k, v)| (bitstring(*k, self.width), *v)).collect(),
            shots: self.shots,
            seed: self.seed,
        };
        serde_json::to_string_pretty(&j).expect("counts serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: CountsJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let width = j.counts.keys().next().map_or(0, String::len);
        let mut c = Counts::new(width, j.seed);
        for (bits, n) in &j.counts {
            if bits.len() != width || !bits.chars().all(|ch| ch == '0' || ch == '1') {
                return Err(Error::Parse(format!("malformed bitstring `{bits}`")));
            }
            c.add(usize::from_str_radix(bits, 2).map_err(|e| Error::Parse(e.to_string()))?, *n);
        }
        if c.shots != j.shots {
            return Err(Error::Parse(format!("counts sum to {} but shots is {}", c.shots, j.shots)));
        }
        Ok(c)
    }
}

struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        Cdf(probs.iter().map(|p| {
            acc += p;
            acc
        }).collect())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.0.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        self.0.partition_point(|c| *c <= u).min(self.0.len() - 1)
    }
}

/// Amplitude count above which trajectories are replayed from the start
/// instead of from cached intermediate states.
const PREFIX_CACHE_LIMIT: usize = 1 << 22;

type Pattern = Vec<(u32, u8)>;

fn draw_errors(rng: &mut ChaCha8Rng, positions: &[u32], p: f64, paulis: u8, out: &mut Pattern) {
    if p <= 0.0 || positions.is_empty() {
        return;
    }
    let geo = Geometric::new(p).expect("probability validated");
    let mut i = 0u64;
    loop {
        i = i.saturating_add(geo.sample(rng));
        if i >= positions.len() as u64 {
            break;
        }
        out.push((positions[i as usize], rng.random_range(1..=paulis)));
        i += 1;
    }
}

fn apply_error(state: &mut Statevector, gate: &Gate, code: u8) {
    match *gate {
        Gate::Cnot { control, target } => {
            state.apply_pauli(control, code & 3);
            state.apply_pauli(target, code >> 2);
        }
        ref g => state.apply_pauli(g.qubits()[0], code),
    }
}

/// Samples computational-basis outcomes.
///
/// Gate noise is simulated per shot by inserting a random non-identity
/// Pauli after a gate with probability `p1` (one-qubit gates) or `p2`
/// (CNOT). Shots that share an error pattern share one trajectory, and
/// trajectories restart from cached intermediate states when the circuit is
/// small enough. Readout flips are applied last, per qubit and shot.
pub fn sample(circuit: &Circuit, shots: u64, seed: u64, noise: Option<&NoiseModel>) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    let width = circuit.width();
    let noise = noise.cloned().unwrap_or_else(NoiseModel::noiseless);
    noise.validate()?;
    let gates = circuit.gates();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut patterns: BTreeMap<Pattern, u64> = BTreeMap::new();
    if noise.has_gate_noise() {
        if let Some(g) = gates.iter().find(|g| matches!(g, Gate::Mcrz { .. })) {
            return Err(Error::UnsupportedGate { gate: g.name().into(), context: "gate noise (decompose first)" });
        }
        let one: Vec<u32> = (0..gates.len() as u32).filter(|&i| !matches!(gates[i as usize], Gate::Cnot { .. })).collect();
        let two: Vec<u32> = (0..gates.len() as u32).filter(|&i| matches!(gates[i as usize], Gate::Cnot { .. })).collect();
        for _ in 0..shots {
            let mut p = Pattern::new();
            draw_errors(&mut rng, &one, noise.p1, 3, &mut p);
            draw_errors(&mut rng, &two, noise.p2, 15, &mut p);
            p.sort_unstable();
            *patterns.entry(p).or_insert(0) += 1;
        }
    } else {
        patterns.insert(Pattern::new(), shots);
    }

    let ideal = simulate(circuit)?;
    let cache: Option<Vec<Statevector>> = (patterns.len() > 1 && gates.len() << width <= PREFIX_CACHE_LIMIT).then(|| {
        let mut s = Statevector::zero(width).expect("width checked by simulate");
        gates
            .iter()
            .map(|g| {
                s.apply(g);
                s.clone()
            })
            .collect()
    });

    let readout: Vec<_> = (0..width).map(|q| noise.readout_for(q)).collect();
    let flips = noise.has_readout_noise();
    let mut counts = Counts::new(width, seed);
    for (pattern, n) in &patterns {
        let probs = if pattern.is_empty() {
            ideal.probabilities()
        } else {
            let first = pattern[0].0 as usize;
            let mut s = match &cache {
                Some(c) => c[first].clone(),
                None => {
                    let mut s = Statevector::zero(width)?;
                    for g in &gates[..=first] {
                        s.apply(g);
                    }
                    s
                }
            };
            let mut next = 0;
            for (gi, g) in gates.iter().enumerate().skip(first) {
                if gi > first {
                    s.apply(g);
                }
                while next < pattern.len() && pattern[next].0 as usize == gi {
                    apply_error(&mut s, g, pattern[next].1);
                    next += 1;
                }
            }
            s.probabilities()
        };
        let cdf = Cdf::new(&probs);
        for _ in 0..*n {
            let mut idx = cdf.draw(&mut rng);
            if flips {
                for (q, r) in readout.iter().enumerate() {
                    let p = if idx >> q & 1 == 0 { r.p10 } else { r.p01 };
                    if p > 0.0 && rng.random::<f64>() < p {
                        idx ^= 1 << q;
                    }
                }
            }
            counts.add(idx, 1);
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstrings_put_high_qubit_first() {
        assert_eq!(bitstring(0b001, 3), "001");
        assert_eq!(bitstring(0b110, 3), "110");
    }

    #[test]
    fn deterministic_and_reproducible() {
        let c = Circuit::from_gates(2, [Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        let a = sample(&c, 1000, 5, None).unwrap();
        assert_eq!(a, sample(&c, 1000, 5, None).unwrap());
        assert_eq!(a.shots(), 1000);
        assert!(a.iter().all(|(k, _)| k == 0 || k == 3));
        let x = sample(&Circuit::from_gates(1, [Gate::x(0)]).unwrap(), 200, 1, None).unwrap();
        assert_eq!(x.get(1), 200);
        assert!(sample(&c, 0, 1, None).is_err());
    }

    #[test]
    fn counts_json_round_trip() {
        let c = Circuit::from_gates(3, [Gate::h(0), Gate::h(2)]).unwrap();
        let a = sample(&c, 100, 9, None).unwrap();
        let text = a.to_json();
        assert!(text.contains("\"seed\": 9"));
        assert_eq!(Counts::from_json(&text).unwrap(), a);
        assert!(Counts::from_json(r#"{"counts":{"01":3},"shots":4,"seed":0}"#).is_err());
    }

    #[test]
    fn gate_noise_rejects_mcrz_and_spreads_outcomes() {
        let c = Circuit::from_gates(2, [Gate::mcrz(vec![0], 1, 0.3)]).unwrap();
        assert!(sample(&c, 10, 1, Some(&NoiseModel::default())).is_err());
        let mut c = Circuit::new(2).unwrap();
        for _ in 0..50 {
            c.push(Gate::cnot(0, 1)).unwrap();
        }
        let noisy = NoiseModel { p1: 0.0, p2: 0.05, readout: vec![] };
        let counts = sample(&c, 2000, 3, Some(&noisy)).unwrap();
        assert!(counts.get(0) < 2000 && counts.get(0) > 500);
        assert_eq!(counts, sample(&c, 2000, 3, Some(&noisy)).unwrap());
    }
}
