use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vqreg::synthesis::{
    build_regression_circuit, build_state_prep, build_ud_naive, decompose_all, naive_gate_count_formula,
    synthesize_reference_real_state, BuildMode, DataTable, RegisterLayout, RegressionParams,
};

/// One line of the gate-scaling benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub m: usize,
    /// Literal closed-form naive total.
    pub naive_formula: f64,
    /// Closed-form tally of the naive construction.
    pub naive_formula_construction: usize,
    /// Gates in the built and decomposed naive circuit.
    pub naive_total: usize,
    pub optimized_total: usize,
    pub optimized_cnot: usize,
    pub prep_naive_total: usize,
    pub prep_optimized_total: usize,
    pub prep_optimized_cnot: usize,
    pub reference_total: usize,
    pub reference_cnot: usize,
}

pub const DEFAULT_K: [usize; 7] = [4, 8, 16, 32, 64, 128, 256];

/// Gate counts of the naive, optimized and reference constructions for a
/// random normalized table of `K` values in `M + 1` columns.
pub fn bench_row(k: usize, m: usize, seed: u64) -> Result<BenchRow> {
    let cols = m + 1;
    if !k.is_power_of_two() || !cols.is_power_of_two() || cols > k || m == 0 {
        bail!("K = {k} and M + 1 = {cols} must be powers of two with 2 <= M + 1 <= K");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
    let values: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let table = DataTable::new(k / cols, cols, values)?.normalized()?;
    let phis: Vec<f64> = (0..cols).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
    let params = RegressionParams::new(phis)?;

    let formula = naive_gate_count_formula(k, m);
    let (naive, _) = build_regression_circuit(&table, &params, BuildMode::Naive)?;
    let naive = decompose_all(&naive)?.counts();
    let (opt, _) = build_regression_circuit(&table, &params, BuildMode::Optimized)?;
    let opt = opt.counts();

    let layout = RegisterLayout::for_table(&table);
    let prep_naive = decompose_all(&build_ud_naive(&table, &layout)?)?.counts();
    let (prep, _) = build_state_prep(table.values(), false)?;
    let prep = prep.counts();
    let reference = synthesize_reference_real_state(table.values())?.counts();

    Ok(BenchRow {
        k,
        m,
        naive_formula: formula.literal_total,
        naive_formula_construction: formula.construction.map_or(0, |c| c.total()),
        naive_total: naive.total(),
        optimized_total: opt.total(),
        optimized_cnot: opt.cnot,
        prep_naive_total: prep_naive.total(),
        prep_optimized_total: prep.total(),
        prep_optimized_cnot: prep.cnot,
        reference_total: reference.total(),
        reference_cnot: reference.cnot,
    })
}

pub fn bench_csv(ks: &[usize], m: usize, seed: u64) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for &k in ks {
        w.serialize(bench_row(k, m, seed)?)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
