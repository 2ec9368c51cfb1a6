//! Data tables, register layout, and the `U_D`/`U_C` regression circuits.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CountReport, Gate};
use crate::error::{Error, Result};

use super::uniform::uniform_z_gates;

const NORM_TOL: f64 = 1e-9;

/// `L × (M+1)` real table stored row-major. Column 0 is the response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataTable {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    scale: f64,
}

impl DataTable {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::invalid("table needs at least one row"));
        }
        if cols < 2 {
            return Err(Error::invalid("table needs a response column and at least one feature"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} values for a {rows}x{cols} table, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("value at row {}, column {} is not finite", i / cols, i % cols)));
        }
        Ok(DataTable { rows, cols, values, scale: 1.0 })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::invalid(format!("row {bad} has {} values, expected {cols}", rows[bad].len())));
        }
        DataTable::new(rows.len(), cols, rows.concat())
    }

    /// Row count `L`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count `M + 1`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Feature count `M`.
    pub fn features(&self) -> usize {
        self.cols - 1
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        self.values[l * self.cols + m]
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.values[l * self.cols..(l + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn response(&self) -> Vec<f64> {
        (0..self.rows).map(|l| self.get(l, 0)).collect()
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.rows).map(|l| self.get(l, m)).collect()
    }

    /// Cumulative factor applied by [`DataTable::normalized`] and
    /// [`DataTable::scaled`].
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Scales the flattened table to unit L2 norm.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::invalid("cannot normalize an all-zero table"));
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled(&self, c: f64) -> Self {
        DataTable {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| v * c).collect(),
            scale: self.scale * c,
        }
    }

    /// Subset of rows in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.cols);
        for &l in idx {
            if l >= self.rows {
                return Err(Error::invalid(format!("row {l} out of range for {} rows", self.rows)));
            }
            values.extend_from_slice(self.row(l));
        }
        let mut t = DataTable::new(idx.len(), self.cols, values)?;
        t.scale = self.scale;
        Ok(t)
    }

    /// Flattened values laid out for `layout`, zero-padded.
    pub fn padded(&self, layout: &RegisterLayout) -> Result<Vec<f64>> {
        layout.check_table(self)?;
        let mut out = vec![0.0; layout.k_pad()];
        for l in 0..self.rows {
            for m in 0..self.cols {
                out[layout.index(l, m)] = self.get(l, m);
            }
        }
        Ok(out)
    }
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

/// Qubit assignment for a regression circuit. Column qubits are
/// `0..n_m`, row qubits `n_m..n_m+n_l`, then the two ancillas, so the
/// flattened index is `k = l·2^{n_m} + m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub n_l: usize,
    pub n_m: usize,
    pub anc1: usize,
    pub anc2: usize,
}

impl RegisterLayout {
    pub fn new(n_l: usize, n_m: usize) -> Self {
        RegisterLayout { n_l, n_m, anc1: n_l + n_m, anc2: n_l + n_m + 1 }
    }

    /// Smallest layout holding `rows × cols` values.
    pub fn for_shape(rows: usize, cols: usize) -> Self {
        RegisterLayout::new(ceil_log2(rows.max(1)), ceil_log2(cols.max(1)))
    }

    pub fn for_table(table: &DataTable) -> Self {
        RegisterLayout::for_shape(table.rows(), table.cols())
    }

    pub fn width(&self) -> usize {
        self.n_l + self.n_m + 2
    }

    pub fn data_qubits(&self) -> Vec<usize> {
        (0..self.n_l + self.n_m).collect()
    }

    pub fn m_qubits(&self) -> Vec<usize> {
        (0..self.n_m).collect()
    }

    pub fn l_qubits(&self) -> Vec<usize> {
        (self.n_m..self.n_m + self.n_l).collect()
    }

    pub fn k_pad(&self) -> usize {
        1 << (self.n_l + self.n_m)
    }

    pub fn m_pad(&self) -> usize {
        1 << self.n_m
    }

    pub fn index(&self, l: usize, m: usize) -> usize {
        (l << self.n_m) | m
    }

    /// Converts the post-selected probability into the loss value.
    pub fn loss_constant(&self) -> f64 {
        (self.k_pad() * self.m_pad()) as f64
    }

    pub fn check_table(&self, table: &DataTable) -> Result<()> {
        if table.rows() > 1 << self.n_l || table.cols() > self.m_pad() {
            return Err(Error::invalid(format!(
                "a {}x{} table does not fit {} row and {} column qubits",
                table.rows(),
                table.cols(),
                self.n_l,
                self.n_m
            )));
        }
        Ok(())
    }

    pub fn check_width(&self, width: usize) -> Result<()> {
        if width != self.width() {
            return Err(Error::WidthMismatch(self.width(), width));
        }
        Ok(())
    }
}

/// Layout metadata as written next to an emitted circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayoutInfo {
    pub n_l: usize,
    pub n_m: usize,
    pub anc1: usize,
    pub anc2: usize,
    pub scale: f64,
}

impl LayoutInfo {
    pub fn new(layout: &RegisterLayout, table: &DataTable) -> Self {
        LayoutInfo { n_l: layout.n_l, n_m: layout.n_m, anc1: layout.anc1, anc2: layout.anc2, scale: table.scale() }
    }
}

/// Coefficient angles `φ_m`, one per table column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionParams {
    phis: Vec<f64>,
}

impl RegressionParams {
    pub fn new(phis: Vec<f64>) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::invalid("at least one angle is required"));
        }
        if phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        Ok(RegressionParams { phis })
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }

    fn padded(&self, layout: &RegisterLayout) -> Result<Vec<f64>> {
        if self.phis.len() > layout.m_pad() {
            return Err(Error::invalid(format!(
                "{} angles do not fit {} column qubits",
                self.phis.len(),
                layout.n_m
            )));
        }
        let mut out = vec![0.0; layout.m_pad()];
        out[..self.phis.len()].copy_from_slice(&self.phis);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildMode {
    Naive,
    Optimized,
}

fn push_selector(gates: &mut Vec<Gate>, controls: &[usize], target: usize, index: usize, angle: f64) {
    let flips: Vec<usize> = controls.iter().enumerate().filter(|(b, _)| index >> b & 1 == 0).map(|(_, &q)| q).collect();
    gates.extend(flips.iter().map(|&q| Gate::x(q)));
    gates.push(Gate::mcrz(controls.to_vec(), target, angle));
    gates.extend(flips.iter().map(|&q| Gate::x(q)));
}

fn require_normalized(table: &DataTable) -> Result<()> {
    if !table.is_normalized() {
        return Err(Error::invalid(format!("table must have unit norm, got {}", table.norm())));
    }
    Ok(())
}

/// Data-encoding block: H on every data qubit and ancilla 1, then one
/// X-conjugated `MCRZ(2x_k)` per flattened index.
pub fn build_ud_naive(table: &DataTable, layout: &RegisterLayout) -> Result<Circuit> {
    require_normalized(table)?;
    Circuit::from_gates(layout.width(), ud_gates(&table.padded(layout)?, layout))
}

fn ud_gates(xs: &[f64], layout: &RegisterLayout) -> Vec<Gate> {
    let data = layout.data_qubits();
    let mut gates: Vec<Gate> = data.iter().chain([&layout.anc1]).map(|&q| Gate::h(q)).collect();
    for (k, x) in xs.iter().enumerate() {
        push_selector(&mut gates, &data, layout.anc1, k, 2.0 * x);
    }
    gates
}

/// Coefficient block: H on ancilla 2, then one X-conjugated `MCRZ(−2φ_m)`
/// controlled by the column register.
pub fn build_uc_naive(params: &RegressionParams, layout: &RegisterLayout) -> Result<Circuit> {
    let phis = params.padded(layout)?;
    let cols = layout.m_qubits();
    let mut gates = vec![Gate::h(layout.anc2)];
    for (m, phi) in phis.iter().enumerate() {
        push_selector(&mut gates, &cols, layout.anc2, m, -2.0 * phi);
    }
    Circuit::from_gates(layout.width(), gates)
}

/// The gates left after folding and pushing Hadamards through a uniformly
/// controlled `RZ`: rotations become `RX` and every CNOT is reversed.
fn hadamard_conjugated(gates: Vec<Gate>) -> Vec<Gate> {
    gates
        .into_iter()
        .map(|g| match g {
            Gate::Rz { qubit, angle } => Gate::rx(qubit, angle),
            Gate::Cnot { control, target } => Gate::cnot(target, control),
            other => other,
        })
        .collect()
}

/// Full regression circuit. The naive form ends with H on every qubit so
/// that a computational-basis readout is an X-basis measurement; the
/// optimized form is built directly from Walsh angles and is read out in the
/// computational basis.
pub fn build_regression_circuit(
    table: &DataTable,
    params: &RegressionParams,
    mode: BuildMode,
) -> Result<(Circuit, RegisterLayout)> {
    if params.len() != table.cols() {
        return Err(Error::invalid(format!("{} angles for {} table columns", params.len(), table.cols())));
    }
    let layout = RegisterLayout::for_table(table);
    let circuit = match mode {
        BuildMode::Naive => {
            let mut c = build_ud_naive(table, &layout)?;
            c.extend(&build_uc_naive(params, &layout)?)?;
            for q in 0..layout.width() {
                c.push(Gate::h(q))?;
            }
            c
        }
        BuildMode::Optimized => {
            require_normalized(table)?;
            let alphas: Vec<f64> = table.padded(&layout)?.iter().map(|x| 2.0 * x).collect();
            let betas: Vec<f64> = params.padded(&layout)?.iter().map(|p| -2.0 * p).collect();
            let mut gates = uniform_z_gates(&layout.data_qubits(), layout.anc1, &alphas)?;
            gates.extend(uniform_z_gates(&layout.m_qubits(), layout.anc2, &betas)?);
            Circuit::from_gates(layout.width(), hadamard_conjugated(gates))?
        }
    };
    Ok((circuit, layout))
}

/// Naive gate budget for `K` data values and `M` features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveCountFormula {
    /// Elementary-gate tally of the naive construction after every `MCRZ`
    /// is decomposed; `None` when the shape admits no construction.
    pub construction: Option<CountReport>,
    /// `2(K² + (M+1)² + K·log2 K + (M+1)·log2(M+1) + log2(K+2))`, evaluated
    /// literally.
    pub literal_total: f64,
    /// Set when `K < M + 1` or `K < 2`, i.e. no table has this shape.
    pub degenerate: bool,
}

/// Closed-form gate counts for the naive circuit. `K` and `M + 1` are
/// rounded up to powers of two.
///
/// The construction tally is
/// `CNOT = RZ = K² + (M+1)²`, `X = K·log2 K + (M+1)·log2(M+1)`,
/// `H = 2·log2 K + 4`.
pub fn naive_gate_count_formula(k: usize, m: usize) -> NaiveCountFormula {
    let kf = k as f64;
    let mf = (m + 1) as f64;
    let literal_total = 2.0 * (kf * kf + mf * mf + kf * kf.log2() + mf * mf.log2() + (kf + 2.0).log2());
    let degenerate = k < 2 || k < m + 1;
    let construction = (!degenerate).then(|| {
        let kp = k.next_power_of_two();
        let mp = (m + 1).next_power_of_two();
        let nd = ceil_log2(kp);
        let nm = ceil_log2(mp);
        CountReport {
            x: kp * nd + mp * nm,
            h: 2 * nd + 4,
            cnot: kp * kp + mp * mp,
            rz: kp * kp + mp * mp,
            rx: 0,
            mcrz: 0,
        }
    });
    NaiveCountFormula { construction, literal_total, degenerate }
}
