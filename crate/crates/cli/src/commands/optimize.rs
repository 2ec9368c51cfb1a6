use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use vqreg::optimizer::{fold_phases, optimize_pipeline, push_hadamards, push_paulis, PassReport};
use vqreg::synthesis::decompose_all;
use vqreg::unitary::{phase_distance, MAX_ORACLE_WIDTH};
use vqreg::{Circuit, CountReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pass {
    /// Decompose, push Paulis, fold phases, push Hadamards.
    All,
    Decompose,
    Paulis,
    Fold,
    Hadamards,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub before: CountReport,
    pub after: CountReport,
    pub passes: Vec<PassReport>,
    /// Oracle verdict when requested and the width allows it.
    pub equivalent: Option<bool>,
    pub distance: Option<f64>,
}

pub fn optimize(circuit: &Circuit, passes: &[Pass], verify: bool) -> Result<(Circuit, OptimizeReport)> {
    let mut current = circuit.clone();
    let mut reports = Vec::new();
    for pass in passes {
        let (next, report) = match pass {
            Pass::All => optimize_pipeline(&current)?,
            Pass::Decompose => {
                let out = decompose_all(&current)?;
                let report = PassReport {
                    pass: "decompose".into(),
                    before: current.counts(),
                    after: out.counts(),
                    rewrites: Vec::new(),
                };
                (out, report)
            }
            Pass::Paulis => push_paulis(&current)?,
            Pass::Fold => fold_phases(&current)?,
            Pass::Hadamards => push_hadamards(&current)?,
        };
        reports.push(report);
        current = next;
    }
    let (equivalent, distance) = if verify {
        if circuit.width() <= MAX_ORACLE_WIDTH {
            let d = phase_distance(circuit, &current)?;
            (Some(d <= 1e-9), Some(d))
        } else {
            log::warn!("width {} exceeds the oracle limit {MAX_ORACLE_WIDTH}; skipping verification", circuit.width());
            (None, None)
        }
    } else {
        (None, None)
    };
    let report = OptimizeReport { before: circuit.counts(), after: current.counts(), passes: reports, equivalent, distance };
    Ok((current, report))
}
