use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use vqreg::synthesis::DataTable;
use vqreg::trainer::split_and_standardize;

/// A standardized train/test pair with the response in column 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    /// Column names in table order, response first.
    pub columns: Vec<String>,
    pub train: DataTable,
    pub test: DataTable,
}

/// Reads a headed numeric CSV, moves `target` to column 0, drops the named
/// columns, then splits and standardizes with train statistics.
pub fn ingest_csv(path: &Path, target: &str, drop: &[String], split_seed: u64, train_fraction: f64) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    for d in drop {
        if !headers.contains(d) {
            bail!("column `{d}` to drop is not in the header");
        }
    }
    let Some(t) = headers.iter().position(|h| h == target) else {
        bail!("target column `{target}` is not in the header ({})", headers.join(", "));
    };
    let keep: Vec<usize> = std::iter::once(t)
        .chain((0..headers.len()).filter(|&i| i != t && !drop.contains(&headers[i])))
        .collect();
    if keep.len() < 2 {
        bail!("no feature columns left besides the target");
    }
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != headers.len() {
            bail!("line {} has {} fields, header has {}", r + 2, rec.len(), headers.len());
        }
        for &i in &keep {
            let cell = &rec[i];
            let v: f64 = cell
                .parse()
                .map_err(|_| anyhow::anyhow!("line {}, column `{}`: `{cell}` is not numeric", r + 2, headers[i]))?;
            values.push(v);
        }
        rows += 1;
    }
    if rows < 2 {
        bail!("need at least 2 data rows, found {rows}");
    }
    let table = DataTable::new(rows, keep.len(), values)?;
    let (train, test) = split_and_standardize(&table, train_fraction, split_seed)?;
    Ok(Dataset { columns: keep.iter().map(|&i| headers[i].clone()).collect(), train, test })
}
