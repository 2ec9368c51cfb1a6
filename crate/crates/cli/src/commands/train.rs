use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use vqreg::simulator::NoiseModel;
use vqreg::trainer::{
    fit_classical_least_squares, fit_quantum, r2_of, split_and_standardize, synthetic_linear, EstimatorKind,
    EvaluatorKind, GradientMode, HistoryRow, OptimizerKind, TrainConfig,
};

use crate::ingest::{ingest_csv, Dataset};
use crate::io::{read, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Classical,
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Xbasis,
    Shadow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerArg {
    Adam,
    NelderMead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradArg {
    Exact,
    Paper,
}

/// Flags of `vqreg train`. Unset flags fall back to the config file, then
/// to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column name.
    #[arg(long)]
    pub target: Option<String>,
    /// Columns to ignore (repeatable).
    #[arg(long)]
    pub drop: Vec<String>,
    /// Generate this many rows of bundled synthetic linear data instead of
    /// reading a file.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Models to train (repeatable).
    #[arg(long, value_enum)]
    pub model: Vec<Model>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub shots: Option<u64>,
    /// Evaluate quantum models on the exact statevector.
    #[arg(long)]
    pub exact: bool,
    /// Noise model JSON file, or `default`.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long, overrides_with = "no_mitigate")]
    pub mitigate: bool,
    #[arg(long)]
    pub no_mitigate: bool,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerArg>,
    #[arg(long, value_enum)]
    pub grad: Option<GradArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for the report and history files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
}

/// Fully resolved training options, also the config file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct TrainOptions {
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub drop: Vec<String>,
    pub synthetic: Option<usize>,
    pub model: Vec<Model>,
    pub iters: usize,
    pub lr: f64,
    pub batch: usize,
    pub shots: u64,
    pub exact: bool,
    pub noise: Option<String>,
    pub mitigate: bool,
    pub estimator: EstimatorArg,
    pub optimizer: OptimizerArg,
    pub grad: GradArg,
    pub seed: u64,
    pub out: PathBuf,
    pub train_fraction: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        let c = TrainConfig::default();
        TrainOptions {
            data: None,
            target: None,
            drop: Vec::new(),
            synthetic: None,
            model: Vec::new(),
            iters: c.iterations,
            lr: c.learning_rate,
            batch: c.batch_size,
            shots: c.shots,
            exact: false,
            noise: None,
            mitigate: false,
            estimator: EstimatorArg::Xbasis,
            optimizer: OptimizerArg::Adam,
            grad: GradArg::Exact,
            seed: 0,
            out: PathBuf::from("."),
            train_fraction: 0.64,
        }
    }
}

pub const SYNTHETIC_WEIGHTS: [f64; 3] = [-0.6, -0.5, -0.4];
pub const SYNTHETIC_NOISE: f64 = 0.05;

impl TrainArgs {
    pub fn resolve(&self) -> Result<TrainOptions> {
        let mut o = match &self.config {
            Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("parsing config {}", p.display()))?,
            None => TrainOptions::default(),
        };
        macro_rules! over {
            ($($f:ident => $g:ident),*) => { $(if let Some(v) = &self.$f { o.$g = v.clone(); })* };
        }
        over!(iters => iters, lr => lr, batch => batch, shots => shots, estimator => estimator,
              optimizer => optimizer, grad => grad, seed => seed, out => out, train_fraction => train_fraction);
        if self.data.is_some() {
            o.data = self.data.clone();
        }
        if self.target.is_some() {
            o.target = self.target.clone();
        }
        if self.synthetic.is_some() {
            o.synthetic = self.synthetic;
        }
        if self.noise.is_some() {
            o.noise = self.noise.clone();
        }
        if !self.drop.is_empty() {
            o.drop = self.drop.clone();
        }
        if !self.model.is_empty() {
            o.model = self.model.clone();
        }
        o.exact |= self.exact;
        if self.mitigate {
            o.mitigate = true;
        }
        if self.no_mitigate {
            o.mitigate = false;
        }
        if o.model.is_empty() {
            o.model = vec![Model::Classical, if o.exact { Model::Exact } else { Model::Sampled }];
        }
        if o.exact {
            for m in &mut o.model {
                if *m == Model::Sampled {
                    *m = Model::Exact;
                }
            }
            o.model.dedup();
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BaselineReport {
    pub weights: Vec<f64>,
    pub train_r2: f64,
    pub test_r2: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: Model,
    pub weights: Vec<f64>,
    pub phis: Vec<f64>,
    pub initial_phis: Vec<f64>,
    pub train_r2: f64,
    pub test_r2: f64,
    /// `|W_model − W_classical|` per feature.
    pub distances: Vec<f64>,
    pub mean_success_probability: Option<f64>,
    pub skipped: usize,
    pub executions: u64,
    pub history: Vec<HistoryRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightRow {
    pub feature: String,
    pub weights: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub config: TrainOptions,
    pub columns: Vec<String>,
    pub train_rows: usize,
    pub test_rows: usize,
    pub baseline: BaselineReport,
    pub models: Vec<ModelReport>,
    pub weight_table: Vec<WeightRow>,
}

pub fn load_dataset(o: &TrainOptions) -> Result<Dataset> {
    match (&o.data, o.synthetic) {
        (Some(_), Some(_)) => bail!("give either --data or --synthetic, not both"),
        (Some(path), None) => {
            let target = o.target.as_deref().context("--target is required with --data")?;
            ingest_csv(path, target, &o.drop, o.seed, o.train_fraction)
        }
        (None, Some(rows)) => {
            let table = synthetic_linear(rows, &SYNTHETIC_WEIGHTS, SYNTHETIC_NOISE, o.seed)?;
            let (train, test) = split_and_standardize(&table, o.train_fraction, o.seed)?;
            let columns = std::iter::once("y".to_string()).chain((1..table.cols()).map(|m| format!("x{m}"))).collect();
            Ok(Dataset { columns, train, test })
        }
        (None, None) => bail!("no dataset: pass --data <csv> or --synthetic <rows>"),
    }
}

fn noise_model(spec: Option<&str>) -> Result<Option<NoiseModel>> {
    match spec {
        None | Some("none") => Ok(None),
        Some("default") => Ok(Some(NoiseModel::default())),
        Some(path) => Ok(Some(NoiseModel::from_json(&read(Path::new(path))?)?)),
    }
}

fn train_config(o: &TrainOptions, evaluator: EvaluatorKind) -> Result<TrainConfig> {
    Ok(TrainConfig {
        optimizer: match o.optimizer {
            OptimizerArg::Adam => OptimizerKind::Adam,
            OptimizerArg::NelderMead => OptimizerKind::NelderMead,
        },
        learning_rate: o.lr,
        iterations: o.iters,
        batch_size: o.batch,
        evaluator,
        shots: o.shots,
        gradient: match o.grad {
            GradArg::Exact => GradientMode::ExactShift,
            GradArg::Paper => GradientMode::PaperTwoTerm,
        },
        estimator: match o.estimator {
            EstimatorArg::Xbasis => EstimatorKind::Xbasis,
            EstimatorArg::Shadow => EstimatorKind::Shadow,
        },
        noise: noise_model(o.noise.as_deref())?,
        mitigate: o.mitigate,
        seed: o.seed,
        ..TrainConfig::default()
    })
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Classical => "classical",
        Model::Exact => "exact",
        Model::Sampled => "sampled",
    }
}

/// Trains every requested model and assembles the report.
pub fn run_training(o: &TrainOptions, data: &Dataset) -> Result<TrainReport> {
    let ls = fit_classical_least_squares(&data.train)?;
    let baseline = BaselineReport {
        train_r2: ls.r2,
        test_r2: r2_of(&data.test, &ls.weights)?,
        weights: ls.weights.clone(),
        rank: ls.rank,
    };
    let mut models = Vec::new();
    for &m in &o.model {
        let report = match m {
            Model::Classical => {
                let mse = {
                    let pred = vqreg::trainer::predict(&data.train, &ls.weights)?;
                    data.train.response().iter().zip(&pred).map(|(y, p)| (y - p).powi(2)).sum::<f64>() / pred.len() as f64
                };
                ModelReport {
                    model: m,
                    weights: ls.weights.clone(),
                    phis: Vec::new(),
                    initial_phis: Vec::new(),
                    train_r2: baseline.train_r2,
                    test_r2: baseline.test_r2,
                    distances: vec![0.0; ls.weights.len()],
                    mean_success_probability: None,
                    skipped: 0,
                    executions: 0,
                    history: vec![HistoryRow { iteration: 0, loss: mse, train_r2: baseline.train_r2, test_r2: baseline.test_r2 }],
                }
            }
            Model::Exact | Model::Sampled => {
                let evaluator = if m == Model::Exact { EvaluatorKind::Exact } else { EvaluatorKind::Sampled };
                let cfg = train_config(o, evaluator)?;
                let fit = fit_quantum(&data.train, &data.test, &cfg)?;
                let success = (!fit.success_probability.is_empty())
                    .then(|| fit.success_probability.iter().sum::<f64>() / fit.success_probability.len() as f64);
                ModelReport {
                    model: m,
                    train_r2: r2_of(&data.train, &fit.weights)?,
                    test_r2: r2_of(&data.test, &fit.weights)?,
                    distances: fit.weights.iter().zip(&ls.weights).map(|(a, b)| (a - b).abs()).collect(),
                    weights: fit.weights,
                    phis: fit.phis,
                    initial_phis: fit.initial_phis,
                    mean_success_probability: success,
                    skipped: fit.skipped,
                    executions: fit.executions,
                    history: fit.history,
                }
            }
        };
        models.push(report);
    }
    let weight_table = data.columns[1..]
        .iter()
        .enumerate()
        .map(|(i, name)| WeightRow {
            feature: name.clone(),
            weights: models.iter().map(|r| (model_name(r.model).to_string(), r.weights[i])).collect(),
        })
        .collect();
    Ok(TrainReport {
        config: o.clone(),
        columns: data.columns.clone(),
        train_rows: data.train.rows(),
        test_rows: data.test.rows(),
        baseline,
        models,
        weight_table,
    })
}

pub fn history_csv(rows: &[HistoryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "loss", "train_r2", "test_r2"])?;
    for r in rows {
        w.write_record([r.iteration.to_string(), r.loss.to_string(), r.train_r2.to_string(), r.test_r2.to_string()])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes `report.json` and one `history_<model>.csv` per model.
pub fn write_outputs(report: &TrainReport, dir: &Path) -> Result<()> {
    write_atomic(&dir.join("report.json"), &serde_json::to_string_pretty(report)?)?;
    for m in &report.models {
        write_atomic(&dir.join(format!("history_{}.csv", model_name(m.model))), &history_csv(&m.history)?)?;
    }
    Ok(())
}
