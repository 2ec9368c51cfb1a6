//! Command implementations behind the `vqreg` binary.

pub mod commands;
pub mod ingest;
pub mod io;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};
use vqreg::{Circuit, Error};

use commands::optimize::Pass;
use commands::train::TrainArgs;

#[derive(Debug, Parser)]
#[command(name = "vqreg", version, about = "Variational quantum regression circuits: build, optimize, simulate, train")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gate counts of naive, optimized and reference circuits as CSV.
    Bench {
        /// Data sizes K (powers of two).
        #[arg(long, value_delimiter = ',', default_values_t = commands::bench::DEFAULT_K)]
        k: Vec<usize>,
        /// Feature count M; M + 1 must be a power of two.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify the post-selected amplitude preparation of a vector.
    Prepare {
        /// JSON array or comma/whitespace separated numbers.
        input: PathBuf,
        /// Use the vector as given instead of scaling it to unit norm.
        #[arg(long)]
        raw: bool,
        /// Where to write the circuit JSON.
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Where to write the report (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run rewrite passes over a circuit file.
    Optimize {
        input: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Pass::All])]
        passes: Vec<Pass>,
        /// Where to write the optimized circuit (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the pass report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check unitary equivalence with the dense oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Train regression models and write a report plus history CSVs.
    Train(TrainArgs),
}

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_STARVED: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;

/// Process exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::EstimatorStarved) => EXIT_STARVED,
        Some(Error::Capacity { .. }) => EXIT_CAPACITY,
        _ => EXIT_INPUT,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench { k, m, seed, out } => {
            io::emit(out.as_deref(), &commands::bench::bench_csv(&k, m, seed)?)?;
        }
        Command::Prepare { input, raw, circuit, out } => {
            let x = commands::prepare::parse_vector(&io::read(&input)?)?;
            let (c, report) = commands::prepare::prepare(&x, !raw)?;
            if let Some(p) = circuit {
                io::write_atomic(&p, &c.to_json())?;
            }
            io::emit(out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
        }
        Command::Optimize { input, passes, out, report, verify } => {
            let c = Circuit::from_json(&io::read(&input)?)?;
            let (opt, rep) = commands::optimize::optimize(&c, &passes, verify)?;
            io::emit(out.as_deref(), &opt.to_json())?;
            let text = serde_json::to_string_pretty(&rep)?;
            match report {
                Some(p) => io::write_atomic(&p, &text)?,
                None if verify => eprintln!("{text}"),
                None => {}
            }
        }
        Command::Train(args) => {
            let o = args.resolve()?;
            let data = commands::train::load_dataset(&o)?;
            let report = commands::train::run_training(&o, &data)?;
            commands::train::write_outputs(&report, &o.out)?;
            println!(
                "baseline: train r2 {:.4}, test r2 {:.4}",
                report.baseline.train_r2, report.baseline.test_r2
            );
            for m in &report.models {
                println!("{:?}: train r2 {:.4}, test r2 {:.4}", m.model, m.train_r2, m.test_r2);
            }
        }
    }
    Ok(())
}
