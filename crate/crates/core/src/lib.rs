//! Variational quantum regression toolkit.
//!
//! Builds the data-encoding and coefficient circuits of a quantum linear
//! regression model, shrinks them with Pauli pushing, phase folding and
//! Hadamard pushing, simulates them with post-selection and noise, and trains
//! the coefficient angles.
//!
//! ```
//! use vqreg::synthesis::{build_regression_circuit, BuildMode, DataTable, RegressionParams};
//!
//! let table = DataTable::from_rows(&[vec![0.5, 0.2], vec![-0.1, 0.4]])?.normalized()?;
//! let params = RegressionParams::new(vec![0.7, 0.9])?;
//! let (circuit, layout) = build_regression_circuit(&table, &params, BuildMode::Optimized)?;
//! assert_eq!(circuit.counts().total(), 2 * (layout.k_pad() + layout.m_pad()));
//! # Ok::<(), vqreg::Error>(())
//! ```

pub mod circuit;
pub mod error;
pub mod optimizer;
pub mod simulator;
pub mod synthesis;
pub mod trainer;
pub mod unitary;

pub use circuit::{Basis, Circuit, CountReport, Gate, PostSelection};
pub use error::{Error, Result};
