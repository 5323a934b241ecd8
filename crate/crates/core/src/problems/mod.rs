//! Benchmark objectives and their data sources.

pub mod libsvm;
pub mod logistic;
mod matrix;
pub mod poisson;
pub mod portfolio;
pub mod simple;
pub mod synth;

pub use libsvm::{parse_libsvm, read_libsvm, write_libsvm, LibsvmData};
pub use logistic::LogisticProblem;
pub use matrix::DataMatrix;
pub use poisson::PoissonProblem;
pub use portfolio::PortfolioProblem;
pub use synth::{gen_logistic_data, gen_portfolio_data};
