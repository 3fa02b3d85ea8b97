//! Generators, the dense oracle, the four-phase pipeline and reports.

mod generate;
pub mod oracle;
mod pipeline;

pub use generate::{generate, load_dataset, random_orthonormal, save_dataset, Dataset, GeneratorSpec};
pub use oracle::{generalized_eigen, OracleSolution};
pub use pipeline::{
    compare, run_pipeline, Comparison, HzSummary, Input, OracleReport, PhaseSet, PhaseTime, Report, RunConfig,
    RunOutcome,
};
