//! Command-line front end for `blaschke_lab`: sequence and config files,
//! experiment dispatch and deterministic report emission.

pub mod config;
pub mod emit;
pub mod error;
pub mod pipeline;
pub mod report;

pub use config::{ExperimentConfig, Kind, SequenceFile, SequenceMeta, SequenceSource, TargetSpec};
pub use emit::{emit, render, Format};
pub use error::{CliError, CliResult};
pub use pipeline::run;
pub use report::ReportBundle;

/// Environment variable capping the worker threads (0 or unset: automatic).
pub const THREADS_ENV: &str = "BLASCHKE_LAB_THREADS";

/// Configure the global thread pool from [`THREADS_ENV`].
pub fn init_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::config(format!(
            "{THREADS_ENV} must be a non-negative integer, got {value:?}"
        ))
    })?;
    if threads > 0 {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}
