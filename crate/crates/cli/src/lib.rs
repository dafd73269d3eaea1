//! Driver for the lowlying experiments: configuration, pipelines and reports.

pub mod args;
pub mod config;
pub mod pipelines;
pub mod report;

pub use config::{Command, ConfigError, ExperimentConfig};
pub use pipelines::{run, Check, CheckKind, RunOutput};
pub use report::{write_outputs, RunReport};

/// Install the global thread pool once, if a thread count was configured.
pub fn init_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
