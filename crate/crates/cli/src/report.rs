use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::pipelines::{Check, CheckKind, RunOutput};

pub const SCHEMA_VERSION: u32 = 1;

/// The JSON summary of one run. Timings live in a separate file so that
/// reruns with the same config produce identical summaries.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub artifact_version: &'static str,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub data_file: String,
    pub status: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub diagnostics: Value,
}

/// Whether a check failure fails the run.
pub fn is_fatal(check: &Check, strict: bool) -> bool {
    !check.passed && (check.kind == CheckKind::Hard || strict)
}

impl RunReport {
    pub fn new(config: &ExperimentConfig, out: &RunOutput) -> Self {
        let failed = out.checks.iter().any(|c| is_fatal(c, config.strict));
        RunReport {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION"),
            command: config.command.name(),
            config: config.clone(),
            data_file: out.data_name.clone(),
            status: if failed { "fail" } else { "pass" },
            checks: out.checks.clone(),
            notes: out.notes.clone(),
            diagnostics: out.diagnostics.clone(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Paths written by [`write_outputs`].
#[derive(Clone, Debug)]
pub struct Written {
    pub data: PathBuf,
    pub summary: PathBuf,
    pub timings: PathBuf,
}

/// Write the data file, the summary and the timings into `dir`.
pub fn write_outputs(dir: &Path, report: &RunReport, out: &RunOutput) -> Result<Written> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let data = dir.join(&out.data_name);
    let summary = dir.join(format!("{}.summary.json", report.command));
    let timings = dir.join(format!("{}.timings.json", report.command));
    std::fs::write(&data, &out.data).with_context(|| format!("writing {}", data.display()))?;
    std::fs::write(&summary, serde_json::to_string_pretty(report)? + "\n")?;
    let t: serde_json::Map<String, Value> = out.timings.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
    std::fs::write(&timings, serde_json::to_string_pretty(&t)? + "\n")?;
    Ok(Written { data, summary, timings })
}
