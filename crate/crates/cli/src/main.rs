use std::process::ExitCode;

use clap::Parser;
use lowlying_cli::args::Cli;
use lowlying_cli::report::is_fatal;
use lowlying_cli::{init_threads, run, write_outputs, RunReport};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(config: &lowlying_cli::ExperimentConfig) -> anyhow::Result<bool> {
    init_threads(config.threads)?;
    let out = run(config)?;
    let report = RunReport::new(config, &out);
    let written = write_outputs(&config.out, &report, &out)?;
    print!("{}", out.data);
    for c in &out.checks {
        let mark = if c.passed { "ok" } else if is_fatal(c, config.strict) { "FAIL" } else { "warn" };
        eprintln!("[{mark}] {} ({:?}): {}", c.name, c.kind, c.detail);
    }
    for n in &out.notes {
        eprintln!("note: {n}");
    }
    eprintln!("{}: {} -> {}", report.command, report.status, written.summary.display());
    Ok(report.passed())
}
