use std::process::ExitCode;

use clap::Parser;
use dehnforge_cli::commands::{criterion_lines, run, Area, Cli};
use dehnforge_cli::configure_threads;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let start = std::time::Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.to_json_string();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if matches!(cli.area, Area::Accept { .. }) {
        for line in criterion_lines(&report) {
            eprintln!("{line}");
        }
    }
    for c in report.failures() {
        eprintln!("failed: {} metric {:e} tolerance {:e}{}", c.case_id, c.metric, c.tolerance, c.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default());
    }
    eprintln!("{} cases, {} failed, {:.2} s", report.cases.len(), report.failures().count(), start.elapsed().as_secs_f64());
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
