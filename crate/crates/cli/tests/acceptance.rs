//! Acceptance run: one line per criterion, nonzero exit if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use dehnforge_cli::suites::{accept, time_budget, Profile, CRITERIA};

const SEED: u64 = 20_261_017;

fn main() -> ExitCode {
    let mut all = true;
    println!("acceptance suite, profile full, seed {SEED}");
    for c in &CRITERIA {
        let start = Instant::now();
        let cases = c.run(Profile::Full, SEED);
        let secs = start.elapsed().as_secs_f64();
        let passed = cases.iter().filter(|x| x.pass).count();
        let worst = cases.iter().filter(|x| x.tolerance > 0.0).map(|x| x.metric).fold(0.0, f64::max);
        let in_budget = time_budget(c.id).is_none_or(|b| secs < b);
        let ok = !cases.is_empty() && passed == cases.len() && in_budget;
        all &= ok;
        let budget = time_budget(c.id).map(|b| format!(", budget {b} s")).unwrap_or_default();
        println!(
            "{} {} {}/{} cases, worst measured metric {worst:.3e}, {secs:.2} s{budget}: {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            passed,
            cases.len(),
            c.title
        );
        for f in cases.iter().filter(|x| !x.pass) {
            println!("    failed {} metric {:e} tolerance {:e} {}", f.case_id, f.metric, f.tolerance, f.detail.as_deref().unwrap_or(""));
        }
    }
    let a = accept(Profile::Fast, SEED).to_json_string();
    let deterministic = a == accept(Profile::Fast, SEED).to_json_string();
    println!("{} reports are byte-identical for equal seeds", if deterministic { "PASS" } else { "FAIL" });
    all &= deterministic;
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
