//! One line per acceptance criterion. Runs without the libtest harness so the
//! PASS/FAIL lines are always printed.
//!
//! `EULER2C_ACCEPTANCE=quick` selects the reduced grids. Positional arguments
//! filter criteria by name substring.

use std::process::ExitCode;

use euler2c::verify::{check_name, run_check, CheckResult, Level, CHECK_COUNT};

const SEED: u64 = 20240611;

fn level() -> Level {
    match std::env::var("EULER2C_ACCEPTANCE").as_deref() {
        Ok("quick") => Level::Quick,
        _ => Level::Full,
    }
}

fn report(r: &CheckResult, over_budget: bool) {
    let status = if r.passed && !over_budget { "PASS" } else { "FAIL" };
    println!("[{status}] {:>2} {:<30} {:>8.3}s  {}", r.id, r.name, r.elapsed.as_secs_f64(), r.summary);
    if over_budget {
        println!("       over budget {:?}", r.budget.unwrap());
    }
    for (k, v) in &r.metrics {
        println!("       {k} = {v:e}");
    }
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let lvl = level();
    println!("acceptance ({lvl:?}, seed {SEED})");
    let mut failed = Vec::new();
    for id in 1..=CHECK_COUNT {
        let name = check_name(id);
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let r = run_check(id, lvl, SEED);
        let over = lvl == Level::Full && r.budget.is_some_and(|b| r.elapsed > b);
        report(&r, over);
        if !r.passed || over {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
