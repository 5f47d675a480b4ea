use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use intertwine::report::VerificationReport;
use rayon::prelude::*;

use crate::config::{self, RunConfig, RunContext};

/// Flat table of reports: `check,lhs,rhs,diff,tol_or_se,pass`, numbers in
/// shortest round-trip form.
pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("check,lhs,rhs,diff,tol_or_se,pass\n");
    for r in reports {
        writeln!(out, "{},{},{},{},{},{}", r.check, r.lhs, r.rhs, r.abs_diff, r.tol_or_se(), r.pass)
            .expect("writing to a String");
    }
    out
}

/// Runs every check, in parallel, keeping declaration order.
pub fn execute(cfg: &RunConfig, seed: Option<u64>, samples: Option<usize>) -> Result<Vec<VerificationReport>> {
    let base = seed.or(cfg.seed);
    let contexts: Vec<RunContext> = (0..cfg.checks.len())
        .map(|i| RunContext {
            // each check gets its own seed so reordering others does not matter
            seed: base.map(|s| s.wrapping_add(i as u64)),
            samples: samples.or(cfg.samples),
        })
        .collect();
    for (i, (check, ctx)) in cfg.checks.iter().zip(&contexts).enumerate() {
        check.validate(ctx).with_context(|| format!("check {i}"))?;
    }
    cfg.checks
        .par_iter()
        .zip(contexts.par_iter())
        .enumerate()
        .map(|(i, (check, ctx))| {
            let start = Instant::now();
            let report = check.run(ctx).with_context(|| format!("check {i}"))?;
            Ok(report.timed(start.elapsed()))
        })
        .collect()
}

fn write_outputs(name: &str, out: &Path, reports: &[VerificationReport]) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let json_path = out.join(format!("{name}.json"));
    let csv_path = out.join(format!("{name}.csv"));
    let json = serde_json::to_string_pretty(reports)? + "\n";
    std::fs::write(&json_path, json).with_context(|| format!("cannot write {}", json_path.display()))?;
    std::fs::write(&csv_path, to_csv(reports)).with_context(|| format!("cannot write {}", csv_path.display()))?;
    Ok(())
}

/// Exit 0 when every check passes, 1 on any failure, 2 on configuration or I/O errors.
pub fn run(path: &Path, seed: Option<u64>, samples: Option<usize>, out: &Path) -> ExitCode {
    let cfg = match config::load(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let reports = match execute(&cfg, seed, samples) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {}: {e:#}", path.display());
            return ExitCode::from(2);
        }
    };
    let name = cfg
        .name
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .ok_or_else(|| anyhow!("cannot derive a report name from {}", path.display()));
    if let Err(e) = name.and_then(|name| write_outputs(&name, out, &reports)) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    for r in &reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<28} lhs={:<24} rhs={:<24} tol_or_se={:.3e} ({:.2?})",
            r.check,
            r.lhs,
            r.rhs,
            r.tol_or_se(),
            r.wall_time
        );
    }
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
