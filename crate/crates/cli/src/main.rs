//! `kgdisp`: run the dispersive-estimate verification suites.
//!
//! Exit status is 0 when every invariant holds, 1 when any fails and 2 when
//! the configuration is invalid or a suite cannot run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kgdisp_core::suite::{parse_list, run_suite, RunConfig, Status, SuiteKind, Summary, TimeGrid};
use kgdisp_core::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "kgdisp",
    version,
    about = "Klein-Gordon dispersive estimate verification"
)]
struct Args {
    /// TOML run configuration; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suites to run (comma separated): energy, sobolev, entoinfty, prop2,
    /// lowfreq, highfreq, interpolation, lp, partition, all.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<SuiteKind>,
    #[arg(long)]
    dim: Option<usize>,
    /// Points per axis (a power of two).
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    box_length: Option<f64>,
    /// Mass m0.
    #[arg(long)]
    mass: Option<f64>,
    /// Upper end M of the admissible mass range.
    #[arg(long)]
    max_mass: Option<f64>,
    /// Comma-separated band indices.
    #[arg(long)]
    bands: Option<String>,
    /// Comma-separated slice parameters.
    #[arg(long)]
    taus: Option<String>,
    /// `start:stop:count` (geometric) or a comma-separated list.
    #[arg(long)]
    times: Option<TimeGrid>,
    #[arg(long)]
    seed: Option<u64>,
    /// Randomized data sets per family.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Args {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::desk(self.dim.unwrap_or(1))?,
        };
        if let Some(d) = self.dim {
            cfg.dim = d;
        }
        if let Some(n) = self.grid_n {
            cfg.grid_n = n;
        }
        if let Some(l) = self.box_length {
            cfg.box_length = l;
        }
        if let Some(m) = self.mass {
            cfg.mass = m;
        }
        if let Some(m) = self.max_mass {
            cfg.max_mass = m;
        }
        if let Some(b) = &self.bands {
            cfg.bands = parse_list(b)?;
        }
        if let Some(t) = &self.taus {
            cfg.taus = parse_list(t)?;
        }
        if let Some(t) = &self.times {
            cfg.times = t.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if !self.suite.is_empty() {
            cfg.suites = self.suite.clone();
        }
        Ok(cfg)
    }
}

fn print_summary(summary: &Summary, cfg: &RunConfig) {
    for s in &summary.suites {
        let verdict = if s.passed { "PASS" } else { "FAIL" };
        let skipped = s
            .checks
            .iter()
            .filter(|c| c.status == Status::Skipped)
            .count();
        println!(
            "{verdict}  {:<14} {} checks, {} skipped",
            s.suite.name(),
            s.checks.len(),
            skipped
        );
        for c in s.failures() {
            println!(
                "        {}: {} {} {}{}",
                c.name,
                c.value,
                c.relation,
                c.limit,
                c.note
                    .as_deref()
                    .map(|n| format!(" ({n})"))
                    .unwrap_or_default()
            );
        }
    }
    println!(
        "summary written to {}",
        cfg.out.join("summary.json").display()
    );
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = args
        .config()
        .and_then(|cfg| run_suite(&cfg).map(|s| (cfg, s)));
    match result {
        Ok((cfg, summary)) => {
            print_summary(&summary, &cfg);
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e @ Error::InvalidConfig(_)) | Err(e @ Error::Config(_)) => {
            eprintln!("kgdisp: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("kgdisp: cannot complete the run: {e}");
            ExitCode::from(2)
        }
    }
}
