//! Verification suites, their configuration and report emission.
//!
//! [`run_suite`] validates a [`RunConfig`], runs every selected suite,
//! writes one CSV table and one SVG plot per decay curve and a
//! `summary.json` whose bytes depend only on the configuration.

mod config;
mod report;
mod run;

use std::fs;

pub use config::{
    parse_list, BandGrid, RunConfig, SuiteKind, TimeGrid, LOWFREQ_MAX_SHIFT, LOWFREQ_RADII,
    MIN_TAU, SLICE_DATA_RADIUS,
};
pub use report::{Check, Constant, NamedCurve, Status, SuiteReport, Summary};
pub use run::*;

use crate::decay::{write_curve_csv, write_curve_svg, write_json};
use crate::error::Result;

/// Runs every suite without writing files.
pub fn evaluate(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    let suites = cfg
        .selected()
        .into_iter()
        .map(|k| run_one(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Summary {
        config: cfg.clone(),
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

/// Runs the configured suites and writes reports into `cfg.out`.
pub fn run_suite(cfg: &RunConfig) -> Result<Summary> {
    let mut summary = evaluate(cfg)?;
    fs::create_dir_all(&cfg.out)?;
    for suite in &mut summary.suites {
        for c in &suite.curves {
            let csv = format!("{}.csv", c.stem);
            let svg = format!("{}.svg", c.stem);
            write_curve_csv(&cfg.out.join(&csv), &c.curve)?;
            write_curve_svg(&cfg.out.join(&svg), &c.curve, &c.title)?;
            suite.files.push(csv);
            suite.files.push(svg);
        }
    }
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(summary)
}
