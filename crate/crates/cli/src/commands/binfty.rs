use anyhow::Result;
use clap::Args;
use gzonoid_core::zonoid::{b_infinity_grid_scan, compute_b_infinity};
use gzonoid_core::Verdict;
use serde::{Deserialize, Serialize};

use super::finite;
use crate::output::Report;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const SCAN_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinftyArgs {
    /// Tolerance on the minimizing angle
    #[arg(long, value_parser = finite)]
    pub tol: Option<f64>,
    /// Compare with a scan over 10⁶ angles
    #[arg(long)]
    #[serde(default)]
    pub check: bool,
}

#[derive(Serialize)]
struct Scan {
    scan_points: usize,
    scan_b_infinity: f64,
    scan_t_star: f64,
    abs_diff: f64,
}

pub fn run(id: &str, args: &BinftyArgs) -> Result<Report> {
    let tol = args.tol.unwrap_or(DEFAULT_TOL);
    let b = compute_b_infinity(tol)?;
    let report = Report::new(id, args).summary(&b);
    if !args.check {
        return Ok(report);
    }
    let scan = b_infinity_grid_scan(SCAN_POINTS);
    let diff = (scan.value - b.value).abs();
    Ok(report
        .summary(&Scan {
            scan_points: SCAN_POINTS,
            scan_b_infinity: scan.value,
            scan_t_star: scan.t_star,
            abs_diff: diff,
        })
        .verdict(Verdict::from_bool(diff <= tol)))
}
