use std::f64::consts::PI;

use anyhow::{ensure, Result};
use clap::Args;
use gzonoid_core::zonoid::{
    check_inclusion, gaussian_zonoid_volume, support_g, support_gtilde, support_tc_ellipsoid, volume_bounds, BodyKind,
};
use gzonoid_core::{Direction, RevolutionBody};
use serde::{Deserialize, Serialize};

use super::finite;
use crate::output::Report;
use crate::Context;

pub const DEFAULT_DIRECTIONS: usize = 10_000;

fn parse_body(s: &str) -> Result<BodyKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| "expected one of G_of_c, Gtilde_s, Gtilde_infinity, Tc_ellipsoid".to_string())
}

fn means(s: &Option<Vec<f64>>, default: &[f64]) -> Result<Vec<f64>> {
    let s = s.clone().unwrap_or_else(|| default.to_vec());
    ensure!(!s.is_empty(), "--s needs at least one value");
    ensure!(s.iter().all(|&v| v >= 0.0), "--s values must be >= 0");
    Ok(s)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportArgs {
    /// Mean norms ‖c‖, comma separated
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    pub s: Option<Vec<f64>>,
    /// Number of angles in [0, π]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Serialize)]
struct SupportRow {
    s: f64,
    theta: f64,
    support: f64,
    ellipsoid: f64,
    ratio: f64,
    normalized: f64,
}

pub fn support(id: &str, args: &SupportArgs) -> Result<Report> {
    let s_list = means(&args.s, &[0.0, 1.0, 2.0, 3.0])?;
    let n = args.n.unwrap_or(181);
    ensure!(n >= 2, "--n must be >= 2");
    let mut report = Report::new(id, args);
    for &s in &s_list {
        for i in 0..n {
            let theta = PI * i as f64 / (n - 1) as f64;
            let u = Direction::from_angle(theta);
            let (h, e) = (support_g(s, u), support_tc_ellipsoid(s, u));
            report.row(&SupportRow {
                s,
                theta,
                support: h,
                ellipsoid: e,
                ratio: h / e,
                normalized: support_gtilde(s, u),
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileArgs {
    /// Mean norms ‖c‖, comma separated
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    pub s: Option<Vec<f64>>,
    /// Points per curve
    #[arg(long)]
    pub n: Option<usize>,
    /// G_of_c, Gtilde_s, Gtilde_infinity or Tc_ellipsoid
    #[arg(long, value_parser = parse_body)]
    pub body: Option<BodyKind>,
}

#[derive(Serialize)]
struct ProfileRow {
    s: f64,
    theta: f64,
    axial: f64,
    radial: f64,
}

pub fn profile(id: &str, args: &ProfileArgs) -> Result<Report> {
    let s_list = means(&args.s, &[0.0, 1.0, 2.0, 3.0])?;
    let n = args.n.unwrap_or(256);
    let kind = args.body.unwrap_or(BodyKind::GaussianZonoid);
    let mut report = Report::new(id, args);
    for &s in &s_list {
        for p in RevolutionBody::new(kind, s, 2)?.boundary_profile(n)? {
            report.row(&ProfileRow {
                s,
                theta: p.theta,
                axial: p.axial,
                radial: p.radial,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeArgs {
    /// Dimension
    #[arg(long)]
    pub m: Option<usize>,
    /// Mean norms ‖c‖, comma separated
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    pub s: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct VolumeRow {
    m: usize,
    s: f64,
    volume: f64,
    lower_ball: f64,
    lower_cyl: f64,
    upper: f64,
}

pub fn volume(id: &str, args: &VolumeArgs) -> Result<Report> {
    let m = args.m.unwrap_or(2);
    let s_list = means(&args.s, &[0.0])?;
    let mut report = Report::new(id, args);
    for &s in &s_list {
        let b = volume_bounds(m, s)?;
        report.row(&VolumeRow {
            m,
            s,
            volume: gaussian_zonoid_volume(m, s)?,
            lower_ball: b.lower_ball,
            lower_cyl: b.lower_cyl,
            upper: b.upper,
        });
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionArgs {
    /// Dimension
    #[arg(long)]
    pub m: Option<usize>,
    /// Mean norm ‖c‖
    #[arg(long, value_parser = finite)]
    pub s: Option<f64>,
    /// Number of random directions
    #[arg(long)]
    pub n: Option<usize>,
}

pub fn inclusion(id: &str, args: &InclusionArgs, ctx: &Context) -> Result<Report> {
    let r = check_inclusion(
        args.m.unwrap_or(3),
        args.s.unwrap_or(1.0),
        args.n.unwrap_or(DEFAULT_DIRECTIONS),
        ctx.seed,
    )?;
    let mut summary = serde_json::to_value(&r)?;
    if let Some(map) = summary.as_object_mut() {
        map.remove("verdict");
        map.remove("seed");
    }
    Ok(Report::new(id, args).seed(ctx.seed).summary(&summary).verdict(r.verdict))
}
