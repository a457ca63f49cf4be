use anyhow::{bail, ensure, Result};
use clap::Args;
use gzonoid_core::grf::{
    comparison_field_sandwich, concentration_limit, mc_zero_count_circle, n_r_tau_coarea, n_r_tau_integral, GridSpec,
    HarmonicField, QuadRule, ScalarField, TubeSpec, MIN_RESOLUTION,
};
use gzonoid_core::{MCConfig, Verdict};
use serde::{Deserialize, Serialize};

use super::finite;
use crate::output::Report;
use crate::Context;

pub const DEFAULT_TAUS: [f64; 4] = [1e-1, 3e-2, 1e-2, 3e-3];
pub const DEFAULT_SAMPLES: usize = 100_000;
/// Grid nodes aimed at by the pointwise sandwich check.
pub const SANDWICH_POINTS: f64 = 1000.0;

fn parse_rule(s: &str) -> Result<QuadRule, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| "expected trapezoid or clipped_gauss".to_string())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Deterministic field (manifest only; default sin(2t) on the circle)
    #[arg(skip)]
    pub field: Option<HarmonicField>,
    /// Noise levels τ, comma separated
    #[arg(long, value_delimiter = ',', value_parser = finite)]
    pub tau: Option<Vec<f64>>,
    /// Tube half-width r = α·τ
    #[arg(long, value_parser = finite)]
    pub alpha: Option<f64>,
    /// Tube half-width r = c·τ^s: the coefficient c
    #[arg(long, value_parser = finite)]
    pub r_coef: Option<f64>,
    /// Tube half-width r = c·τ^s: the exponent s
    #[arg(long, value_parser = finite)]
    pub r_exp: Option<f64>,
    /// Grid cells per axis (default: resolve the tube)
    #[arg(long)]
    pub resolution: Option<usize>,
    /// trapezoid or clipped_gauss
    #[arg(long, value_parser = parse_rule)]
    pub rule: Option<QuadRule>,
    /// Root-finding grid spacing for `mc`
    #[arg(long, value_parser = finite)]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Width {
    Scaled(f64),
    Power { coef: f64, exp: f64 },
}

impl Width {
    fn tube(self, tau: f64) -> Result<TubeSpec> {
        Ok(match self {
            Width::Scaled(a) => TubeSpec::scaled(tau, a)?,
            Width::Power { coef, exp } => TubeSpec::new(tau, coef * tau.powf(exp))?,
        })
    }

    /// The α of the τ → 0 limit.
    fn limit_alpha(self) -> f64 {
        match self {
            Width::Scaled(a) => a,
            Width::Power { coef, exp: 1.0 } => coef,
            Width::Power { exp, .. } if exp > 1.0 => 0.0,
            Width::Power { .. } => f64::INFINITY,
        }
    }
}

impl SweepArgs {
    fn field(&self) -> Result<HarmonicField> {
        let f = self.field.clone().unwrap_or_else(HarmonicField::sin2t);
        f.validate()?;
        Ok(f)
    }

    fn taus(&self) -> Result<Vec<f64>> {
        let t = self.tau.clone().unwrap_or_else(|| DEFAULT_TAUS.to_vec());
        ensure!(!t.is_empty(), "--tau needs at least one value");
        Ok(t)
    }

    fn width(&self) -> Result<Width> {
        match (self.alpha, self.r_coef, self.r_exp) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => bail!("give either --alpha or --r-coef/--r-exp"),
            (_, None, None) => Ok(Width::Scaled(self.alpha.unwrap_or(1.0))),
            (None, coef, exp) => Ok(Width::Power {
                coef: coef.unwrap_or(1.0),
                exp: exp.unwrap_or(1.0),
            }),
        }
    }

    fn grid(&self, field: &HarmonicField, tube: &TubeSpec) -> Result<GridSpec> {
        match self.resolution {
            Some(n) => Ok(GridSpec::new(n, self.rule.unwrap_or_default())?),
            None => {
                let mut g = GridSpec::auto(field, tube);
                if let Some(rule) = self.rule {
                    g.rule = rule;
                }
                Ok(g)
            }
        }
    }
}

fn limit_for(field: &HarmonicField, width: Width) -> Option<f64> {
    let vol = field.reduced()?.zero_set_volume()?;
    concentration_limit(field.dim(), width.limit_alpha(), vol).ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Integral,
    Coarea,
    MonteCarlo,
}

#[derive(Serialize, Default)]
struct SweepRow {
    tau: f64,
    r: f64,
    n_integral: Option<f64>,
    n_coarea: Option<f64>,
    n_mc: Option<f64>,
    se: Option<f64>,
    limit: Option<f64>,
    rel_err: Option<f64>,
}

pub fn sweep(id: &str, method: Method, args: &SweepArgs, ctx: &Context) -> Result<Report> {
    let field = args.field()?;
    let width = args.width()?;
    let limit = limit_for(&field, width);
    let samples = ctx.samples.unwrap_or(DEFAULT_SAMPLES);
    let mut report = Report::new(id, args);
    if method == Method::MonteCarlo {
        report = report.seed(ctx.seed);
    }
    for tau in args.taus()? {
        let tube = width.tube(tau)?;
        let mut row = SweepRow {
            tau,
            r: tube.r,
            limit,
            ..SweepRow::default()
        };
        let n = match method {
            Method::Integral => {
                let n = n_r_tau_integral(&field, &tube, &args.grid(&field, &tube)?)?;
                row.n_integral = Some(n);
                n
            }
            Method::Coarea => {
                let n = n_r_tau_coarea(&field, &tube, &args.grid(&field, &tube)?)?;
                row.n_coarea = Some(n);
                n
            }
            Method::MonteCarlo => {
                let est = mc_zero_count_circle(&field, &tube, &MCConfig::new(samples, ctx.seed), args.spacing)?;
                row.n_mc = Some(est.mean);
                row.se = Some(est.std_error);
                est.mean
            }
        };
        row.rel_err = limit.filter(|&l| l > 0.0).map(|l| n / l - 1.0);
        report.row(&row);
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitArgs {
    /// Deterministic field (manifest only; default sin(2t) on the circle)
    #[arg(skip)]
    pub field: Option<HarmonicField>,
    /// Dimension (default: that of the field)
    #[arg(long)]
    pub m: Option<usize>,
    /// r = α·τ
    #[arg(long, value_parser = finite)]
    pub alpha: Option<f64>,
    /// Volume of the zero set (default: that of the field)
    #[arg(long, value_parser = finite)]
    pub volz0: Option<f64>,
}

#[derive(Serialize)]
struct Limit {
    m: usize,
    alpha: f64,
    vol_z0: f64,
    limit: f64,
}

pub fn limit(id: &str, args: &LimitArgs) -> Result<Report> {
    let field = args.field.clone().unwrap_or_else(HarmonicField::sin2t);
    field.validate()?;
    let m = args.m.unwrap_or(field.dim());
    let vol_z0 = match args.volz0 {
        Some(v) => v,
        None => match field.reduced().and_then(|r| r.zero_set_volume()) {
            Some(v) => v,
            None => bail!("zero-set volume of this field is unknown; pass --volz0"),
        },
    };
    let alpha = args.alpha.unwrap_or(1.0);
    Ok(Report::new(id, args).summary(&Limit {
        m,
        alpha,
        vol_z0,
        limit: concentration_limit(m, alpha, vol_z0)?,
    }))
}

#[derive(Serialize)]
struct SandwichRow {
    tau: f64,
    r: f64,
    n_points: usize,
    min_ratio: f64,
    max_ratio: f64,
    violations: usize,
    n_count: f64,
    n_tilde: f64,
    verdict: Verdict,
}

pub fn sandwich(id: &str, args: &SweepArgs) -> Result<Report> {
    let field = args.field()?;
    let width = args.width()?;
    let m = field.dim();
    let resolution = args
        .resolution
        .unwrap_or_else(|| (SANDWICH_POINTS.powf(1.0 / m as f64).round() as usize).max(MIN_RESOLUTION));
    let grid = GridSpec::new(resolution, args.rule.unwrap_or_default())?;
    let mut report = Report::new(id, args);
    let mut all = true;
    for tau in args.taus()? {
        let s = comparison_field_sandwich(&field, &width.tube(tau)?, &grid)?;
        all &= s.verdict.passed();
        report.row(&SandwichRow {
            tau,
            r: s.r,
            n_points: s.n_points,
            min_ratio: s.min_ratio,
            max_ratio: s.max_ratio,
            violations: s.violations,
            n_count: s.n_count,
            n_tilde: s.n_tilde,
            verdict: s.verdict,
        });
    }
    Ok(report.verdict(Verdict::from_bool(all)))
}
