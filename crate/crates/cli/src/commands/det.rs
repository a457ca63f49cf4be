use anyhow::{bail, ensure, Result};
use clap::Args;
use gzonoid_core::mc::DEFAULT_CHUNK;
use gzonoid_core::randet::{check_randet_bounds, frame_bounds, mc_expected_absdet, Bounds, FrameSpec};
use gzonoid_core::{GaussianVectorSpec, MCConfig};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::finite;
use crate::output::Report;
use crate::Context;

pub const DEFAULT_SAMPLES: usize = 100_000;

/// One column law `M(c + ξ)`; `M` is given by rows and defaults to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSpec {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<Vec<f64>>>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetArgs {
    /// Ambient dimension
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of iid columns (default m)
    #[arg(long)]
    pub k: Option<usize>,
    /// Common mean c of iid standard columns, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = finite)]
    pub c: Option<Vec<f64>>,
    /// Explicit column laws (manifest only)
    #[arg(skip)]
    pub columns: Option<Vec<ColumnSpec>>,
    /// Monte Carlo chunk size
    #[arg(long)]
    pub chunk: Option<usize>,
    /// Judge against bounds halved on purpose; must FAIL
    #[arg(long)]
    #[serde(default)]
    pub self_test: bool,
}

fn column(m: usize, spec: &ColumnSpec) -> Result<GaussianVectorSpec> {
    let map = match &spec.map {
        None => DMatrix::identity(m, m),
        Some(rows) => {
            ensure!(rows.len() == m && rows.iter().all(|r| r.len() == m), "M must be {m}x{m}");
            DMatrix::from_fn(m, m, |i, j| rows[i][j])
        }
    };
    Ok(GaussianVectorSpec::new(map, DVector::from_vec(spec.c.clone()))?)
}

impl DetArgs {
    pub fn frame(&self) -> Result<FrameSpec> {
        if let Some(cols) = &self.columns {
            if self.c.is_some() {
                bail!("give either `c` or `columns`, not both");
            }
            ensure!(!cols.is_empty(), "`columns` is empty");
            let m = self.m.unwrap_or(cols[0].c.len());
            if let Some(k) = self.k {
                ensure!(k == cols.len(), "k = {k} but {} columns given", cols.len());
            }
            let cols = cols.iter().map(|c| column(m, c)).collect::<Result<Vec<_>>>()?;
            return Ok(FrameSpec::new(m, cols)?);
        }
        let m = self.m.or(self.c.as_ref().map(Vec::len)).unwrap_or(2);
        let c = self.c.clone().unwrap_or_else(|| vec![0.0; m]);
        ensure!(c.len() == m, "c has length {}, expected m = {m}", c.len());
        let col = column(m, &ColumnSpec { map: None, c })?;
        Ok(FrameSpec::iid(m, self.k.unwrap_or(m), col)?)
    }

    fn config(&self, ctx: &Context) -> MCConfig {
        MCConfig::new(ctx.samples.unwrap_or(DEFAULT_SAMPLES), ctx.seed).with_chunk_size(self.chunk.unwrap_or(DEFAULT_CHUNK))
    }
}

#[derive(Serialize)]
struct Frame {
    m: usize,
    k: usize,
}

pub fn mc(id: &str, args: &DetArgs, ctx: &Context) -> Result<Report> {
    let spec = args.frame()?;
    let est = mc_expected_absdet(&spec, &args.config(ctx))?;
    Ok(Report::new(id, args)
        .seed(ctx.seed)
        .summary(&Frame { m: spec.m(), k: spec.k() })
        .summary(&est))
}

pub fn bounds(id: &str, args: &DetArgs, ctx: &Context) -> Result<Report> {
    let spec = args.frame()?;
    let fb = frame_bounds(&spec, &args.config(ctx))?;
    Ok(Report::new(id, args)
        .seed(ctx.seed)
        .summary(&Frame { m: spec.m(), k: spec.k() })
        .summary(&fb))
}

#[derive(Serialize)]
struct Corrupted {
    self_test: bool,
    corrupted_bounds: Bounds,
}

pub fn check(id: &str, args: &DetArgs, ctx: &Context) -> Result<Report> {
    let spec = args.frame()?;
    let r = check_randet_bounds(&spec, &args.config(ctx))?;
    let mut summary = serde_json::to_value(&r)?;
    if let Some(map) = summary.as_object_mut() {
        map.remove("verdict");
    }
    let report = Report::new(id, args).seed(ctx.seed).summary(&summary);
    if !args.self_test {
        return Ok(report.verdict(r.verdict));
    }
    let corrupted = Bounds {
        lower: 0.5 * r.bounds.lower,
        upper: 0.5 * r.bounds.upper,
    };
    Ok(report
        .summary(&Corrupted {
            self_test: true,
            corrupted_bounds: corrupted,
        })
        .verdict(r.judge(corrupted)))
}
