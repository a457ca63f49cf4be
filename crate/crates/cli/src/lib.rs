//! The `gzonoid` command line.
//!
//! Every command resolves its parameters from an optional manifest and the
//! flags, runs one library computation and emits a single JSON object or a
//! CSV table. Exit codes: 0 success or PASS, 1 FAIL, 2 usage or manifest
//! error.

pub mod commands;
pub mod manifest;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use gzonoid_core::Verdict;

use commands::{binfty, det, grf, zonoid};
use manifest::{Format, Manifest};
use output::Report;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "gzonoid", version, about = "Gaussian zonoid experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Write the output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON manifest; flags override its fields
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// b∞ and the angle at which it is attained
    Binfty(binfty::BinftyArgs),
    #[command(subcommand)]
    Zonoid(ZonoidCommand),
    /// Expected absolute determinants of Gaussian frames
    #[command(subcommand)]
    Det(DetCommand),
    /// Zero counts of φ + τ·(noise) near {φ = 0}
    #[command(subcommand)]
    Grf(GrfCommand),
}

/// The Gaussian zonoid G(c) and its ellipsoids
#[derive(Debug, Subcommand)]
pub enum ZonoidCommand {
    /// Support functions on a fan of directions
    Support(zonoid::SupportArgs),
    /// Boundary curves in the (axial, radial) half-plane
    Profile(zonoid::ProfileArgs),
    /// Volume of G(c) against its closed-form bounds
    Volume(zonoid::VolumeArgs),
    /// Ellipsoid sandwich on random directions
    Inclusion(zonoid::InclusionArgs),
}

#[derive(Debug, Subcommand)]
pub enum DetCommand {
    /// Monte Carlo E√det(ΓᵗΓ)
    Mc(det::DetArgs),
    /// Mixed-volume bounds
    Bounds(det::DetArgs),
    /// Estimate against bounds
    Check(det::DetArgs),
}

#[derive(Debug, Subcommand)]
pub enum GrfCommand {
    /// τ sweep by direct integration of the zonoid section
    Integral(grf::SweepArgs),
    /// τ sweep by integration over level sets
    Coarea(grf::SweepArgs),
    /// τ sweep by counting zeros of sampled fields (circle only)
    Mc(grf::SweepArgs),
    /// Concentration limit
    Limit(grf::LimitArgs),
    /// Comparison-field sandwich on a grid
    Sandwich(grf::SweepArgs),
}

impl Command {
    pub fn id(&self) -> &'static str {
        match self {
            Command::Binfty(_) => "binfty",
            Command::Zonoid(c) => match c {
                ZonoidCommand::Support(_) => "zonoid support",
                ZonoidCommand::Profile(_) => "zonoid profile",
                ZonoidCommand::Volume(_) => "zonoid volume",
                ZonoidCommand::Inclusion(_) => "zonoid inclusion",
            },
            Command::Det(c) => match c {
                DetCommand::Mc(_) => "det mc",
                DetCommand::Bounds(_) => "det bounds",
                DetCommand::Check(_) => "det check",
            },
            Command::Grf(c) => match c {
                GrfCommand::Integral(_) => "grf integral",
                GrfCommand::Coarea(_) => "grf coarea",
                GrfCommand::Mc(_) => "grf mc",
                GrfCommand::Limit(_) => "grf limit",
                GrfCommand::Sandwich(_) => "grf sandwich",
            },
        }
    }
}

/// Settings shared by all commands after merging flags into the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    pub manifest: Manifest,
    pub seed: u64,
    pub samples: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Context {
    pub fn resolve(global: &Global, command: &str) -> Result<Self> {
        let manifest = match &global.manifest {
            Some(path) => {
                let m = Manifest::load(path)?;
                m.expect_command(command)?;
                m
            }
            None => Manifest::new(command),
        };
        Ok(Self {
            seed: global.seed.or(manifest.seed).unwrap_or(DEFAULT_SEED),
            samples: global.samples.or(manifest.samples),
            format: global.format.or(manifest.format).unwrap_or_default(),
            out: global.out.clone().or_else(|| manifest.out.clone()),
            manifest,
        })
    }
}

pub fn execute(command: &Command, ctx: &Context) -> Result<Report> {
    let id = command.id();
    let m = &ctx.manifest;
    match command {
        Command::Binfty(a) => binfty::run(id, &m.resolve(a)?),
        Command::Zonoid(c) => match c {
            ZonoidCommand::Support(a) => zonoid::support(id, &m.resolve(a)?),
            ZonoidCommand::Profile(a) => zonoid::profile(id, &m.resolve(a)?),
            ZonoidCommand::Volume(a) => zonoid::volume(id, &m.resolve(a)?),
            ZonoidCommand::Inclusion(a) => zonoid::inclusion(id, &m.resolve(a)?, ctx),
        },
        Command::Det(c) => match c {
            DetCommand::Mc(a) => det::mc(id, &m.resolve(a)?, ctx),
            DetCommand::Bounds(a) => det::bounds(id, &m.resolve(a)?, ctx),
            DetCommand::Check(a) => det::check(id, &m.resolve(a)?, ctx),
        },
        Command::Grf(c) => match c {
            GrfCommand::Integral(a) => grf::sweep(id, grf::Method::Integral, &m.resolve(a)?, ctx),
            GrfCommand::Coarea(a) => grf::sweep(id, grf::Method::Coarea, &m.resolve(a)?, ctx),
            GrfCommand::Mc(a) => grf::sweep(id, grf::Method::MonteCarlo, &m.resolve(a)?, ctx),
            GrfCommand::Limit(a) => grf::limit(id, &m.resolve(a)?),
            GrfCommand::Sandwich(a) => grf::sandwich(id, &m.resolve(a)?),
        },
    }
}

fn run(cli: &Cli) -> Result<Option<Verdict>> {
    let ctx = Context::resolve(&cli.global, cli.command.id())?;
    let report = execute(&cli.command, &ctx)?;
    report.emit(ctx.format, ctx.out.as_deref())?;
    Ok(report.verdict)
}

pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(Some(Verdict::Fail)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            eprintln!("see `gzonoid {} --help`", cli.command.id());
            ExitCode::from(2)
        }
    }
}
