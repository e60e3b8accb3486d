//! `setscore` command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod demo;
mod input;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "setscore",
    version,
    about = "Score prediction intervals and Vorob'ev quantiles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-case and mean scores of interval or family forecasts.
    Score(ScoreArgs),
    /// Murphy-diagram table of mean elementary scores over a u-grid.
    Murphy(MurphyArgs),
    /// The α-prediction-interval family of a distribution, as CSV.
    Family(FamilyArgs),
    /// The shortest α-prediction intervals of a distribution.
    Si(SiArgs),
    /// Vorob'ev scores of a grid set, or the exact argmin listing.
    Vorobev(VorobevArgs),
    /// Run one of the counterexample demonstrations.
    Demo(DemoArgs),
}

/// Reference measure on the interval plane: unit atoms on a grid.
#[derive(Args, Debug, Clone)]
pub struct MuArgs {
    /// Box "x0,y0,x1,y1" carrying the reference grid.
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    pub mu_box: Option<[f64; 4]>,
    /// Points per axis of the reference grid.
    #[arg(long, default_value_t = 21)]
    pub mu_res: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    /// Mean of `1{y ∈ x} − α` (calibration of selective reports).
    Selective,
    /// Two pinball losses at levels β and α + β.
    Qi,
    /// Fixed lower endpoint `lo`, reported upper endpoint `hi`.
    FixedLeft,
    /// Fixed upper endpoint `hi`, reported lower endpoint `lo`.
    FixedRight,
    /// Centre `(lo + hi)/2` and reported half-width `(hi − lo)/2`.
    FixedMid,
    /// `+inf` outside the interval, transformed width inside.
    Si1,
    /// Normalised exhaustive score of family forecasts (needs --manifest).
    Exhaustive,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformArg {
    Identity,
    Atan,
}

impl From<TransformArg> for setscore::specified_intervals::Transform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Identity => Self::Identity,
            TransformArg::Atan => Self::Atan,
        }
    }
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long, value_enum, default_value = "selective")]
    pub score: ScoreKind,
    #[arg(long)]
    pub alpha: f64,
    /// Lower quantile level for the qi score.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value = "atan")]
    pub transform: TransformArg,
    /// Interval forecasts: CSV with header case_id,lo,hi.
    #[arg(long)]
    pub forecasts: Option<PathBuf>,
    /// Family forecasts: CSV with header case_id,family (paths relative to the manifest).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Observations: CSV with header case_id,y.
    #[arg(long)]
    pub obs: PathBuf,
    #[command(flatten)]
    pub mu: MuArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MurphyArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Forecaster families: CSV with header forecaster,case_id,family.
    #[arg(long, conflicts_with = "dist")]
    pub manifest: Option<PathBuf>,
    #[arg(long, requires = "manifest")]
    pub obs: Option<PathBuf>,
    /// Distribution configs; the first is the truth, each one a forecaster.
    #[arg(long)]
    pub dist: Vec<PathBuf>,
    /// Points per axis of the u-grid (inside --mu-box).
    #[arg(long, default_value_t = 15)]
    pub u_grid: usize,
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    pub mu_box: [f64; 4],
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Equispaced lower endpoints (structural points are added).
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SiArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VorobevArgs {
    /// Random set: JSON {"n": .., "atoms": [{"p": .., "cells": [..]}, ..]}.
    #[arg(long)]
    pub randset: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Cell weights (defaults to counting measure).
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// List every minimiser of the expected score (at most 20 cells).
    #[arg(long, conflicts_with = "grid")]
    pub argmin: bool,
    /// Reported set, in grid-set format.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Observations drawn from the random set.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoName {
    Noninjective,
    Wrapped,
    ProperSubset,
    SiTable,
    GammaLambda,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(value_enum)]
    pub name: DemoName,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Level for si-table.
    #[arg(long, alias = "gamma")]
    pub level: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Right endpoint for proper-subset.
    #[arg(long)]
    pub c: Option<f64>,
    /// Amplitude for wrapped.
    #[arg(long)]
    pub b: Option<f64>,
    /// Periods for wrapped.
    #[arg(long)]
    pub n: Option<usize>,
    /// CSV destination; the verdict always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {t:?}"))
        })
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| "expected four comma-separated numbers x0,y0,x1,y1".to_string())
}

/// Whether the command's checks passed.
pub struct Outcome {
    pub passed: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Score(a) => commands::score(&a),
        Command::Murphy(a) => commands::murphy(&a),
        Command::Family(a) => commands::family(&a),
        Command::Si(a) => commands::si(&a),
        Command::Vorobev(a) => commands::vorobev(&a),
        Command::Demo(a) => demo::run(&a),
    };
    match result {
        Ok(Outcome { passed: true }) => ExitCode::SUCCESS,
        Ok(Outcome { passed: false }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
