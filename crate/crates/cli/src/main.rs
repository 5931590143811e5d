//! `funk`: distances, balls, geodesics, feet and tangent norms on convex domains read
//! from JSON files, plus seeded batteries of numerical checks.
//!
//! Exit codes: 0 when everything holds, 1 when a checked property fails, 2 when the
//! input is rejected.

mod commands;
mod output;
mod suite;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use funk_core::{Point, Tolerances};

use crate::output::parse_point;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Validation(String),
    /// A checked property does not hold: exit code 1.
    Failure(String),
}

impl From<funk_core::Error> for CliError {
    fn from(e: funk_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Funk,
    Rfunk,
    Hilbert,
    Relfunk,
    Maxsym,
}

impl Metric {
    fn name(self) -> &'static str {
        match self {
            Metric::Funk => "funk",
            Metric::Rfunk => "rfunk",
            Metric::Hilbert => "hilbert",
            Metric::Relfunk => "relfunk",
            Metric::Maxsym => "maxsym",
        }
    }
}

/// Settings shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub tol: Tolerances,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl Ctx {
    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        output::emit(self.out.as_deref(), text)
    }
}

#[derive(Parser)]
#[command(name = "funk", version, about = "Funk, reverse Funk and Hilbert geometry of convex domains")]
struct Cli {
    /// Seed for every random choice; recorded in all output headers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override a tolerance, e.g. `--tol eps_rank=1e-6`. Repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    tol: Vec<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two interior points.
    Dist {
        domain: PathBuf,
        #[arg(value_enum)]
        metric: Metric,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        /// Ambient domain for `relfunk`; the whole affine patch when absent.
        #[arg(long)]
        within: Option<PathBuf>,
    },
    /// Boundary samples of a forward (default) or backward ball.
    Ball {
        domain: PathBuf,
        #[arg(allow_hyphen_values = true)]
        x: String,
        rho: f64,
        #[arg(long)]
        backward: bool,
        #[arg(short, long, default_value_t = 64)]
        k: usize,
    },
    /// Geodesic checks.
    Geodesic {
        #[command(subcommand)]
        action: GeodesicAction,
    },
    /// Nearest point of a segment or of a polytope.
    Project {
        domain: PathBuf,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, num_args = 2, value_names = ["P", "Q"], allow_hyphen_values = true, required_unless_present = "target")]
        segment: Option<Vec<String>>,
        /// Polytope file; needs a polytope domain.
        #[arg(long, conflicts_with = "segment")]
        target: Option<PathBuf>,
    },
    /// Tangent norm at P of V, with optional difference quotients at the given steps.
    Tangent {
        domain: PathBuf,
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        v: String,
        #[arg(long, value_delimiter = ',')]
        steps: Vec<f64>,
    },
    /// Run a named battery of checks and print a JSON report.
    Suite {
        name: String,
        /// Sample count for every check in the suite.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GeodesicAction {
    /// Additivity of the distance along a polyline.
    Verify {
        domain: PathBuf,
        #[arg(num_args = 2.., allow_hyphen_values = true, required = true)]
        points: Vec<String>,
        #[arg(long, value_enum, default_value = "funk")]
        metric: Metric,
    },
}

fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("tolerance override {o:?} is not KEY=VAL")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("tolerance value {value:?} is not a number")))?;
        tol.set(key.trim(), value)?;
    }
    Ok(tol)
}

fn points(texts: &[String]) -> Result<Vec<Point>, CliError> {
    texts.iter().map(|t| parse_point(t)).collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx {
        seed: cli.seed,
        tol: tolerances(&cli.tol)?,
        format: cli.format,
        out: cli.out,
    };
    match cli.command {
        Command::Dist { domain, metric, x, y, within } => {
            if within.is_some() && metric != Metric::Relfunk {
                return Err(CliError::Validation("--within only applies to relfunk".into()));
            }
            commands::dist(&ctx, &domain, metric, &parse_point(&x)?, &parse_point(&y)?, within.as_deref())
        }
        Command::Ball { domain, x, rho, backward, k } => {
            commands::ball(&ctx, &domain, &parse_point(&x)?, rho, backward, k)
        }
        Command::Geodesic { action: GeodesicAction::Verify { domain, points: pts, metric } } => {
            commands::geodesic_verify(&ctx, &domain, metric, &points(&pts)?)
        }
        Command::Project { domain, x, segment, target } => {
            let x = parse_point(&x)?;
            match (segment, target) {
                (Some(seg), None) => {
                    let seg = points(&seg)?;
                    commands::project(&ctx, &domain, &x, commands::Target::Segment(&seg[0], &seg[1]))
                }
                (None, Some(t)) => commands::project(&ctx, &domain, &x, commands::Target::Set(Path::new(&t))),
                _ => Err(CliError::Validation("give either --segment P Q or --target FILE".into())),
            }
        }
        Command::Tangent { domain, p, v, steps } => {
            commands::tangent(&ctx, &domain, &parse_point(&p)?, &parse_point(&v)?, &steps)
        }
        Command::Suite { name, samples } => suite::run(&ctx, &name, samples),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failure(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
