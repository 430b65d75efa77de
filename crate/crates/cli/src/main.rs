//! Command-line front end: residual verification and scans of the explicit solution
//! families, inequality experiments, sharpness counterexamples and section measurements.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use affmax::Error;
use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "affmax", version, about = "Numerical laboratory for affine maximal type hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

/// Flags shared by every command. Values given here override the config file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid resolutions, comma separated (refinement levels).
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// Numeric gate tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for sampled points (default 1).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (outputs do not depend on this).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// One of 8.1, 8.2, 9.1, 9.1cor, 10.1, 10.2.
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// default, quadratic, high or tw-paper.
    #[arg(long)]
    pub variant: Option<String>,
    /// Family spec document: a file path or inline JSON.
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Residual of the operator at random interior points of a solution family.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Per-θ residual table over a θ grid `lo:hi:step` (open ends).
    Scan {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "theta-range")]
        theta_range: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Inequality checks over a corpus at each grid level.
    Inequality {
        #[arg(value_enum)]
        check: Check,
        #[arg(long, value_enum, default_value = "standard")]
        corpus: Corpus,
        /// Lower level for the gradient and cone checks.
        #[arg(long, default_value_t = -0.75, allow_hyphen_values = true)]
        s: f64,
        /// Upper level for the gradient and cone checks.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Dilation factor for the lower-bound lemma.
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
    },
    /// Sharpness counterexample bundles.
    Counterexample {
        #[command(subcommand)]
        which: Counterexample,
    },
    /// Symmetric exponent vector of a product family for a given θ.
    SolveAlpha {
        #[arg(long, value_enum)]
        variant: ProductKind,
        #[arg(long)]
        theta: f64,
        #[arg(long = "N")]
        n: usize,
    },
    /// Measurements on sub-level sections of a family.
    Measure {
        #[arg(value_enum)]
        what: Measure,
        #[command(flatten)]
        family: FamilyArgs,
        /// Base point, comma separated; the origin by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        /// Section height.
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        /// Dilation factors for the doubling ratio.
        #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7")]
        sigma: Vec<f64>,
        /// Offset for the halving ratio, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Option<Vec<f64>>,
    },
}

#[derive(Debug, Subcommand)]
enum Counterexample {
    /// `|x|^β − 1` on the unit ball.
    Power {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long = "N", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// The slab family `ζ(x₁)|x'|² − η(x₁)`.
    Section3 {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        lambda: f64,
        /// Seminorm exponents, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Convexity verification points.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    C1n,
    Gradient,
    Cone,
    Lemma42,
    Lemma43,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Corpus {
    Standard,
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProductKind {
    Halfspace,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Doubling,
    Average,
    Halving,
    John,
}

/// Why a run did not pass.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or a violated precondition.
    Usage(String),
    /// A numeric gate was evaluated and failed; the report was still written.
    Gate(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Gate(_) => 1,
            Failure::Io(_) => 3,
            Failure::Core(e) => match e {
                Error::InvalidParameter(_)
                | Error::ThetaOutOfRange(_)
                | Error::BoundaryCondition(_)
                | Error::OutsideDomain { .. }
                | Error::DimensionMismatch { .. }
                | Error::UnsupportedDimension { .. }
                | Error::IndexOutOfRange { .. } => 2,
                Error::NonIntegrable(_) | Error::ConvexityViolation(_) | Error::Unbounded(_) => 1,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage: {m}"),
            Failure::Gate(m) => format!("fail: {m}"),
            Failure::Core(e) => format!("error: {e}"),
            Failure::Io(m) => format!("io: {m}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let name = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Scan { .. } => "scan",
        Command::Inequality { .. } => "inequality",
        Command::Counterexample { .. } => "counterexample",
        Command::SolveAlpha { .. } => "solve-alpha",
        Command::Measure { .. } => "measure",
    };
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(Failure::Usage(format!("config is for command '{c}', not '{name}'")));
        }
    }
    let ctx = cfg.merge_common(&cli.common);
    let workers = ctx.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Verify { family, samples } => {
            commands::verify(&ctx, &cfg.merge_family(&family), samples.or(cfg.samples))
        }
        Command::Scan { family, theta_range, samples } => commands::scan(
            &ctx,
            &cfg.merge_family(&family),
            theta_range.or(cfg.theta_range.clone()),
            samples.or(cfg.samples),
        ),
        Command::Inequality { check, corpus, s, t, sigma } => commands::inequality(&ctx, check, corpus, s, t, sigma),
        Command::Counterexample { which } => match which {
            Counterexample::Power { beta, alpha, n, levels } => commands::power(&ctx, n, beta, alpha, levels),
            Counterexample::Section3 { n, gamma, lambda, alpha, levels, samples } => {
                commands::section3(&ctx, n, gamma, lambda, &alpha, levels, samples.or(cfg.samples))
            }
        },
        Command::SolveAlpha { variant, theta, n } => commands::solve_alpha(&ctx, variant, theta, n),
        Command::Measure { what, family, x0, height, sigma, z } => {
            commands::measure(&ctx, what, &cfg.merge_family(&family), x0, height, &sigma, z)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
