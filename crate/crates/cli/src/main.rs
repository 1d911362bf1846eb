//! `dimer-expansion`: matching counts, cluster kernels, the `1/d` series and
//! the `beta` factors from the command line.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dimer_expansion::kernels::{KernelMethod, KernelOptions, Reduction, DEFAULT_BUDGET};
use dimer_expansion::real::DEFAULT_DIGITS;
use serde::Serialize;

use commands::{BetaSelector, KernelArgs, SeriesArgs};
use error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Auto,
    Direct,
    Pattern,
}

impl From<Method> for KernelMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => KernelMethod::Auto,
            Method::Direct => KernelMethod::Direct,
            Method::Pattern => KernelMethod::Pattern,
        }
    }
}

/// Torus side lengths written `9x9` or `9,9`.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Dims(Vec<usize>);

fn parse_dims(text: &str) -> Result<Dims, String> {
    text.split(['x', 'X'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad side `{p}`: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Dims)
}

#[derive(Parser, Debug)]
#[command(
    name = "dimer-expansion",
    version,
    about = "Cluster expansion for dimer covers of tori"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Output file; defaults to $DIMER_EXPANSION_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Maximum number of explicitly enumerated tuples per torus.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Significant digits for decimal output.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS as u64, value_parser = clap::value_parser!(u64).range(10..=1000))]
    precision: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Perfect matchings, Z and lambda_N on one torus.
    Matchings {
        /// Side lengths, e.g. `4,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 36)]
        max_vertices: usize,
    },
    /// Finite-volume kernels Jbar_s and their infinite-volume limits.
    Kernels {
        #[arg(long)]
        s: usize,
        /// Lattice dimension (defaults to that of --tori, else 1).
        #[arg(long)]
        d: Option<usize>,
        /// Fit the 1/d polynomial over several dimensions.
        #[arg(long)]
        all_d: bool,
        /// Dimensions used with --all-d.
        #[arg(long, value_delimiter = ',', requires = "all_d")]
        d_samples: Option<Vec<usize>>,
        /// Explicit tori, e.g. `9x9,9x10,...`.
        #[arg(long, value_delimiter = ',', value_parser = parse_dims)]
        tori: Option<Vec<Dims>>,
        /// Six-term breakdown of Jbar_2 on cycles (needs --s 2).
        #[arg(long, conflicts_with_all = ["all_d", "tori"])]
        appendix: bool,
        /// Cycle lengths used with --appendix.
        #[arg(long, value_delimiter = ',', requires = "appendix")]
        cycles: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Coefficients c_1..c_K of the 1/d expansion of lambda_d.
    Series {
        #[arg(long = "K", visible_alias = "order")]
        order: usize,
        /// Evaluate the partial sum at this dimension.
        #[arg(long)]
        eval_d: Option<usize>,
        /// Kernel result files written by `kernels --all-d`.
        #[arg(long, value_delimiter = ',')]
        kernels: Vec<PathBuf>,
        /// Tori whose finite-volume lambda_N is listed next to the series.
        #[arg(long, value_delimiter = ',', value_parser = parse_dims)]
        oracle: Vec<Dims>,
    },
    /// beta(N, i) against its asymptotic form exp(N g(j)).
    #[command(group = clap::ArgGroup::new("which").required(true).args(["j", "i"]))]
    Beta {
        /// Fixed fraction j = i/N, e.g. `0.25` or `1/4`.
        #[arg(long)]
        j: Option<String>,
        /// Fixed number of perturbed tiles.
        #[arg(long)]
        i: Option<usize>,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Matchings { .. } => "matchings",
            Command::Kernels { appendix: true, .. } => "appendix",
            Command::Kernels { .. } => "kernels",
            Command::Series { .. } => "series",
            Command::Beta { .. } => "beta",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let digits = g.precision as usize;
    let config = serde_json::json!({
        "global": serde_json::to_value(g).expect("config serializes"),
        "command": serde_json::to_value(&cli.command).expect("config serializes"),
    });
    let name = cli.command.name();
    let opts = |method: Method| KernelOptions {
        method: method.into(),
        reduction: Reduction::Anchored,
        budget: g.budget,
    };
    let report = match cli.command {
        Command::Matchings { dims, max_vertices } => {
            commands::matchings(&dims, max_vertices, digits)?
        }
        Command::Kernels {
            s,
            d,
            all_d,
            d_samples,
            tori,
            appendix,
            cycles,
            method,
        } => {
            if appendix {
                if s != 2 || d.is_some_and(|d| d != 1) {
                    return Err(CliError::Config("--appendix needs --s 2 and d = 1".into()));
                }
                commands::appendix(cycles, &opts(method))?
            } else {
                let tori = tori.map(|ts| ts.into_iter().map(|t| t.0).collect());
                commands::kernels(
                    KernelArgs {
                        s,
                        d,
                        all_d,
                        d_samples,
                        tori,
                    },
                    &opts(method),
                )?
            }
        }
        Command::Series {
            order,
            eval_d,
            kernels,
            oracle,
        } => commands::series(
            SeriesArgs {
                order,
                eval_d,
                kernel_files: kernels,
                oracle: oracle.into_iter().map(|d| d.0).collect(),
            },
            &opts(Method::Auto),
            digits,
        )?,
        Command::Beta { j, i, sizes } => {
            let selector = match (j, i) {
                (Some(j), _) => BetaSelector::Fraction(commands::parse_fraction(&j)?),
                (None, Some(i)) => BetaSelector::Index(i),
                (None, None) => unreachable!("clap requires one of --j, --i"),
            };
            commands::beta(selector, &sizes, digits)?
        }
    };
    let text = output::render(name, config, report, g.format)?;
    output::write(output::destination(g.out.as_deref(), name, g.format), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
