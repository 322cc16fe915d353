use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Format;

/// Verification of first integrals of geodesic flows on 2- and 3-step nilpotent Lie groups.
#[derive(Parser, Debug)]
#[command(name = "nilflow", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

/// Algebra selection shared by most verbs.
///
/// Without `--file`, the first positional argument names a catalog entry
/// (`h3`, `n6_19(1)`, `r+n2`, ...); the remaining ones are verb arguments.
#[derive(Args, Debug, Clone)]
pub struct Target {
    /// Algebra definition file (TOML, or JSON with a .json extension).
    #[arg(long)]
    pub file: Option<PathBuf>,

    /// `[ALGEBRA] ARGS...`
    #[arg(value_name = "ARGS")]
    pub args: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog entries, show one, or export them as definition files.
    Catalog {
        name: Option<String>,
        /// Write definition files for the listed entries into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ExportFormat::Toml)]
        export_format: ExportFormat,
    },
    /// Structure of an algebra and first-integral tests for the given specs.
    Check(Target),
    /// Skew-symmetric derivations.
    Derivations(Target),
    /// Killing 2-tensors (symmetric maps with a quadratic first integral).
    Killing2(Target),
    /// Poisson bracket of two integrals: `bracket [ALGEBRA] F G`.
    Bracket(Target),
    /// Pairwise brackets of a set (default: the catalog complete set).
    Involution(Target),
    /// Gradient-rank scan of a set on random samples.
    Independence {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Exact rank on rational samples instead of the SVD path.
        #[arg(long)]
        exact: bool,
        /// Ignore the catalog dense predicate.
        #[arg(long)]
        everywhere: bool,
    },
    /// Integrate the geodesic flow and report drift of first integrals.
    Geodesic {
        #[command(flatten)]
        target: Target,
        /// Initial left-trivialized momentum, comma-separated rationals.
        #[arg(long)]
        y0: Option<String>,
        /// Initial position in exponential coordinates.
        #[arg(long)]
        w0: Option<String>,
        #[arg(long, default_value_t = nilflow::geodesic::DEFAULT_DT)]
        dt: f64,
        #[arg(long = "t", default_value_t = nilflow::geodesic::DEFAULT_T_END)]
        t_end: f64,
        /// Integral specs to monitor (default: the catalog complete set).
        #[arg(long, num_args = 1..)]
        integrals: Vec<String>,
        /// Step-doubling RK4 with this local tolerance.
        #[arg(long)]
        adaptive: Option<f64>,
        /// Also write the trajectory CSV here.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Invariance of quotient-induced integrals under lattice translations.
    Quotient {
        #[command(flatten)]
        target: Target,
        /// Custom lattice `r1,r2,...` (scaled coordinate basis).
        #[arg(long)]
        scales: Option<String>,
        #[arg(long, value_enum, default_value_t = ChartArg::Exponential)]
        chart: ChartArg,
        #[arg(long, num_args = 1..)]
        integrals: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Verify every catalog entry and the isometry homomorphism suite.
    VerifyPaper {
        /// Restrict to these entries.
        #[arg(long, num_args = 1..)]
        entries: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        skip_iso: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ExportFormat {
    Toml,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ChartArg {
    Exponential,
    Matrix,
}

fn run(cli: Cli) -> nilflow::Result<output::Report> {
    use commands::*;
    match cli.command {
        Command::Catalog {
            name,
            export,
            export_format,
        } => catalog(name.as_deref(), export.as_deref(), export_format),
        Command::Check(t) => check(&t),
        Command::Derivations(t) => derivations(&t),
        Command::Killing2(t) => killing2(&t),
        Command::Bracket(t) => bracket(&t),
        Command::Involution(t) => involution(&t),
        Command::Independence {
            target,
            samples,
            seed,
            exact,
            everywhere,
        } => independence(&target, samples, seed, exact, everywhere),
        Command::Geodesic {
            target,
            y0,
            w0,
            dt,
            t_end,
            integrals,
            adaptive,
            csv_out,
        } => geodesic(&GeodesicArgs {
            target,
            y0,
            w0,
            dt,
            t_end,
            integrals,
            adaptive,
            csv_out,
        }),
        Command::Quotient {
            target,
            scales,
            chart,
            integrals,
            samples,
            seed,
        } => quotient(&target, scales.as_deref(), chart, &integrals, samples, seed),
        Command::VerifyPaper {
            entries,
            samples,
            seed,
            exact,
            skip_iso,
        } => verify_paper(&entries, samples, seed, exact, skip_iso),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli).and_then(|r| r.render(format).map(|s| (s, r.passed))) {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
