//! `tgspectra` — command-line front end for spectral analysis of
//! generalized Cesàro integration operators on Hardy and weighted Bergman
//! spaces.
//!
//! Every subcommand reads a flat key=value configuration (file plus
//! repeatable `--set` overrides, flags win), writes provenance-stamped JSON
//! (and CSV where applicable) under `--out-dir`, prints a one-line summary,
//! and exits with: 0 pass, 1 theorem-fail, 2 configuration error,
//! 3 numerical failure, 4 inconclusive.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Ctx;
use config::{CliError, Config};

#[derive(Parser)]
#[command(name = "tgspectra", version, about = "Spectra of generalized Cesàro operators T_g")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value configuration file; '#' starts a comment.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Set one configuration key (repeatable; wins over the file).
    #[arg(long = "set", value_name = "KEY=VALUE", action = clap::ArgAction::Append)]
    set: Vec<String>,

    /// Worker threads: 0 = library default (TGSPECTRA_THREADS or all cores),
    /// 1 = sequential. Never affects output bytes.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    /// Directory for report files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out_dir: PathBuf,

    /// Basename for report files (default: the subcommand name).
    #[arg(long, value_name = "NAME")]
    out_prefix: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a λ-grid and write the spectrum map as CSV and JSON.
    SpectrumMap(CommonArgs),
    /// Classify a single λ (exit 4 when undecided).
    Classify(CommonArgs),
    /// Compression spectral-radius ladder, optionally with a resolvent
    /// kernel probe at a given λ.
    Radius(CommonArgs),
    /// Muckenhoupt/Békollé-Bonami characteristic of a built-in weight.
    Weights(CommonArgs),
    /// Garnett-Jones level λ(φ) of a boundary function.
    Gj(CommonArgs),
    /// Distance-to-H^∞ proxy report for a symbol.
    Distance(CommonArgs),
    /// Theorem harnesses (exit 0 pass, 1 fail, 4 inconclusive).
    Verify {
        #[arg(value_enum)]
        theorem: Theorem,
        #[command(flatten)]
        args: CommonArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    /// σ(T_{g+h}) = σ(T_g) for quasi-nilpotent perturbations h.
    Stability,
    /// The spectrum is star-shaped about the origin.
    Star,
    /// A circular sector at rλ lies inside the spectrum.
    Sector,
    /// e^{g/λ}-closure test along the spectral axes.
    Closure,
    /// σ(T_g) = {0} certificate.
    Quasinil,
}

fn build_ctx(args: CommonArgs, command: &'static str) -> Result<Ctx, CliError> {
    let mut cfg = Config::load(args.config.as_deref(), &args.set)?;
    if let Some(t) = args.threads {
        cfg.set("threads", &t.to_string());
    }
    let prefix = args
        .out_prefix
        .unwrap_or_else(|| command.replace(' ', "_"));
    Ok(Ctx {
        cfg,
        out_dir: args.out_dir,
        prefix,
        command,
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::SpectrumMap(a) => commands::spectrum_map(&build_ctx(a, "spectrum-map")?),
        Command::Classify(a) => commands::classify(&build_ctx(a, "classify")?),
        Command::Radius(a) => commands::radius(&build_ctx(a, "radius")?),
        Command::Weights(a) => commands::weights(&build_ctx(a, "weights")?),
        Command::Gj(a) => commands::gj(&build_ctx(a, "gj")?),
        Command::Distance(a) => commands::distance(&build_ctx(a, "distance")?),
        Command::Verify { theorem, args } => match theorem {
            Theorem::Stability => commands::verify_stability(&build_ctx(args, "verify stability")?),
            Theorem::Star => commands::verify_star(&build_ctx(args, "verify star")?),
            Theorem::Sector => commands::verify_sector(&build_ctx(args, "verify sector")?),
            Theorem::Closure => commands::verify_closure(&build_ctx(args, "verify closure")?),
            Theorem::Quasinil => commands::verify_quasinil(&build_ctx(args, "verify quasinil")?),
        },
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("tgspectra: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
