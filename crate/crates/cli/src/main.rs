mod files;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use richelot::arith::PlaceSet;
use richelot::ctp::{analyze_with, CtpOptions};
use richelot::error::{ArithError, CurveError, DescentError};
use richelot::example;
use richelot::localfield::{hilbert_symbol_classes, LocalPlace, LocalSquareClass};
use richelot::localpoints::{LocalImages, SearchConfig, Side};
use richelot::selmer::selmer_group;

use files::{parse_places, Cache, ConfigEcho, CurveFile, ReportFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid curve: {0}")]
    Curve(#[from] CurveError),
    #[error("invalid input: {0}")]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Unproven(String),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self, strict: bool) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Input(_) | CliError::Curve(_) | CliError::Arith(_) => 2,
            CliError::Descent(DescentError::Curve(_) | DescentError::Arith(_)) => 2,
            CliError::Descent(DescentError::Search(_)) if strict => 3,
            CliError::Unproven(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "richelot", version, about = "Descent by Richelot isogeny and the Cassels-Tate pairing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Residue modulus exponent for local point search.
    #[arg(long, default_value_t = SearchConfig::default().residue_exponent)]
    precision: u32,
    /// Largest |k| in candidates c + r p^k.
    #[arg(long, default_value_t = SearchConfig::default().val_bound)]
    val_bound: u32,
    /// Extra search rounds when a local image is not certified.
    #[arg(long, default_value_t = SearchConfig::default().escalations)]
    escalations: u32,
    /// Exit with status 3 when any local image is only heuristic.
    #[arg(long)]
    strict: bool,
    /// Print the JSON report instead of tables.
    #[arg(long)]
    json: bool,
    /// Keep local image witnesses in this directory between runs.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            val_bound: self.val_bound,
            residue_exponent: self.precision,
            escalations: self.escalations,
            ..SearchConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Phihat,
    Phi,
}

#[derive(Subcommand)]
enum Command {
    /// Codomain of the Richelot isogeny: Delta, L1, L2, L3 and the kernel.
    Isogeny {
        curve: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Selmer group of phi-hat or phi.
    Selmer {
        curve: PathBuf,
        #[arg(long, value_enum, default_value = "phihat")]
        side: SideArg,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Full pipeline: Selmer groups, pairing matrix, rank bounds.
    Ctp {
        curve: PathBuf,
        /// Evaluate the pairing at these places only (diagnostic; global values become partial).
        #[arg(long)]
        places: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Check every published value of the built-in example at k = 113.
    VerifyExample {
        #[command(flatten)]
        search: SearchArgs,
        /// Flip the Hilbert symbol at 3 (used to test that checks bite).
        #[arg(long, hide = true)]
        perturb_symbol: bool,
    },
}

fn perturbed_symbol(a: &LocalSquareClass, b: &LocalSquareClass) -> i8 {
    let s = hilbert_symbol_classes(a, b);
    if a.place() == LocalPlace::Finite(3) && !a.is_trivial() && !b.is_trivial() {
        -s
    } else {
        s
    }
}

fn emit(report: &ReportFile, json: bool) {
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", render::text(report));
    }
}

fn images_for(curve: &richelot::curve::RichelotPair, search: &SearchArgs) -> Result<(LocalImages, Option<Cache>), CliError> {
    let images = LocalImages::new(curve, search.config());
    let cache = match &search.cache_dir {
        Some(dir) => {
            let cache = Cache::load(dir)?;
            cache.restore(&images)?;
            Some(cache)
        }
        None => None,
    };
    Ok((images, cache))
}

fn save(cache: Option<Cache>, search: &SearchArgs, images: &LocalImages) -> Result<(), CliError> {
    match (cache, &search.cache_dir) {
        (Some(c), Some(dir)) => c.store(dir, images),
        _ => Ok(()),
    }
}

fn strict_check(report: &ReportFile, strict: bool) -> Result<(), CliError> {
    if strict && !report.status.certified {
        return Err(CliError::Unproven("some local images are heuristic (--strict)".into()));
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Isogeny { curve, json } => {
            let file = CurveFile::read(&curve)?;
            let c = file.build()?;
            let echo = ConfigEcho {
                search: SearchConfig::default(),
                places: None,
                strict: false,
            };
            emit(&ReportFile::base(&file, &c, echo)?, json);
            Ok(())
        }
        Command::Selmer { curve, side, search } => {
            let file = CurveFile::read(&curve)?;
            let c = file.build()?;
            let (images, cache) = images_for(&c, &search)?;
            let places = c.bad_places()?;
            let side = match side {
                SideArg::Phihat => Side::PhiHat,
                SideArg::Phi => Side::Phi,
            };
            let group = selmer_group(&images, side, &places)?;
            save(cache, &search, &images)?;
            let echo = ConfigEcho {
                search: search.config(),
                places: None,
                strict: search.strict,
            };
            let base = ReportFile::base(&file, &c, echo)?;
            let report = match side {
                Side::PhiHat => base.with_selmer(Some(&group), None),
                Side::Phi => base.with_selmer(None, Some(&group)),
            };
            emit(&report, search.json);
            strict_check(&report, search.strict)
        }
        Command::Ctp { curve, places, search } => {
            let file = CurveFile::read(&curve)?;
            let c = file.build()?;
            let restrict = places.as_deref().map(parse_places).transpose()?;
            let report = pipeline(&file, &c, restrict, &search, &CtpOptions::default())?;
            emit(&report, search.json);
            strict_check(&report, search.strict)
        }
        Command::VerifyExample { search, perturb_symbol } => {
            let options = CtpOptions {
                symbol: if perturb_symbol { perturbed_symbol } else { hilbert_symbol_classes },
                ..CtpOptions::default()
            };
            let checks = example::verify(search.config(), &options);
            if let Some(bad) = checks.iter().find(|c| !c.passed) {
                return Err(CliError::Verification(format!("{}: {}", bad.name, bad.detail)));
            }
            let c = example::curve();
            let file = CurveFile::of_curve(&c, Some("k = 113".into()));
            let report = pipeline(&file, &c, None, &search, &options)?;
            if search.json {
                print!("{}", report.to_json());
            } else {
                for check in &checks {
                    println!("ok  {}", check.name);
                }
                println!("{} checks passed", checks.len());
            }
            strict_check(&report, search.strict)
        }
    }
}

fn pipeline(
    file: &CurveFile,
    c: &richelot::curve::RichelotPair,
    restrict: Option<PlaceSet>,
    search: &SearchArgs,
    options: &CtpOptions,
) -> Result<ReportFile, CliError> {
    let (images, cache) = images_for(c, search)?;
    let pairing_places = restrict.clone().unwrap_or(c.bad_places()?);
    let echo = ConfigEcho {
        search: search.config(),
        places: restrict.as_ref().map(|r| r.primes().to_vec()),
        strict: search.strict,
    };
    let result = analyze_with(&images, restrict, options)?;
    save(cache, search, &images)?;
    Ok(ReportFile::base(file, c, echo)?.with_pipeline(&result, &pairing_places))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let strict = match &cli.command {
        Command::Selmer { search, .. } | Command::Ctp { search, .. } | Command::VerifyExample { search, .. } => {
            search.strict
        }
        Command::Isogeny { .. } => false,
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code(strict))
        }
    }
}
