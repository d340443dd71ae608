//! `spareshare` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use spareshare::experiment::{run_experiment, ExperimentConfig, Preset};
use spareshare::{
    enhance, estimate_curve_mc, exact_curve_offline, exact_curve_policy, generate_balanced_ring,
    generate_random, parse_network, run_sequence, serialize_network, Curve, EnhancementStrategy,
    EssentialityMode, FaultSequence, Policy, PolicyKind, Rational, Scalar, SpareNetwork, TieBreak,
};

#[derive(Debug, Parser)]
#[command(name = "spareshare", version, about = "Repairability of spare-sharing networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random or balanced-ring network.
    Gen {
        #[arg(long)]
        units: usize,
        #[arg(long)]
        spares: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evenly spread edges instead of random ones.
        #[arg(long)]
        ring: bool,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Repairability curve of a network under a replacement policy.
    Eval {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value = "pe+pp")]
        policy: PolicyKind,
        #[arg(long, default_value = "seeded")]
        tiebreak: TieBreak,
        #[arg(long, default_value = "include")]
        essentiality: EssentialityMode,
        #[arg(long)]
        fmax: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Enumerate every sequence instead of sampling (lowest-index ties).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Step-by-step repair trace of one fault sequence.
    Trace {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value = "pe+pp")]
        policy: PolicyKind,
        #[arg(long, default_value = "seeded")]
        tiebreak: TieBreak,
        #[arg(long, default_value = "include")]
        essentiality: EssentialityMode,
        /// Comma-separated 0-based unit indices.
        #[arg(long, alias = "seq", value_delimiter = ',', required = true)]
        faults: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Add extra edges to a network.
    Enhance {
        #[arg(long)]
        net: PathBuf,
        #[arg(short = 'k', long)]
        k: usize,
        #[arg(long, default_value = "full")]
        strategy: EnhancementStrategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Exact offline-optimal repairability curve.
    Oracle {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        fmax: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run an ensemble experiment preset and write CSVs.
    Experiment {
        #[arg(long)]
        preset: Preset,
        #[arg(long, default_value_t = 100)]
        networks: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, default_value = "include")]
        essentiality: EssentialityMode,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_network(path: &Path) -> Result<SpareNetwork> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_network(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn csv_of<T: Scalar>(curve: Result<Curve<T>, spareshare::Error>) -> Result<String> {
    Ok(curve?.to_csv())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            units,
            spares,
            edges,
            seed,
            ring,
            out,
        } => {
            let net = if ring {
                generate_balanced_ring(units, spares, edges)?
            } else {
                generate_random(units, spares, edges, seed)?
            };
            emit(out.as_deref(), &serialize_network(&net))
        }
        Command::Eval {
            net,
            policy,
            tiebreak,
            essentiality,
            fmax,
            trials,
            seed,
            exact,
            csv,
        } => {
            let net = read_network(&net)?;
            let mut policy = Policy::new(policy).with_essentiality(essentiality);
            let text = if exact {
                policy = policy.with_tiebreak(TieBreak::LowestIndex);
                csv_of(exact_curve_policy::<Rational>(&net, &policy, fmax))?
            } else {
                policy = policy.with_tiebreak(tiebreak);
                csv_of(estimate_curve_mc::<f64>(&net, &policy, fmax, trials, seed))?
            };
            emit(csv.as_deref(), &text)
        }
        Command::Trace {
            net,
            policy,
            tiebreak,
            essentiality,
            faults,
            seed,
        } => {
            let net = read_network(&net)?;
            let seq = FaultSequence::new(&net, faults)?;
            let policy = Policy::new(policy)
                .with_tiebreak(tiebreak)
                .with_essentiality(essentiality);
            let outcome = run_sequence(&net, &seq, &policy, seed)?;
            emit(None, &outcome.trace(&seq).to_string())
        }
        Command::Enhance {
            net,
            k,
            strategy,
            seed,
            out,
        } => {
            let net = read_network(&net)?;
            let enhanced = enhance(&net, k, strategy, seed)?;
            emit(out.as_deref(), &serialize_network(&enhanced))
        }
        Command::Oracle { net, fmax, csv } => {
            let net = read_network(&net)?;
            let text = csv_of(exact_curve_offline::<Rational>(&net, fmax))?;
            emit(csv.as_deref(), &text)
        }
        Command::Experiment {
            preset,
            networks,
            trials,
            seed,
            workers,
            essentiality,
            out,
        } => {
            let mut config = ExperimentConfig::preset(preset)
                .with_scale(networks, trials)
                .with_seed(seed)
                .with_workers(workers);
            config.essentiality = essentiality;
            let report = run_experiment(&config)?;
            if out.exists() && !out.is_dir() {
                bail!("{} exists and is not a directory", out.display());
            }
            report.write_to(&out)?;
            emit(None, &report.summary_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
