//! `rnaqubo`: fold RNA sequences with QUBO models from the command line.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rnaqubo::dataset::PkClass;
use rnaqubo::trainer::LossKind;
use rnaqubo::Split;

use config::{EnumArgs, ModelArgs, SolverArgs};

#[derive(Debug, Parser)]
#[command(name = "rnaqubo", version, about = "RNA secondary-structure prediction with QUBO models")]
struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List candidate stems and their pairwise relations.
    Enumerate {
        /// Sequence file (FASTA, bare sequence or CT).
        input: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the QUBO for a sequence or a candidate file and write it as JSON.
    Build {
        /// Sequence file, or a candidate file with --candidates.
        input: PathBuf,
        /// Treat INPUT as `enumerate` output instead of a sequence.
        #[arg(long)]
        candidates: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize a QUBO JSON file and report the samples.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict a structure for one sequence, or for every entry of a manifest.
    Predict {
        /// Sequence file, or a manifest with --manifest.
        input: PathBuf,
        /// Treat INPUT as a dataset manifest and score every prediction.
        #[arg(long)]
        manifest: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// CT output file; a directory of `<id>.ct` files with --manifest.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the energy and per-candidate selection table here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare predicted structures with known ones.
    Score {
        /// Predicted CT file, or a manifest with --manifest.
        pred: PathBuf,
        /// Reference CT file (not used with --manifest).
        truth: Option<PathBuf>,
        /// Score `<pred-dir>/<id>.ct` against every manifest entry.
        #[arg(long)]
        manifest: bool,
        #[arg(long, value_name = "DIR")]
        pred_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit model parameters on a manifest with SPSA.
    Train {
        manifest: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Which structures to train on: all, pk or nested.
        #[arg(long, default_value = "all")]
        class: PkClass,
        /// Manifest split to train on; `any` uses every entry.
        #[arg(long, default_value = "train")]
        split: String,
        #[arg(long, default_value_t = 60)]
        iterations: usize,
        /// mcc (1 − mean MCC) or squared (mean (1 − MCC)²).
        #[arg(long, default_value = "mcc")]
        loss: LossKind,
        /// Step gain a; calibrated from the first gradients when omitted.
        #[arg(long)]
        a: Option<f64>,
        /// Perturbation gain c.
        #[arg(long, default_value_t = 0.1)]
        c: f64,
        /// Stability constant A (default 0.1 × iterations).
        #[arg(long = "big-a")]
        big_a: Option<f64>,
        #[arg(long, default_value_t = 0.602)]
        alpha: f64,
        #[arg(long, default_value_t = 0.101)]
        gamma: f64,
        /// Start from the resolved parameters instead of all ones.
        #[arg(long)]
        warm_start: bool,
        /// Parameter file output (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-iteration log output.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Check the closed-form candidate counts against enumeration.
    Complexity {
        /// Odd sequence lengths, e.g. `5-41` or `5,7,9`. Ranges step over
        /// odd values only; an even value given explicitly is an error.
        #[arg(long, default_value = "5-41")]
        n: String,
        /// Minimum stem lengths, e.g. `2-4`.
        #[arg(long, default_value = "2-4")]
        m: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-entry statistics of a dataset manifest.
    DatasetStats {
        manifest: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_split(s: &str) -> anyhow::Result<Option<Split>> {
    match s {
        "any" | "all" => Ok(None),
        other => Ok(Some(other.parse().map_err(anyhow::Error::msg)?)),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    match cli.command {
        Command::Enumerate {
            input,
            model,
            enumeration,
            out,
        } => commands::enumerate(&input, &model, &enumeration, out.as_deref()),
        Command::Build {
            input,
            candidates,
            model,
            enumeration,
            out,
        } => commands::build(&input, candidates, &model, &enumeration, out.as_deref()),
        Command::Solve { input, solver, out } => commands::solve(&input, &solver, out.as_deref()),
        Command::Predict {
            input,
            manifest,
            model,
            enumeration,
            solver,
            out,
            report,
        } => {
            let params = model.resolve()?;
            let cfg = config::predict_config(&enumeration, Some(&solver))?;
            if manifest {
                commands::predict_manifest(&input, &params, &cfg, out.as_deref())
            } else {
                commands::predict_one(&input, &params, &cfg, out.as_deref(), report.as_deref())
            }
        }
        Command::Score {
            pred,
            truth,
            manifest,
            pred_dir,
            out,
        } => {
            if manifest {
                let dir = pred_dir.ok_or_else(|| anyhow::anyhow!("--manifest needs --pred-dir"))?;
                commands::score_manifest(&pred, &dir, out.as_deref())
            } else {
                let truth = truth.ok_or_else(|| anyhow::anyhow!("missing reference CT file"))?;
                commands::score_pair(&pred, &truth, out.as_deref())
            }
        }
        Command::Train {
            manifest,
            model,
            enumeration,
            solver,
            class,
            split,
            iterations,
            loss,
            a,
            c,
            big_a,
            alpha,
            gamma,
            warm_start,
            out,
            log,
        } => {
            let params = model.resolve()?;
            let spsa = rnaqubo::SpsaConfig {
                iterations,
                a,
                c,
                big_a,
                alpha,
                gamma,
                seed: solver.seed,
                initial: warm_start.then(|| params.vector()),
                loss,
            };
            let job = commands::TrainJob {
                manifest: &manifest,
                params,
                predict: config::predict_config(&enumeration, Some(&solver))?,
                spsa,
                split: parse_split(&split)?,
                class,
            };
            commands::train(job, out.as_deref(), log.as_deref())
        }
        Command::Complexity { n, m, out } => commands::complexity(&n, &m, out.as_deref()),
        Command::DatasetStats {
            manifest,
            model,
            enumeration,
            out,
        } => commands::dataset_stats(&manifest, &model, &enumeration, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
