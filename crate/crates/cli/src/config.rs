//! Options shared by the subcommands and their resolution into library
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use rnaqubo::dataset::{read_ct, read_sequence};
use rnaqubo::{LoopPenaltyTable, ModelKind, ModelParams, NnTable, PredictConfig, RnaSequence, SolveMethod, SolveRequest};

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model number (1, 2 or 3). Defaults to the model named in --params, else 1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub model: Option<u8>,

    /// Parameter file (`key<TAB>value` lines).
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,

    /// Named parameter preset: paper-2022 or ones.
    #[arg(long, value_name = "NAME", default_value = "paper-2022")]
    pub params_preset: String,

    /// Override a single parameter, e.g. `--set c_l=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl ModelArgs {
    /// Preset, then file, then inline overrides.
    pub fn resolve(&self) -> Result<ModelParams> {
        let file = match &self.params {
            Some(p) => Some(fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
            None => None,
        };
        let kind = match (self.model, &file) {
            (Some(n), _) => ModelKind::from_number(n).expect("range-checked by clap"),
            (None, Some(text)) => ModelParams::from_tsv(text)
                .with_context(|| format!("parsing {}", self.params.as_ref().unwrap().display()))?
                .kind(),
            (None, None) => ModelKind::One,
        };
        let mut params = ModelParams::preset(kind, &self.params_preset)?;
        if let Some(text) = &file {
            params = ModelParams::merge_tsv(params, text)
                .with_context(|| format!("parsing {}", self.params.as_ref().unwrap().display()))?;
        }
        for o in &self.overrides {
            let Some((k, v)) = o.split_once('=') else {
                bail!("--set expects KEY=VALUE, got {o:?}");
            };
            let v: f64 = v.trim().parse().with_context(|| format!("bad value in --set {o}"))?;
            params.set(k.trim(), v)?;
        }
        Ok(params)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnumArgs {
    /// Minimum hairpin loop length.
    #[arg(long, default_value_t = 3)]
    pub min_loop: usize,

    /// Minimum stem length m.
    #[arg(long, default_value_t = 2)]
    pub stem_min: usize,

    /// Stacking-energy table replacing the built-in one.
    #[arg(long, value_name = "FILE")]
    pub stack_table: Option<PathBuf>,

    /// Loop-penalty table replacing the built-in one.
    #[arg(long, value_name = "FILE")]
    pub loop_table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// exhaustive, sa or tabu.
    #[arg(long, default_value = "sa")]
    pub solver: SolveMethod,

    /// Independent restarts (SA and tabu).
    #[arg(long, default_value_t = 8)]
    pub reads: usize,

    /// Sweeps per simulated-annealing read.
    #[arg(long, default_value_t = 1000)]
    pub sweeps: usize,

    /// Iterations per tabu read (default 200 + 50 n).
    #[arg(long)]
    pub tabu_iterations: Option<usize>,

    /// Tabu tenure (default clamp(n / 4, 1, 20)).
    #[arg(long)]
    pub tenure: Option<usize>,

    /// Largest problem the exhaustive solver accepts.
    #[arg(long, default_value_t = 128)]
    pub exhaustive_cap: usize,

    /// Random seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn request(&self) -> SolveRequest {
        SolveRequest {
            method: self.solver,
            seed: self.seed,
            reads: self.reads,
            sweeps: self.sweeps,
            schedule: None,
            tenure: self.tenure,
            tabu_iterations: self.tabu_iterations,
            exhaustive_cap: self.exhaustive_cap,
        }
    }
}

/// Pipeline settings; commands that never solve pass no solver options.
pub fn predict_config(e: &EnumArgs, s: Option<&SolverArgs>) -> Result<PredictConfig> {
    let mut cfg = PredictConfig {
        min_loop: e.min_loop,
        min_stem: e.stem_min,
        solver: s.map(SolverArgs::request).unwrap_or_default(),
        ..PredictConfig::default()
    };
    if let Some(p) = &e.stack_table {
        cfg.nn = NnTable::from_path(p).with_context(|| format!("loading {}", p.display()))?;
    }
    if let Some(p) = &e.loop_table {
        cfg.loops = LoopPenaltyTable::from_path(p).with_context(|| format!("loading {}", p.display()))?;
    }
    Ok(cfg)
}

/// A sequence from a FASTA, bare-sequence or CT file.
pub fn load_sequence(path: &Path) -> Result<RnaSequence> {
    let is_ct = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ct"));
    let seq = if is_ct {
        read_ct(path)?.0
    } else {
        read_sequence(path)?
    };
    Ok(seq)
}

/// Write `text` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Parse `5-41`, `5,7,9` or `7` into a list.
pub fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad number {t:?}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(out)
}
