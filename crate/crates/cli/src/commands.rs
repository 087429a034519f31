use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use rnaqubo::complexity::worst_case_counts;
use rnaqubo::dataset::{emit_ct, known_stems, read_ct, Example, PkClass};
use rnaqubo::models::build as build_qubo;
use rnaqubo::pipeline::{candidates_for, predict};
use rnaqubo::scoring::{confusion, ks_2sample, mcc, ScoreRow};
use rnaqubo::solvers::solve as run_solver;
use rnaqubo::trainer::train_from;
use rnaqubo::{
    pair_count_closed_form, stem_count_closed_form, CandidateSet, DatasetManifest, ModelParams,
    PredictConfig, Qubo, SpsaConfig, Split, WeightMode,
};

use crate::config::{emit, load_sequence, parse_range, predict_config, EnumArgs, ModelArgs, SolverArgs};

pub fn enumerate(input: &Path, model: &ModelArgs, e: &EnumArgs, out: Option<&Path>) -> Result<()> {
    let params = model.resolve()?;
    let seq = load_sequence(input)?;
    let cfg = predict_config(e, None)?;
    let set = candidates_for(params.kind(), &seq, &cfg)?;
    log::info!("{}: {} candidates, {} non-independent pairs", seq.id, set.len(), set.relations.len());
    emit(out, &set.to_lines())
}

pub fn build(input: &Path, from_candidates: bool, model: &ModelArgs, e: &EnumArgs, out: Option<&Path>) -> Result<()> {
    let params = model.resolve()?;
    let cfg = predict_config(e, None)?;
    let set = if from_candidates {
        let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
        CandidateSet::from_lines(&text).with_context(|| format!("parsing {}", input.display()))?
    } else {
        candidates_for(params.kind(), &load_sequence(input)?, &cfg)?
    };
    let qubo = build_qubo(&set, &params, &cfg.loops)?;
    log::info!("{} variables, {} couplings", qubo.num_vars(), qubo.num_quadratic());
    emit(out, &qubo.to_json())
}

pub fn solve(input: &Path, solver: &SolverArgs, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let qubo = Qubo::from_json(&text).with_context(|| format!("parsing {}", input.display()))?;
    let result = run_solver(&qubo, &solver.request())?;
    emit(out, &result.to_report())
}

pub fn predict_one(
    input: &Path,
    params: &ModelParams,
    cfg: &PredictConfig,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<()> {
    let seq = load_sequence(input)?;
    let p = predict(&seq, params, cfg)?;
    let energy = p.result.best_energy;
    log::info!(
        "{}: energy {energy}, {} of {} candidates selected, {} pairs",
        seq.id,
        p.result.best_q.iter().filter(|&&b| b).count(),
        p.candidates.len(),
        p.structure.len()
    );
    if let Some(path) = report {
        let text = format!("id\t{}\nmodel\t{}\nenergy\t{energy}\n{}", seq.id, params.kind(), p.selection_report());
        emit(Some(path), &text)?;
    }
    emit(out, &emit_ct(&seq, &p.structure, &format!("ENERGY = {energy}  {}", seq.id)))
}

fn score_table(rows: &[ScoreRow]) -> String {
    let mut out = format!("{}\n", ScoreRow::HEADER);
    for r in rows {
        out.push_str(&r.to_tsv());
        out.push('\n');
    }
    if rows.len() > 1 {
        let mean = rows.iter().map(|r| r.mcc).sum::<f64>() / rows.len() as f64;
        let _ = writeln!(out, "# mean_mcc\t{mean:.6}\t{} structures", rows.len());
        let by_class = |pk: bool| rows.iter().filter(|r| r.pseudoknotted == pk).map(|r| r.mcc).collect::<Vec<_>>();
        let (pk, nested) = (by_class(true), by_class(false));
        if !pk.is_empty() && !nested.is_empty() {
            let ks = ks_2sample(&pk, &nested).expect("both samples non-empty");
            let _ = writeln!(out, "# ks_pk_vs_nested\tD={:.6}\tp={:.6}", ks.d, ks.p_value);
        }
    }
    out
}

pub fn predict_manifest(path: &Path, params: &ModelParams, cfg: &PredictConfig, out_dir: Option<&Path>) -> Result<()> {
    let manifest = DatasetManifest::load(path)?;
    let examples = manifest.load_examples(None, PkClass::All)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let rows: Vec<ScoreRow> = examples
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let mut cfg = cfg.clone();
            cfg.solver.seed = cfg.solver.seed.wrapping_add(i as u64);
            let p = predict(&ex.seq, params, &cfg).with_context(|| format!("predicting {}", ex.id))?;
            if let Some(dir) = out_dir {
                let title = format!("ENERGY = {}  {}", p.result.best_energy, ex.id);
                let file = dir.join(format!("{}.ct", ex.id));
                fs::write(&file, emit_ct(&ex.seq, &p.structure, &title))
                    .with_context(|| format!("writing {}", file.display()))?;
            }
            let c = confusion(&p.structure, &ex.truth)?;
            Ok(ScoreRow {
                id: ex.id.clone(),
                model: params.kind().to_string(),
                pseudoknotted: ex.truth.is_pseudoknotted(),
                confusion: c,
                mcc: mcc(&c),
            })
        })
        .collect::<Result<_>>()?;
    emit(None, &score_table(&rows))
}

pub fn score_pair(pred: &Path, truth: &Path, out: Option<&Path>) -> Result<()> {
    let (pseq, p) = read_ct(pred)?;
    let (tseq, t) = read_ct(truth)?;
    if pseq.bases() != tseq.bases() {
        log::warn!("{} and {} hold different sequences", pred.display(), truth.display());
    }
    let c = confusion(&p, &t)?;
    let row = ScoreRow {
        id: tseq.id.clone(),
        model: "-".into(),
        pseudoknotted: t.is_pseudoknotted(),
        confusion: c,
        mcc: mcc(&c),
    };
    emit(out, &score_table(&[row]))
}

pub fn score_manifest(path: &Path, pred_dir: &Path, out: Option<&Path>) -> Result<()> {
    let manifest = DatasetManifest::load(path)?;
    let examples = manifest.load_examples(None, PkClass::All)?;
    let rows: Vec<ScoreRow> = examples
        .par_iter()
        .map(|ex| {
            let file = pred_dir.join(format!("{}.ct", ex.id));
            let (seq, p) = read_ct(&file).with_context(|| format!("reading {}", file.display()))?;
            if seq.bases() != ex.seq.bases() {
                bail!("{}: predicted sequence differs from the reference", ex.id);
            }
            let c = confusion(&p, &ex.truth)?;
            Ok(ScoreRow {
                id: ex.id.clone(),
                model: "-".into(),
                pseudoknotted: ex.truth.is_pseudoknotted(),
                confusion: c,
                mcc: mcc(&c),
            })
        })
        .collect::<Result<_>>()?;
    emit(out, &score_table(&rows))
}

pub struct TrainJob<'a> {
    pub manifest: &'a Path,
    pub params: ModelParams,
    pub predict: PredictConfig,
    pub spsa: SpsaConfig,
    pub split: Option<Split>,
    pub class: PkClass,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn train(job: TrainJob, out: Option<&Path>, log_path: Option<&Path>) -> Result<()> {
    let manifest = DatasetManifest::load(job.manifest)?;
    let examples: Vec<Example> = manifest.load_examples(job.split, job.class)?;
    if examples.is_empty() {
        bail!("no manifest entries match the requested split and class");
    }
    let kind = job.params.kind();
    log::info!("training model {kind} on {} structures", examples.len());
    let record = train_from(&job.params, &examples, &job.spsa, &job.predict)?;
    let mut fitted = job.params;
    fitted.set_vector(&record.best_theta);
    log::info!(
        "loss {:.6} -> {:.6} (best of {} iterations)",
        record.initial_loss(),
        record.best_loss,
        record.iterations.len()
    );
    if let Some(path) = log_path {
        emit(Some(path), &record.to_log())?;
    }
    emit(out, &fitted.to_tsv())
}

fn odd_lengths(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let values = parse_range(part).map_err(anyhow::Error::msg)?;
        if part.contains('-') {
            out.extend(values.into_iter().filter(|n| n % 2 == 1));
        } else {
            out.extend(values);
        }
    }
    Ok(out)
}

pub fn complexity(n_spec: &str, m_spec: &str, out: Option<&Path>) -> Result<()> {
    let ns = odd_lengths(n_spec)?;
    let ms = parse_range(m_spec).map_err(anyhow::Error::msg)?;
    let mut text = String::from("N\tm\tS_closed\tS_enumerated\tP_closed\tP_classified\tmatch\n");
    let mut mismatches = 0;
    for &m in &ms {
        for &n in &ns {
            if n % 2 == 1 && n < 2 * m + 1 {
                continue;
            }
            let s = stem_count_closed_form(n, m)?;
            let p = pair_count_closed_form(n, m)?;
            let counts = worst_case_counts(n, m);
            let ok = s == counts.stems && p == counts.pairs;
            mismatches += usize::from(!ok);
            let _ = writeln!(text, "{n}\t{m}\t{s}\t{}\t{p}\t{}\t{}", counts.stems, counts.pairs, if ok { "yes" } else { "no" });
        }
    }
    emit(out, &text)?;
    if mismatches > 0 {
        bail!("{mismatches} rows disagree with the closed forms");
    }
    Ok(())
}

pub fn dataset_stats(path: &Path, model: &ModelArgs, e: &EnumArgs, out: Option<&Path>) -> Result<()> {
    let params = model.resolve()?;
    let cfg = predict_config(e, None)?;
    let manifest = DatasetManifest::load(path)?;
    let examples = manifest.load_examples(None, PkClass::All)?;
    let rows: Vec<String> = examples
        .par_iter()
        .zip(&manifest.entries)
        .map(|(ex, entry)| {
            let (stems, _) = known_stems(&ex.truth, cfg.min_stem, WeightMode::BpLength, &ex.seq, &cfg.nn)?;
            let set = candidates_for(params.kind(), &ex.seq, &cfg)?;
            let qubo = build_qubo(&set, &params, &cfg.loops)?;
            Ok(format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                ex.id,
                entry.split,
                u8::from(ex.truth.is_pseudoknotted()),
                ex.seq.len(),
                ex.truth.len(),
                stems.len(),
                set.len(),
                qubo.num_quadratic()
            ))
        })
        .collect::<Result<_>>()?;
    let mut text = String::from("id\tsplit\tpseudoknotted\tlength\tpairs\ttrue_stems\tcandidates\tcouplings\n");
    text.extend(rows);
    let (train, test) = manifest.split_sizes();
    let pk = examples.iter().filter(|ex| ex.truth.is_pseudoknotted()).count();
    let lengths: Vec<f64> = examples.iter().map(|ex| ex.seq.len() as f64).collect();
    let _ = writeln!(
        text,
        "# {} structures: {train} train, {test} test, {pk} pseudoknotted, mean length {:.1}",
        examples.len(),
        if lengths.is_empty() { 0.0 } else { mean(&lengths) }
    );
    emit(out, &text)
}
