//! Parameter fitting by simultaneous perturbation stochastic approximation.
//!
//! Each step draws a Bernoulli ±1 direction `Δ`, measures the loss at
//! `θ ± c_k Δ`, and moves along the two-point gradient estimate
//!
//! `ĝ_i = (L(θ + c_k Δ) − L(θ − c_k Δ)) / (2 c_k Δ_i)`
//!
//! with gains `c_k = c / (k+1)^γ` and `a_k = a / (k+1+A)^α`.

use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::dataset::Example;
use crate::models::{ModelKind, ModelParams};
use crate::pipeline::{predict, PredictConfig};
use crate::scoring::structure_mcc;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("invalid SPSA configuration: {0}")]
    Config(String),
    #[error("training set is empty")]
    EmptyDataset,
    #[error("initial vector has {got} entries, model has {expected} parameters")]
    InitialLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LossKind {
    /// `1 − mean MCC`.
    #[default]
    OneMinusMeanMcc,
    /// `mean (1 − MCC)²`.
    MeanSquared,
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mcc" | "1-mcc" => Ok(LossKind::OneMinusMeanMcc),
            "squared" | "mse" => Ok(LossKind::MeanSquared),
            other => Err(format!("unknown loss {other:?} (mcc, squared)")),
        }
    }
}

impl LossKind {
    pub fn of(self, mccs: &[f64]) -> f64 {
        if mccs.is_empty() {
            return 1.0;
        }
        let n = mccs.len() as f64;
        match self {
            LossKind::OneMinusMeanMcc => 1.0 - mccs.iter().sum::<f64>() / n,
            LossKind::MeanSquared => mccs.iter().map(|m| (1.0 - m).powi(2)).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaConfig {
    pub iterations: usize,
    /// Step gain; calibrated from the first gradient estimates when `None`.
    pub a: Option<f64>,
    pub c: f64,
    /// Stability constant; `0.1 · iterations` when `None`.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub seed: u64,
    /// Starting trainable vector; all ones when `None`.
    pub initial: Option<Vec<f64>>,
    pub loss: LossKind,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        SpsaConfig {
            iterations: 60,
            a: None,
            c: 0.1,
            big_a: None,
            alpha: 0.602,
            gamma: 0.101,
            seed: 0,
            initial: None,
            loss: LossKind::default(),
        }
    }
}

/// Largest first step, per parameter, that calibration aims for.
const CALIBRATION_STEP: f64 = 0.5;
const CALIBRATION_DRAWS: usize = 4;

impl SpsaConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if !(self.c > 0.0) {
            return bad("c must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gain exponents must lie in (0, 1]");
        }
        if matches!(self.a, Some(a) if !(a > 0.0)) {
            return bad("a must be positive");
        }
        if matches!(self.big_a, Some(v) if !(v >= 0.0)) {
            return bad("A must be non-negative");
        }
        Ok(())
    }

    pub fn stability(&self) -> f64 {
        self.big_a.unwrap_or(0.1 * self.iterations as f64)
    }

    pub fn c_k(&self, k: usize) -> f64 {
        self.c / ((k + 1) as f64).powf(self.gamma)
    }

    pub fn a_k(&self, a: f64, k: usize) -> f64 {
        a / ((k + 1) as f64 + self.stability()).powf(self.alpha)
    }
}

/// Two-point gradient estimate along `delta` with perturbation size `ck`.
/// Returns `(ĝ, L(θ + c_k Δ), L(θ − c_k Δ))`.
pub fn spsa_gradient<F>(theta: &[f64], ck: f64, delta: &[f64], loss: &F) -> (Vec<f64>, f64, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let shifted = |sign: f64| -> Vec<f64> {
        theta
            .iter()
            .zip(delta)
            .map(|(t, d)| t + sign * ck * d)
            .collect()
    };
    let (plus, minus) = (shifted(1.0), shifted(-1.0));
    let (lp, lm) = rayon::join(|| loss(&plus), || loss(&minus));
    let g = delta.iter().map(|d| (lp - lm) / (2.0 * ck * d)).collect();
    (g, lp, lm)
}

fn bernoulli(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// One SPSA update of `theta` at iteration `k` with step gain `a`.
/// `clamp` projects the result onto the parameter domain.
pub fn spsa_step<F, C>(
    theta: &[f64],
    k: usize,
    cfg: &SpsaConfig,
    a: f64,
    rng: &mut ChaCha8Rng,
    loss: &F,
    clamp: &C,
) -> StepRecord
where
    F: Fn(&[f64]) -> f64 + Sync,
    C: Fn(&mut [f64]),
{
    let delta = bernoulli(rng, theta.len());
    let ck = cfg.c_k(k);
    let (g, loss_plus, loss_minus) = spsa_gradient(theta, ck, &delta, loss);
    let ak = cfg.a_k(a, k);
    let mut next: Vec<f64> = theta.iter().zip(&g).map(|(t, gi)| t - ak * gi).collect();
    clamp(&mut next);
    StepRecord {
        delta,
        loss_plus,
        loss_minus,
        a_k: ak,
        c_k: ck,
        next,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub delta: Vec<f64>,
    pub loss_plus: f64,
    pub loss_minus: f64,
    pub a_k: f64,
    pub c_k: f64,
    pub next: Vec<f64>,
}

/// Step gain such that the largest gradient component seen over a few
/// trial perturbations at `theta` would move a parameter by
/// [`CALIBRATION_STEP`] on the first iteration.
fn calibrate<F>(theta: &[f64], cfg: &SpsaConfig, rng: &mut ChaCha8Rng, loss: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut largest = 0.0f64;
    for _ in 0..CALIBRATION_DRAWS {
        let delta = bernoulli(rng, theta.len());
        let (g, _, _) = spsa_gradient(theta, cfg.c_k(0), &delta, loss);
        largest = g.iter().fold(largest, |m, v| m.max(v.abs()));
    }
    let scale = (1.0 + cfg.stability()).powf(cfg.alpha);
    if largest > 0.0 {
        CALIBRATION_STEP * scale / largest
    } else {
        CALIBRATION_STEP * scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Parameters at the start of the iteration and their loss.
    pub theta: Vec<f64>,
    pub loss: f64,
    pub delta: Vec<f64>,
    pub loss_plus: f64,
    pub loss_minus: f64,
    pub a_k: f64,
    pub c_k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub names: Vec<String>,
    pub a: f64,
    pub iterations: Vec<IterationRecord>,
    pub final_theta: Vec<f64>,
    pub final_loss: f64,
    pub best_theta: Vec<f64>,
    pub best_loss: f64,
}

impl TrainRecord {
    pub fn initial_loss(&self) -> f64 {
        self.iterations.first().map_or(self.final_loss, |r| r.loss)
    }

    /// Tab-separated progress log, one row per iteration plus a `final`
    /// row. Contains nothing run-dependent beyond the configuration, so
    /// reruns with the same seed are byte-identical.
    pub fn to_log(&self) -> String {
        let mut out = String::from("iter\tloss\tloss_plus\tloss_minus\ta_k\tc_k");
        for n in &self.names {
            out.push_str(&format!("\t{n}"));
        }
        for n in &self.names {
            out.push_str(&format!("\tdelta_{n}"));
        }
        out.push('\n');
        let join = |v: &[f64]| v.iter().map(|x| format!("\t{x}")).collect::<String>();
        for r in &self.iterations {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}{}{}\n",
                r.k,
                r.loss,
                r.loss_plus,
                r.loss_minus,
                r.a_k,
                r.c_k,
                join(&r.theta),
                join(&r.delta)
            ));
        }
        out.push_str(&format!(
            "final\t{}\t\t\t\t{}{}\n",
            self.final_loss,
            join(&self.final_theta),
            "\t".repeat(self.names.len())
        ));
        out.push_str(&format!(
            "best\t{}\t\t\t\t{}{}\n",
            self.best_loss,
            join(&self.best_theta),
            "\t".repeat(self.names.len())
        ));
        out
    }
}

/// Run SPSA on an arbitrary loss. Every iterate, including the final one,
/// is evaluated; the best is the lowest recorded loss (earliest on ties).
pub fn minimize<F, C>(
    names: &[&str],
    theta0: &[f64],
    cfg: &SpsaConfig,
    loss: F,
    clamp: C,
) -> Result<TrainRecord, TrainError>
where
    F: Fn(&[f64]) -> f64 + Sync,
    C: Fn(&mut [f64]),
{
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = theta0.to_vec();
    clamp(&mut theta);
    let a = match cfg.a {
        Some(a) => a,
        None => calibrate(&theta, cfg, &mut rng, &loss),
    };
    let mut iterations = Vec::with_capacity(cfg.iterations);
    for k in 0..cfg.iterations {
        let current = loss(&theta);
        let step = spsa_step(&theta, k, cfg, a, &mut rng, &loss, &clamp);
        log::debug!("spsa k={k} loss={current} theta={theta:?}");
        iterations.push(IterationRecord {
            k,
            theta: std::mem::replace(&mut theta, step.next),
            loss: current,
            delta: step.delta,
            loss_plus: step.loss_plus,
            loss_minus: step.loss_minus,
            a_k: step.a_k,
            c_k: step.c_k,
        });
    }
    let final_loss = loss(&theta);
    let (best_theta, best_loss) = iterations
        .iter()
        .map(|r| (&r.theta, r.loss))
        .chain(std::iter::once((&theta, final_loss)))
        .fold(None::<(&Vec<f64>, f64)>, |best, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
        .map(|(t, l)| (t.clone(), l))
        .expect("at least the final iterate");
    Ok(TrainRecord {
        names: names.iter().map(|s| s.to_string()).collect(),
        a,
        iterations,
        final_theta: theta,
        final_loss,
        best_theta,
        best_loss,
    })
}

/// Per-structure MCCs of `params` over `examples`. Structure `i` is solved
/// with seed `base.solver.seed + i` every time it is evaluated. A failed
/// prediction scores 0 and is logged.
pub fn dataset_mccs(params: &ModelParams, examples: &[Example], base: &PredictConfig) -> Vec<f64> {
    examples
        .par_iter()
        .enumerate()
        .map(|(i, ex)| {
            let mut cfg = base.clone();
            cfg.solver.seed = base.solver.seed.wrapping_add(i as u64);
            match predict(&ex.seq, params, &cfg)
                .map_err(|e| e.to_string())
                .and_then(|p| structure_mcc(&p.structure, &ex.truth).map_err(|e| e.to_string()))
            {
                Ok(m) => m,
                Err(e) => {
                    log::warn!("{}: prediction failed, scoring MCC 0: {e}", ex.id);
                    0.0
                }
            }
        })
        .collect()
}

pub fn dataset_loss(
    params: &ModelParams,
    examples: &[Example],
    base: &PredictConfig,
    kind: LossKind,
) -> f64 {
    kind.of(&dataset_mccs(params, examples, base))
}

/// Fit the trainable parameters of `model` on `examples`. Parameters that
/// are not trained keep their default values.
pub fn train(
    model: ModelKind,
    examples: &[Example],
    cfg: &SpsaConfig,
    predict_cfg: &PredictConfig,
) -> Result<TrainRecord, TrainError> {
    train_from(&ModelParams::ones(model), examples, cfg, predict_cfg)
}

/// Like [`train`], with the untrained parameters taken from `template`.
/// The starting point is still `cfg.initial`, or all ones.
pub fn train_from(
    template: &ModelParams,
    examples: &[Example],
    cfg: &SpsaConfig,
    predict_cfg: &PredictConfig,
) -> Result<TrainRecord, TrainError> {
    if examples.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let model = template.kind();
    let names = model.trainable();
    let theta0 = cfg.initial.clone().unwrap_or_else(|| vec![1.0; names.len()]);
    if theta0.len() != names.len() {
        return Err(TrainError::InitialLength {
            expected: names.len(),
            got: theta0.len(),
        });
    }
    let loss = |theta: &[f64]| {
        let mut p = *template;
        p.set_vector(theta);
        dataset_loss(&p, examples, predict_cfg, cfg.loss)
    };
    minimize(names, &theta0, cfg, loss, |v: &mut [f64]| {
        ModelParams::clamp_vector(model, v)
    })
}

/// Parameters of `model` with the trainable values from `theta`.
pub fn params_from(model: ModelKind, theta: &[f64]) -> ModelParams {
    let mut p = ModelParams::ones(model);
    p.set_vector(theta);
    p
}
