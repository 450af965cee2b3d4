use std::time::Instant;

use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use saris_core::optimizer::{mismatched_optimize, random_baseline, saris_optimize, OptimizerState};
use saris_core::scenario::{realization_rng, realize, saris_config, ScenarioConfig};
use saris_core::{Result, SarisConfig64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Algo {
    Saris,
    Mismatched,
    Random,
}

impl Algo {
    pub const ALL: [Algo; 3] = [Algo::Saris, Algo::Mismatched, Algo::Random];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Saris => "saris",
            Algo::Mismatched => "mismatched",
            Algo::Random => "random",
        }
    }
}

/// Loop settings shared by every run of an invocation.
#[derive(Debug, Clone)]
pub struct Settings {
    pub epsilon: Option<f64>,
    pub max_iter: Option<usize>,
    pub random_draws: usize,
}

/// Outcome of one algorithm on one realization.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub algo: Algo,
    pub seed: u64,
    pub realization: u64,
    pub smse: Vec<f64>,
    pub sum_rate: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

impl RunRecord {
    fn from_state(algo: Algo, seed: u64, realization: u64, st: OptimizerState<f64>, wall: f64) -> Self {
        RunRecord {
            algo,
            seed,
            realization,
            smse: st.smse_trace,
            sum_rate: st.rate_trace,
            iterations: st.iteration,
            converged: st.converged,
            wall_time_s: wall,
        }
    }

    pub fn final_rate(&self) -> f64 {
        *self.sum_rate.last().expect("traces are never empty")
    }

    pub fn final_smse(&self) -> f64 {
        *self.smse.last().expect("traces are never empty")
    }
}

/// Stream offset separating the baseline draws from the geometry draws.
const BASELINE_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn baseline_rng(seed: u64, realization: u64) -> ChaCha20Rng {
    realization_rng(seed ^ BASELINE_STREAM_SALT, realization)
}

fn optimizer_config(cfg: &ScenarioConfig, s: &Settings) -> SarisConfig64 {
    let mut oc = saris_config::<f64>(cfg);
    if let Some(e) = s.epsilon {
        oc.epsilon = e;
    }
    if let Some(i) = s.max_iter {
        oc.max_iter = i;
    }
    oc
}

/// Run every algorithm on realization `index`. Wall time covers the
/// optimization only, not the impedance assembly.
pub fn run_realization(cfg: &ScenarioConfig, algos: &[Algo], s: &Settings, index: u64) -> Result<Vec<RunRecord>> {
    let r = realize::<f64>(cfg, index)?;
    let oc = optimizer_config(cfg, s);
    algos
        .iter()
        .map(|&algo| {
            let t = Instant::now();
            let st = match algo {
                Algo::Saris => saris_optimize(&r.channel, &oc)?,
                Algo::Mismatched => mismatched_optimize(&r.channel, &r.impedances, &oc)?,
                Algo::Random => {
                    let mut rng = baseline_rng(cfg.seed, index);
                    random_baseline(&r.channel, &oc, s.random_draws, &mut rng)?
                }
            };
            Ok(RunRecord::from_state(algo, cfg.seed, index, st, t.elapsed().as_secs_f64()))
        })
        .collect()
}

/// All realizations `0..trials`, in parallel on the current pool. Records
/// come back ordered by realization, then algorithm.
pub fn run_all(cfg: &ScenarioConfig, algos: &[Algo], s: &Settings) -> Result<Vec<RunRecord>> {
    let per: Vec<Vec<RunRecord>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| run_realization(cfg, algos, s, i))
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Mean and spread of one algorithm's runs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Summary {
    pub algo: &'static str,
    pub trials: usize,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub mean_iters: f64,
    pub mean_time_s: f64,
    pub converged_fraction: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for a single run.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn summarize(records: &[RunRecord], algos: &[Algo]) -> Vec<Summary> {
    algos
        .iter()
        .map(|&a| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.algo == a).collect();
            let rates: Vec<f64> = runs.iter().map(|r| r.final_rate()).collect();
            let iters: Vec<f64> = runs.iter().map(|r| r.iterations as f64).collect();
            let times: Vec<f64> = runs.iter().map(|r| r.wall_time_s).collect();
            let conv: Vec<f64> = runs.iter().map(|r| if r.converged { 1.0 } else { 0.0 }).collect();
            Summary {
                algo: a.name(),
                trials: runs.len(),
                mean_rate: mean(&rates),
                std_rate: std_dev(&rates),
                mean_iters: mean(&iters),
                mean_time_s: mean(&times),
                converged_fraction: mean(&conv),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread() {
        assert_eq!(std_dev(&[3.0]), 0.0);
        assert!((std_dev(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
    }
}
