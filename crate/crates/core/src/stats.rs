//! Estimator statistics on Pig against the exact oracle: MSE, variance,
//! |bias| and regret over states observed in cross-play.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domains::pig::PigState;
use crate::domains::{GameKind, Pig};
use crate::game::Game;
use crate::harness::{play_game, EngineSpec, HarnessError};
use crate::oracle::PigValueTable;
use crate::parallel::par_map;
use crate::rng::combine;
use crate::search::Budget;

/// Relative tolerance of the `MSE = Var + Bias^2` check.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-6;

/// Deduplicated decision states from games between every ordered pair of
/// distinct roster entries, in first-seen order.
pub fn collect_states(
    roster: &[EngineSpec],
    games_per_pairing: usize,
    seed: u64,
    budget: Budget,
) -> Result<Vec<PigState>, HarnessError> {
    if roster.len() < 2 {
        return Err(HarnessError::Config("state collection needs at least two engines".into()));
    }
    let mut jobs = Vec::new();
    for i in 0..roster.len() {
        for j in 0..roster.len() {
            if i != j {
                jobs.extend((0..games_per_pairing).map(|g| (i, j, g)));
            }
        }
    }
    let visited = par_map(&jobs, |&(i, j, g)| -> Result<Vec<PigState>, HarnessError> {
        let game = Pig;
        let mut a = roster[i].build::<Pig>(GameKind::Pig, budget);
        let mut b = roster[j].build::<Pig>(GameKind::Pig, budget);
        let key = combine(&[seed, i as u64, j as u64, g as u64]);
        let mut seen = Vec::new();
        play_game(&game, [a.as_mut(), b.as_mut()], key, [combine(&[key, 0]), combine(&[key, 1])], false, &mut |s| {
            seen.push(*s)
        })?;
        Ok(seen)
    });
    let mut out = Vec::new();
    let mut set = HashSet::new();
    for states in visited {
        for s in states? {
            if set.insert(s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateStats {
    pub state: String,
    pub truth: f64,
    pub mean: f64,
    /// Population variance over runs.
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    pub regret: f64,
}

impl StateStats {
    pub fn decomposition_error(&self) -> f64 {
        (self.mse - (self.variance + self.bias * self.bias)).abs() / self.mse.abs().max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub algorithm: String,
    pub mse: f64,
    pub variance: f64,
    pub abs_bias: f64,
    pub regret: f64,
    pub runs: usize,
    pub states: usize,
    pub per_state: Vec<StateStats>,
}

/// Runs `spec` `runs` times on every state. The run seed depends only on
/// `(seed, state, run)`, so results do not depend on the sample order.
pub fn estimator_stats(
    spec: &EngineSpec,
    sample: &[PigState],
    runs: usize,
    table: &PigValueTable,
    budget: Budget,
    seed: u64,
) -> Result<StatsReport, HarnessError> {
    if runs < 2 {
        return Err(HarnessError::Config("estimator statistics need at least two runs".into()));
    }
    if sample.is_empty() {
        return Err(HarnessError::Config("empty state sample".into()));
    }
    let game = Pig;
    let per_state = par_map(sample, |s| -> Result<StateStats, HarnessError> {
        let truth = table.value(s)?;
        let mut values = Vec::with_capacity(runs);
        let mut regret = 0.0;
        // Engines keep no state between searches, so one instance serves all runs.
        let mut engine = spec.build::<Pig>(GameKind::Pig, budget);
        for r in 0..runs {
            let res = engine.search(&game, s, combine(&[seed, game.state_key(s), r as u64]));
            values.push(res.value);
            regret += table.regret(s, res.best_action)?;
        }
        let n = runs as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let mse = values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / n;
        Ok(StateStats {
            state: game.encode_state(s),
            truth,
            mean,
            variance,
            bias: mean - truth,
            mse,
            regret: regret / n,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let k = per_state.len() as f64;
    let avg = |f: fn(&StateStats) -> f64| per_state.iter().map(f).sum::<f64>() / k;
    Ok(StatsReport {
        algorithm: spec.to_string(),
        mse: avg(|s| s.mse),
        variance: avg(|s| s.variance),
        abs_bias: avg(|s| s.bias.abs()),
        regret: avg(|s| s.regret),
        runs,
        states: per_state.len(),
        per_state,
    })
}

/// `algorithm,mse,variance,abs_bias,regret,runs,states`.
pub fn write_stats_csv(reports: &[StatsReport], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "mse", "variance", "abs_bias", "regret", "runs", "states"])?;
    for r in reports {
        w.write_record([
            r.algorithm.clone(),
            r.mse.to_string(),
            r.variance.to_string(),
            r.abs_bias.to_string(),
            r.regret.to_string(),
            r.runs.to_string(),
            r.states.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-state rows: `algorithm,state,truth,mean,variance,bias,mse,regret`.
pub fn write_state_csv(reports: &[StatsReport], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "state", "truth", "mean", "variance", "bias", "mse", "regret"])?;
    for r in reports {
        for s in &r.per_state {
            w.write_record([
                r.algorithm.clone(),
                s.state.clone(),
                s.truth.to_string(),
                s.mean.to_string(),
                s.variance.to_string(),
                s.bias.to_string(),
                s.mse.to_string(),
                s.regret.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
