//! Empirical coverage of the sparse-sampling error bound on Pig.
//!
//! For each sample width `c` and tolerance `lambda`, coverage is the
//! fraction of (trial, state) pairs with `|V^_d(s) - V_d(s)| <= lambda * d`,
//! where `V_d` is the exact depth-`d` value and `V^_d` the sampled estimate.
//! All `(c, lambda)` cells share the same trial seeds.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::domains::pig::PigState;
use crate::domains::Pig;
use crate::game::Game;
use crate::parallel::par_map;
use crate::rng::combine;
use crate::search::{expectimax_value, theorem_bound, StarConfig, StarEngine, StarVariant, TheoremParams};

/// One-sided 99% normal quantile.
pub const Z_ONE_SIDED_99: f64 = 2.326;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub cs: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub depth: u32,
    pub trials: usize,
    pub states: usize,
    pub seed: u64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            cs: vec![1, 2, 4, 8, 16, 32, 64, 128, 256],
            lambdas: vec![10.0, 25.0, 50.0, 100.0, 150.0, 200.0],
            depth: 1,
            trials: 1000,
            states: 100,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub c: usize,
    pub lambda: f64,
    pub depth: u32,
    pub bound: f64,
    pub vacuous: bool,
    pub covered: u64,
    pub samples: u64,
    pub coverage: f64,
}

impl CoverageRow {
    pub fn meets_bound(&self) -> bool {
        self.vacuous || self.coverage >= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageTable {
    pub rows: Vec<CoverageRow>,
    /// `(lambda, smaller c, larger c)` where coverage dropped significantly.
    pub monotone_violations: Vec<(f64, usize, usize)>,
}

impl CoverageTable {
    pub fn bound_failures(&self) -> Vec<&CoverageRow> {
        self.rows.iter().filter(|r| !r.meets_bound()).collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["c", "lambda", "depth", "bound", "vacuous", "covered", "samples", "coverage"])?;
        for r in &self.rows {
            w.write_record([
                r.c.to_string(),
                r.lambda.to_string(),
                r.depth.to_string(),
                r.bound.to_string(),
                r.vacuous.to_string(),
                r.covered.to_string(),
                r.samples.to_string(),
                r.coverage.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `n` distinct live Pig states reached by random play.
pub fn sample_pig_states(n: usize, seed: u64) -> Vec<PigState> {
    let mut out: Vec<PigState> = Vec::with_capacity(n);
    let mut k = 0u64;
    while out.len() < n {
        let s = super::random_position(&Pig, combine(&[seed, k]));
        k += 1;
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

pub fn check_theorem(cfg: &TheoremConfig) -> Result<CoverageTable, HarnessError> {
    let mut cs = cfg.cs.clone();
    cs.sort_unstable();
    cs.dedup();
    if cs.is_empty() || cfg.lambdas.is_empty() || cfg.trials == 0 || cfg.states == 0 {
        return Err(HarnessError::Config("coverage check needs c values, lambdas, trials and states".into()));
    }
    if cs[0] == 0 {
        return Err(HarnessError::Config("sample width must be positive".into()));
    }
    let game = Pig;
    let v_max = game.bounds().max;
    let states = sample_pig_states(cfg.states, cfg.seed);
    // errors[state][ci][trial]
    let errors: Vec<Vec<Vec<f64>>> = par_map(&states, |s| {
        let exact = expectimax_value(&game, s, cfg.depth);
        cs.iter()
            .map(|&c| {
                let mut e =
                    StarEngine::new(StarConfig { tt_bits: 10, ..StarConfig::sampled(StarVariant::Expectimax, c, cfg.seed) });
                (0..cfg.trials).map(|t| (e.value_at_depth(&game, s, cfg.depth, t as u64) - exact).abs()).collect()
            })
            .collect()
    });
    let samples = (cfg.trials * cfg.states) as u64;
    let actions = game.legal_actions(&game.initial_state()).len();
    let mut rows = Vec::new();
    for &lambda in &cfg.lambdas {
        for (ci, &c) in cs.iter().enumerate() {
            let tol = lambda * cfg.depth as f64;
            let covered =
                errors.iter().map(|per_c| per_c[ci].iter().filter(|&&e| e <= tol).count() as u64).sum::<u64>();
            let bound = theorem_bound(TheoremParams { lambda, depth: cfg.depth, action_count: actions }, c, v_max)?;
            rows.push(CoverageRow {
                c,
                lambda,
                depth: cfg.depth,
                bound,
                vacuous: bound <= 0.0,
                covered,
                samples,
                coverage: covered as f64 / samples as f64,
            });
        }
    }
    let mut monotone_violations = Vec::new();
    for group in rows.chunks(cs.len()) {
        for pair in group.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            let n = samples as f64;
            let se = ((lo.coverage * (1.0 - lo.coverage) + hi.coverage * (1.0 - hi.coverage)) / n).sqrt();
            if lo.coverage - hi.coverage > Z_ONE_SIDED_99 * se {
                monotone_violations.push((lo.lambda, lo.c, hi.c));
            }
        }
    }
    Ok(CoverageTable { rows, monotone_violations })
}
