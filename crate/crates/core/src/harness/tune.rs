//! Single-elimination parameter tuning.
//!
//! Entrants are paired in grid order each round; an odd one out gets a bye.
//! The pairing winner is the higher match score. An exact tie is replayed
//! once with a fresh seed; if still tied the lower grid index advances.

use serde::{Deserialize, Serialize};

use super::tournament::match_seed;
use super::{play_match, EngineSpec, HarnessError};
use crate::domains::GameKind;
use crate::parallel::par_map;
use crate::rng::combine;
use crate::search::Budget;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneConfig {
    pub game: GameKind,
    pub grid: Vec<EngineSpec>,
    pub matches: usize,
    pub seed: u64,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub winner_index: usize,
    pub winner: EngineSpec,
    pub rounds: usize,
    /// One line per pairing or bye.
    pub log: Vec<String>,
}

/// Score of `a` over `matches` matches against `b`, and the game count.
fn pairing_score(cfg: &TuneConfig, a: usize, b: usize, seed: u64) -> (f64, usize) {
    let idx: Vec<usize> = (0..cfg.matches).collect();
    let recs = par_map(&idx, |&m| {
        let s = match_seed(seed, 0, m);
        crate::with_game!(cfg.game, |g| play_match(&g, cfg.game, &cfg.grid[a], &cfg.grid[b], cfg.budget, s, false))
    });
    let games = recs.iter().map(|r| r.games.len()).sum();
    (recs.iter().map(|r| r.score_a()).sum(), games)
}

pub fn tune_elimination(cfg: &TuneConfig) -> Result<TuneResult, HarnessError> {
    if cfg.grid.len() < 2 {
        return Err(HarnessError::Config("tuning needs at least two entrants".into()));
    }
    if cfg.matches == 0 {
        return Err(HarnessError::NoGames);
    }
    let mut alive: Vec<usize> = (0..cfg.grid.len()).collect();
    let mut log = Vec::new();
    let mut round = 0;
    while alive.len() > 1 {
        round += 1;
        let mut next = Vec::with_capacity(alive.len().div_ceil(2));
        for (slot, pair) in alive.chunks(2).enumerate() {
            let &[a, b] = pair else {
                log.push(format!("round {round}: #{} {} bye", pair[0], cfg.grid[pair[0]]));
                next.push(pair[0]);
                continue;
            };
            let seed = combine(&[cfg.seed, round as u64, slot as u64]);
            let (mut score, mut games) = pairing_score(cfg, a, b, seed);
            if games == 0 {
                return Err(HarnessError::NoGames);
            }
            let mut line = format!("round {round}: #{a} {} vs #{b} {}: {score}/{games}", cfg.grid[a], cfg.grid[b]);
            if 2.0 * score == games as f64 {
                (score, games) = pairing_score(cfg, a, b, combine(&[seed, 1]));
                line.push_str(&format!(", replay {score}/{games}"));
            }
            let winner = if 2.0 * score > games as f64 {
                a
            } else if 2.0 * score < games as f64 {
                b
            } else {
                a.min(b)
            };
            line.push_str(&format!(" -> #{winner}"));
            log.push(line);
            next.push(winner);
        }
        alive = next;
    }
    let winner_index = alive[0];
    Ok(TuneResult { winner_index, winner: cfg.grid[winner_index], rounds: round, log })
}
