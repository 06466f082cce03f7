//! Tournaments of seat-swapped matches with normal-approximation 95% CIs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{play_match, EngineSpec, HarnessError, MatchRecord};
use crate::domains::GameKind;
use crate::parallel::par_map;
use crate::rng::combine;
use crate::search::Budget;

/// CSV layout version, written in the JSON metadata.
pub const CSV_VERSION: u32 = 1;

/// `1.96 * sqrt(p (1 - p) / n)`.
pub fn ci_half_width(p: f64, n: usize) -> Result<f64, HarnessError> {
    if n == 0 {
        return Err(HarnessError::NoGames);
    }
    Ok(1.96 * (p * (1.0 - p) / n as f64).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentConfig {
    pub game: GameKind,
    pub pairings: Vec<(EngineSpec, EngineSpec)>,
    pub matches: usize,
    pub seed: u64,
    pub budget: Budget,
    pub log_moves: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingRow {
    pub engine_a: String,
    pub engine_b: String,
    pub matches: usize,
    pub games: usize,
    pub voided: usize,
    pub score_a: f64,
    /// Left-player score fraction.
    pub win_rate: f64,
    pub ci95: f64,
}

impl PairingRow {
    pub fn excludes_half(&self) -> bool {
        (self.win_rate - 0.5).abs() > self.ci95
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentReport {
    pub config: TournamentConfig,
    pub rows: Vec<PairingRow>,
    pub matches: Vec<Vec<MatchRecord>>,
}

/// Seed of match `m` in pairing `p`.
pub fn match_seed(master: u64, pairing: usize, m: usize) -> u64 {
    combine(&[master, pairing as u64, m as u64])
}

pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentReport, HarnessError> {
    if config.pairings.is_empty() {
        return Err(HarnessError::Config("tournament needs at least one pairing".into()));
    }
    if config.matches == 0 {
        return Err(HarnessError::NoGames);
    }
    let jobs: Vec<(usize, usize)> =
        (0..config.pairings.len()).flat_map(|p| (0..config.matches).map(move |m| (p, m))).collect();
    let records = par_map(&jobs, |&(p, m)| {
        let (a, b) = &config.pairings[p];
        let seed = match_seed(config.seed, p, m);
        crate::with_game!(config.game, |g| play_match(&g, config.game, a, b, config.budget, seed, config.log_moves))
    });
    let mut matches: Vec<Vec<MatchRecord>> = vec![Vec::with_capacity(config.matches); config.pairings.len()];
    for (&(p, _), r) in jobs.iter().zip(records) {
        matches[p].push(r);
    }
    let mut rows = Vec::with_capacity(matches.len());
    for ((a, b), ms) in config.pairings.iter().zip(&matches) {
        let games: usize = ms.iter().map(|m| m.games.len()).sum();
        let voided = ms.iter().filter(|m| m.voided.is_some()).count();
        if games == 0 {
            return Err(HarnessError::NoGames);
        }
        let score_a: f64 = ms.iter().map(MatchRecord::score_a).sum();
        let win_rate = score_a / games as f64;
        rows.push(PairingRow {
            engine_a: a.to_string(),
            engine_b: b.to_string(),
            matches: ms.len(),
            games,
            voided,
            score_a,
            win_rate,
            ci95: ci_half_width(win_rate, games)?,
        });
    }
    Ok(TournamentReport { config: config.clone(), rows, matches })
}

impl TournamentReport {
    /// `summary.csv`, `matches.csv` (both deterministic under node budgets)
    /// and `report.json` (adds wall-clock timings).
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
        w.write_record(["game", "engine_a", "engine_b", "matches", "games", "voided", "score_a", "win_rate", "ci95"])?;
        for r in &self.rows {
            w.write_record([
                self.config.game.name().to_string(),
                r.engine_a.clone(),
                r.engine_b.clone(),
                r.matches.to_string(),
                r.games.to_string(),
                r.voided.to_string(),
                r.score_a.to_string(),
                r.win_rate.to_string(),
                r.ci95.to_string(),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("matches.csv"))?;
        w.write_record([
            "pairing", "match", "seed", "engine_a", "engine_b", "game", "first", "score_a", "plies", "nodes_a", "nodes_b",
            "voided",
        ])?;
        for (p, ms) in self.matches.iter().enumerate() {
            for (m, rec) in ms.iter().enumerate() {
                if let Some(reason) = &rec.voided {
                    w.write_record([
                        p.to_string(),
                        m.to_string(),
                        rec.seed.to_string(),
                        rec.engine_a.clone(),
                        rec.engine_b.clone(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        reason.clone(),
                    ])?;
                }
                for (gi, g) in rec.games.iter().enumerate() {
                    w.write_record([
                        p.to_string(),
                        m.to_string(),
                        rec.seed.to_string(),
                        rec.engine_a.clone(),
                        rec.engine_b.clone(),
                        gi.to_string(),
                        format!("{:?}", g.first),
                        g.score_a.to_string(),
                        g.plies.to_string(),
                        g.nodes_a.to_string(),
                        g.nodes_b.to_string(),
                        String::new(),
                    ])?;
                }
            }
        }
        w.flush()?;
        let meta = serde_json::json!({ "csv_version": CSV_VERSION, "report": self });
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }
}
