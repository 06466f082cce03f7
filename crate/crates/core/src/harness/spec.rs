//! Engine spec strings: `kind[:key=value,...]`, e.g. `star2ss:c=18,seed=7`.
//!
//! Kinds: `exp`, `star1`, `star2`, `expss`, `star1ss`, `star2ss`, `mcts`,
//! `dpw`. Keys: `c` (sample width), `seed`, `nodes`, `ms`, `depth` (max
//! iterative-deepening depth), `C1`, `dr`, `C2`, `alpha`, `dedup` (0/1).
//! Unset values fall back to the game's tuned constants and the run's
//! default budget.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::domains::GameKind;
use crate::game::Game;
use crate::search::{Budget, Engine, MctsEngine, MctsParams, MctsVariant, StarConfig, StarEngine, StarVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EngineKind {
    Exp,
    Star1,
    Star2,
    ExpSs,
    Star1Ss,
    Star2Ss,
    Mcts,
    Dpw,
}

impl EngineKind {
    pub const ALL: [EngineKind; 8] = [
        EngineKind::Exp,
        EngineKind::Star1,
        EngineKind::Star2,
        EngineKind::ExpSs,
        EngineKind::Star1Ss,
        EngineKind::Star2Ss,
        EngineKind::Mcts,
        EngineKind::Dpw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Exp => "exp",
            EngineKind::Star1 => "star1",
            EngineKind::Star2 => "star2",
            EngineKind::ExpSs => "expss",
            EngineKind::Star1Ss => "star1ss",
            EngineKind::Star2Ss => "star2ss",
            EngineKind::Mcts => "mcts",
            EngineKind::Dpw => "dpw",
        }
    }

    fn star(self) -> Option<(StarVariant, bool)> {
        match self {
            EngineKind::Exp => Some((StarVariant::Expectimax, false)),
            EngineKind::Star1 => Some((StarVariant::Star1, false)),
            EngineKind::Star2 => Some((StarVariant::Star2, false)),
            EngineKind::ExpSs => Some((StarVariant::Expectimax, true)),
            EngineKind::Star1Ss => Some((StarVariant::Star1, true)),
            EngineKind::Star2Ss => Some((StarVariant::Star2, true)),
            EngineKind::Mcts | EngineKind::Dpw => None,
        }
    }

    pub fn is_sampled(self) -> bool {
        matches!(self, EngineKind::ExpSs | EngineKind::Star1Ss | EngineKind::Star2Ss)
    }
}

impl FromStr for EngineKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let s = if s == "expectimax" { "exp".to_string() } else { s };
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Spec(format!("unknown engine kind '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineSpec {
    pub kind: EngineKind,
    pub c: Option<usize>,
    pub seed: u64,
    pub budget: Option<Budget>,
    pub max_depth: Option<u32>,
    pub uct_c: Option<f64>,
    pub rollout_depth: Option<usize>,
    pub dpw_c: Option<f64>,
    pub dpw_alpha: Option<f64>,
    /// `dedup=0` searches identical chance successors separately.
    pub dedup: bool,
}

impl EngineSpec {
    pub fn new(kind: EngineKind) -> Self {
        EngineSpec {
            kind,
            c: None,
            seed: 0,
            budget: None,
            max_depth: None,
            uct_c: None,
            rollout_depth: None,
            dpw_c: None,
            dpw_alpha: None,
            dedup: true,
        }
    }

    pub fn with_c(mut self, c: usize) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = Some(budget);
        self
    }

    /// Sample width after applying the game's tuned default.
    pub fn sample_width(&self, game: GameKind) -> usize {
        let t = game.tuned();
        self.c.unwrap_or(match self.kind {
            EngineKind::Star1Ss => t.star1ss_c,
            EngineKind::Star2Ss => t.star2ss_c,
            _ => t.expss_c,
        })
    }

    /// Builds a fresh engine; `default_budget` applies when the spec has none.
    pub fn build<G: Game + 'static>(&self, game: GameKind, default_budget: Budget) -> Box<dyn Engine<G>> {
        let budget = self.budget.unwrap_or(default_budget);
        let t = game.tuned();
        match self.kind.star() {
            Some((variant, sampled)) => {
                let base = if sampled {
                    StarConfig::sampled(variant, self.sample_width(game), self.seed)
                } else {
                    StarConfig::new(variant)
                };
                let max_depth = self.max_depth.unwrap_or(base.budget.max_depth);
                let config = StarConfig { dedup_successors: self.dedup, ..base.with_budget(budget, max_depth) };
                Box::new(StarEngine::new(config))
            }
            None => {
                let variant = if self.kind == EngineKind::Dpw { MctsVariant::Dpw } else { MctsVariant::Plain };
                let params = MctsParams::new(
                    variant,
                    self.uct_c.unwrap_or(t.uct_c),
                    self.rollout_depth.unwrap_or(t.rollout_depth),
                    self.dpw_c.unwrap_or(t.dpw_c),
                    self.dpw_alpha.unwrap_or(t.dpw_alpha),
                )
                .with_budget(budget);
                Box::new(MctsEngine::<G>::new(params))
            }
        }
    }
}

impl fmt::Display for EngineSpec {
    /// Canonical spec string; parses back to an equal spec.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(c) = self.c {
            parts.push(format!("c={c}"));
        }
        if self.seed != 0 {
            parts.push(format!("seed={}", self.seed));
        }
        match self.budget {
            Some(Budget::Nodes(n)) | Some(Budget::Simulations(n)) => parts.push(format!("nodes={n}")),
            Some(Budget::Millis(ms)) => parts.push(format!("ms={ms}")),
            Some(Budget::Unlimited) | None => {}
        }
        if let Some(d) = self.max_depth {
            parts.push(format!("depth={d}"));
        }
        if let Some(v) = self.uct_c {
            parts.push(format!("C1={v}"));
        }
        if let Some(v) = self.rollout_depth {
            parts.push(format!("dr={v}"));
        }
        if let Some(v) = self.dpw_c {
            parts.push(format!("C2={v}"));
        }
        if let Some(v) = self.dpw_alpha {
            parts.push(format!("alpha={v}"));
        }
        if !self.dedup {
            parts.push("dedup=0".into());
        }
        if parts.is_empty() {
            write!(f, "{}", self.kind.name())
        } else {
            write!(f, "{}:{}", self.kind.name(), parts.join(","))
        }
    }
}

impl FromStr for EngineSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut spec = EngineSpec::new(kind.parse()?);
        for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| HarnessError::Spec(format!("expected key=value, got '{part}'")))?;
            let bad = || HarnessError::Spec(format!("bad value for '{key}': '{value}'"));
            match key.trim() {
                "c" => {
                    let c: usize = value.parse().map_err(|_| bad())?;
                    if c == 0 {
                        return Err(bad());
                    }
                    spec.c = Some(c);
                }
                "seed" => spec.seed = value.parse().map_err(|_| bad())?,
                "nodes" => spec.budget = Some(Budget::Nodes(value.parse().map_err(|_| bad())?)),
                "ms" => spec.budget = Some(Budget::Millis(value.parse().map_err(|_| bad())?)),
                "depth" => spec.max_depth = Some(value.parse().map_err(|_| bad())?),
                "C1" | "c1" => spec.uct_c = Some(value.parse().map_err(|_| bad())?),
                "dr" => spec.rollout_depth = Some(value.parse().map_err(|_| bad())?),
                "C2" | "c2" => spec.dpw_c = Some(value.parse().map_err(|_| bad())?),
                "alpha" => spec.dpw_alpha = Some(value.parse().map_err(|_| bad())?),
                "dedup" => {
                    spec.dedup = match value {
                        "1" | "true" => true,
                        "0" | "false" => false,
                        _ => return Err(bad()),
                    }
                }
                other => return Err(HarnessError::Spec(format!("unknown key '{other}'"))),
            }
        }
        if spec.c.is_some() && !spec.kind.is_sampled() {
            return Err(HarnessError::Spec(format!("'c' only applies to sampled engines, not {}", spec.kind.name())));
        }
        Ok(spec)
    }
}
