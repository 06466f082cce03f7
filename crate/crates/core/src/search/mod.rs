//! Search engines sharing one result type and one engine interface.

use serde::{Deserialize, Serialize};

use crate::game::Game;

pub mod mcts;
pub mod sampling;
pub mod star;
pub mod tt;

pub use mcts::{MctsEngine, MctsParams, MctsVariant};
pub use sampling::{theorem_bound, SamplingParams, TheoremParams};
pub use star::{expectimax_value, StarConfig, StarEngine, StarStats, StarVariant};
pub use tt::TranspositionTable;

/// Uniform engine output.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<A> {
    pub value: f64,
    pub best_action: A,
    /// Deepest fully searched depth (star engines) or deepest tree level (MCTS).
    pub completed_depth: u32,
    pub nodes_visited: u64,
    /// Set when the budget ran out before a single depth completed.
    pub incomplete: bool,
}

/// Resource limit of one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Budget {
    Nodes(u64),
    Millis(u64),
    /// MCTS simulations; star engines treat this like a node budget.
    Simulations(u64),
    Unlimited,
}

impl Budget {
    pub fn node_limit(self) -> Option<u64> {
        match self {
            Budget::Nodes(n) | Budget::Simulations(n) => Some(n),
            _ => None,
        }
    }

    pub fn millis(self) -> Option<u64> {
        match self {
            Budget::Millis(ms) => Some(ms),
            _ => None,
        }
    }

    /// Node and simulation budgets give bit-reproducible searches.
    pub fn is_deterministic(self) -> bool {
        !matches!(self, Budget::Millis(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthBudget {
    pub budget: Budget,
    pub max_depth: u32,
}

impl Default for DepthBudget {
    fn default() -> Self {
        DepthBudget { budget: Budget::Nodes(20_000), max_depth: 64 }
    }
}

/// A configured search engine. One instance is single-threaded and owns its
/// scratch state; results depend only on `(state, seed)` and configuration
/// (plus wall-clock time for millisecond budgets).
pub trait Engine<G: Game>: Send {
    fn name(&self) -> String;

    fn search(&mut self, game: &G, state: &G::State, seed: u64) -> SearchResult<G::Action>;
}

/// Normalises `-0.0` to `0.0` so equal values compare bit-identical.
#[inline]
pub(crate) fn norm(v: f64) -> f64 {
    v + 0.0
}
