//! Expectimax, Star1 and Star2 with their sparse-sampling variants, MCTS
//! with double progressive widening, an exact Pig solver and an experiment
//! harness for stochastic two-player zero-sum games.

pub mod domains;
pub mod game;
pub mod harness;
pub mod oracle;
pub mod parallel;
pub mod rng;
pub mod search;
pub mod stats;
pub mod util;

pub use game::{Game, GameError, GameResult, OutcomeEntry, OutcomeSet, Player, SearchWindow, ValueBounds};
