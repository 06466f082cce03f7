//! Single games and two-game seat-swapped matches.
//!
//! Dice are drawn by the driver, not the engines: each seat has its own
//! stream keyed by the match seed, so in both games of a match whoever sits
//! in seat one sees the same chance events as long as play coincides.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{EngineSpec, HarnessError};
use crate::domains::GameKind;
use crate::game::{sample_from, Game, Player};
use crate::rng::{combine, rng_from_seed};
use crate::search::{Budget, Engine};

pub const MAX_PLIES: u32 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seat {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    /// Who sat in seat one.
    pub first: Seat,
    /// 1 for a win by engine A, 0 for a loss, 0.5 for a tie.
    pub score_a: f64,
    pub plies: u32,
    pub nodes_a: u64,
    pub nodes_b: u64,
    pub millis: u64,
    pub moves: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub engine_a: String,
    pub engine_b: String,
    pub seed: u64,
    /// Empty when the match was voided.
    pub games: Vec<GameRecord>,
    pub voided: Option<String>,
}

impl MatchRecord {
    pub fn score_a(&self) -> f64 {
        self.games.iter().map(|g| g.score_a).sum()
    }
}

/// Outcome of [`play_game`] from seat one's point of view.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayedGame {
    /// Terminal utility for player one.
    pub utility: f64,
    pub plies: u32,
    pub nodes: [u64; 2],
    pub moves: Vec<String>,
}

/// Plays one game. `chance_seed` keys the per-seat dice streams,
/// `engine_seeds[seat]` the per-move search seeds. `visit` sees every
/// decision state before the move is chosen.
pub fn play_game<G: Game>(
    game: &G,
    engines: [&mut dyn Engine<G>; 2],
    chance_seed: u64,
    engine_seeds: [u64; 2],
    log_moves: bool,
    visit: &mut dyn FnMut(&G::State),
) -> Result<PlayedGame, HarnessError> {
    let mut streams = [rng_from_seed(combine(&[chance_seed, 0])), rng_from_seed(combine(&[chance_seed, 1]))];
    let mut state = game.initial_state();
    let mut plies = 0;
    let mut nodes = [0u64; 2];
    let mut moves = Vec::new();
    while !game.is_terminal(&state) {
        if plies >= MAX_PLIES {
            return Err(HarnessError::PlyLimit(MAX_PLIES));
        }
        visit(&state);
        let seat = game.to_act(&state).index();
        let seed = combine(&[engine_seeds[seat], plies as u64]);
        let result = engines[seat].search(game, &state, seed);
        nodes[seat] += result.nodes_visited;
        let action = result.best_action;
        let outcome = sample_from(&game.outcomes(&state, action), &mut streams[seat]);
        if log_moves {
            moves.push(format!("{} {:?} {:?}", seat + 1, action, outcome));
        }
        state = game.apply(&state, action, outcome);
        plies += 1;
    }
    Ok(PlayedGame { utility: game.utility(&state), plies, nodes, moves })
}

fn score_for(utility: f64, player: Player) -> f64 {
    let u = utility * player.sign();
    if u > 0.0 {
        1.0
    } else if u < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Two games with swapped seats under one seed: A is player one in the
/// first, B in the second. Engine failures void the match.
pub fn play_match<G: Game + 'static>(
    game: &G,
    kind: GameKind,
    a: &EngineSpec,
    b: &EngineSpec,
    default_budget: Budget,
    seed: u64,
    log_moves: bool,
) -> MatchRecord {
    let mut record =
        MatchRecord { engine_a: a.to_string(), engine_b: b.to_string(), seed, games: Vec::with_capacity(2), voided: None };
    for first in [Seat::A, Seat::B] {
        let mut ea = a.build::<G>(kind, default_budget);
        let mut eb = b.build::<G>(kind, default_budget);
        // Seeds follow the seat, not the engine, so an engine facing itself
        // replays the same game from both sides.
        let seeds = [combine(&[a.seed, seed, 0]), combine(&[b.seed, seed, 1])];
        let (seat_seeds, engines): ([u64; 2], [&mut dyn Engine<G>; 2]) = match first {
            Seat::A => (seeds, [ea.as_mut(), eb.as_mut()]),
            Seat::B => ([combine(&[b.seed, seed, 0]), combine(&[a.seed, seed, 1])], [eb.as_mut(), ea.as_mut()]),
        };
        let start = Instant::now();
        let played = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            play_game(game, engines, seed, seat_seeds, log_moves, &mut |_| {})
        }));
        let played = match played {
            Ok(Ok(p)) => p,
            Ok(Err(e)) => {
                record.voided = Some(e.to_string());
                record.games.clear();
                return record;
            }
            Err(_) => {
                record.voided = Some("engine panicked".into());
                record.games.clear();
                return record;
            }
        };
        let a_player = if first == Seat::A { Player::One } else { Player::Two };
        let (nodes_a, nodes_b) = match first {
            Seat::A => (played.nodes[0], played.nodes[1]),
            Seat::B => (played.nodes[1], played.nodes[0]),
        };
        record.games.push(GameRecord {
            first,
            score_a: score_for(played.utility, a_player),
            plies: played.plies,
            nodes_a,
            nodes_b,
            millis: start.elapsed().as_millis() as u64,
            moves: played.moves,
        });
    }
    record
}
