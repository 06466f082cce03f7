//! Matches, tournaments, elimination tuning and the sampling-error coverage
//! check, with reproducible CSV/JSON outputs.

use thiserror::Error;

pub mod config;
pub mod play;
pub mod spec;
pub mod theorem;
pub mod tournament;
pub mod tune;

pub use config::RunConfig;
pub use play::{play_game, play_match, GameRecord, MatchRecord, Seat};
pub use spec::{EngineKind, EngineSpec};
pub use theorem::{check_theorem, sample_pig_states, CoverageRow, CoverageTable, TheoremConfig};
pub use tournament::{ci_half_width, match_seed, run_tournament, PairingRow, TournamentConfig, TournamentReport};
pub use tune::{tune_elimination, TuneConfig, TuneResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("engine spec: {0}")]
    Spec(String),
    #[error("config: {0}")]
    Config(String),
    #[error("no completed games")]
    NoGames,
    #[error("game exceeded {0} plies")]
    PlyLimit(u32),
    #[error(transparent)]
    Game(#[from] crate::game::GameError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Runs `$body` with `$g` bound to the game value for `$kind`.
#[macro_export]
macro_rules! with_game {
    ($kind:expr, |$g:ident| $body:expr) => {
        match $kind {
            $crate::domains::GameKind::Pig => {
                let $g = $crate::domains::Pig;
                $body
            }
            $crate::domains::GameKind::Ewn => {
                let $g = $crate::domains::Ewn;
                $body
            }
            $crate::domains::GameKind::CantStop => {
                let $g = $crate::domains::CantStop;
                $body
            }
            $crate::domains::GameKind::Ra => {
                let $g = $crate::domains::Ra;
                $body
            }
        }
    };
}

/// A live position reached by uniformly random play from the start; each
/// ply stops the walk with probability 1/20. Restarts on terminal states.
pub fn random_position<G: crate::game::Game>(game: &G, seed: u64) -> G::State {
    use rand::Rng;
    let mut rng = crate::rng::rng_from_seed(seed);
    loop {
        let mut s = game.initial_state();
        while !game.is_terminal(&s) {
            if rng.gen_range(0..20) == 0 {
                return s;
            }
            let actions = game.legal_actions(&s);
            let a = actions[rng.gen_range(0..actions.len())];
            let o = crate::game::sample_from(&game.outcomes(&s, a), &mut rng);
            s = game.apply(&s, a, o);
        }
    }
}
