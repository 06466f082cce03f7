//! The four test games and their tuned engine constants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::game::GameError;

pub mod cantstop;
pub mod ewn;
pub mod pig;
pub mod ra;

pub use cantstop::CantStop;
pub use ewn::Ewn;
pub use pig::Pig;
pub use ra::Ra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameKind {
    Pig,
    Ewn,
    CantStop,
    Ra,
}

/// Tuned per-game constants: sample widths for expSS/star1SS/star2SS and
/// MCTS `(C1, d_r, C2, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedParams {
    pub expss_c: usize,
    pub star1ss_c: usize,
    pub star2ss_c: usize,
    pub uct_c: f64,
    pub rollout_depth: usize,
    pub dpw_c: f64,
    pub dpw_alpha: f64,
}

impl GameKind {
    pub const ALL: [GameKind; 4] = [GameKind::Pig, GameKind::Ewn, GameKind::CantStop, GameKind::Ra];

    pub fn name(self) -> &'static str {
        match self {
            GameKind::Pig => "pig",
            GameKind::Ewn => "ewn",
            GameKind::CantStop => "cantstop",
            GameKind::Ra => "ra",
        }
    }

    pub fn tuned(self) -> TunedParams {
        let (widths, mcts) = match self {
            GameKind::Pig => ((20, 25, 18), (50.0, 0, 5.0, 0.2)),
            GameKind::Ewn => ((1, 1, 2), (200.0, 100, 4.0, 0.25)),
            GameKind::CantStop => ((25, 30, 15), (50.0, 10, 25.0, 0.3)),
            GameKind::Ra => ((5, 5, 2), (50.0, 0, 2.0, 0.1)),
        };
        TunedParams {
            expss_c: widths.0,
            star1ss_c: widths.1,
            star2ss_c: widths.2,
            uct_c: mcts.0,
            rollout_depth: mcts.1,
            dpw_c: mcts.2,
            dpw_alpha: mcts.3,
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_', '\'', ' '], "").as_str() {
            "pig" => Ok(GameKind::Pig),
            "ewn" | "einstein" => Ok(GameKind::Ewn),
            "cantstop" => Ok(GameKind::CantStop),
            "ra" => Ok(GameKind::Ra),
            _ => Err(GameError::Parse(format!("unknown game '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for g in GameKind::ALL {
            assert_eq!(g.name().parse::<GameKind>().unwrap(), g);
        }
        assert_eq!("Can't Stop".parse::<GameKind>().unwrap(), GameKind::CantStop);
        assert!("chess".parse::<GameKind>().is_err());
    }

    #[test]
    fn pig_constants() {
        let t = GameKind::Pig.tuned();
        assert_eq!((t.expss_c, t.star1ss_c, t.star2ss_c), (20, 25, 18));
        assert_eq!((t.uct_c, t.rollout_depth, t.dpw_c, t.dpw_alpha), (50.0, 0, 5.0, 0.2));
    }
}
