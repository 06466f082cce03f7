//! Two-dice Pig.
//!
//! Each turn the acting player rolls two dice or stops. Rolling without a one
//! adds the sum to the turn total, a single one forfeits the turn total and
//! ends the turn, double ones also reset the player's banked score to zero.
//! Stopping banks the turn total; banking 100 or more wins.
//!
//! Roll outcomes are grouped into the 21 unordered die pairs. The turn total
//! saturates so that `score + turn_total <= 199`; any such state is already a
//! certain win by stopping, so saturation never changes a game value.
//!
//! Text form: `pig <score1> <score2> <turn_total> <to_act:1|2>` for live
//! states and `pig <score1> <score2> 0 w<winner>` for finished games.

use crate::game::{Game, GameError, GameResult, Player};
use crate::util::stable_hash;

pub const TARGET: u16 = 100;
pub const MAX_SUM: u16 = 199;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PigState {
    pub scores: [u16; 2],
    pub turn_total: u16,
    pub to_act: Player,
    pub winner: Option<Player>,
}

impl PigState {
    pub fn new(score1: u16, score2: u16, turn_total: u16, to_act: Player) -> Self {
        PigState { scores: [score1, score2], turn_total, to_act, winner: None }
    }

    /// `(score_to_act, score_opponent, turn_total)`.
    pub fn canonical(&self) -> (u16, u16, u16) {
        let me = self.to_act.index();
        (self.scores[me], self.scores[1 - me], self.turn_total)
    }

    pub fn from_canonical(me: u16, opp: u16, turn_total: u16, to_act: Player) -> Self {
        let mut scores = [0; 2];
        scores[to_act.index()] = me;
        scores[to_act.opponent().index()] = opp;
        PigState { scores, turn_total, to_act, winner: None }
    }

    /// Stopping now wins outright.
    pub fn can_bank_win(&self) -> bool {
        self.winner.is_none() && self.scores[self.to_act.index()] + self.turn_total >= TARGET
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PigAction {
    Roll,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PigOutcome {
    /// Unordered pair, `low <= high`.
    Dice(u8, u8),
    Certain,
}

/// The 21 unordered pairs with their probabilities, `(1,1)` first.
pub fn roll_distribution() -> Vec<(PigOutcome, f64)> {
    let mut out = Vec::with_capacity(21);
    for a in 1..=6u8 {
        for b in a..=6u8 {
            let p = if a == b { 1.0 / 36.0 } else { 2.0 / 36.0 };
            out.push((PigOutcome::Dice(a, b), p));
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct Pig;

impl Pig {
    pub fn new() -> Self {
        Pig
    }
}

impl Game for Pig {
    type State = PigState;
    type Action = PigAction;
    type Outcome = PigOutcome;

    fn name(&self) -> &'static str {
        "pig"
    }

    fn initial_state(&self) -> PigState {
        PigState::new(0, 0, 0, Player::One)
    }

    fn is_terminal(&self, s: &PigState) -> bool {
        s.winner.is_some()
    }

    fn to_act(&self, s: &PigState) -> Player {
        s.to_act
    }

    fn legal_actions(&self, s: &PigState) -> Vec<PigAction> {
        if s.winner.is_some() {
            Vec::new()
        } else {
            vec![PigAction::Roll, PigAction::Stop]
        }
    }

    fn outcomes(&self, _s: &PigState, a: PigAction) -> Vec<(PigOutcome, f64)> {
        match a {
            PigAction::Roll => roll_distribution(),
            PigAction::Stop => vec![(PigOutcome::Certain, 1.0)],
        }
    }

    fn apply(&self, s: &PigState, a: PigAction, o: PigOutcome) -> PigState {
        let me = s.to_act.index();
        let mut next = *s;
        match (a, o) {
            (PigAction::Stop, _) => {
                next.scores[me] += s.turn_total;
                next.turn_total = 0;
                if next.scores[me] >= TARGET {
                    next.winner = Some(s.to_act);
                } else {
                    next.to_act = s.to_act.opponent();
                }
            }
            (PigAction::Roll, PigOutcome::Dice(1, 1)) => {
                next.scores[me] = 0;
                next.turn_total = 0;
                next.to_act = s.to_act.opponent();
            }
            (PigAction::Roll, PigOutcome::Dice(1, _)) => {
                next.turn_total = 0;
                next.to_act = s.to_act.opponent();
            }
            (PigAction::Roll, PigOutcome::Dice(x, y)) => {
                let cap = MAX_SUM - s.scores[me];
                next.turn_total = (s.turn_total + x as u16 + y as u16).min(cap);
            }
            (PigAction::Roll, PigOutcome::Certain) => {
                panic!("roll requires a dice outcome")
            }
        }
        next
    }

    fn utility(&self, s: &PigState) -> f64 {
        match s.winner {
            Some(p) => 100.0 * p.sign(),
            None => 0.0,
        }
    }

    /// Score difference from player one's view, the acting player's score
    /// including the turn total.
    fn evaluate(&self, s: &PigState) -> f64 {
        if s.winner.is_some() {
            return self.utility(s);
        }
        let mut eff = [s.scores[0] as f64, s.scores[1] as f64];
        eff[s.to_act.index()] += s.turn_total as f64;
        (eff[0] - eff[1]).clamp(-100.0, 100.0)
    }

    fn state_key(&self, s: &PigState) -> u64 {
        stable_hash(s)
    }

    fn encode_state(&self, s: &PigState) -> String {
        match s.winner {
            Some(w) => format!("pig {} {} 0 w{}", s.scores[0], s.scores[1], w.index() + 1),
            None => format!(
                "pig {} {} {} {}",
                s.scores[0],
                s.scores[1],
                s.turn_total,
                s.to_act.index() + 1
            ),
        }
    }

    fn decode_state(&self, text: &str) -> GameResult<PigState> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let bad = || GameError::Parse(format!("bad pig state '{text}'"));
        if parts.len() != 5 || parts[0] != "pig" {
            return Err(bad());
        }
        let s1: u16 = parts[1].parse().map_err(|_| bad())?;
        let s2: u16 = parts[2].parse().map_err(|_| bad())?;
        let t: u16 = parts[3].parse().map_err(|_| bad())?;
        let (to_act, winner) = match parts[4] {
            "1" => (Player::One, None),
            "2" => (Player::Two, None),
            "w1" => (Player::One, Some(Player::One)),
            "w2" => (Player::Two, Some(Player::Two)),
            _ => return Err(bad()),
        };
        let s = PigState { scores: [s1, s2], turn_total: t, to_act, winner };
        if winner.is_none() {
            let me = to_act.index();
            if s1 >= TARGET || s2 >= TARGET || s.scores[me] + t > MAX_SUM {
                return Err(bad());
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{checked_actions, checked_apply};

    #[test]
    fn roll_outcomes_match_enumeration() {
        // Independent oracle: all 36 ordered pairs.
        let mut double_one = 0;
        let mut single_one = 0;
        for a in 1..=6 {
            for b in 1..=6 {
                match (a == 1, b == 1) {
                    (true, true) => double_one += 1,
                    (true, false) | (false, true) => single_one += 1,
                    _ => {}
                }
            }
        }
        assert_eq!((double_one, single_one), (1, 10));
        let dist = roll_distribution();
        assert_eq!(dist.len(), 21);
        let p_double: f64 =
            dist.iter().filter(|(o, _)| *o == PigOutcome::Dice(1, 1)).map(|(_, p)| p).sum();
        let p_single: f64 = dist
            .iter()
            .filter(|(o, _)| matches!(o, PigOutcome::Dice(1, b) if *b != 1))
            .map(|(_, p)| p)
            .sum();
        assert!((p_double - 1.0 / 36.0).abs() < 1e-15);
        assert!((p_single - 10.0 / 36.0).abs() < 1e-15);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roll_adds_to_turn_total() {
        let g = Pig;
        let s = PigState::new(0, 0, 10, Player::One);
        let n = checked_apply(&g, &s, PigAction::Roll, PigOutcome::Dice(3, 4)).unwrap();
        assert_eq!(n.turn_total, 17);
        assert_eq!(n.to_act, Player::One);
    }

    #[test]
    fn single_one_ends_turn() {
        let g = Pig;
        let s = PigState::new(50, 0, 8, Player::One);
        let n = g.apply(&s, PigAction::Roll, PigOutcome::Dice(1, 5));
        assert_eq!((n.scores[0], n.turn_total, n.to_act), (50, 0, Player::Two));
    }

    #[test]
    fn double_one_resets_score() {
        let g = Pig;
        let s = PigState::new(50, 0, 8, Player::One);
        let n = g.apply(&s, PigAction::Roll, PigOutcome::Dice(1, 1));
        assert_eq!((n.scores[0], n.turn_total, n.to_act), (0, 0, Player::Two));
    }

    #[test]
    fn stop_banks_and_can_win() {
        let g = Pig;
        let s = PigState::new(90, 10, 12, Player::One);
        let n = g.apply(&s, PigAction::Stop, PigOutcome::Certain);
        assert_eq!(n.winner, Some(Player::One));
        assert_eq!(g.utility(&n), 100.0);
        assert_eq!(g.evaluate(&n), 100.0);
        let dist = g.outcomes(&s, PigAction::Stop);
        assert_eq!(dist, vec![(PigOutcome::Certain, 1.0)]);
    }

    #[test]
    fn legal_actions_order() {
        let g = Pig;
        assert_eq!(g.legal_actions(&g.initial_state()), vec![PigAction::Roll, PigAction::Stop]);
        let done = PigState { winner: Some(Player::Two), ..g.initial_state() };
        assert!(checked_actions(&g, &done).is_err());
    }

    #[test]
    fn foreign_outcome_rejected() {
        let g = Pig;
        let s = g.initial_state();
        assert!(checked_apply(&g, &s, PigAction::Stop, PigOutcome::Dice(2, 3)).is_err());
    }

    #[test]
    fn evaluation_examples() {
        let g = Pig;
        assert_eq!(g.evaluate(&PigState::new(50, 50, 0, Player::One)), 0.0);
        assert_eq!(g.evaluate(&PigState::new(60, 40, 0, Player::One)), 20.0);
        assert_eq!(g.evaluate(&PigState::new(60, 40, 15, Player::Two)), 5.0);
    }

    #[test]
    fn evaluation_antisymmetric_under_seat_swap() {
        let g = Pig;
        for (a, b, t) in [(10, 70, 5), (0, 0, 0), (99, 3, 40)] {
            let s = PigState::new(a, b, t, Player::One);
            let m = PigState::new(b, a, t, Player::Two);
            assert_eq!(g.evaluate(&s), -g.evaluate(&m));
        }
    }

    #[test]
    fn turn_total_saturates() {
        let g = Pig;
        let s = PigState::new(95, 0, 100, Player::One);
        let n = g.apply(&s, PigAction::Roll, PigOutcome::Dice(6, 6));
        assert_eq!(n.turn_total, MAX_SUM - 95);
    }

    #[test]
    fn text_round_trip() {
        let g = Pig;
        for s in [
            PigState::new(12, 40, 7, Player::Two),
            PigState { scores: [104, 3], turn_total: 0, to_act: Player::One, winner: Some(Player::One) },
        ] {
            let text = g.encode_state(&s);
            assert_eq!(g.decode_state(&text).unwrap(), s);
        }
        assert!(g.decode_state("pig 1 2").is_err());
    }
}
