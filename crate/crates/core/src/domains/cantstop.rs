//! Can't Stop for two players.
//!
//! Columns 2..12 have the official heights 3,5,7,9,11,13,11,9,7,5,3. A turn
//! starts with an explicit roll (single pseudo-action). After each roll of four
//! dice the player picks one pairing play and, in the same action, whether to
//! roll again or stop and bank the turn's progress. At most three columns can
//! carry temporary markers in one turn. A roll with no legal play busts the
//! turn. Claiming a third column wins.
//!
//! Dice outcomes are the 126 sorted four-dice multisets, grouped further when
//! two multisets offer exactly the same plays in the current position (their
//! successor states are identical). The representative of a group is its
//! lexicographically smallest multiset.
//!
//! Text form: `cantstop <p1 heights> <p2 heights> <claims> <temp> <phase> <to_act>`
//! where heights and temp are 11 comma-separated numbers, claims is a string
//! of `.12` per column and phase is `r` (awaiting roll) or four digits.

use std::sync::OnceLock;

use crate::game::{Game, GameError, GameResult, Player};
use crate::util::stable_hash;

pub const COLUMNS: usize = 11;
pub const HEIGHTS: [u8; COLUMNS] = [3, 5, 7, 9, 11, 13, 11, 9, 7, 5, 3];
pub const MAX_MARKERS: usize = 3;
pub const COLUMNS_TO_WIN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CsPhase {
    AwaitRoll,
    Rolled([u8; 4]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CantStopState {
    /// Banked heights per player, indexed by column - 2.
    pub progress: [[u8; COLUMNS]; 2],
    /// 0 unclaimed, 1 or 2 for the owner.
    pub claimed: [u8; COLUMNS],
    /// Temporary heights reached this turn by the acting player, 0 if no marker.
    pub temp: [u8; COLUMNS],
    pub phase: CsPhase,
    pub to_act: Player,
    pub winner: Option<Player>,
}

/// A pairing play. `second == 0` for a single-column play; equal columns
/// advance the same column twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pairing {
    pub first: u8,
    pub second: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CsAction {
    Roll,
    Play { pairing: Pairing, roll_again: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CsOutcome {
    Dice([u8; 4]),
    Certain,
}

struct DiceTable {
    /// Sorted multiset, probability, and the three pair-sum splits.
    rolls: Vec<([u8; 4], f64, [(u8, u8); 3])>,
}

fn dice_table() -> &'static DiceTable {
    static TABLE: OnceLock<DiceTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut counts: std::collections::BTreeMap<[u8; 4], u32> = Default::default();
        for a in 1..=6u8 {
            for b in 1..=6u8 {
                for c in 1..=6u8 {
                    for d in 1..=6u8 {
                        let mut k = [a, b, c, d];
                        k.sort_unstable();
                        *counts.entry(k).or_default() += 1;
                    }
                }
            }
        }
        let rolls = counts
            .into_iter()
            .map(|(k, n)| {
                let splits = [
                    (k[0] + k[1], k[2] + k[3]),
                    (k[0] + k[2], k[1] + k[3]),
                    (k[0] + k[3], k[1] + k[2]),
                ];
                (k, n as f64 / 1296.0, splits)
            })
            .collect();
        DiceTable { rolls }
    })
}

impl CantStopState {
    pub fn initial() -> Self {
        CantStopState {
            progress: [[0; COLUMNS]; 2],
            claimed: [0; COLUMNS],
            temp: [0; COLUMNS],
            phase: CsPhase::AwaitRoll,
            to_act: Player::One,
            winner: None,
        }
    }

    fn height(&self, col: usize) -> u8 {
        if self.temp[col] > 0 {
            self.temp[col]
        } else {
            self.progress[self.to_act.index()][col]
        }
    }

    fn markers(&self) -> usize {
        self.temp.iter().filter(|&&t| t > 0).count()
    }

    fn can_advance(&self, col: usize) -> bool {
        self.claimed[col] == 0
            && self.height(col) < HEIGHTS[col]
            && (self.temp[col] > 0 || self.markers() < MAX_MARKERS)
    }

    fn advance(&mut self, col: usize) {
        self.temp[col] = self.height(col) + 1;
    }

    pub fn claimed_count(&self, p: Player) -> usize {
        let tag = p.index() as u8 + 1;
        self.claimed.iter().filter(|&&c| c == tag).count()
    }

    /// Legal plays for a set of dice, sorted by column.
    pub fn plays(&self, dice: &[u8; 4]) -> Vec<Pairing> {
        let mut k = *dice;
        k.sort_unstable();
        let splits = [
            (k[0] + k[1], k[2] + k[3]),
            (k[0] + k[2], k[1] + k[3]),
            (k[0] + k[3], k[1] + k[2]),
        ];
        self.plays_for_splits(&splits)
    }

    fn plays_for_splits(&self, splits: &[(u8, u8); 3]) -> Vec<Pairing> {
        let mut out: Vec<Pairing> = Vec::with_capacity(6);
        for &(x, y) in splits {
            let (a, b) = (x.min(y), x.max(y));
            let (ca, cb) = (a as usize - 2, b as usize - 2);
            let mut both = *self;
            let mut ok = both.can_advance(ca);
            if ok {
                both.advance(ca);
                ok = both.can_advance(cb);
            }
            if ok {
                out.push(Pairing { first: a, second: b });
            } else {
                if self.can_advance(ca) {
                    out.push(Pairing { first: a, second: 0 });
                }
                if self.can_advance(cb) {
                    out.push(Pairing { first: b, second: 0 });
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn play(&mut self, p: Pairing) {
        self.advance(p.first as usize - 2);
        if p.second != 0 {
            self.advance(p.second as usize - 2);
        }
    }

    fn end_turn(&mut self) {
        self.temp = [0; COLUMNS];
        self.phase = CsPhase::AwaitRoll;
        self.to_act = self.to_act.opponent();
    }

    fn bank(&mut self) {
        let me = self.to_act.index();
        for col in 0..COLUMNS {
            if self.temp[col] > 0 {
                self.progress[me][col] = self.temp[col];
                if self.temp[col] >= HEIGHTS[col] {
                    self.claimed[col] = me as u8 + 1;
                    self.progress[1 - me][col] = 0;
                }
            }
        }
        if self.claimed_count(self.to_act) >= COLUMNS_TO_WIN {
            self.temp = [0; COLUMNS];
            self.winner = Some(self.to_act);
        } else {
            self.end_turn();
        }
    }

    /// Grouped dice distribution for a roll from this position.
    fn roll_distribution(&self) -> Vec<(CsOutcome, f64)> {
        let table = dice_table();
        let mut groups: Vec<(Vec<Pairing>, [u8; 4], f64)> = Vec::new();
        for (dice, p, splits) in &table.rolls {
            let plays = self.plays_for_splits(splits);
            match groups.iter_mut().find(|(g, _, _)| *g == plays) {
                Some(entry) => entry.2 += p,
                None => groups.push((plays, *dice, *p)),
            }
        }
        groups.into_iter().map(|(_, d, p)| (CsOutcome::Dice(d), p)).collect()
    }

    fn after_roll(&self, dice: [u8; 4]) -> Self {
        let mut next = *self;
        if self.plays(&dice).is_empty() {
            next.end_turn();
        } else {
            next.phase = CsPhase::Rolled(dice);
        }
        next
    }

    /// Progress score: fractional heights plus 2 per claimed column.
    fn progress_score(&self, p: Player) -> f64 {
        let tag = p.index() as u8 + 1;
        let mut total = 0.0;
        for col in 0..COLUMNS {
            if self.claimed[col] == tag {
                total += 2.0;
            } else if self.claimed[col] == 0 {
                let h = if p == self.to_act && self.temp[col] > 0 {
                    self.temp[col]
                } else {
                    self.progress[p.index()][col]
                };
                total += h as f64 / HEIGHTS[col] as f64;
            }
        }
        total
    }
}

/// Normaliser for the evaluation: three claimed columns plus eight full columns.
const MAX_PROGRESS: f64 = 2.0 * COLUMNS_TO_WIN as f64 + (COLUMNS - COLUMNS_TO_WIN) as f64;

#[derive(Debug, Clone, Default)]
pub struct CantStop;

impl CantStop {
    pub fn new() -> Self {
        CantStop
    }
}

impl Game for CantStop {
    type State = CantStopState;
    type Action = CsAction;
    type Outcome = CsOutcome;

    fn name(&self) -> &'static str {
        "cantstop"
    }

    fn initial_state(&self) -> CantStopState {
        CantStopState::initial()
    }

    fn is_terminal(&self, s: &CantStopState) -> bool {
        s.winner.is_some()
    }

    fn to_act(&self, s: &CantStopState) -> Player {
        s.to_act
    }

    fn legal_actions(&self, s: &CantStopState) -> Vec<CsAction> {
        if s.winner.is_some() {
            return Vec::new();
        }
        match s.phase {
            CsPhase::AwaitRoll => vec![CsAction::Roll],
            CsPhase::Rolled(dice) => {
                let mut out = Vec::new();
                for pairing in s.plays(&dice) {
                    out.push(CsAction::Play { pairing, roll_again: true });
                    out.push(CsAction::Play { pairing, roll_again: false });
                }
                out
            }
        }
    }

    fn outcomes(&self, s: &CantStopState, a: CsAction) -> Vec<(CsOutcome, f64)> {
        match a {
            CsAction::Roll => s.roll_distribution(),
            CsAction::Play { pairing, roll_again: true } => {
                let mut next = *s;
                next.play(pairing);
                next.roll_distribution()
            }
            CsAction::Play { roll_again: false, .. } => vec![(CsOutcome::Certain, 1.0)],
        }
    }

    fn apply(&self, s: &CantStopState, a: CsAction, o: CsOutcome) -> CantStopState {
        match (a, o) {
            (CsAction::Roll, CsOutcome::Dice(d)) => s.after_roll(d),
            (CsAction::Play { pairing, roll_again: true }, CsOutcome::Dice(d)) => {
                let mut next = *s;
                next.play(pairing);
                next.after_roll(d)
            }
            (CsAction::Play { pairing, roll_again: false }, _) => {
                let mut next = *s;
                next.play(pairing);
                next.bank();
                next
            }
            _ => panic!("rolling requires a dice outcome"),
        }
    }

    fn utility(&self, s: &CantStopState) -> f64 {
        s.winner.map_or(0.0, |p| 100.0 * p.sign())
    }

    fn evaluate(&self, s: &CantStopState) -> f64 {
        if s.winner.is_some() {
            return self.utility(s);
        }
        let diff = s.progress_score(Player::One) - s.progress_score(Player::Two);
        (100.0 * diff / MAX_PROGRESS).clamp(-100.0, 100.0)
    }

    fn state_key(&self, s: &CantStopState) -> u64 {
        stable_hash(s)
    }

    fn encode_state(&self, s: &CantStopState) -> String {
        let join = |xs: &[u8]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let claims: String = s
            .claimed
            .iter()
            .map(|&c| match c {
                1 => '1',
                2 => '2',
                _ => '.',
            })
            .collect();
        let phase = match s.phase {
            CsPhase::AwaitRoll => "r".to_string(),
            CsPhase::Rolled(d) => d.iter().map(|x| x.to_string()).collect(),
        };
        let act = match s.winner {
            Some(w) => format!("w{}", w.index() + 1),
            None => (s.to_act.index() + 1).to_string(),
        };
        format!(
            "cantstop {} {} {} {} {} {}",
            join(&s.progress[0]),
            join(&s.progress[1]),
            claims,
            join(&s.temp),
            phase,
            act
        )
    }

    fn decode_state(&self, text: &str) -> GameResult<CantStopState> {
        let bad = || GameError::Parse(format!("bad cantstop state '{text}'"));
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 7 || parts[0] != "cantstop" {
            return Err(bad());
        }
        let heights = |s: &str| -> GameResult<[u8; COLUMNS]> {
            let v: Vec<u8> = s.split(',').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| bad())
        };
        let p1 = heights(parts[1])?;
        let p2 = heights(parts[2])?;
        let mut claimed = [0u8; COLUMNS];
        if parts[3].len() != COLUMNS {
            return Err(bad());
        }
        for (i, ch) in parts[3].chars().enumerate() {
            claimed[i] = match ch {
                '.' => 0,
                '1' => 1,
                '2' => 2,
                _ => return Err(bad()),
            };
        }
        let temp = heights(parts[4])?;
        let phase = if parts[5] == "r" {
            CsPhase::AwaitRoll
        } else {
            let d: Vec<u8> = parts[5].chars().map(|c| c.to_digit(10).map(|x| x as u8)).collect::<Option<_>>().ok_or_else(bad)?;
            let d: [u8; 4] = d.try_into().map_err(|_| bad())?;
            if d.iter().any(|x| !(1..=6).contains(x)) {
                return Err(bad());
            }
            CsPhase::Rolled(d)
        };
        let (to_act, winner) = match parts[6] {
            "1" => (Player::One, None),
            "2" => (Player::Two, None),
            "w1" => (Player::One, Some(Player::One)),
            "w2" => (Player::Two, Some(Player::Two)),
            _ => return Err(bad()),
        };
        Ok(CantStopState { progress: [p1, p2], claimed, temp, phase, to_act, winner })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dice_table_has_126_multisets() {
        let t = dice_table();
        assert_eq!(t.rolls.len(), 126);
        let total: f64 = t.rolls.iter().map(|r| r.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opening_roll_groups_sum_to_one() {
        let g = CantStop;
        let s = g.initial_state();
        assert_eq!(g.legal_actions(&s), vec![CsAction::Roll]);
        let dist = g.outcomes(&s, CsAction::Roll);
        assert!(dist.len() < 126);
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plays_respect_three_marker_rule() {
        let mut s = CantStopState::initial();
        s.temp[0] = 1; // column 2
        s.temp[1] = 1; // column 3
        s.temp[2] = 1; // column 4
        s.phase = CsPhase::Rolled([3, 3, 4, 4]);
        // sums available: (6,8), (7,7); none of 6,7,8 allowed with three markers placed.
        assert!(s.plays(&[3, 3, 4, 4]).is_empty());
        // 1,1,1,2 -> splits (2,3), (2,3), (3,2) -> both columns already marked.
        assert_eq!(s.plays(&[1, 1, 1, 2]), vec![Pairing { first: 2, second: 3 }]);
    }

    #[test]
    fn single_play_when_only_one_marker_left() {
        let mut s = CantStopState::initial();
        s.temp[0] = 1;
        s.temp[1] = 1;
        // dice 3,3,4,4: splits (6,8),(7,7),(7,7)
        let plays = s.plays(&[3, 3, 4, 4]);
        assert_eq!(
            plays,
            vec![
                Pairing { first: 6, second: 0 },
                Pairing { first: 7, second: 7 },
                Pairing { first: 8, second: 0 }
            ]
        );
    }

    #[test]
    fn actions_ordered_by_column_then_roll_stop() {
        let g = CantStop;
        let mut s = g.initial_state();
        s.phase = CsPhase::Rolled([1, 2, 3, 4]);
        let acts = g.legal_actions(&s);
        assert_eq!(acts.len() % 2, 0);
        for pair in acts.chunks(2) {
            assert!(matches!(pair[0], CsAction::Play { roll_again: true, .. }));
            assert!(matches!(pair[1], CsAction::Play { roll_again: false, .. }));
        }
        let cols: Vec<Pairing> = acts
            .iter()
            .step_by(2)
            .map(|a| match a {
                CsAction::Play { pairing, .. } => *pairing,
                _ => unreachable!(),
            })
            .collect();
        let mut sorted = cols.clone();
        sorted.sort();
        assert_eq!(cols, sorted);
    }

    #[test]
    fn bust_passes_turn_and_loses_temp() {
        let g = CantStop;
        let mut s = g.initial_state();
        s.temp[0] = 1;
        s.temp[1] = 1;
        s.temp[2] = 1;
        s.phase = CsPhase::Rolled([1, 1, 1, 2]);
        let a = CsAction::Play { pairing: Pairing { first: 2, second: 3 }, roll_again: true };
        let n = g.apply(&s, a, CsOutcome::Dice([3, 3, 4, 4]));
        assert_eq!(n.to_act, Player::Two);
        assert_eq!(n.temp, [0; COLUMNS]);
        assert_eq!(n.phase, CsPhase::AwaitRoll);
        assert_eq!(n.progress[0], [0; COLUMNS]);
    }

    #[test]
    fn stopping_claims_and_wins() {
        let g = CantStop;
        let mut s = g.initial_state();
        s.claimed[0] = 1;
        s.claimed[10] = 1;
        s.progress[0][1] = 4;
        s.progress[1][1] = 2;
        s.phase = CsPhase::Rolled([1, 2, 1, 2]);
        let a = CsAction::Play { pairing: Pairing { first: 3, second: 0 }, roll_again: false };
        assert!(g.legal_actions(&s).contains(&a));
        let n = g.apply(&s, a, CsOutcome::Certain);
        assert_eq!(n.winner, Some(Player::One));
        assert_eq!(n.progress[1][1], 0);
        assert_eq!(g.evaluate(&n), 100.0);
    }

    #[test]
    fn evaluation_is_bounded_and_zero_at_start() {
        let g = CantStop;
        assert_eq!(g.evaluate(&g.initial_state()), 0.0);
    }

    #[test]
    fn text_round_trip() {
        let g = CantStop;
        let mut s = g.initial_state();
        s.progress[0][3] = 4;
        s.claimed[5] = 2;
        s.temp[4] = 2;
        s.phase = CsPhase::Rolled([1, 3, 5, 6]);
        s.to_act = Player::Two;
        assert_eq!(g.decode_state(&g.encode_state(&s)).unwrap(), s);
    }
}
