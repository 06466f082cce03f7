//! Two-player Ra, base rules without disaster tiles.
//!
//! Tile set (170 tiles): 30 Ra, 8 gods, 5 gold, 25 pharaohs, 25 Niles,
//! 12 floods, 5 civilizations of each of 5 kinds, 5 monuments of each of
//! 8 kinds. Suns: player one holds 2,5,6,9, player two 3,4,7,8 and sun 1
//! starts in the centre.
//!
//! On a turn the acting player draws a tile from the bag or invokes an
//! auction (only with tiles on the track). Drawing a Ra tile forces an
//! auction; the sixth Ra tile of an epoch ends it without an auction. In an
//! auction the player after the invoker bids first and the invoker last; each
//! bid must beat the current high sun. A voluntary invoker must bid when
//! nobody else did. The winner takes the track, their bid sun goes to the
//! centre and they receive the old centre sun face down. Players without
//! active suns skip turns; an epoch also ends when nobody has active suns.
//!
//! Epoch scoring: gods 2, gold 3, most pharaohs +5 / fewest -2, Niles and
//! floods 1 each if at least one flood is held, civilizations by distinct
//! kinds (0: -5, 3: 5, 4: 10, 5: 15). After the third epoch monuments score
//! 5/10/15 for 3/4/5 of a kind plus 1 per distinct kind (10 for 7 kinds,
//! 15 for 8) and the higher sun total gains 5 while the lower loses 5. Gods,
//! gold, civilizations and floods are discarded after each epoch. The game
//! starts with 10 points each; higher final score wins, equal scores draw.
//!
//! Text form: `ra <json>` (the state's field layout serialised as JSON).

use serde::{Deserialize, Serialize};

use crate::game::{Game, GameError, GameResult, Player};
use crate::util::stable_hash;

pub const KINDS: usize = 19;
pub const RA: usize = 0;
pub const GOD: usize = 1;
pub const GOLD: usize = 2;
pub const PHARAOH: usize = 3;
pub const NILE: usize = 4;
pub const FLOOD: usize = 5;
pub const CIV_FIRST: usize = 6;
pub const CIV_KINDS: usize = 5;
pub const MONUMENT_FIRST: usize = 11;
pub const MONUMENT_KINDS: usize = 8;

pub const TILE_COUNTS: [u8; KINDS] = [30, 8, 5, 25, 25, 12, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5];
pub const TRACK_CAPACITY: u8 = 8;
pub const RA_PER_EPOCH: u8 = 6;
pub const EPOCHS: u8 = 3;
pub const STARTING_POINTS: i16 = 10;

const P1_SUNS: [u8; 4] = [2, 5, 6, 9];
const P2_SUNS: [u8; 4] = [3, 4, 7, 8];

fn sun_mask(suns: &[u8]) -> u16 {
    suns.iter().fold(0, |m, &s| m | 1 << s)
}

fn suns_of(mask: u16) -> impl Iterator<Item = u8> {
    (1..=15u8).filter(move |s| mask & (1 << s) != 0)
}

fn sun_total(mask: u16) -> u32 {
    suns_of(mask).map(u32::from).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RaPhase {
    Turn,
    Auction {
        invoker: Player,
        voluntary: bool,
        high: Option<(Player, u8)>,
        /// Bidder after the one currently acting, if any.
        next: Option<Player>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RaState {
    pub epoch: u8,
    pub bag: [u8; KINDS],
    pub track: [u8; KINDS],
    pub ra_count: u8,
    pub active: [u16; 2],
    pub inactive: [u16; 2],
    pub center: u8,
    pub holdings: [[u8; KINDS]; 2],
    pub scores: [i16; 2],
    pub to_act: Player,
    pub phase: RaPhase,
    pub finished: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RaAction {
    Draw,
    Invoke,
    Bid(u8),
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RaOutcome {
    Tile(u8),
    Certain,
}

/// Points for one epoch's holdings against the opponent's.
pub fn epoch_points(mine: &[u8; KINDS], theirs: &[u8; KINDS]) -> i16 {
    let mut pts = 2 * mine[GOD] as i16 + 3 * mine[GOLD] as i16;
    if mine[PHARAOH] > theirs[PHARAOH] {
        pts += 5;
    } else if mine[PHARAOH] < theirs[PHARAOH] {
        pts -= 2;
    }
    if mine[FLOOD] > 0 {
        pts += mine[NILE] as i16 + mine[FLOOD] as i16;
    }
    let civ_kinds = mine[CIV_FIRST..CIV_FIRST + CIV_KINDS].iter().filter(|&&n| n > 0).count();
    pts += match civ_kinds {
        0 => -5,
        3 => 5,
        4 => 10,
        5 => 15,
        _ => 0,
    };
    pts
}

pub fn monument_points(mine: &[u8; KINDS]) -> i16 {
    let kinds = &mine[MONUMENT_FIRST..MONUMENT_FIRST + MONUMENT_KINDS];
    let mut pts: i16 = kinds
        .iter()
        .map(|&n| match n {
            3 => 5,
            4 => 10,
            n if n >= 5 => 15,
            _ => 0,
        })
        .sum();
    let distinct = kinds.iter().filter(|&&n| n > 0).count() as i16;
    pts += match distinct {
        8 => 15,
        7 => 10,
        d => d,
    };
    pts
}

impl RaState {
    pub fn initial() -> Self {
        let mut bag = TILE_COUNTS;
        bag[RA] = TILE_COUNTS[RA];
        RaState {
            epoch: 1,
            bag,
            track: [0; KINDS],
            ra_count: 0,
            active: [sun_mask(&P1_SUNS), sun_mask(&P2_SUNS)],
            inactive: [0, 0],
            center: 1,
            holdings: [[0; KINDS]; 2],
            scores: [STARTING_POINTS; 2],
            to_act: Player::One,
            phase: RaPhase::Turn,
            finished: false,
        }
    }

    pub fn track_len(&self) -> u8 {
        self.track.iter().sum()
    }

    pub fn bag_len(&self) -> u32 {
        self.bag.iter().map(|&n| n as u32).sum()
    }

    pub fn active_suns(&self, p: Player) -> u32 {
        self.active[p.index()].count_ones()
    }

    fn has_suns(&self, p: Player) -> bool {
        self.active[p.index()] != 0
    }

    /// Score each player would hold if the epoch ended now, monuments included.
    pub fn provisional_points(&self, p: Player) -> i16 {
        let me = p.index();
        self.scores[me]
            + epoch_points(&self.holdings[me], &self.holdings[1 - me])
            + monument_points(&self.holdings[me])
    }

    fn next_turn_after(&mut self, p: Player) {
        if self.has_suns(p.opponent()) {
            self.to_act = p.opponent();
        } else if self.has_suns(p) {
            self.to_act = p;
        } else {
            self.end_epoch();
            return;
        }
        self.phase = RaPhase::Turn;
        if self.bag_len() == 0 && self.track_len() == 0 {
            self.end_epoch();
        }
    }

    fn start_auction(&mut self, invoker: Player, voluntary: bool) {
        let opp = invoker.opponent();
        let (first, next) = if self.has_suns(opp) {
            (opp, if self.has_suns(invoker) { Some(invoker) } else { None })
        } else {
            (invoker, None)
        };
        self.to_act = first;
        self.phase = RaPhase::Auction { invoker, voluntary, high: None, next };
    }

    fn resolve_auction(&mut self, invoker: Player, high: Option<(Player, u8)>) {
        match high {
            Some((winner, sun)) => {
                let w = winner.index();
                for k in 0..KINDS {
                    self.holdings[w][k] += self.track[k];
                }
                self.track = [0; KINDS];
                self.active[w] &= !(1 << sun);
                self.inactive[w] |= 1 << self.center;
                self.center = sun;
            }
            None => {
                if self.track_len() >= TRACK_CAPACITY {
                    self.track = [0; KINDS];
                }
            }
        }
        if !self.has_suns(Player::One) && !self.has_suns(Player::Two) {
            self.end_epoch();
        } else {
            self.next_turn_after(invoker);
        }
    }

    fn end_epoch(&mut self) {
        let gained = [
            epoch_points(&self.holdings[0], &self.holdings[1]),
            epoch_points(&self.holdings[1], &self.holdings[0]),
        ];
        self.scores[0] += gained[0];
        self.scores[1] += gained[1];
        for h in self.holdings.iter_mut() {
            h[GOD] = 0;
            h[GOLD] = 0;
            h[FLOOD] = 0;
            for k in CIV_FIRST..CIV_FIRST + CIV_KINDS {
                h[k] = 0;
            }
        }
        self.track = [0; KINDS];
        self.ra_count = 0;
        if self.epoch >= EPOCHS {
            for p in 0..2 {
                self.scores[p] += monument_points(&self.holdings[p]);
            }
            let totals = [
                sun_total(self.active[0] | self.inactive[0]),
                sun_total(self.active[1] | self.inactive[1]),
            ];
            if totals[0] > totals[1] {
                self.scores[0] += 5;
                self.scores[1] -= 5;
            } else if totals[1] > totals[0] {
                self.scores[1] += 5;
                self.scores[0] -= 5;
            }
            self.finished = true;
            self.phase = RaPhase::Turn;
            return;
        }
        self.epoch += 1;
        for p in 0..2 {
            self.active[p] |= self.inactive[p];
            self.inactive[p] = 0;
        }
        let best = |m: u16| suns_of(m).max().unwrap_or(0);
        self.to_act =
            if best(self.active[0]) >= best(self.active[1]) { Player::One } else { Player::Two };
        self.phase = RaPhase::Turn;
        if self.bag_len() == 0 {
            self.end_epoch();
        }
    }

    pub fn winner(&self) -> Option<Player> {
        if !self.finished {
            return None;
        }
        match self.scores[0].cmp(&self.scores[1]) {
            std::cmp::Ordering::Greater => Some(Player::One),
            std::cmp::Ordering::Less => Some(Player::Two),
            std::cmp::Ordering::Equal => None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ra;

impl Ra {
    pub fn new() -> Self {
        Ra
    }
}

impl Game for Ra {
    type State = RaState;
    type Action = RaAction;
    type Outcome = RaOutcome;

    fn name(&self) -> &'static str {
        "ra"
    }

    fn initial_state(&self) -> RaState {
        RaState::initial()
    }

    fn is_terminal(&self, s: &RaState) -> bool {
        s.finished
    }

    fn to_act(&self, s: &RaState) -> Player {
        s.to_act
    }

    fn legal_actions(&self, s: &RaState) -> Vec<RaAction> {
        if s.finished {
            return Vec::new();
        }
        match s.phase {
            RaPhase::Turn => {
                let mut out = Vec::with_capacity(2);
                if s.track_len() < TRACK_CAPACITY && s.bag_len() > 0 {
                    out.push(RaAction::Draw);
                }
                if s.track_len() > 0 {
                    out.push(RaAction::Invoke);
                }
                out
            }
            RaPhase::Auction { invoker, voluntary, high, .. } => {
                let floor = high.map_or(0, |(_, sun)| sun);
                let mut out: Vec<RaAction> =
                    suns_of(s.active[s.to_act.index()]).filter(|&x| x > floor).map(RaAction::Bid).collect();
                let must_bid = voluntary && high.is_none() && s.to_act == invoker;
                if !must_bid || out.is_empty() {
                    out.push(RaAction::Pass);
                }
                out
            }
        }
    }

    fn outcomes(&self, s: &RaState, a: RaAction) -> Vec<(RaOutcome, f64)> {
        match a {
            RaAction::Draw => {
                let total = s.bag_len() as f64;
                s.bag
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(k, &n)| (RaOutcome::Tile(k as u8), n as f64 / total))
                    .collect()
            }
            _ => vec![(RaOutcome::Certain, 1.0)],
        }
    }

    fn apply(&self, s: &RaState, a: RaAction, o: RaOutcome) -> RaState {
        let mut next = s.clone();
        let me = s.to_act;
        match a {
            RaAction::Draw => {
                let kind = match o {
                    RaOutcome::Tile(k) => k as usize,
                    RaOutcome::Certain => panic!("draw requires a tile outcome"),
                };
                next.bag[kind] -= 1;
                if kind == RA {
                    next.ra_count += 1;
                    if next.ra_count >= RA_PER_EPOCH {
                        next.end_epoch();
                    } else {
                        next.start_auction(me, false);
                    }
                } else {
                    next.track[kind] += 1;
                    next.next_turn_after(me);
                }
            }
            RaAction::Invoke => next.start_auction(me, true),
            RaAction::Bid(_) | RaAction::Pass => {
                let RaPhase::Auction { invoker, voluntary, high, next: following } = s.phase else {
                    panic!("bid outside an auction");
                };
                let high = match a {
                    RaAction::Bid(sun) => Some((me, sun)),
                    _ => high,
                };
                match following {
                    Some(p) => {
                        next.to_act = p;
                        next.phase = RaPhase::Auction { invoker, voluntary, high, next: None };
                    }
                    None => next.resolve_auction(invoker, high),
                }
            }
        }
        next
    }

    fn utility(&self, s: &RaState) -> f64 {
        match s.winner() {
            Some(p) => 100.0 * p.sign(),
            None => 0.0,
        }
    }

    /// Provisional point difference plus two points per extra active sun.
    fn evaluate(&self, s: &RaState) -> f64 {
        if s.finished {
            return self.utility(s);
        }
        let pts = s.provisional_points(Player::One) as f64 - s.provisional_points(Player::Two) as f64;
        let suns = s.active_suns(Player::One) as f64 - s.active_suns(Player::Two) as f64;
        (pts + 2.0 * suns).clamp(-100.0, 100.0)
    }

    fn state_key(&self, s: &RaState) -> u64 {
        stable_hash(s)
    }

    fn encode_state(&self, s: &RaState) -> String {
        format!("ra {}", serde_json::to_string(s).expect("state serialises"))
    }

    fn decode_state(&self, text: &str) -> GameResult<RaState> {
        let body = text
            .strip_prefix("ra ")
            .ok_or_else(|| GameError::Parse(format!("bad ra state '{text}'")))?;
        serde_json::from_str(body).map_err(|e| GameError::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::sample_from;
    use crate::rng::rng_from_seed;
    use rand::seq::SliceRandom;

    #[test]
    fn tile_set_size() {
        assert_eq!(TILE_COUNTS.iter().map(|&n| n as u32).sum::<u32>(), 170);
        let s = RaState::initial();
        assert_eq!(s.bag_len(), 170);
        assert_eq!(s.active_suns(Player::One), 4);
    }

    #[test]
    fn opening_actions_and_draw_distribution() {
        let g = Ra;
        let s = g.initial_state();
        assert_eq!(g.legal_actions(&s), vec![RaAction::Draw]);
        let dist = g.outcomes(&s, RaAction::Draw);
        assert_eq!(dist.len(), KINDS);
        assert!((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dist[0].1 - 30.0 / 170.0).abs() < 1e-15);
    }

    #[test]
    fn ra_draw_forces_auction_opponent_first() {
        let g = Ra;
        let s = g.initial_state();
        let n = g.apply(&s, RaAction::Draw, RaOutcome::Tile(RA as u8));
        assert_eq!(n.to_act, Player::Two);
        assert!(matches!(n.phase, RaPhase::Auction { invoker: Player::One, voluntary: false, .. }));
        assert_eq!(
            g.legal_actions(&n),
            vec![RaAction::Bid(3), RaAction::Bid(4), RaAction::Bid(7), RaAction::Bid(8), RaAction::Pass]
        );
    }

    #[test]
    fn voluntary_invoker_must_bid() {
        let g = Ra;
        let mut s = g.initial_state();
        s = g.apply(&s, RaAction::Draw, RaOutcome::Tile(GOLD as u8));
        s = g.apply(&s, RaAction::Invoke, RaOutcome::Certain);
        // player two invoked; player one bids first and may pass
        assert_eq!(s.to_act, Player::One);
        assert!(g.legal_actions(&s).contains(&RaAction::Pass));
        s = g.apply(&s, RaAction::Pass, RaOutcome::Certain);
        assert_eq!(s.to_act, Player::Two);
        assert!(!g.legal_actions(&s).contains(&RaAction::Pass));
        s = g.apply(&s, RaAction::Bid(3), RaOutcome::Certain);
        assert_eq!(s.holdings[1][GOLD], 1);
        assert_eq!(s.center, 3);
        assert_eq!(s.inactive[1], 1 << 1);
        assert_eq!(s.to_act, Player::One);
    }

    #[test]
    fn scoring_rules() {
        let mut mine = [0u8; KINDS];
        let theirs = [0u8; KINDS];
        mine[GOD] = 1;
        mine[GOLD] = 1;
        mine[PHARAOH] = 2;
        mine[NILE] = 3;
        mine[FLOOD] = 1;
        mine[CIV_FIRST] = 1;
        mine[CIV_FIRST + 1] = 1;
        mine[CIV_FIRST + 2] = 2;
        // 2 + 3 + 5 + (3 + 1) + 5
        assert_eq!(epoch_points(&mine, &theirs), 19);
        assert_eq!(epoch_points(&theirs, &mine), -2 - 5);
        let mut m = [0u8; KINDS];
        m[MONUMENT_FIRST] = 3;
        m[MONUMENT_FIRST + 1] = 1;
        assert_eq!(monument_points(&m), 5 + 2);
    }

    #[test]
    fn random_games_finish_and_bound_utility() {
        let g = Ra;
        for seed in 0..20 {
            let mut rng = rng_from_seed(seed);
            let mut s = g.initial_state();
            let mut plies = 0;
            while !g.is_terminal(&s) {
                let acts = g.legal_actions(&s);
                assert!(!acts.is_empty(), "stuck at {s:?}");
                let a = *acts.choose(&mut rng).unwrap();
                let o = sample_from(&g.outcomes(&s, a), &mut rng);
                s = g.apply(&s, a, o);
                plies += 1;
                assert!(plies < 5000);
                assert!((-100.0..=100.0).contains(&g.evaluate(&s)));
            }
            assert_eq!(s.epoch, EPOCHS);
            assert_eq!(g.evaluate(&s), g.utility(&s));
        }
    }

    #[test]
    fn text_round_trip() {
        let g = Ra;
        let s = g.apply(&g.initial_state(), RaAction::Draw, RaOutcome::Tile(PHARAOH as u8));
        assert_eq!(g.decode_state(&g.encode_state(&s)).unwrap(), s);
    }
}
