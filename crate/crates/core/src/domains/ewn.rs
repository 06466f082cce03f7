//! EinStein würfelt nicht! on a 5x5 board.
//!
//! Player one starts in the top-left triangle and races to square (4,4);
//! player two starts in the mirrored bottom-right triangle and races to (0,0).
//! A turn is an explicit roll (single pseudo-action, six equiprobable
//! outcomes) followed by a move of the rolled piece. If that piece is gone the
//! player moves the nearest surviving lower or higher piece. Pieces step
//! forward, sideways toward the goal, or diagonally toward it; any piece on
//! the destination, own or enemy, is captured.
//!
//! Initial layout (player one; player two is the point reflection):
//!
//! ```text
//! 1 2 3 . .
//! 4 5 . . .
//! 6 . . . .
//! ```
//!
//! Text form: `ewn <25 cells> <roll|-> <to_act>`, cells row-major, `.` for
//! empty, `a`..`f` for player one's pieces 1..6 and `A`..`F` for player two's.

use crate::game::{Game, GameError, GameResult, Player};
use crate::util::stable_hash;

pub const SIZE: usize = 5;
const CELLS: usize = SIZE * SIZE;
const START: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EwnState {
    /// `+v` for player one's piece `v`, `-v` for player two's, 0 empty.
    pub board: [i8; CELLS],
    pub pending_roll: Option<u8>,
    pub to_act: Player,
    pub winner: Option<Player>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EwnAction {
    Roll,
    Move { piece: u8, to: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EwnOutcome {
    Die(u8),
    Certain,
}

fn goal(p: Player) -> usize {
    match p {
        Player::One => CELLS - 1,
        Player::Two => 0,
    }
}

fn owner(cell: i8) -> Option<Player> {
    match cell.signum() {
        1 => Some(Player::One),
        -1 => Some(Player::Two),
        _ => None,
    }
}

fn chebyshev_to_goal(p: Player, idx: usize) -> usize {
    let (r, c) = (idx / SIZE, idx % SIZE);
    match p {
        Player::One => (SIZE - 1 - r).max(SIZE - 1 - c),
        Player::Two => r.max(c),
    }
}

impl EwnState {
    pub fn initial() -> Self {
        let mut board = [0i8; CELLS];
        for (i, &(r, c)) in START.iter().enumerate() {
            let v = (i + 1) as i8;
            board[r * SIZE + c] = v;
            board[(SIZE - 1 - r) * SIZE + (SIZE - 1 - c)] = -v;
        }
        EwnState { board, pending_roll: None, to_act: Player::One, winner: None }
    }

    pub fn piece_square(&self, p: Player, piece: u8) -> Option<usize> {
        let v = piece as i8 * p.sign() as i8;
        self.board.iter().position(|&c| c == v)
    }

    pub fn pieces(&self, p: Player) -> Vec<u8> {
        let mut out: Vec<u8> = self
            .board
            .iter()
            .filter(|&&c| owner(c) == Some(p))
            .map(|&c| c.unsigned_abs())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn piece_count(&self) -> usize {
        self.board.iter().filter(|&&c| c != 0).count()
    }

    /// Same position with colours swapped and the board point-reflected.
    pub fn mirrored(&self) -> Self {
        let mut board = [0i8; CELLS];
        for (i, &c) in self.board.iter().enumerate() {
            board[CELLS - 1 - i] = -c;
        }
        EwnState {
            board,
            pending_roll: self.pending_roll,
            to_act: self.to_act.opponent(),
            winner: self.winner.map(Player::opponent),
        }
    }
}

/// Pieces allowed to move for a roll: the rolled piece, or its nearest lower
/// and nearest higher surviving neighbours.
pub fn movable_pieces(alive: &[u8], roll: u8) -> Vec<u8> {
    if alive.contains(&roll) {
        return vec![roll];
    }
    let mut out = Vec::with_capacity(2);
    if let Some(&lo) = alive.iter().filter(|&&v| v < roll).max() {
        out.push(lo);
    }
    if let Some(&hi) = alive.iter().filter(|&&v| v > roll).min() {
        out.push(hi);
    }
    out
}

fn targets(p: Player, idx: usize) -> Vec<usize> {
    let (r, c) = ((idx / SIZE) as isize, (idx % SIZE) as isize);
    let dirs: [(isize, isize); 3] = match p {
        Player::One => [(0, 1), (1, 0), (1, 1)],
        Player::Two => [(0, -1), (-1, 0), (-1, -1)],
    };
    let mut out: Vec<usize> = dirs
        .iter()
        .map(|(dr, dc)| (r + dr, c + dc))
        .filter(|&(nr, nc)| (0..SIZE as isize).contains(&nr) && (0..SIZE as isize).contains(&nc))
        .map(|(nr, nc)| nr as usize * SIZE + nc as usize)
        .collect();
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Default)]
pub struct Ewn;

impl Ewn {
    pub fn new() -> Self {
        Ewn
    }

    /// Piece weight `1 + (5 - dist)/5`, scaled by 5 so sums are exact.
    fn weight5(p: Player, idx: usize) -> i32 {
        10 - chebyshev_to_goal(p, idx) as i32
    }
}

impl Game for Ewn {
    type State = EwnState;
    type Action = EwnAction;
    type Outcome = EwnOutcome;

    fn name(&self) -> &'static str {
        "ewn"
    }

    fn initial_state(&self) -> EwnState {
        EwnState::initial()
    }

    fn is_terminal(&self, s: &EwnState) -> bool {
        s.winner.is_some()
    }

    fn to_act(&self, s: &EwnState) -> Player {
        s.to_act
    }

    fn legal_actions(&self, s: &EwnState) -> Vec<EwnAction> {
        if s.winner.is_some() {
            return Vec::new();
        }
        let roll = match s.pending_roll {
            None => return vec![EwnAction::Roll],
            Some(r) => r,
        };
        let alive = s.pieces(s.to_act);
        let mut out = Vec::new();
        for piece in movable_pieces(&alive, roll) {
            let from = s.piece_square(s.to_act, piece).expect("alive piece on board");
            for to in targets(s.to_act, from) {
                out.push(EwnAction::Move { piece, to: to as u8 });
            }
        }
        out
    }

    fn outcomes(&self, _s: &EwnState, a: EwnAction) -> Vec<(EwnOutcome, f64)> {
        match a {
            EwnAction::Roll => (1..=6).map(|d| (EwnOutcome::Die(d), 1.0 / 6.0)).collect(),
            EwnAction::Move { .. } => vec![(EwnOutcome::Certain, 1.0)],
        }
    }

    fn apply(&self, s: &EwnState, a: EwnAction, o: EwnOutcome) -> EwnState {
        let mut next = *s;
        match (a, o) {
            (EwnAction::Roll, EwnOutcome::Die(d)) => {
                next.pending_roll = Some(d);
            }
            (EwnAction::Move { piece, to }, _) => {
                let me = s.to_act;
                let from = s.piece_square(me, piece).expect("moving piece exists");
                next.board[from] = 0;
                next.board[to as usize] = piece as i8 * me.sign() as i8;
                next.pending_roll = None;
                let opp_left = next.board.iter().any(|&c| owner(c) == Some(me.opponent()));
                if to as usize == goal(me) || !opp_left {
                    next.winner = Some(me);
                } else {
                    next.to_act = me.opponent();
                }
            }
            (EwnAction::Roll, EwnOutcome::Certain) => panic!("roll requires a die outcome"),
        }
        next
    }

    fn utility(&self, s: &EwnState) -> f64 {
        s.winner.map_or(0.0, |p| 100.0 * p.sign())
    }

    /// `100 (w1 - w2) / (w1 + w2)` with piece weight `1 + (5 - dist) / 5`.
    fn evaluate(&self, s: &EwnState) -> f64 {
        if s.winner.is_some() {
            return self.utility(s);
        }
        let mut w = [0i32; 2];
        for (i, &c) in s.board.iter().enumerate() {
            if let Some(p) = owner(c) {
                w[p.index()] += Self::weight5(p, i);
            }
        }
        100.0 * (w[0] - w[1]) as f64 / (w[0] + w[1]) as f64
    }

    fn state_key(&self, s: &EwnState) -> u64 {
        stable_hash(s)
    }

    fn encode_state(&self, s: &EwnState) -> String {
        let cells: String = s
            .board
            .iter()
            .map(|&c| match c {
                0 => '.',
                v if v > 0 => (b'a' + (v - 1) as u8) as char,
                v => (b'A' + (-v - 1) as u8) as char,
            })
            .collect();
        let roll = s.pending_roll.map_or("-".to_string(), |r| r.to_string());
        let act = match s.winner {
            Some(w) => format!("w{}", w.index() + 1),
            None => (s.to_act.index() + 1).to_string(),
        };
        format!("ewn {cells} {roll} {act}")
    }

    fn decode_state(&self, text: &str) -> GameResult<EwnState> {
        let bad = || GameError::Parse(format!("bad ewn state '{text}'"));
        let parts: Vec<&str> = text.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "ewn" || parts[1].len() != CELLS {
            return Err(bad());
        }
        let mut board = [0i8; CELLS];
        for (i, ch) in parts[1].chars().enumerate() {
            board[i] = match ch {
                '.' => 0,
                'a'..='f' => (ch as u8 - b'a' + 1) as i8,
                'A'..='F' => -((ch as u8 - b'A' + 1) as i8),
                _ => return Err(bad()),
            };
        }
        let pending_roll = match parts[2] {
            "-" => None,
            r => Some(r.parse::<u8>().ok().filter(|v| (1..=6).contains(v)).ok_or_else(bad)?),
        };
        let (to_act, winner) = match parts[3] {
            "1" => (Player::One, None),
            "2" => (Player::Two, None),
            "w1" => (Player::One, Some(Player::One)),
            "w2" => (Player::Two, Some(Player::Two)),
            _ => return Err(bad()),
        };
        Ok(EwnState { board, pending_roll, to_act, winner })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::checked_actions;

    fn with_roll(mut s: EwnState, r: u8) -> EwnState {
        s.pending_roll = Some(r);
        s
    }

    #[test]
    fn initial_is_chance_pending() {
        let g = Ewn;
        let s = g.initial_state();
        assert_eq!(g.legal_actions(&s), vec![EwnAction::Roll]);
        let dist = g.outcomes(&s, EwnAction::Roll);
        assert_eq!(dist.len(), 6);
        assert!((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(s.pieces(Player::One), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(s.pieces(Player::Two), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn rolled_piece_alive_moves_only_that_piece() {
        let g = Ewn;
        let s = with_roll(EwnState::initial(), 3);
        let acts = checked_actions(&g, &s).unwrap();
        assert!(!acts.is_empty());
        assert!(acts.iter().all(|a| matches!(a, EwnAction::Move { piece: 3, .. })));
    }

    #[test]
    fn captured_roll_uses_neighbours() {
        let g = Ewn;
        let mut s = EwnState::initial();
        for v in [2i8, 3, 4, 6] {
            let i = s.board.iter().position(|&c| c == v).unwrap();
            s.board[i] = 0;
        }
        let s = with_roll(s, 3);
        let pieces: Vec<u8> = g
            .legal_actions(&s)
            .iter()
            .map(|a| match a {
                EwnAction::Move { piece, .. } => *piece,
                EwnAction::Roll => 0,
            })
            .collect();
        assert!(pieces.contains(&1) && pieces.contains(&5));
        assert!(pieces.iter().all(|p| *p == 1 || *p == 5));
        // ordered by piece value first
        let first5 = pieces.iter().position(|&p| p == 5).unwrap();
        assert!(pieces[..first5].iter().all(|&p| p == 1));
    }

    #[test]
    fn movable_pieces_rule() {
        assert_eq!(movable_pieces(&[1, 5], 3), vec![1, 5]);
        assert_eq!(movable_pieces(&[4, 5], 3), vec![4]);
        assert_eq!(movable_pieces(&[1, 2], 6), vec![2]);
        assert_eq!(movable_pieces(&[1, 3, 6], 3), vec![3]);
    }

    #[test]
    fn reaching_goal_wins_and_capture_reduces_pieces() {
        let g = Ewn;
        let mut s = EwnState { board: [0; CELLS], pending_roll: Some(1), to_act: Player::One, winner: None };
        s.board[3 * SIZE + 3] = 1;
        s.board[0] = -1;
        s.board[4 * SIZE + 4] = -2;
        let before = s.piece_count();
        let n = g.apply(&s, EwnAction::Move { piece: 1, to: 24 }, EwnOutcome::Certain);
        assert_eq!(n.winner, Some(Player::One));
        assert_eq!(n.piece_count(), before - 1);
        assert_eq!(g.evaluate(&n), 100.0);
    }

    #[test]
    fn capturing_last_piece_wins() {
        let g = Ewn;
        let mut s = EwnState { board: [0; CELLS], pending_roll: Some(2), to_act: Player::Two, winner: None };
        s.board[12] = -2;
        s.board[6] = 4;
        let n = g.apply(&s, EwnAction::Move { piece: 2, to: 6 }, EwnOutcome::Certain);
        assert_eq!(n.winner, Some(Player::Two));
        assert_eq!(g.utility(&n), -100.0);
    }

    #[test]
    fn evaluation_antisymmetric_under_mirror() {
        let g = Ewn;
        let mut s = EwnState::initial();
        s = g.apply(&with_roll(s, 5), EwnAction::Move { piece: 5, to: 12 }, EwnOutcome::Certain);
        assert_eq!(g.evaluate(&s), -g.evaluate(&s.mirrored()));
        assert_eq!(g.evaluate(&EwnState::initial()), 0.0);
    }

    #[test]
    fn text_round_trip() {
        let g = Ewn;
        let s = with_roll(EwnState::initial(), 4);
        assert_eq!(g.decode_state(&g.encode_state(&s)).unwrap(), s);
        assert!(g.decode_state("ewn xx - 1").is_err());
    }
}
