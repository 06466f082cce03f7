//! Exact two-dice Pig values by value iteration.
//!
//! The table is actor-relative: `W(i, j, k)` is the value for the player to
//! act with banked score `i`, opponent score `j` and turn total `k`. Only
//! `i + k < 100` is stored; everything else is a certain win by stopping.
//! That is 505,000 entries. Double ones send a player back to zero, so the
//! state graph has cycles and plain backward induction does not apply.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::domains::pig::{PigAction, PigState, TARGET};
use crate::domains::Pig;
use crate::game::{Game, Player};
use crate::parallel::par_fill;

const N: usize = TARGET as usize;
const WIN: f64 = 100.0;
const MAGIC: &[u8; 8] = b"MCMSPIG\0";
const FORMAT_VERSION: u32 = 1;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("value iteration did not converge: residual {residual:e} after {sweeps} sweeps")]
    NotConverged { residual: f64, sweeps: usize },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("state outside the table: {0}")]
    UnknownState(String),
    #[error("illegal action {0:?} in a finished game")]
    IllegalAction(PigAction),
    #[error("bad table file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Double-buffered; each sweep reads only the previous one.
    Jacobi,
    /// In place, in index order.
    GaussSeidel,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub sweep: Sweep,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: DEFAULT_TOLERANCE, max_sweeps: DEFAULT_MAX_SWEEPS, sweep: Sweep::Jacobi }
    }
}

/// Non-one rolls: (sum of the pair, probability), grouped by sum.
fn scoring_rolls() -> Vec<(usize, f64)> {
    let mut by_sum = [0u32; 13];
    for a in 2..=6 {
        for b in 2..=6 {
            by_sum[a + b] += 1;
        }
    }
    (4..=12).map(|s| (s, by_sum[s] as f64 / 36.0)).collect()
}

const P_DOUBLE_ONE: f64 = 1.0 / 36.0;
const P_SINGLE_ONE: f64 = 10.0 / 36.0;

/// Offsets of the `i` blocks; block `i` holds `N * (N - i)` entries.
fn offsets() -> Vec<usize> {
    let mut off = Vec::with_capacity(N + 1);
    let mut acc = 0;
    for i in 0..=N {
        off.push(acc);
        if i < N {
            acc += N * (N - i);
        }
    }
    off
}

#[derive(Debug, Clone, PartialEq)]
pub struct PigValueTable {
    values: Vec<f64>,
    offsets: Vec<usize>,
    pub residual: f64,
    pub sweeps: usize,
}

impl PigValueTable {
    pub const STATES: usize = N * N * (N + 1) / 2;

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i + k < N && j < N);
        self.offsets[i] + j * (N - i) + k
    }

    /// Actor-relative value; `i + k >= 100` is a win by stopping.
    #[inline]
    fn w(&self, i: usize, j: usize, k: usize) -> f64 {
        if i + k >= N {
            WIN
        } else {
            self.values[self.index(i, j, k)]
        }
    }

    /// Raw actor-relative entry `W(me, opp, turn_total)`.
    pub fn actor_value(&self, me: u16, opp: u16, turn_total: u16) -> Result<f64, OracleError> {
        let (i, j, k) = (me as usize, opp as usize, turn_total as usize);
        if i >= N || j >= N {
            return Err(OracleError::UnknownState(format!("({me}, {opp}, {turn_total})")));
        }
        Ok(self.w(i, j, k))
    }

    /// `V(s)` from player one's point of view.
    pub fn value(&self, s: &PigState) -> Result<f64, OracleError> {
        if let Some(w) = s.winner {
            return Ok(WIN * w.sign());
        }
        let (me, opp, t) = s.canonical();
        Ok(s.to_act.sign() * self.actor_value(me, opp, t)?)
    }

    /// One-step lookahead through the game rules, player one's view.
    pub fn q_value(&self, s: &PigState, a: PigAction) -> Result<f64, OracleError> {
        if s.winner.is_some() {
            return Err(OracleError::IllegalAction(a));
        }
        let game = Pig;
        let mut q = 0.0;
        for (o, p) in game.outcomes(s, a) {
            q += p * self.value(&game.apply(s, a, o))?;
        }
        Ok(q)
    }

    /// `V(s) - Q(s, a)` for player one, `Q(s, a) - V(s)` for player two.
    pub fn regret(&self, s: &PigState, a: PigAction) -> Result<f64, OracleError> {
        let v = self.value(s)?;
        let q = self.q_value(s, a)?;
        Ok(match s.to_act {
            Player::One => v - q,
            Player::Two => q - v,
        })
    }

    /// Best action by the table; `Roll` on exact ties.
    pub fn greedy_action(&self, s: &PigState) -> Result<PigAction, OracleError> {
        let roll = self.q_value(s, PigAction::Roll)?;
        let stop = self.q_value(s, PigAction::Stop)?;
        let sign = s.to_act.sign();
        Ok(if sign * stop > sign * roll { PigAction::Stop } else { PigAction::Roll })
    }

    /// `|W - T(W)|` at one stored state.
    pub fn bellman_error(&self, me: u16, opp: u16, turn_total: u16) -> Result<f64, OracleError> {
        let v = self.actor_value(me, opp, turn_total)?;
        let rolls = scoring_rolls();
        Ok((v - backup(self, &rolls, me as usize, opp as usize, turn_total as usize)).abs())
    }

    pub fn save(&self, path: &Path) -> Result<(), OracleError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        out.write_all(&(self.values.len() as u64).to_le_bytes())?;
        out.write_all(&self.residual.to_le_bytes())?;
        out.write_all(&(self.sweeps as u64).to_le_bytes())?;
        for i in 0..N {
            for j in 0..N {
                for k in 0..N - i {
                    let key = ((i as u64) << 32) | ((j as u64) << 16) | k as u64;
                    out.write_all(&key.to_le_bytes())?;
                    out.write_all(&self.values[self.index(i, j, k)].to_le_bytes())?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, OracleError> {
        let mut inp = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        inp.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(OracleError::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut inp)?);
        if version != FORMAT_VERSION {
            return Err(OracleError::Format(format!("unsupported version {version}")));
        }
        let count = u64::from_le_bytes(read_array(&mut inp)?) as usize;
        if count != Self::STATES {
            return Err(OracleError::Format(format!("expected {} entries, found {count}", Self::STATES)));
        }
        let residual = f64::from_le_bytes(read_array(&mut inp)?);
        let sweeps = u64::from_le_bytes(read_array(&mut inp)?) as usize;
        let mut table = PigValueTable { values: vec![0.0; count], offsets: offsets(), residual, sweeps };
        for _ in 0..count {
            let key = u64::from_le_bytes(read_array(&mut inp)?);
            let v = f64::from_le_bytes(read_array(&mut inp)?);
            let (i, j, k) = ((key >> 32) as usize, ((key >> 16) & 0xFFFF) as usize, (key & 0xFFFF) as usize);
            if i >= N || j >= N || i + k >= N {
                return Err(OracleError::Format(format!("bad key {key:#x}")));
            }
            let idx = table.index(i, j, k);
            table.values[idx] = v;
        }
        Ok(table)
    }
}

fn read_array<const L: usize>(r: &mut impl Read) -> Result<[u8; L], OracleError> {
    let mut buf = [0u8; L];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

/// Bellman backup of `W(i, j, k)` against the table `t`.
#[inline]
fn backup(t: &PigValueTable, rolls: &[(usize, f64)], i: usize, j: usize, k: usize) -> f64 {
    let stop = if i + k >= N { WIN } else { -t.w(j, i + k, 0) };
    let mut roll = P_DOUBLE_ONE * -t.w(j, 0, 0) + P_SINGLE_ONE * -t.w(j, i, 0);
    for &(sum, p) in rolls {
        roll += p * t.w(i, j, k + sum);
    }
    stop.max(roll)
}

/// Solves Pig to the default tolerance with Jacobi sweeps.
pub fn solve_pig(tolerance: f64) -> Result<PigValueTable, OracleError> {
    solve_pig_with(SolveOptions { tolerance, ..SolveOptions::default() })
}

pub fn solve_pig_with(opts: SolveOptions) -> Result<PigValueTable, OracleError> {
    if !(opts.tolerance > 0.0) {
        return Err(OracleError::BadTolerance(opts.tolerance));
    }
    let offsets = offsets();
    let mut table =
        PigValueTable { values: vec![0.0; PigValueTable::STATES], offsets: offsets.clone(), residual: f64::INFINITY, sweeps: 0 };
    // (i, j, k) for every index, in storage order.
    let coords: Vec<(u8, u8, u8)> = (0..N)
        .flat_map(|i| (0..N).flat_map(move |j| (0..N - i).map(move |k| (i as u8, j as u8, k as u8))))
        .collect();
    let rolls = scoring_rolls();
    let mut next = vec![0.0; PigValueTable::STATES];
    while table.sweeps < opts.max_sweeps {
        let residual = match opts.sweep {
            Sweep::Jacobi => {
                let t = &table;
                par_fill(&mut next, |idx| {
                    let (i, j, k) = coords[idx];
                    backup(t, &rolls, i as usize, j as usize, k as usize)
                });
                let r = next.iter().zip(&table.values).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                std::mem::swap(&mut table.values, &mut next);
                r
            }
            Sweep::GaussSeidel => {
                let mut r = 0.0f64;
                for (idx, &(i, j, k)) in coords.iter().enumerate() {
                    let v = backup(&table, &rolls, i as usize, j as usize, k as usize);
                    r = r.max((v - table.values[idx]).abs());
                    table.values[idx] = v;
                }
                r
            }
        };
        table.sweeps += 1;
        table.residual = residual;
        if residual < opts.tolerance {
            return Ok(table);
        }
    }
    Err(OracleError::NotConverged { residual: table.residual, sweeps: table.sweeps })
}
