//! Expectimax, Star1 and Star2, each optionally with sparse sampling at
//! chance nodes (expSS, star1SS, star2SS).
//!
//! Every chance value is `clamp(sum p_i v_i)` accumulated in entry order, the
//! same expression in every variant. Bound updates only ever use values that
//! are valid float bounds on that expression, so pruned searches return
//! results bit-identical to full-width expectimax. Windows for children come
//! from running (incremental) bound sums; a cut is taken only after a fresh
//! ordered sum confirms it, and a child left inexact by rounding is
//! re-searched with the full window.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::game::{child_window, Game, OutcomeEntry, OutcomeSet, Player, SearchWindow, ValueBounds};
use crate::rng::fork_seed;

use super::sampling::{sample_distribution, subseed, SamplingParams};
use super::tt::TranspositionTable;
use super::{norm, Budget, DepthBudget, Engine, SearchResult};

/// A later root action replaces the best one only if better by more than this.
pub const ROOT_TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StarVariant {
    Expectimax,
    Star1,
    Star2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarConfig {
    pub variant: StarVariant,
    pub sampling: Option<SamplingParams>,
    pub budget: DepthBudget,
    /// Chance-node pruning only at depths `>= prune_min_depth`.
    pub prune_min_depth: u32,
    pub tt_bits: u32,
    /// Search identical successors of one chance node only once.
    pub dedup_successors: bool,
}

impl StarConfig {
    pub fn new(variant: StarVariant) -> Self {
        StarConfig {
            variant,
            sampling: None,
            budget: DepthBudget::default(),
            prune_min_depth: 3,
            tt_bits: TranspositionTable::DEFAULT_BITS,
            dedup_successors: true,
        }
    }

    pub fn sampled(variant: StarVariant, c: usize, root_seed: u64) -> Self {
        StarConfig { sampling: Some(SamplingParams { c, root_seed }), ..Self::new(variant) }
    }

    pub fn with_budget(mut self, budget: Budget, max_depth: u32) -> Self {
        self.budget = DepthBudget { budget, max_depth };
        self
    }

    pub fn name(&self) -> String {
        let base = match self.variant {
            StarVariant::Expectimax => "exp",
            StarVariant::Star1 => "star1",
            StarVariant::Star2 => "star2",
        };
        match self.sampling {
            Some(p) => format!("{base}ss(c={})", p.c),
            None => base.to_string(),
        }
    }
}

/// Counters of the last search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarStats {
    pub nodes: u64,
    pub cuts: u64,
    pub probe_cuts: u64,
    /// Children whose computed window was empty and fell back to the full window.
    pub window_fallbacks: u64,
    /// Children left inexact by rounding and searched again with the full window.
    pub researches: u64,
}

#[derive(Debug, Clone)]
pub struct StarEngine {
    config: StarConfig,
    tt: TranspositionTable,
    stats: StarStats,
}

impl StarEngine {
    pub fn new(config: StarConfig) -> Self {
        StarEngine { tt: TranspositionTable::new(config.tt_bits), config, stats: StarStats::default() }
    }

    pub fn config(&self) -> &StarConfig {
        &self.config
    }

    pub fn stats(&self) -> StarStats {
        self.stats
    }

    fn effective_seed(&self, seed: u64) -> u64 {
        self.config.sampling.map_or(seed, |p| fork_seed(p.root_seed, seed))
    }

    /// One search to exactly depth `depth` with no budget.
    pub fn search_depth<G: Game>(
        &mut self,
        game: &G,
        state: &G::State,
        depth: u32,
        seed: u64,
    ) -> SearchResult<G::Action> {
        assert!(depth >= 1, "fixed-depth search needs depth >= 1");
        self.tt.clear();
        let root_seed = self.effective_seed(seed);
        let mut s = Searcher::new(game, &self.config, &mut self.tt, root_seed, None, None);
        let actions = game.legal_actions(state);
        assert!(!actions.is_empty(), "search of a terminal state");
        let (idx, value) = s.root(state, &actions, depth).expect("unbudgeted search cannot abort");
        self.stats = s.stats;
        SearchResult {
            value,
            best_action: actions[idx],
            completed_depth: depth,
            nodes_visited: self.stats.nodes,
            incomplete: false,
        }
    }

    /// Depth-`depth` value of any state (terminal and `depth = 0` included).
    pub fn value_at_depth<G: Game>(&mut self, game: &G, state: &G::State, depth: u32, seed: u64) -> f64 {
        if game.is_terminal(state) {
            return norm(game.utility(state));
        }
        if depth == 0 {
            return norm(game.bounds().clamp(game.evaluate(state)));
        }
        self.search_depth(game, state, depth, seed).value
    }

    /// Iterative deepening under the configured budget.
    pub fn search_budgeted<G: Game>(&mut self, game: &G, state: &G::State, seed: u64) -> SearchResult<G::Action> {
        self.tt.clear();
        let actions = game.legal_actions(state);
        assert!(!actions.is_empty(), "search of a terminal state");
        let mut result = SearchResult {
            value: norm(game.bounds().clamp(game.evaluate(state))),
            best_action: actions[0],
            completed_depth: 0,
            nodes_visited: 0,
            incomplete: true,
        };
        if actions.len() == 1 {
            result.incomplete = false;
            self.stats = StarStats::default();
            return result;
        }
        let budget = self.config.budget;
        let deadline = budget.budget.millis().map(|ms| Instant::now() + Duration::from_millis(ms));
        let root_seed = self.effective_seed(seed);
        let mut s = Searcher::new(game, &self.config, &mut self.tt, root_seed, budget.budget.node_limit(), deadline);
        for depth in 1..=budget.max_depth.max(1) {
            s.horizon = false;
            match s.root(state, &actions, depth) {
                Some((idx, value)) => {
                    result.best_action = actions[idx];
                    result.value = value;
                    result.completed_depth = depth;
                    result.incomplete = false;
                }
                None => break,
            }
            if !s.horizon {
                break;
            }
        }
        self.stats = s.stats;
        result.nodes_visited = self.stats.nodes;
        result
    }
}

impl<G: Game> Engine<G> for StarEngine {
    fn name(&self) -> String {
        self.config.name()
    }

    fn search(&mut self, game: &G, state: &G::State, seed: u64) -> SearchResult<G::Action> {
        self.search_budgeted(game, state, seed)
    }
}

/// Bounds on one action's chance value learned while probing a decision node.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Hint {
    action: usize,
    lo: f64,
    hi: f64,
}

impl Hint {
    /// Bounds implied by a fail-soft result `v` obtained with window `w`.
    fn from_result(action: usize, v: f64, w: SearchWindow, bounds: ValueBounds) -> Self {
        let lo = if v > w.alpha || v <= bounds.min { v } else { bounds.min };
        let hi = if v < w.beta || v >= bounds.max { v } else { bounds.max };
        Hint { action, lo, hi }
    }
}

/// Running sums drift from fresh ones by rounding; the pre-test is loosened
/// by this fraction of the value range before the exact check.
const CUT_SLACK: f64 = 1e-9;

/// Incrementally maintained `pess`/`opti`.
#[derive(Debug, Clone, Copy)]
struct Running {
    pess: f64,
    opti: f64,
}

struct Searcher<'a, G: Game> {
    game: &'a G,
    cfg: &'a StarConfig,
    tt: &'a mut TranspositionTable,
    bounds: ValueBounds,
    root_seed: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
    aborted: bool,
    /// A non-terminal leaf was evaluated at the depth limit.
    horizon: bool,
    stats: StarStats,
}

impl<'a, G: Game> Searcher<'a, G> {
    fn new(
        game: &'a G,
        cfg: &'a StarConfig,
        tt: &'a mut TranspositionTable,
        root_seed: u64,
        node_limit: Option<u64>,
        deadline: Option<Instant>,
    ) -> Self {
        Searcher {
            game,
            cfg,
            tt,
            bounds: game.bounds(),
            root_seed,
            node_limit,
            deadline,
            aborted: false,
            horizon: false,
            stats: StarStats::default(),
        }
    }

    fn visit(&mut self) -> bool {
        self.stats.nodes += 1;
        if let Some(limit) = self.node_limit {
            if self.stats.nodes > limit {
                self.aborted = true;
            }
        }
        if let Some(deadline) = self.deadline {
            if self.stats.nodes % 256 == 0 && Instant::now() >= deadline {
                self.aborted = true;
            }
        }
        !self.aborted
    }

    fn leaf(&mut self, s: &G::State, d: u32) -> Option<f64> {
        if self.game.is_terminal(s) {
            Some(norm(self.game.utility(s)))
        } else if d == 0 {
            self.horizon = true;
            Some(norm(self.bounds.clamp(self.game.evaluate(s))))
        } else {
            None
        }
    }

    fn pruning(&self, d: u32) -> bool {
        self.cfg.variant != StarVariant::Expectimax && d >= self.cfg.prune_min_depth
    }

    fn uses_tt(&self) -> bool {
        self.cfg.variant != StarVariant::Expectimax
    }

    fn outcome_set(&self, s: &G::State, a: G::Action, idx: usize, d: u32) -> OutcomeSet<G::Outcome> {
        let dist = self.game.outcomes(s, a);
        match self.cfg.sampling {
            Some(p) => {
                let seed = subseed(self.game.state_key(s), idx, d, self.root_seed);
                OutcomeSet::new_unchecked(&sample_distribution(&dist, p.c, seed), self.bounds)
            }
            None => OutcomeSet::new_unchecked(&dist, self.bounds),
        }
    }

    fn better(&self, to_act: Player, v: f64, best: f64) -> bool {
        match to_act {
            Player::One => v > best,
            Player::Two => v < best,
        }
    }

    /// Root: static move order; a later action must improve by more than
    /// [`ROOT_TIE_EPS`]. Returns `None` if the budget ran out.
    fn root(&mut self, s: &G::State, actions: &[G::Action], d: u32) -> Option<(usize, f64)> {
        if !self.visit() {
            return None;
        }
        let to_act = self.game.to_act(s);
        let prune = self.pruning(d);
        let full = self.bounds.full_window();
        let mut best: Option<(usize, f64)> = None;
        for (i, &a) in actions.iter().enumerate() {
            let w = match (prune, best) {
                (true, Some((_, b))) => match to_act {
                    Player::One => SearchWindow { alpha: b + ROOT_TIE_EPS, beta: full.beta },
                    Player::Two => SearchWindow { alpha: full.alpha, beta: b - ROOT_TIE_EPS },
                },
                _ => full,
            };
            if w.alpha >= w.beta {
                continue;
            }
            let v = self.chance(s, i, a, d, w);
            if self.aborted {
                return None;
            }
            let replace = match best {
                None => true,
                Some((_, b)) => match to_act {
                    Player::One => v > b + ROOT_TIE_EPS,
                    Player::Two => v < b - ROOT_TIE_EPS,
                },
            };
            if replace {
                best = Some((i, v));
            }
        }
        if self.uses_tt() {
            if let Some((i, _)) = best {
                self.tt.store(self.game.state_key(s), i);
            }
        }
        best
    }

    /// Fail-soft value of decision node `s` at depth `d`.
    ///
    /// In probe mode only one action (the table move, else the first) is
    /// searched and its bounds come back as a [`Hint`]; no hint means every
    /// action was covered (terminal, leaf or single-action node) and the value
    /// is an ordinary fail-soft result. In full mode a hint from an earlier
    /// probe of this node saves re-searching the probed action when its known
    /// bounds already decide it.
    fn decision(
        &mut self,
        s: &G::State,
        d: u32,
        w: SearchWindow,
        probe: bool,
        hint: Option<Hint>,
    ) -> (f64, Option<Hint>) {
        assert!(w.alpha < w.beta, "empty window ({}, {})", w.alpha, w.beta);
        if !self.visit() {
            return (0.0, None);
        }
        if let Some(v) = self.leaf(s, d) {
            return (v, None);
        }
        let actions = self.game.legal_actions(s);
        let key = if self.uses_tt() { Some(self.game.state_key(s)) } else { None };
        let tt_move = key.and_then(|k| self.tt.probe(k)).filter(|&m| m < actions.len());
        let prune = self.pruning(d);
        if probe && actions.len() > 1 {
            let i = tt_move.unwrap_or(0);
            let v = self.chance(s, i, actions[i], d, w);
            let hint = if prune { Hint::from_result(i, v, w, self.bounds) } else { Hint { action: i, lo: v, hi: v } };
            return (v, Some(hint));
        }

        let to_act = self.game.to_act(s);
        let full = self.bounds.full_window();
        let mut window = w;
        let mut best = match to_act {
            Player::One => f64::NEG_INFINITY,
            Player::Two => f64::INFINITY,
        };
        let mut best_idx = 0;
        let mut order: Vec<usize> = Vec::with_capacity(actions.len());
        order.extend(hint.map(|h| h.action));
        order.extend(tt_move.filter(|m| !order.contains(m)));
        for i in 0..actions.len() {
            if !order.contains(&i) {
                order.push(i);
            }
        }
        for i in order {
            let known = hint.filter(|h| h.action == i).and_then(|h| {
                if h.lo == h.hi {
                    Some(h.lo)
                } else if !prune {
                    None
                } else if h.lo >= window.beta {
                    Some(h.lo)
                } else if h.hi <= window.alpha {
                    Some(h.hi)
                } else {
                    None
                }
            });
            let v = match known {
                Some(v) => v,
                None => {
                    let cw = if prune { window } else { full };
                    let v = self.chance(s, i, actions[i], d, cw);
                    if self.aborted {
                        return (0.0, None);
                    }
                    v
                }
            };
            if self.better(to_act, v, best) {
                best = v;
                best_idx = i;
            }
            if prune {
                match to_act {
                    Player::One => {
                        if best >= window.beta {
                            break;
                        }
                        window.alpha = window.alpha.max(best);
                    }
                    Player::Two => {
                        if best <= window.alpha {
                            break;
                        }
                        window.beta = window.beta.min(best);
                    }
                }
            }
        }
        if let Some(k) = key {
            self.tt.store(k, best_idx);
        }
        (best, None)
    }

    /// Fail-soft value of chance node `(s, a)` at depth `d`.
    fn chance(&mut self, s: &G::State, idx: usize, a: G::Action, d: u32, w: SearchWindow) -> f64 {
        let mut set = self.outcome_set(s, a, idx, d);
        let children: Vec<G::State> =
            set.entries().iter().map(|e| self.game.apply(s, a, e.outcome)).collect();
        let same = if self.cfg.dedup_successors {
            same_successor(self.game, &children)
        } else {
            (0..children.len()).collect()
        };
        let full = self.bounds.full_window();

        if !self.pruning(d) {
            for i in 0..set.len() {
                let v = if same[i] < i {
                    set.entries()[same[i]].lower
                } else {
                    let (v, _) = self.decision(&children[i], d - 1, full, false, None);
                    if self.aborted {
                        return 0.0;
                    }
                    v
                };
                set.set_exact(i, v);
            }
            return self.exact_value(&set);
        }

        let mut run = Running { pess: set.pess(), opti: set.opti() };
        let mut hints: Vec<Option<Hint>> = vec![None; set.len()];

        if self.cfg.variant == StarVariant::Star2 {
            for i in 0..set.len() {
                if same[i] < i {
                    self.copy_bounds(&mut set, same[i], i, &mut run);
                    if let Some(v) = self.cut(&set, run, w) {
                        self.stats.probe_cuts += 1;
                        return v;
                    }
                    continue;
                }
                let Some(cw) = self.window_for(&set, i, run, w) else {
                    if let Some(v) = self.fresh_cut(&set, w) {
                        self.stats.probe_cuts += 1;
                        return v;
                    }
                    continue;
                };
                let child = &children[i];
                let child_max = !self.game.is_terminal(child) && self.game.to_act(child) == Player::One;
                let (v, hint) = self.decision(child, d - 1, cw, true, None);
                if self.aborted {
                    return 0.0;
                }
                hints[i] = hint;
                let old = set.entries()[i];
                if hint.is_none() {
                    self.record(&mut set, i, v, cw);
                } else if child_max {
                    if v > cw.alpha {
                        set.raise_lower(i, v);
                    }
                } else if v < cw.beta {
                    set.lower_upper(i, v);
                }
                Self::update_running(&mut run, &old, &set.entries()[i]);
                if let Some(v) = self.cut(&set, run, w) {
                    self.stats.probe_cuts += 1;
                    return v;
                }
            }
        }

        for i in 0..set.len() {
            if same[i] < i {
                self.copy_bounds(&mut set, same[i], i, &mut run);
            }
            if set.entries()[i].is_exact() {
                if let Some(v) = self.cut(&set, run, w) {
                    self.stats.cuts += 1;
                    return v;
                }
                continue;
            }
            let cw = match self.window_for(&set, i, run, w) {
                Some(cw) => cw,
                None => {
                    if let Some(v) = self.fresh_cut(&set, w) {
                        self.stats.cuts += 1;
                        return v;
                    }
                    self.stats.window_fallbacks += 1;
                    full
                }
            };
            let (v, _) = self.decision(&children[i], d - 1, cw, false, hints[same[i]]);
            if self.aborted {
                return 0.0;
            }
            let old = set.entries()[i];
            self.record(&mut set, i, v, cw);
            Self::update_running(&mut run, &old, &set.entries()[i]);
            if let Some(v) = self.cut(&set, run, w) {
                self.stats.cuts += 1;
                return v;
            }
        }

        for i in 0..set.len() {
            if set.entries()[i].is_exact() {
                continue;
            }
            if same[i] < i && set.entries()[same[i]].is_exact() {
                let v = set.entries()[same[i]].lower;
                set.set_exact(i, v);
                continue;
            }
            self.stats.researches += 1;
            let (v, _) = self.decision(&children[i], d - 1, full, false, hints[same[i]]);
            if self.aborted {
                return 0.0;
            }
            set.set_exact(i, v);
        }
        self.exact_value(&set)
    }

    fn exact_value(&self, set: &OutcomeSet<G::Outcome>) -> f64 {
        norm(self.bounds.clamp(set.pess()))
    }

    /// Applies a fail-soft child result obtained with window `cw`.
    fn record(&self, set: &mut OutcomeSet<G::Outcome>, i: usize, v: f64, cw: SearchWindow) {
        if v > cw.alpha || v <= self.bounds.min {
            set.raise_lower(i, v);
        }
        if v < cw.beta || v >= self.bounds.max {
            set.lower_upper(i, v);
        }
    }

    /// Entry `to` has the same successor state as `from`; its bounds carry over.
    fn copy_bounds(&self, set: &mut OutcomeSet<G::Outcome>, from: usize, to: usize, run: &mut Running) {
        let src = set.entries()[from];
        let old = set.entries()[to];
        set.raise_lower(to, src.lower);
        set.lower_upper(to, src.upper);
        Self::update_running(run, &old, &set.entries()[to]);
    }

    fn update_running<O>(run: &mut Running, old: &OutcomeEntry<O>, new: &OutcomeEntry<O>) {
        run.pess += new.prob * (new.lower - old.lower);
        run.opti += new.prob * (new.upper - old.upper);
    }

    /// Child window for entry `i`, tightened by a few rounding steps where needed so
    /// that a child failing at either edge makes the fresh ordered sum cross
    /// the parent window (otherwise rounding could leave the entry inexact
    /// without a cut, forcing a re-search).
    fn window_for(&self, set: &OutcomeSet<G::Outcome>, i: usize, run: Running, w: SearchWindow) -> Option<SearchWindow> {
        let mut cw = child_window(&set.entries()[i], run.pess, run.opti, w, self.bounds);
        let mut step = f64::EPSILON * self.bounds.width();
        while cw.alpha > self.bounds.min && sum_with(set, i, cw.alpha, |e| e.upper) > w.alpha {
            cw.alpha = (cw.alpha - step).max(self.bounds.min);
            step *= 2.0;
        }
        let mut step = f64::EPSILON * self.bounds.width();
        while cw.beta < self.bounds.max && sum_with(set, i, cw.beta, |e| e.lower) < w.beta {
            cw.beta = (cw.beta + step).min(self.bounds.max);
            step *= 2.0;
        }
        (cw.alpha < cw.beta).then_some(cw)
    }

    /// Cut test on the running sums, confirmed by fresh ordered sums.
    fn cut(&self, set: &OutcomeSet<G::Outcome>, run: Running, w: SearchWindow) -> Option<f64> {
        let slack = CUT_SLACK * self.bounds.width();
        if run.pess >= w.beta - slack || run.opti <= w.alpha + slack {
            self.fresh_cut(set, w)
        } else {
            None
        }
    }

    fn fresh_cut(&self, set: &OutcomeSet<G::Outcome>, w: SearchWindow) -> Option<f64> {
        let pess = set.pess();
        if pess >= w.beta {
            return Some(norm(self.bounds.clamp(pess)));
        }
        let opti = set.opti();
        if opti <= w.alpha {
            return Some(norm(self.bounds.clamp(opti)));
        }
        None
    }
}

/// Ordered sum `sum p_j * b_j` with entry `i`'s bound replaced by `v`.
fn sum_with<O: Copy>(set: &OutcomeSet<O>, i: usize, v: f64, bound: impl Fn(&OutcomeEntry<O>) -> f64) -> f64 {
    set.entries().iter().enumerate().fold(0.0, |acc, (j, e)| acc + e.prob * if j == i { v } else { bound(e) })
}

/// For each successor, the index of the first entry with an identical state.
/// Identical successors have identical depth-limited values, so only the
/// first is searched; the others reuse its bounds (the weighted sum keeps
/// every entry, so the value is unchanged).
pub(crate) fn same_successor<G: Game>(game: &G, children: &[G::State]) -> Vec<usize> {
    let keys: Vec<u64> = children.iter().map(|c| game.state_key(c)).collect();
    (0..children.len())
        .map(|i| (0..i).find(|&j| keys[j] == keys[i] && children[j] == children[i]).unwrap_or(i))
        .collect()
}

/// Reference full-width depth-`d` value, written without windows, tables or
/// bookkeeping. Uses the same chance-value expression as the engines.
pub fn expectimax_value<G: Game>(game: &G, s: &G::State, d: u32) -> f64 {
    if game.is_terminal(s) {
        return norm(game.utility(s));
    }
    let bounds = game.bounds();
    if d == 0 {
        return norm(bounds.clamp(game.evaluate(s)));
    }
    let values = game.legal_actions(s).into_iter().map(|a| {
        let sum = game
            .outcomes(s, a)
            .into_iter()
            .fold(0.0, |acc, (o, p)| acc + p * expectimax_value(game, &game.apply(s, a, o), d - 1));
        norm(bounds.clamp(sum))
    });
    match game.to_act(s) {
        Player::One => values.fold(f64::NEG_INFINITY, f64::max),
        Player::Two => values.fold(f64::INFINITY, f64::min),
    }
}
