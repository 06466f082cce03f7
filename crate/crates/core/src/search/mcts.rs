//! UCT with chance nodes stored in the tree, evaluation-truncated random
//! rollouts and optional double progressive widening (DPW).
//!
//! Values are backed up from player one's view. Selection uses UCB1 on
//! values normalised to `[0, 1]` (flipped for the minimiser) with exploration
//! constant `C1 / (v_max - v_min)`, so `C1` is given in utility units.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::{sample_from, Game, Player, ValueBounds};
use crate::rng::{rng_from_seed, GameRng};

use super::{norm, Budget, Engine, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MctsVariant {
    Plain,
    Dpw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsParams {
    pub variant: MctsVariant,
    /// Exploration constant in utility units.
    pub c1: f64,
    pub rollout_depth: usize,
    pub c2: f64,
    pub alpha: f64,
    pub budget: Budget,
}

impl MctsParams {
    pub fn new(variant: MctsVariant, c1: f64, rollout_depth: usize, c2: f64, alpha: f64) -> Self {
        MctsParams { variant, c1, rollout_depth, c2, alpha, budget: Budget::Simulations(1000) }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn name(&self) -> String {
        match self.variant {
            MctsVariant::Plain => format!("mcts(C1={},dr={})", self.c1, self.rollout_depth),
            MctsVariant::Dpw => format!(
                "dpw(C1={},dr={},C2={},a={})",
                self.c1, self.rollout_depth, self.c2, self.alpha
            ),
        }
    }
}

/// `ceil(C2 * v^alpha)`, at least 1. `v` must be positive.
pub fn dpw_limit(v: u64, c2: f64, alpha: f64) -> usize {
    assert!(v >= 1, "progressive widening needs a positive visit count");
    ((c2 * (v as f64).powf(alpha)).ceil() as usize).max(1)
}

/// UCB1 selection over `(visits, mean)` pairs where `mean` is already
/// normalised to `[0, 1]` from the acting player's view. Unvisited children
/// come first, in order; ties keep the earliest child.
pub fn uct_select(children: &[(u64, f64)], parent_visits: u64, c: f64) -> usize {
    if let Some(i) = children.iter().position(|&(n, _)| n == 0) {
        return i;
    }
    let ln = (parent_visits.max(1) as f64).ln();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &(n, mean)) in children.iter().enumerate() {
        let score = mean + c * (ln / n as f64).sqrt();
        if score > best_score {
            best_score = score;
            best = i;
        }
    }
    best
}

/// Most visited child, earliest on ties.
pub fn final_action(visits: &[u64]) -> usize {
    let mut best = 0;
    for (i, &n) in visits.iter().enumerate() {
        if n > visits[best] {
            best = i;
        }
    }
    best
}

/// Draws among `stored` outcomes with probabilities renormalised over the set.
pub fn sample_restricted<O: Copy, R: Rng + ?Sized>(stored: &[(O, f64)], rng: &mut R) -> usize {
    let total: f64 = stored.iter().map(|(_, p)| p).sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &(_, p)) in stored.iter().enumerate() {
        if x < p {
            return i;
        }
        x -= p;
    }
    stored.len() - 1
}

/// Uniform-random playout of up to `depth` plies. Returns the value (utility
/// if a terminal was reached, otherwise the evaluation) and the plies played.
pub fn rollout<G: Game, R: Rng + ?Sized>(game: &G, state: &G::State, depth: usize, rng: &mut R) -> (f64, usize) {
    let mut s = state.clone();
    for ply in 0..depth {
        if game.is_terminal(&s) {
            return (game.utility(&s), ply);
        }
        let actions = game.legal_actions(&s);
        let a = actions[rng.gen_range(0..actions.len())];
        let o = sample_from(&game.outcomes(&s, a), rng);
        s = game.apply(&s, a, o);
    }
    let v = if game.is_terminal(&s) { game.utility(&s) } else { game.bounds().clamp(game.evaluate(&s)) };
    (v, depth)
}

struct DecisionNode<G: Game> {
    state: G::State,
    terminal: bool,
    to_act: Player,
    actions: Vec<G::Action>,
    chance: Vec<Option<usize>>,
    visits: u64,
    total: f64,
    depth: u32,
}

struct ChanceNode<G: Game> {
    dist: Vec<(G::Outcome, f64)>,
    /// Stored outcomes: `(outcome, true probability)` with child decision node.
    stored: Vec<(G::Outcome, f64)>,
    children: Vec<usize>,
    visits: u64,
    total: f64,
}

/// Counters of the last search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MctsStats {
    pub simulations: u64,
    pub nodes: u64,
    pub tree_nodes: u64,
    pub max_depth: u32,
    /// Chance nodes holding more outcomes than `ceil(C2 v^alpha)`.
    pub outcome_violations: u64,
    /// Decision nodes that selected an action beyond the first `k`.
    pub action_violations: u64,
}

/// Root action summary after a search.
#[derive(Debug, Clone, PartialEq)]
pub struct RootChild<A, O> {
    pub action: A,
    pub visits: u64,
    pub mean: f64,
    pub outcome_visits: Vec<(O, u64)>,
}

pub struct MctsEngine<G: Game> {
    params: MctsParams,
    decisions: Vec<DecisionNode<G>>,
    chances: Vec<ChanceNode<G>>,
    stats: MctsStats,
}

impl<G: Game> MctsEngine<G> {
    pub fn new(params: MctsParams) -> Self {
        MctsEngine { params, decisions: Vec::new(), chances: Vec::new(), stats: MctsStats::default() }
    }

    pub fn params(&self) -> &MctsParams {
        &self.params
    }

    pub fn stats(&self) -> MctsStats {
        self.stats
    }

    fn new_decision(&mut self, game: &G, state: G::State, depth: u32) -> usize {
        let terminal = game.is_terminal(&state);
        let (to_act, actions) =
            if terminal { (Player::One, Vec::new()) } else { (game.to_act(&state), game.legal_actions(&state)) };
        let n = actions.len();
        self.decisions.push(DecisionNode {
            state,
            terminal,
            to_act,
            actions,
            chance: vec![None; n],
            visits: 0,
            total: 0.0,
            depth,
        });
        self.stats.tree_nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.decisions.len() - 1
    }

    /// Runs the search and returns the chosen action.
    pub fn run(&mut self, game: &G, state: &G::State, seed: u64) -> SearchResult<G::Action> {
        assert!(!game.is_terminal(state), "search of a terminal state");
        self.decisions.clear();
        self.chances.clear();
        self.stats = MctsStats::default();
        let mut rng = rng_from_seed(seed);
        let bounds = game.bounds();
        let root = self.new_decision(game, state.clone(), 0);
        let deadline = self.params.budget.millis().map(|ms| Instant::now() + Duration::from_millis(ms));
        loop {
            let done = match self.params.budget {
                Budget::Simulations(n) => self.stats.simulations >= n.max(1),
                Budget::Nodes(n) => self.stats.simulations > 0 && self.stats.nodes >= n,
                Budget::Millis(_) => {
                    self.stats.simulations > 0 && deadline.is_some_and(|d| Instant::now() >= d)
                }
                Budget::Unlimited => panic!("MCTS needs a finite budget"),
            };
            if done {
                break;
            }
            self.simulate(game, root, bounds, &mut rng);
        }
        let r = &self.decisions[root];
        let visits: Vec<u64> = r.chance.iter().map(|c| c.map_or(0, |c| self.chances[c].visits)).collect();
        let best = final_action(&visits);
        let value = r.chance[best]
            .map(|c| self.chances[c].total / self.chances[c].visits as f64)
            .unwrap_or_else(|| bounds.clamp(game.evaluate(state)));
        SearchResult {
            value: norm(value),
            best_action: r.actions[best],
            completed_depth: self.stats.max_depth,
            nodes_visited: self.stats.nodes,
            incomplete: false,
        }
    }

    fn simulate(&mut self, game: &G, root: usize, bounds: ValueBounds, rng: &mut GameRng) {
        let dpw = self.params.variant == MctsVariant::Dpw;
        let explore = self.params.c1 / bounds.width();
        let mut path: Vec<(usize, Option<usize>)> = Vec::new();
        let mut node = root;
        let value = loop {
            self.stats.nodes += 1;
            let d = &self.decisions[node];
            if d.terminal {
                path.push((node, None));
                break game.utility(&d.state);
            }
            let k = if dpw {
                dpw_limit(d.visits + 1, self.params.c2, self.params.alpha).min(d.actions.len())
            } else {
                d.actions.len()
            };
            let stats: Vec<(u64, f64)> = d.chance[..k]
                .iter()
                .map(|c| match c {
                    Some(c) => {
                        let ch = &self.chances[*c];
                        let mean = (ch.total / ch.visits.max(1) as f64 - bounds.min) / bounds.width();
                        let mean = if d.to_act == Player::One { mean } else { 1.0 - mean };
                        (ch.visits, mean)
                    }
                    None => (0, 0.0),
                })
                .collect();
            let i = uct_select(&stats, d.visits, explore);
            if dpw && i >= dpw_limit(d.visits + 1, self.params.c2, self.params.alpha) {
                self.stats.action_violations += 1;
            }
            let action = d.actions[i];
            let depth = d.depth;
            let c = match self.decisions[node].chance[i] {
                Some(c) => c,
                None => {
                    let dist = game.outcomes(&self.decisions[node].state, action);
                    self.chances.push(ChanceNode { dist, stored: Vec::new(), children: Vec::new(), visits: 0, total: 0.0 });
                    let c = self.chances.len() - 1;
                    self.decisions[node].chance[i] = Some(c);
                    c
                }
            };
            path.push((node, Some(c)));

            let ch = &self.chances[c];
            let limit = if dpw { dpw_limit(ch.visits + 1, self.params.c2, self.params.alpha) } else { usize::MAX };
            let existing = if ch.stored.len() < limit {
                let o = sample_from(&ch.dist, rng);
                match ch.stored.iter().position(|(s, _)| *s == o) {
                    Some(j) => Ok(j),
                    None => Err(o),
                }
            } else {
                Ok(sample_restricted(&ch.stored, rng))
            };
            match existing {
                Ok(j) => node = self.chances[c].children[j],
                Err(o) => {
                    let p = self.chances[c].dist.iter().find(|(x, _)| *x == o).map_or(0.0, |(_, p)| *p);
                    let next = game.apply(&self.decisions[node].state, action, o);
                    let child = self.new_decision(game, next, depth + 1);
                    let ch = &mut self.chances[c];
                    ch.stored.push((o, p));
                    ch.children.push(child);
                    if dpw && ch.stored.len() > limit {
                        self.stats.outcome_violations += 1;
                    }
                    path.push((child, None));
                    let (v, plies) = rollout(game, &self.decisions[child].state, self.params.rollout_depth, rng);
                    self.stats.nodes += 1 + plies as u64;
                    break v;
                }
            }
        };
        for (d, c) in path {
            let dn = &mut self.decisions[d];
            dn.visits += 1;
            dn.total += value;
            if let Some(c) = c {
                let cn = &mut self.chances[c];
                cn.visits += 1;
                cn.total += value;
            }
        }
        self.stats.simulations += 1;
    }

    /// Root visit count (equals the number of simulations run).
    pub fn root_visits(&self) -> u64 {
        self.decisions.first().map_or(0, |r| r.visits)
    }

    pub fn root_children(&self) -> Vec<RootChild<G::Action, G::Outcome>> {
        let Some(r) = self.decisions.first() else {
            return Vec::new();
        };
        r.actions
            .iter()
            .zip(&r.chance)
            .map(|(&action, c)| match c {
                Some(c) => {
                    let ch = &self.chances[*c];
                    RootChild {
                        action,
                        visits: ch.visits,
                        mean: ch.total / ch.visits.max(1) as f64,
                        outcome_visits: ch
                            .stored
                            .iter()
                            .zip(&ch.children)
                            .map(|(&(o, _), &n)| (o, self.decisions[n].visits))
                            .collect(),
                    }
                }
                None => RootChild { action, visits: 0, mean: 0.0, outcome_visits: Vec::new() },
            })
            .collect()
    }

    /// Checks that every node's visit count and total match its children
    /// plus the simulations that ended at it.
    pub fn check_backups(&self) -> bool {
        for d in &self.decisions {
            let child_visits: u64 = d.chance.iter().flatten().map(|&c| self.chances[c].visits).sum();
            if child_visits > d.visits {
                return false;
            }
        }
        self.chances.iter().all(|c| {
            let v: u64 = c.children.iter().map(|&n| self.decisions[n].visits).sum();
            let t: f64 = c.children.iter().map(|&n| self.decisions[n].total).sum();
            v == c.visits && (t - c.total).abs() <= 1e-6 * (1.0 + c.total.abs())
        })
    }
}

impl<G: Game> Engine<G> for MctsEngine<G> {
    fn name(&self) -> String {
        self.params.name()
    }

    fn search(&mut self, game: &G, state: &G::State, seed: u64) -> SearchResult<G::Action> {
        let actions = game.legal_actions(state);
        if actions.len() == 1 {
            return SearchResult {
                value: norm(game.bounds().clamp(game.evaluate(state))),
                best_action: actions[0],
                completed_depth: 0,
                nodes_visited: 0,
                incomplete: false,
            };
        }
        self.run(game, state, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::pig::{Pig, PigAction, PigState};

    #[test]
    fn dpw_limit_examples() {
        assert_eq!(dpw_limit(1, 5.0, 0.2), 5);
        assert_eq!(dpw_limit(32, 2.0, 0.5), 12);
        assert_eq!(dpw_limit(1, 1.0, 0.7), 1);
    }

    #[test]
    #[should_panic]
    fn dpw_limit_rejects_zero_visits() {
        dpw_limit(0, 1.0, 0.5);
    }

    #[test]
    fn uct_examples() {
        assert_eq!(uct_select(&[(3, 0.9), (0, 0.0), (0, 0.0)], 3, 0.25), 1);
        assert_eq!(uct_select(&[(10, 0.5), (5, 0.5)], 15, 0.25), 1);
        // means 0.5 and 0.4 after scaling, C1 = 50 on a width-200 scale
        assert_eq!(uct_select(&[(100, 0.5), (10, 0.4)], 110, 50.0 / 200.0), 1);
    }

    #[test]
    fn final_action_uses_visits_not_values() {
        // the child with the better mean has fewer visits
        let children = [(40u64, 0.9), (60u64, 0.2)];
        let visits: Vec<u64> = children.iter().map(|c| c.0).collect();
        assert_eq!(final_action(&visits), 1);
        assert_eq!(final_action(&[5, 5]), 0);
    }

    #[test]
    fn restricted_sampling_renormalises() {
        let stored = [('x', 0.5), ('y', 0.25)];
        let mut rng = rng_from_seed(5);
        let n = 60_000;
        let xs = (0..n).filter(|_| sample_restricted(&stored, &mut rng) == 0).count();
        let p = 2.0 / 3.0;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((xs as f64 / n as f64 - p).abs() < 4.0 * sigma);
    }

    #[test]
    fn rollout_zero_depth_is_evaluation() {
        let g = Pig;
        let s = PigState::new(60, 40, 0, Player::One);
        let mut rng = rng_from_seed(1);
        assert_eq!(rollout(&g, &s, 0, &mut rng), (20.0, 0));
    }

    #[test]
    fn certain_win_stops_and_is_deterministic() {
        let g = Pig;
        let s = PigState::new(95, 10, 10, Player::One);
        for variant in [MctsVariant::Plain, MctsVariant::Dpw] {
            let p = MctsParams::new(variant, 50.0, 0, 5.0, 0.2).with_budget(Budget::Simulations(1000));
            let mut e = MctsEngine::<Pig>::new(p);
            let r = e.search(&g, &s, 3);
            assert_eq!(r.best_action, PigAction::Stop);
            assert_eq!(e.root_visits(), 1000);
            assert!(e.check_backups());
            let visits: Vec<u64> = e.root_children().iter().map(|c| c.visits).collect();
            let mut again = MctsEngine::<Pig>::new(p);
            assert_eq!(again.search(&g, &s, 3), r);
            assert_eq!(again.root_children().iter().map(|c| c.visits).collect::<Vec<_>>(), visits);
        }
    }

    #[test]
    fn single_simulation_returns_legal_action() {
        let g = Pig;
        let s = PigState::new(0, 0, 0, Player::One);
        let p = MctsParams::new(MctsVariant::Dpw, 50.0, 0, 5.0, 0.2).with_budget(Budget::Simulations(1));
        let r = MctsEngine::<Pig>::new(p).search(&g, &s, 9);
        assert!(g.legal_actions(&s).contains(&r.best_action));
    }
}
