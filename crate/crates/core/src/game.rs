//! Generic two-player zero-sum stochastic game interface and the chance-node
//! bound algebra shared by every search engine.
//!
//! A game moves through states; in every non-terminal state one player picks
//! an action and the successor is drawn from a finite distribution over
//! outcomes. Deterministic actions have a single outcome with probability 1.
//! Utilities are always reported from player one's point of view.

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

/// Tolerance on the sum of an outcome distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("outcome set is empty")]
    EmptyOutcomeSet,
    #[error("outcome probabilities sum to {0}, expected 1")]
    BadProbabilitySum(f64),
    #[error("invalid probability {0}")]
    BadProbability(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type GameResult<T> = Result<T, GameError>;

/// The two seats. Player one maximises `u1`, player two minimises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Player {
        if i == 0 {
            Player::One
        } else {
            Player::Two
        }
    }

    /// +1 for the maximiser, -1 for the minimiser.
    pub fn sign(self) -> f64 {
        match self {
            Player::One => 1.0,
            Player::Two => -1.0,
        }
    }
}

/// Minimum and maximum utility. Zero-sum games use `min = -max`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ValueBounds {
    pub min: f64,
    pub max: f64,
}

impl Default for ValueBounds {
    fn default() -> Self {
        ValueBounds { min: -100.0, max: 100.0 }
    }
}

impl ValueBounds {
    pub fn symmetric(max: f64) -> GameResult<Self> {
        if !(max > 0.0) || !max.is_finite() {
            return Err(GameError::Contract(format!("v_max must be positive, got {max}")));
        }
        Ok(ValueBounds { min: -max, max })
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn full_window(&self) -> SearchWindow {
        SearchWindow { alpha: self.min, beta: self.max }
    }
}

/// A finite two-player zero-sum stochastic game of perfect information.
///
/// Implementations must keep `legal_actions` deterministic (it defines the
/// static move ordering) and `outcomes` must list strictly positive
/// probabilities summing to one in a fixed order.
pub trait Game: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;
    type Action: Copy + Eq + Hash + Debug + Send + Sync;
    type Outcome: Copy + Eq + Hash + Debug + Send + Sync;

    fn name(&self) -> &'static str;

    fn initial_state(&self) -> Self::State;

    fn bounds(&self) -> ValueBounds {
        ValueBounds::default()
    }

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Player to act in a non-terminal state.
    fn to_act(&self, state: &Self::State) -> Player;

    /// Legal actions in static move order. Empty for terminal states.
    fn legal_actions(&self, state: &Self::State) -> Vec<Self::Action>;

    /// Full outcome distribution of `(state, action)`.
    fn outcomes(&self, state: &Self::State, action: Self::Action) -> Vec<(Self::Outcome, f64)>;

    fn apply(&self, state: &Self::State, action: Self::Action, outcome: Self::Outcome) -> Self::State;

    /// `u1` of a terminal state.
    fn utility(&self, state: &Self::State) -> f64;

    /// Heuristic evaluation from player one's view; equals `utility` on terminals.
    fn evaluate(&self, state: &Self::State) -> f64;

    /// Stable 64-bit key used by transposition tables and seeded sampling.
    fn state_key(&self, state: &Self::State) -> u64;

    /// One-line canonical text form of a state.
    fn encode_state(&self, state: &Self::State) -> String;

    fn decode_state(&self, text: &str) -> GameResult<Self::State>;

    /// Draws one outcome according to the true distribution.
    fn sample_outcome<R: rand::Rng + ?Sized>(
        &self,
        state: &Self::State,
        action: Self::Action,
        rng: &mut R,
    ) -> Self::Outcome
    where
        Self: Sized,
    {
        let dist = self.outcomes(state, action);
        sample_from(&dist, rng)
    }
}

/// Draws from a `(item, probability)` list by inverse CDF.
pub fn sample_from<T: Copy, R: rand::Rng + ?Sized>(dist: &[(T, f64)], rng: &mut R) -> T {
    debug_assert!(!dist.is_empty());
    let total: f64 = dist.iter().map(|(_, p)| p).sum();
    let mut x = rng.gen::<f64>() * total;
    for &(item, p) in dist {
        if x < p {
            return item;
        }
        x -= p;
    }
    dist[dist.len() - 1].0
}

/// Checked variant of [`Game::legal_actions`].
pub fn checked_actions<G: Game>(game: &G, state: &G::State) -> GameResult<Vec<G::Action>> {
    if game.is_terminal(state) {
        return Err(GameError::Contract("legal actions requested for a terminal state".into()));
    }
    let actions = game.legal_actions(state);
    if actions.is_empty() {
        return Err(GameError::Contract("non-terminal state without legal actions".into()));
    }
    Ok(actions)
}

/// Checked variant of [`Game::outcomes`]: rejects illegal actions and bad distributions.
pub fn checked_outcomes<G: Game>(
    game: &G,
    state: &G::State,
    action: G::Action,
) -> GameResult<Vec<(G::Outcome, f64)>> {
    let actions = checked_actions(game, state)?;
    if !actions.contains(&action) {
        return Err(GameError::Contract(format!("illegal action {action:?}")));
    }
    let dist = game.outcomes(state, action);
    validate_distribution(dist.iter().map(|(_, p)| *p))?;
    Ok(dist)
}

/// Checked variant of [`Game::apply`]: the outcome must belong to the distribution.
pub fn checked_apply<G: Game>(
    game: &G,
    state: &G::State,
    action: G::Action,
    outcome: G::Outcome,
) -> GameResult<G::State> {
    let dist = checked_outcomes(game, state, action)?;
    if !dist.iter().any(|(o, _)| *o == outcome) {
        return Err(GameError::Contract(format!("outcome {outcome:?} is not produced by {action:?}")));
    }
    Ok(game.apply(state, action, outcome))
}

pub fn validate_distribution(probs: impl IntoIterator<Item = f64>) -> GameResult<()> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for p in probs {
        if !(p > 0.0 && p <= 1.0) {
            return Err(GameError::BadProbability(p));
        }
        sum += p;
        n += 1;
    }
    if n == 0 {
        return Err(GameError::EmptyOutcomeSet);
    }
    if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(GameError::BadProbabilitySum(sum));
    }
    Ok(())
}

/// One chance outcome with its probability and current value bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeEntry<O> {
    pub outcome: O,
    pub prob: f64,
    pub lower: f64,
    pub upper: f64,
}

impl<O> OutcomeEntry<O> {
    pub fn unsearched(outcome: O, prob: f64, bounds: ValueBounds) -> Self {
        OutcomeEntry { outcome, prob, lower: bounds.min, upper: bounds.max }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Ordered chance-node outcome array with per-entry bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSet<O> {
    entries: Vec<OutcomeEntry<O>>,
    bounds: ValueBounds,
}

impl<O: Copy> OutcomeSet<O> {
    /// Builds a set with every entry unsearched. Probabilities must sum to one.
    pub fn new(dist: &[(O, f64)], bounds: ValueBounds) -> GameResult<Self> {
        validate_distribution(dist.iter().map(|(_, p)| *p))?;
        Ok(Self::new_unchecked(dist, bounds))
    }

    pub(crate) fn new_unchecked(dist: &[(O, f64)], bounds: ValueBounds) -> Self {
        OutcomeSet {
            entries: dist.iter().map(|&(o, p)| OutcomeEntry::unsearched(o, p, bounds)).collect(),
            bounds,
        }
    }

    /// Builds a set from explicit entries, checking probabilities and bound ordering.
    pub fn from_entries(entries: Vec<OutcomeEntry<O>>, bounds: ValueBounds) -> GameResult<Self> {
        validate_distribution(entries.iter().map(|e| e.prob))?;
        for e in &entries {
            if !(bounds.min <= e.lower && e.lower <= e.upper && e.upper <= bounds.max) {
                return Err(GameError::Contract(format!(
                    "entry bounds [{}, {}] outside [{}, {}]",
                    e.lower, e.upper, bounds.min, bounds.max
                )));
            }
        }
        Ok(OutcomeSet { entries, bounds })
    }

    pub fn entries(&self) -> &[OutcomeEntry<O>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bounds(&self) -> ValueBounds {
        self.bounds
    }

    /// Current lower bound on the chance node value.
    pub fn pess(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc + e.prob * e.lower)
    }

    /// Current upper bound on the chance node value.
    pub fn opti(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc + e.prob * e.upper)
    }

    /// Fixes entry `i` to an exact child value.
    pub fn set_exact(&mut self, i: usize, v: f64) {
        let e = &mut self.entries[i];
        e.lower = v;
        e.upper = v;
    }

    pub fn raise_lower(&mut self, i: usize, v: f64) {
        let e = &mut self.entries[i];
        e.lower = e.lower.max(v).min(e.upper);
    }

    pub fn lower_upper(&mut self, i: usize, v: f64) {
        let e = &mut self.entries[i];
        e.upper = e.upper.min(v).max(e.lower);
    }

    /// Window for searching child `i` so that its result decides the parent's cut tests.
    pub fn child_window(&self, i: usize, window: SearchWindow) -> SearchWindow {
        child_window(&self.entries[i], self.pess(), self.opti(), window, self.bounds)
    }
}

/// `alpha < beta` search window.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchWindow {
    pub alpha: f64,
    pub beta: f64,
}

impl SearchWindow {
    pub fn new(alpha: f64, beta: f64) -> GameResult<Self> {
        if alpha < beta {
            Ok(SearchWindow { alpha, beta })
        } else {
            Err(GameError::Contract(format!("empty window ({alpha}, {beta})")))
        }
    }
}

/// Child window at a chance node given the node's running `pess`/`opti`:
///
/// `alpha' = max(v_min, (alpha - opti + p*u) / p)`,
/// `beta'  = min(v_max, (beta - pess + p*l) / p)`.
pub fn child_window<O>(
    entry: &OutcomeEntry<O>,
    pess: f64,
    opti: f64,
    window: SearchWindow,
    bounds: ValueBounds,
) -> SearchWindow {
    let p = entry.prob;
    let alpha = ((window.alpha - opti + p * entry.upper) / p).max(bounds.min);
    let beta = ((window.beta - pess + p * entry.lower) / p).min(bounds.max);
    SearchWindow { alpha, beta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bounds10() -> ValueBounds {
        ValueBounds::symmetric(10.0).unwrap()
    }

    fn figure_one() -> OutcomeSet<u8> {
        let third = 1.0 / 3.0;
        let mut set = OutcomeSet::new_unchecked(&[(0u8, third), (1, third), (2, third)], bounds10());
        set.set_exact(0, 2.0);
        set
    }

    #[test]
    fn pess_of_unsearched_uniform_set_is_v_min() {
        let third = 1.0 / 3.0;
        let set = OutcomeSet::new_unchecked(&[(0u8, third), (1, third), (2, third)], bounds10());
        assert_relative_eq!(set.pess(), -10.0, epsilon = 1e-12);
    }

    #[test]
    fn figure_one_bounds() {
        let set = figure_one();
        assert_relative_eq!(set.pess(), -6.0, epsilon = 1e-12);
        assert_relative_eq!(set.opti(), 22.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn weighted_pess() {
        let mut set =
            OutcomeSet::new(&[(0u8, 0.25), (1, 0.75)], ValueBounds::default()).unwrap();
        set.set_exact(0, 100.0);
        set.set_exact(1, -100.0);
        assert_eq!(set.pess(), -50.0);
    }

    #[test]
    fn opti_examples() {
        let set = OutcomeSet::new(&[(0u8, 0.5), (1, 0.5)], ValueBounds::default()).unwrap();
        assert_eq!(set.opti(), 100.0);
        let mut single = OutcomeSet::new(&[(7u8, 1.0)], ValueBounds::default()).unwrap();
        single.set_exact(0, 42.0);
        assert_eq!(single.opti(), 42.0);
    }

    #[test]
    fn empty_outcome_set_is_rejected() {
        let err = OutcomeSet::<u8>::new(&[], ValueBounds::default()).unwrap_err();
        assert_eq!(err, GameError::EmptyOutcomeSet);
    }

    #[test]
    fn bad_sum_is_rejected() {
        assert!(matches!(
            OutcomeSet::new(&[(0u8, 0.5), (1, 0.4)], ValueBounds::default()),
            Err(GameError::BadProbabilitySum(_))
        ));
    }

    #[test]
    fn figure_one_middle_child_alpha() {
        // alpha' = (3*alpha - 12) / o_p with alpha = 4 -> 0 after scaling by 1/3.
        let set = figure_one();
        let w = set.child_window(1, SearchWindow { alpha: 4.0, beta: 5.0 });
        assert_relative_eq!(w.alpha, 0.0, epsilon = 1e-9);
        // beta' = (5 - (-6) + (1/3)(-10)) * 3 = 23 -> clamped to 10.
        assert_eq!(w.beta, 10.0);
    }

    #[test]
    fn unsearched_full_window_is_clamped() {
        let set = OutcomeSet::new(&[(0u8, 0.5), (1, 0.5)], ValueBounds::default()).unwrap();
        let w = set.child_window(0, ValueBounds::default().full_window());
        assert_eq!((w.alpha, w.beta), (-100.0, 100.0));
    }

    #[test]
    fn single_outcome_passes_window_through() {
        let set = OutcomeSet::new(&[(0u8, 1.0)], ValueBounds::default()).unwrap();
        let w = set.child_window(0, SearchWindow { alpha: -3.5, beta: 12.25 });
        assert_eq!((w.alpha, w.beta), (-3.5, 12.25));
    }

    #[test]
    fn figure_one_cut_with_raised_alpha() {
        // With alpha = 8 the upper bound 22/3 after the first child already fails low.
        let set = figure_one();
        assert!(set.opti() <= 8.0);
    }

    #[test]
    fn from_entries_checks_bounds() {
        let b = ValueBounds::default();
        let bad = vec![OutcomeEntry { outcome: 0u8, prob: 1.0, lower: 5.0, upper: 1.0 }];
        assert!(OutcomeSet::from_entries(bad, b).is_err());
    }

    #[test]
    fn window_constructor_rejects_empty() {
        assert!(SearchWindow::new(1.0, 1.0).is_err());
        assert!(SearchWindow::new(0.0, 1.0).is_ok());
    }
}
