//! Sparse sampling at chance nodes: `c` outcomes drawn with replacement,
//! each weighted `1/c`, from a stream keyed by the chance node itself so the
//! same node always sees the same sample regardless of traversal order.

use serde::{Deserialize, Serialize};

use crate::game::{sample_from, Game, GameError, GameResult, OutcomeSet};
use crate::rng::{combine, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Sample width.
    pub c: usize,
    /// Base seed, combined with the per-search seed.
    pub root_seed: u64,
}

impl SamplingParams {
    pub fn new(c: usize, root_seed: u64) -> GameResult<Self> {
        if c == 0 {
            return Err(GameError::Contract("sample width must be at least 1".into()));
        }
        Ok(SamplingParams { c, root_seed })
    }
}

/// Seed of the chance node `(state, action, depth)` under `root_seed`.
pub fn subseed(state_key: u64, action_index: usize, depth: u32, root_seed: u64) -> u64 {
    combine(&[state_key, action_index as u64, depth as u64, root_seed])
}

/// `c` i.i.d. draws from `dist`, each with weight `1/c`. A distribution with a
/// single outcome is returned unchanged: sampling it is vacuous.
pub fn sample_distribution<O: Copy>(dist: &[(O, f64)], c: usize, seed: u64) -> Vec<(O, f64)> {
    if dist.len() == 1 {
        return vec![(dist[0].0, 1.0)];
    }
    let mut rng = rng_from_seed(seed);
    let w = 1.0 / c as f64;
    (0..c).map(|_| (sample_from(dist, &mut rng), w)).collect()
}

/// Sampled outcome set of `(state, action)` searched at `depth`.
pub fn sample_outcome_set<G: Game>(
    game: &G,
    state: &G::State,
    action_index: usize,
    depth: u32,
    c: usize,
    root_seed: u64,
) -> OutcomeSet<G::Outcome> {
    let action = game.legal_actions(state)[action_index];
    let dist = game.outcomes(state, action);
    let seed = subseed(game.state_key(state), action_index, depth, root_seed);
    OutcomeSet::new_unchecked(&sample_distribution(&dist, c, seed), game.bounds())
}

/// Parameters of the sparse-sampling error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremParams {
    pub lambda: f64,
    pub depth: u32,
    pub action_count: usize,
}

/// Lower bound on `P(|V̂_d - V_d| <= lambda * d)`:
/// `1 - (2 c |A|)^d exp(-lambda^2 c / (2 v_max^2))`. May be negative (vacuous).
pub fn theorem_bound(p: TheoremParams, c: usize, v_max: f64) -> GameResult<f64> {
    if !(p.lambda > 0.0 && p.lambda <= 2.0 * v_max) {
        return Err(GameError::Contract(format!("lambda {} outside (0, {}]", p.lambda, 2.0 * v_max)));
    }
    if c == 0 || p.action_count == 0 {
        return Err(GameError::Contract("c and |A| must be positive".into()));
    }
    if p.depth == 0 {
        return Ok(1.0);
    }
    let c = c as f64;
    let log_prefactor = p.depth as f64 * (2.0 * c * p.action_count as f64).ln();
    let exponent = -p.lambda * p.lambda * c / (2.0 * v_max * v_max);
    Ok(1.0 - (log_prefactor + exponent).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::pig::{roll_distribution, Pig, PigAction, PigOutcome, PigState};
    use crate::game::Player;

    #[test]
    fn subseed_is_pure() {
        assert_eq!(subseed(5, 1, 3, 9), subseed(5, 1, 3, 9));
        assert_ne!(subseed(5, 1, 3, 9), subseed(5, 1, 2, 9));
        assert_ne!(subseed(5, 1, 3, 9), subseed(5, 0, 3, 9));
    }

    #[test]
    fn subseed_has_no_collisions() {
        let mut seen = std::collections::HashSet::with_capacity(1_000_000);
        for key in 0..10_000u64 {
            for a in 0..10 {
                for d in 0..10 {
                    assert!(seen.insert(subseed(key, a, d, 42)));
                }
            }
        }
    }

    #[test]
    fn width_one_and_deterministic_actions() {
        let dist = roll_distribution();
        let one = sample_distribution(&dist, 1, 3);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].1, 1.0);
        let certain = sample_distribution(&[(PigOutcome::Certain, 1.0)], 20, 3);
        assert_eq!(certain, vec![(PigOutcome::Certain, 1.0)]);
    }

    #[test]
    fn sampled_set_has_c_entries_of_weight_one_over_c() {
        let g = Pig;
        let s = PigState::new(10, 20, 5, Player::One);
        let set = sample_outcome_set(&g, &s, 0, 3, 20, 77);
        assert_eq!(set.len(), 20);
        assert!(set.entries().iter().all(|e| e.prob == 1.0 / 20.0));
        assert_eq!(set, sample_outcome_set(&g, &s, 0, 3, 20, 77));
        assert_eq!(g.legal_actions(&s)[0], PigAction::Roll);
    }

    #[test]
    fn double_one_frequency() {
        let dist = roll_distribution();
        let (mut hits, mut total) = (0u64, 0u64);
        for seed in 0..100_000u64 {
            for (o, _) in sample_distribution(&dist, 20, seed) {
                total += 1;
                hits += (o == PigOutcome::Dice(1, 1)) as u64;
            }
        }
        let p = 1.0 / 36.0;
        let sigma = (p * (1.0 - p) / total as f64).sqrt();
        assert!((hits as f64 / total as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn bound_examples() {
        let p = TheoremParams { lambda: 20.0, depth: 1, action_count: 2 };
        let b = theorem_bound(p, 1000, 100.0).unwrap();
        // 1 - 4000 e^-20
        assert!((b - (1.0 - 4000.0 * (-20.0f64).exp())).abs() < 1e-15);
        assert!((b - 0.99999176).abs() < 1e-8);
        let small = TheoremParams { lambda: 1.0, depth: 1, action_count: 2 };
        assert!(theorem_bound(small, 10, 100.0).unwrap() < 0.0);
        let zero = TheoremParams { lambda: 1.0, depth: 0, action_count: 2 };
        assert_eq!(theorem_bound(zero, 10, 100.0).unwrap(), 1.0);
        let bad = TheoremParams { lambda: 250.0, depth: 1, action_count: 2 };
        assert!(theorem_bound(bad, 10, 100.0).is_err());
        assert!(SamplingParams::new(0, 1).is_err());
    }
}
