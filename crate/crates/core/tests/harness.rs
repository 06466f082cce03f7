use mcms::domains::{GameKind, Pig};
use mcms::harness::{
    ci_half_width, run_tournament, sample_pig_states, tune_elimination, EngineKind, EngineSpec, TournamentConfig,
    TuneConfig,
};
use mcms::oracle::solve_pig;
use mcms::search::{expectimax_value, Budget, StarConfig, StarEngine, StarVariant};
use mcms::stats::{collect_states, estimator_stats, DECOMPOSITION_TOLERANCE};

fn spec(s: &str) -> EngineSpec {
    s.parse().unwrap()
}

#[test]
fn self_play_scores_exactly_half() {
    for (game, e) in [(GameKind::Pig, "star1"), (GameKind::Ewn, "expss:c=2"), (GameKind::Ra, "mcts")] {
        let cfg = TournamentConfig {
            game,
            pairings: vec![(spec(e), spec(e))],
            matches: 4,
            seed: 3,
            budget: Budget::Nodes(300),
            log_moves: false,
        };
        let r = run_tournament(&cfg).unwrap();
        assert_eq!(r.rows[0].win_rate, 0.5, "{game}");
        assert!(!r.rows[0].excludes_half());
    }
}

#[test]
fn tournaments_are_seed_deterministic() {
    let cfg = TournamentConfig {
        game: GameKind::CantStop,
        pairings: vec![(spec("star2ss:c=5"), spec("dpw"))],
        matches: 2,
        seed: 11,
        budget: Budget::Nodes(300),
        log_moves: true,
    };
    // Everything except wall-clock time must repeat.
    let run = || {
        let mut r = run_tournament(&cfg).unwrap();
        r.matches.iter_mut().flatten().flat_map(|m| m.games.iter_mut()).for_each(|g| g.millis = 0);
        r
    };
    let (a, b) = (run(), run());
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.matches, b.matches);
}

#[test]
fn confidence_interval() {
    assert!((ci_half_width(0.5, 100).unwrap() - 0.098).abs() < 1e-12);
    assert_eq!(ci_half_width(1.0, 10).unwrap(), 0.0);
    assert!(ci_half_width(0.5, 0).is_err());
}

fn tune(grid: Vec<EngineSpec>) -> mcms::harness::TuneResult {
    tune_elimination(&TuneConfig { game: GameKind::Pig, grid, matches: 1, seed: 5, budget: Budget::Nodes(200) })
        .unwrap()
}

#[test]
fn tied_brackets_advance_the_lower_index() {
    // Identical entrants always tie, so the first entrant must win every round.
    let r = tune(vec![spec("star1"); 2]);
    assert_eq!((r.winner_index, r.rounds), (0, 1));
    let r = tune(vec![spec("star1"); 8]);
    assert_eq!((r.winner_index, r.rounds), (0, 3));
    let r = tune(vec![spec("star1"); 5]);
    assert_eq!((r.winner_index, r.rounds), (0, 3));
    assert!(r.log.iter().any(|l| l.contains("bye")));
}

#[test]
fn bracket_rejects_degenerate_grids() {
    let cfg = TuneConfig { game: GameKind::Pig, grid: vec![spec("exp")], matches: 1, seed: 0, budget: Budget::Nodes(10) };
    assert!(tune_elimination(&cfg).is_err());
    let cfg = TuneConfig { grid: vec![spec("exp"), spec("star1")], matches: 0, ..cfg };
    assert!(tune_elimination(&cfg).is_err());
}

#[test]
fn wider_samples_estimate_better() {
    let states = sample_pig_states(20, 4);
    let err = |c: usize| {
        let mut e = StarEngine::new(StarConfig { tt_bits: 12, ..StarConfig::sampled(StarVariant::Expectimax, c, 1) });
        let mut total = 0.0;
        for s in &states {
            let exact = expectimax_value(&Pig, s, 2);
            for t in 0..20 {
                total += (e.value_at_depth(&Pig, s, 2, t) - exact).abs();
            }
        }
        total / (20.0 * states.len() as f64)
    };
    let (wide, narrow) = (err(50), err(5));
    assert!(wide < narrow, "c=50 error {wide} >= c=5 error {narrow}");
}

#[test]
fn estimator_stats_on_pig() {
    let table = solve_pig(1e-10).unwrap();
    let roster = [spec("exp"), spec("expss:c=4")];
    let states = collect_states(&roster, 1, 7, Budget::Nodes(300)).unwrap();
    assert!(!states.is_empty());
    let sample = &states[..states.len().min(8)];
    let exact = estimator_stats(&roster[0], sample, 3, &table, Budget::Nodes(500), 1).unwrap();
    assert_eq!(exact.variance, 0.0);
    let sampled = estimator_stats(&roster[1], sample, 5, &table, Budget::Nodes(500), 1).unwrap();
    assert!(sampled.variance > 0.0);
    for r in [&exact, &sampled] {
        assert!(r.regret >= 0.0);
        for s in &r.per_state {
            assert!(s.mse < 1e-12 || s.decomposition_error() < DECOMPOSITION_TOLERANCE, "{s:?}");
        }
    }
    assert!(collect_states(&roster[..1], 1, 0, Budget::Nodes(10)).is_err());
    assert!(estimator_stats(&roster[0], sample, 1, &table, Budget::Nodes(10), 0).is_err());
    assert_eq!(EngineKind::ALL.len(), 8);
}
