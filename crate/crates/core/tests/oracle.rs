use std::sync::OnceLock;

use mcms::domains::pig::{PigAction, PigState};
use mcms::domains::Pig;
use mcms::game::{Game, Player};
use mcms::oracle::{solve_pig, solve_pig_with, PigValueTable, SolveOptions, Sweep};
use mcms::rng::rng_from_seed;
use mcms::search::expectimax_value;
use rand::Rng;

fn table() -> &'static PigValueTable {
    static T: OnceLock<PigValueTable> = OnceLock::new();
    T.get_or_init(|| solve_pig(1e-10).unwrap())
}

fn random_live_state(rng: &mut impl Rng) -> PigState {
    let me = rng.gen_range(0..100u16);
    let opp = rng.gen_range(0..100u16);
    let t = rng.gen_range(0..100 - me);
    let p = if rng.gen_bool(0.5) { Player::One } else { Player::Two };
    PigState::from_canonical(me, opp, t, p)
}

#[test]
fn converges_below_tolerance() {
    let t = table();
    assert!(t.residual < 1e-10);
    assert!(t.len() < 1_000_000);
}

#[test]
fn start_value_is_pinned() {
    let v = table().value(&Pig.initial_state()).unwrap();
    assert!((v - 3.911778772).abs() < 1e-8, "{v}");
}

#[test]
fn gauss_seidel_agrees_with_jacobi() {
    let gs = solve_pig_with(SolveOptions { sweep: Sweep::GaussSeidel, ..SolveOptions::default() }).unwrap();
    let t = table();
    let mut rng = rng_from_seed(3);
    for _ in 0..20_000 {
        let s = random_live_state(&mut rng);
        assert!((gs.value(&s).unwrap() - t.value(&s).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn terminal_and_bankable_states() {
    let t = table();
    let mut s = PigState::new(100, 40, 0, Player::One);
    s.winner = Some(Player::One);
    assert_eq!(t.value(&s).unwrap(), 100.0);
    s.winner = Some(Player::Two);
    assert_eq!(t.value(&s).unwrap(), -100.0);
    assert_eq!(t.value(&PigState::new(95, 10, 7, Player::One)).unwrap(), 100.0);
    assert_eq!(t.value(&PigState::new(10, 95, 7, Player::Two)).unwrap(), -100.0);
}

#[test]
fn bellman_residual_spot_check() {
    let t = table();
    let mut rng = rng_from_seed(11);
    for _ in 0..10_000 {
        let s = random_live_state(&mut rng);
        let (me, opp, k) = s.canonical();
        assert!(t.bellman_error(me, opp, k).unwrap() < 1e-9);
    }
}

#[test]
fn greedy_action_attains_value_and_regret_is_nonnegative() {
    let t = table();
    let mut rng = rng_from_seed(12);
    for _ in 0..10_000 {
        let s = random_live_state(&mut rng);
        let v = t.value(&s).unwrap();
        let g = t.greedy_action(&s).unwrap();
        assert!((t.q_value(&s, g).unwrap() - v).abs() < 1e-9);
        assert!(t.regret(&s, g).unwrap().abs() < 1e-9);
        for a in [PigAction::Roll, PigAction::Stop] {
            assert!(t.regret(&s, a).unwrap() >= -1e-9);
        }
    }
}

#[test]
fn rolling_at_ninety_nine_has_regret() {
    let t = table();
    for p in [Player::One, Player::Two] {
        let s = PigState::from_canonical(99, 50, 1, p);
        assert!(t.regret(&s, PigAction::Roll).unwrap() > 0.0);
        assert_eq!(t.regret(&s, PigAction::Stop).unwrap(), 0.0);
    }
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pig.bin");
    table().save(&path).unwrap();
    let back = PigValueTable::load(&path).unwrap();
    assert_eq!(&back, table());
    std::fs::write(&path, b"garbage").unwrap();
    assert!(PigValueTable::load(&path).is_err());
}

#[test]
fn deeper_expectimax_approaches_the_oracle() {
    let t = table();
    let mut rng = rng_from_seed(5);
    let states: Vec<PigState> = (0..100).map(|_| random_live_state(&mut rng)).collect();
    let errs: Vec<f64> = [2, 3, 4]
        .iter()
        .map(|&d| states.iter().map(|s| (expectimax_value(&Pig, s, d) - t.value(s).unwrap()).abs()).sum::<f64>() / 100.0)
        .collect();
    println!("mean |V_d - V| for d = 2, 3, 4: {errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}
