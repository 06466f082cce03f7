use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;

use mcms::domains::GameKind;
use mcms::harness::{
    check_theorem, play_game, run_tournament, tune_elimination, EngineKind, EngineSpec, RunConfig, TheoremConfig,
    TournamentConfig, TuneConfig,
};
use mcms::oracle::{solve_pig, PigValueTable, DEFAULT_TOLERANCE};
use mcms::rng::{combine, rng_from_seed};
use mcms::search::Budget;
use mcms::stats::{collect_states, estimator_stats, write_state_csv, write_stats_csv};

#[derive(Parser)]
#[command(name = "mcms", version, about = "Stochastic game-tree search experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Solve Pig by value iteration and save the table.
    SolvePig,
    /// Estimator statistics on Pig states observed in cross-play.
    Stats,
    /// Seat-swapped matches between two engines.
    Tournament,
    /// Single-elimination tuning over a list of engine specs.
    Tune,
    /// Empirical coverage of the sampling error bound on Pig.
    Theorem,
    /// One game between two engines, printing the move log.
    Play,
}

/// Every flag can also be given as `key=value` in `--config`; flags win.
#[derive(Args, Default)]
struct Opts {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    game: Option<String>,
    #[arg(long = "engine-a", global = true)]
    engine_a: Option<String>,
    #[arg(long = "engine-b", global = true)]
    engine_b: Option<String>,
    /// `;`-separated engine specs (stats roster, tuning grid).
    #[arg(long, global = true)]
    engines: Option<String>,
    #[arg(long, global = true)]
    matches: Option<usize>,
    #[arg(long = "budget-nodes", global = true, conflicts_with = "budget_ms")]
    budget_nodes: Option<u64>,
    #[arg(long = "budget-ms", global = true)]
    budget_ms: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    runs: Option<usize>,
    #[arg(long, global = true)]
    states: Option<usize>,
    /// Games per ordered pairing when collecting states.
    #[arg(long, global = true)]
    games: Option<usize>,
    /// Comma-separated sample widths.
    #[arg(long, global = true)]
    c: Option<String>,
    /// Comma-separated tolerances.
    #[arg(long, global = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Saved Pig table to load instead of solving.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    #[arg(long = "log-moves", global = true)]
    log_moves: bool,
}

impl Opts {
    fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => RunConfig::default(),
        };
        let mut flags = RunConfig::default();
        let mut set = |k: &str, v: Option<String>| -> Result<()> {
            if let Some(v) = v {
                flags.set(k, &v)?;
            }
            Ok(())
        };
        set("game", self.game.clone())?;
        set("engine-a", self.engine_a.clone())?;
        set("engine-b", self.engine_b.clone())?;
        set("engines", self.engines.clone())?;
        set("matches", self.matches.map(|v| v.to_string()))?;
        set("budget-nodes", self.budget_nodes.map(|v| v.to_string()))?;
        set("budget-ms", self.budget_ms.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set("runs", self.runs.map(|v| v.to_string()))?;
        set("states", self.states.map(|v| v.to_string()))?;
        set("games", self.games.map(|v| v.to_string()))?;
        set("c", self.c.clone())?;
        set("lambda", self.lambda.clone())?;
        set("depth", self.depth.map(|v| v.to_string()))?;
        set("trials", self.trials.map(|v| v.to_string()))?;
        set("tolerance", self.tolerance.map(|v| v.to_string()))?;
        set("table", self.table.as_ref().map(|p| p.display().to_string()))?;
        set("log-moves", self.log_moves.then(|| "true".to_string()))?;
        // A budget flag replaces any budget from the file.
        if self.budget_nodes.is_some() || self.budget_ms.is_some() {
            cfg = RunConfig::parse(
                &cfg.to_text().lines().filter(|l| !l.starts_with("budget-")).collect::<Vec<_>>().join("\n"),
            )?;
        }
        Ok(cfg.merged(&flags))
    }
}

struct Run {
    cfg: RunConfig,
}

impl Run {
    fn game(&self) -> Result<GameKind> {
        Ok(self.cfg.get_str("game").unwrap_or("pig").parse()?)
    }

    fn seed(&self) -> Result<u64> {
        Ok(self.cfg.get("seed")?.unwrap_or(1))
    }

    fn budget(&self) -> Result<Budget> {
        match (self.cfg.get::<u64>("budget-nodes")?, self.cfg.get::<u64>("budget-ms")?) {
            (Some(_), Some(_)) => bail!("give either budget-nodes or budget-ms, not both"),
            (_, Some(ms)) => Ok(Budget::Millis(ms)),
            (Some(n), None) => Ok(Budget::Nodes(n)),
            (None, None) => Ok(Budget::Nodes(20_000)),
        }
    }

    fn engine(&self, key: &str, default: &str) -> Result<EngineSpec> {
        Ok(self.cfg.get_str(key).unwrap_or(default).parse()?)
    }

    fn engines(&self) -> Result<Option<Vec<EngineSpec>>> {
        Ok(self.cfg.get_list_sep("engines", ';')?)
    }

    fn out(&self, default: &str) -> Result<PathBuf> {
        let dir = PathBuf::from(self.cfg.get_str("out").unwrap_or(default));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("config.txt"), self.cfg.to_text())?;
        Ok(dir)
    }

    fn table(&self) -> Result<PigValueTable> {
        match self.cfg.get_str("table") {
            Some(p) => Ok(PigValueTable::load(Path::new(p))?),
            None => Ok(solve_pig(self.cfg.get("tolerance")?.unwrap_or(DEFAULT_TOLERANCE))?),
        }
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let run = Run { cfg: cli.opts.to_config()? };
    match cli.command {
        Command::SolvePig => solve(&run),
        Command::Stats => stats(&run),
        Command::Tournament => tournament(&run),
        Command::Tune => tune(&run),
        Command::Theorem => theorem(&run),
        Command::Play => play(&run),
    }
}

fn solve(run: &Run) -> Result<()> {
    let tol = run.cfg.get("tolerance")?.unwrap_or(DEFAULT_TOLERANCE);
    let start = Instant::now();
    let table = solve_pig(tol)?;
    let dir = run.out("out/solve-pig")?;
    table.save(&dir.join("pig_table.bin"))?;
    println!(
        "{} states, {} sweeps, residual {:.3e}, V(start) = {:.9}, {:.1}s",
        table.len(),
        table.sweeps,
        table.residual,
        table.actor_value(0, 0, 0)?,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn stats(run: &Run) -> Result<()> {
    let seed = run.seed()?;
    let budget = run.budget()?;
    let table = run.table()?;
    let roster: Vec<EngineSpec> = match run.engines()? {
        Some(r) => r,
        None => EngineKind::ALL.iter().map(|&k| EngineSpec::new(k)).collect(),
    };
    let games = run.cfg.get("games")?.unwrap_or(2);
    let mut sample = collect_states(&roster, games, combine(&[seed, 0]), Budget::Nodes(2000))?;
    let observed = sample.len();
    sample.shuffle(&mut rng_from_seed(combine(&[seed, 1])));
    sample.truncate(run.cfg.get("states")?.unwrap_or(200));
    let runs = run.cfg.get("runs")?.unwrap_or(20);
    let dir = run.out("out/stats")?;
    let mut reports = Vec::new();
    for spec in &roster {
        let r = estimator_stats(spec, &sample, runs, &table, budget, combine(&[seed, 2]))?;
        println!(
            "{:<24} mse {:>9.3} var {:>8.3} |bias| {:>7.3} regret {:>7.4}",
            r.algorithm, r.mse, r.variance, r.abs_bias, r.regret
        );
        reports.push(r);
    }
    write_stats_csv(&reports, &dir.join("stats.csv"))?;
    write_state_csv(&reports, &dir.join("states.csv"))?;
    println!("{} of {observed} observed states, {runs} runs; wrote {}", sample.len(), dir.display());
    Ok(())
}

fn tournament(run: &Run) -> Result<()> {
    let cfg = TournamentConfig {
        game: run.game()?,
        pairings: vec![(run.engine("engine-a", "star2ss")?, run.engine("engine-b", "star2")?)],
        matches: run.cfg.get("matches")?.unwrap_or(500),
        seed: run.seed()?,
        budget: run.budget()?,
        log_moves: run.cfg.get("log-moves")?.unwrap_or(false),
    };
    let report = run_tournament(&cfg)?;
    let dir = run.out("out/tournament")?;
    report.write(&dir)?;
    for r in &report.rows {
        println!(
            "{} vs {}: {:.2}% +- {:.2} over {} games ({} voided matches)",
            r.engine_a,
            r.engine_b,
            100.0 * r.win_rate,
            100.0 * r.ci95,
            r.games,
            r.voided
        );
    }
    Ok(())
}

fn tune(run: &Run) -> Result<()> {
    let Some(grid) = run.engines()? else { bail!("tune needs --engines with at least two specs") };
    let cfg = TuneConfig {
        game: run.game()?,
        grid,
        matches: run.cfg.get("matches")?.unwrap_or(100),
        seed: run.seed()?,
        budget: run.budget()?,
    };
    let result = tune_elimination(&cfg)?;
    let dir = run.out("out/tune")?;
    fs::write(dir.join("bracket.txt"), result.log.join("\n") + "\n")?;
    fs::write(dir.join("result.json"), serde_json::to_string_pretty(&result)?)?;
    for line in &result.log {
        println!("{line}");
    }
    println!("winner: #{} {}", result.winner_index, result.winner);
    Ok(())
}

fn theorem(run: &Run) -> Result<()> {
    let def = TheoremConfig::default();
    let cfg = TheoremConfig {
        cs: run.cfg.get_list("c")?.unwrap_or(def.cs),
        lambdas: run.cfg.get_list("lambda")?.unwrap_or(def.lambdas),
        depth: run.cfg.get("depth")?.unwrap_or(def.depth),
        trials: run.cfg.get("trials")?.unwrap_or(def.trials),
        states: run.cfg.get("states")?.unwrap_or(def.states),
        seed: run.seed()?,
    };
    let table = check_theorem(&cfg)?;
    let dir = run.out("out/theorem")?;
    table.write_csv(&dir.join("coverage.csv"))?;
    for r in &table.rows {
        println!(
            "c={:<4} lambda={:<6} bound={:>10.4} coverage={:.4}{}",
            r.c,
            r.lambda,
            r.bound,
            r.coverage,
            if r.vacuous {
                " (vacuous)"
            } else if r.meets_bound() {
                ""
            } else {
                " BELOW BOUND"
            }
        );
    }
    println!("{} monotonicity violations", table.monotone_violations.len());
    Ok(())
}

fn play(run: &Run) -> Result<()> {
    let kind = run.game()?;
    let a = run.engine("engine-a", "star2ss")?;
    let b = run.engine("engine-b", "star2")?;
    let budget = run.budget()?;
    let seed = run.seed()?;
    let played = mcms::with_game!(kind, |g| {
        let mut ea = a.build(kind, budget);
        let mut eb = b.build(kind, budget);
        play_game(&g, [ea.as_mut(), eb.as_mut()], seed, [combine(&[a.seed, seed, 0]), combine(&[b.seed, seed, 1])], true, &mut |_| {})?
    });
    let mut transcript = format!("# {kind}: {a} (player 1) vs {b} (player 2), seed {seed}\n");
    for m in &played.moves {
        transcript.push_str(m);
        transcript.push('\n');
    }
    transcript.push_str(&format!("# result: u1 = {} after {} plies\n", played.utility, played.plies));
    print!("{transcript}");
    if run.cfg.get_str("out").is_some() {
        let dir = run.out("out/play")?;
        fs::write(dir.join("transcript.txt"), transcript)?;
    }
    Ok(())
}
