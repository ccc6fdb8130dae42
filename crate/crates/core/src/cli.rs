//! Command-line front end. Every subcommand prints a table by default and
//! JSON lines with `--json`.
//!
//! Exit codes: 0 on success, 1 when a computation's preconditions fail,
//! 2 on usage errors.

use crate::amount::Amount;
use crate::arena::{load_arena, Arena, ObjectiveKind, Player, TieRule};
use crate::error::{Error, Result};
use crate::meanpayoff::{classify_bottoms, mp_thresholds};
use crate::num::{fmt_f64, fmt_q, parse_q, q, q_to_f64, qi, Q};
use crate::oracle::{discrete_backward_induction, parity_probe, monte_carlo_random_turn, WalkKind, MAX_WALK};
use crate::parity::{classify_bsccs, collapse_to_sinks, parity_thresholds, parity_winner_map, unwind_buchi};
use crate::richman::{as_richman, build_ssg, reach_to_richman, richman_exact, richman_iterate, solve_ssg};
use crate::sim::{
    record_json, run_batch, run_episode, summary_json, trace_jsonl, BatchConfig, EpisodeConfig, EpisodeTrace, GameState, MonitorId,
};
use crate::strategy::{
    max_general_strategy, max_recurrent_strategy, min_mp_strategy, parity_memoryless_strategy, richman_winner_strategy,
    tit_for_tat_strategy, Action, AllIn, Greedy, MoveRule, RandomBidder, Strategy, StrategyParams, View,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::sync::{Arc, Mutex};

#[derive(Parser, Debug)]
#[command(name = "bidgame", version, about = "Threshold budgets, bidding strategies and simulations for bidding games")]
pub struct Cli {
    /// Emit JSON lines instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the arena's tie rule: player1, player2, alternate=1 or alternate=2.
    #[arg(long, global = true, value_parser = parse_tie)]
    pub tiebreak: Option<TieRule>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Player 1's threshold budget at every vertex.
    Solve {
        file: String,
        /// Exact rationals (default for everything but richman games without this flag).
        #[arg(long)]
        exact: bool,
        /// Stopping tolerance for the float solver.
        #[arg(long, default_value_t = 1e-9, value_parser = parse_tol)]
        tol: f64,
        /// Richman games: the value Player 1 needs to win within this many rounds.
        #[arg(long, conflicts_with = "tol")]
        rounds: Option<usize>,
    },
    /// Bottom components with their winners (parity) or classes (mean-payoff).
    Classify { file: String },
    /// Exact thresholds of a parity or mean-payoff game.
    Thresholds { file: String },
    /// A strategy's constants and its bids at the start state.
    Strategy(StrategyArgs),
    /// Plays one episode (or a batch with --seeds) and prints the trace.
    Simulate(SimArgs),
    /// Plays against a strategy, reading one side's bids from standard input.
    Play(PlayArgs),
    /// Threshold brackets from discrete backward induction.
    Oracle {
        file: String,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
        horizon: u32,
        /// Also estimate absorption probabilities with this many random-turn walks.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parity games: Player 1's budget for the reachability probe.
        #[arg(long, value_parser = parse_rational, default_value = "1/2")]
        budget1: Q,
        /// Parity games: length of the sample play.
        #[arg(long, default_value_t = 200)]
        rounds: usize,
        /// Parity games: start vertex of the sample play.
        #[arg(long)]
        start: Option<String>,
    },
    /// Emits a derived game: the stochastic game of a richman game, or the
    /// richman game of a reachability, parity or mean-payoff game.
    Reduce {
        file: String,
        #[arg(long = "to", value_parser = ["ssg", "richman"])]
        to: String,
    },
    /// Emits the Büchi k-unwinding of a strongly connected game.
    Unwind {
        file: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Comma-separated vertices of the cycle.
        #[arg(long, value_delimiter = ',', required = true)]
        cycle: Vec<String>,
        /// Comma-separated accepting vertices.
        #[arg(long, value_delimiter = ',', required = true)]
        accepting: Vec<String>,
    },
}

#[derive(Args, Debug)]
pub struct StrategyArgs {
    pub file: String,
    /// min, max, 1 or 2 (min is Player 1, max is Player 2).
    #[arg(long, value_parser = parse_player)]
    pub player: Player,
    #[arg(long, value_parser = parse_rational)]
    pub budget: Q,
    #[arg(long)]
    pub start: Option<String>,
    /// Strategy name with parameters; defaults by objective and player.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, value_parser = parse_rational)]
    pub energy: Option<Q>,
}

#[derive(Args, Clone, Debug)]
pub struct SimArgs {
    pub file: String,
    /// Player 1's strategy, `name[:key=value,...]`.
    #[arg(long)]
    pub p1: String,
    /// Player 2's strategy, `name[:key=value,...]`.
    #[arg(long)]
    pub p2: String,
    #[arg(long, value_parser = parse_rational)]
    pub budget1: Q,
    /// Initial energy; defaults to a Max strategy's computed level, else 0.
    #[arg(long, value_parser = parse_rational)]
    pub energy: Option<Q>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run one episode per seed in `a..b` and print only the summaries and the report.
    #[arg(long, value_parser = parse_seed_range)]
    pub seeds: Option<(u64, u64)>,
    #[arg(long)]
    pub start: Option<String>,
    /// `all` or a comma-separated list of monitor names.
    #[arg(long, default_value = "all", value_parser = parse_monitors)]
    pub monitors: MonitorSet,
    /// Print only the summary record.
    #[arg(long)]
    pub summary_only: bool,
}

#[derive(Args, Debug)]
pub struct PlayArgs {
    pub file: String,
    /// The side read from standard input.
    #[arg(long = "as", value_parser = parse_player)]
    pub side: Player,
    /// The computer's strategy, `name[:key=value,...]`.
    #[arg(long)]
    pub against: String,
    #[arg(long, value_parser = parse_rational)]
    pub budget1: Q,
    #[arg(long, value_parser = parse_rational)]
    pub energy: Option<Q>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub start: Option<String>,
}

fn parse_tie(s: &str) -> std::result::Result<TieRule, String> {
    TieRule::parse(s).ok_or_else(|| format!("unknown tie rule {s}"))
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err("the tolerance must be a positive number".into()),
    }
}

fn parse_rational(s: &str) -> std::result::Result<Q, String> {
    parse_q(s).ok_or_else(|| format!("not a rational number: {s}"))
}

fn parse_player(s: &str) -> std::result::Result<Player, String> {
    match s {
        "1" | "min" => Ok(Player::One),
        "2" | "max" => Ok(Player::Two),
        _ => Err("expected min, max, 1 or 2".into()),
    }
}

fn parse_seed_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or("expected a range a..b")?;
    let a: u64 = a.parse().map_err(|_| "bad range start")?;
    let b: u64 = b.parse().map_err(|_| "bad range end")?;
    if b <= a {
        return Err("the seed range is empty".into());
    }
    Ok((a, b))
}

#[derive(Clone, Debug)]
pub struct MonitorSet(pub Vec<MonitorId>);

fn parse_monitors(s: &str) -> std::result::Result<MonitorSet, String> {
    if s == "all" {
        return Ok(MonitorSet(MonitorId::ALL.to_vec()));
    }
    let ids = s.split(',').map(|m| MonitorId::parse(m.trim()).ok_or_else(|| format!("unknown monitor {m}"))).collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(MonitorSet(ids))
}

/// `name[:key=value,...]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl StrategySpec {
    pub fn parse(s: &str) -> Result<StrategySpec> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = BTreeMap::new();
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("strategy parameter {kv} needs key=value")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let known: &[&str] = match name {
            "random" => &["moves", "seed"],
            "greedy" => &["moves", "fraction"],
            "allin" => &["moves"],
            "richman" => &["cap"],
            "parity" => &[],
            "min-mp" => &["delta", "base"],
            "max-recurrent" | "max-general" | "max-mp" => &[],
            "tit-for-tat" => &[],
            _ => return Err(usage(format!("unknown strategy {name}"))),
        };
        if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(usage(format!("strategy {name} has no parameter {k}")));
        }
        Ok(StrategySpec { name: name.to_string(), params })
    }

    fn moves(&self, default: MoveRule) -> Result<MoveRule> {
        match self.params.get("moves").map(String::as_str) {
            None => Ok(default),
            Some("uniform") => Ok(MoveRule::Uniform),
            Some("max") => Ok(MoveRule::MaxWeight),
            Some("min") => Ok(MoveRule::MinWeight),
            Some(m) => Err(usage(format!("unknown move rule {m}"))),
        }
    }

    fn rational(&self, key: &str) -> Result<Option<Q>> {
        self.params.get(key).map(|v| parse_q(v).ok_or_else(|| usage(format!("{key}={v} is not a rational")))).transpose()
    }
}

/// Usage errors exit with 2; they are carried as a parse error on line 0.
fn usage(msg: String) -> Error {
    Error::Parse { line: 0, msg }
}

/// A strategy ready to play, plus the initial energy it asks for.
pub struct Built {
    pub strategy: Box<dyn Strategy>,
    pub energy: Option<Q>,
}

/// Builds a strategy for `player`, who holds `budget` at `start`.
pub fn build_strategy(arena: &Arena, spec: &StrategySpec, player: Player, budget: &Q, start: usize, energy: &Q, seed: u64) -> Result<Built> {
    let default_moves = if player == Player::One { MoveRule::MinWeight } else { MoveRule::MaxWeight };
    let plain = |s: Box<dyn Strategy>| Ok(Built { strategy: s, energy: None });
    match spec.name.as_str() {
        "random" => {
            let seed = match spec.params.get("seed") {
                Some(s) => s.parse().map_err(|_| usage(format!("seed={s} is not an integer")))?,
                None => seed.wrapping_mul(2).wrapping_add(player.index() as u64),
            };
            plain(Box::new(RandomBidder::new(seed, spec.moves(default_moves)?)))
        }
        "greedy" => {
            let fraction = spec.rational("fraction")?.map_or(0.5, |f| q_to_f64(&f));
            plain(Box::new(Greedy::new(fraction, spec.moves(default_moves)?)))
        }
        "allin" => plain(Box::new(AllIn::new(spec.moves(default_moves)?))),
        "richman" => {
            let cap = spec.params.get("cap").map_or(Ok(10_000), |c| c.parse().map_err(|_| usage(format!("cap={c} is not an integer"))))?;
            let rich = as_richman(arena)?;
            if rich.n() != arena.n() {
                return Err(Error::Domain("convert reachability games with `reduce --to=richman` first".into()));
            }
            let rv = richman_exact(arena)?;
            plain(Box::new(richman_winner_strategy(arena, &rv, player, budget, start, cap)?))
        }
        "parity" => plain(Box::new(parity_memoryless_strategy(arena, player, start, budget)?)),
        "min-mp" => {
            let delta = spec.rational("delta")?.unwrap_or_else(|| q(1, 10));
            let base = match spec.params.get("base") {
                Some(b) => arena.require(b)?,
                None => start,
            };
            plain(Box::new(min_mp_strategy(arena, base, budget, energy, &delta)?))
        }
        "max-recurrent" | "max-general" | "max-mp" => {
            let s = match spec.name.as_str() {
                "max-recurrent" => max_recurrent_strategy(arena, budget)?,
                "max-general" => max_general_strategy(arena, budget)?,
                _ => max_recurrent_strategy(arena, budget).or_else(|_| max_general_strategy(arena, budget))?,
            };
            let k = qi(s.initial_energy() as i64);
            Ok(Built { strategy: Box::new(s), energy: Some(k) })
        }
        "tit-for-tat" => plain(Box::new(tit_for_tat_strategy(arena)?)),
        other => Err(usage(format!("unknown strategy {other}"))),
    }
}

fn load(path: &str, tie: Option<TieRule>) -> Result<Arena> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {path}: {e}")))?;
    let mut arena = load_arena(&text)?;
    if let Some(t) = tie {
        arena.tiebreak = t;
    }
    Ok(arena)
}

fn vertex_or(arena: &Arena, name: &Option<String>, default: usize) -> Result<usize> {
    match name {
        Some(n) => arena.require(n),
        None => Ok(default),
    }
}

fn player_budget(player: Player, budget1: &Q) -> Q {
    match player {
        Player::One => budget1.clone(),
        Player::Two => Q::from_integer(1.into()) - budget1,
    }
}

fn check_budget1(b: &Q) -> Result<()> {
    if *b < qi(0) || *b > qi(1) {
        return Err(Error::Domain("budget1 must lie in [0, 1]".into()));
    }
    Ok(())
}

struct Out<'a> {
    w: &'a mut dyn Write,
    json: bool,
}

impl Out<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.w, "{}", s.as_ref()).map_err(|e| Error::Internal(e.to_string()))
    }

    fn json(&mut self, v: Value) -> Result<()> {
        self.line(v.to_string())
    }
}

/// Runs the command line and returns the exit code.
pub fn run(args: Vec<String>, stdout: &mut dyn Write, stdin: &mut dyn BufRead, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
            } else {
                let _ = write!(stdout, "{e}");
            }
            return code;
        }
    };
    let mut out = Out { w: stdout, json: cli.json };
    match dispatch(&cli, &mut out, stdin, stderr) {
        Ok(()) => 0,
        Err(e) => {
            match e {
                Error::Parse { line: 0, msg } => {
                    let _ = writeln!(stderr, "error: {msg}");
                    2
                }
                e => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut Out, stdin: &mut dyn BufRead, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Solve { file, exact, tol, rounds: None } => solve(&load(file, cli.tiebreak)?, *exact, *tol, out),
        Command::Solve { file, rounds: Some(k), .. } => {
            let arena = load(file, cli.tiebreak)?;
            let rich = as_richman(&arena)?;
            value_rows(&arena, &richman_iterate(&rich, *k)?[..arena.n()], true, out)
        }
        Command::Classify { file } => classify(&load(file, cli.tiebreak)?, out),
        Command::Thresholds { file } => thresholds(&load(file, cli.tiebreak)?, out),
        Command::Strategy(a) => strategy_cmd(&load(&a.file, cli.tiebreak)?, a, out),
        Command::Simulate(a) => simulate(&load(&a.file, cli.tiebreak)?, a, out),
        Command::Play(a) => play(&load(&a.file, cli.tiebreak)?, a, out, stdin, stderr),
        Command::Oracle { file, grid, horizon, samples, seed, budget1, rounds, start } => {
            let arena = load(file, cli.tiebreak)?;
            if arena.objective == ObjectiveKind::Parity {
                check_budget1(budget1)?;
                let start = vertex_or(&arena, start, 0)?;
                let i = (budget1 * qi(*grid as i64)).floor().to_integer();
                let i = usize::try_from(i).map_err(|_| Error::Domain("budget1 out of range".into()))?;
                let p = parity_probe(&arena, *grid as usize, *horizon as usize, *rounds, start, i)?;
                return if out.json {
                    out.json(serde_json::to_value(&p).map_err(|e| Error::Internal(e.to_string()))?)
                } else {
                    out.line(format!(
                        "top parity {} owned by player {}; reaches from all: {}; winner: {}; sample play: {} rounds, {} goal visits, tail max parity {}",
                        p.top_parity,
                        p.owner.number(),
                        p.reaches_from_all,
                        p.winner.map_or("undecided".into(), |w| w.number().to_string()),
                        p.rounds,
                        p.goal_visits,
                        p.tail_max_parity
                    ))
                };
            }
            oracle(&arena, *grid as usize, *horizon as usize, *samples, *seed, out)
        }
        Command::Reduce { file, to } => reduce(&load(file, cli.tiebreak)?, to, out),
        Command::Unwind { file, k, cycle, accepting } => {
            let arena = load(file, cli.tiebreak)?;
            let cycle = cycle.iter().map(|v| arena.require(v)).collect::<Result<Vec<_>>>()?;
            let accepting = accepting.iter().map(|v| arena.require(v)).collect::<Result<Vec<_>>>()?;
            let un = unwind_buchi(&arena, &accepting, &cycle, *k as usize)?;
            emit_arena(&un, out)
        }
    }
}

fn value_rows(arena: &Arena, values: &[Q], exact: bool, out: &mut Out) -> Result<()> {
    for (v, x) in values.iter().enumerate() {
        let shown = if exact { fmt_q(x) } else { fmt_f64(q_to_f64(x)) };
        if out.json {
            out.json(json!({"vertex": arena.name(v), "threshold": shown}))?;
        } else {
            out.line(format!("{}\t{}", arena.name(v), shown))?;
        }
    }
    Ok(())
}

fn solve(arena: &Arena, exact: bool, tol: f64, out: &mut Out) -> Result<()> {
    match arena.objective {
        ObjectiveKind::Richman | ObjectiveKind::Reachability => {
            let rich = as_richman(arena)?;
            if exact {
                let rv = richman_exact(&rich)?;
                value_rows(arena, &rv.values[..arena.n()], true, out)
            } else {
                let ssg = build_ssg(&rich)?;
                let val = solve_ssg(&ssg, tol)?;
                for v in 0..arena.n() {
                    let r = 1.0 - val[ssg.entry[v]];
                    if out.json {
                        out.json(json!({"vertex": arena.name(v), "threshold": fmt_f64(r)}))?;
                    } else {
                        out.line(format!("{}\t{}", arena.name(v), fmt_f64(r)))?;
                    }
                }
                Ok(())
            }
        }
        ObjectiveKind::Parity => value_rows(arena, &parity_thresholds(arena)?.values, exact, out),
        ObjectiveKind::MeanPayoff => value_rows(arena, &mp_thresholds(arena)?.values, exact, out),
    }
}

fn thresholds(arena: &Arena, out: &mut Out) -> Result<()> {
    match arena.objective {
        ObjectiveKind::Parity => value_rows(arena, &parity_thresholds(arena)?.values, true, out),
        ObjectiveKind::MeanPayoff => value_rows(arena, &mp_thresholds(arena)?.values, true, out),
        _ => solve(arena, true, 1e-9, out),
    }
}

fn names(arena: &Arena, vs: &[usize]) -> Vec<String> {
    vs.iter().map(|&v| arena.name(v).to_string()).collect()
}

fn classify(arena: &Arena, out: &mut Out) -> Result<()> {
    match arena.objective {
        ObjectiveKind::Parity => {
            for c in classify_bsccs(arena)? {
                let vs = names(arena, &c.vertices);
                if out.json {
                    out.json(json!({"component": vs, "winner": c.winner.number(), "witness": arena.name(c.witness)}))?;
                } else {
                    out.line(format!("component {{{}}} winner={} witness={}", vs.join(","), c.winner.number(), arena.name(c.witness)))?;
                }
            }
            Ok(())
        }
        ObjectiveKind::MeanPayoff => {
            for (c, class) in classify_bottoms(arena)? {
                let vs = names(arena, &c);
                let w: Vec<(String, String)> = c.iter().zip(&class.all_w).map(|(&v, x)| (arena.name(v).to_string(), fmt_q(x))).collect();
                let witness = arena.name(c[class.witness]).to_string();
                if out.json {
                    let table: serde_json::Map<String, Value> = w.iter().map(|(k, x)| (k.clone(), json!(x))).collect();
                    out.json(json!({"component": vs, "tau": class.tau, "witness": witness, "W": table}))?;
                } else {
                    out.line(format!("component {{{}}} tau={} witness={}", vs.join(","), class.tau, witness))?;
                    for (name, x) in w {
                        out.line(format!("  W({name}) = {x}"))?;
                    }
                }
            }
            Ok(())
        }
        other => Err(Error::Domain(format!("classify needs a parity or mean-payoff game, got {}", other.keyword()))),
    }
}

fn default_kind(arena: &Arena, player: Player) -> &'static str {
    match (arena.objective, player) {
        (ObjectiveKind::MeanPayoff, Player::One) => "min-mp",
        (ObjectiveKind::MeanPayoff, Player::Two) => "max-mp",
        (ObjectiveKind::Parity, _) => "parity",
        _ => "richman",
    }
}

fn params_json(p: &StrategyParams) -> Value {
    serde_json::to_value(p).unwrap_or(Value::Null)
}

fn strategy_cmd(arena: &Arena, a: &StrategyArgs, out: &mut Out) -> Result<()> {
    let start = vertex_or(arena, &a.start, 0)?;
    let spec = StrategySpec::parse(a.kind.as_deref().unwrap_or(default_kind(arena, a.player)))?;
    let energy = a.energy.clone().unwrap_or_else(|| qi(0));
    let built = build_strategy(arena, &spec, a.player, &a.budget, start, &energy, 0)?;
    let energy = built.energy.clone().unwrap_or(energy);
    let params = built.strategy.params();
    if out.json {
        out.json(json!({"type": "params", "strategy": built.strategy.name(), "params": params_json(&params)}))?;
    } else {
        out.line(format!("strategy {}", built.strategy.name()))?;
        if let Value::Object(m) = params_json(&params) {
            for (k, v) in m {
                out.line(format!("  {k} = {}", v.as_str().map_or_else(|| v.to_string(), str::to_string)))?;
            }
        }
        out.line("vertex\tbid\tedge\tto")?;
    }
    let budget = Amount::from_q(&a.budget);
    for v in 0..arena.n() {
        if arena.out(v).is_empty() {
            continue;
        }
        let mut fresh = build_strategy(arena, &spec, a.player, &a.budget, start, &energy, 0)?.strategy;
        let view = View { arena, round: 0, vertex: v, me: a.player, budget, energy: &energy };
        let Action { bid, edge } = fresh.act(&view);
        let e = arena.edge(edge);
        if out.json {
            out.json(json!({"type": "bid", "vertex": arena.name(v), "bid": bid, "edge": e.id, "to": arena.name(e.dst)}))?;
        } else {
            out.line(format!("{}\t{}\t{}\t{}", arena.name(v), bid, e.id, arena.name(e.dst)))?;
        }
    }
    Ok(())
}

fn make_pair(arena: &Arena, a: &SimArgs, start: usize, seed: u64) -> Result<(Built, Built)> {
    let s1 = StrategySpec::parse(&a.p1)?;
    let s2 = StrategySpec::parse(&a.p2)?;
    let probe = a.energy.clone().unwrap_or_else(|| qi(0));
    let b1 = build_strategy(arena, &s1, Player::One, &player_budget(Player::One, &a.budget1), start, &probe, seed)?;
    let b2 = build_strategy(arena, &s2, Player::Two, &player_budget(Player::Two, &a.budget1), start, &probe, seed)?;
    Ok((b1, b2))
}

fn initial_energy(a: &Option<Q>, b1: &Built, b2: &Built) -> Q {
    a.clone().or_else(|| b1.energy.clone()).or_else(|| b2.energy.clone()).unwrap_or_else(|| qi(0))
}

fn simulate(arena: &Arena, a: &SimArgs, out: &mut Out) -> Result<()> {
    check_budget1(&a.budget1)?;
    let start = vertex_or(arena, &a.start, 0)?;
    let cfg = EpisodeConfig { horizon: a.horizon, monitors: a.monitors.0.clone(), tail_window: 0, keep_records: a.seeds.is_none() && !a.summary_only };
    // Strategies whose construction depends on the energy are rebuilt once it is known.
    let (b1, b2) = make_pair(arena, a, start, a.seed)?;
    let energy = initial_energy(&a.energy, &b1, &b2);
    let budget1 = Amount::from_q(&a.budget1);
    let Some((lo, hi)) = a.seeds else {
        let a2 = SimArgs { energy: Some(energy.clone()), ..a.clone() };
        let (mut b1, mut b2) = make_pair(arena, &a2, start, a.seed)?;
        let init = GameState::new(start, budget1, energy);
        let trace = run_episode(arena, b1.strategy.as_mut(), b2.strategy.as_mut(), init, &cfg)?;
        return print_trace(arena, &trace, a.summary_only, out);
    };
    let a2 = SimArgs { energy: Some(energy.clone()), ..a.clone() };
    let make = |seed: u64| -> Result<(Box<dyn Strategy>, Box<dyn Strategy>)> {
        let (b1, b2) = make_pair(arena, &a2, start, seed)?;
        Ok((b1.strategy, b2.strategy))
    };
    let batch = BatchConfig { seeds: (lo..hi).collect(), init: GameState::new(start, budget1, energy), episode: cfg };
    let (traces, report) = run_batch(arena, &make, &batch)?;
    for (seed, t) in (lo..hi).zip(&traces) {
        let mut s = summary_json(arena, t);
        s.as_object_mut().unwrap().insert("seed".into(), json!(seed));
        emit_summary(arena, t, s, out)?;
    }
    if out.json {
        let mut r = serde_json::to_value(&report).unwrap();
        r.as_object_mut().unwrap().insert("type".into(), json!("report"));
        out.json(r)
    } else {
        out.line(format!(
            "episodes={} aborted={} hit_zero={} mean_payoff[min/avg/max]={}/{}/{}",
            report.episodes,
            report.aborted,
            report.hit_zero,
            report.mean_payoff_min.map_or("-".into(), fmt_f64),
            report.mean_payoff_avg.map_or("-".into(), fmt_f64),
            report.mean_payoff_max.map_or("-".into(), fmt_f64),
        ))?;
        for (k, m) in &report.monitors {
            out.line(format!("  {k}: {}/{} passed", m.checked - m.failed, m.checked))?;
        }
        Ok(())
    }
}

fn emit_summary(arena: &Arena, t: &EpisodeTrace, s: Value, out: &mut Out) -> Result<()> {
    if out.json {
        return out.json(s);
    }
    let sm = &t.summary;
    out.line(format!(
        "{} vs {}: rounds={} energy[min/max]={}/{} hit_zero={} final={} mean_payoff={}{}",
        t.names[0],
        t.names[1],
        sm.rounds,
        fmt_q(&sm.min_energy),
        fmt_q(&sm.max_energy),
        sm.hit_zero,
        arena.name(sm.final_vertex),
        sm.mean_payoff.as_ref().map_or("-".into(), fmt_q),
        sm.absorbed.map_or(String::new(), |p| format!(" absorbed={}", p.number())),
    ))?;
    for (id, v) in &t.verdicts {
        let status = if v.passed() { "PASS".to_string() } else { format!("FAIL ({})", v.first_failure.clone().unwrap_or_default()) };
        out.line(format!("  {}: {}/{} {}", id.key(), v.checked - v.failed, v.checked, status))?;
    }
    if let Some(a) = &t.abort {
        out.line(format!("  aborted in round {}: player {}: {}", a.round, a.player.number(), a.reason))?;
    }
    Ok(())
}

fn print_trace(arena: &Arena, t: &EpisodeTrace, summary_only: bool, out: &mut Out) -> Result<()> {
    if out.json && !summary_only {
        let text = trace_jsonl(arena, t);
        return out.line(text.trim_end());
    }
    if !summary_only {
        for r in &t.records {
            out.line(format!(
                "{}\t{}\t{} {}\t{}\t{} -> {}\t{} {}\t{}",
                r.round,
                arena.name(r.vertex),
                r.bids[0],
                r.bids[1],
                r.winner.number(),
                arena.edge(r.edge).id,
                arena.name(r.dst),
                r.budgets[0],
                r.budgets[1],
                fmt_q(&r.energy)
            ))?;
        }
    }
    emit_summary(arena, t, summary_json(arena, t), out)
}

/// Reads `bid edge` lines from a shared input, re-prompting until legal.
struct Human {
    input: Arc<Mutex<Vec<String>>>,
    prompts: Arc<Mutex<Vec<String>>>,
}

impl Strategy for Human {
    fn name(&self) -> String {
        "human".into()
    }

    fn act(&mut self, view: &View) -> Action {
        let arena = view.arena;
        let choices: Vec<String> = arena.out(view.vertex).iter().map(|&e| format!("{} (to {})", arena.edge(e).id, arena.name(arena.edge(e).dst))).collect();
        let mut prompts = self.prompts.lock().unwrap();
        prompts.push(format!(
            "round {} at {}: budget {}, energy {}; enter `bid edge` with edge one of {}",
            view.round,
            arena.name(view.vertex),
            view.budget,
            fmt_q(view.energy),
            choices.join(", ")
        ));
        loop {
            let Some(line) = self.input.lock().unwrap().pop() else {
                prompts.push("input ended: bidding 0 on the first edge".into());
                return Action { bid: Amount::ZERO, edge: arena.out(view.vertex)[0] };
            };
            match parse_move(view, &line) {
                Ok(a) => return a,
                Err(msg) => prompts.push(format!("illegal: {msg}; try again")),
            }
        }
    }
}

fn parse_move(view: &View, line: &str) -> std::result::Result<Action, String> {
    let mut parts = line.split_whitespace();
    let bid = parts.next().ok_or("empty line")?;
    let bid = parse_q(bid).ok_or_else(|| format!("{bid} is not a number"))?;
    let bid = Amount::from_q(&bid);
    if bid.is_negative() || bid > view.budget {
        return Err(format!("the bid must lie between 0 and {}", view.budget));
    }
    let arena = view.arena;
    let out = arena.out(view.vertex);
    let edge = match parts.next() {
        None if out.len() == 1 => out[0],
        None => return Err("name an edge".into()),
        Some(name) => *out
            .iter()
            .find(|&&e| arena.edge(e).id == name || arena.name(arena.edge(e).dst) == name)
            .ok_or_else(|| format!("{name} is not an edge leaving {}", arena.name(view.vertex)))?,
    };
    Ok(Action { bid, edge })
}

fn play(arena: &Arena, a: &PlayArgs, out: &mut Out, stdin: &mut dyn BufRead, stderr: &mut dyn Write) -> Result<()> {
    check_budget1(&a.budget1)?;
    let start = vertex_or(arena, &a.start, 0)?;
    let machine = a.side.other();
    let spec = StrategySpec::parse(&a.against)?;
    let probe = a.energy.clone().unwrap_or_else(|| qi(0));
    let built = build_strategy(arena, &spec, machine, &player_budget(machine, &a.budget1), start, &probe, a.seed)?;
    let energy = a.energy.clone().or(built.energy.clone()).unwrap_or_else(|| qi(0));
    let mut bot = build_strategy(arena, &spec, machine, &player_budget(machine, &a.budget1), start, &energy, a.seed)?.strategy;
    // Lines are consumed from the back.
    let mut lines: Vec<String> = stdin.lines().map_while(std::result::Result::ok).filter(|l| !l.trim().is_empty()).collect();
    lines.reverse();
    let prompts = Arc::new(Mutex::new(vec![]));
    let mut human = Human { input: Arc::new(Mutex::new(lines)), prompts: prompts.clone() };
    let init = GameState::new(start, Amount::from_q(&a.budget1), energy);
    let cfg = EpisodeConfig::new(a.horizon);
    let trace = if a.side == Player::One {
        run_episode(arena, &mut human, bot.as_mut(), init, &cfg)?
    } else {
        run_episode(arena, bot.as_mut(), &mut human, init, &cfg)?
    };
    for p in prompts.lock().unwrap().iter() {
        let _ = writeln!(stderr, "{p}");
    }
    if out.json {
        for r in &trace.records {
            out.json(record_json(arena, r))?;
        }
        out.json(summary_json(arena, &trace))
    } else {
        print_trace(arena, &trace, false, out)
    }
}

fn oracle(arena: &Arena, grid: usize, horizon: usize, samples: Option<u64>, seed: u64, out: &mut Out) -> Result<()> {
    let rich = as_richman(arena)?;
    let tab = discrete_backward_induction(&rich, grid, horizon)?;
    let rv = match samples {
        Some(_) => Some(richman_exact(&rich)?),
        None => None,
    };
    for v in 0..arena.n() {
        let bracket = tab.bracket(v);
        let mc = match (&rv, samples) {
            (Some(rv), Some(k)) => Some(monte_carlo_random_turn(&rich, &rv.policy, v, WalkKind::Absorption, k, seed, MAX_WALK)?),
            _ => None,
        };
        if out.json {
            let mut o = json!({
                "vertex": arena.name(v),
                "lower": bracket.as_ref().map(|b| fmt_q(&b.0)),
                "upper": bracket.as_ref().map(|b| fmt_q(&b.1)),
            });
            if let Some(m) = &mc {
                o.as_object_mut().unwrap().insert("monte_carlo".into(), serde_json::to_value(m).unwrap());
            }
            out.json(o)?;
        } else {
            let b = bracket.map_or("above 1".to_string(), |(lo, hi)| format!("[{}, {}]", fmt_q(&lo), fmt_q(&hi)));
            let m = mc.map_or(String::new(), |m| {
                format!("\tmc {} ± {}", fmt_f64(m.mean), m.stderr.map_or("?".into(), fmt_f64))
            });
            out.line(format!("{}\t{}{}", arena.name(v), b, m))?;
        }
    }
    Ok(())
}

fn emit_arena(arena: &Arena, out: &mut Out) -> Result<()> {
    let text = arena.to_text();
    if out.json {
        out.json(json!({"type": "arena", "text": text}))
    } else {
        out.line(text.trim_end())
    }
}

fn reduce(arena: &Arena, to: &str, out: &mut Out) -> Result<()> {
    match to {
        "ssg" => {
            let rich = as_richman(arena)?;
            let ssg = build_ssg(&rich)?;
            let text = ssg.to_text();
            if out.json {
                out.json(json!({"type": "ssg", "text": text}))
            } else {
                out.line(text.trim_end())
            }
        }
        _ => {
            let red = match arena.objective {
                ObjectiveKind::Reachability => reach_to_richman(arena)?,
                ObjectiveKind::Richman => arena.clone(),
                ObjectiveKind::Parity => collapse_to_sinks(arena, &parity_winner_map(arena)?)?.arena,
                ObjectiveKind::MeanPayoff => {
                    let mut winner_of = vec![None; arena.n()];
                    for (c, class) in classify_bottoms(arena)? {
                        for v in c {
                            winner_of[v] = Some(if class.tau == 0 { Player::One } else { Player::Two });
                        }
                    }
                    collapse_to_sinks(arena, &winner_of)?.arena
                }
            };
            emit_arena(&red, out)
        }
    }
}
