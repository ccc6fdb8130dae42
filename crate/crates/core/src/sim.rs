//! The referee: plays two strategies against each other, enforces the
//! bidding rules, records every round and evaluates invariant monitors.
//!
//! The winner of a bidding pays its bid to the loser, so budgets always sum
//! to 1. The smaller budget is kept at full relative precision and the larger
//! is stored as its complement.

use crate::amount::Amount;
use crate::arena::{Arena, ObjectiveKind, Player};
use crate::error::{domain, Result};
use crate::num::{fmt_q, q_to_f64, Q};
use crate::strategy::{Action, Probe, RoundRecord, Strategy, View};
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Clone, Debug, PartialEq)]
pub struct GameState {
    pub vertex: usize,
    pub budgets: [Amount; 2],
    pub energy: Q,
    pub round: u64,
}

impl GameState {
    pub fn new(vertex: usize, budget1: Amount, energy: Q) -> GameState {
        GameState { vertex, budgets: [budget1, Amount::one() - budget1], energy, round: 0 }
    }

    fn validate(&self, arena: &Arena) -> Result<()> {
        if self.vertex >= arena.n() {
            return domain("start vertex out of range");
        }
        let [a, b] = self.budgets;
        if a.is_negative() || b.is_negative() || a > Amount::one() || b > Amount::one() {
            return domain("budgets must lie in [0, 1]");
        }
        if ((a + b) - Amount::one()).abs().to_f64() > CONSERVATION_TOL {
            return domain("budgets must sum to 1");
        }
        Ok(())
    }
}

pub const CONSERVATION_TOL: f64 = 1e-12;
const MONITOR_TOL: f64 = 1e-9;
const BID_ULPS: f64 = 1.0 / (1u64 << 50) as f64;

/// Observers attached to an episode, named by the property they check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorId {
    /// Bids within budget, edges leave the current vertex.
    Legality,
    /// Budgets sum to 1 after every round.
    BudgetConservation,
    /// Min's threshold potential drops by at least the energy plus `N` times its payment.
    MinPotential,
    /// Min's budget stays above `(energy + b_max) / N` and the energy below `N - b_max`.
    MinBudgetFloor,
    /// Max's scaled potential is paid for in the current currency.
    MaxPotential,
    /// Max's budget meets the block requirement whenever the currency changes.
    CurrencyInvariant,
    /// Tit-for-tat: energy equals the unmatched bids, at most `⌈1/b⌉` of them.
    MatchingEnergy,
}

impl MonitorId {
    pub const ALL: [MonitorId; 7] = [
        MonitorId::Legality,
        MonitorId::BudgetConservation,
        MonitorId::MinPotential,
        MonitorId::MinBudgetFloor,
        MonitorId::MaxPotential,
        MonitorId::CurrencyInvariant,
        MonitorId::MatchingEnergy,
    ];

    pub fn key(self) -> &'static str {
        match self {
            MonitorId::Legality => "legality",
            MonitorId::BudgetConservation => "budget_conservation",
            MonitorId::MinPotential => "min_potential",
            MonitorId::MinBudgetFloor => "min_budget_floor",
            MonitorId::MaxPotential => "max_potential",
            MonitorId::CurrencyInvariant => "currency_invariant",
            MonitorId::MatchingEnergy => "matching_energy",
        }
    }

    pub fn parse(s: &str) -> Option<MonitorId> {
        MonitorId::ALL.into_iter().find(|m| m.key() == s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Verdict {
    pub checked: u64,
    pub failed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Verdict {
    fn record(&mut self, ok: bool, why: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(why());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

/// Root-to-root segments of a Max play, compared in both orientations of the
/// scaled-energy inequality.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OrientationReport {
    pub segments: u64,
    /// `E >= z · E^z` held.
    pub energy_dominates_scaled: u64,
    /// `E^z <= z · E` held.
    pub scaled_below_energy: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Abort {
    pub round: u64,
    pub player: Player,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub rounds: u64,
    #[serde(serialize_with = "ser_q")]
    pub min_energy: Q,
    #[serde(serialize_with = "ser_q")]
    pub max_energy: Q,
    /// Energy was at most 0 after some round.
    pub hit_zero: bool,
    pub final_vertex: usize,
    pub final_budgets: [Amount; 2],
    /// Whose sink ended the play, if any.
    pub absorbed: Option<Player>,
    #[serde(serialize_with = "ser_opt_q")]
    pub mean_payoff: Option<Q>,
    /// Smallest prefix mean-payoff over the tail window.
    #[serde(serialize_with = "ser_opt_q")]
    pub tail_mean_payoff: Option<Q>,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

fn ser_opt_q<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(x) => s.serialize_str(&fmt_q(x)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug)]
pub struct EpisodeConfig {
    pub horizon: u64,
    pub monitors: Vec<MonitorId>,
    /// Window (in rounds) for the tail mean-payoff; 0 means the second half.
    pub tail_window: u64,
    /// Store every round. Without records the tail window is measured from
    /// the horizon rather than from the actual play length.
    pub keep_records: bool,
}

impl EpisodeConfig {
    pub fn new(horizon: u64) -> Self {
        EpisodeConfig { horizon, monitors: MonitorId::ALL.to_vec(), tail_window: 0, keep_records: true }
    }
}

#[derive(Clone, Debug)]
pub struct EpisodeTrace {
    pub names: [String; 2],
    pub initial: GameState,
    pub records: Vec<RoundRecord>,
    pub verdicts: BTreeMap<MonitorId, Verdict>,
    pub orientation: Option<OrientationReport>,
    pub abort: Option<Abort>,
    pub summary: Summary,
}

impl EpisodeTrace {
    pub fn verdict(&self, m: MonitorId) -> Option<&Verdict> {
        self.verdicts.get(&m)
    }

    pub fn all_passed(&self) -> bool {
        self.abort.is_none() && self.verdicts.values().all(Verdict::passed)
    }

    /// Energy after `n` rounds (`n = 0` is the initial energy).
    pub fn energy_at(&self, n: usize) -> &Q {
        if n == 0 {
            &self.initial.energy
        } else {
            &self.records[n - 1].energy
        }
    }

    /// Highest parity index seen in the last half of the play.
    pub fn tail_max_parity(&self, arena: &Arena) -> Option<u32> {
        let half = self.records.len() / 2;
        self.records[half..].iter().map(|r| arena.parity(r.dst)).max()
    }
}

/// `E(π^n) / n` for the first `n` rounds.
pub fn prefix_mean_payoff(trace: &EpisodeTrace, n: usize) -> Result<Q> {
    if n == 0 || n > trace.records.len() {
        return domain(format!("prefix length {n} outside 1..={}", trace.records.len()));
    }
    Ok((trace.energy_at(n) - &trace.initial.energy) / Q::from_integer(n.into()))
}

struct Monitors<'a> {
    arena: &'a Arena,
    on: Vec<MonitorId>,
    verdicts: BTreeMap<MonitorId, Verdict>,
    orientation: Option<OrientationReport>,
    /// Running original and scaled energy since the last base visit, per player.
    segment: [Option<(f64, f64)>; 2],
}

impl<'a> Monitors<'a> {
    fn new(arena: &'a Arena, on: &[MonitorId]) -> Self {
        Monitors { arena, on: on.to_vec(), verdicts: BTreeMap::new(), orientation: None, segment: [None, None] }
    }

    fn enabled(&self, m: MonitorId) -> bool {
        self.on.contains(&m)
    }

    fn check(&mut self, m: MonitorId, ok: bool, why: impl FnOnce() -> String) {
        if self.enabled(m) {
            self.verdicts.entry(m).or_default().record(ok, why);
        }
    }

    fn round(&mut self, before: &GameState, rec: &RoundRecord, gained: &Q, pre: &[Probe; 2], post: &[Probe; 2]) {
        let r = rec.round;
        self.check(MonitorId::Legality, true, String::new);
        let drift = ((rec.budgets[0] + rec.budgets[1]) - Amount::one()).abs().to_f64();
        self.check(MonitorId::BudgetConservation, drift <= CONSERVATION_TOL, || format!("round {r}: budgets drift by {drift:e}"));
        let weight_q = &self.arena.edge(rec.edge).weight;
        let weight = q_to_f64(weight_q);
        for p in [Player::One, Player::Two] {
            let i = p.index();
            // Net payment of `p` this round: positive when it won and paid.
            let paid = if rec.winner == p { rec.bids[i] } else { -rec.bids[1 - i] };
            match &pre[i] {
                Probe::Min { active: true, norm, b_max, base, values } => {
                    let entry = |v: usize| if v == *base { &values[values.len() - 1] } else { &values[v] };
                    let lhs = &values[rec.vertex] - entry(rec.dst);
                    let rhs = weight_q + norm * paid.to_q();
                    // Bids are floats rounded from exact values: allow a few ulps.
                    let slack = norm * (paid.abs() * BID_ULPS).to_q();
                    self.check(MonitorId::MinPotential, lhs >= &rhs - slack, || {
                        format!("round {r}: potential drop {} below {}", fmt_q(&lhs), fmt_q(&rhs))
                    });
                    let floor = Amount::from_q(&((&before.energy + b_max) / norm));
                    let budget = before.budgets[i];
                    let cap = norm - b_max;
                    let ok = budget >= floor * (1.0 - MONITOR_TOL) && before.energy <= cap;
                    self.check(MonitorId::MinBudgetFloor, ok, || {
                        format!("round {r}: budget {budget} vs floor {floor}, energy {} vs cap {}", fmt_q(&before.energy), fmt_q(&cap))
                    });
                }
                Probe::Max { currency, z, base, values, weights, inv } => {
                    let entry = |v: usize| if v == *base { values[values.len() - 1] } else { values[v] };
                    let lhs = values[rec.vertex] - entry(rec.dst);
                    let scaled_pay = if currency.is_zero() { 0.0 } else { (paid / *currency).to_f64() };
                    let wz = weights.get(rec.edge).copied().unwrap_or(weight);
                    let rhs = wz - scaled_pay;
                    let tol = MONITOR_TOL * (1.0 + lhs.abs() + rhs.abs());
                    self.check(MonitorId::MaxPotential, lhs <= rhs + tol, || format!("round {r}: scaled potential drop {lhs} above {rhs}"));
                    if let Some(ev) = inv {
                        let ok = ev.budget >= ev.required * (1.0 - MONITOR_TOL);
                        self.check(MonitorId::CurrencyInvariant, ok, || {
                            format!("round {r}: entering block {} with budget {} below {}", ev.block, ev.budget, ev.required)
                        });
                    }
                    if rec.vertex == *base {
                        self.segment[i] = Some((0.0, 0.0));
                    }
                    if let Some((e, ez)) = self.segment[i].as_mut() {
                        *e += weight;
                        *ez += wz;
                        if rec.dst == *base && z.is_finite() {
                            let (e, ez) = (*e, *ez);
                            let rep = self.orientation.get_or_insert_with(OrientationReport::default);
                            rep.segments += 1;
                            let slack = MONITOR_TOL * (1.0 + e.abs() + ez.abs());
                            rep.energy_dominates_scaled += (e >= z * ez - slack) as u64;
                            rep.scaled_below_energy += (ez <= z * e + slack) as u64;
                            self.segment[i] = None;
                        }
                    }
                }
                _ => {}
            }
            if let Probe::TitForTat { unmatched, matching, free_wins } = &post[i] {
                let expected = Q::from_integer((*unmatched as i64 - *free_wins as i64).into());
                self.check(MonitorId::MatchingEnergy, *gained == expected, || {
                    format!("round {r}: energy change {} with {unmatched} unmatched bids and {free_wins} free wins", fmt_q(gained))
                });
                if let Some(b) = matching {
                    let bound = (Amount::one() / *b).to_f64().ceil();
                    self.check(MonitorId::MatchingEnergy, (*unmatched as f64) <= bound, || {
                        format!("round {r}: {unmatched} unmatched bids while matching {b}")
                    });
                }
            }
        }
    }
}

fn legal(arena: &Arena, state: &GameState, p: Player, a: &Action) -> std::result::Result<(), String> {
    let budget = state.budgets[p.index()];
    if a.bid.is_negative() {
        return Err(format!("negative bid {}", a.bid));
    }
    if a.bid > budget {
        return Err(format!("bid {} exceeds budget {}", a.bid, budget));
    }
    if !arena.out(state.vertex).contains(&a.edge) {
        return Err(format!("edge {} does not leave {}", a.edge, arena.name(state.vertex)));
    }
    Ok(())
}

fn terminal(arena: &Arena, v: usize) -> Option<Option<Player>> {
    let vx = arena.vertex(v);
    match arena.objective {
        ObjectiveKind::Richman if vx.target.is_some() => Some(vx.target),
        ObjectiveKind::Reachability if vx.target.is_some() => Some(Some(Player::One)),
        _ if arena.out(v).is_empty() => Some(None),
        _ => None,
    }
}

/// Plays one episode. Richman and reachability plays stop at a sink.
pub fn run_episode(
    arena: &Arena,
    s1: &mut dyn Strategy,
    s2: &mut dyn Strategy,
    init: GameState,
    cfg: &EpisodeConfig,
) -> Result<EpisodeTrace> {
    if cfg.horizon == 0 {
        return domain("horizon must be at least 1");
    }
    init.validate(arena)?;
    let mut state = init.clone();
    let mut mons = Monitors::new(arena, &cfg.monitors);
    let mut records: Vec<RoundRecord> = Vec::with_capacity(cfg.horizon.min(1 << 20) as usize);
    let mut abort = None;
    let mut absorbed = None;
    let (mut lo, mut hi) = (state.energy.clone(), state.energy.clone());
    let mut hit_zero = false;
    let initial_energy = init.energy.clone();
    let mp_of = |energy: &Q, k: u64| (energy - &initial_energy) / Q::from_integer(k.into());
    let tail_from = if cfg.tail_window == 0 { cfg.horizon - cfg.horizon / 2 } else { cfg.horizon.saturating_sub(cfg.tail_window) }.max(1);
    let mut streamed_tail: Option<Q> = None;
    let mut last_energy = None;
    while state.round < cfg.horizon {
        if let Some(t) = terminal(arena, state.vertex) {
            absorbed = t;
            break;
        }
        let mut actions = [Action { bid: Amount::ZERO, edge: 0 }; 2];
        let mut pre = [Probe::None, Probe::None];
        for p in [Player::One, Player::Two] {
            let view = View { arena, round: state.round, vertex: state.vertex, me: p, budget: state.budgets[p.index()], energy: &state.energy };
            let s: &mut dyn Strategy = if p == Player::One { &mut *s1 } else { &mut *s2 };
            actions[p.index()] = s.act(&view);
            pre[p.index()] = s.probe();
        }
        for p in [Player::One, Player::Two] {
            if let Err(reason) = legal(arena, &state, p, &actions[p.index()]) {
                mons.check(MonitorId::Legality, false, || format!("round {}: player {p}: {reason}", state.round));
                abort = Some(Abort { round: state.round, player: p, reason });
            }
        }
        if abort.is_some() {
            break;
        }
        let [b1, b2] = [actions[0].bid, actions[1].bid];
        let winner = if b1 > b2 {
            Player::One
        } else if b2 > b1 {
            Player::Two
        } else {
            arena.tiebreak.winner(state.round)
        };
        let w = winner.index();
        let pay = actions[w].bid;
        let mut budgets = state.budgets;
        budgets[w] -= pay;
        budgets[1 - w] += pay;
        let small = if budgets[0] <= budgets[1] { 0 } else { 1 };
        budgets[1 - small] = Amount::one() - budgets[small];
        let edge = actions[w].edge;
        let dst = arena.edge(edge).dst;
        let energy = &state.energy + &arena.edge(edge).weight;
        let rec = RoundRecord { round: state.round, vertex: state.vertex, bids: [b1, b2], winner, edge, dst, budgets, energy: energy.clone() };
        s1.observe(&rec, Player::One);
        s2.observe(&rec, Player::Two);
        let post = [s1.probe(), s2.probe()];
        let before = state.clone();
        state = GameState { vertex: dst, budgets, energy, round: state.round + 1 };
        mons.round(&before, &rec, &(&rec.energy - &initial_energy), &pre, &post);
        if state.energy < lo {
            lo = state.energy.clone();
        }
        if state.energy > hi {
            hi = state.energy.clone();
        }
        hit_zero |= !state.energy.is_positive();
        if cfg.keep_records {
            records.push(rec);
        } else {
            let k = state.round - init.round;
            if k >= tail_from {
                let m = mp_of(&state.energy, k);
                if streamed_tail.as_ref().is_none_or(|t| m < *t) {
                    streamed_tail = Some(m);
                }
            }
            last_energy = Some(state.energy.clone());
        }
    }
    if abort.is_none() && absorbed.is_none() {
        if let Some(t) = terminal(arena, state.vertex) {
            absorbed = t;
        }
    }
    let played = state.round - init.round;
    let (mean_payoff, tail_mean_payoff) = if cfg.keep_records {
        let n = records.len();
        let mp = |k: usize| mp_of(&records[k - 1].energy, k as u64);
        let window = if cfg.tail_window == 0 { n / 2 } else { (cfg.tail_window as usize).min(n) };
        ((n > 0).then(|| mp(n)), (n > 0).then(|| ((n - window).max(1)..=n).map(mp).min().unwrap()))
    } else {
        let mean = last_energy.as_ref().map(|e| mp_of(e, played));
        (mean.clone(), streamed_tail.or(mean))
    };
    let summary = Summary {
        rounds: played,
        min_energy: lo,
        max_energy: hi,
        hit_zero,
        final_vertex: state.vertex,
        final_budgets: state.budgets,
        absorbed,
        mean_payoff,
        tail_mean_payoff,
    };
    Ok(EpisodeTrace {
        names: [s1.name(), s2.name()],
        initial: init,
        records,
        verdicts: mons.verdicts,
        orientation: mons.orientation,
        abort,
        summary,
    })
}

/// Re-applies the recorded rounds to the initial state and checks that every
/// stored state is reproduced. Returns the final state.
pub fn replay(arena: &Arena, trace: &EpisodeTrace) -> Result<GameState> {
    let mut state = trace.initial.clone();
    for rec in &trace.records {
        let e = arena.edge(rec.edge);
        if rec.vertex != state.vertex || e.src != state.vertex || e.dst != rec.dst {
            return domain(format!("round {}: recorded move does not fit the state", rec.round));
        }
        let [b1, b2] = rec.bids;
        let winner = if b1 > b2 {
            Player::One
        } else if b2 > b1 {
            Player::Two
        } else {
            arena.tiebreak.winner(state.round)
        };
        if winner != rec.winner {
            return domain(format!("round {}: recorded winner disagrees with the bids", rec.round));
        }
        let w = winner.index();
        let mut budgets = state.budgets;
        budgets[w] -= rec.bids[w];
        budgets[1 - w] += rec.bids[w];
        let small = if budgets[0] <= budgets[1] { 0 } else { 1 };
        budgets[1 - small] = Amount::one() - budgets[small];
        state = GameState { vertex: rec.dst, budgets, energy: &state.energy + &e.weight, round: state.round + 1 };
        if state.budgets != rec.budgets || state.energy != rec.energy {
            return domain(format!("round {}: replayed state differs from the record", rec.round));
        }
    }
    Ok(state)
}

fn verdict_json(v: &BTreeMap<MonitorId, Verdict>) -> Value {
    Value::Object(v.iter().map(|(k, v)| (k.key().to_string(), serde_json::to_value(v).unwrap())).collect())
}

/// One JSON object per round.
pub fn record_json(arena: &Arena, rec: &RoundRecord) -> Value {
    json!({
        "type": "round",
        "round": rec.round,
        "vertex": arena.name(rec.vertex),
        "bids": rec.bids,
        "winner": rec.winner.number(),
        "edge": arena.edge(rec.edge).id,
        "to": arena.name(rec.dst),
        "budgets": rec.budgets,
        "energy": fmt_q(&rec.energy),
    })
}

/// The closing summary object of a trace.
pub fn summary_json(arena: &Arena, trace: &EpisodeTrace) -> Value {
    let mut v = serde_json::to_value(&trace.summary).unwrap();
    let o = v.as_object_mut().unwrap();
    o.insert("type".into(), json!("summary"));
    o.insert("final_vertex".into(), json!(arena.name(trace.summary.final_vertex)));
    o.insert("absorbed".into(), json!(trace.summary.absorbed.map(Player::number)));
    o.insert("players".into(), json!(trace.names));
    o.insert("monitors".into(), verdict_json(&trace.verdicts));
    if let Some(rep) = &trace.orientation {
        o.insert("orientation".into(), serde_json::to_value(rep).unwrap());
    }
    if let Some(a) = &trace.abort {
        o.insert("abort".into(), json!({"round": a.round, "player": a.player.number(), "reason": a.reason}));
    }
    v
}

/// The whole trace as JSON lines: the rounds, then the summary.
pub fn trace_jsonl(arena: &Arena, trace: &EpisodeTrace) -> String {
    let mut out = String::new();
    for rec in &trace.records {
        out.push_str(&record_json(arena, rec).to_string());
        out.push('\n');
    }
    out.push_str(&summary_json(arena, trace).to_string());
    out.push('\n');
    out
}

/// Builds both strategies for one seed.
pub type PairFactory<'a> = dyn Fn(u64) -> Result<(Box<dyn Strategy>, Box<dyn Strategy>)> + Sync + 'a;

pub struct BatchConfig {
    pub seeds: Vec<u64>,
    pub init: GameState,
    pub episode: EpisodeConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MonitorRate {
    pub checked: u64,
    pub failed: u64,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchReport {
    pub episodes: usize,
    pub aborted: usize,
    pub hit_zero: usize,
    pub monitors: BTreeMap<&'static str, MonitorRate>,
    pub mean_payoff_min: Option<f64>,
    pub mean_payoff_max: Option<f64>,
    pub mean_payoff_avg: Option<f64>,
}

/// Worker threads for batches: `BIDGAME_THREADS` if set, else the core count.
pub fn thread_count() -> usize {
    std::env::var("BIDGAME_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Evaluates `f(0..k)` on up to [`thread_count`] threads; results come back in index order.
pub fn parallel_map<T: Send>(k: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = thread_count().min(k);
    if workers <= 1 {
        return (0..k).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..k).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                if j >= k {
                    break;
                }
                let out = f(j);
                *slots[j].lock().unwrap() = Some(out);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

/// Runs one episode per seed, in parallel, and returns the traces in seed
/// order together with the aggregate report.
pub fn run_batch(arena: &Arena, make: &PairFactory<'_>, cfg: &BatchConfig) -> Result<(Vec<EpisodeTrace>, BatchReport)> {
    if cfg.seeds.is_empty() {
        return domain("a batch needs at least one seed");
    }
    let traces = parallel_map(cfg.seeds.len(), |j| {
        make(cfg.seeds[j]).and_then(|(mut a, mut b)| run_episode(arena, a.as_mut(), b.as_mut(), cfg.init.clone(), &cfg.episode))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let report = aggregate(&traces);
    Ok((traces, report))
}

pub fn aggregate(traces: &[EpisodeTrace]) -> BatchReport {
    let mut monitors: BTreeMap<&'static str, MonitorRate> = BTreeMap::new();
    for t in traces {
        for (id, v) in &t.verdicts {
            let m = monitors.entry(id.key()).or_default();
            m.checked += v.checked;
            m.failed += v.failed;
        }
    }
    for m in monitors.values_mut() {
        m.rate = if m.checked == 0 { 1.0 } else { 1.0 - m.failed as f64 / m.checked as f64 };
    }
    let mps: Vec<f64> = traces.iter().filter_map(|t| t.summary.mean_payoff.as_ref().map(q_to_f64)).collect();
    let avg = (!mps.is_empty()).then(|| mps.iter().sum::<f64>() / mps.len() as f64);
    BatchReport {
        episodes: traces.len(),
        aborted: traces.iter().filter(|t| t.abort.is_some()).count(),
        hit_zero: traces.iter().filter(|t| t.summary.hit_zero).count(),
        monitors,
        mean_payoff_min: mps.iter().copied().reduce(f64::min),
        mean_payoff_max: mps.iter().copied().reduce(f64::max),
        mean_payoff_avg: avg,
    }
}
