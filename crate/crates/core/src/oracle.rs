//! Independent ground truth at desk scale.
//!
//! Backward induction over budgets restricted to multiples of `1/D`, and
//! Monte-Carlo estimates of the half-half walk along the extreme edges.
//! Neither uses the fixed-point solvers.

use crate::arena::{Arena, ObjectiveKind, Player};
use crate::error::{domain, Result};
use crate::num::Q;
use crate::sim::parallel_map;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Default bound on table entries.
pub const TABLE_CAP: u64 = 100_000_000;
/// Default walk length after which a Monte-Carlo sample is censored.
pub const MAX_WALK: u64 = 1_000_000;

/// Which player tries to reach which vertices.
#[derive(Clone, Debug)]
pub struct ReachGoal {
    pub player: Player,
    pub goal: Vec<bool>,
    /// Vertices where the reacher has lost for good.
    pub dead: Vec<bool>,
}

impl ReachGoal {
    /// Player 1 reaching its sinks in a Richman game.
    pub fn richman(arena: &Arena) -> Result<ReachGoal> {
        if arena.objective != ObjectiveKind::Richman {
            return domain("the discrete oracle needs a richman game");
        }
        arena.richman_sinks()?;
        let n = arena.n();
        let goal = (0..n).map(|v| arena.vertex(v).target == Some(Player::One)).collect();
        let dead = (0..n).map(|v| arena.vertex(v).target == Some(Player::Two) || arena.out(v).is_empty()).collect();
        Ok(ReachGoal { player: Player::One, goal, dead })
    }

    /// The owner of the highest parity index visiting it.
    pub fn max_parity(arena: &Arena) -> ReachGoal {
        let top = (0..arena.n()).map(|v| arena.parity(v)).max().unwrap_or(0);
        let player = if top % 2 == 1 { Player::One } else { Player::Two };
        let goal = (0..arena.n()).map(|v| arena.parity(v) == top).collect();
        let dead = (0..arena.n()).map(|v| arena.out(v).is_empty()).collect();
        ReachGoal { player, goal, dead }
    }
}

/// `win[t][parity][v][i]`: the reacher, holding `i/D` of the budget with
/// `t` rounds left and the round index of the given parity, can force a
/// visit to the goal.
#[derive(Clone, Debug)]
pub struct DiscreteTable {
    pub grid: usize,
    pub horizon: usize,
    pub reach: ReachGoal,
    n: usize,
    win: Vec<bool>,
}

impl DiscreteTable {
    fn idx(&self, t: usize, par: usize, v: usize, i: usize) -> usize {
        ((t * 2 + par) * self.n + v) * (self.grid + 1) + i
    }

    pub fn wins(&self, t: usize, round: u64, v: usize, i: usize) -> bool {
        self.win[self.idx(t, (round % 2) as usize, v, i)]
    }

    /// Least budget index from which the reacher wins within the horizon
    /// starting at round 0, or `None` if even the whole budget loses.
    pub fn threshold_index(&self, v: usize) -> Option<usize> {
        (0..=self.grid).find(|&i| self.wins(self.horizon, 0, v, i))
    }

    /// `[lo, hi]` containing the continuous threshold up to discretization.
    pub fn bracket(&self, v: usize) -> Option<(Q, Q)> {
        let d = self.grid as i64;
        self.threshold_index(v).map(|i| {
            let i = i as i64;
            (crate::num::q((i - 1).max(0), d), crate::num::q(i, d))
        })
    }

    /// More budget never hurts the reacher.
    pub fn is_monotone(&self) -> bool {
        (0..=self.horizon).all(|t| {
            (0..2).all(|p| (0..self.n).all(|v| (1..=self.grid).all(|i| !self.win[self.idx(t, p, v, i - 1)] || self.win[self.idx(t, p, v, i)])))
        })
    }

    /// The reacher's cheapest winning bid at `(v, i)` over the horizons up to
    /// `deadline` (shortest on ties): `(bid, edge, horizon used)`. Passing
    /// `horizon - 1` as the next deadline guarantees arrival in time. `None`
    /// when no such horizon wins.
    pub fn reacher_action(&self, arena: &Arena, round: u64, v: usize, i: usize, deadline: usize) -> Option<(usize, usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for t in 1..=deadline.min(self.horizon) {
            if !self.wins(t, round, v, i) {
                continue;
            }
            if let Some((b, e)) = self.reacher_bid(arena, round, v, i, t) {
                if best.is_none_or(|(bb, _, _)| b < bb) {
                    best = Some((b, e, t));
                }
                if b == 0 {
                    break;
                }
            }
        }
        best
    }

    fn reacher_bid(&self, arena: &Arena, round: u64, v: usize, i: usize, t: usize) -> Option<(usize, usize)> {
        let x_ties = arena.tiebreak.winner(round) == self.reach.player;
        let delta = usize::from(x_ties);
        let other = self.grid - i;
        let exists = |j: usize| arena.out(v).iter().find(|&&e| self.wins(t - 1, round + 1, arena.edge(e).dst, j)).copied();
        let all = |j: usize| arena.successors(v).all(|d| self.wins(t - 1, round + 1, d, j));
        (0..=i).find_map(|b| {
            let safe = b + delta > other || all(i + b + delta);
            exists(i - b).filter(|_| safe).map(|e| (b, e))
        })
    }

    /// The opponent's bid and edge keeping the reacher out of the goal for
    /// the whole horizon. `None` when the reacher wins anyway.
    pub fn avoider_action(&self, arena: &Arena, round: u64, v: usize, i: usize) -> Option<(usize, usize)> {
        let t = self.horizon;
        if self.wins(t, round, v, i) {
            return None;
        }
        let x_ties = arena.tiebreak.winner(round) == self.reach.player;
        let gap = usize::from(!x_ties);
        let losing_edge = |j: usize| arena.out(v).iter().find(|&&e| !self.wins(t - 1, round + 1, arena.edge(e).dst, j)).copied();
        let reacher_stuck = |j: Option<usize>| j.is_none_or(|j| arena.successors(v).all(|d| !self.wins(t - 1, round + 1, d, j)));
        (0..=self.grid - i).find_map(|b| {
            // The reacher wins the bidding only by bidding at least b + gap.
            let after = (i >= b + gap).then(|| i - b - gap);
            if reacher_stuck(after) {
                losing_edge(i + b).map(|e| (b, e))
            } else {
                None
            }
        })
    }
}

/// Entries a table for this game would need.
pub fn table_size(arena: &Arena, grid: usize, horizon: usize) -> u64 {
    arena.n() as u64 * (grid as u64 + 1) * (horizon as u64 + 1) * 2
}

/// Exact min-max over all bid pairs on the `1/D` grid, for a reachability
/// objective of either player. Bids range over `0..=budget` in grid units;
/// the winner pays the loser, so budgets stay on the grid.
pub fn discrete_reach_table(arena: &Arena, reach: ReachGoal, grid: usize, horizon: usize, cap: u64) -> Result<DiscreteTable> {
    if grid < 2 {
        return domain("the grid needs D >= 2");
    }
    if horizon < 1 {
        return domain("the horizon needs T >= 1");
    }
    let size = table_size(arena, grid, horizon);
    if size > cap {
        return domain(format!("the table would need {size} entries, over the cap of {cap}"));
    }
    let n = arena.n();
    let mut tab = DiscreteTable { grid, horizon, reach, n, win: vec![false; size as usize] };
    for par in 0..2 {
        for v in 0..n {
            for i in 0..=grid {
                let k = tab.idx(0, par, v, i);
                tab.win[k] = tab.reach.goal[v];
            }
        }
    }
    let mut e_row = vec![false; grid + 1];
    let mut a_row = vec![false; grid + 1];
    for t in 1..=horizon {
        for par in 0..2 {
            let next = 1 - par;
            let x_ties = arena.tiebreak.winner(par as u64) == tab.reach.player;
            let delta = usize::from(x_ties);
            for v in 0..n {
                if tab.reach.goal[v] || tab.reach.dead[v] {
                    let won = tab.reach.goal[v];
                    for i in 0..=grid {
                        let k = tab.idx(t, par, v, i);
                        tab.win[k] = won;
                    }
                    continue;
                }
                for j in 0..=grid {
                    e_row[j] = arena.successors(v).any(|d| tab.win[tab.idx(t - 1, next, d, j)]);
                    a_row[j] = arena.successors(v).all(|d| tab.win[tab.idx(t - 1, next, d, j)]);
                }
                for i in 0..=grid {
                    let other = grid - i;
                    let w = (0..=i).any(|b| e_row[i - b] && (b + delta > other || a_row[i + b + delta]));
                    let k = tab.idx(t, par, v, i);
                    tab.win[k] = w;
                }
            }
        }
    }
    Ok(tab)
}

/// Richman thresholds on the grid: Player 1 reaching its sink.
pub fn discrete_backward_induction(arena: &Arena, grid: usize, horizon: usize) -> Result<DiscreteTable> {
    discrete_reach_table(arena, ReachGoal::richman(arena)?, grid, horizon, TABLE_CAP)
}

/// One layer of the table by brute force over every pair of bids; used to
/// cross-check the single-bid search.
pub fn naive_layer(arena: &Arena, tab: &DiscreteTable, t: usize, round: u64) -> Vec<Vec<bool>> {
    let x = tab.reach.player;
    (0..arena.n())
        .map(|v| {
            (0..=tab.grid)
                .map(|i| {
                    if tab.reach.goal[v] || tab.reach.dead[v] {
                        return tab.reach.goal[v];
                    }
                    let other = tab.grid - i;
                    (0..=i).any(|b1| {
                        (0..=other).all(|b2| {
                            let x_wins = b1 > b2 || (b1 == b2 && arena.tiebreak.winner(round) == x);
                            if x_wins {
                                arena.successors(v).any(|d| tab.wins(t - 1, round + 1, d, i - b1))
                            } else {
                                arena.successors(v).all(|d| tab.wins(t - 1, round + 1, d, i + b2))
                            }
                        })
                    })
                })
                .collect()
        })
        .collect()
}

/// Discrete evidence for the winner of a strongly connected parity game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityProbe {
    pub top_parity: u32,
    /// Owner of the top parity index.
    pub owner: Player,
    /// The owner, holding the given budget, forces a visit to the top parity
    /// from every vertex within the horizon.
    pub reaches_from_all: bool,
    /// Rounds of the sample play between the table strategies.
    pub rounds: usize,
    pub goal_visits: usize,
    /// Highest parity index seen in the second half of the sample play.
    pub tail_max_parity: u32,
    /// The owner when it reaches from everywhere, otherwise undecided.
    pub winner: Option<Player>,
}

/// Probes a strongly connected parity game on the `1/D` grid with Player 1
/// holding `budget1/D`. The winner is read off the reach table: the owner
/// of the top parity wins if it can force a visit from every vertex within
/// the horizon. A sample play of `rounds` rounds between the table
/// strategies is reported alongside.
///
/// The sample play is not used for the verdict: with a fixed tie rule the
/// tie holder can bid 0 forever on the grid, so repeated visits drain the
/// other player's budget in whole grid units.
pub fn parity_probe(arena: &Arena, grid: usize, horizon: usize, rounds: usize, start: usize, budget1: usize) -> Result<ParityProbe> {
    if arena.objective != ObjectiveKind::Parity {
        return domain("the parity probe needs a parity game");
    }
    if budget1 > grid || start >= arena.n() {
        return domain("start state out of range");
    }
    let reach = ReachGoal::max_parity(arena);
    let x = reach.player;
    let top = (0..arena.n()).map(|v| arena.parity(v)).max().unwrap_or(0);
    let tab = discrete_reach_table(arena, reach, grid, horizon, TABLE_CAP)?;
    // Budget index of the reacher.
    let own = if x == Player::One { budget1 } else { grid - budget1 };
    let reaches_from_all = (0..arena.n()).all(|v| tab.wins(horizon, 0, v, own));
    let mut v = start;
    let mut i = own;
    let mut visits = 0;
    let mut tail = 0;
    let mut deadline = horizon;
    for r in 0..rounds as u64 {
        let plan = tab.reacher_action(arena, r, v, i, deadline).or_else(|| tab.reacher_action(arena, r, v, i, horizon));
        let (b1, e1) = plan.map_or((0, arena.out(v)[0]), |(b, e, _)| (b, e));
        deadline = plan.map_or(horizon, |(_, _, t)| t - 1);
        let (b2, e2) = tab.avoider_action(arena, r, v, i).unwrap_or((0, arena.out(v)[0]));
        let x_wins = b1 > b2 || (b1 == b2 && arena.tiebreak.winner(r) == x);
        let e = if x_wins {
            i -= b1;
            e1
        } else {
            i += b2;
            e2
        };
        v = arena.edge(e).dst;
        if tab.reach.goal[v] {
            visits += 1;
            deadline = horizon;
        }
        if r as usize >= rounds / 2 {
            tail = tail.max(arena.parity(v));
        }
    }
    Ok(ParityProbe {
        top_parity: top,
        owner: x,
        reaches_from_all,
        rounds,
        goal_visits: visits,
        tail_max_parity: tail,
        winner: reaches_from_all.then_some(x),
    })
}

/// Mean with its standard error; `stderr` is `None` for a single sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: Option<f64>,
    pub samples: u64,
    pub censored: u64,
}

impl Estimate {
    /// Whether `x` lies within `k` standard errors (exact match for one sample).
    pub fn agrees(&self, x: f64, k: f64) -> bool {
        match self.stderr {
            Some(s) => (self.mean - x).abs() <= k * s.max(1e-12),
            None => self.mean == x,
        }
    }
}

/// What a random-turn walk measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkKind {
    /// 1 when absorbed in Player 2's sink, else 0.
    Absorption,
    /// Total weight until the first return to the start vertex.
    LoopReward,
}

/// Walks from `start`, each step taking the first or second policy edge with
/// probability one half. Samples use independent streams of one seed.
pub fn monte_carlo_random_turn(
    arena: &Arena,
    policy: &[Option<(usize, usize)>],
    start: usize,
    kind: WalkKind,
    samples: u64,
    seed: u64,
    max_len: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return domain("at least one sample is needed");
    }
    if start >= arena.n() {
        return domain("start vertex out of range");
    }
    let weights: Vec<f64> = arena.edges().iter().map(|e| crate::num::q_to_f64(&e.weight)).collect();
    let absorbing = |v: usize| arena.vertex(v).target.is_some() || policy.get(v).copied().flatten().is_none();
    let sample = |k: u64| -> Option<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let mut v = start;
        let mut total = 0.0;
        for step in 0..max_len {
            if kind == WalkKind::Absorption && absorbing(v) {
                return Some(if arena.vertex(v).target == Some(Player::Two) { 1.0 } else { 0.0 });
            }
            if kind == WalkKind::LoopReward && step > 0 && v == start {
                return Some(total);
            }
            let (p, m) = policy.get(v).copied().flatten()?;
            let e = if rng.gen::<bool>() { p } else { m };
            total += weights[e];
            v = arena.edge(e).dst;
        }
        None
    };
    // Fixed chunks summed in order keep the result independent of the thread count.
    const CHUNK: u64 = 4096;
    let chunks = samples.div_ceil(CHUNK) as usize;
    let parts = parallel_map(chunks, |c| {
        let (mut s, mut s2, mut ok, mut cens) = (0.0, 0.0, 0u64, 0u64);
        for k in (c as u64 * CHUNK)..((c as u64 + 1) * CHUNK).min(samples) {
            match sample(k) {
                Some(x) => {
                    s += x;
                    s2 += x * x;
                    ok += 1;
                }
                None => cens += 1,
            }
        }
        (s, s2, ok, cens)
    });
    let (mut s, mut s2, mut ok, mut cens) = (0.0, 0.0, 0u64, 0u64);
    for (a, b, c, d) in parts {
        s += a;
        s2 += b;
        ok += c;
        cens += d;
    }
    if ok == 0 {
        return Ok(Estimate { mean: f64::NAN, stderr: None, samples, censored: cens });
    }
    let mean = s / ok as f64;
    let stderr = (ok > 1).then(|| {
        let var = (s2 - ok as f64 * mean * mean).max(0.0) / (ok - 1) as f64;
        (var / ok as f64).sqrt()
    });
    Ok(Estimate { mean, stderr, samples, censored: cens })
}
