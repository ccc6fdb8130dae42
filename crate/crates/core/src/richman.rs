//! Threshold budgets of Richman and reachability games.
//!
//! `R(v)` is the least Player-1 budget that wins from `v`; it is the
//! probability that the half-half walk over the max/min successors ends in
//! Player 2's sink.

use crate::arena::{fresh_name, Arena, ArenaBuilder, ObjectiveKind, Player};
use crate::error::{domain, Error, Result};
use crate::fixpoint::{AvgEdge, AvgGame};
use crate::num::{q, qi, solve_linear, Q};
use num_traits::{One, Zero};
use serde::Serialize;

/// Threshold values with the certifying successor edges.
#[derive(Clone, Debug, PartialEq)]
pub struct RichmanValues {
    pub values: Vec<Q>,
    /// `(e_plus, e_minus)` edge indices for every vertex that is not a sink.
    pub policy: Vec<Option<(usize, usize)>>,
}

impl RichmanValues {
    pub fn value(&self, arena: &Arena, name: &str) -> Result<&Q> {
        Ok(&self.values[arena.require(name)?])
    }

    /// Threshold from `player`'s side: `R` for Player 1, `1 - R` for Player 2.
    pub fn threshold(&self, player: Player, v: usize) -> Q {
        match player {
            Player::One => self.values[v].clone(),
            Player::Two => Q::one() - &self.values[v],
        }
    }
}

/// Adds fresh sinks: targets move only to `v_R`, vertices that cannot reach a
/// target move only to `v_S`.
pub fn reach_to_richman(arena: &Arena) -> Result<Arena> {
    if arena.objective != ObjectiveKind::Reachability {
        return domain("reach_to_richman needs a reachability game");
    }
    let targets = arena.targets();
    if targets.is_empty() {
        return domain("the target set is empty");
    }
    let lost = arena.can_reach(&targets);
    let taken = arena.names();
    let mut b = ArenaBuilder::new(ObjectiveKind::Richman).tiebreak(arena.tiebreak);
    for v in arena.vertices() {
        b.add_vertex(&v.name, v.parity, None)?;
    }
    let vr = b.add_vertex(&fresh_name(&taken, "vR"), 0, Some(Player::One))?;
    let vs = b.add_vertex(&fresh_name(&taken, "vS"), 0, Some(Player::Two))?;
    for v in 0..arena.n() {
        if arena.vertex(v).target == Some(Player::One) {
            b.add_edge(v, vr, qi(0), None);
        } else if !lost[v] {
            b.add_edge(v, vs, qi(0), None);
        } else {
            for &e in arena.out(v) {
                let ed = arena.edge(e);
                b.add_edge(v, ed.dst, ed.weight.clone(), Some(ed.id.clone()));
            }
        }
    }
    b.build()
}

/// Reduces any objective with sinks to the Richman form; reachability games
/// are converted first.
pub fn as_richman(arena: &Arena) -> Result<std::borrow::Cow<'_, Arena>> {
    match arena.objective {
        ObjectiveKind::Richman => Ok(std::borrow::Cow::Borrowed(arena)),
        ObjectiveKind::Reachability => Ok(std::borrow::Cow::Owned(reach_to_richman(arena)?)),
        k => domain(format!("expected a richman or reachability game, got {}", k.keyword())),
    }
}

/// `table[t][v]`: the budget that lets the player aiming at `goal` get there
/// within `t` rounds. Sinks other than `goal` stay at 1.
pub fn reach_table(arena: &Arena, goal: usize, steps: usize) -> Result<Vec<Vec<Q>>> {
    let mut table = vec![init_row(arena, goal)?];
    for _ in 0..steps {
        let next = step_row(arena, goal, table.last().unwrap());
        table.push(next);
    }
    Ok(table)
}

fn init_row(arena: &Arena, goal: usize) -> Result<Vec<Q>> {
    arena.richman_sinks()?;
    Ok((0..arena.n()).map(|v| if v == goal { qi(0) } else { qi(1) }).collect())
}

fn step_row(arena: &Arena, goal: usize, prev: &[Q]) -> Vec<Q> {
    let half = q(1, 2);
    (0..arena.n())
        .map(|v| {
            if arena.vertex(v).target.is_some() || v == goal {
                return prev[v].clone();
            }
            let mut it = arena.successors(v).map(|d| &prev[d]);
            let first = it.next().unwrap();
            let (mut hi, mut lo) = (first, first);
            for x in it {
                if x > hi {
                    hi = x;
                }
                if x < lo {
                    lo = x;
                }
            }
            (hi + lo) * &half
        })
        .collect()
}

/// `R(·, i)`: the budget Player 1 needs to reach `v_R` within `i` rounds.
pub fn richman_iterate(arena: &Arena, steps: usize) -> Result<Vec<Q>> {
    let (vr, _) = arena.richman_sinks()?;
    let mut row = init_row(arena, vr)?;
    for _ in 0..steps {
        row = step_row(arena, vr, &row);
    }
    Ok(row)
}

/// Least `t` with `R(v, t) < budget`, or `None` if `cap` rounds do not suffice.
pub fn min_win_rounds(arena: &Arena, v: usize, budget: &Q, cap: usize) -> Result<Option<usize>> {
    min_rounds_for(arena, Player::One, v, budget, cap)
}

/// As [`min_win_rounds`] from either player's side.
pub fn min_rounds_for(arena: &Arena, player: Player, v: usize, budget: &Q, cap: usize) -> Result<Option<usize>> {
    if *budget <= Q::zero() || *budget > Q::one() {
        return domain("budget must lie in (0, 1]");
    }
    let (vr, vs) = arena.richman_sinks()?;
    let goal = if player == Player::One { vr } else { vs };
    let mut row = init_row(arena, goal)?;
    for t in 0..=cap {
        if row[v] < *budget {
            return Ok(Some(t));
        }
        row = step_row(arena, goal, &row);
    }
    Ok(None)
}

/// The threshold fixed point as an average game; vertices that cannot reach
/// `v_R` are fixed at 1.
fn richman_game(arena: &Arena) -> Result<AvgGame<Q>> {
    let (vr, vs) = arena.richman_sinks()?;
    let reach = arena.can_reach(&[vr]);
    let fixed = (0..arena.n())
        .map(|v| {
            if v == vr {
                Some(qi(0))
            } else if v == vs || !reach[v] {
                Some(qi(1))
            } else {
                None
            }
        })
        .collect();
    let out = (0..arena.n())
        .map(|v| arena.out(v).iter().map(|&e| AvgEdge { id: e, dst: arena.edge(e).dst, w: qi(0) }).collect())
        .collect();
    Ok(AvgGame { out, fixed })
}

/// Exact thresholds by policy iteration.
pub fn richman_exact(arena: &Arena) -> Result<RichmanValues> {
    let arena = as_richman(arena)?;
    let sol = richman_game(&arena)?.solve(1.0)?;
    let mut policy = sol.policy;
    for v in 0..arena.n() {
        if policy[v].is_none() && arena.vertex(v).target.is_none() {
            policy[v] = Some(extreme_edges(&arena, v, &sol.values));
        }
    }
    Ok(RichmanValues { values: sol.values, policy })
}

/// Max and min successor edges of `v`, smallest edge index on ties.
pub fn extreme_edges(arena: &Arena, v: usize, values: &[Q]) -> (usize, usize) {
    let out = arena.out(v);
    let (mut p, mut m) = (out[0], out[0]);
    for &e in &out[1..] {
        let x = &values[arena.edge(e).dst];
        if *x > values[arena.edge(p).dst] {
            p = e;
        }
        if *x < values[arena.edge(m).dst] {
            m = e;
        }
    }
    (p, m)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovReport {
    /// Probability of absorbing at `v_R` under the policy chain.
    #[serde(skip)]
    pub reach_r: Vec<Q>,
    /// `reach_r(v) - (1 - R(v))`; all zero when the values certify.
    #[serde(skip)]
    pub residuals: Vec<Q>,
    /// Closed classes of the chain containing neither sink.
    pub stray_classes: Vec<Vec<usize>>,
}

impl MarkovReport {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(Zero::is_zero)
    }
}

/// Solves the absorption probabilities of the half-half chain over the
/// policy edges and compares them against the threshold values.
pub fn markov_reach_check(arena: &Arena, rv: &RichmanValues) -> Result<MarkovReport> {
    let arena = as_richman(arena)?;
    let (vr, vs) = arena.richman_sinks()?;
    let n = arena.n();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|v| match rv.policy[v] {
            Some((p, m)) if v != vr && v != vs => vec![arena.edge(p).dst, arena.edge(m).dst],
            _ => vec![],
        })
        .collect();
    let mut hits = vec![false; n];
    hits[vr] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !hits[v] && succ[v].iter().any(|&d| hits[d]) {
                hits[v] = true;
                changed = true;
            }
        }
    }
    let comps = crate::arena::tarjan(n, |v| succ[v].clone());
    let mut stray = vec![];
    for c in comps {
        let closed = c.iter().all(|&v| succ[v].iter().all(|d| c.contains(d)));
        let has_cycle = c.len() > 1 || succ[c[0]].contains(&c[0]);
        if closed && has_cycle && !c.contains(&vr) && !c.contains(&vs) {
            if let Some(&v) = c.iter().find(|&&v| !rv.values[v].is_one()) {
                return Err(Error::Internal(format!("closed class at {} avoids both sinks", arena.name(v))));
            }
            stray.push(c);
        }
    }
    let free: Vec<usize> = (0..n).filter(|&v| hits[v] && v != vr).collect();
    let mut slot = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = k;
    }
    let k = free.len();
    let mut a = vec![vec![qi(0); k]; k];
    let mut b = vec![qi(0); k];
    for (r, &v) in free.iter().enumerate() {
        a[r][r] = qi(1);
        for &d in &succ[v] {
            if d == vr {
                b[r] += q(1, 2);
            } else if slot[d] != usize::MAX {
                a[r][slot[d]] -= q(1, 2);
            }
        }
    }
    let sol = solve_linear(a, b).ok_or_else(|| Error::Internal("absorption system is singular".into()))?;
    let mut reach_r = vec![qi(0); n];
    reach_r[vr] = qi(1);
    for (r, &v) in free.iter().enumerate() {
        reach_r[v] = sol[r].clone();
    }
    let residuals = (0..n).map(|v| &reach_r[v] - (Q::one() - &rv.values[v])).collect();
    Ok(MarkovReport { reach_r, residuals, stray_classes: stray })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SsgKind {
    Chance,
    Max,
    Min,
    SinkWin,
    SinkLose,
}

impl SsgKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SsgKind::Chance => "chance",
            SsgKind::Max => "max",
            SsgKind::Min => "min",
            SsgKind::SinkWin => "win",
            SsgKind::SinkLose => "lose",
        }
    }
}

/// Simple stochastic game: each vertex is split into a fair coin choosing
/// between a maximizer copy and a minimizer copy.
#[derive(Clone, Debug)]
pub struct SsgInstance {
    pub names: Vec<String>,
    pub kinds: Vec<SsgKind>,
    pub succ: Vec<Vec<usize>>,
    /// Original vertex to its chance copy (or its sink).
    pub entry: Vec<usize>,
}

impl SsgInstance {
    pub fn to_text(&self) -> String {
        let mut s = String::from("objective ssg\n");
        for (name, kind) in self.names.iter().zip(&self.kinds) {
            s += &format!("vertex {name} kind={}\n", kind.keyword());
        }
        for (v, succ) in self.succ.iter().enumerate() {
            for &d in succ {
                s += &format!("edge {} {}\n", self.names[v], self.names[d]);
            }
        }
        s
    }
}

pub fn build_ssg(arena: &Arena) -> Result<SsgInstance> {
    let arena = as_richman(arena)?;
    let (vr, vs) = arena.richman_sinks()?;
    let mut taken = arena.names();
    let mut names = vec![];
    let mut kinds = vec![];
    let mut entry = vec![0; arena.n()];
    let mut push = |base: String, kind, names: &mut Vec<String>, taken: &mut std::collections::HashSet<String>| {
        let name = fresh_name(taken, &base);
        taken.insert(name.clone());
        names.push(name);
        kinds.push(kind);
        names.len() - 1
    };
    for v in 0..arena.n() {
        let base = arena.name(v);
        entry[v] = if v == vr {
            push(format!("{base}_c"), SsgKind::SinkWin, &mut names, &mut taken)
        } else if v == vs {
            push(format!("{base}_c"), SsgKind::SinkLose, &mut names, &mut taken)
        } else {
            let c = push(format!("{base}_c"), SsgKind::Chance, &mut names, &mut taken);
            push(format!("{base}_1"), SsgKind::Max, &mut names, &mut taken);
            push(format!("{base}_2"), SsgKind::Min, &mut names, &mut taken);
            c
        };
    }
    let mut succ = vec![vec![]; names.len()];
    for v in 0..arena.n() {
        if v == vr || v == vs {
            continue;
        }
        let c = entry[v];
        succ[c] = vec![c + 1, c + 2];
        let targets: Vec<usize> = arena.successors(v).map(|d| entry[d]).collect();
        succ[c + 1] = targets.clone();
        succ[c + 2] = targets;
    }
    Ok(SsgInstance { names, kinds, succ, entry })
}

/// Maximizer's probability of reaching the winning sink, by Gauss-Seidel
/// value iteration from 0. Stops once the change, extrapolated by the
/// observed contraction rate, drops below `tol`.
pub fn solve_ssg(ssg: &SsgInstance, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return domain("tol must be positive");
    }
    let n = ssg.names.len();
    let mut x: Vec<f64> = ssg.kinds.iter().map(|k| if *k == SsgKind::SinkWin { 1.0 } else { 0.0 }).collect();
    let mut prev_delta = f64::INFINITY;
    for _ in 0..1_000_000 {
        let mut delta = 0.0f64;
        for v in 0..n {
            let s = &ssg.succ[v];
            let nv = match ssg.kinds[v] {
                SsgKind::Chance => 0.5 * (x[s[0]] + x[s[1]]),
                SsgKind::Max => s.iter().map(|&d| x[d]).fold(f64::NEG_INFINITY, f64::max),
                SsgKind::Min => s.iter().map(|&d| x[d]).fold(f64::INFINITY, f64::min),
                _ => continue,
            };
            delta = delta.max((nv - x[v]).abs());
            x[v] = nv;
        }
        let rate = if prev_delta.is_finite() && prev_delta > 0.0 { (delta / prev_delta).min(0.999_999) } else { 0.0 };
        if delta < tol && delta * rate / (1.0 - rate) < tol {
            return Ok(x);
        }
        prev_delta = delta;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::load_arena;

    pub const DETOUR_RICHMAN: &str = "objective richman\nvertex v0\nvertex v1 target=2\nvertex v2\nvertex t target=1\n\
        edge v0 v1\nedge v0 v2\nedge v2 v0\nedge v2 t\n";

    #[test]
    fn detour_values() {
        let a = load_arena(DETOUR_RICHMAN).unwrap();
        let rv = richman_exact(&a).unwrap();
        assert_eq!(rv.values, vec![q(2, 3), qi(1), q(1, 3), qi(0)]);
    }

    #[test]
    fn iterate_steps() {
        let a = load_arena(DETOUR_RICHMAN).unwrap();
        assert_eq!(richman_iterate(&a, 0).unwrap(), vec![qi(1), qi(1), qi(1), qi(0)]);
        let r1 = richman_iterate(&a, 1).unwrap();
        assert_eq!((r1[0].clone(), r1[2].clone()), (qi(1), q(1, 2)));
        assert_eq!(richman_iterate(&a, 2).unwrap()[0], q(3, 4));
        assert_eq!(min_win_rounds(&a, 0, &q(76, 100), 100).unwrap(), Some(2));
        assert_eq!(min_win_rounds(&a, 3, &q(1, 100), 100).unwrap(), Some(0));
        assert_eq!(min_win_rounds(&a, 0, &q(7, 10), 100).unwrap(), Some(4));
    }

    #[test]
    fn reach_reduction() {
        let a = load_arena("objective reachability\nvertex v0\nvertex v1\nvertex v2\nvertex t target=1\n\
            edge v0 v1\nedge v0 v2\nedge v2 v0\nedge v2 t\n")
        .unwrap();
        let g = reach_to_richman(&a).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(richman_exact(&g).unwrap().values[0], q(2, 3));
        assert_eq!(richman_exact(&a).unwrap().values[0], q(2, 3));
    }

    #[test]
    fn markov_and_ssg() {
        let a = load_arena(DETOUR_RICHMAN).unwrap();
        let rv = richman_exact(&a).unwrap();
        let rep = markov_reach_check(&a, &rv).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.reach_r[0], q(1, 3));
        let ssg = build_ssg(&a).unwrap();
        let val = solve_ssg(&ssg, 1e-9).unwrap();
        assert!((val[ssg.entry[0]] - 1.0 / 3.0).abs() < 1e-8);
        assert_eq!(val[ssg.entry[3]], 1.0);
        assert!(solve_ssg(&ssg, 0.0).is_err());
    }
}
