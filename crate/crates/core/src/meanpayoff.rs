//! Mean-payoff bidding games: the weighted threshold function on the split
//! graph, contributions, strongly connected component classification,
//! weight scaling and threshold budgets.
//!
//! The split graph at `u` keeps `u` as the start copy and redirects every
//! edge entering `u` to an extra terminal vertex with index `n` whose value is 0.

use crate::arena::{Arena, ObjectiveKind, Player};
use crate::error::{domain, Error, Result};
use crate::fixpoint::{AvgEdge, AvgGame};
use crate::num::{q_to_f64, Scalar, Q};
use crate::parity::thresholds_via_sinks;
use crate::richman::RichmanValues;
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedRichmanValues<T = Q> {
    pub base: usize,
    /// Indexed by split-graph vertex; entry `n` is the terminal copy.
    pub values: Vec<T>,
    /// `(e_plus, e_minus)` arena edge indices; `None` at the terminal copy.
    pub policy: Vec<Option<(usize, usize)>>,
    pub w_of_u: T,
}

impl<T: Scalar> WeightedRichmanValues<T> {
    /// Value of the vertex an edge leads to, with the base read as terminal.
    pub fn at_dst(&self, arena: &Arena, e: usize) -> T {
        let d = arena.edge(e).dst;
        if d == self.base {
            T::s_zero()
        } else {
            self.values[d].clone()
        }
    }

    /// `w(e) + value(dst e)` on the split graph.
    pub fn edge_value(&self, arena: &Arena, weights: &[T], e: usize) -> T {
        weights[e].clone() + self.at_dst(arena, e)
    }

    /// Half the gap between the best and worst outgoing edge of `v`.
    pub fn half_gap(&self, arena: &Arena, weights: &[T], v: usize) -> T {
        let (p, m) = self.policy[v].expect("policy at a non-terminal vertex");
        (self.edge_value(arena, weights, p) - self.edge_value(arena, weights, m)) * T::half()
    }
}

pub fn exact_weights(arena: &Arena) -> Vec<Q> {
    arena.edges().iter().map(|e| e.weight.clone()).collect()
}

pub fn float_weights(arena: &Arena) -> Vec<f64> {
    arena.edges().iter().map(|e| q_to_f64(&e.weight)).collect()
}

fn require_scc(arena: &Arena) -> Result<()> {
    if !arena.is_strongly_connected() {
        return domain("the arena must be strongly connected");
    }
    Ok(())
}

/// The weighted threshold function at `u` under arbitrary edge weights.
pub fn weighted_richman_with<T: Scalar + PartialEq>(arena: &Arena, u: usize, weights: &[T]) -> Result<WeightedRichmanValues<T>> {
    require_scc(arena)?;
    let n = arena.n();
    if u >= n {
        return domain("base vertex out of range");
    }
    let mut out: Vec<Vec<AvgEdge<T>>> = (0..n)
        .map(|v| {
            arena
                .out(v)
                .iter()
                .map(|&e| {
                    let d = arena.edge(e).dst;
                    AvgEdge { id: e, dst: if d == u { n } else { d }, w: weights[e].clone() }
                })
                .collect()
        })
        .collect();
    out.push(vec![]);
    let mut fixed = vec![None; n + 1];
    fixed[n] = Some(T::s_zero());
    let sol = AvgGame { out, fixed }.solve(0.0)?;
    let w_of_u = sol.values[u].clone();
    Ok(WeightedRichmanValues { base: u, values: sol.values, policy: sol.policy, w_of_u })
}

pub fn weighted_richman(arena: &Arena, u: usize) -> Result<WeightedRichmanValues<Q>> {
    weighted_richman_with(arena, u, &exact_weights(arena))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contributions<T = Q> {
    /// Visit mass per split-graph vertex; 1 at the base.
    pub cont: Vec<T>,
    /// `Σ ½ cont(v) (w(e_plus) + w(e_minus))`, equal to the base value.
    pub total: T,
}

impl<T: Scalar> Contributions<T> {
    /// Mass-weighted positive and negative weight along the policy edges.
    pub fn masses(&self, arena: &Arena, weights: &[T], wrv: &WeightedRichmanValues<T>) -> (T, T) {
        let (mut pos, mut neg) = (T::s_zero(), T::s_zero());
        for v in 0..arena.n() {
            let Some((p, m)) = wrv.policy[v] else { continue };
            for e in [p, m] {
                let mass = self.cont[v].clone() * T::half() * weights[e].clone();
                if weights[e] < T::s_zero() {
                    neg = neg - mass;
                } else {
                    pos = pos + mass;
                }
            }
        }
        (pos, neg)
    }
}

/// Solves the flow equations of the policy chain and checks that the
/// mass-weighted edge weights sum to the base value.
pub fn contributions_with<T: Scalar + PartialEq>(arena: &Arena, weights: &[T], wrv: &WeightedRichmanValues<T>) -> Result<Contributions<T>> {
    let n = arena.n();
    let u = wrv.base;
    let into = |e: usize| {
        let d = arena.edge(e).dst;
        if d == u {
            n
        } else {
            d
        }
    };
    let mut a = vec![vec![T::s_zero(); n + 1]; n + 1];
    let mut b = vec![T::s_zero(); n + 1];
    for (v, row) in a.iter_mut().enumerate() {
        row[v] = T::s_one();
    }
    b[u] = T::s_one();
    for v in 0..n {
        let Some((p, m)) = wrv.policy[v] else { continue };
        for e in [p, m] {
            let d = into(e);
            a[d][v] = a[d][v].clone() - T::half();
        }
    }
    let cont = crate::num::solve_linear(a, b).ok_or_else(|| Error::Internal("flow system is singular".into()))?;
    let mut total = T::s_zero();
    for v in 0..n {
        let Some((p, m)) = wrv.policy[v] else { continue };
        total = total + cont[v].clone() * T::half() * (weights[p].clone() + weights[m].clone());
    }
    let diff = total.clone() - wrv.w_of_u.clone();
    if !diff.negligible(total.as_f64().abs() + wrv.w_of_u.as_f64().abs()) {
        return Err(Error::Internal(format!("contribution identity off by {}", diff.as_f64())));
    }
    Ok(Contributions { cont, total })
}

pub fn contributions(arena: &Arena, wrv: &WeightedRichmanValues<Q>) -> Result<Contributions<Q>> {
    contributions_with(arena, &exact_weights(arena), wrv)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SccClass {
    /// 0 when some base value is non-positive (Min wins), 1 otherwise.
    pub tau: u8,
    pub witness: usize,
    #[serde(skip)]
    pub all_w: Vec<Q>,
}

pub fn classify_scc(arena: &Arena) -> Result<SccClass> {
    require_scc(arena)?;
    let all_w = (0..arena.n()).map(|u| Ok(weighted_richman(arena, u)?.w_of_u)).collect::<Result<Vec<Q>>>()?;
    let mut witness = 0;
    for u in 1..arena.n() {
        if all_w[u] < all_w[witness] {
            witness = u;
        }
    }
    let tau = if all_w[witness] <= Q::zero() { 0 } else { 1 };
    Ok(SccClass { tau, witness, all_w })
}

/// Per bottom component: its vertices (in the original arena) and class.
pub fn classify_bottoms(arena: &Arena) -> Result<Vec<(Vec<usize>, SccClass)>> {
    if arena.objective != ObjectiveKind::MeanPayoff {
        return domain("expected a mean-payoff game");
    }
    let d = arena.scc_decompose();
    d.bottom()
        .map(|c| {
            let (sub, _) = arena.induced(c, ObjectiveKind::MeanPayoff)?;
            Ok((c.clone(), classify_scc(&sub)?))
        })
        .collect()
}

/// Min plays Player 1: components Min wins collapse onto Player 1's sink.
pub fn mp_thresholds(arena: &Arena) -> Result<RichmanValues> {
    let mut winner_of = vec![None; arena.n()];
    for (c, class) in classify_bottoms(arena)? {
        let p = if class.tau == 0 { Player::One } else { Player::Two };
        for v in c {
            winner_of[v] = Some(p);
        }
    }
    thresholds_via_sinks(arena, &winner_of)
}

fn check_z<T: Scalar>(z: &T) -> Result<()> {
    if *z <= T::s_one() {
        return domain("scaling factor must exceed 1");
    }
    Ok(())
}

/// Edge weights with negative entries multiplied by `z`.
pub fn scale_z<T: Scalar>(arena: &Arena, z: &T) -> Result<Vec<T>> {
    check_z(z)?;
    Ok(arena
        .edges()
        .iter()
        .map(|e| {
            let w = T::from_q(&e.weight);
            if e.weight.is_negative() {
                w * z.clone()
            } else {
                w
            }
        })
        .collect())
}

/// Negative weights times `z`, the others divided by `z`.
pub fn scale_z_tilde<T: Scalar>(arena: &Arena, z: &T) -> Result<Vec<T>> {
    check_z(z)?;
    Ok(arena
        .edges()
        .iter()
        .map(|e| {
            let w = T::from_q(&e.weight);
            if e.weight.is_negative() {
                w * z.clone()
            } else {
                w / z.clone()
            }
        })
        .collect())
}

/// Ratio of positive to negative contribution mass, or `None` when no
/// negative weight is ever traversed.
pub fn z_recurrent(arena: &Arena, wrv: &WeightedRichmanValues<Q>, cont: &Contributions<Q>) -> Result<Option<Q>> {
    if wrv.w_of_u <= Q::zero() {
        return domain("the base value must be positive");
    }
    let (pos, neg) = cont.masses(arena, &exact_weights(arena), wrv);
    Ok(if neg.is_zero() { None } else { Some(pos / neg) })
}

pub fn z_general(arena: &Arena, wrv: &WeightedRichmanValues<Q>, cont: &Contributions<Q>) -> Result<Option<f64>> {
    Ok(z_recurrent(arena, wrv, cont)?.map(|z| q_to_f64(&z).sqrt()))
}

/// A vertex whose removal leaves the graph acyclic.
pub fn is_recurrent_scc(arena: &Arena) -> Option<usize> {
    (0..arena.n()).find(|&u| acyclic_without(arena, u))
}

fn acyclic_without(arena: &Arena, u: usize) -> bool {
    let n = arena.n();
    let mut indeg = vec![0usize; n];
    for e in arena.edges() {
        if e.src != u && e.dst != u {
            indeg[e.dst] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| v != u && indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for d in arena.successors(v) {
            if d != u {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    stack.push(d);
                }
            }
        }
    }
    seen == n - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::load_arena;
    use crate::num::{q, qi};

    fn loops(a: &str, b: &str) -> Arena {
        load_arena(&format!("objective meanpayoff\nvertex u\nedge u u weight={a}\nedge u u weight={b}\n")).unwrap()
    }

    #[test]
    fn single_vertex_values() {
        assert_eq!(weighted_richman(&loops("1", "-1"), 0).unwrap().w_of_u, qi(0));
        assert_eq!(weighted_richman(&loops("1", "-2"), 0).unwrap().w_of_u, q(-1, 2));
        assert_eq!(weighted_richman(&loops("2", "-1"), 0).unwrap().w_of_u, q(1, 2));
    }

    #[test]
    fn pos_loop_scaling() {
        let a = loops("2", "-1");
        let w = weighted_richman(&a, 0).unwrap();
        let c = contributions(&a, &w).unwrap();
        assert_eq!(c.total, q(1, 2));
        let z = z_recurrent(&a, &w, &c).unwrap().unwrap();
        assert_eq!(z, qi(2));
        let wz = weighted_richman_with(&a, 0, &scale_z(&a, &z).unwrap()).unwrap();
        assert_eq!(wz.w_of_u, qi(0));
        let zg = z_general(&a, &w, &c).unwrap().unwrap();
        let wt = weighted_richman_with(&a, 0, &scale_z_tilde(&a, &zg).unwrap()).unwrap();
        assert!(wt.w_of_u.abs() < 1e-12);
        assert!(scale_z(&a, &1.0).is_err());
    }

    #[test]
    fn recurrence() {
        assert_eq!(is_recurrent_scc(&loops("1", "-1")), Some(0));
        let a = load_arena(
            "objective meanpayoff\nvertex a\nvertex b\nvertex c\nvertex d\nvertex e\n\
             edge a b\nedge b a\nedge b c\nedge c d\nedge d e\nedge e d\nedge e a\n",
        )
        .unwrap();
        assert_eq!(is_recurrent_scc(&a), None);
    }
}
