//! Parity bidding games: bottom-component classification, the reduction to
//! Richman games, and the k-unwinding of Büchi games.

use crate::arena::{fresh_name, Arena, ArenaBuilder, ObjectiveKind, Player};
use crate::error::{domain, Result};
use crate::num::qi;
use crate::richman::{richman_exact, RichmanValues};
use serde::Serialize;
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BsccClass {
    pub vertices: Vec<usize>,
    pub winner: Player,
    /// Smallest vertex carrying the component's largest parity.
    pub witness: usize,
}

pub fn classify_bsccs(arena: &Arena) -> Result<Vec<BsccClass>> {
    if arena.objective != ObjectiveKind::Parity {
        return domain("classify_bsccs needs a parity game");
    }
    let d = arena.scc_decompose();
    Ok(d.bottom().map(|c| classify_component(arena, c)).collect())
}

fn classify_component(arena: &Arena, c: &[usize]) -> BsccClass {
    let top = c.iter().map(|&v| arena.parity(v)).max().unwrap();
    let witness = *c.iter().find(|&&v| arena.parity(v) == top).unwrap();
    let winner = if top % 2 == 1 { Player::One } else { Player::Two };
    BsccClass { vertices: c.to_vec(), winner, witness }
}

/// The Richman game in which every bottom component collapses onto the sink
/// of its winner. Vertex indices are preserved; `edge_map` sends edges of the
/// new arena back to the original (or `None` for the added sink edges).
pub struct SinkReduction {
    pub arena: Arena,
    pub edge_map: Vec<Option<usize>>,
}

/// Shared by parity and mean-payoff reductions: `winner_of[v]` is set for
/// vertices inside bottom components.
pub fn collapse_to_sinks(arena: &Arena, winner_of: &[Option<Player>]) -> Result<SinkReduction> {
    let taken = arena.names();
    let mut b = ArenaBuilder::new(ObjectiveKind::Richman).tiebreak(arena.tiebreak);
    for v in arena.vertices() {
        b.add_vertex(&v.name, v.parity, None)?;
    }
    let vr = b.add_vertex(&fresh_name(&taken, "vR"), 0, Some(Player::One))?;
    let vs = b.add_vertex(&fresh_name(&taken, "vS"), 0, Some(Player::Two))?;
    let mut edge_map = vec![];
    for v in 0..arena.n() {
        match winner_of[v] {
            Some(Player::One) => {
                b.add_edge(v, vr, qi(0), None);
                edge_map.push(None);
            }
            Some(Player::Two) => {
                b.add_edge(v, vs, qi(0), None);
                edge_map.push(None);
            }
            None => {
                for &e in arena.out(v) {
                    let ed = arena.edge(e);
                    b.add_edge(v, ed.dst, ed.weight.clone(), Some(ed.id.clone()));
                    edge_map.push(Some(e));
                }
            }
        }
    }
    Ok(SinkReduction { arena: b.build()?, edge_map })
}

/// Solves the collapsed game and restricts the result to the original vertices.
pub fn thresholds_via_sinks(arena: &Arena, winner_of: &[Option<Player>]) -> Result<RichmanValues> {
    let red = collapse_to_sinks(arena, winner_of)?;
    let rv = richman_exact(&red.arena)?;
    let n = arena.n();
    let policy = rv.policy[..n]
        .iter()
        .map(|p| p.and_then(|(a, b)| Some((red.edge_map[a]?, red.edge_map[b]?))))
        .collect();
    Ok(RichmanValues { values: rv.values[..n].to_vec(), policy })
}

pub fn parity_winner_map(arena: &Arena) -> Result<Vec<Option<Player>>> {
    let mut winner_of = vec![None; arena.n()];
    for c in classify_bsccs(arena)? {
        for &v in &c.vertices {
            winner_of[v] = Some(c.winner);
        }
    }
    Ok(winner_of)
}

/// Player-1 thresholds of a parity game.
pub fn parity_thresholds(arena: &Arena) -> Result<RichmanValues> {
    thresholds_via_sinks(arena, &parity_winner_map(arena)?)
}

/// The Büchi k-unwinding: copies `v@0..=k` count completed traversals of
/// `cycle` since the last accepting visit; level `k` leads to Player 2's sink.
pub fn unwind_buchi(arena: &Arena, accepting: &[usize], cycle: &[usize], k: usize) -> Result<Arena> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    if !arena.is_strongly_connected() {
        return domain("the arena must be strongly connected");
    }
    if cycle.is_empty() {
        return domain("the cycle is empty");
    }
    let distinct: HashSet<usize> = cycle.iter().copied().collect();
    if distinct.len() != cycle.len() {
        return domain("the cycle repeats a vertex");
    }
    if cycle.iter().any(|v| accepting.contains(v)) {
        return domain("the cycle meets the accepting set");
    }
    let m = cycle.len();
    for i in 0..m {
        let (s, d) = (cycle[i], cycle[(i + 1) % m]);
        if !arena.successors(s).any(|x| x == d) {
            return domain(format!("no edge {} -> {} on the cycle", arena.name(s), arena.name(d)));
        }
    }
    let (last, first) = (cycle[m - 1], cycle[0]);
    let n = arena.n();
    let mut taken = HashSet::new();
    let mut b = ArenaBuilder::new(ObjectiveKind::Richman).tiebreak(arena.tiebreak);
    for level in 0..=k {
        for v in 0..n {
            let name = fresh_name(&taken, &format!("{}@{level}", arena.name(v)));
            taken.insert(name.clone());
            b.add_vertex(&name, arena.parity(v), None)?;
        }
    }
    let vr = b.add_vertex(&fresh_name(&taken, "vR"), 0, Some(Player::One))?;
    let vs = b.add_vertex(&fresh_name(&taken, "vS"), 0, Some(Player::Two))?;
    for level in 0..k {
        for e in arena.edges() {
            let to = if accepting.contains(&e.dst) {
                0
            } else if e.src == last && e.dst == first {
                level + 1
            } else {
                level
            };
            b.add_edge(level * n + e.src, to * n + e.dst, e.weight.clone(), None);
        }
    }
    for v in 0..n {
        b.add_edge(k * n + v, vs, qi(0), None);
    }
    let _ = vr;
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::load_arena;
    use crate::num::q;

    #[test]
    fn classification() {
        let a = load_arena("objective parity\nvertex a parity=2\nvertex b parity=1\nedge a b\nedge b a\n").unwrap();
        let c = classify_bsccs(&a).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].winner, c[0].witness), (Player::Two, 0));
        let a = load_arena("objective parity\nvertex a parity=3\nedge a a\n").unwrap();
        assert_eq!(classify_bsccs(&a).unwrap()[0].winner, Player::One);
    }

    #[test]
    fn connector_half() {
        let a = load_arena("objective parity\nvertex c\nvertex w parity=1\nvertex l parity=2\nedge c w\nedge c l\nedge w w\nedge l l\n").unwrap();
        let rv = parity_thresholds(&a).unwrap();
        assert_eq!(rv.values, vec![q(1, 2), qi(0), qi(1)]);
    }

    #[test]
    fn unwinding_shape() {
        let a = load_arena("objective parity\nvertex f\nvertex c1\nvertex c2\nedge f c1\nedge c1 c2\nedge c2 c1\nedge c2 f\n").unwrap();
        let g = unwind_buchi(&a, &[0], &[1, 2], 3).unwrap();
        assert_eq!(g.n(), 14);
        let rv = richman_exact(&g).unwrap();
        assert!(rv.values.iter().enumerate().all(|(v, x)| v == g.lookup("vR").unwrap() || *x == qi(1)));
        assert!(unwind_buchi(&a, &[0], &[0, 1], 1).is_err());
    }
}
