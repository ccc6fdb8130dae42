//! Seeded random arenas for property tests and the acceptance suite.

use crate::arena::{Arena, ArenaBuilder, ObjectiveKind, Player};
use crate::error::{domain, Result};
use crate::num::qi;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A Richman game with `n` vertices: `t` (Player 1's sink), `s` (Player 2's
/// sink) and `n - 2` inner vertices with one to three successors each.
pub fn random_richman(seed: u64, n: usize) -> Result<Arena> {
    if !(3..=64).contains(&n) {
        return domain("a random richman game needs 3 to 64 vertices");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ArenaBuilder::new(ObjectiveKind::Richman);
    let t = b.add_vertex("t", 0, Some(Player::One))?;
    let s = b.add_vertex("s", 0, Some(Player::Two))?;
    let inner: Vec<usize> = (0..n - 2).map(|k| b.add_vertex(&format!("v{k}"), 0, None)).collect::<Result<_>>()?;
    let all: Vec<usize> = [t, s].into_iter().chain(inner.iter().copied()).collect();
    for &v in &inner {
        let deg = rng.gen_range(1..=3.min(n));
        let mut succ: Vec<usize> = all.choose_multiple(&mut rng, deg).copied().collect();
        succ.sort_unstable();
        for d in succ {
            b.add_edge(v, d, qi(0), None);
        }
    }
    b.build()
}

/// A strongly connected parity game with `n` vertices: a random Hamiltonian
/// cycle plus up to `n` extra edges, parity indices in `0..=4`.
pub fn random_parity_scc(seed: u64, n: usize) -> Result<Arena> {
    if !(1..=64).contains(&n) {
        return domain("a random parity game needs 1 to 64 vertices");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ArenaBuilder::new(ObjectiveKind::Parity);
    let vs: Vec<usize> = (0..n).map(|k| b.add_vertex(&format!("v{k}"), rng.gen_range(0..=4), None)).collect::<Result<_>>()?;
    let mut order = vs.clone();
    order.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|k| (order[k], order[(k + 1) % n])).collect();
    for _ in 0..rng.gen_range(0..=n) {
        edges.push((vs[rng.gen_range(0..n)], vs[rng.gen_range(0..n)]));
    }
    edges.sort_unstable();
    edges.dedup();
    for (a, d) in edges {
        b.add_edge(a, d, qi(0), None);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_games_are_strongly_connected() {
        for seed in 0..30 {
            let a = random_parity_scc(seed, 1 + (seed as usize % 8)).unwrap();
            assert!(a.is_strongly_connected());
        }
    }

    #[test]
    fn richman_games_are_reproducible() {
        let a = random_richman(5, 8).unwrap();
        let b = random_richman(5, 8).unwrap();
        assert_eq!(a.to_text(), b.to_text());
        assert!(a.richman_sinks().is_ok());
    }
}
