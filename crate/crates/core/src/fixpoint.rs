//! Exact solver for "average of best and worst successor" fixed points.
//!
//! Each free vertex satisfies `x(v) = ½(max_e (w(e) + x(dst e)) + min_e (w(e) + x(dst e)))`;
//! fixed vertices carry a prescribed value. Both the threshold function of
//! reachability games and the weighted variant on split graphs are instances.
//!
//! The solver seeds a policy from float value iteration, then alternates
//! exact policy evaluation and improvement. Among optimal edges it prefers
//! the smallest id that leads into the already-absorbing region, so the
//! policy chain always absorbs at the fixed vertices.

use crate::error::{Error, Result};
use crate::num::{solve_linear, Scalar};

#[derive(Clone, Debug)]
pub struct AvgEdge<T> {
    /// Tie-break key, also returned in the policy.
    pub id: usize,
    pub dst: usize,
    pub w: T,
}

#[derive(Clone, Debug)]
pub struct AvgGame<T> {
    pub out: Vec<Vec<AvgEdge<T>>>,
    pub fixed: Vec<Option<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub values: Vec<T>,
    /// `(max edge id, min edge id)` for every free vertex.
    pub policy: Vec<Option<(usize, usize)>>,
}

/// Local indices into `out[v]` for the max and min role.
type Local = Vec<Option<(usize, usize)>>;

const SEED_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 1 << 20;
const MAX_IMPROVEMENTS: usize = 64;

impl<T: Scalar + PartialEq> AvgGame<T> {
    pub fn n(&self) -> usize {
        self.fixed.len()
    }

    fn is_free(&self, v: usize) -> bool {
        self.fixed[v].is_none() && !self.out[v].is_empty()
    }

    /// Gauss-Seidel sweeps in floating point, starting from `x`.
    /// Returns the last sweep's largest change.
    pub fn sweep_f64(&self, x: &mut [f64], sweeps: usize) -> f64 {
        let w: Vec<Vec<f64>> = self.out.iter().map(|es| es.iter().map(|e| e.w.as_f64()).collect()).collect();
        let mut delta = 0.0;
        for _ in 0..sweeps {
            delta = 0.0f64;
            for v in 0..self.n() {
                if !self.is_free(v) {
                    continue;
                }
                let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
                for (e, wv) in self.out[v].iter().zip(&w[v]) {
                    let val = wv + x[e.dst];
                    hi = hi.max(val);
                    lo = lo.min(val);
                }
                let nv = 0.5 * (hi + lo);
                delta = delta.max((nv - x[v]).abs());
                x[v] = nv;
            }
            if delta == 0.0 {
                break;
            }
        }
        delta
    }

    fn initial(&self, init: f64) -> Vec<f64> {
        (0..self.n()).map(|v| self.fixed[v].as_ref().map_or(init, |x| x.as_f64())).collect()
    }

    /// Chooses optimal edges, preferring ones that extend the absorbing region.
    fn select<S: Scalar>(&self, x: &[S], w: impl Fn(&AvgEdge<T>) -> S, eq: impl Fn(&S, &S) -> bool) -> Local {
        let n = self.n();
        let mut plus: Vec<Vec<usize>> = vec![vec![]; n];
        let mut minus: Vec<Vec<usize>> = vec![vec![]; n];
        for v in (0..n).filter(|&v| self.is_free(v)) {
            let vals: Vec<S> = self.out[v].iter().map(|e| w(e) + x[e.dst].clone()).collect();
            let mut hi = vals[0].clone();
            let mut lo = vals[0].clone();
            for val in &vals[1..] {
                if *val > hi {
                    hi = val.clone();
                }
                if *val < lo {
                    lo = val.clone();
                }
            }
            let mut p: Vec<usize> = (0..vals.len()).filter(|&i| eq(&vals[i], &hi)).collect();
            let mut m: Vec<usize> = (0..vals.len()).filter(|&i| eq(&vals[i], &lo)).collect();
            p.sort_by_key(|&i| self.out[v][i].id);
            m.sort_by_key(|&i| self.out[v][i].id);
            plus[v] = p;
            minus[v] = m;
        }
        let mut absorbed: Vec<bool> = (0..n).map(|v| !self.is_free(v)).collect();
        let mut pol: Local = vec![None; n];
        let mut changed = true;
        while changed {
            changed = false;
            for v in 0..n {
                if absorbed[v] {
                    continue;
                }
                let into = |c: &Vec<usize>| c.iter().copied().find(|&i| absorbed[self.out[v][i].dst]);
                let (p, m) = (into(&plus[v]), into(&minus[v]));
                if p.is_some() || m.is_some() {
                    pol[v] = Some((p.unwrap_or(plus[v][0]), m.unwrap_or(minus[v][0])));
                    absorbed[v] = true;
                    changed = true;
                }
            }
        }
        for v in 0..n {
            if !absorbed[v] {
                pol[v] = Some((plus[v][0], minus[v][0]));
            }
        }
        pol
    }

    /// Solves the linear system of a fixed policy; `None` if singular.
    pub fn evaluate(&self, pol: &Local) -> Option<Vec<T>> {
        let n = self.n();
        let mut slot = vec![usize::MAX; n];
        let free: Vec<usize> = (0..n).filter(|&v| self.is_free(v)).collect();
        for (k, &v) in free.iter().enumerate() {
            slot[v] = k;
        }
        let k = free.len();
        let half = T::half();
        let mut a = vec![vec![T::s_zero(); k]; k];
        let mut b = vec![T::s_zero(); k];
        for (r, &v) in free.iter().enumerate() {
            a[r][r] = T::s_one();
            let (p, m) = pol[v]?;
            for i in [p, m] {
                let e = &self.out[v][i];
                b[r] = b[r].clone() + half.clone() * e.w.clone();
                if slot[e.dst] != usize::MAX {
                    a[r][slot[e.dst]] = a[r][slot[e.dst]].clone() - half.clone();
                } else {
                    let c = self.fixed[e.dst].clone().unwrap_or_else(T::s_zero);
                    b[r] = b[r].clone() + half.clone() * c;
                }
            }
        }
        let sol = solve_linear(a, b)?;
        let mut x: Vec<T> = (0..n).map(|v| self.fixed[v].clone().unwrap_or_else(T::s_zero)).collect();
        for (r, &v) in free.iter().enumerate() {
            x[v] = sol[r].clone();
        }
        Some(x)
    }

    fn exact_eq(a: &T, b: &T) -> bool {
        if T::is_exact() {
            a == b
        } else {
            (a.clone() - b.clone()).negligible(a.as_f64().abs().max(b.as_f64().abs()))
        }
    }

    /// Fixed point with a canonical optimal policy. `init` seeds the free
    /// vertices of the float iteration.
    pub fn solve(&self, init: f64) -> Result<Solution<T>> {
        let mut seed = self.initial(init);
        let mut sweeps = 256;
        let mut total = 0;
        while total <= MAX_SWEEPS {
            self.sweep_f64(&mut seed, sweeps);
            total += sweeps;
            sweeps *= 2;
            let mut pol = self.select(&seed, |e| e.w.as_f64(), |a, b| (a - b).abs() <= SEED_TOL * a.abs().max(1.0));
            for _ in 0..MAX_IMPROVEMENTS {
                let Some(x) = self.evaluate(&pol) else { break };
                let next = self.select(&x, |e| e.w.clone(), Self::exact_eq);
                if next == pol {
                    return Ok(self.finish(x, &pol));
                }
                if self.is_optimal(&x, &pol) {
                    let canonical = self.evaluate(&next).is_some_and(|y| y == x);
                    return Ok(self.finish(x, if canonical { &next } else { &pol }));
                }
                pol = next;
            }
        }
        Err(Error::Internal("no stable policy within the iteration cap".into()))
    }

    fn is_optimal(&self, x: &[T], pol: &Local) -> bool {
        (0..self.n()).filter(|&v| self.is_free(v)).all(|v| {
            let (p, m) = pol[v].unwrap();
            let val = |i: usize| self.out[v][i].w.clone() + x[self.out[v][i].dst].clone();
            let (vp, vm) = (val(p), val(m));
            (0..self.out[v].len()).all(|i| {
                let vi = val(i);
                (vi <= vp || Self::exact_eq(&vi, &vp)) && (vi >= vm || Self::exact_eq(&vi, &vm))
            })
        })
    }

    fn finish(&self, values: Vec<T>, pol: &Local) -> Solution<T> {
        let policy = (0..self.n())
            .map(|v| pol[v].map(|(p, m)| (self.out[v][p].id, self.out[v][m].id)))
            .collect();
        Solution { values, policy }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi, Q};

    fn edge<T>(id: usize, dst: usize, w: T) -> AvgEdge<T> {
        AvgEdge { id, dst, w }
    }

    // 0 -> {1, 2}, 2 -> {0, 3}; 1 is worth 1, 3 is worth 0.
    fn line() -> AvgGame<Q> {
        AvgGame {
            out: vec![vec![edge(0, 1, qi(0)), edge(1, 2, qi(0))], vec![], vec![edge(2, 0, qi(0)), edge(3, 3, qi(0))], vec![]],
            fixed: vec![None, Some(qi(1)), None, Some(qi(0))],
        }
    }

    #[test]
    fn exact_two_thirds() {
        let s = line().solve(1.0).unwrap();
        assert_eq!(s.values, vec![q(2, 3), qi(1), q(1, 3), qi(0)]);
        assert_eq!(s.policy[0], Some((0, 1)));
        assert_eq!(s.policy[2], Some((2, 3)));
    }

    #[test]
    fn float_agrees() {
        let g = line();
        let gf = AvgGame {
            out: g.out.iter().map(|es| es.iter().map(|e| edge(e.id, e.dst, 0.0)).collect()).collect(),
            fixed: g.fixed.iter().map(|f| f.as_ref().map(|x| x.as_f64())).collect(),
        };
        let s = gf.solve(1.0).unwrap();
        assert!((s.values[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn self_loop_ties_absorb() {
        // 0 has a zero-weight self-loop and an edge to the target 1, both worth 0.
        let g = AvgGame { out: vec![vec![edge(0, 0, qi(0)), edge(1, 1, qi(0))], vec![]], fixed: vec![None, Some(qi(0))] };
        let s = g.solve(0.0).unwrap();
        assert_eq!(s.values[0], qi(0));
        assert_eq!(s.policy[0], Some((1, 1)));
    }
}
