use super::{distances_to, Action, Drawer, Strategy, StrategyParams, View};
use crate::amount::Amount;
use crate::arena::{Arena, ObjectiveKind, Player};
use crate::error::{domain, Result};
use crate::num::{fmt_q, q, Q};
use crate::parity::{classify_bsccs, parity_thresholds};
use crate::richman::richman_exact;
use num_traits::{One, Zero};

/// Outside its winning bottom components the strategy bids half its own
/// threshold gap plus `eps · 2^-dist` and steps toward the cheapest
/// successor; once its budget covers `dist` straight wins it outbids
/// everything. Inside a winning component it keeps pulling the play back to
/// the vertex of largest parity.
pub struct ParityMemoryless {
    player: Player,
    eps: Q,
    /// Per vertex: half the threshold gap, distance to the winning region and the edge to take.
    outside: Vec<Option<(Amount, u32, usize)>>,
    /// Per vertex: index into `drawers` when inside a winning component.
    inside: Vec<Option<usize>>,
    drawers: Vec<(usize, Drawer)>,
    entered: Option<usize>,
    start: String,
}

pub fn parity_memoryless_strategy(arena: &Arena, player: Player, start: usize, budget: &Q) -> Result<ParityMemoryless> {
    let n = arena.n();
    let (rv, components) = match arena.objective {
        ObjectiveKind::Parity => {
            let comps: Vec<(Vec<usize>, usize)> =
                classify_bsccs(arena)?.into_iter().filter(|c| c.winner == player).map(|c| (c.vertices, c.witness)).collect();
            (parity_thresholds(arena)?, comps)
        }
        ObjectiveKind::Richman => {
            let (vr, vs) = arena.richman_sinks()?;
            let goal = if player == Player::One { vr } else { vs };
            (richman_exact(arena)?, vec![(vec![goal], goal)])
        }
        _ => return domain("the memoryless strategy needs a parity or richman game"),
    };
    let own: Vec<Q> = (0..n).map(|v| rv.threshold(player, v)).collect();
    let mut region = vec![false; n];
    let mut inside = vec![None; n];
    for (k, (c, _)) in components.iter().enumerate() {
        for &v in c {
            region[v] = true;
            inside[v] = Some(k);
        }
    }
    let start_threshold = if region[start] { Q::zero() } else { own[start].clone() };
    if *budget <= start_threshold || *budget > Q::one() {
        return domain(format!("budget {} must exceed the threshold {} and be at most 1", fmt_q(budget), fmt_q(&start_threshold)));
    }
    let best = |v: usize| arena.successors(v).map(|d| &own[d]).min().cloned();
    let optimal = |e: usize| {
        let ed = arena.edge(e);
        !region[ed.src] && best(ed.src).as_ref() == Some(&own[ed.dst])
    };
    let dist = distances_to(arena, &region.iter().enumerate().filter(|(_, &r)| r).map(|(v, _)| v).collect::<Vec<_>>(), optimal);
    let half = q(1, 2);
    let outside = (0..n)
        .map(|v| {
            if region[v] || arena.out(v).is_empty() {
                return None;
            }
            let lo = best(v)?;
            let hi = arena.successors(v).map(|d| &own[d]).max().cloned()?;
            let edge = arena.out(v).iter().copied().filter(|&e| optimal(e)).min_by_key(|&e| (dist[arena.edge(e).dst], e))?;
            Some((Amount::from_q(&((hi - lo) * &half)), dist[v], edge))
        })
        .collect();
    let drawers = components
        .iter()
        .map(|(c, w)| {
            let mut mask = vec![false; n];
            for &v in c {
                mask[v] = true;
            }
            (*w, Drawer::new(arena, *w, &mask, Amount::from_q(budget)))
        })
        .collect();
    Ok(ParityMemoryless { player, eps: budget - start_threshold, outside, inside, drawers, entered: None, start: arena.name(start).to_string() })
}

impl Strategy for ParityMemoryless {
    fn name(&self) -> String {
        format!("parity-memoryless(player={})", self.player)
    }

    fn act(&mut self, view: &View) -> Action {
        let v = view.vertex;
        if let Some(k) = self.inside[v] {
            let (witness, drawer) = &mut self.drawers[k];
            let fresh = self.entered != Some(k);
            self.entered = Some(k);
            if v == *witness || fresh {
                drawer.eps = view.budget;
            }
            return drawer.action(view);
        }
        self.entered = None;
        let Some((gap, d, edge)) = self.outside[v] else {
            return Action { bid: Amount::ZERO, edge: view.arena.out(v)[0] };
        };
        let d = d.min(1000) as f64;
        let reach = Amount::exp2(-d);
        let opp = Amount::one() - view.budget;
        let bid = if view.budget > Amount::one() - reach {
            opp + (reach - opp) * 0.5
        } else {
            gap + Amount::from_q(&self.eps) * reach
        };
        Action { bid: bid.min(view.budget), edge }
    }

    fn params(&self) -> StrategyParams {
        StrategyParams { epsilon: Some(fmt_q(&self.eps)), start: Some(self.start.clone()), ..Default::default() }
    }
}
