use super::{Action, Strategy, StrategyParams, View};
use crate::amount::Amount;
use crate::arena::{Arena, Player};
use crate::error::{domain, Result};
use crate::num::{fmt_q, q, Q};
use crate::richman::{min_rounds_for, reach_table, RichmanValues};

/// Wins within a fixed number of rounds: with `j` rounds left at `v` it bids
/// half the gap between its best and worst successor at level `j - 1` and
/// moves to the worst one (from the opponent's view).
pub struct RichmanWinner {
    player: Player,
    countdown: usize,
    left: usize,
    /// `plan[j - 1][v]`: bid and edge with `j` rounds left.
    plan: Vec<Vec<(Amount, usize)>>,
}

pub fn richman_winner_strategy(arena: &Arena, rv: &RichmanValues, player: Player, budget: &Q, start: usize, cap: usize) -> Result<RichmanWinner> {
    let (vr, vs) = arena.richman_sinks()?;
    let threshold = rv.threshold(player, start);
    if *budget <= threshold {
        return domain(format!("budget {} does not exceed the threshold {}", fmt_q(budget), fmt_q(&threshold)));
    }
    let countdown = min_rounds_for(arena, player, start, budget, cap)?
        .ok_or_else(|| crate::Error::Domain(format!("no winning countdown within {cap} rounds")))?;
    let goal = if player == Player::One { vr } else { vs };
    let table = reach_table(arena, goal, countdown.saturating_sub(1))?;
    let half = q(1, 2);
    let plan = (1..=countdown)
        .map(|j| {
            let row = &table[j - 1];
            (0..arena.n())
                .map(|v| {
                    let out = arena.out(v);
                    if out.is_empty() || arena.vertex(v).target.is_some() {
                        return (Amount::ZERO, 0);
                    }
                    let (mut hi, mut lo) = (out[0], out[0]);
                    for &e in &out[1..] {
                        let x = &row[arena.edge(e).dst];
                        if *x > row[arena.edge(hi).dst] {
                            hi = e;
                        }
                        if *x < row[arena.edge(lo).dst] {
                            lo = e;
                        }
                    }
                    let bid = (&row[arena.edge(hi).dst] - &row[arena.edge(lo).dst]) * &half;
                    (Amount::from_q(&bid), lo)
                })
                .collect()
        })
        .collect();
    Ok(RichmanWinner { player, countdown, left: countdown, plan })
}

impl RichmanWinner {
    pub fn countdown(&self) -> usize {
        self.countdown
    }

    /// The bid planned at `v` with `j` rounds left.
    pub fn planned(&self, j: usize, v: usize) -> Option<(Amount, usize)> {
        self.plan.get(j.checked_sub(1)?)?.get(v).copied()
    }
}

impl Strategy for RichmanWinner {
    fn name(&self) -> String {
        format!("richman-winner(player={},rounds={})", self.player, self.countdown)
    }

    fn act(&mut self, view: &View) -> Action {
        match self.planned(self.left, view.vertex) {
            Some((bid, edge)) => Action { bid: bid.min(view.budget), edge },
            None => Action { bid: Amount::ZERO, edge: view.arena.out(view.vertex)[0] },
        }
    }

    fn observe(&mut self, _rec: &super::RoundRecord, _me: Player) {
        self.left = self.left.saturating_sub(1);
    }

    fn params(&self) -> StrategyParams {
        StrategyParams { countdown: Some(self.countdown), ..Default::default() }
    }
}
