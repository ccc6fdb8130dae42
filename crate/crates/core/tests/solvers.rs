use bidgame::gen::random_richman;
use bidgame::num::{q, q_to_f64, qi, Q};
use bidgame::oracle::{discrete_backward_induction, naive_layer};
use bidgame::richman::{build_ssg, markov_reach_check, min_win_rounds, richman_exact, richman_iterate, solve_ssg};
use bidgame::{load_arena, Arena};
use proptest::prelude::*;

fn fixture(name: &str) -> Arena {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    load_arena(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn values_by_name(a: &Arena) -> Vec<(String, Q)> {
    let rv = richman_exact(a).unwrap();
    (0..a.n()).map(|v| (a.name(v).to_string(), rv.values[v].clone())).collect()
}

fn expect(a: &Arena, want: &[(&str, Q)]) {
    let got = values_by_name(a);
    for (name, x) in want {
        let found = got.iter().find(|(n, _)| n == name).map(|(_, y)| y);
        assert_eq!(found, Some(x), "value at {name}");
    }
}

// Frozen from float value iteration (20000 sweeps) rounded to small denominators.
const FIVE_BRANCH: &str = "objective richman
vertex a
vertex b
vertex c
vertex d
vertex e
vertex t target=1
vertex s target=2
edge a b
edge a c
edge b a
edge b d
edge b s
edge c e
edge c t
edge d a
edge d e
edge e t
edge e s
edge e c
";

#[test]
fn frozen_values_against_value_iteration() {
    let a = load_arena(FIVE_BRANCH).unwrap();
    expect(&a, &[("a", q(1, 2)), ("b", q(3, 4)), ("c", q(1, 4)), ("d", q(1, 2)), ("e", q(1, 2)), ("t", qi(0)), ("s", qi(1))]);
}

#[test]
fn gamblers_ruin_line() {
    let a = load_arena(
        "objective richman\nvertex x0\nvertex x1\nvertex x2\nvertex x3\nvertex t target=1\nvertex s target=2\n\
         edge x0 t\nedge x0 x1\nedge x1 x0\nedge x1 x2\nedge x2 x1\nedge x2 x3\nedge x3 x2\nedge x3 s\n",
    )
    .unwrap();
    expect(&a, &[("x0", q(1, 5)), ("x1", q(2, 5)), ("x2", q(3, 5)), ("x3", q(4, 5))]);
}

#[test]
fn detour_values_and_rounds() {
    let a = fixture("detour-richman.game");
    expect(&a, &[("v0", q(2, 3)), ("v1", qi(1)), ("v2", q(1, 3)), ("t", qi(0))]);
    let v0 = a.require("v0").unwrap();
    assert_eq!(min_win_rounds(&a, v0, &q(76, 100), 100).unwrap(), Some(2));
    assert_eq!(min_win_rounds(&a, v0, &q(2, 3), 100).unwrap(), None);
    assert_eq!(richman_iterate(&a, 2).unwrap()[v0], q(3, 4));
}

#[test]
fn reachability_matches_its_richman_form() {
    let reach = fixture("detour-reach.game");
    let rich = fixture("detour-richman.game");
    let r = values_by_name(&bidgame::richman::reach_to_richman(&reach).unwrap());
    let s = values_by_name(&rich);
    for (name, x) in &s {
        if let Some((_, y)) = r.iter().find(|(n, _)| n == name) {
            assert_eq!(x, y, "{name}");
        }
    }
}

#[test]
fn iterates_decrease_to_the_threshold() {
    let a = fixture("detour-richman.game");
    let exact = richman_exact(&a).unwrap().values;
    let mut prev = richman_iterate(&a, 0).unwrap();
    for k in 1..40 {
        let cur = richman_iterate(&a, k).unwrap();
        for v in 0..a.n() {
            assert!(cur[v] <= prev[v]);
            assert!(cur[v] >= exact[v]);
        }
        prev = cur;
    }
    assert!((q_to_f64(&prev[0]) - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn parity_and_mean_payoff_thresholds() {
    let p = bidgame::parity::parity_thresholds(&fixture("detour-parity.game")).unwrap();
    assert_eq!(p.values, vec![q(2, 3), qi(1), q(1, 3), qi(0)]);
    let w = bidgame::meanpayoff::weighted_richman(&fixture("biased-loop.game"), 0).unwrap();
    assert_eq!(w.w_of_u, q(-1, 2));
}

#[test]
fn naive_layers_match_the_table() {
    for s in 0..6u64 {
        let a = random_richman(s, 3 + (s as usize % 3)).unwrap();
        let tab = discrete_backward_induction(&a, 8, 6).unwrap();
        for t in 1..=6 {
            for round in 0..2 {
                let naive = naive_layer(&a, &tab, t, round);
                for v in 0..a.n() {
                    for i in 0..=8 {
                        assert_eq!(naive[v][i], tab.wins(t, round, v, i), "seed {s} t {t} round {round} v {v} i {i}");
                    }
                }
            }
        }
    }
}

#[test]
fn oracle_rejects_bad_sizes() {
    let a = fixture("detour-richman.game");
    assert!(discrete_backward_induction(&a, 1, 4).is_err());
    assert!(discrete_backward_induction(&a, 8, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn values_average_their_extreme_successors(seed in 0u64..10_000, n in 3usize..12) {
        let a = random_richman(seed, n).unwrap();
        let rv = richman_exact(&a).unwrap();
        let reach_t = a.can_reach(&[a.richman_sinks().unwrap().0]);
        for v in 0..a.n() {
            let x = &rv.values[v];
            prop_assert!(*x >= qi(0) && *x <= qi(1));
            if a.vertex(v).target.is_some() || !reach_t[v] {
                continue;
            }
            let succ: Vec<&Q> = a.successors(v).map(|d| &rv.values[d]).collect();
            let hi = succ.iter().max().unwrap();
            let lo = succ.iter().min().unwrap();
            prop_assert_eq!(x.clone(), (*hi + *lo) / qi(2));
        }
        prop_assert!(markov_reach_check(&a, &rv).unwrap().ok());
    }

    #[test]
    fn stochastic_game_agrees(seed in 0u64..10_000, n in 3usize..10) {
        let a = random_richman(seed, n).unwrap();
        let rv = richman_exact(&a).unwrap();
        let ssg = build_ssg(&a).unwrap();
        let val = solve_ssg(&ssg, 1e-9).unwrap();
        for v in 0..a.n() {
            prop_assert!((val[ssg.entry[v]] + q_to_f64(&rv.values[v]) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn discrete_tables_are_monotone(seed in 0u64..10_000, n in 3usize..7) {
        let a = random_richman(seed, n).unwrap();
        let tab = discrete_backward_induction(&a, 16, 24).unwrap();
        prop_assert!(tab.is_monotone());
    }
}
