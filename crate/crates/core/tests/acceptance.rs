//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Quantities the CLI exposes are read from its JSON-lines output;
//! the rest come from library calls.

use bidgame::arena::{load_arena, Arena};
use bidgame::gen::{random_parity_scc, random_richman};
use bidgame::meanpayoff::{contributions, scale_z, scale_z_tilde, weighted_richman, weighted_richman_with, z_general, z_recurrent};
use bidgame::num::{fmt_q, parse_q, q, qi, Q};
use bidgame::richman::{markov_reach_check, richman_exact};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn fixture(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn scratch_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("bidgame-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_game(name: &str, arena: &Arena) -> String {
    let p = scratch_dir().join(name);
    std::fs::write(&p, arena.to_text()).unwrap();
    p.to_string_lossy().into_owned()
}

/// Runs the CLI in JSON mode and parses every output line.
fn cli(args: &[&str]) -> Result<Vec<Value>, String> {
    let mut argv = vec!["bidgame".to_string(), "--json".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = bidgame::cli::run(argv, &mut out, &mut std::io::empty(), &mut err);
    if code != 0 {
        return Err(format!("`{}` exited {code}: {}", args.join(" "), String::from_utf8_lossy(&err).trim()));
    }
    String::from_utf8(out)
        .map_err(|e| e.to_string())?
        .lines()
        .map(|l| serde_json::from_str(l).map_err(|e| format!("bad JSON line {l}: {e}")))
        .collect()
}

fn rational(v: &Value) -> Result<Q, String> {
    v.as_str().and_then(parse_q).ok_or_else(|| format!("not a rational: {v}"))
}

/// `vertex -> threshold` rows of `solve` or `thresholds`.
fn threshold_rows(rows: &[Value]) -> Result<Vec<(String, String)>, String> {
    rows.iter()
        .map(|r| Ok((r["vertex"].as_str().ok_or("row without vertex")?.to_string(), r["threshold"].as_str().ok_or("row without threshold")?.to_string())))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_thresholds() -> Outcome {
    let rows = threshold_rows(&cli(&["solve", &fixture("detour-richman.game"), "--exact"])?)?;
    let want = [("v0", "2/3"), ("v1", "1"), ("v2", "1/3"), ("t", "0")];
    for (v, x) in want {
        let got = rows.iter().find(|(n, _)| n == v).map(|(_, x)| x.as_str());
        ensure(got == Some(x), || format!("{v}: expected {x}, got {got:?}"))?;
    }
    ensure(rows.len() == want.len(), || format!("{} rows", rows.len()))?;
    Ok("t=0 v1=1 v0=2/3 v2=1/3".into())
}

fn prompt_bound() -> Outcome {
    let file = fixture("detour-richman.game");
    let params = cli(&["strategy", &file, "--kind=richman", "--player=1", "--budget=0.76", "--start=v0"])?;
    let countdown = params[0]["params"]["countdown"].as_u64();
    ensure(countdown == Some(2), || format!("rounds needed at v0 with 0.76: {countdown:?}"))?;
    let rows = threshold_rows(&cli(&["solve", &file, "--rounds=2"])?)?;
    let v0 = rows.iter().find(|(n, _)| n == "v0").map(|(_, x)| x.clone());
    ensure(v0.as_deref() == Some("3/4"), || format!("two-round value at v0: {v0:?}"))?;
    Ok("2 rounds, two-round value 3/4".into())
}

fn richman_instances() -> Vec<(String, Arena)> {
    let detour = load_arena(&std::fs::read_to_string(fixture("detour-richman.game")).unwrap()).unwrap();
    let mut out = vec![("detour-richman".to_string(), detour)];
    for s in 0..20u64 {
        out.push((format!("random{s}"), random_richman(s, 3 + (s as usize % 8)).unwrap()));
    }
    out
}

fn markov_correspondence() -> Outcome {
    let games = richman_instances();
    for (name, a) in &games {
        let rv = richman_exact(a).map_err(|e| format!("{name}: {e}"))?;
        let rep = markov_reach_check(a, &rv).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.ok(), || format!("{name}: residuals {:?}", rep.residuals.iter().map(fmt_q).collect::<Vec<_>>()))?;
        ensure(rep.residuals.iter().all(|r| *r == qi(0)), || format!("{name}: non-zero residual"))?;
    }
    Ok(format!("{} games, zero residual", games.len()))
}

fn ssg_reduction() -> Outcome {
    let games = richman_instances();
    let mut worst = 0.0f64;
    for (name, a) in &games {
        let file = write_game(&format!("{name}.game"), a);
        let exact = threshold_rows(&cli(&["solve", &file, "--exact"])?)?;
        let float = threshold_rows(&cli(&["solve", &file, "--tol=1e-9"])?)?;
        for ((v, x), (_, f)) in exact.iter().zip(&float) {
            let r = bidgame::num::q_to_f64(&parse_q(x).ok_or("bad exact value")?);
            let f: f64 = f.parse().map_err(|_| format!("bad float {f}"))?;
            let err = (f - r).abs();
            worst = worst.max(err);
            ensure(err < 1e-8, || format!("{name}/{v}: {f} vs {x}"))?;
        }
    }
    Ok(format!("{} games, max error {worst:.1e}", games.len()))
}

fn check_bracket(name: &str, exact: &[(String, String)], oracle: &[Value]) -> Result<(), String> {
    for ((v, x), row) in exact.iter().zip(oracle) {
        let r = parse_q(x).ok_or("bad exact value")?;
        let slack = q(1, 32);
        match (&row["lower"], &row["upper"]) {
            (Value::Null, Value::Null) => ensure(r >= qi(1) - slack, || format!("{name}/{v}: no winning budget but R = {x}"))?,
            (lo, hi) => {
                let (lo, hi) = (rational(lo)?, rational(hi)?);
                ensure(lo.clone() - &slack <= r && r <= hi.clone() + &slack, || format!("{name}/{v}: R = {x} outside [{}, {}]", fmt_q(&lo), fmt_q(&hi)))?;
            }
        }
    }
    Ok(())
}

fn oracle_bracketing() -> Outcome {
    let mut checked = 0;
    let mut files = vec![];
    for entry in std::fs::read_dir(fixtures()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let a = load_arena(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if a.n() <= 6 {
            files.push(path.to_string_lossy().into_owned());
        }
    }
    files.sort();
    for (name, a) in richman_instances() {
        if a.n() <= 6 {
            files.push(write_game(&format!("{name}.game"), &a));
        }
    }
    for file in &files {
        // Non-reachability games are judged on their collapsed richman game.
        let rows = cli(&["reduce", file, "--to=richman"])?;
        let reduced = load_arena(rows[0]["text"].as_str().ok_or("reduce without text")?).map_err(|e| e.to_string())?;
        let target = write_game(&format!("reduced-{}", Path::new(file).file_name().unwrap().to_string_lossy()), &reduced);
        let exact = threshold_rows(&cli(&["solve", &target, "--exact"])?)?;
        let oracle = cli(&["oracle", &target, "--grid=32", "--horizon=64"])?;
        check_bracket(file, &exact, &oracle)?;
        checked += 1;
    }
    Ok(format!("{checked} games within 1/32"))
}

fn parity_classification() -> Outcome {
    let mut agree = 0;
    for s in 0..50u64 {
        let a = random_parity_scc(s, 1 + (s as usize % 8)).map_err(|e| e.to_string())?;
        let file = write_game(&format!("parity{s}.game"), &a);
        let class = cli(&["classify", &file])?;
        ensure(class.len() == 1, || format!("parity{s}: {} bottom components", class.len()))?;
        let claimed = class[0]["winner"].as_u64();
        let probe = cli(&["oracle", &file, "--grid=32", "--horizon=200", "--budget1=1/2"])?;
        let seen = match probe[0]["winner"].as_str() {
            Some("One") => Some(1),
            Some("Two") => Some(2),
            _ => None,
        };
        ensure(claimed == seen, || format!("parity{s}: classified {claimed:?}, oracle {seen:?}"))?;
        agree += 1;
    }
    Ok(format!("{agree}/50 agree"))
}

fn weighted_identities() -> Outcome {
    for (file, want) in [("two-loop.game", qi(0)), ("biased-loop.game", q(-1, 2)), ("pos-loop.game", q(1, 2))] {
        let rows = cli(&["classify", &fixture(file)])?;
        let w = rational(&rows[0]["W"]["u"])?;
        ensure(w == want, || format!("{file}: W(u) = {}", fmt_q(&w)))?;
    }
    let mut scaled = 0;
    for file in ["two-loop.game", "biased-loop.game", "pos-loop.game", "general3.game"] {
        let a = load_arena(&std::fs::read_to_string(fixture(file)).unwrap()).map_err(|e| e.to_string())?;
        for base in 0..a.n() {
            let wrv = weighted_richman(&a, base).map_err(|e| e.to_string())?;
            let cont = contributions(&a, &wrv).map_err(|e| e.to_string())?;
            ensure(cont.total == wrv.w_of_u, || format!("{file}: contribution sum {} vs {}", fmt_q(&cont.total), fmt_q(&wrv.w_of_u)))?;
            if wrv.w_of_u <= qi(0) {
                continue;
            }
            if let Some(z) = z_recurrent(&a, &wrv, &cont).map_err(|e| e.to_string())? {
                let wz = weighted_richman_with(&a, base, &scale_z(&a, &bidgame::num::q_to_f64(&z)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                ensure(wz.w_of_u.abs() < 1e-12, || format!("{file}: scaled value {}", wz.w_of_u))?;
            }
            if let Some(z) = z_general(&a, &wrv, &cont).map_err(|e| e.to_string())? {
                let wt = weighted_richman_with(&a, base, &scale_z_tilde(&a, &z).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                ensure(wt.w_of_u.abs() < 1e-12, || format!("{file}: doubly scaled value {}", wt.w_of_u))?;
            }
            scaled += 1;
        }
    }
    Ok(format!("W(u) = 0, -1/2, 1/2; contribution sums exact; {scaled} scaled bases vanish"))
}

fn monitor(summary: &Value, key: &str) -> (u64, u64) {
    let m = &summary["monitors"][key];
    (m["checked"].as_u64().unwrap_or(0), m["failed"].as_u64().unwrap_or(u64::MAX))
}

/// Per-episode summaries of a simulation: a seed batch or a single run.
fn summaries(args: &[&str]) -> Result<Vec<Value>, String> {
    Ok(cli(args)?.into_iter().filter(|l| l["type"] == "summary").collect())
}

fn min_guarantee() -> Outcome {
    let mut episodes = 0;
    let mut worst = None::<Q>;
    for file in ["two-loop.game", "biased-loop.game"] {
        for tie in ["player1", "player2"] {
            let f = fixture(file);
            let tie = format!("--tiebreak={tie}");
            let base = ["simulate", f.as_str(), tie.as_str(), "--p1=min-mp:delta=1/10", "--budget1=1/5", "--energy=10", "--horizon=10000"];
            let mut runs = vec![];
            for p2 in ["--p2=random:moves=max", "--p2=greedy:moves=max", "--p2=allin:moves=max"] {
                let mut args = base.to_vec();
                args.push(p2);
                args.push(if p2.contains("random") { "--seeds=0..20" } else { "--summary-only" });
                runs.extend(summaries(&args)?);
            }
            for s in &runs {
                let who = format!("{file} {tie} vs {}", s["players"][1]);
                ensure(s["abort"].is_null(), || format!("{who}: aborted"))?;
                for key in ["legality", "budget_conservation", "min_potential", "min_budget_floor"] {
                    let (checked, failed) = monitor(s, key);
                    ensure(checked > 0 && failed == 0, || format!("{who}: {key} {failed}/{checked} failed"))?;
                }
                ensure(s["hit_zero"] == true || monitor(s, "min_budget_floor").1 == 0, || format!("{who}: energy escaped"))?;
                let mp = rational(&s["mean_payoff"])?;
                ensure(mp <= q(1, 100), || format!("{who}: mean payoff {}", fmt_q(&mp)))?;
                if worst.as_ref().is_none_or(|w| mp > *w) {
                    worst = Some(mp);
                }
                episodes += 1;
            }
        }
    }
    Ok(format!("{episodes} episodes, largest mean payoff {}", worst.map_or("-".into(), |w| fmt_q(&w))))
}

fn max_guarantee() -> Outcome {
    let mut episodes = 0;
    let mut worst = f64::INFINITY;
    for (file, kind) in [("pos-loop.game", "--p2=max-recurrent"), ("general3.game", "--p2=max-general")] {
        let f = fixture(file);
        let base = ["simulate", f.as_str(), kind, "--budget1=1/10", "--horizon=100000"];
        let mut runs = vec![];
        for p1 in ["--p1=random:moves=min", "--p1=greedy:moves=min", "--p1=allin:moves=min"] {
            let mut args = base.to_vec();
            args.push(p1);
            args.push(if p1.contains("random") { "--seeds=0..20" } else { "--summary-only" });
            runs.extend(summaries(&args)?);
        }
        for s in &runs {
            let who = format!("{file} vs {}", s["players"][0]);
            ensure(s["abort"].is_null(), || format!("{who}: aborted"))?;
            let lo = rational(&s["min_energy"])?;
            ensure(lo > qi(0), || format!("{who}: energy fell to {}", fmt_q(&lo)))?;
            for key in ["legality", "budget_conservation", "max_potential", "currency_invariant"] {
                let (checked, failed) = monitor(s, key);
                ensure(checked > 0 && failed == 0, || format!("{who}: {key} {failed}/{checked} failed"))?;
            }
            let mp = rational(&s["mean_payoff"])?;
            ensure(mp >= q(1, 1000), || format!("{who}: mean payoff {}", fmt_q(&mp)))?;
            worst = worst.min(bidgame::num::q_to_f64(&mp));
            episodes += 1;
        }
    }
    Ok(format!("{episodes} episodes, smallest mean payoff {worst:.4}"))
}

fn level(name: &str) -> Option<usize> {
    name.rsplit_once('@').and_then(|(_, l)| l.parse().ok())
}

fn non_promptness() -> Outcome {
    let g = fixture("buchi.game");
    let mut plays = 0;
    let mut resets = 0;
    for k in [1usize, 3, 5] {
        let rows = cli(&["unwind", &g, &format!("--k={k}"), "--cycle=c1,c2", "--accepting=f"])?;
        let a = load_arena(rows[0]["text"].as_str().ok_or("unwind without text")?).map_err(|e| e.to_string())?;
        let file = write_game(&format!("unwound{k}.game"), &a);
        for (v, x) in threshold_rows(&cli(&["solve", &file, "--exact"])?)? {
            if level(&v) == Some(0) {
                ensure(x == "1", || format!("k={k}: Player 2 threshold at {v} is 1 - {x}"))?;
            }
        }
        let mut opponents: Vec<String> = (0..10).map(|s| format!("--p1=random:moves=uniform,seed={s}")).collect();
        opponents.push("--p1=greedy:moves=uniform".into());
        opponents.push("--p1=allin".into());
        for p1 in &opponents {
            let lines = cli(&["simulate", &file, p1, "--p2=richman", "--budget1=19/20", "--horizon=100000", "--start=f@0"])?;
            let visited: Vec<&str> = lines.iter().filter(|l| l["type"] == "round").filter_map(|l| l["to"].as_str()).collect();
            let summary = lines.last().ok_or("no summary")?;
            ensure(summary["absorbed"] == 2, || format!("k={k} {p1}: play not absorbed at Player 2's target"))?;
            // An opponent with most of the money can force early visits to f;
            // after the last one, the play must climb all k levels.
            let resumed = visited.iter().rposition(|v| v.starts_with("f@")).map_or(0, |i| i + 1);
            let top = visited[resumed..].iter().filter_map(|v| level(v)).max().unwrap_or(0);
            ensure(top == k, || format!("k={k} {p1}: reached level {top} after the last visit to f"))?;
            let last = visited[resumed..].iter().filter_map(|v| level(v)).collect::<Vec<_>>();
            ensure(last.windows(2).all(|w| w[1] >= w[0]), || format!("k={k} {p1}: level dropped without visiting f"))?;
            resets += visited.len() - visited[resumed..].len();
            plays += 1;
        }
    }
    Ok(format!("level-0 thresholds 0 for k = 1, 3, 5; {plays} plays finish k traversals free of f ({resets} rounds before the last visit)"))
}

fn tit_for_tat() -> Outcome {
    let f = fixture("two-loop.game");
    let runs = summaries(&["simulate", &f, "--p1=tit-for-tat", "--p2=random:moves=max", "--budget1=1/2", "--energy=0", "--horizon=10000", "--seeds=0..50"])?;
    ensure(runs.len() == 50, || format!("{} episodes", runs.len()))?;
    let mut rounds = 0;
    for s in &runs {
        ensure(s["abort"].is_null(), || format!("seed {}: aborted", s["seed"]))?;
        let (checked, failed) = monitor(s, "matching_energy");
        ensure(checked > 0 && failed == 0, || format!("seed {}: {failed}/{checked} prefixes violate the matching invariant", s["seed"]))?;
        rounds += s["rounds"].as_u64().unwrap_or(0);
    }
    Ok(format!("50 opponents, {rounds} rounds"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("exact thresholds", 1, exact_thresholds),
        ("prompt bound", 1, prompt_bound),
        ("Markov correspondence", 10, markov_correspondence),
        ("stochastic game reduction", 30, ssg_reduction),
        ("oracle bracketing", 60, oracle_bracketing),
        ("bottom component parity classification", 120, parity_classification),
        ("weighted richman identities", 5, weighted_identities),
        ("Min guarantee", 120, min_guarantee),
        ("Max guarantee", 300, max_guarantee),
        ("non-promptness", 30, non_promptness),
        ("tit-for-tat invariant", 30, tit_for_tat),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = run();
        let took = t0.elapsed();
        let outcome = match outcome {
            Ok(d) if took > Duration::from_secs(*limit) => Err(format!("{d}, but took {took:.1?} (limit {limit} s)")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    let _ = std::fs::remove_dir_all(scratch_dir());
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
