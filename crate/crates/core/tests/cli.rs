use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn bidgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidgame")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_exact_table() {
    let o = bidgame(&["solve", &fixture("detour-richman.game"), "--exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "v0\t2/3\nv1\t1\nv2\t1/3\nt\t0\n");
}

#[test]
fn float_solve_uses_twelve_digits() {
    let o = bidgame(&["solve", &fixture("detour-richman.game")]);
    let line = stdout(&o).lines().next().unwrap().to_string();
    let x = line.split('\t').nth(1).unwrap();
    assert!(x.starts_with("0.6666666"), "{x}");
    assert!(x.trim_start_matches("0.").len() <= 12);
}

#[test]
fn classify_two_loop() {
    let o = bidgame(&["--json", "classify", &fixture("two-loop.game")]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["tau"], 0);
    assert_eq!(v["W"]["u"], "0");
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "--json",
        "simulate",
        &fixture("two-loop.game"),
        "--p1=random:moves=uniform",
        "--p2=greedy:fraction=1/3",
        "--budget1=1/2",
        "--horizon=200",
        "--seed=1",
    ];
    let a = bidgame(&args);
    let b = bidgame(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<serde_json::Value> = stdout(&a).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 201);
    assert_eq!(lines[200]["type"], "summary");
}

#[test]
fn exit_codes() {
    let g = fixture("detour-richman.game");
    assert_eq!(bidgame(&["solve", &g, "--unknown"]).status.code(), Some(2));
    assert_eq!(bidgame(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bidgame(&["solve", &g, "--tol=-1"]).status.code(), Some(2));
    assert_eq!(bidgame(&["oracle", &g, "--grid=1"]).status.code(), Some(2));
    assert_eq!(bidgame(&["simulate", &g, "--p1=nope", "--p2=random", "--budget1=1/2", "--horizon=5"]).status.code(), Some(2));
    assert_eq!(bidgame(&["simulate", &g, "--p1=random:speed=3", "--p2=random", "--budget1=1/2", "--horizon=5"]).status.code(), Some(2));
    assert_eq!(bidgame(&["solve", "/nonexistent.game"]).status.code(), Some(1));
    assert_eq!(bidgame(&["classify", &g]).status.code(), Some(1));
    assert_eq!(bidgame(&["strategy", &fixture("two-loop.game"), "--player=max", "--budget=1/2"]).status.code(), Some(1));
    assert_eq!(bidgame(&["simulate", &g, "--p1=random", "--p2=random", "--budget1=2", "--horizon=5"]).status.code(), Some(1));
    assert_eq!(bidgame(&["--help"]).status.code(), Some(0));
}

#[test]
fn tiebreak_override_changes_the_winner() {
    let run = |tie: &str| {
        let o = bidgame(&[
            "--json",
            &format!("--tiebreak={tie}"),
            "simulate",
            &fixture("two-loop.game"),
            "--p1=greedy:fraction=0",
            "--p2=greedy:fraction=0",
            "--budget1=1/2",
            "--horizon=1",
        ]);
        let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
        first["winner"].as_u64().unwrap()
    };
    assert_eq!(run("player1"), 1);
    assert_eq!(run("player2"), 2);
}

#[test]
fn play_reprompts_on_illegal_bids() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bidgame"))
        .args(["--json", "play", &fixture("detour-richman.game"), "--as=1", "--against=allin", "--budget1=0.76", "--horizon=5"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"0.9 e1\n0.5 nowhere\n0.3 e1\n0.2 t\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.matches("illegal").count(), 2, "{err}");
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["bids"][0], 0.3);
    assert_eq!(lines.last().unwrap()["type"], "summary");
}

#[test]
fn reduce_and_unwind_emit_loadable_games() {
    for args in [
        vec!["reduce".to_string(), fixture("detour-reach.game"), "--to=richman".into()],
        vec!["reduce".to_string(), fixture("detour-parity.game"), "--to=richman".into()],
        vec!["unwind".to_string(), fixture("buchi.game"), "--k=2".into(), "--cycle=c1,c2".into(), "--accepting=f".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = bidgame(&args);
        assert_eq!(o.status.code(), Some(0));
        bidgame::load_arena(&stdout(&o)).unwrap();
    }
    let ssg = bidgame(&["reduce", &fixture("detour-richman.game"), "--to=ssg"]);
    assert!(stdout(&ssg).contains("kind=chance"));
}

#[test]
fn batch_report_has_every_seed() {
    let o = bidgame(&[
        "--json",
        "simulate",
        &fixture("two-loop.game"),
        "--p1=tit-for-tat",
        "--p2=random:moves=max",
        "--budget1=1/2",
        "--horizon=100",
        "--seeds=3..7",
    ]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let seeds: Vec<u64> = lines.iter().filter_map(|l| l["seed"].as_u64()).collect();
    assert_eq!(seeds, vec![3, 4, 5, 6]);
    assert_eq!(lines.last().unwrap()["type"], "report");
    assert_eq!(lines.last().unwrap()["episodes"], 4);
}
