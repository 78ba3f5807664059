use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_syncmdp"))
}

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(format!("{name}.mdp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn verdict(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("verdict json")
}

fn check(name: &str, extra: &[&str]) -> Output {
    let path = model(name);
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn cobuchi_strong_almost_yes_sure_no() {
    let o = check("coBuchi", &["--objective", "strong", "--mode", "almost"]);
    assert_eq!(o.status.code(), Some(0));
    let v = verdict(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["witness"]["kind"], "safety_region");
    assert_eq!(v["witness"]["safe"], serde_json::json!(["q2"]));

    let o = check("coBuchi", &["--objective", "strong", "--mode", "sure"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(verdict(&o)["verdict"], "no");
}

#[test]
fn limit_and_almost_print_the_same_verdict() {
    for name in ["coBuchi", "weak-limit", "strong-max-memory"] {
        for objective in ["weak", "strong"] {
            let a = check(name, &["--objective", objective, "--mode", "almost"]);
            let l = check(name, &["--objective", objective, "--mode", "limit"]);
            assert_eq!(a.status.code(), l.status.code());
            let (mut a, mut l) = (verdict(&a), verdict(&l));
            for v in [&mut a, &mut l] {
                let o = v.as_object_mut().unwrap();
                o.remove("query");
                o.remove("stats");
            }
            assert_eq!(a, l, "{name} {objective}");
        }
    }
}

#[test]
fn parse_errors_exit_above_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mdp");
    fs::write(&path, "states: q r\nactions: a\ntrans: q a r 9/10\ntrans: r a r 1\n").unwrap();
    let o = run(&[
        "check",
        path.to_str().unwrap(),
        "--objective",
        "event",
        "--mode",
        "sure",
        "--target",
        "r",
        "--init",
        "q",
    ]);
    assert!(o.status.code().unwrap() > 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_target_is_an_error() {
    let o = check(
        "coBuchi",
        &["--objective", "event", "--mode", "sure", "--target", "nowhere"],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn prime_cycle_two_is_the_fixture() {
    let o = run(&["generate", "--family", "prime-cycle", "--n", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), fs::read_to_string(model("exp-mem-weakly")).unwrap());
}

#[test]
fn generation_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("mbc{i}.mdp"));
        let o = run(&[
            "generate",
            "--family",
            "mbc",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        texts.push(fs::read_to_string(out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let other = run(&["generate", "--family", "mbc", "--seed", "8"]);
    assert_ne!(stdout(&other), texts[0]);
}

#[test]
fn generate_count_writes_a_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "generate",
        "--family",
        "random",
        "--count",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);
    let o = run(&["oracle-compare", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn trace_horizon_zero_is_the_initial_row() {
    let path = model("coBuchi");
    let o = run(&[
        "trace",
        path.to_str().unwrap(),
        "--objective",
        "strong",
        "--mode",
        "almost",
        "--horizon",
        "0",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit()))
        .collect();
    assert_eq!(rows, ["0,1.000000,0.000000,0.000000,1.000000,1.000000,1,1"]);
}

#[test]
fn sure_weak_trace_synchronizes_periodically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m2.csv");
    let path = model("exp-mem-weakly");
    let o = run(&[
        "trace",
        path.to_str().unwrap(),
        "--objective",
        "weak",
        "--mode",
        "sure",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "sum_T_exact").unwrap();
    let hits: Vec<usize> = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|r| r[col] == "1")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(hits.len(), 3, "{hits:?}");
    assert!(hits.windows(2).all(|w| w[1] - w[0] == 8), "{hits:?}");
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["satisfied"], true);
    assert_eq!(report["label"], "empirical");
}

#[test]
fn saved_verdicts_reverify() {
    let dir = tempfile::tempdir().unwrap();
    for (name, objective, mode) in [
        ("exp-mem-weakly", "weak", "sure"),
        ("weak-limit", "weak", "almost"),
        ("coBuchi", "strong", "almost"),
        ("strong-max-memory", "strong", "sure"),
    ] {
        let out = dir.path().join(format!("{name}.json"));
        let function = if name == "strong-max-memory" { "max" } else { "sum" };
        let o = check(
            name,
            &[
                "--objective",
                objective,
                "--mode",
                mode,
                "--function",
                function,
                "--out",
                out.to_str().unwrap(),
            ],
        );
        assert_eq!(o.status.code(), Some(0), "{name}");
        let path = model(name);
        let o = run(&["verify-witness", path.to_str().unwrap(), out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn tampered_verdicts_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = check(
        "exp-mem-weakly",
        &["--objective", "weak", "--mode", "sure", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let n = v["witness"]["n"].as_u64().unwrap();
    v["witness"]["n"] = (n + 1).into();
    fs::write(&out, v.to_string()).unwrap();
    let path = model("exp-mem-weakly");
    let o = run(&["verify-witness", path.to_str().unwrap(), out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
