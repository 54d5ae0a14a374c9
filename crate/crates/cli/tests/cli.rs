use std::process::{Command, Output};

fn gapsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapsum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_to_stdout_and_file_agree() {
    let args = ["sweep", "--q-min", "5", "--q-max", "11", "--primes"];
    let o = gapsum(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with(
        "kind,q,s,r,character_id,gap_json,sum_re,sum_im,magnitude,chain_bound,shape_bound,ratio\n"
    ));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert!(gapsum(&with_file).status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn sweep_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"kind": "multilinear", "q_min": 5, "q_max": 7, "s": 2, "ranks": [1], "samples": 3, "exhaustive_cutoff": 0}"#,
    )
    .unwrap();
    let c = config.to_str().unwrap();
    // sampling without a seed is refused
    let o = gapsum(&["sweep", "--config", c]);
    assert_eq!(o.status.code(), Some(1));
    let run = |seed: &str| {
        stdout(&gapsum(&[
            "sweep", "--config", c, "--seed", seed, "--format", "jsonl",
        ]))
    };
    let a = run("4");
    assert_eq!(a, run("4"));
    assert!(!a.is_empty());
    for line in a.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["kind"], "multilinear");
        assert_eq!(v["s"], 2);
    }
}

#[test]
fn empty_sweep_is_header_only() {
    let o = gapsum(&["sweep", "--q-min", "9", "--q-max", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn search_is_deterministic() {
    let args = [
        "search", "--q", "101", "--r", "2", "--budget", "500", "--seed", "3",
    ];
    let a = gapsum(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&gapsum(&args)));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["exhaustive"], false);
    let zero = gapsum(&[
        "search", "--q", "11", "--r", "1", "--budget", "0", "--seed", "1",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&zero)).unwrap();
    assert!(v["witness"].is_null());
}

#[test]
fn counterexample_demo() {
    let o = gapsum(&["demo-counterexample", "--q", "5", "--h", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["multiplicity"], 2);
    assert!(v["difference"].as_f64().unwrap() < 1e-12);
    let o = gapsum(&["demo-counterexample", "--q", "4", "--h", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn one_shot_evaluators() {
    let gap = r#"{"q":5,"s":1,"base":[0],"generators":[[1]],"lengths":[3]}"#;
    let o = gapsum(&["l1norm", "--gap", gap]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["l1"].as_f64().unwrap() - 7.4721359).abs() < 1e-6);

    let gap = r#"{"q":7,"s":1,"base":[1],"generators":[[1]],"lengths":[3]}"#;
    let o = gapsum(&["charsum", "--gap", gap, "--exponents", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["sum_re"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let line = r#"{"q":5,"s":1,"base":[0],"generators":[[1]],"lengths":[5]}"#;
    let o = gapsum(&["charsum", "--gap", line, "--polynomial", "0,0,1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["magnitude"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    // usage error
    assert_eq!(gapsum(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gapsum(&["--help"]).status.code(), Some(0));
    // guard: 100^4 frequencies exceed the l1 limit
    let big = r#"{"q":100,"s":4,"base":[0,0,0,0],"generators":[[1,0,0,0]],"lengths":[2]}"#;
    assert_eq!(gapsum(&["l1norm", "--gap", big]).status.code(), Some(3));
    // I/O: unreadable config
    assert_eq!(
        gapsum(&["sweep", "--config", "/nonexistent/sweep.json"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn verify_single_criterion() {
    let o = gapsum(&["verify", "--criterion", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("[PASS]  8 counterexample identity"));
}
