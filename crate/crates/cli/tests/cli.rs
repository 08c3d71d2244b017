use std::process::{Command, Output};

fn liquid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liquid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generate_then_resolve() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.json");
    let graph_arg = graph.to_str().unwrap();
    stdout(&liquid(&["generate", "--t", "200", "--seed", "4", "--out", graph_arg]));
    let trace = std::fs::read_to_string(dir.path().join("g.json.trace")).unwrap();
    assert_eq!(trace.lines().count(), 200);

    let summary = |m: &str| -> serde_json::Value {
        serde_json::from_str(&stdout(&liquid(&["resolve", "--graph", graph_arg, "--mechanism", m]))).unwrap()
    };
    let opt = summary("optimal");
    assert_eq!(opt["mechanism"], "optimal");
    assert_eq!(opt["utilized_votes"], 200);
    let greedy = summary("greedy");
    let split = summary("splittable");
    let w = |v: &serde_json::Value| v["max_weight"].as_f64().unwrap();
    assert!(w(&split) <= w(&opt) && w(&opt) <= w(&greedy));
    assert_eq!(split["utilized_votes"], 200);

    let choices = dir.path().join("a.json");
    stdout(&liquid(&[
        "resolve", "--graph", graph_arg, "--mechanism", "random", "--emit-assignment", choices.to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&choices).unwrap()).unwrap();
    let v = v.as_array().unwrap();
    assert_eq!(v.len(), 200);
    assert!(v[0].is_null());
}

#[test]
fn compare_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    stdout(&liquid(&[
        "compare", "--t", "40", "--runs", "2", "--sample-every", "20", "--out", out.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mechanism,run,t,max_weight,utilized_votes,wall_time_seconds,d,gamma,k,p_two,seed"
    );
    // 2 runs, 2 samples, 4 default mechanisms.
    assert_eq!(lines.count(), 16);
}

#[test]
fn sweeps_histogram_and_bench_print_to_stdout() {
    let k = stdout(&liquid(&["sweep-k", "--t", "30", "--runs", "2", "--k", "1,2"]));
    assert!(k.contains("optimal_k1") && k.contains("optimal_k2"));
    let p = stdout(&liquid(&["sweep-p", "--t", "30", "--runs", "1", "--p-two", "0,1"]));
    assert!(p.contains("optimal_p0,") && p.contains("optimal_p1,"));
    let h = stdout(&liquid(&["histogram", "--t", "30", "--runs", "3", "--mechanisms", "optimal,greedy"]));
    assert_eq!(h.lines().count(), 1 + 6);
    let b = stdout(&liquid(&["bench", "--t", "30", "--runs", "1", "--mechanisms", "greedy"]));
    assert_eq!(b.lines().count(), 1 + 3);
}

#[test]
fn oracle_prints_alpha_and_expectation() {
    let text = stdout(&liquid(&["oracle", "--k-max", "3", "--t", "100", "--sample-every", "50"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,d,n,value,lower,upper");
    assert_eq!(lines[1], "alpha,0.5,1,1,,");
    let alpha2: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!((alpha2 - (3f64.sqrt() - 1.0)).abs() < 1e-12);
    let first: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(first[..3], ["expected_first_voter_weight", "0.5", "1"]);
    assert!((first[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(lines.len(), 1 + 3 + 3);
}

#[test]
fn invalid_input_exits_nonzero() {
    for args in [
        &["compare", "--runs", "0"][..],
        &["compare", "--d", "1.5"],
        &["compare", "--mechanisms", "best"],
        &["resolve", "--graph", "/nonexistent/graph.json"],
        &["oracle", "--d", "0"],
    ] {
        let out = liquid(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
