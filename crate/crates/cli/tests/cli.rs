use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fzh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fzh")).args(args).output().expect("run fzh")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_doc(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn crisp(name: &str, x: f64) -> String {
    format!(r#"{{"name": "{name}", "levels": [{{"alpha": 1.0, "points": [[{x}]]}}]}}"#)
}

const UA: &str = r#"{"name": "uA", "levels": [{"alpha": 1.0, "points": [[0]]}, {"alpha": 0.5, "points": [[0], [1]]}]}"#;

fn line_doc(sets: &[String], rest: &str) -> String {
    format!(
        r#"{{"space": {{"type": "euclidean", "dim": 1}}, "fuzzy_sets": [{}]{rest}}}"#,
        sets.join(",")
    )
}

/// Summary rows `(mode, component) -> verdict` from a converge report.
fn verdict_of(csv: &str, mode: &str, component: &str) -> String {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[0] == mode && f[1] == component && !f[5].is_empty())
        .map(|f| f[5].to_string())
        .unwrap_or_else(|| panic!("no verdict row for {mode}/{component}"))
}

#[test]
fn metric_matrices() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(&dir, "d.json", &line_doc(&[crisp("u0", 0.0), crisp("u3", 3.0)], ""));
    let send = fzh(&["metrics", arg(&doc), "--kind", "send"]);
    assert_eq!(send.status.code(), Some(0));
    assert_eq!(stdout(&send), "send,u0,u3\nu0,0,3\nu3,3,0\n");
    let end = fzh(&["metrics", arg(&doc), "--kind", "end"]);
    assert_eq!(stdout(&end), "end,u0,u3\nu0,0,1\nu3,1,0\n");

    let doc = write_doc(&dir, "a.json", &line_doc(&[UA.to_string(), crisp("u0", 0.0)], ""));
    let level = fzh(&["metrics", arg(&doc), "--kind", "level:0.5"]);
    assert_eq!(stdout(&level), "level:0.5,uA,u0\nuA,0,1\nu0,1,0\n");
    let same = fzh(&["metrics", arg(&doc), "--sets", "uA,uA"]);
    assert_eq!(stdout(&same), "send,uA,uA\nuA,0,0\nuA,0,0\n");
    assert_eq!(fzh(&["metrics", arg(&doc), "--kind", "bogus"]).status.code(), Some(2));
}

#[test]
fn convergence_of_shrinking_singletons() {
    let dir = TempDir::new().unwrap();
    let mut sets = vec![crisp("u", 0.0)];
    let names: Vec<String> = (1..=100).map(|n| format!("\"s{n}\"")).collect();
    sets.extend((1..=100).map(|n| crisp(&format!("s{n}"), 1.0 / n as f64)));
    let doc = write_doc(
        &dir,
        "d.json",
        &line_doc(&sets, &format!(r#", "sequences": [{{"name": "S", "members": [{}]}}]"#, names.join(","))),
    );
    let o = fzh(&["converge", arg(&doc), "--sequence", "S", "--limit", "u", "--tol", "0.05"]);
    let csv = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{csv}");
    for (mode, component) in [("end", "end"), ("send", "send"), ("send", "cut0"), ("level", "overall"), ("gamma", "overall")] {
        assert_eq!(verdict_of(&csv, mode, component), "PASS");
    }
    // A crisp limit has no platform points.
    assert!(csv.contains("level,excluded_platform,,,,"));
}

#[test]
fn collapse_passes_end_but_not_send() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        &dir,
        "d.json",
        &line_doc(
            &[crisp("u", 0.0)],
            r#", "families": [{"name": "C", "generator": {"kind": "collapse", "params": [], "count": 50, "seed": 0}}],
               "sequences": [{"name": "S", "family": "C"}]"#,
        ),
    );
    let end = fzh(&["converge", arg(&doc), "--sequence", "S", "--limit", "u", "--mode", "end", "--tol", "0.05"]);
    assert_eq!(end.status.code(), Some(0));
    let send = fzh(&["converge", arg(&doc), "--sequence", "S", "--limit", "u", "--mode", "send", "--tol", "0.05"]);
    assert_eq!(send.status.code(), Some(1));
    let csv = stdout(&send);
    assert_eq!(verdict_of(&csv, "send", "send"), "FAIL");
    assert_eq!(verdict_of(&csv, "send", "end"), "PASS");
    assert_eq!(verdict_of(&csv, "send", "cut0"), "FAIL");
    assert_eq!(verdict_of(&csv, "send", "decomposition"), "PASS");
}

#[test]
fn constant_sequence_has_zero_series() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        &dir,
        "d.json",
        &line_doc(&[UA.to_string()], r#", "sequences": [{"name": "S", "members": ["uA", "uA", "uA", "uA", "uA", "uA"]}]"#),
    );
    let o = fzh(&["converge", arg(&doc), "--sequence", "S", "--limit", "uA"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if !f[4].is_empty() {
            assert_eq!(f[4], "0", "{line}");
        }
    }
    assert!(csv.contains("level,excluded_platform,0.5,,,"));
}

#[test]
fn compactness_certificates() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        &dir,
        "d.json",
        &line_doc(
            &[crisp("u0", 0.0), crisp("far", 10.0)],
            r#", "families": [
                  {"name": "T", "generator": {"kind": "translates", "count": 50}},
                  {"name": "D", "generator": {"kind": "crisp_intervals", "params": [0.3, 1.0, 0.01], "count": 0}},
                  {"name": "one", "members": ["u0"]}
               ]"#,
        ),
    );
    let fuzzy = {
        let mut s = String::from(r#"{"name": "I", "levels": [{"alpha": 1.0, "points": ["#);
        let pts: Vec<String> = (0..=30).map(|k| format!("[{}]", k as f64 * 0.01)).collect();
        s.push_str(&pts.join(","));
        s.push_str("]}]}");
        s
    };
    let doc_with_candidate = write_doc(
        &dir,
        "c.json",
        &fs::read_to_string(&doc).unwrap().replacen("\"fuzzy_sets\": [", &format!("\"fuzzy_sets\": [{fuzzy},"), 1),
    );

    let tb = fzh(&["compact", arg(&doc), "--family", "T", "--mode", "tb_send", "--eps", "0.4"]);
    assert_eq!(tb.status.code(), Some(1));
    let csv = stdout(&tb);
    assert!(csv.starts_with("kind,field,label,index,value\nTB_SEND,verdict,,,FAIL\n"), "{csv}");
    let sizes: Vec<&str> = csv
        .lines()
        .filter(|l| l.starts_with("TB_SEND,evidence,net_size@0,"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(sizes, (1..=50).map(|n| n.to_string()).collect::<Vec<_>>());

    let closed = fzh(&[
        "compact",
        arg(&doc_with_candidate),
        "--family",
        "D",
        "--mode",
        "closedness",
        "--candidate",
        "I",
        "--tol",
        "0.02",
    ]);
    assert_eq!(closed.status.code(), Some(1), "{}", stdout(&closed));
    assert!(stdout(&closed).contains("CLOSEDNESS_WITNESS,witness"));
    let far = fzh(&[
        "compact",
        arg(&doc_with_candidate),
        "--family",
        "D",
        "--mode",
        "closedness",
        "--candidate",
        "far",
        "--tol",
        "0.02",
    ]);
    assert_eq!(far.status.code(), Some(0));

    for mode in ["tb_end", "tb_send", "erc", "rel_send"] {
        let o = fzh(&["compact", arg(&doc), "--family", "one", "--mode", mode, "--eps", "0.3"]);
        assert_eq!(o.status.code(), Some(0), "{mode}: {}", stdout(&o));
    }
    let o = fzh(&["compact", arg(&doc), "--family", "one", "--mode", "closedness", "--candidate", "u0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fzh(&["compact", arg(&doc), "--family", "one", "--mode", "tb_send", "--eps", "0"]).status.code(), Some(2));
    assert_eq!(fzh(&["compact", arg(&doc), "--family", "one", "--mode", "closedness"]).status.code(), Some(2));
}

#[test]
fn oracle_rows() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(&dir, "d.json", &line_doc(&[crisp("u0", 0.0), crisp("u3", 3.0), UA.to_string()], ""));
    let o = fzh(&["oracle", arg(&doc), "--resolution", "0.001"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    // 3 sets give 6 pairs with i <= j, each with two metrics.
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r[7] == "PASS"));
    let find = |a: &str, b: &str, m: &str| rows.iter().find(|r| r[0] == a && r[1] == b && r[2] == m).unwrap().clone();
    let end = find("u0", "u3", "end");
    assert_eq!(end[3], "1");
    assert!((end[4].parse::<f64>().unwrap() - 1.0).abs() <= 0.002);
    assert_eq!(find("u0", "u3", "send")[3], "3");
    let same = find("uA", "uA", "send");
    assert_eq!((same[3], same[4]), ("0", "0"));
    assert_eq!(fzh(&["oracle", arg(&doc), "--resolution", "0.5"]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad_nesting = write_doc(
        &dir,
        "n.json",
        &line_doc(
            &[r#"{"name": "broken", "levels": [{"alpha": 1.0, "points": [[0]]}, {"alpha": 0.4, "points": [[1]]}]}"#.into(), crisp("x", 1.0)],
            "",
        ),
    );
    let o = fzh(&["metrics", arg(&bad_nesting)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("broken") && err.contains("0.4"), "{err}");

    let garbage = write_doc(&dir, "g.json", "{\"space\": ");
    assert_eq!(fzh(&["metrics", arg(&garbage)]).status.code(), Some(2));
    assert_eq!(fzh(&["metrics", "/nonexistent/doc.json"]).status.code(), Some(2));
    let doc = write_doc(&dir, "d.json", &line_doc(&[crisp("u0", 0.0)], ""));
    assert_eq!(fzh(&["converge", arg(&doc), "--sequence", "nope", "--limit", "u0"]).status.code(), Some(2));
    assert_eq!(fzh(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic_and_files_work() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        &dir,
        "d.json",
        r#"{"space": {"type": "euclidean", "dim": 2},
            "families": [{"name": "R", "generator": {"kind": "random", "count": 8}}]}"#,
    );
    let gen1 = stdout(&fzh(&["gen", arg(&doc), "--seed", "7"]));
    let gen2 = stdout(&fzh(&["gen", arg(&doc), "--seed", "7"]));
    assert_eq!(gen1, gen2);
    assert_ne!(gen1, stdout(&fzh(&["gen", arg(&doc), "--seed", "8"])));

    // The expanded document loads and gives the same matrix as the original.
    let expanded = write_doc(&dir, "e.json", &gen1);
    let names: Vec<String> = (1..=8).map(|i| format!("R[{i}]")).collect();
    let sets = names.join(",");
    let m1 = stdout(&fzh(&["metrics", arg(&doc), "--seed", "7", "--sets", &sets, "--kind", "end"]));
    let m2 = stdout(&fzh(&["metrics", arg(&expanded), "--kind", "end"]));
    assert_eq!(m1, m2);

    let out = dir.path().join("o.csv");
    let json = dir.path().join("o.json");
    let o = fzh(&[
        "compact",
        arg(&doc),
        "--family",
        "R",
        "--mode",
        "rel_send",
        "--eps",
        "0.5",
        "--out",
        arg(&out),
        "--emit-json",
        arg(&json),
    ]);
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("kind,field,label,index,value\nREL_COMPACT_SEND,verdict,"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["certificate"]["kind"], "REL_COMPACT_SEND");
    let again = fzh(&["compact", arg(&doc), "--family", "R", "--mode", "rel_send", "--eps", "0.5"]);
    assert_eq!(stdout(&again), csv);
}

#[test]
fn finite_space_document() {
    let dir = TempDir::new().unwrap();
    let doc = write_doc(
        &dir,
        "f.json",
        r#"{"space": {"type": "finite", "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
            "fuzzy_sets": [
              {"name": "u", "levels": [{"alpha": 1.0, "points": [0]}, {"alpha": 0.4, "points": [0, 2]}]},
              {"name": "v", "levels": [{"alpha": 1.0, "points": [1]}]}
            ]}"#,
    );
    assert_eq!(stdout(&fzh(&["metrics", arg(&doc), "--kind", "end"])), "end,u,v\nu,0,1\nv,1,0\n");
    let bad = write_doc(&dir, "b.json", r#"{"space": {"type": "finite", "matrix": [[0, 5, 1], [5, 0, 1], [1, 1, 0]]}}"#);
    assert_eq!(fzh(&["gen", arg(&bad)]).status.code(), Some(2));
}
