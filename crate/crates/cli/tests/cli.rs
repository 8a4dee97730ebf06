use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn taxicab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taxicab"))
        .args(args)
        .env_remove("TAXICAB_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

fn ok(args: &[&str]) -> Vec<Value> {
    let out = taxicab(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    records(&out)
}

fn code(args: &[&str]) -> Option<i32> {
    taxicab(args).status.code()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn counts() {
    for (k, n, j, want) in [("2", "50", "2", 2), ("2", "27", "3", 2), ("3", "1729", "2", 2), ("2", "3", "2", 0)] {
        let r = ok(&["count", "--k", k, "--n", n, "--j", j]);
        assert_eq!(r[0]["count"], want, "k={k} n={n} j={j}");
    }
    let r = ok(&["count", "--k", "2", "--n", "50", "--j", "2", "--max-part", "25"]);
    assert_eq!(r[0]["count"], 1);
}

#[test]
fn taxicab_searches() {
    let r = ok(&["taxicab", "--k", "3", "--j", "2", "--m", "2", "--bound", "10000"]);
    assert_eq!((r[0]["status"].as_str(), r[0]["n"].as_u64()), (Some("found"), Some(1729)));

    let r = ok(&["taxicab", "--k", "2", "--j", "6", "--m", "36"]);
    assert_eq!(r[0]["status"], "proved-absent");
    assert_eq!(r[0]["bound_used"], 55696);
    assert_eq!(r[0]["provenance"], "hypothesis-extended");

    let r = ok(&["decide", "--j", "10", "--m", "3"]);
    assert_eq!((r[0]["status"].as_str(), r[0]["bound_used"].as_u64()), (Some("proved-absent"), Some(2916)));

    let exact = ok(&["taxicab", "--k", "2", "--j", "4", "--m", "6", "--bound", "1000"]);
    let least = ok(&["taxicab", "--k", "2", "--j", "4", "--m", "6", "--bound", "1000", "--at-least"]);
    assert_eq!(exact[0]["n"], 90);
    assert!(least[0]["n"].as_u64().unwrap() <= 90);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["count", "--k", "2", "--n", "5"]), Some(2));
    assert_eq!(code(&["count", "--k", "0", "--n", "5", "--j", "1"]), Some(2));
    assert_eq!(code(&["--workers", "0", "count", "--k", "2", "--n", "5", "--j", "2"]), Some(2));
    assert_eq!(code(&["--memory-budget", "1K", "decide", "--j", "7", "--m", "40"]), Some(4));
    assert_eq!(code(&["--cap", "3", "decide", "--j", "7", "--m", "5"]), Some(2));
}

#[test]
fn grid_artifacts_and_refusal() {
    let dir = tempfile::tempdir().unwrap();
    let (pbm, csv, boundary) = (dir.path().join("g.pbm"), dir.path().join("g.csv"), dir.path().join("b.csv"));
    let r = ok(&[
        "grid", "--k", "2", "--j", "7..30", "--m", "1..50",
        "--out-pbm", s(&pbm), "--out-csv", s(&csv), "--out-boundary", s(&boundary),
    ]);
    assert_eq!(r[0]["undetermined"], 0);
    let edge: Vec<u64> = r[0]["complement_at_edge"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(edge, [3, 11, 17, 23, 32, 34, 35, 36, 38, 41, 43, 45, 46, 47, 49]);

    let text = std::fs::read_to_string(&pbm).unwrap();
    assert!(text.starts_with("P1\n24 50\n"));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(table.lines().next(), Some("k,j,m,status,n,provenance"));
    assert_eq!(table.lines().count(), 1 + 24 * 50);
    let b = std::fs::read_to_string(&boundary).unwrap();
    assert!(b.starts_with("m,J,provenance\n1,1,certified\n2,5,certified\n3,10,certified\n"), "{b}");

    // small columns without a proven ceiling stay undetermined
    let out = taxicab(&["grid", "--k", "2", "--j", "2..6", "--m", "30..32", "--out-pbm", s(&dir.path().join("x.pbm"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--undetermined"));
    assert!(!dir.path().join("x.pbm").exists());

    let x = dir.path().join("x.pbm");
    ok(&["grid", "--k", "3", "--j", "2..4", "--m", "2..3", "--bound", "5000", "--out-pbm", s(&x), "--undetermined", "absent"]);
    assert!(std::fs::read_to_string(&x).unwrap().contains("# undetermined=absent"));
}

#[test]
fn sequence_members() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("seq.csv");
    let r = ok(&["sequence", "--k", "2", "--m-limit", "10", "--out-csv", s(&csv)]);
    let members: Vec<u64> = r[0]["members"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    for m in [1, 2, 4, 5, 6, 7, 8, 9, 10] {
        assert!(members.contains(&m), "{m} missing from {members:?}");
    }
    assert_eq!(r[0]["complement"], serde_json::json!([3]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("m,classification,J\n1,increment,1\n"), "{text}");
    assert!(text.contains("\n3,absence,10\n"));
}

#[test]
fn fits_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    let mut body = String::from("m,J\n");
    for x in 1..=40 {
        body += &format!("{x},{}\n", 2.0 * (x as f64).powf(0.125) - 1.0);
    }
    std::fs::write(&path, body).unwrap();
    let r = ok(&["fit", "--family", "root", "--root", "8", "--in", s(&path)]);
    assert!((r[0]["a"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((r[0]["b"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(code(&["fit", "--family", "root", "--in", s(&path)]), Some(2));

    std::fs::write(&path, "x,y\n1,5\n1,6\n").unwrap();
    assert_eq!(code(&["fit", "--family", "exp", "--in", s(&path)]), Some(3));
}

#[test]
fn cache_store_check_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txcb");
    let r = ok(&["--cap", "20", "cache", "store", "--k", "2", "--j-max", "6", "--n-max", "1000", "--out", s(&path)]);
    assert_eq!(r[0]["cap"], 20);
    let r = ok(&["--cap", "20", "cache", "check", "--path", s(&path), "--k", "2", "--rebuild"]);
    assert_eq!(r[0]["matches_rebuild"], true);

    assert_eq!(code(&["--cap", "21", "cache", "check", "--path", s(&path), "--k", "2"]), Some(5));
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
    assert_eq!(code(&["cache", "check", "--path", s(&path)]), Some(5));

    let exact = dir.path().join("e.txcb");
    ok(&["cache", "store", "--k", "2", "--j-max", "6", "--n-max", "1000", "--exact", "--out", s(&exact)]);
    let r = ok(&["cache", "check", "--path", s(&exact), "--rebuild"]);
    assert_eq!(r[0]["mode"], "exact");
}

#[test]
fn cache_directory_is_used_and_damage_tolerated() {
    let dir = tempfile::tempdir().unwrap();
    let d = s(dir.path());
    let first = ok(&["--cache-dir", d, "decide", "--j", "7", "--m", "5"]);
    let file = dir.path().join("taxicab-k2-cap6.txcb");
    assert!(file.exists());
    let again = ok(&["--cache-dir", d, "decide", "--j", "7", "--m", "5"]);
    assert_eq!(first, again);

    std::fs::write(&file, b"TXCB1 garbage").unwrap();
    let out = taxicab(&["--cache-dir", d, "decide", "--j", "7", "--m", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("rebuilding"));
    assert_eq!(records(&out), first);
}

#[test]
fn worker_count_does_not_change_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for w in ["1", "3"] {
        let (pbm, csv, b) = (dir.path().join(format!("{w}.pbm")), dir.path().join(format!("{w}.csv")), dir.path().join(format!("{w}.b")));
        ok(&["--workers", w, "grid", "--j", "7..25", "--m", "1..30", "--out-pbm", s(&pbm), "--out-csv", s(&csv), "--out-boundary", s(&b)]);
        outputs.push([pbm, csv, b].map(|p| std::fs::read(p).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn certificates_round_trip_through_audit() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("m3.cert");
    let r = ok(&["classify", "--m", "3", "--certificate-out", s(&cert)]);
    assert_eq!((r[0]["verdict"].as_str(), r[0]["J"].as_u64()), (Some("absence"), Some(10)));
    let r = ok(&["audit", "--certificate", s(&cert)]);
    assert_eq!(r[0]["valid"], true);

    let text = std::fs::read_to_string(&cert).unwrap();
    assert!(text.contains("\nthreshold 50\n"));
    std::fs::write(&cert, text.replace("\nthreshold 50\n", "\nthreshold 40\n")).unwrap();
    assert_eq!(code(&["audit", "--certificate", s(&cert)]), Some(5));
}

#[test]
fn desk_verification_passes() {
    let r = ok(&["verify", "--suite", "oeis", "--budget", "desk"]);
    let summary = r.last().unwrap();
    assert_eq!(summary["failed"], 0, "{r:?}");
}
