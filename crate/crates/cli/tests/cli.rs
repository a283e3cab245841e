use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sentlin_core::graph::{canonical_certificate, read_graphs_from_path};
use serde_json::Value;

fn sentlin(dir: &Path, argv: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentlin")).current_dir(dir).args(argv).output().expect("binary runs")
}

fn ok(dir: &Path, argv: &[&str]) -> Output {
    let out = sentlin(dir, argv);
    assert!(out.status.success(), "{argv:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(dir: &Path, file: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(file)).unwrap()).unwrap()
}

fn small_graphs(dir: &Path) {
    ok(
        dir,
        &[
            "gen-data",
            "--kind",
            "erdos-renyi",
            "--n-graphs",
            "12",
            "--min-nodes",
            "2",
            "--max-nodes",
            "5",
            "--seed",
            "1",
            "--out",
            "g.jsonl",
        ],
    );
}

#[test]
fn roundtrip_reports_every_sequence_exact() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen-data", "--kind", "toy-molecules", "--out", "m.jsonl"]);
    for strategy in ["random", "min-degree", "max-degree", "anchor"] {
        let out =
            ok(dir.path(), &["roundtrip", "--in", "m.jsonl", "--strategy", strategy, "--k", "3", "--out", "rt.json"]);
        let stderr = String::from_utf8(out.stderr).unwrap();
        assert!(stderr.contains("99/99 exact"), "{stderr}");
        assert_eq!(json(dir.path(), "rt.json")["summary"]["exact"], 99);
    }
}

#[test]
fn encoded_text_decodes_to_the_same_graphs() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen-data", "--kind", "delaunay-planar", "--n-graphs", "15", "--seed", "2", "--out", "g.jsonl"]);
    ok(dir.path(), &["encode", "--in", "g.jsonl", "--strategy", "max-degree", "--out", "s.txt"]);
    ok(dir.path(), &["decode", "--in", "s.txt", "--out", "d.jsonl"]);
    let a = read_graphs_from_path(dir.path().join("g.jsonl")).unwrap();
    let b = read_graphs_from_path(dir.path().join("d.jsonl")).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(canonical_certificate(x), canonical_certificate(y));
    }
}

#[test]
fn oracle_nll_file_gives_zero_lu() {
    let dir = tempfile::tempdir().unwrap();
    small_graphs(dir.path());
    ok(dir.path(), &["score", "--scorer", "oracle", "--in", "g.jsonl", "--k", "16", "--out", "o.csv"]);
    ok(dir.path(), &["eval", "lu", "--nll-file", "o.csv", "--out", "lu.json"]);
    let report = json(dir.path(), "lu.json");
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    for r in rows {
        assert!(r["lu"].as_f64().unwrap() < 1e-12, "{r}");
        assert_eq!(r["k"], 16);
    }
}

#[test]
fn malformed_sequence_exits_1_with_its_position() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.txt"), "BOS N0 L:X EOS\nBOS N0 L:X E:e N5 L:X EOS\n").unwrap();
    let out = sentlin(dir.path(), &["decode", "--in", "bad.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2") && stderr.contains("position 5"), "{stderr}");
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sentlin(dir.path(), &["encode"]).status.code(), Some(1));
    assert_eq!(sentlin(dir.path(), &["--threads", "0", "encode", "--in", "x"]).status.code(), Some(1));
    assert_eq!(sentlin(dir.path(), &["encode", "--in", "missing.jsonl"]).status.code(), Some(1));
    assert_eq!(sentlin(dir.path(), &["eval", "lu", "--k", "1", "--nll-file", "x.csv"]).status.code(), Some(1));
    assert_eq!(sentlin(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn duplicate_nll_rows_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("n.csv"),
        "graph_id,perm_index,strategy,nll,n_tokens\na,0,random,3.0,10\na,0,random,4.0,10\n",
    )
    .unwrap();
    let out = sentlin(dir.path(), &["ingest-nll", "--nll-file", "n.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("duplicate"));
}

#[test]
fn ingest_groups_external_nlls() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("n.csv"),
        "graph_id,perm_index,strategy,nll,n_tokens\n10,0,random,2.0,5\n10,1,random,4.0,5\n9,0,random,3.0,5\n9,1,random,3.0,5\n",
    )
    .unwrap();
    let out = ok(dir.path(), &["ingest-nll", "--nll-file", "n.csv", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // numeric ids in numeric order
    assert!(lines[1].starts_with("9,2,random,3.0,0.0"), "{text}");
    // sample std of {2, 4} is sqrt(2); mean 3
    let lu: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
    assert!((lu - 2f64.sqrt() / 3.0).abs() < 1e-12);
}

#[test]
fn model_rejects_graphs_with_unseen_labels() {
    let dir = tempfile::tempdir().unwrap();
    small_graphs(dir.path());
    ok(dir.path(), &["train", "--train", "g.jsonl", "--out", "m.json"]);
    ok(dir.path(), &["gen-data", "--kind", "toy-molecules", "--out", "mol.jsonl"]);
    let out = sentlin(dir.path(), &["score", "--model", "m.json", "--in", "mol.jsonl", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn generation_and_vun_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen-data", "--kind", "delaunay-planar", "--n-graphs", "30", "--out", "g.jsonl"]);
    ok(dir.path(), &["train", "--train", "g.jsonl", "--strategy", "anchor", "--order", "5", "--out", "m.json"]);
    ok(
        dir.path(),
        &["generate", "--model", "m.json", "--n-gen", "10", "--graphs-out", "gen.jsonl", "--out", "gen.json"],
    );
    let gen = json(dir.path(), "gen.json");
    let decodable = gen["rows"].as_array().unwrap().iter().filter(|r| r["status"] == "ok").count();
    ok(dir.path(), &["eval", "vun", "--in", "gen.jsonl", "--train", "g.jsonl", "--out", "vun.json"]);
    let vun = json(dir.path(), "vun.json");
    assert_eq!(vun["rows"][0]["n_generated"], decodable);
    // every decodable graph is valid under --validity any
    assert_eq!(vun["rows"][0]["validity"], 1.0);
}

#[test]
fn cross_grid_has_one_cell_per_model_and_strategy() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen-data", "--kind", "delaunay-planar", "--n-graphs", "20", "--out", "g.jsonl"]);
    for s in ["random", "max-degree"] {
        ok(dir.path(), &["train", "--train", "g.jsonl", "--strategy", s, "--out", &format!("{s}.json")]);
    }
    ok(
        dir.path(),
        &[
            "eval",
            "cross",
            "--models",
            "random.json,max-degree.json",
            "--test",
            "g.jsonl",
            "--k",
            "3",
            "--out",
            "c.json",
        ],
    );
    let c = json(dir.path(), "c.json");
    assert_eq!(c["rows"].as_array().unwrap().len(), 8);
    assert_eq!(c["summary"]["strategies"].as_array().unwrap().len(), 2);
}
