use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relboost::oracle::train_boosted_oracle;
use relboost::train::{Mode, PhaseCounts, TrainConfig};
use relboost::tree::Ensemble;
use relboost_cli::{compare_passes, load_database, CompareReport, QuerySummary};

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example")
}

fn relboost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relboost"))
        .args(args)
        .env_remove("RELBOOST_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn path_schema(dir: &Path) -> PathBuf {
    write(dir, "a.csv", "k,x,y\n1,0.5,3\n2,1.5,5\n3,2.5,4\n");
    write(dir, "b.csv", "k,z\n1,10\n1,20\n2,30\n3,40\n");
    write(
        dir,
        "join.json",
        r#"{"tables":[{"name":"A","path":"a.csv"},{"name":"B","path":"b.csv"}],"label":"y"}"#,
    )
}

fn config(dir: &Path, text: &str) -> PathBuf {
    write(dir, "train.json", text)
}

#[test]
fn check_join_path_schema() {
    let dir = tempfile::tempdir().unwrap();
    let join = path_schema(dir.path());
    let o = relboost(&["check-join", "--join", s(&join)]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["acyclic"], true);
    let tree = report["join_tree"].as_str().unwrap();
    assert_eq!(tree.lines().count(), 2, "{tree}");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("acyclic"));
}

#[test]
fn check_join_triangle_is_cyclic() {
    let o = relboost(&["check-join", "--join", s(&example().join("triangle.json"))]);
    assert_eq!(code(&o), 2);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["acyclic"], false);
    assert_eq!(report["residual"].as_array().unwrap().len(), 3);
}

#[test]
fn check_join_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let join = write(
        dir.path(),
        "join.json",
        r#"{"tables":[{"name":"A","path":"nope.csv"}],"label":"y"}"#,
    );
    let o = relboost(&["check-join", "--join", s(&join)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.csv"));
}

#[test]
fn parse_errors_name_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let join = path_schema(dir.path());
    write(dir.path(), "b.csv", "k,z\n1,10\n1,abc\n");
    let o = relboost(&["check-join", "--join", s(&join)]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 2") && err.contains("`z`"), "{err}");
}

#[test]
fn train_reproduces_committed_example_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.json");
    let ex = example();
    let o = relboost(&[
        "train",
        "--join",
        s(&ex.join("joinspec.json")),
        "--config",
        s(&ex.join("train.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = fs::read_to_string(&out).unwrap();
    let model = Ensemble::from_json(&got).unwrap();
    assert_eq!(model.len(), 2);
    assert!(model.trees.iter().all(|t| t.num_leaves() == 4));
    let committed = fs::read_to_string(ex.join("model.json")).unwrap();
    assert_eq!(got, committed);

    let manifest: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(manifest["trainer"], "relational");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 5);
    let on_disk: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("model.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(on_disk["model"]["sha256"], manifest["model"]["sha256"]);
}

#[test]
fn sketch_training_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let ex = example();
    let join = ex.join("joinspec.json");
    let cfg = config(
        dir.path(),
        r#"{"max_leaves":3,"num_trees":3,"mode":"sketch","k":64}"#,
    );
    let run = |name: &str, extra: &[&str], env_seed: Option<&str>| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_relboost"));
        cmd.args([
            "train",
            "--join",
            s(&join),
            "--config",
            s(&cfg),
            "--out",
            s(&out),
        ])
        .args(extra)
        .env_remove("RELBOOST_SEED");
        if let Some(v) = env_seed {
            cmd.env("RELBOOST_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        fs::read(out).unwrap()
    };
    let a = run("a.json", &["--seed", "5"], None);
    let b = run("b.json", &["--seed", "5"], None);
    let c = run("c.json", &[], Some("5"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    // the flag wins over the environment
    let d = run("d.json", &["--seed", "5"], Some("6"));
    assert_eq!(a, d);
}

#[test]
fn single_leaf_model_is_global_mean() {
    let dir = tempfile::tempdir().unwrap();
    let join = path_schema(dir.path());
    let cfg = config(dir.path(), r#"{"max_leaves":1,"num_trees":1}"#);
    let out = dir.path().join("m.json");
    let o = relboost(&[
        "train",
        "--join",
        s(&join),
        "--config",
        s(&cfg),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let model = Ensemble::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    // join rows carry labels 3, 3, 5, 4
    let mean = (3.0 + 3.0 + 5.0 + 4.0) / 4.0;
    assert_eq!(model.trees[0].num_leaves(), 1);
    assert!((model.predict(&[], &[]).unwrap() - mean).abs() < 1e-12);
}

#[test]
fn train_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let good = example().join("train.json");
    let o = relboost(&[
        "train",
        "--join",
        s(&example().join("triangle.json")),
        "--config",
        s(&good),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);

    let join = path_schema(dir.path());
    for bad in [r#"{"max_leaves":0}"#, r#"{"max_leaves":2,"bogus":1}"#, "{"] {
        let cfg = config(dir.path(), bad);
        let o = relboost(&[
            "train",
            "--join",
            s(&join),
            "--config",
            s(&cfg),
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 3, "{bad}");
    }
    let o = relboost(&[
        "train",
        "--join",
        s(&join),
        "--config",
        s(&good),
        "--out",
        s(&out),
        "--mode",
        "fast",
    ]);
    assert_eq!(code(&o), 3);
}

fn write_model(dir: &Path, text: &str) -> PathBuf {
    write(dir, "model.json", text)
}

#[test]
fn predict_single_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        dir.path(),
        r#"{"version":1,"label":"y","features":["a"],"trees":[{"nodes":[{"leaf":7.0}]}]}"#,
    );
    let input = write(dir.path(), "in.csv", "a\n1\n-3\n");
    let o = relboost(&["predict", "--model", s(&model), "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "prediction");
    assert_eq!(lines.len(), 3);
    for l in &lines[1..] {
        assert_eq!(l.parse::<f64>().unwrap(), 7.0);
        // 17 significant digits
        assert_eq!(
            l.split('e').next().unwrap().replace(['.', '-'], "").len(),
            17,
            "{l}"
        );
    }
}

#[test]
fn predict_empty_input_and_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    let model = write_model(
        dir.path(),
        r#"{"version":1,"label":"y","features":["a"],"trees":[{"nodes":[
            {"feature":"a","threshold":1.0,"left":1,"right":2,"table":0},{"leaf":1.0},{"leaf":2.0}]}]}"#,
    );
    let empty = write(dir.path(), "empty.csv", "a\n");
    let o = relboost(&["predict", "--model", s(&model), "--input", s(&empty)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());

    let other = write(dir.path(), "other.csv", "b\n1\n");
    let o = relboost(&["predict", "--model", s(&model), "--input", s(&other)]);
    assert_eq!(code(&o), 3);

    let bad = write_model(
        dir.path(),
        r#"{"version":9,"label":"y","features":[],"trees":[]}"#,
    );
    let o = relboost(&["predict", "--model", s(&bad), "--input", s(&other)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn predictions_match_oracle_model_rowwise() {
    let ex = example();
    let dir = tempfile::tempdir().unwrap();
    let model = ex.join("model.json");
    let (_, db) = load_database(&ex.join("joinspec.json")).unwrap();
    let dm = db.materialize().unwrap();
    let cfg = TrainConfig::from_json(&fs::read_to_string(ex.join("train.json")).unwrap()).unwrap();
    let (oracle, _) = train_boosted_oracle(&db, &dm, &cfg).unwrap();

    // write the design matrix as the prediction input
    let mut csv = dm.columns.join(",") + "\n";
    for row in &dm.rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&(cells.join(",") + "\n"));
    }
    let input = write(dir.path(), "rows.csv", &csv);
    let o = relboost(&["predict", "--model", s(&model), "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let got: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(got.len(), dm.rows.len());
    for (row, g) in dm.rows.iter().zip(&got) {
        let want = oracle.predict(&dm.columns, row).unwrap();
        assert!(
            (want - g).abs() <= 1e-9 * want.abs().max(1.0),
            "{want} vs {g}"
        );
    }
}

#[test]
fn compare_example_is_identical() {
    let ex = example();
    let o = relboost(&[
        "compare",
        "--join",
        s(&ex.join("joinspec.json")),
        "--config",
        s(&ex.join("train.json")),
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("IDENTICAL"));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["identical"], true);
    assert!(report["max_stat_deviation"].as_f64().unwrap() < 1e-9);
    assert_eq!(report["queries"]["closed_form_match"], true);
}

#[test]
fn compare_sketch_reports_ratios() {
    let ex = example();
    let o = relboost(&[
        "compare",
        "--join",
        s(&ex.join("joinspec.json")),
        "--config",
        s(&ex.join("train.json")),
        "--mode",
        "sketch",
        "--trees",
        "3",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let ratios = report["sketch_ratios"].as_array().unwrap();
    assert!(!ratios.is_empty());
    for r in ratios {
        assert!(r["ratio"].as_f64().unwrap() >= 1.0 - 1e-9);
        assert!(r["tree"].as_u64().unwrap() >= 1);
    }
}

#[test]
fn compare_cap_exceeded() {
    let dir = tempfile::tempdir().unwrap();
    path_schema(dir.path());
    let join = write(
        dir.path(),
        "capped.json",
        r#"{"tables":[{"name":"A","path":"a.csv"},{"name":"B","path":"b.csv"}],"label":"y","join_cap":2}"#,
    );
    let cfg = config(dir.path(), r#"{"max_leaves":2}"#);
    let o = relboost(&["compare", "--join", s(&join), "--config", s(&cfg)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn tally_mismatch_fails_compare() {
    let mut report = CompareReport {
        mode: Mode::Exact,
        identical: Some(true),
        difference: None,
        max_leaf_deviation: Some(0.0),
        max_stat_deviation: Some(0.0),
        queries: QuerySummary {
            total: PhaseCounts::default(),
            nodes: 1,
            closed_form_match: true,
        },
        sketch_ratios: Vec::new(),
    };
    assert!(compare_passes(&report));
    report.queries.closed_form_match = false;
    assert!(!compare_passes(&report));
    report.queries.closed_form_match = true;
    report.identical = Some(false);
    assert!(!compare_passes(&report));
}

#[test]
fn sketch_bench_output() {
    let o = relboost(&["sketch-bench", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("tables,k,"));

    // a one-bucket sketch is reported, not judged
    let o = relboost(&["sketch-bench", "--trials", "20", "--k", "1", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "1");
    let rate: f64 = row[5].parse().unwrap();
    assert!((0.0..=1.0).contains(&rate));
}
