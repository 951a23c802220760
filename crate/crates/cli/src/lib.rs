//! Commands behind the `relboost` binary. Each command writes its
//! machine-readable result to `out` and a human summary to `err`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use relboost::oracle::{train_boosted_oracle, Oracle};
use relboost::relational::{load_table, Acyclicity, Database, GyoStep, JoinSpec};
use relboost::sketch::bench::{amp_bench, AmpParams};
use relboost::sketch::default_sketch_width;
use relboost::train::{train_boosted, Mode, NodeRecord, PhaseCounts, QueryLog, TrainConfig};
use relboost::tree::{compare_ensembles, Ensemble};
use relboost::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CYCLIC: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Parse { .. } => EXIT_IO,
        Error::Cyclic { .. } => EXIT_CYCLIC,
        Error::Schema(_) | Error::Config(_) | Error::Model(_) | Error::Version(_) => EXIT_CONFIG,
        Error::Resource { .. } => EXIT_RESOURCE,
        Error::Query(_) | Error::Dimension { .. } | Error::Index(_) => EXIT_INTERNAL,
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn stream_err(source: std::io::Error) -> Error {
    io_err(Path::new("<stream>"), source)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}").map_err(stream_err)
}

/// Load the tables named by a join spec; relative paths resolve against
/// the join spec's directory.
pub fn load_database(join: &Path) -> Result<(JoinSpec, Database)> {
    let spec = JoinSpec::read(join)?;
    let base = join.parent().unwrap_or(Path::new("."));
    let db = spec.load(base)?;
    Ok((spec, db))
}

fn table_paths(spec: &JoinSpec, join: &Path) -> Vec<PathBuf> {
    let base = join.parent().unwrap_or(Path::new("."));
    spec.tables
        .iter()
        .map(|t| {
            if t.path.is_absolute() {
                t.path.clone()
            } else {
                base.join(&t.path)
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub acyclic: bool,
    pub trace: Vec<String>,
    pub residual: Vec<String>,
    pub join_tree: Option<String>,
    pub ownership: BTreeMap<String, Vec<String>>,
}

fn describe_step(db: &Database, step: &GyoStep) -> String {
    let h = db.hypergraph();
    match step {
        GyoStep::RemoveColumn { table, column } => {
            format!(
                "remove column {} from {}",
                h.vertices()[*column],
                h.edge_name(*table)
            )
        }
        GyoStep::RemoveTable { table, container } => {
            format!(
                "remove table {} (contained in {})",
                h.edge_name(*table),
                h.edge_name(*container)
            )
        }
    }
}

/// Acyclicity verdict, GYO trace, join tree and feature ownership.
/// Returns the exit code: 0 when acyclic, 2 when cyclic.
pub fn cmd_check_join(join: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (_, db) = load_database(join)?;
    let verdict = db.hypergraph().check_acyclic();
    let trace: Vec<String> = verdict
        .trace()
        .iter()
        .map(|s| describe_step(&db, s))
        .collect();
    let residual = match &verdict {
        Acyclicity::Acyclic { .. } => Vec::new(),
        Acyclicity::Cyclic { residual, .. } => residual
            .iter()
            .map(|(t, cols)| {
                let names: Vec<&str> = cols
                    .iter()
                    .map(|&c| db.hypergraph().vertices()[c].as_str())
                    .collect();
                format!("{}({})", db.hypergraph().edge_name(*t), names.join(","))
            })
            .collect(),
    };
    let join_tree = if verdict.is_acyclic() {
        Some(db.join_tree(0)?.to_string())
    } else {
        None
    };
    let ownership = (0..db.num_tables())
        .map(|t| {
            let table = db.table(t);
            let cols = db
                .owned_columns(t)
                .iter()
                .map(|&j| table.columns()[j].clone())
                .filter(|c| c != db.label())
                .collect();
            (table.name().to_string(), cols)
        })
        .collect();
    let report = CheckReport {
        acyclic: verdict.is_acyclic(),
        trace,
        residual,
        join_tree,
        ownership,
    };

    let mut human = String::new();
    human.push_str(if report.acyclic {
        "acyclic\n"
    } else {
        "cyclic\n"
    });
    for s in &report.trace {
        human.push_str(&format!("  {s}\n"));
    }
    if !report.residual.is_empty() {
        human.push_str(&format!("irreducible: {}\n", report.residual.join(" ")));
    }
    if let Some(tree) = &report.join_tree {
        human.push_str("join tree:\n");
        for line in tree.lines() {
            human.push_str(&format!("  {line}\n"));
        }
    }
    human.push_str("feature ownership:\n");
    for (t, cols) in &report.ownership {
        human.push_str(&format!("  {t}: {}\n", cols.join(", ")));
    }
    err.write_all(human.as_bytes()).map_err(stream_err)?;
    write_json(out, &report)?;
    Ok(if report.acyclic { EXIT_OK } else { EXIT_CYCLIC })
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub count_queries: bool,
    pub trees: Option<usize>,
}

pub fn resolve_config(config: &Path, o: &Overrides) -> Result<TrainConfig> {
    let text = fs::read_to_string(config).map_err(|e| io_err(config, e))?;
    let mut cfg = TrainConfig::from_json(&text)?;
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(m) = o.mode {
        cfg.mode = m;
    }
    if o.count_queries {
        cfg.count_queries = true;
    }
    if let Some(t) = o.trees {
        cfg.num_trees = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub join: PathBuf,
    pub config: PathBuf,
    pub out: PathBuf,
    pub overrides: Overrides,
    /// Train on the materialized join instead of through queries.
    pub oracle: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFingerprint {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuerySummary {
    pub total: PhaseCounts,
    pub nodes: usize,
    pub closed_form_match: bool,
}

impl QuerySummary {
    fn of(log: &QueryLog) -> Self {
        QuerySummary {
            total: log.total(),
            nodes: log.nodes.len(),
            closed_form_match: log.mismatches().is_empty(),
        }
    }
}

/// Everything needed to reproduce a training run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: TrainConfig,
    pub seed: u64,
    pub trainer: String,
    pub inputs: Vec<InputFingerprint>,
    pub model: InputFingerprint,
    pub queries: Option<QuerySummary>,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Path of the manifest written next to a model file.
pub fn manifest_path(model: &Path) -> PathBuf {
    model.with_extension("manifest.json")
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Train and write the model plus its manifest.
pub fn cmd_train(
    opts: &TrainOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<RunManifest> {
    let mut timings = BTreeMap::new();
    let start = Instant::now();
    let (spec, db) = load_database(&opts.join)?;
    db.join_tree(0)?;
    timings.insert("load".to_string(), ms(start));
    let cfg = resolve_config(&opts.config, &opts.overrides)?;

    let start = Instant::now();
    let (ensemble, log) = if opts.oracle {
        let dm = db.materialize()?;
        (train_boosted_oracle(&db, &dm, &cfg)?.0, None)
    } else {
        let o = train_boosted(&db, &cfg)?;
        (o.ensemble, cfg.count_queries.then_some(o.log))
    };
    timings.insert("train".to_string(), ms(start));

    let doc = ensemble.to_json();
    fs::write(&opts.out, &doc).map_err(|e| io_err(&opts.out, e))?;

    let mut inputs = vec![InputFingerprint {
        path: opts.join.clone(),
        sha256: sha256_hex(&read_bytes(&opts.join)?),
    }];
    for p in table_paths(&spec, &opts.join) {
        inputs.push(InputFingerprint {
            sha256: sha256_hex(&read_bytes(&p)?),
            path: p,
        });
    }
    inputs.push(InputFingerprint {
        path: opts.config.clone(),
        sha256: sha256_hex(&read_bytes(&opts.config)?),
    });
    let manifest = RunManifest {
        seed: cfg.seed,
        config: cfg,
        trainer: if opts.oracle { "oracle" } else { "relational" }.to_string(),
        inputs,
        model: InputFingerprint {
            path: opts.out.clone(),
            sha256: sha256_hex(doc.as_bytes()),
        },
        queries: log.as_ref().map(QuerySummary::of),
        timings_ms: timings,
    };
    let mpath = manifest_path(&opts.out);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&mpath, text + "\n").map_err(|e| io_err(&mpath, e))?;

    let leaves: Vec<String> = ensemble
        .trees
        .iter()
        .map(|t| t.num_leaves().to_string())
        .collect();
    writeln!(
        err,
        "trained {} tree(s) with leaves [{}] in {:.1} ms; model written to {}",
        ensemble.len(),
        leaves.join(", "),
        manifest.timings_ms["train"],
        opts.out.display()
    )
    .map_err(stream_err)?;
    if let Some(q) = &manifest.queries {
        writeln!(
            err,
            "{} grouped queries over {} node(s)",
            q.total.total(),
            q.nodes
        )
        .map_err(stream_err)?;
    }
    write_json(out, &manifest)?;
    Ok(manifest)
}

/// Predict every row of a CSV file; one value per row, in order.
pub fn cmd_predict(
    model: &Path,
    input: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<usize> {
    let text = fs::read_to_string(model).map_err(|e| io_err(model, e))?;
    let ensemble = Ensemble::from_json(&text)?;
    let file = File::open(input).map_err(|e| io_err(input, e))?;
    let table = load_table(file, "input")?;
    if table.is_empty() {
        writeln!(err, "no rows to predict").map_err(stream_err)?;
        return Ok(0);
    }
    let bound = ensemble.bind(table.columns())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["prediction"]).expect("in-memory write");
    for row in table.rows() {
        w.write_record([format!("{:.16e}", bound.predict(row))])
            .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory write");
    out.write_all(&bytes).map_err(stream_err)?;
    writeln!(
        err,
        "predicted {} row(s) with {} tree(s)",
        table.len(),
        ensemble.len()
    )
    .map_err(stream_err)?;
    Ok(table.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitRatio {
    pub tree: usize,
    pub node: usize,
    pub chosen_sse: f64,
    pub best_sse: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub mode: Mode,
    /// Structural identity with the oracle (exact mode only).
    pub identical: Option<bool>,
    pub difference: Option<String>,
    pub max_leaf_deviation: Option<f64>,
    pub max_stat_deviation: Option<f64>,
    pub queries: QuerySummary,
    /// True-SSE ratios of sketched split choices.
    pub sketch_ratios: Vec<SplitRatio>,
}

/// Relative deviation of per-node statistics between two runs.
fn stat_deviation(a: &[Vec<NodeRecord>], b: &[Vec<NodeRecord>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (ta, tb) in a.iter().zip(b) {
        for (x, y) in ta.iter().zip(tb) {
            let scale = y.stats.sq.abs().max(1.0);
            for (u, v) in [
                (x.stats.count, y.stats.count),
                (x.stats.sum, y.stats.sum),
                (x.stats.sq, y.stats.sq),
            ] {
                worst = worst.max((u - v).abs() / scale);
            }
        }
    }
    worst
}

/// True SSE of every sketched split against the exact optimum at that node.
pub fn sketch_split_ratios(
    db: &Database,
    ensemble: &Ensemble,
    records: &[Vec<NodeRecord>],
    min_node: usize,
) -> Result<Vec<SplitRatio>> {
    let dm = db.materialize()?;
    let oracle = Oracle::new(db, &dm)?;
    let mut out = Vec::new();
    for (t, recs) in records.iter().enumerate().skip(1) {
        let residuals = oracle.residuals(&ensemble.trees[..t])?;
        for r in recs {
            let Some(split) = &r.split else { continue };
            let chosen = oracle.split_sse(
                &residuals,
                &r.constraints,
                &split.feature.name,
                split.threshold,
            )?;
            let exact = oracle.evaluate(&residuals, &r.constraints, min_node);
            let best = exact.split.map_or(exact.stats.sse(), |s| s.objective);
            let ratio = if best > 0.0 {
                chosen / best
            } else if chosen <= 1e-9 * exact.stats.sq.max(1.0) {
                1.0
            } else {
                f64::INFINITY
            };
            out.push(SplitRatio {
                tree: t,
                node: r.node,
                chosen_sse: chosen,
                best_sse: best,
                ratio,
            });
        }
    }
    Ok(out)
}

/// Train through queries and on the materialized join, then compare.
/// Returns the exit code: 0 when the runs agree, 5 otherwise.
pub fn cmd_compare(
    join: &Path,
    config: &Path,
    o: &Overrides,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let (_, db) = load_database(join)?;
    db.join_tree(0)?;
    let mut cfg = resolve_config(config, o)?;
    cfg.count_queries = true;
    let dm = db.materialize()?;
    let rel = train_boosted(&db, &cfg)?;
    let queries = QuerySummary::of(&rel.log);

    let report = if cfg.mode == Mode::Exact {
        let (orc, oreport) = train_boosted_oracle(&db, &dm, &cfg)?;
        let cmp = compare_ensembles(&rel.ensemble, &orc, 1e-9);
        let (identical, difference, leaf_dev, stat_dev) = match cmp {
            Ok(dev) => (
                true,
                None,
                Some(dev),
                Some(stat_deviation(&rel.records, &oreport.records)),
            ),
            Err(e) => (false, Some(e), None, None),
        };
        CompareReport {
            mode: cfg.mode,
            identical: Some(identical),
            difference,
            max_leaf_deviation: leaf_dev,
            max_stat_deviation: stat_dev,
            queries,
            sketch_ratios: Vec::new(),
        }
    } else {
        CompareReport {
            mode: cfg.mode,
            identical: None,
            difference: None,
            max_leaf_deviation: None,
            max_stat_deviation: None,
            queries,
            sketch_ratios: sketch_split_ratios(&db, &rel.ensemble, &rel.records, cfg.min_node)?,
        }
    };

    match report.identical {
        Some(true) => {
            let dev = report.max_stat_deviation.unwrap_or(0.0);
            writeln!(err, "IDENTICAL (max statistic deviation {dev:.3e})").map_err(stream_err)?;
        }
        Some(false) => {
            let d = report.difference.as_deref().unwrap_or("");
            writeln!(err, "DIFFERENT: {d}").map_err(stream_err)?;
        }
        None => {
            let within = report
                .sketch_ratios
                .iter()
                .filter(|r| r.ratio <= 1.0 + 3.0 * cfg.epsilon)
                .count();
            writeln!(
                err,
                "sketched splits within (1+3ε) of the exact optimum: {}/{}",
                within,
                report.sketch_ratios.len()
            )
            .map_err(stream_err)?;
        }
    }
    if !report.queries.closed_form_match {
        writeln!(err, "query tallies differ from the closed form").map_err(stream_err)?;
    }
    write_json(out, &report)?;
    Ok(if compare_passes(&report) {
        EXIT_OK
    } else {
        EXIT_INTERNAL
    })
}

/// Tallies must match the closed form; in exact mode the two runs must also
/// agree structurally with statistics within 1e-9.
pub fn compare_passes(report: &CompareReport) -> bool {
    report.queries.closed_form_match
        && match report.identical {
            Some(true) => report.max_stat_deviation.unwrap_or(0.0) < 1e-9,
            Some(false) => false,
            None => true,
        }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub tables: usize,
    pub k: Option<usize>,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    pub rows: usize,
}

/// AMP bench summary as CSV: a header, then one row unless `trials` is 0.
pub fn cmd_sketch_bench(o: &BenchOptions, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if o.tables == 0 || o.k == Some(0) || o.rows == 0 {
        return Err(Error::Config("tables, k and rows must be positive".into()));
    }
    let p = AmpParams {
        tables: o.tables,
        k: o.k
            .unwrap_or_else(|| default_sketch_width(o.tables, o.epsilon, o.delta)),
        epsilon: o.epsilon,
        delta: o.delta,
        trials: o.trials,
        seed: o.seed,
        max_rows: o.rows,
    };
    let report = amp_bench(&p)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "tables",
        "k",
        "epsilon",
        "delta",
        "trials",
        "failure_rate",
        "mean_relative_error",
        "mean_ratio",
    ])
    .expect("in-memory write");
    if !report.trials.is_empty() {
        w.write_record([
            p.tables.to_string(),
            p.k.to_string(),
            p.epsilon.to_string(),
            p.delta.to_string(),
            p.trials.to_string(),
            report.failure_rate().to_string(),
            report.mean_relative_error().to_string(),
            report.mean_ratio().to_string(),
        ])
        .expect("in-memory write");
        writeln!(
            err,
            "k={}: failure rate {:.4}, mean relative error {:.4}, mean ratio {:.4} over {} trials",
            p.k,
            report.failure_rate(),
            report.mean_relative_error(),
            report.mean_ratio(),
            p.trials
        )
        .map_err(stream_err)?;
    }
    out.write_all(&w.into_inner().expect("in-memory write"))
        .map_err(stream_err)?;
    Ok(())
}
