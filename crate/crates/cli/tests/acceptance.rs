//! Acceptance run: one pass/fail line per criterion, nonzero exit on any
//! failure.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relboost::oracle::{ssr_oracle, train_boosted_oracle, train_tree_oracle, Oracle};
use relboost::relational::Database;
use relboost::semiring::{
    eval_bruteforce, eval_bruteforce_grouped, eval_sumprod, eval_sumprod_grouped, Constraints,
    CountingSemiring, Interval, RealSemiring, Semiring, SumProdQuery,
};
use relboost::sketch::bench::{amp_bench, AmpParams};
use relboost::sketch::{default_sketch_width, TensorSketch};
use relboost::synth::{random_instance, SynthParams};
use relboost::train::{
    node_seed, residual_sq_exact, sketch_residual_vectors, train_boosted, train_tree, JoinContext,
    Mode, PhaseCounts, TrainConfig,
};
use relboost::tree::{compare_ensembles, values_close, Ensemble};
use relboost_cli::{cmd_train, sketch_split_ratios, Overrides, TrainOptions};

const RTOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn instance(seed: u64, p: &SynthParams) -> Database {
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), p)
}

/// A random box over the instance's features, possibly empty.
fn random_constraints(rng: &mut ChaCha8Rng, db: &Database) -> Constraints {
    let mut c = Constraints::new();
    for f in db.features() {
        if f == db.label() || !rng.gen_bool(0.3) {
            continue;
        }
        let t = rng.gen_range(0..4) as f64;
        let iv = if rng.gen_bool(0.5) {
            Interval::at_least(t)
        } else {
            Interval::below(t)
        };
        c.add(f, iv);
    }
    c
}

/// Criteria 1 and 2 share their 200 instances.
fn sumprod_criteria() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1);
    let (mut bad1, mut bad2, mut checked) = (Vec::new(), Vec::new(), 0usize);
    for seed in 0..200u64 {
        let db = instance(seed, &SynthParams::default());
        let dm = db.materialize().expect("within cap");
        let tree = db.join_tree(0).expect("acyclic");
        let c = random_constraints(&mut rng, &db);
        let a: f64 = rng.gen_range(-1.0..1.0);
        let f0 = db.features()[0].clone();
        let real = SumProdQuery::new()
            .with_constraints(&c)
            .factor(db.label(), |y| y * y + 1.0)
            .factor(&f0, move |x| x * a + 0.5);
        let count = SumProdQuery::<u64>::new().with_constraints(&c);

        let fast_n = eval_sumprod(&db, &tree, &count, &CountingSemiring).unwrap();
        let slow_n = eval_bruteforce(&db, &dm, &count, &CountingSemiring);
        let fast_r = eval_sumprod(&db, &tree, &real, &RealSemiring).unwrap();
        let slow_r = eval_bruteforce(&db, &dm, &real, &RealSemiring);
        if fast_n != slow_n || !values_close(fast_r, slow_r, RTOL) {
            bad1.push(seed);
        }
        for t in 0..db.num_tables() {
            let name = db.table(t).name().to_string();
            let gn = eval_sumprod_grouped(&db, &tree, &name, &count, &CountingSemiring).unwrap();
            let gr = eval_sumprod_grouped(&db, &tree, &name, &real, &RealSemiring).unwrap();
            let bn = eval_bruteforce_grouped(&db, &dm, t, &count, &CountingSemiring);
            let br = eval_bruteforce_grouped(&db, &dm, t, &real, &RealSemiring);
            let rows_ok = gn.values == bn.values
                && gr
                    .values
                    .iter()
                    .zip(&br.values)
                    .all(|(x, y)| values_close(*x, *y, RTOL));
            if !rows_ok {
                bad1.push(seed);
            }
            if CountingSemiring.sum(&gn.values) != fast_n
                || !values_close(RealSemiring.sum(&gr.values), fast_r, RTOL)
            {
                bad2.push(seed);
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    bad1.dedup();
    bad2.dedup();
    let c1 = outcome(
        bad1.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "200 instances, {} mismatched, {:.1}s (< 60s)",
            bad1.len(),
            elapsed.as_secs_f64()
        ),
    );
    let c2 = outcome(
        bad2.is_empty(),
        format!("{checked} grouped evaluations, {} inconsistent", bad2.len()),
    );
    (c1, c2)
}

fn algorithm1_equivalence() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let db = instance(1000 + seed, &SynthParams::default());
        let dm = db.materialize().unwrap();
        let cfg = TrainConfig {
            max_leaves: 1 + (seed as usize % 8),
            ..TrainConfig::default()
        };
        let rel = train_tree(&db, &cfg).unwrap().ensemble;
        let (tree, _) = train_tree_oracle(&db, &dm, &cfg).unwrap();
        let mut orc = Ensemble::new(db.label(), db.fingerprint());
        orc.trees.push(tree);
        if let Err(e) = compare_ensembles(&rel, &orc, RTOL) {
            failures.push(format!("seed {seed}: {e}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "50 instances, L<=8, {} differ, {:.1}s (< 120s){}",
            failures.len(),
            elapsed.as_secs_f64(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn algorithm2_equivalence() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let db = instance(2000 + seed, &SynthParams::default());
        let dm = db.materialize().unwrap();
        let cfg = TrainConfig {
            max_leaves: 2 + (seed as usize % 7),
            num_trees: 1 + (seed as usize % 3),
            ..TrainConfig::default()
        };
        let rel = train_boosted(&db, &cfg).unwrap().ensemble;
        let (orc, _) = train_boosted_oracle(&db, &dm, &cfg).unwrap();
        if let Err(e) = compare_ensembles(&rel, &orc, RTOL) {
            failures.push(format!("seed {seed}: {e}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "50 instances, m<=3, {} differ, {:.1}s (< 300s){}",
            failures.len(),
            elapsed.as_secs_f64(),
            failures
                .first()
                .map(|f| format!("; first: {f}"))
                .unwrap_or_default()
        ),
    )
}

fn residual_square_assembly() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc5);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for pair in 0..100u64 {
        let db = instance(3000 + pair, &SynthParams::default());
        let dm = db.materialize().unwrap();
        let cfg = TrainConfig {
            max_leaves: rng.gen_range(2..=5),
            num_trees: rng.gen_range(1..=3),
            ..TrainConfig::default()
        };
        let e = train_boosted(&db, &cfg).unwrap().ensemble;
        let prior: Vec<_> = e.trees.iter().map(|t| t.leaf_paths()).collect();
        // the node is taken from an independent tree on the same features
        let probe = TrainConfig {
            max_leaves: 6,
            ..TrainConfig::default()
        };
        let nodes = train_tree(&db, &probe).unwrap().ensemble.trees[0].node_constraints();
        let c = &nodes[rng.gen_range(0..nodes.len())];
        let truth = ssr_oracle(&dm, &e, c).unwrap();
        let ctx = JoinContext::new(&db).unwrap();
        let t = rng.gen_range(0..db.num_tables());
        let got: f64 = residual_sq_exact(&ctx, c, &prior, t, &mut PhaseCounts::default())
            .unwrap()
            .iter()
            .sum();
        let dev = (got - truth).abs() / truth.abs().max(1.0);
        worst = worst.max(dev);
        if dev > RTOL {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("100 (node, ensemble) pairs, {bad} off, max relative deviation {worst:.2e}"),
    )
}

fn query_counts() -> Outcome {
    let (mut alg1, mut exact, mut sketched, mut bad) = (0usize, 0usize, 0usize, Vec::new());
    for seed in 0..30u64 {
        let db = instance(
            4000 + seed,
            &SynthParams {
                max_rows: 20,
                distinct_rows: true,
                ..SynthParams::default()
            },
        );
        let tau = db.num_tables() as u64;
        for mode in [Mode::Exact, Mode::Sketch] {
            let cfg = TrainConfig {
                max_leaves: 2 + (seed as usize % 4),
                num_trees: 3,
                mode,
                k: Some(32),
                seed,
                count_queries: true,
                ..TrainConfig::default()
            };
            let log = train_boosted(&db, &cfg).unwrap().log;
            for n in &log.nodes {
                let m = n.prior_leaves.len() as u64;
                let sum_l: u64 = n.prior_leaves.iter().map(|&l| l as u64).sum();
                let uniform = n.prior_leaves.windows(2).all(|w| w[0] == w[1]);
                let ok = if m == 0 {
                    alg1 += 1;
                    n.total().total() == 3 * tau && n.matches_closed_form()
                } else if n.sketched {
                    sketched += 1;
                    n.per_table.iter().all(|p| p.sketches == sum_l + 1) && n.matches_closed_form()
                } else {
                    exact += 1;
                    let want = if uniform {
                        let l = n.prior_leaves[0] as u64;
                        m * (m - 1) * l * l + 2 * m * l + 3
                    } else {
                        n.expected_per_table().total()
                    };
                    n.per_table.iter().all(|p| p.total() == want) && n.matches_closed_form()
                };
                if !ok {
                    bad.push(format!("seed {seed} tree {} node {}", n.tree, n.node));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && alg1 > 0 && exact > 0 && sketched > 0,
        format!(
            "{alg1} first-tree, {exact} exact boosted, {sketched} sketched nodes; {} mismatched",
            bad.len()
        ),
    )
}

fn amp() -> Outcome {
    let start = Instant::now();
    let (epsilon, delta) = (0.5, 0.1);
    let k = default_sketch_width(2, epsilon, delta);
    let r = amp_bench(&AmpParams {
        tables: 2,
        k,
        epsilon,
        delta,
        trials: 400,
        seed: 0xa3,
        max_rows: 12,
    })
    .unwrap();
    let elapsed = start.elapsed();
    let (rate, mean) = (r.failure_rate(), r.mean_ratio());
    outcome(
        k == 440 && rate <= 0.15 && (mean - 1.0).abs() <= 0.05 && elapsed < Duration::from_secs(120),
        format!(
            "k={k}, 400 trials, failure rate {rate:.4} (<= 0.15), mean estimate/truth {mean:.4}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn linearity() -> Outcome {
    let p = SynthParams {
        max_rows: 20,
        distinct_rows: true,
        ..SynthParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xc8);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for seed in 0..50u64 {
        let db = instance(5000 + seed, &p);
        let dm = db.materialize().unwrap();
        let cfg = TrainConfig {
            max_leaves: rng.gen_range(2..=4),
            num_trees: rng.gen_range(1..=3),
            ..TrainConfig::default()
        };
        let e = train_boosted(&db, &cfg).unwrap().ensemble;
        let prior: Vec<_> = e.trees.iter().map(|t| t.leaf_paths()).collect();
        let ctx = JoinContext::new(&db).unwrap();
        let oracle = Oracle::new(&db, &dm).unwrap();
        let residuals = oracle.residuals(&e.trees).unwrap();
        let sketch = TensorSketch::new(ctx.domain().clone(), 64, node_seed(seed, e.len(), 0));
        let nodes = e.trees[0].node_constraints();
        let c = &nodes[rng.gen_range(0..nodes.len())];
        let mut ok = true;
        for t in 0..db.num_tables() {
            let rel =
                sketch_residual_vectors(&ctx, &sketch, c, &prior, t, &mut PhaseCounts::default())
                    .unwrap();
            let direct = oracle.direct_sketch(&sketch, &residuals, c, t).unwrap();
            for (a, b) in rel.iter().zip(&direct) {
                for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                    let dev = (x - y).abs() / y.abs().max(1.0);
                    worst = worst.max(dev);
                    ok &= dev <= RTOL;
                }
            }
        }
        if !ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("50 instances, {bad} off, max coefficient deviation {worst:.2e}"),
    )
}

fn sketch_quality() -> Outcome {
    let (epsilon, delta) = (0.1, 0.1);
    let k = default_sketch_width(2, epsilon, delta);
    let p = SynthParams {
        min_tables: 2,
        max_tables: 2,
        max_rows: 15,
        distinct_rows: true,
        min_join: 8,
        ..SynthParams::default()
    };
    let mut ratios = Vec::new();
    let mut seed = 0u64;
    while ratios.len() < 50 {
        let db = instance(6000 + seed, &p);
        let cfg = TrainConfig {
            max_leaves: 3,
            num_trees: 2,
            mode: Mode::Sketch,
            epsilon,
            delta,
            k: Some(k),
            seed,
            ..TrainConfig::default()
        };
        let out = train_boosted(&db, &cfg).unwrap();
        for r in sketch_split_ratios(&db, &out.ensemble, &out.records, cfg.min_node).unwrap() {
            ratios.push(r.ratio);
        }
        seed += 1;
    }
    ratios.truncate(50);
    let within = ratios.iter().filter(|&&r| r <= 1.0 + 3.0 * epsilon).count();
    let worst = ratios.iter().cloned().fold(1.0, f64::max);
    outcome(
        within * 10 >= 9 * ratios.len(),
        format!(
            "eps={epsilon}, delta={delta}, k={k}: {within}/50 node evaluations within 1.3x of the exact optimum (>= 45), worst {worst:.3}"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/example");
    let mut detail = Vec::new();
    let mut pass = true;
    for (mode, seed) in [(Mode::Exact, 0u64), (Mode::Sketch, 17)] {
        let files: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let opts = TrainOptions {
                    join: data.join("joinspec.json"),
                    config: data.join("train.json"),
                    out: dir.path().join(format!("{mode:?}-{i}.json")),
                    overrides: Overrides {
                        seed: Some(seed),
                        mode: Some(mode),
                        count_queries: false,
                        trees: Some(3),
                    },
                    oracle: false,
                };
                cmd_train(&opts, &mut Vec::new(), &mut Vec::new()).unwrap();
                fs::read(&opts.out).unwrap()
            })
            .collect();
        let same = files[0] == files[1];
        pass &= same;
        detail.push(format!(
            "{mode:?}: {}",
            if same { "identical" } else { "differ" }
        ));
    }
    outcome(
        pass,
        format!("two cmd_train runs per mode, {}", detail.join(", ")),
    )
}

fn main() -> ExitCode {
    let (c1, c2) = sumprod_criteria();
    let results = vec![
        ("C1 SumProd correctness", c1),
        ("C2 grouped consistency", c2),
        ("C3 single-tree equivalence", algorithm1_equivalence()),
        ("C4 boosted equivalence", algorithm2_equivalence()),
        ("C5 residual-square assembly", residual_square_assembly()),
        ("C6 query-count closed forms", query_counts()),
        ("C7 tensor-sketch AMP", amp()),
        ("C8 sketch linearity", linearity()),
        ("C9 sketch-mode split quality", sketch_quality()),
        ("C10 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "[{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
