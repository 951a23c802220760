//! Monte-Carlo check of sketched square norms against exact ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::oracle::ssr_oracle;
use crate::semiring::Constraints;
use crate::sketch::splitmix;
use crate::synth::{random_instance, SynthParams};
use crate::train::{sketch_residual_vectors, JoinContext, PhaseCounts};
use crate::tree::Ensemble;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmpParams {
    pub tables: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Rows per table of the random instances.
    pub max_rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmpTrial {
    pub seed: u64,
    pub estimate: f64,
    pub truth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmpReport {
    pub params: AmpParams,
    pub trials: Vec<AmpTrial>,
}

impl AmpReport {
    /// Fraction of trials with `|estimate − truth| > ε·truth`.
    pub fn failure_rate(&self) -> f64 {
        let e = self.params.epsilon;
        let fails = self
            .trials
            .iter()
            .filter(|t| (t.estimate - t.truth).abs() > e * t.truth)
            .count();
        fails as f64 / self.trials.len() as f64
    }

    pub fn mean_relative_error(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| (t.estimate - t.truth).abs() / t.truth)
            .sum::<f64>()
            / self.trials.len() as f64
    }

    /// Mean of `estimate / truth`; near 1 for an unbiased sketch.
    pub fn mean_ratio(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| t.estimate / t.truth)
            .sum::<f64>()
            / self.trials.len() as f64
    }
}

/// Each trial draws a random instance with distinct rows and real labels
/// over `tables` tables, sketches the label vector of the whole join with
/// a fresh seed, and compares the sketch's square norm to the exact
/// square sum of the labels.
pub fn amp_bench(p: &AmpParams) -> Result<AmpReport> {
    let synth = SynthParams {
        min_tables: p.tables,
        max_tables: p.tables,
        max_rows: p.max_rows,
        real_labels: true,
        distinct_rows: true,
        min_join: 2,
        ..SynthParams::default()
    };
    let mut trials = Vec::with_capacity(p.trials);
    for i in 0..p.trials {
        let seed = splitmix(p.seed.wrapping_add(i as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let db = random_instance(&mut rng, &synth);
        let ctx = JoinContext::new(&db)?;
        let sketch = crate::sketch::TensorSketch::new(ctx.domain().clone(), p.k, splitmix(seed));
        let all = Constraints::new();
        let lt = db.label_table();
        let per_row =
            sketch_residual_vectors(&ctx, &sketch, &all, &[], lt, &mut PhaseCounts::default())?;
        let mut total = crate::sketch::SketchVector::zeros(p.k);
        for v in &per_row {
            total.add_assign(v);
        }
        let dm = db.materialize()?;
        let truth = ssr_oracle(&dm, &Ensemble::new(db.label(), vec![]), &all)?;
        trials.push(AmpTrial {
            seed,
            estimate: total.norm_sq(),
            truth,
        });
    }
    Ok(AmpReport { params: *p, trials })
}
