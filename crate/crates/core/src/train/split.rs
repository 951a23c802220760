//! Split search shared by the relational trainer and the oracle.
//!
//! Both sides bin their per-row statistics by threshold candidate, then
//! call the same scan and selection code, so split conventions cannot
//! drift apart.

use crate::sketch::SketchVector;

/// Objectives within `TIE_RTOL * scale` of the minimum are ties.
pub const TIE_RTOL: f64 = 1e-9;

/// Sum of squares carried through prefix sums: exact (`f64`) or sketched.
pub trait SquareStat: Clone {
    fn add_assign(&mut self, other: &Self);
    fn estimate(&self) -> f64;
    /// Estimate for `total - part`.
    fn estimate_diff(total: &Self, part: &Self) -> f64;
}

impl SquareStat for f64 {
    fn add_assign(&mut self, other: &f64) {
        *self += other;
    }
    fn estimate(&self) -> f64 {
        *self
    }
    fn estimate_diff(total: &f64, part: &f64) -> f64 {
        total - part
    }
}

impl SquareStat for SketchVector {
    fn add_assign(&mut self, other: &SketchVector) {
        SketchVector::add_assign(self, other);
    }
    fn estimate(&self) -> f64 {
        self.norm_sq()
    }
    fn estimate_diff(total: &SketchVector, part: &SketchVector) -> f64 {
        total
            .coeffs()
            .iter()
            .zip(part.coeffs())
            .map(|(t, p)| (t - p) * (t - p))
            .sum()
    }
}

/// A candidate split feature: owning table, column within it, name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitFeature {
    pub table: usize,
    pub column: usize,
    pub name: String,
}

/// Count, sum and sum of squares of a region.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegionStats {
    pub count: f64,
    pub sum: f64,
    pub sq: f64,
}

impl RegionStats {
    /// Mean; zero for an empty region.
    pub fn mean(&self) -> f64 {
        if self.count > 0.0 {
            self.sum / self.count
        } else {
            0.0
        }
    }

    /// `sq - sum² / count`
    pub fn sse(&self) -> f64 {
        if self.count > 0.0 {
            self.sq - self.sum * self.sum / self.count
        } else {
            0.0
        }
    }
}

/// Per-threshold bins for one feature. Bin `i` holds rows whose value
/// equals `thresholds[i]`.
#[derive(Debug, Clone)]
pub struct Histogram<Q> {
    pub thresholds: Vec<f64>,
    count: Vec<f64>,
    sum: Vec<f64>,
    sq: Vec<Option<Q>>,
}

impl<Q: SquareStat> Histogram<Q> {
    pub fn new(thresholds: Vec<f64>) -> Self {
        let n = thresholds.len();
        Histogram {
            thresholds,
            count: vec![0.0; n],
            sum: vec![0.0; n],
            sq: vec![None; n],
        }
    }

    pub fn add(&mut self, bin: usize, count: f64, sum: f64, sq: &Q) {
        self.count[bin] += count;
        self.sum[bin] += sum;
        match &mut self.sq[bin] {
            Some(acc) => acc.add_assign(sq),
            slot @ None => *slot = Some(sq.clone()),
        }
    }
}

/// Bin of `value` in sorted, distinct `thresholds`.
pub fn bin_of(thresholds: &[f64], value: f64) -> usize {
    let i = thresholds.partition_point(|&t| t < value);
    debug_assert!(i < thresholds.len() && thresholds[i] == value);
    i
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    /// Index into the feature list handed to [`choose_split`].
    pub feature: usize,
    pub threshold: f64,
    pub objective: f64,
    pub left: RegionStats,
    pub right: RegionStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitChoice {
    pub feature: SplitFeature,
    pub threshold: f64,
    /// Total SSE of both children.
    pub objective: f64,
    pub left: RegionStats,
    pub right: RegionStats,
}

/// Score every threshold of one feature. Threshold `thresholds[i]` sends
/// bins `< i` left. Candidates leaving fewer than `min_node` rows on a side
/// are skipped.
pub fn score_candidates<Q: SquareStat>(
    hist: &Histogram<Q>,
    feature: usize,
    min_node: f64,
    out: &mut Vec<CandidateScore>,
) {
    let n = hist.thresholds.len();
    let total_count: f64 = hist.count.iter().sum();
    let total_sum: f64 = hist.sum.iter().sum();
    let mut total_sq: Option<Q> = None;
    for q in hist.sq.iter().flatten() {
        match &mut total_sq {
            Some(acc) => acc.add_assign(q),
            slot @ None => *slot = Some(q.clone()),
        }
    }
    let Some(total_sq) = total_sq else {
        return;
    };

    let mut left_count = 0.0;
    let mut left_sum = 0.0;
    let mut left_sq: Option<Q> = None;
    for i in 0..n {
        if i > 0 {
            left_count += hist.count[i - 1];
            left_sum += hist.sum[i - 1];
            if let Some(q) = &hist.sq[i - 1] {
                match &mut left_sq {
                    Some(acc) => acc.add_assign(q),
                    slot @ None => *slot = Some(q.clone()),
                }
            }
        }
        let right_count = total_count - left_count;
        if left_count < min_node || right_count < min_node {
            continue;
        }
        let Some(lq) = &left_sq else {
            continue;
        };
        let left = RegionStats {
            count: left_count,
            sum: left_sum,
            sq: lq.estimate(),
        };
        let right = RegionStats {
            count: right_count,
            sum: total_sum - left_sum,
            sq: Q::estimate_diff(&total_sq, lq),
        };
        let objective = left.sse() + right.sse();
        if objective.is_finite() {
            out.push(CandidateScore {
                feature,
                threshold: hist.thresholds[i],
                objective,
                left,
                right,
            });
        }
    }
}

/// Pick the split: among candidates within tolerance of the minimum
/// objective, the first in (feature, threshold) order. `None` when no
/// candidate improves on the parent's SSE by more than the tolerance.
///
/// `candidates` must be ordered by feature, then threshold.
pub fn choose_split(
    features: &[SplitFeature],
    candidates: &[CandidateScore],
    parent: RegionStats,
    scale: f64,
) -> Option<SplitChoice> {
    let tol = TIE_RTOL * scale.abs();
    let best = candidates
        .iter()
        .map(|c| c.objective)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() || parent.sse() - best <= tol {
        return None;
    }
    let c = candidates.iter().find(|c| c.objective <= best + tol)?;
    Some(SplitChoice {
        feature: features[c.feature].clone(),
        threshold: c.threshold,
        objective: c.objective,
        left: c.left,
        right: c.right,
    })
}
