use std::sync::Arc;

use crate::error::Result;
use crate::relational::Database;
use crate::semiring::RowFn;
use crate::sketch::{splitmix, DomainIndex, HashPair, SketchVector};

/// `⌈(2 + 3^τ) / (ε² δ)⌉`, the sketch width guaranteeing the approximate
/// matrix product bound.
pub fn default_sketch_width(tables: usize, epsilon: f64, delta: f64) -> usize {
    let x = (2.0 + 3f64.powi(tables as i32)) / (epsilon * epsilon * delta);
    // absorb representation error so that e.g. 11 / 0.025 gives 440
    (x * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// One tensor-sketch operator: a bucket/sign hash pair per table over the
/// table's domain index. Cheap to clone.
#[derive(Debug, Clone)]
pub struct TensorSketch {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    k: usize,
    seed: u64,
    hashes: Vec<HashPair>,
    domain: Arc<DomainIndex>,
}

impl TensorSketch {
    pub fn new(domain: Arc<DomainIndex>, k: usize, seed: u64) -> Self {
        assert!(k >= 1);
        let hashes = (0..domain.num_tables())
            .map(|t| HashPair::new(splitmix(seed.wrapping_add(t as u64)), k))
            .collect();
        TensorSketch {
            inner: Arc::new(Inner {
                k,
                seed,
                hashes,
                domain,
            }),
        }
    }

    pub fn for_database(db: &Database, k: usize, seed: u64) -> Self {
        Self::new(Arc::new(DomainIndex::new(db)), k, seed)
    }

    pub fn k(&self) -> usize {
        self.inner.k
    }

    pub fn seed(&self) -> u64 {
        self.inner.seed
    }

    pub fn domain(&self) -> &DomainIndex {
        &self.inner.domain
    }

    pub fn hashes(&self, t: usize) -> &HashPair {
        &self.inner.hashes[t]
    }

    /// `g_t(e_{w_t(row)}) = s_t(w_t(row)) · z^{h_t(w_t(row))}`
    pub fn table_factor_monomial(&self, t: usize, row: &[f64]) -> Result<SketchVector> {
        let w = self.inner.domain.index_of_row(t, row)?;
        let h = &self.inner.hashes[t];
        Ok(SketchVector::monomial(
            self.inner.k,
            h.bucket.bucket(w),
            h.sign.sign(w),
        ))
    }

    /// Row factor for SumProd queries over table `t`, optionally scaled by
    /// a function of the row (e.g. the label).
    pub fn row_factor(&self, t: usize, weight: Option<usize>) -> RowFn<SketchVector> {
        let sk = self.clone();
        Arc::new(move |row: &[f64]| {
            let mut m = sk
                .table_factor_monomial(t, row)
                .expect("rows of a table are always in its domain index");
            if let Some(j) = weight {
                m.scale(row[j]);
            }
            m
        })
    }

    /// Sketch coordinate of a Kronecker index `(w_1, …, w_τ)`: the bucket
    /// `Σ h_t(w_t) mod k` and the sign `Π s_t(w_t)`.
    pub fn coordinate(&self, indices: &[usize]) -> (usize, f64) {
        let mut bucket = 0usize;
        let mut sign = 1.0;
        for (t, &w) in indices.iter().enumerate() {
            let h = &self.inner.hashes[t];
            bucket = (bucket + h.bucket.bucket(w)) % self.inner.k;
            sign *= h.sign.sign(w);
        }
        (bucket, sign)
    }
}
