//! Commutative semirings and SumProd query evaluation over join trees.

mod brute;
mod engine;
mod query;

pub use brute::{eval_bruteforce, eval_bruteforce_grouped};
pub use engine::{eval_sumprod, eval_sumprod_grouped, GroupedResult, JoinPlan};
pub use query::{Constraints, FeatureFn, Interval, RowFn, SumProdQuery};

use std::fmt::Debug;

/// A commutative semiring `(S, ⊕, ⊗, 0, 1)`.
///
/// Values may be vectors (see [`crate::sketch::SketchSemiring`]); `width`
/// reports how many scalars one value carries.
pub trait Semiring {
    type Value: Clone + Debug + PartialEq;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;

    fn add_assign(&self, acc: &mut Self::Value, b: &Self::Value) {
        *acc = self.add(acc, b);
    }

    fn width(&self) -> usize {
        1
    }

    fn sum<'a, I>(&self, values: I) -> Self::Value
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        let mut acc = self.zero();
        for v in values {
            self.add_assign(&mut acc, v);
        }
        acc
    }
}

/// `(ℝ, +, ×)` over 64-bit floats.
#[derive(Debug, Clone, Copy, Default)]
pub struct RealSemiring;

impl Semiring for RealSemiring {
    type Value = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn add(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn mul(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn add_assign(&self, acc: &mut f64, b: &f64) {
        *acc += b;
    }
}

/// `(ℕ, +, ×)` with exact integer arithmetic; used to count join rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct CountingSemiring;

impl Semiring for CountingSemiring {
    type Value = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        a + b
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b
    }
    fn add_assign(&self, acc: &mut u64, b: &u64) {
        *acc += b;
    }
}
