use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::relational::Database;

/// Half-open interval `[lo, hi)`; infinite bounds mean unconstrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const FULL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// `x >= threshold`
    pub fn at_least(threshold: f64) -> Self {
        Interval {
            lo: threshold,
            hi: f64::INFINITY,
        }
    }

    /// `x < threshold`
    pub fn below(threshold: f64) -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: threshold,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }
}

/// Conjunction of per-feature intervals. Repeated constraints on one
/// feature are intersected into a single interval.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    intervals: BTreeMap<String, Interval>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, feature: &str, interval: Interval) {
        let slot = self
            .intervals
            .entry(feature.to_string())
            .or_insert(Interval::FULL);
        *slot = slot.intersect(&interval);
    }

    pub fn with(mut self, feature: &str, interval: Interval) -> Self {
        self.add(feature, interval);
        self
    }

    pub fn conjoin(&self, other: &Constraints) -> Constraints {
        let mut out = self.clone();
        for (f, iv) in &other.intervals {
            out.add(f, *iv);
        }
        out
    }

    pub fn get(&self, feature: &str) -> Option<&Interval> {
        self.intervals.get(feature)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Interval)> {
        self.intervals.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_satisfiable(&self) -> bool {
        self.intervals.values().all(|iv| !iv.is_empty())
    }

    /// Row check given a column-lookup function. Unknown features fail.
    pub fn admits(&self, mut value_of: impl FnMut(&str) -> Option<f64>) -> bool {
        self.intervals
            .iter()
            .all(|(f, iv)| value_of(f).is_some_and(|x| iv.contains(x)))
    }
}

impl fmt::Display for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "true");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(name, iv)| match (iv.lo.is_finite(), iv.hi.is_finite()) {
                (true, true) => format!("{} <= {name} < {}", iv.lo, iv.hi),
                (true, false) => format!("{name} >= {}", iv.lo),
                (false, true) => format!("{name} < {}", iv.hi),
                (false, false) => format!("{name} any"),
            })
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

pub type FeatureFn<V> = Arc<dyn Fn(f64) -> V + Send + Sync>;
/// Factor over a whole table row, given in the table's column order.
pub type RowFn<V> = Arc<dyn Fn(&[f64]) -> V + Send + Sync>;

/// `⊕_{x ∈ J} ⊗_f q_f(x_f)`, optionally gated by interval constraints.
///
/// Features without an explicit factor use the multiplicative identity.
/// Row factors multiply in a function of a whole table row; they are how
/// tensor-sketch monomials, which depend on several columns at once, enter
/// a query.
pub struct SumProdQuery<V> {
    pub(crate) factors: BTreeMap<String, FeatureFn<V>>,
    pub(crate) row_factors: BTreeMap<String, RowFn<V>>,
    pub(crate) constraints: Constraints,
}

impl<V> Clone for SumProdQuery<V> {
    fn clone(&self) -> Self {
        SumProdQuery {
            factors: self.factors.clone(),
            row_factors: self.row_factors.clone(),
            constraints: self.constraints.clone(),
        }
    }
}

impl<V> Default for SumProdQuery<V> {
    fn default() -> Self {
        SumProdQuery {
            factors: BTreeMap::new(),
            row_factors: BTreeMap::new(),
            constraints: Constraints::new(),
        }
    }
}

impl<V> SumProdQuery<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factor(mut self, feature: &str, f: impl Fn(f64) -> V + Send + Sync + 'static) -> Self {
        self.factors.insert(feature.to_string(), Arc::new(f));
        self
    }

    pub fn row_factor(mut self, table: &str, f: RowFn<V>) -> Self {
        self.row_factors.insert(table.to_string(), f);
        self
    }

    pub fn constrain(mut self, feature: &str, interval: Interval) -> Self {
        self.constraints.add(feature, interval);
        self
    }

    pub fn with_constraints(mut self, constraints: &Constraints) -> Self {
        self.constraints = self.constraints.conjoin(constraints);
        self
    }

    pub fn constraints(&self) -> &Constraints {
        &self.constraints
    }

    pub fn validate(&self, db: &Database) -> Result<()> {
        for f in self.factors.keys() {
            if db.owner(f).is_none() {
                return Err(Error::Query(format!("factor for unknown feature `{f}`")));
            }
        }
        for t in self.row_factors.keys() {
            if db.table_index(t).is_none() {
                return Err(Error::Query(format!("row factor for unknown table `{t}`")));
            }
        }
        for (f, _) in self.constraints.iter() {
            if db.owner(f).is_none() {
                return Err(Error::Query(format!("constraint on unknown feature `{f}`")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_boundaries() {
        let right = Interval::at_least(2.0);
        assert!(right.contains(2.0));
        assert!(!Interval::below(2.0).contains(2.0));
        assert!(right.intersect(&Interval::below(2.0)).is_empty());
        assert!(!Interval::FULL.is_empty());
    }

    #[test]
    fn repeated_constraints_intersect() {
        let c = Constraints::new()
            .with("f", Interval::at_least(1.0))
            .with("f", Interval::below(5.0))
            .with("f", Interval::at_least(3.0));
        assert_eq!(c.get("f"), Some(&Interval { lo: 3.0, hi: 5.0 }));
        assert!(c.is_satisfiable());
        let c = c.with("f", Interval::below(3.0));
        assert!(!c.is_satisfiable());
    }

    #[test]
    fn admits_rows() {
        let c = Constraints::new().with("f", Interval::at_least(1.0));
        assert!(c.admits(|_| Some(1.0)));
        assert!(!c.admits(|_| Some(0.5)));
        assert!(!c.admits(|_| None));
    }
}
