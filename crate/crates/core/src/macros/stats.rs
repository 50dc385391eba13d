use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

/// Replacement counters. Merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacementStats {
    pub per_rule: BTreeMap<String, u64>,
    pub total: u64,
    /// Formulae processed.
    pub formulae: u64,
    /// Formulae with at least one replacement.
    pub formulae_touched: u64,
}

impl ReplacementStats {
    pub fn record(&mut self, macro_name: &str) {
        *self.per_rule.entry(macro_name.to_owned()).or_default() += 1;
        self.total += 1;
    }

    /// Mean replacements per processed formula; zero for an empty corpus.
    pub fn avg_per_formula(&self) -> f64 {
        if self.formulae == 0 {
            0.0
        } else {
            self.total as f64 / self.formulae as f64
        }
    }

    pub fn merge(&mut self, other: &ReplacementStats) {
        for (k, v) in &other.per_rule {
            *self.per_rule.entry(k.clone()).or_default() += v;
        }
        self.total += other.total;
        self.formulae += other.formulae;
        self.formulae_touched += other.formulae_touched;
    }

    pub fn is_consistent(&self) -> bool {
        self.per_rule.values().sum::<u64>() == self.total
    }
}

impl AddAssign<&ReplacementStats> for ReplacementStats {
    fn add_assign(&mut self, rhs: &ReplacementStats) {
        self.merge(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_adds_up() {
        let mut a = ReplacementStats::default();
        a.record("EulerGamma");
        a.formulae = 1;
        a.formulae_touched = 1;
        let mut b = ReplacementStats::default();
        b.record("EulerGamma");
        b.record("sin");
        b.formulae = 2;
        b.formulae_touched = 1;
        a += &b;
        assert_eq!(a.total, 3);
        assert_eq!(a.per_rule["EulerGamma"], 2);
        assert!(a.is_consistent());
        assert_eq!(a.avg_per_formula(), 1.0);
    }

    #[test]
    fn empty_average_is_zero() {
        assert_eq!(ReplacementStats::default().avg_per_formula(), 0.0);
    }
}
