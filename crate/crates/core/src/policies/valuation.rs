//! Bandit scores used to pick an AND child at an OR node.

use crate::proof_tree::AndNode;

/// The statistics of an AND child that the bandit formulas read.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChildStats {
    pub value: f64,
    pub visit: u64,
    pub prior: f64,
}

impl ChildStats {
    pub fn new(value: f64, visit: u64, prior: f64) -> Self {
        ChildStats { value, visit, prior }
    }
}

impl<G, A> From<&AndNode<G, A>> for ChildStats {
    fn from(node: &AndNode<G, A>) -> Self {
        ChildStats::new(node.value, node.visit, node.prior)
    }
}

/// Holophrasm's exploration score.
pub fn holophrasm_valuation(father_visit: f64, child: &ChildStats) -> f64 {
    assert!(father_visit >= 1.0, "father visit count must be at least 1");
    let n = child.visit as f64 + 1.0;
    child.value / n + 0.5 * child.prior / n + (father_visit.ln() / n).sqrt()
}

/// PUCT score.
pub fn puct_valuation(father_visit: f64, child: &ChildStats, c: f64) -> f64 {
    assert!(child.visit >= 1, "PUCT needs a visited child");
    child.value / child.visit as f64 + puct_exploration(father_visit, child, c)
}

/// The exploration half of PUCT, shared with the Product Propagation hybrid
/// where the exploitation term is the propagated probability.
pub(crate) fn puct_exploration(father_visit: f64, child: &ChildStats, c: f64) -> f64 {
    c * child.prior / (1.0 + child.visit as f64) * father_visit.sqrt()
}

/// Modified PUCT bandit: raw value, a prior term scaled by `a` and a UCB
/// term scaled by `b`.
pub fn modified_valuation(father_visit: f64, child: &ChildStats, a: f64, b: f64) -> f64 {
    assert!(child.visit >= 1, "modified bandit needs a visited child");
    assert!(father_visit >= 1.0, "father visit count must be at least 1");
    let n = child.visit as f64;
    let fv = father_visit;
    child.value + a * child.prior * fv.sqrt() / n + b * (fv.ln() / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn holophrasm_examples() {
        assert_eq!(holophrasm_valuation(1.0, &ChildStats::new(0.0, 0, 1.0)), 0.5);
        let v = holophrasm_valuation(E, &ChildStats::new(1.0, 1, 0.0));
        assert!((v - 1.2071067811865475).abs() < 1e-12);
        assert_eq!(holophrasm_valuation(1.0, &ChildStats::new(0.0, 0, 0.0)), 0.0);
    }

    #[test]
    #[should_panic(expected = "at least 1")]
    fn holophrasm_rejects_unvisited_father() {
        holophrasm_valuation(0.0, &ChildStats::new(0.0, 0, 0.0));
    }

    #[test]
    fn puct_examples() {
        let v = puct_valuation(4.0, &ChildStats::new(1.0, 2, 0.5), 0.2);
        assert!((v - 0.5666666666666667).abs() < 1e-12);
        assert_eq!(puct_valuation(9.0, &ChildStats::new(0.3, 3, 0.9), 0.0), 0.3 / 3.0);
        assert_eq!(puct_valuation(0.0, &ChildStats::new(0.3, 3, 0.9), 0.2), 0.3 / 3.0);
    }

    #[test]
    #[should_panic(expected = "visited child")]
    fn puct_rejects_zero_visits() {
        puct_valuation(1.0, &ChildStats::new(0.0, 0, 0.0), 0.2);
    }

    #[test]
    fn modified_examples() {
        let v = modified_valuation(1.0, &ChildStats::new(0.3, 1, 0.5), 0.8, 0.5);
        assert!((v - 0.7).abs() < 1e-12);
        assert_eq!(modified_valuation(17.0, &ChildStats::new(0.42, 5, 0.7), 0.0, 0.0), 0.42);
        let v = modified_valuation(E * E, &ChildStats::new(0.0, 2, 0.0), 0.9, 1.0);
        assert!((v - 1.0).abs() < 1e-12);
    }
}
