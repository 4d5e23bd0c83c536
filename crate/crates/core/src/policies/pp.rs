//! Product Propagation and its PUCT hybrids.
//!
//! Node values are probabilities of provability under an independence
//! assumption: an AND node multiplies its hypotheses' values, an OR node
//! combines its children as `1 - prod(1 - v)`. Open leaves carry the payout
//! estimate. Visit counts advance once per pass along the visited path.

use crate::environment::ProofEnvironment;
use crate::proof_tree::{
    cut_and_node, try_expand_or, update_proven_and, update_proven_or, AndNode, AndVerdict, Expansion, NodeStatus, OrNode,
    TreeContext,
};

use super::valuation::{modified_valuation, puct_exploration, ChildStats};
use super::{argmax, argmin, Algorithm, SearchConfig};

fn check_probability(v: f64) {
    assert!((0.0..=1.0).contains(&v), "probability {v} outside [0, 1]");
}

/// Value of a conjunction of independent events. Empty conjunction is 1.
pub fn pp_combine_and(child_values: &[f64]) -> f64 {
    child_values.iter().fold(1.0, |acc, &v| {
        check_probability(v);
        acc * v
    })
}

/// Value of a disjunction of independent events, `1 - prod(1 - v)`.
/// Callers handle the childless case with the payout estimate.
pub fn pp_combine_or(child_values: &[f64]) -> f64 {
    let miss = child_values.iter().fold(1.0, |acc, &v| {
        check_probability(v);
        acc * (1.0 - v)
    });
    1.0 - miss
}

/// PP value of an OR node from its status and current children.
pub fn pp_value_or<G, A>(node: &OrNode<G, A>) -> f64 {
    match node.status {
        NodeStatus::Proven => 1.0,
        NodeStatus::Dead => 0.0,
        NodeStatus::Open if node.children.is_empty() => node.network_payout,
        NodeStatus::Open => {
            let values: Vec<f64> = node.children.iter().map(|c| c.value).collect();
            pp_combine_or(&values)
        }
    }
}

/// PP value of an AND node from its status and current children.
pub fn pp_value_and<G, A>(node: &AndNode<G, A>) -> f64 {
    match node.status {
        NodeStatus::Proven => 1.0,
        NodeStatus::Dead => 0.0,
        NodeStatus::Open => {
            let values: Vec<f64> = node.children.iter().map(|c| c.value).collect();
            pp_combine_and(&values)
        }
    }
}

fn select_and<G, A>(node: &OrNode<G, A>, config: &SearchConfig) -> Option<usize> {
    let father = node.visit.max(1) as f64;
    let scores = node.open_children().map(|(i, child)| {
        let stats = ChildStats::from(child);
        let score = match config.algorithm {
            Algorithm::PpPuct => child.value + puct_exploration(father, &stats, config.c_puct),
            Algorithm::PpModifiedBandit => modified_valuation(father, &stats, config.a, config.b),
            _ => child.value,
        };
        (i, score)
    });
    argmax(scores)
}

fn select_or<G, A>(node: &AndNode<G, A>, config: &SearchConfig) -> Option<usize> {
    let scores = node.open_children().map(|(i, child)| {
        let score = match config.algorithm {
            Algorithm::ProductPropagation => child.value,
            _ => child.value / child.visit as f64,
        };
        (i, score)
    });
    argmin(scores)
}

pub(super) fn visit_or<E: ProofEnvironment>(
    node: &mut OrNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) {
    if !node.is_open() {
        return;
    }
    if try_expand_or(node, ctx) == Expansion::NotAttempted {
        if let Some(i) = select_and(node, config) {
            if visit_and(&mut node.children[i], ctx, config) == AndVerdict::Cut {
                cut_and_node(node, i);
            }
        }
    }
    node.visit += 1;
    update_proven_or(node, ctx.dead_marking);
    node.value = pp_value_or(node);
}

fn visit_and<E: ProofEnvironment>(
    node: &mut AndNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) -> AndVerdict {
    if let Some(i) = select_or(node, config) {
        visit_or(&mut node.children[i], ctx, config);
    }
    node.visit += 1;
    let verdict = update_proven_and(node);
    if verdict == AndVerdict::Keep {
        node.value = pp_value_and(node);
    }
    verdict
}

/// Materializes every candidate of every OR node below `node`, ignoring
/// widening, down to `depth_cap` OR levels. Only meaningful for finite
/// environments.
pub fn expand_fully<E: ProofEnvironment>(
    node: &mut OrNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    depth_cap: usize,
) {
    if node.trivial || depth_cap == 0 {
        return;
    }
    if !node.heap.is_filled() {
        let candidates = ctx.env.candidates(&node.goal, ctx.beam);
        node.heap.fill(candidates);
    }
    while let Some(candidate) = node.heap.pop() {
        match ctx.env.apply(&node.goal, &candidate.action) {
            Ok(subgoals) if !subgoals.iter().any(|g| node.repeats(g)) => {
                let child = AndNode::below(Some(node.lineage()), candidate.action, candidate.priority, subgoals, ctx);
                node.children.push(child);
            }
            _ => node.childless_visit += 1,
        }
    }
    for child in &mut node.children {
        for grandchild in &mut child.children {
            expand_fully(grandchild, ctx, depth_cap - 1);
        }
    }
}

/// Recomputes statuses and PP values bottom-up over a whole subtree,
/// cutting AND nodes with a dead hypothesis.
pub fn pp_backup_subtree<G, A>(node: &mut OrNode<G, A>, dead_marking: bool) {
    let mut i = 0;
    while i < node.children.len() {
        let child = &mut node.children[i];
        for grandchild in &mut child.children {
            pp_backup_subtree(grandchild, dead_marking);
        }
        if update_proven_and(child) == AndVerdict::Cut {
            cut_and_node(node, i);
            continue;
        }
        child.value = pp_value_and(child);
        i += 1;
    }
    if node.status == NodeStatus::Open && node.heap.is_filled() && node.children.is_empty() {
        // a fully expanded childless node has used up its chances
        node.visit = node.visit.max(2);
    }
    update_proven_or(node, dead_marking);
    node.value = pp_value_or(node);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and_combiner() {
        assert_eq!(pp_combine_and(&[0.5, 0.5]), 0.25);
        assert_eq!(pp_combine_and(&[]), 1.0);
        assert_eq!(pp_combine_and(&[1.0, 0.3, 1.0]), 0.3);
    }

    #[test]
    fn or_combiner() {
        assert_eq!(pp_combine_or(&[0.5, 0.5]), 0.75);
        assert_eq!(pp_combine_or(&[1.0, 0.37]), 1.0);
        assert_eq!(pp_combine_or(&[0.0, 0.0]), 0.0);
    }

    #[test]
    #[should_panic(expected = "outside [0, 1]")]
    fn combiners_reject_out_of_range() {
        pp_combine_and(&[0.5, 1.5]);
    }

    #[test]
    #[should_panic(expected = "outside [0, 1]")]
    fn or_combiner_rejects_negative() {
        pp_combine_or(&[-0.1]);
    }
}
