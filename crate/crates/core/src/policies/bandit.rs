//! Holophrasm and PUCT: bandit descent at OR nodes, worst-child descent at
//! AND nodes, and the recompute-style statistics of the original prover.

use crate::environment::ProofEnvironment;
use crate::proof_tree::{
    cut_and_node, try_expand_or, update_proven_and, update_proven_or, update_value_and, update_value_or, worst_by_ratio,
    AndNode, AndVerdict, Expansion, OrNode, TreeContext,
};

use super::valuation::{holophrasm_valuation, puct_valuation, ChildStats};
use super::{argmax, Algorithm, SearchConfig};

fn select_and<G, A>(node: &OrNode<G, A>, config: &SearchConfig) -> Option<usize> {
    let father = node.visit.max(1) as f64;
    let scores = node.open_children().map(|(i, child)| {
        let stats = ChildStats::from(child);
        let score = match config.algorithm {
            Algorithm::Puct => puct_valuation(father, &stats, config.c_puct),
            _ => holophrasm_valuation(father, &stats),
        };
        (i, score)
    });
    argmax(scores)
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
    if node.children.is_empty() {
        // the recompute below needs children; count the visit directly
        node.visit += 1;
    }
    update_proven_or(node, ctx.dead_marking);
    update_value_or(node);
}

fn visit_and<E: ProofEnvironment>(
    node: &mut AndNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) -> AndVerdict {
    if let Some(i) = worst_by_ratio(node.open_children()) {
        visit_or(&mut node.children[i], ctx, config);
    }
    let verdict = update_proven_and(node);
    if verdict == AndVerdict::Keep {
        update_value_and(node);
    }
    verdict
}
