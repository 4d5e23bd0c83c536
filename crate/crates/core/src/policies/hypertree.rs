//! HyperTree-style search: PUCT picks one AND child per OR node, every
//! hypothesis of a picked AND node joins the hyper-subtree, and Product
//! Propagation values are backed up over exactly that subtree.

use crate::environment::ProofEnvironment;
use crate::proof_tree::{
    cut_and_node, try_expand_or, update_proven_and, update_proven_or, AndVerdict, Expansion, OrNode, TreeContext,
};

use super::pp::{pp_value_and, pp_value_or};
use super::valuation::{puct_exploration, ChildStats};
use super::{argmax, SearchConfig};

/// One pass: grow and back up a hyper-subtree rooted at `root`.
pub(crate) fn hypertree_pass<E: ProofEnvironment>(
    root: &mut OrNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) {
    grow(root, ctx, config, 0);
}

fn select<G, A>(node: &OrNode<G, A>, c: f64) -> Option<usize> {
    let father = node.visit.max(1) as f64;
    argmax(
        node.open_children()
            .map(|(i, child)| (i, child.value + puct_exploration(father, &ChildStats::from(child), c))),
    )
}

fn grow<E: ProofEnvironment>(
    node: &mut OrNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
    depth: usize,
) {
    if !node.is_open() {
        return;
    }
    // a freshly added AND node's hypotheses are leaves already evaluated on
    // creation, so expansion ends this branch of the hyper-subtree
    if try_expand_or(node, ctx) == Expansion::NotAttempted && depth < config.hypertree_depth_cap {
        if let Some(i) = select(node, config.c_puct) {
            let chosen = &mut node.children[i];
            for hypothesis in chosen.children.iter_mut().filter(|h| h.is_open()) {
                grow(hypothesis, ctx, config, depth + 1);
            }
            chosen.visit += 1;
            if update_proven_and(chosen) == AndVerdict::Cut {
                cut_and_node(node, i);
            } else {
                chosen.value = pp_value_and(chosen);
            }
        }
    }
    node.visit += 1;
    update_proven_or(node, ctx.dead_marking);
    node.value = pp_value_or(node);
}
