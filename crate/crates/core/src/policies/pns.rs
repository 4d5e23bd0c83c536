//! Proof Number Search over a progressively widened tree.
//!
//! Candidates still waiting in an OR node's heap count as unexpanded
//! `(1, 1)` leaves, so an OR node's disproof number only reaches zero once
//! every candidate has been tried and refuted.

use crate::environment::ProofEnvironment;
use crate::proof_tree::{
    cut_and_node, try_expand_or, update_proven_and, update_proven_or, AndNode, AndVerdict, Expansion, NodeStatus, OrNode,
    ProofNumber, TreeContext,
};

use super::SearchConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Or,
    And,
}

/// Initial numbers of a leaf: unknown `(1, 1)`, proven `(0, inf)`,
/// disproven `(inf, 0)`.
pub fn pns_init(status: NodeStatus) -> (ProofNumber, ProofNumber) {
    match status {
        NodeStatus::Open => (ProofNumber::ONE, ProofNumber::ONE),
        NodeStatus::Proven => (ProofNumber::ZERO, ProofNumber::Infinite),
        NodeStatus::Dead => (ProofNumber::Infinite, ProofNumber::ZERO),
    }
}

/// Classical backup: OR takes the min proof number and summed disproof
/// numbers, AND the summed proof numbers and min disproof number.
pub fn pns_update(kind: NodeKind, children: &[(ProofNumber, ProofNumber)]) -> (ProofNumber, ProofNumber) {
    let min_pn = children.iter().map(|c| c.0).min().unwrap_or(ProofNumber::Infinite);
    let min_dpn = children.iter().map(|c| c.1).min().unwrap_or(ProofNumber::Infinite);
    match kind {
        NodeKind::Or => (min_pn, children.iter().map(|c| c.1).sum()),
        NodeKind::And => (children.iter().map(|c| c.0).sum(), min_dpn),
    }
}

/// Child to descend into. Classical mode follows the most-proving path
/// (OR: lowest pn, AND: lowest dpn); `disproof_selection` swaps the two
/// criteria (OR: lowest dpn, AND: lowest pn). Lowest index wins ties.
pub fn pns_select(kind: NodeKind, children: &[(ProofNumber, ProofNumber)], disproof_selection: bool) -> Option<usize> {
    let by_pn = matches!((kind, disproof_selection), (NodeKind::Or, false) | (NodeKind::And, true));
    children
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            let (x, y) = if by_pn { (a.0, b.0) } else { (a.1, b.1) };
            x.cmp(&y).then(i.cmp(j))
        })
        .map(|(i, _)| i)
}

/// Recomputes an OR node's numbers from its status, children and the
/// candidates still in its heap.
pub(super) fn refresh_or<G, A>(node: &mut OrNode<G, A>) {
    let (pn, dpn) = if node.status != NodeStatus::Open {
        pns_init(node.status)
    } else {
        let pending = if node.heap.is_filled() { node.heap.len() } else { 1 };
        let mut numbers: Vec<_> = node.children.iter().map(|c| (c.pn, c.dpn)).collect();
        numbers.extend(std::iter::repeat_n(pns_init(NodeStatus::Open), pending));
        if numbers.is_empty() {
            pns_init(NodeStatus::Open)
        } else {
            pns_update(NodeKind::Or, &numbers)
        }
    };
    node.pn = pn;
    node.dpn = dpn;
}

pub(super) fn refresh_and<G, A>(node: &mut AndNode<G, A>) {
    let (pn, dpn) = if node.status != NodeStatus::Open {
        pns_init(node.status)
    } else {
        let numbers: Vec<_> = node.children.iter().map(|c| (c.pn, c.dpn)).collect();
        pns_update(NodeKind::And, &numbers)
    };
    node.pn = pn;
    node.dpn = dpn;
}

pub(super) fn visit_or<E: ProofEnvironment>(
    node: &mut OrNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) {
    if !node.is_open() {
        return;
    }
    match try_expand_or(node, ctx) {
        Expansion::Added => {
            if let Some(child) = node.children.last_mut() {
                refresh_and(child);
            }
        }
        Expansion::Failed => {}
        Expansion::NotAttempted => {
            let open: Vec<usize> = node.open_children().map(|(i, _)| i).collect();
            let numbers: Vec<_> = open.iter().map(|&i| (node.children[i].pn, node.children[i].dpn)).collect();
            if let Some(k) = pns_select(NodeKind::Or, &numbers, config.pns_disproof_selection) {
                let i = open[k];
                if visit_and(&mut node.children[i], ctx, config) == AndVerdict::Cut {
                    cut_and_node(node, i);
                }
            }
        }
    }
    node.visit += 1;
    update_proven_or(node, ctx.dead_marking);
    refresh_or(node);
}

fn visit_and<E: ProofEnvironment>(
    node: &mut AndNode<E::Goal, E::Action>,
    ctx: &mut TreeContext<'_, E>,
    config: &SearchConfig,
) -> AndVerdict {
    let open: Vec<usize> = node.open_children().map(|(i, _)| i).collect();
    let numbers: Vec<_> = open.iter().map(|&i| (node.children[i].pn, node.children[i].dpn)).collect();
    if let Some(k) = pns_select(NodeKind::And, &numbers, config.pns_disproof_selection) {
        visit_or(&mut node.children[open[k]], ctx, config);
    }
    node.visit += 1;
    let verdict = update_proven_and(node);
    refresh_and(node);
    verdict
}
