//! AND/OR proof trees.
//!
//! OR nodes are goals; their children are AND nodes, each one a proposition
//! applied under a substitution. The children of an AND node are the
//! instantiated hypotheses of that proposition, again OR nodes.
//!
//! The tree owns its subtrees directly, so cutting an AND node drops its
//! whole subtree. Every search policy in [`crate::policies`] works on these
//! nodes through the primitives defined here.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::ops::Add;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::environment::{Candidate, ProofEnvironment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeStatus {
    Open,
    Proven,
    Dead,
}

/// A proof or disproof number. `Infinite` absorbs addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProofNumber {
    Finite(u64),
    Infinite,
}

impl ProofNumber {
    pub const ZERO: ProofNumber = ProofNumber::Finite(0);
    pub const ONE: ProofNumber = ProofNumber::Finite(1);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }
}

impl Add for ProofNumber {
    type Output = ProofNumber;

    fn add(self, rhs: ProofNumber) -> ProofNumber {
        match (self, rhs) {
            (ProofNumber::Finite(a), ProofNumber::Finite(b)) => match a.checked_add(b) {
                Some(sum) => ProofNumber::Finite(sum),
                None => ProofNumber::Infinite,
            },
            _ => ProofNumber::Infinite,
        }
    }
}

impl std::iter::Sum for ProofNumber {
    fn sum<I: Iterator<Item = ProofNumber>>(iter: I) -> ProofNumber {
        iter.fold(ProofNumber::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for ProofNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofNumber::Finite(n) => write!(f, "{n}"),
            ProofNumber::Infinite => write!(f, "inf"),
        }
    }
}

struct HeapEntry<A> {
    priority: f64,
    seq: u64,
    action: A,
}

impl<A> PartialEq for HeapEntry<A> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<A> Eq for HeapEntry<A> {}

impl<A> PartialOrd for HeapEntry<A> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<A> Ord for HeapEntry<A> {
    // Highest priority first; among equals, earliest inserted first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Max-priority queue of candidates. Filled at most once.
pub struct CandidateHeap<A> {
    entries: BinaryHeap<HeapEntry<A>>,
    next_seq: u64,
    filled: bool,
}

impl<A> Default for CandidateHeap<A> {
    fn default() -> Self {
        CandidateHeap {
            entries: BinaryHeap::new(),
            next_seq: 0,
            filled: false,
        }
    }
}

impl<A> CandidateHeap<A> {
    pub fn is_filled(&self) -> bool {
        self.filled
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn fill(&mut self, candidates: impl IntoIterator<Item = Candidate<A>>) {
        for c in candidates {
            self.entries.push(HeapEntry {
                priority: c.priority,
                seq: self.next_seq,
                action: c.action,
            });
            self.next_seq += 1;
        }
        self.filled = true;
    }

    pub fn pop(&mut self) -> Option<Candidate<A>> {
        self.entries.pop().map(|e| Candidate::new(e.action, e.priority))
    }

    pub fn peek_priority(&self) -> Option<f64> {
        self.entries.peek().map(|e| e.priority)
    }
}

impl<A> fmt::Debug for CandidateHeap<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CandidateHeap")
            .field("len", &self.entries.len())
            .field("filled", &self.filled)
            .finish()
    }
}

fn transition(status: &mut NodeStatus, to: NodeStatus) {
    match (*status, to) {
        (NodeStatus::Open, _) => *status = to,
        (from, to) if from == to => {}
        (from, to) => panic!("node status is absorbing: cannot go from {from:?} to {to:?}"),
    }
}

#[derive(Debug)]
pub struct OrNode<G, A> {
    pub goal: G,
    pub value: f64,
    pub visit: u64,
    pub childless_visit: u64,
    pub network_payout: f64,
    pub heap: CandidateHeap<A>,
    pub children: Vec<AndNode<G, A>>,
    pub status: NodeStatus,
    /// Set when the environment recognized the goal as an initial hypothesis.
    pub trivial: bool,
    pub pn: ProofNumber,
    pub dpn: ProofNumber,
    /// Goals of the OR nodes above this one.
    pub ancestors: Option<Rc<Lineage<G>>>,
}

/// A path of goals towards the root, innermost first.
#[derive(Debug)]
pub struct Lineage<G> {
    pub goal: G,
    pub parent: Option<Rc<Lineage<G>>>,
}

#[derive(Debug)]
pub struct AndNode<G, A> {
    pub action: A,
    pub prior: f64,
    pub value: f64,
    pub visit: u64,
    pub children: Vec<OrNode<G, A>>,
    pub status: NodeStatus,
    pub pn: ProofNumber,
    pub dpn: ProofNumber,
}

/// Shared state of one search: the environment, the beam width, node
/// accounting and the unprovability switch.
pub struct TreeContext<'e, E: ProofEnvironment> {
    pub env: &'e E,
    pub beam: usize,
    pub dead_marking: bool,
    pub nodes_created: u64,
}

impl<'e, E: ProofEnvironment> TreeContext<'e, E> {
    pub fn new(env: &'e E, beam: usize) -> Self {
        assert!(beam >= 1, "beam width must be at least 1");
        TreeContext {
            env,
            beam,
            dead_marking: true,
            nodes_created: 0,
        }
    }
}

impl<G, A> OrNode<G, A> {
    pub fn is_open(&self) -> bool {
        self.status == NodeStatus::Open
    }

    pub fn mark(&mut self, status: NodeStatus) {
        transition(&mut self.status, status);
    }

    pub fn open_children(&self) -> impl Iterator<Item = (usize, &AndNode<G, A>)> {
        self.children.iter().enumerate().filter(|(_, c)| c.is_open())
    }

    /// Number of nodes in this subtree, this one included.
    pub fn subtree_size(&self) -> usize {
        1 + self.children.iter().map(AndNode::subtree_size).sum::<usize>()
    }
}

impl<G: Clone, A: Clone> OrNode<G, A> {
    /// A fresh, unvisited OR node for `goal`.
    pub fn new<E>(goal: G, ctx: &mut TreeContext<'_, E>) -> Self
    where
        E: ProofEnvironment<Goal = G, Action = A>,
    {
        ctx.nodes_created += 1;
        let trivial = ctx.env.trivially_proven(&goal);
        let network_payout = if trivial {
            1.0
        } else {
            ctx.env.evaluate(&goal).clamp(0.0, 1.0)
        };
        let (status, (pn, dpn)) = if trivial {
            (NodeStatus::Proven, crate::policies::pns_init(NodeStatus::Proven))
        } else {
            (NodeStatus::Open, crate::policies::pns_init(NodeStatus::Open))
        };
        OrNode {
            goal,
            value: network_payout,
            visit: 0,
            childless_visit: 0,
            network_payout,
            heap: CandidateHeap::default(),
            children: Vec::new(),
            status,
            trivial,
            pn,
            dpn,
            ancestors: None,
        }
    }

    /// An OR node created as the hypothesis of a new AND node. Its single
    /// creation visit is the payout evaluation, so it starts at `visit = 1`.
    pub fn new_hypothesis<E>(goal: G, ctx: &mut TreeContext<'_, E>) -> Self
    where
        E: ProofEnvironment<Goal = G, Action = A>,
    {
        let mut node = Self::new(goal, ctx);
        node.visit = 1;
        node
    }

    /// Whether `goal` is this node's goal or the goal of one of its ancestors.
    pub fn repeats(&self, goal: &G) -> bool
    where
        G: PartialEq,
    {
        let mut link = self.ancestors.as_deref();
        if self.goal == *goal {
            return true;
        }
        while let Some(l) = link {
            if l.goal == *goal {
                return true;
            }
            link = l.parent.as_deref();
        }
        false
    }

    pub(crate) fn lineage(&self) -> Rc<Lineage<G>> {
        Rc::new(Lineage {
            goal: self.goal.clone(),
            parent: self.ancestors.clone(),
        })
    }

    /// The proof held by a proven subtree: one proven AND child per OR node,
    /// every hypothesis of each chosen AND node.
    pub fn extract_proof(&self) -> Option<ProofStep<G, A>> {
        if self.status != NodeStatus::Proven {
            return None;
        }
        if self.trivial {
            return Some(ProofStep::Hypothesis(self.goal.clone()));
        }
        let chosen = self.children.iter().find(|c| c.status == NodeStatus::Proven)?;
        let premises = chosen
            .children
            .iter()
            .map(OrNode::extract_proof)
            .collect::<Option<Vec<_>>>()?;
        Some(ProofStep::Apply {
            goal: self.goal.clone(),
            action: chosen.action.clone(),
            premises,
        })
    }
}

impl<G, A> AndNode<G, A> {
    pub fn is_open(&self) -> bool {
        self.status == NodeStatus::Open
    }

    pub fn mark(&mut self, status: NodeStatus) {
        transition(&mut self.status, status);
    }

    pub fn open_children(&self) -> impl Iterator<Item = (usize, &OrNode<G, A>)> {
        self.children.iter().enumerate().filter(|(_, c)| c.is_open())
    }

    pub fn subtree_size(&self) -> usize {
        1 + self.children.iter().map(OrNode::subtree_size).sum::<usize>()
    }
}

impl<G: Clone, A: Clone> AndNode<G, A> {
    /// Materializes an AND node: every hypothesis becomes an OR child that is
    /// visited once on creation. Statistics and status are settled before
    /// returning.
    pub fn new<E>(action: A, prior: f64, subgoals: Vec<G>, ctx: &mut TreeContext<'_, E>) -> Self
    where
        E: ProofEnvironment<Goal = G, Action = A>,
    {
        Self::below(None, action, prior, subgoals, ctx)
    }

    /// Like [`AndNode::new`], for a node whose parent OR node has the given
    /// lineage.
    pub fn below<E>(
        lineage: Option<Rc<Lineage<G>>>,
        action: A,
        prior: f64,
        subgoals: Vec<G>,
        ctx: &mut TreeContext<'_, E>,
    ) -> Self
    where
        E: ProofEnvironment<Goal = G, Action = A>,
    {
        ctx.nodes_created += 1;
        let children: Vec<_> = subgoals
            .into_iter()
            .map(|g| {
                let mut child = OrNode::new_hypothesis(g, ctx);
                child.ancestors = lineage.clone();
                child
            })
            .collect();
        let mut node = AndNode {
            action,
            prior: prior.clamp(0.0, 1.0),
            value: 1.0,
            visit: 1,
            children,
            status: NodeStatus::Open,
            pn: ProofNumber::ONE,
            dpn: ProofNumber::ONE,
        };
        update_value_and(&mut node);
        // freshly created hypotheses are never dead
        let verdict = update_proven_and(&mut node);
        debug_assert_eq!(verdict, AndVerdict::Keep);
        node
    }
}

/// A closed proof: each goal is either an initial hypothesis or the
/// conclusion of an applied proposition whose premises are all proved.
#[derive(Clone, Debug, PartialEq)]
pub enum ProofStep<G, A> {
    Hypothesis(G),
    Apply {
        goal: G,
        action: A,
        premises: Vec<ProofStep<G, A>>,
    },
}

impl<G, A> ProofStep<G, A> {
    pub fn goal(&self) -> &G {
        match self {
            ProofStep::Hypothesis(g) => g,
            ProofStep::Apply { goal, .. } => goal,
        }
    }

    /// Number of applied propositions.
    pub fn steps(&self) -> usize {
        match self {
            ProofStep::Hypothesis(_) => 0,
            ProofStep::Apply { premises, .. } => 1 + premises.iter().map(ProofStep::steps).sum::<usize>(),
        }
    }
}

/// Holophrasm OR statistics: payout plus the children's values, visits as
/// the children's visits plus failed expansions plus one.
pub fn update_value_or<G, A>(node: &mut OrNode<G, A>) {
    if node.children.is_empty() {
        return;
    }
    node.visit = node.children.iter().map(|c| c.visit).sum::<u64>() + node.childless_visit + 1;
    node.value = node.network_payout + node.children.iter().map(|c| c.value).sum::<f64>();
}

/// Index of the child with the lowest `value / visit`, lowest index on ties.
pub fn worst_child<G, A>(children: &[OrNode<G, A>]) -> Option<usize> {
    worst_by_ratio(children.iter().enumerate())
}

pub(crate) fn worst_by_ratio<'a, G: 'a, A: 'a>(
    children: impl Iterator<Item = (usize, &'a OrNode<G, A>)>,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, child) in children {
        assert!(child.visit > 0, "OR children are visited on creation");
        let ratio = child.value / child.visit as f64;
        if best.is_none_or(|(_, r)| ratio < r) {
            best = Some((i, ratio));
        }
    }
    best.map(|(i, _)| i)
}

/// Holophrasm AND statistics: copied from the child with the lowest
/// `value / visit`.
pub fn update_value_and<G, A>(node: &mut AndNode<G, A>) {
    if let Some(bad) = worst_child(&node.children) {
        node.visit = node.children[bad].visit;
        node.value = node.children[bad].value;
    }
}

/// OR status refresh. A childless node with an exhausted heap that has been
/// visited more than once is dead; any proven child proves it.
pub fn update_proven_or<G, A>(node: &mut OrNode<G, A>, dead_marking: bool) {
    if node.status != NodeStatus::Open {
        return;
    }
    if node.children.iter().any(|c| c.status == NodeStatus::Proven) {
        node.mark(NodeStatus::Proven);
    } else if dead_marking && node.children.is_empty() && node.visit > 1 && node.heap.is_empty() {
        node.mark(NodeStatus::Dead);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AndVerdict {
    Keep,
    /// A hypothesis is dead; the caller must cut this node from its parent.
    Cut,
}

/// AND status refresh: proven iff every hypothesis is proven. A dead
/// hypothesis makes the node unprovable, signalled as [`AndVerdict::Cut`].
pub fn update_proven_and<G, A>(node: &mut AndNode<G, A>) -> AndVerdict {
    if node.children.iter().any(|c| c.status == NodeStatus::Dead) {
        node.mark(NodeStatus::Dead);
        return AndVerdict::Cut;
    }
    if node.status == NodeStatus::Open && node.children.iter().all(|c| c.status == NodeStatus::Proven) {
        node.mark(NodeStatus::Proven);
    }
    AndVerdict::Keep
}

/// Removes the AND child at `index` together with its subtree. The parent's
/// statistics are left alone until its next update.
pub fn cut_and_node<G, A>(parent: &mut OrNode<G, A>, index: usize) -> AndNode<G, A> {
    assert!(
        index < parent.children.len(),
        "cut of child {index} but parent has {} children",
        parent.children.len()
    );
    parent.children.remove(index)
}

/// Progressive widening: may another child be attempted?
pub fn widening_allows(visit: u64, children: usize, childless_visit: u64) -> bool {
    visit as f64 / 6.0 + 0.01 > (children as u64 + childless_visit) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    Added,
    Failed,
    NotAttempted,
}

/// Fills the heap on first use, then, if widening allows it, turns the top
/// candidate into a new AND child. An invalid candidate, one that needs the
/// goal of this node or of an ancestor as a premise, or an empty heap counts
/// as a childless visit.
pub fn try_expand_or<E>(node: &mut OrNode<E::Goal, E::Action>, ctx: &mut TreeContext<'_, E>) -> Expansion
where
    E: ProofEnvironment,
{
    if !node.heap.is_filled() {
        let candidates = ctx.env.candidates(&node.goal, ctx.beam);
        node.heap.fill(candidates);
    }
    if !widening_allows(node.visit, node.children.len(), node.childless_visit) {
        return Expansion::NotAttempted;
    }
    let Some(candidate) = node.heap.pop() else {
        node.childless_visit += 1;
        return Expansion::Failed;
    };
    match ctx.env.apply(&node.goal, &candidate.action) {
        Ok(subgoals) if !subgoals.iter().any(|g| node.repeats(g)) => {
            let child = AndNode::below(Some(node.lineage()), candidate.action, candidate.priority, subgoals, ctx);
            node.children.push(child);
            Expansion::Added
        }
        Ok(_) => {
            log::trace!("discarding cyclic candidate {:?}", candidate.action);
            node.childless_visit += 1;
            Expansion::Failed
        }
        Err(_) => {
            log::trace!("discarding invalid candidate {:?}", candidate.action);
            node.childless_visit += 1;
            Expansion::Failed
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::environment::Invalid;

    /// Tiny table-driven environment: goals are `u32`, actions name the
    /// subgoals they produce, `None` marks an invalid candidate.
    #[derive(Default)]
    pub struct TableEnv {
        pub root: u32,
        pub proven: Vec<u32>,
        pub payout: f64,
        pub table: Vec<(u32, Vec<Option<Vec<u32>>>)>,
    }

    impl ProofEnvironment for TableEnv {
        type Goal = u32;
        type Action = (u32, usize);

        fn root_goal(&self) -> u32 {
            self.root
        }

        fn evaluate(&self, _goal: &u32) -> f64 {
            self.payout
        }

        fn candidates(&self, goal: &u32, beam: usize) -> Vec<Candidate<(u32, usize)>> {
            let rows = self
                .table
                .iter()
                .find(|(g, _)| g == goal)
                .map(|(_, rows)| rows.len())
                .unwrap_or(0);
            (0..rows.min(beam))
                .map(|i| Candidate::new((*goal, i), 1.0 / rows as f64))
                .collect()
        }

        fn apply(&self, goal: &u32, action: &(u32, usize)) -> Result<Vec<u32>, Invalid> {
            let (_, rows) = self.table.iter().find(|(g, _)| g == goal).ok_or(Invalid)?;
            rows[action.1].clone().ok_or(Invalid)
        }

        fn trivially_proven(&self, goal: &u32) -> bool {
            self.proven.contains(goal)
        }
    }

    fn leaf(visit: u64, value: f64) -> OrNode<u32, (u32, usize)> {
        OrNode {
            goal: 0,
            value,
            visit,
            childless_visit: 0,
            network_payout: 0.0,
            heap: CandidateHeap::default(),
            children: vec![],
            status: NodeStatus::Open,
            trivial: false,
            pn: ProofNumber::ONE,
            dpn: ProofNumber::ONE,
            ancestors: None,
        }
    }

    fn and_with(visit: u64, value: f64, children: Vec<OrNode<u32, (u32, usize)>>) -> AndNode<u32, (u32, usize)> {
        AndNode {
            action: (0, 0),
            prior: 0.5,
            value,
            visit,
            children,
            status: NodeStatus::Open,
            pn: ProofNumber::ONE,
            dpn: ProofNumber::ONE,
        }
    }

    #[test]
    fn or_update_sums_children() {
        let mut node = leaf(0, 0.0);
        node.network_payout = 0.7;
        node.childless_visit = 1;
        node.children = vec![and_with(2, 0.9, vec![]), and_with(3, 1.2, vec![])];
        update_value_or(&mut node);
        assert_eq!(node.visit, 7);
        assert!((node.value - 2.8).abs() < 1e-12);
    }

    #[test]
    fn or_update_single_child() {
        let mut node = leaf(0, 0.0);
        node.network_payout = 0.5;
        node.children = vec![and_with(1, 0.4, vec![])];
        update_value_or(&mut node);
        assert_eq!(node.visit, 2);
        assert!((node.value - 0.9).abs() < 1e-12);
    }

    #[test]
    fn or_update_without_children_is_noop() {
        let mut node = leaf(3, 0.25);
        node.network_payout = 0.9;
        update_value_or(&mut node);
        assert_eq!((node.visit, node.value), (3, 0.25));
    }

    #[test]
    fn and_update_copies_worst_child() {
        let mut node = and_with(1, 0.0, vec![leaf(3, 0.9), leaf(1, 0.2)]);
        update_value_and(&mut node);
        assert_eq!((node.value, node.visit), (0.2, 1));

        let mut single = and_with(1, 0.0, vec![leaf(2, 0.5)]);
        update_value_and(&mut single);
        assert_eq!((single.value, single.visit), (0.5, 2));
    }

    #[test]
    fn and_update_tie_takes_lowest_index() {
        let mut node = and_with(1, 0.0, vec![leaf(2, 0.4), leaf(1, 0.2)]);
        update_value_and(&mut node);
        assert_eq!((node.value, node.visit), (0.4, 2));
    }

    #[test]
    #[should_panic(expected = "visited on creation")]
    fn and_update_rejects_unvisited_child() {
        let mut node = and_with(1, 0.0, vec![leaf(0, 0.4)]);
        update_value_and(&mut node);
    }

    #[test]
    fn childless_or_with_empty_heap_dies() {
        let mut node = leaf(2, 0.0);
        node.heap.fill(Vec::new());
        update_proven_or(&mut node, true);
        assert_eq!(node.status, NodeStatus::Dead);

        let mut fresh = leaf(1, 0.0);
        fresh.heap.fill(Vec::new());
        update_proven_or(&mut fresh, true);
        assert_eq!(fresh.status, NodeStatus::Open);

        let mut spared = leaf(2, 0.0);
        update_proven_or(&mut spared, false);
        assert_eq!(spared.status, NodeStatus::Open);
    }

    #[test]
    fn and_with_all_proven_children_is_proven() {
        let mut a = leaf(1, 1.0);
        a.status = NodeStatus::Proven;
        let mut b = leaf(1, 1.0);
        b.status = NodeStatus::Proven;
        let mut node = and_with(1, 0.0, vec![a, b]);
        assert_eq!(update_proven_and(&mut node), AndVerdict::Keep);
        assert_eq!(node.status, NodeStatus::Proven);

        let mut empty = and_with(1, 0.0, vec![]);
        update_proven_and(&mut empty);
        assert_eq!(empty.status, NodeStatus::Proven);
    }

    #[test]
    fn and_with_dead_child_is_cut() {
        let mut dead = leaf(2, 0.0);
        dead.status = NodeStatus::Dead;
        let mut parent = leaf(5, 0.0);
        parent.children = vec![and_with(1, 0.0, vec![leaf(1, 0.3)]), and_with(1, 0.0, vec![leaf(1, 0.1), dead])];
        assert_eq!(update_proven_and(&mut parent.children[1]), AndVerdict::Cut);
        cut_and_node(&mut parent, 1);
        assert_eq!(parent.children.len(), 1);
        assert_eq!(parent.children[0].children[0].value, 0.3);
    }

    #[test]
    fn cutting_last_child_kills_parent_on_next_refresh() {
        let mut parent = leaf(4, 0.0);
        parent.heap.fill(Vec::new());
        parent.children = vec![and_with(1, 0.0, vec![leaf(1, 0.1)])];
        update_proven_or(&mut parent, true);
        assert_eq!(parent.status, NodeStatus::Open);
        cut_and_node(&mut parent, 0);
        update_proven_or(&mut parent, true);
        assert_eq!(parent.status, NodeStatus::Dead);
    }

    #[test]
    fn dead_or_propagates_cut_to_grandparent() {
        // root OR -> AND -> OR (childless, exhausted)
        let mut inner = leaf(1, 0.0);
        inner.heap.fill(Vec::new());
        let mut root = leaf(3, 0.0);
        root.heap.fill(Vec::new());
        root.children = vec![and_with(1, 0.0, vec![inner])];

        let grandchild = &mut root.children[0].children[0];
        grandchild.visit = 2;
        update_proven_or(grandchild, true);
        assert_eq!(grandchild.status, NodeStatus::Dead);
        assert_eq!(update_proven_and(&mut root.children[0]), AndVerdict::Cut);
        cut_and_node(&mut root, 0);
        update_proven_or(&mut root, true);
        assert_eq!(root.status, NodeStatus::Dead);
    }

    #[test]
    #[should_panic(expected = "cannot go from")]
    fn status_is_absorbing() {
        let mut node = leaf(2, 0.0);
        node.mark(NodeStatus::Proven);
        node.mark(NodeStatus::Dead);
    }

    #[test]
    #[should_panic(expected = "parent has 1 children")]
    fn cutting_missing_child_panics() {
        let mut parent = leaf(1, 0.0);
        parent.children = vec![and_with(1, 0.0, vec![])];
        cut_and_node(&mut parent, 3);
    }

    #[test]
    fn widening_thresholds() {
        assert!(widening_allows(0, 0, 0));
        assert!(widening_allows(6, 1, 0));
        assert!(!widening_allows(5, 1, 0));
        assert!(!widening_allows(6, 1, 1));
    }

    #[test]
    fn heap_pops_by_priority_then_insertion() {
        let mut heap = CandidateHeap::default();
        heap.fill(vec![
            Candidate::new('a', 0.2),
            Candidate::new('b', 0.5),
            Candidate::new('c', 0.2),
            Candidate::new('d', 0.1),
        ]);
        let order: Vec<char> = std::iter::from_fn(|| heap.pop().map(|c| c.action)).collect();
        assert_eq!(order, vec!['b', 'a', 'c', 'd']);
    }

    #[test]
    fn expansion_follows_widening_and_counts_failures() {
        let env = TableEnv {
            root: 0,
            proven: vec![7],
            payout: 0.5,
            table: vec![(0, vec![None, Some(vec![7, 8]), Some(vec![])])],
        };
        let mut ctx = TreeContext::new(&env, 10);
        let mut root = OrNode::new(0, &mut ctx);
        assert_eq!(root.visit, 0);

        assert_eq!(try_expand_or(&mut root, &mut ctx), Expansion::Failed);
        assert_eq!(root.childless_visit, 1);
        assert_eq!(try_expand_or(&mut root, &mut ctx), Expansion::NotAttempted);

        root.visit = 7;
        assert_eq!(try_expand_or(&mut root, &mut ctx), Expansion::Added);
        let child = &root.children[0];
        assert_eq!(child.children.len(), 2);
        assert!(child.children.iter().all(|c| c.visit == 1));
        assert_eq!(child.children[0].status, NodeStatus::Proven);
        assert_eq!(child.status, NodeStatus::Open);

        root.visit = 13;
        assert_eq!(try_expand_or(&mut root, &mut ctx), Expansion::Added);
        assert_eq!(root.children[1].status, NodeStatus::Proven);
        update_proven_or(&mut root, true);
        assert_eq!(root.status, NodeStatus::Proven);

        let proof = root.extract_proof().unwrap();
        assert_eq!(proof.steps(), 1);

        // heap exhausted: further attempts fail
        root.visit = 100;
        assert_eq!(try_expand_or(&mut root, &mut ctx), Expansion::Failed);
        assert_eq!(ctx.nodes_created, 1 + 1 + 2 + 1);
    }
}
