//! Depth- and breadth-limited Minimax over the AND/OR structure.
//!
//! OR nodes maximize over their `breadth` best-ranked candidates, AND nodes
//! minimize over their hypotheses. Depth drops by one from an AND node to
//! its hypotheses; depth-0 OR nodes are scored by the environment.

use crate::environment::ProofEnvironment;
use crate::proof_tree::ProofStep;

#[derive(Clone, Debug)]
pub struct MinimaxOutcome<G, A> {
    pub value: f64,
    /// Present only when the value is backed by a closed subtree.
    pub proof: Option<ProofStep<G, A>>,
    pub nodes_visited: u64,
}

pub fn minimax_search<E: ProofEnvironment>(
    env: &E,
    goal: &E::Goal,
    depth: u32,
    breadth: usize,
) -> MinimaxOutcome<E::Goal, E::Action> {
    let mut visited = 0;
    let (value, proof) = search_or(env, goal, depth, breadth, &mut visited);
    MinimaxOutcome {
        value,
        proof,
        nodes_visited: visited,
    }
}

type Scored<G, A> = (f64, Option<ProofStep<G, A>>);
type Steps<E> = Vec<ProofStep<<E as ProofEnvironment>::Goal, <E as ProofEnvironment>::Action>>;

fn search_or<E: ProofEnvironment>(
    env: &E,
    goal: &E::Goal,
    depth: u32,
    breadth: usize,
    visited: &mut u64,
) -> Scored<E::Goal, E::Action> {
    *visited += 1;
    if env.trivially_proven(goal) {
        return (1.0, Some(ProofStep::Hypothesis(goal.clone())));
    }
    if depth == 0 {
        return (env.evaluate(goal).clamp(0.0, 1.0), None);
    }
    let mut best = 0.0;
    for candidate in env.candidates(goal, breadth).into_iter().take(breadth) {
        let Ok(subgoals) = env.apply(goal, &candidate.action) else {
            continue;
        };
        *visited += 1;
        let (value, premises) = search_and(env, &subgoals, depth - 1, breadth, visited);
        if let Some(premises) = premises {
            // a closed subtree is the best an OR node can get
            let proof = ProofStep::Apply {
                goal: goal.clone(),
                action: candidate.action,
                premises,
            };
            return (1.0, Some(proof));
        }
        if value > best {
            best = value;
        }
    }
    (best, None)
}

fn search_and<E: ProofEnvironment>(
    env: &E,
    subgoals: &[E::Goal],
    depth: u32,
    breadth: usize,
    visited: &mut u64,
) -> (f64, Option<Steps<E>>) {
    let mut worst: f64 = 1.0;
    let mut premises = Some(Vec::with_capacity(subgoals.len()));
    for subgoal in subgoals {
        let (value, proof) = search_or(env, subgoal, depth, breadth, visited);
        worst = worst.min(value);
        premises = match (premises, proof) {
            (Some(mut done), Some(p)) => {
                done.push(p);
                Some(done)
            }
            _ => None,
        };
        if worst == 0.0 {
            return (0.0, None);
        }
    }
    (worst, premises)
}
