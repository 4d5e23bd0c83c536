//! The oracle boundary between the search and the problem domain.
//!
//! A [`ProofEnvironment`] stands in for the three networks a neural prover
//! would use: a payout estimate for goals, a ranked list of applicable
//! propositions, and the application step that turns a proposition into
//! subgoals.

use std::fmt::Debug;

use thiserror::Error;

/// A not-yet-expanded proposition application, ranked by `priority`.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate<A> {
    pub action: A,
    pub priority: f64,
}

impl<A> Candidate<A> {
    pub fn new(action: A, priority: f64) -> Self {
        Candidate { action, priority }
    }
}

/// Returned by [`ProofEnvironment::apply`] when a candidate cannot be
/// materialized (bad substitution, violated constraint, ...).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("candidate is not applicable to this goal")]
pub struct Invalid;

pub trait ProofEnvironment {
    type Goal: Clone + Debug + PartialEq;
    type Action: Clone + Debug;

    fn root_goal(&self) -> Self::Goal;

    /// Estimated probability that `goal` is provable, in `[0, 1]`.
    fn evaluate(&self, goal: &Self::Goal) -> f64;

    /// At most `beam` candidates, priorities in `[0, 1]`, non-increasing,
    /// summing to at most 1.
    fn candidates(&self, goal: &Self::Goal, beam: usize) -> Vec<Candidate<Self::Action>>;

    /// The subgoals left after applying `action` to `goal`.
    fn apply(&self, goal: &Self::Goal, action: &Self::Action) -> Result<Vec<Self::Goal>, Invalid>;

    /// True when `goal` is one of the initial hypotheses.
    fn trivially_proven(&self, goal: &Self::Goal) -> bool;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PriorError {
    #[error("cannot normalize an empty score list")]
    Empty,
    #[error("score {0} is negative or not finite")]
    BadScore(String),
}

/// Scales non-negative scores to sum to one. An all-zero input becomes the
/// uniform distribution.
pub fn normalize_priors(scores: &[f64]) -> Result<Vec<f64>, PriorError> {
    if scores.is_empty() {
        return Err(PriorError::Empty);
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
        return Err(PriorError::BadScore(bad.to_string()));
    }
    let total: f64 = scores.iter().sum();
    if total == 0.0 {
        let uniform = 1.0 / scores.len() as f64;
        return Ok(vec![uniform; scores.len()]);
    }
    Ok(scores.iter().map(|s| s / total).collect())
}

/// Checks the contract every environment must honor on one goal.
///
/// Returns a description of the first violation found. Used by the
/// conformance tests of each environment implementation.
pub fn check_conformance<E: ProofEnvironment>(env: &E, goal: &E::Goal, beam: usize) -> Result<(), String>
where
    E::Goal: PartialEq,
{
    let value = env.evaluate(goal);
    if !(0.0..=1.0).contains(&value) {
        return Err(format!("evaluate returned {value} outside [0,1]"));
    }
    if env.evaluate(goal) != value {
        return Err("evaluate is not deterministic".into());
    }
    let first = env.candidates(goal, beam);
    let second = env.candidates(goal, beam);
    if first.len() > beam {
        return Err(format!("{} candidates exceed beam {beam}", first.len()));
    }
    if first.len() != second.len()
        || first.iter().zip(&second).any(|(a, b)| a.priority != b.priority || format!("{:?}", a.action) != format!("{:?}", b.action))
    {
        return Err("candidates are not deterministic".into());
    }
    let mut previous = f64::INFINITY;
    let mut total = 0.0;
    for c in &first {
        if !(0.0..=1.0).contains(&c.priority) {
            return Err(format!("priority {} outside [0,1]", c.priority));
        }
        if c.priority > previous {
            return Err("priorities are not non-increasing".into());
        }
        previous = c.priority;
        total += c.priority;
    }
    if total > 1.0 + 1e-9 {
        return Err(format!("priorities sum to {total} > 1"));
    }
    for c in &first {
        let a = env.apply(goal, &c.action);
        let b = env.apply(goal, &c.action);
        if a != b {
            return Err(format!("apply is not stable for {:?}", c.action));
        }
    }
    if env.trivially_proven(goal) != env.trivially_proven(goal) {
        return Err("trivially_proven is not deterministic".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_symmetric() {
        assert_eq!(normalize_priors(&[2.0, 2.0]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn normalize_already_normalized() {
        assert_eq!(normalize_priors(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn normalize_all_zero_is_uniform() {
        assert_eq!(normalize_priors(&[0.0, 0.0]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn normalize_rejects_empty_and_negative() {
        assert_eq!(normalize_priors(&[]), Err(PriorError::Empty));
        assert!(matches!(normalize_priors(&[1.0, -1.0]), Err(PriorError::BadScore(_))));
    }
}
