//! Serializes a found proof tree into uncompressed Metamath labels.

use thiserror::Error;

use super::database::Expr;
use super::env::{MmAction, MmEnvironment};
use crate::proof_tree::ProofStep;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("the search did not prove the root goal")]
    NotProven,
    #[error("goal `{0}` is used as a hypothesis but matches none")]
    NoHypothesis(String),
    #[error("substitution image `{0}` has no syntax proof")]
    IllTyped(String),
}

/// Labels in reverse-Polish order: for each step, the syntax proofs of the
/// floating hypotheses, then the essential premises, then the assertion.
pub fn extract_proof(
    env: &MmEnvironment<'_>,
    proof: Option<&ProofStep<Expr, MmAction>>,
) -> Result<Vec<String>, ExtractError> {
    let step = proof.ok_or(ExtractError::NotProven)?;
    let mut out = Vec::new();
    emit(env, step, &mut out)?;
    Ok(out)
}

fn emit(env: &MmEnvironment<'_>, step: &ProofStep<Expr, MmAction>, out: &mut Vec<String>) -> Result<(), ExtractError> {
    let db = env.db();
    match step {
        ProofStep::Hypothesis(goal) => {
            let hyp = env
                .theorem()
                .essential
                .iter()
                .find(|e| e.expr == *goal)
                .ok_or_else(|| ExtractError::NoHypothesis(db.display(goal).to_string()))?;
            out.push(hyp.label.clone());
        }
        ProofStep::Apply { action, premises, .. } => {
            let assertion = &db.assertions[action.assertion];
            for f in &assertion.floating {
                let image = action.subst.get(f.var).unwrap_or_default();
                let syntax = env
                    .prover()
                    .prove_parts(f.typecode, image)
                    .ok_or_else(|| ExtractError::IllTyped(db.display(image).to_string()))?;
                out.extend(syntax.iter().cloned());
            }
            for premise in premises {
                emit(env, premise, out)?;
            }
            out.push(assertion.label.clone());
        }
    }
    Ok(())
}
