//! Stack-based proof checker, independent of the search code.

use std::collections::BTreeSet;

use thiserror::Error;

use super::database::{ordered_pair, Database, Expr, Sym};
use super::unify::Substitution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RejectReason {
    #[error("no theorem labeled `{0}`")]
    NotATheorem(String),
    #[error("label `{0}` is unknown or not usable in this proof")]
    UnknownLabel(String),
    #[error("stack underflow at step {step} (`{label}`)")]
    StackUnderflow { step: usize, label: String },
    #[error("hypothesis mismatch at step {step} (`{label}`)")]
    HypothesisMismatch { step: usize, label: String },
    #[error("disjoint variable violation at step {step} (`{label}`)")]
    DisjointViolation { step: usize, label: String },
    #[error("proof does not end with exactly the theorem's statement")]
    WrongFinalStatement,
}

/// Checks `proof` (uncompressed labels) against the statement of `theorem`.
pub fn verify_proof<S: AsRef<str>>(db: &Database, theorem: &str, proof: &[S]) -> Result<(), RejectReason> {
    let target = db
        .assertion(theorem)
        .filter(|a| a.proof.is_some())
        .ok_or_else(|| RejectReason::NotATheorem(theorem.to_string()))?;
    let mut stack: Vec<Expr> = Vec::new();
    for (step, label) in proof.iter().enumerate() {
        let label = label.as_ref();
        if let Some(f) = target.scope_floating.iter().find(|f| f.label == label) {
            stack.push(vec![f.typecode, f.var]);
            continue;
        }
        if let Some(e) = target.essential.iter().find(|e| e.label == label) {
            stack.push(e.expr.clone());
            continue;
        }
        let used = db
            .assertion(label)
            .filter(|a| a.position < target.position)
            .ok_or_else(|| RejectReason::UnknownLabel(label.to_string()))?;
        let arity = used.arity();
        if stack.len() < arity {
            return Err(RejectReason::StackUnderflow {
                step,
                label: label.to_string(),
            });
        }
        let args = stack.split_off(stack.len() - arity);
        let mismatch = || RejectReason::HypothesisMismatch {
            step,
            label: label.to_string(),
        };
        let mut subst = Substitution::default();
        for (f, arg) in used.floating.iter().zip(&args) {
            if arg.first() != Some(&f.typecode) {
                return Err(mismatch());
            }
            subst.insert(f.var, arg[1..].to_vec());
        }
        for (e, arg) in used.essential.iter().zip(&args[used.floating.len()..]) {
            let expected = subst.apply(&e.expr);
            if &expected != arg {
                return Err(mismatch());
            }
        }
        for &(x, y) in &used.disjoint {
            let (Some(ix), Some(iy)) = (subst.get(x), subst.get(y)) else {
                continue;
            };
            if !disjoint_ok(db, ix, iy, &target.scope_disjoint) {
                return Err(RejectReason::DisjointViolation {
                    step,
                    label: label.to_string(),
                });
            }
        }
        stack.push(subst.apply(&used.expr));
    }
    match stack.as_slice() {
        [only] if *only == target.expr => Ok(()),
        _ => Err(RejectReason::WrongFinalStatement),
    }
}

/// Whether the variables of two images are pairwise distinct and declared
/// disjoint in `allowed`.
pub(crate) fn disjoint_ok(db: &Database, a: &[Sym], b: &[Sym], allowed: &BTreeSet<(Sym, Sym)>) -> bool {
    let vars = |e: &[Sym]| e.iter().copied().filter(|s| db.symbols.is_var(*s)).collect::<BTreeSet<_>>();
    let (va, vb) = (vars(a), vars(b));
    va.iter()
        .all(|&u| vb.iter().all(|&v| u != v && allowed.contains(&ordered_pair(u, v))))
}

/// Verifies the stored proof of every theorem; returns the failures.
pub fn verify_database(db: &Database) -> Vec<(String, RejectReason)> {
    db.theorems()
        .filter_map(|t| {
            let proof = t.proof.as_deref().unwrap_or_default();
            verify_proof(db, &t.label, proof).err().map(|e| (t.label.clone(), e))
        })
        .collect()
}
