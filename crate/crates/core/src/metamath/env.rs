//! Backward-proving environment for one theorem of a database.

use std::collections::HashSet;

use super::database::{Assertion, Database, Expr, Sym};
use super::unify::{unify_conclusion, Substitution, SyntaxProver, DEFAULT_MATCH_CAP};
use super::semantics::TruthTable;
use super::verify::disjoint_ok;
use crate::environment::{normalize_priors, Candidate, Invalid, ProofEnvironment};

/// Apply assertion `assertion` (an index into `Database::assertions`) under a
/// full substitution of its mandatory variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmAction {
    pub assertion: usize,
    pub subst: Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluation {
    /// Every goal scores the same.
    Constant(f64),
    /// `exp(-rate * n)` for a goal of `n` symbols: shorter goals score higher.
    Length(f64),
    /// Like `Length`, but 0 for goals that the truth table shows do not
    /// follow from the theorem's hypotheses. Falls back to `Length` when the
    /// database's formula syntax is not recognized.
    TruthTable(f64),
}

/// Proves the statement of one theorem, using only assertions that precede it.
pub struct MmEnvironment<'d> {
    db: &'d Database,
    theorem: &'d Assertion,
    prover: SyntaxProver<'d>,
    usable: Vec<usize>,
    hyp_pool: Vec<(Sym, Expr)>,
    match_cap: usize,
    completion_cap: usize,
    evaluation: Evaluation,
    truth_table: Option<TruthTable>,
}

impl<'d> MmEnvironment<'d> {
    pub fn new(db: &'d Database, theorem: &str) -> Option<Self> {
        let theorem = db.assertion(theorem).filter(|a| a.proof.is_some())?;
        let prover = SyntaxProver::for_assertion(db, theorem);
        let usable = db
            .assertions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.position < theorem.position && !db.is_syntactic(a.typecode()))
            .map(|(i, _)| i)
            .collect();
        let mut env = MmEnvironment {
            db,
            theorem,
            prover,
            usable,
            hyp_pool: Vec::new(),
            match_cap: DEFAULT_MATCH_CAP,
            completion_cap: 4096,
            evaluation: Evaluation::Constant(0.5),
            truth_table: None,
        };
        let mut seen = HashSet::new();
        let mut pool = Vec::new();
        for e in &theorem.essential {
            env.collect_subexpressions(&e.expr, &mut seen, &mut pool);
        }
        env.hyp_pool = pool;
        Some(env)
    }

    pub fn with_evaluation(mut self, evaluation: Evaluation) -> Self {
        self.evaluation = evaluation;
        self.truth_table = match evaluation {
            Evaluation::TruthTable(_) => TruthTable::detect(self.db),
            _ => None,
        };
        self
    }

    pub fn with_match_cap(mut self, cap: usize) -> Self {
        self.match_cap = cap;
        self
    }

    pub fn db(&self) -> &'d Database {
        self.db
    }

    pub fn theorem(&self) -> &'d Assertion {
        self.theorem
    }

    pub fn prover(&self) -> &SyntaxProver<'d> {
        &self.prover
    }

    /// False only when the truth table shows `expr` does not follow from
    /// the theorem's hypotheses, i.e. it cannot be proved.
    fn may_hold(&self, expr: &[Sym]) -> bool {
        let Some(table) = &self.truth_table else {
            return true;
        };
        let hyps: Vec<&[Sym]> = self.theorem.essential.iter().map(|e| e.expr.as_slice()).collect();
        table.entails(&self.prover, &hyps, expr) != Some(false)
    }

    /// Type-correct subexpressions of `expr`, tagged with their typecode.
    fn collect_subexpressions(&self, expr: &[Sym], seen: &mut HashSet<(Sym, Expr)>, out: &mut Vec<(Sym, Expr)>) {
        let body = &expr[1..];
        let typecodes: Vec<Sym> = self.db.variable_typecodes.iter().copied().collect();
        for start in 0..body.len() {
            for end in start + 1..=body.len() {
                let part = &body[start..end];
                for &tc in &typecodes {
                    if self.prover.is_well_typed(tc, part) && seen.insert((tc, part.to_vec())) {
                        out.push((tc, part.to_vec()));
                    }
                }
            }
        }
    }

    /// Completion pool for `goal`: subexpressions of the goal, then of the
    /// theorem's essential hypotheses.
    pub fn completion_pool(&self, goal: &[Sym]) -> Vec<(Sym, Expr)> {
        let mut seen = HashSet::new();
        let mut pool = Vec::new();
        self.collect_subexpressions(goal, &mut seen, &mut pool);
        for item in &self.hyp_pool {
            if seen.insert(item.clone()) {
                pool.push(item.clone());
            }
        }
        pool
    }

    /// All completed candidates with their unnormalized scores, in
    /// assertion, match, then completion order.
    fn scored_candidates(&self, goal: &Expr) -> Vec<(MmAction, f64)> {
        let pool = self.completion_pool(goal);
        let mut out = Vec::new();
        for &id in &self.usable {
            let assertion = &self.db.assertions[id];
            for partial in unify_conclusion(&self.prover, assertion, goal, self.match_cap) {
                let unbound: Vec<_> = assertion
                    .floating
                    .iter()
                    .filter(|f| partial.get(f.var).is_none())
                    .collect();
                let options: Vec<Vec<&Expr>> = unbound
                    .iter()
                    .map(|f| pool.iter().filter(|(tc, _)| *tc == f.typecode).map(|(_, e)| e).collect())
                    .collect();
                let mut emitted = 0;
                let mut index = vec![0usize; unbound.len()];
                if options.iter().any(Vec::is_empty) {
                    continue;
                }
                loop {
                    let mut subst = partial.clone();
                    for (k, f) in unbound.iter().enumerate() {
                        subst.insert(f.var, options[k][index[k]].clone());
                    }
                    let premises: Vec<Expr> = assertion.essential.iter().map(|e| subst.apply(&e.expr)).collect();
                    // a step needing the goal itself as a premise can never be the last step of a proof
                    if !premises.contains(goal) {
                        let open = premises.iter().filter(|p| !self.trivially_proven(p)).count();
                        let base = 1.0 / (1.0 + premises.len() as f64 + subst.size() as f64);
                        let score = base * 0.5f64.powi(open as i32);
                        out.push((MmAction { assertion: id, subst }, score));
                    }
                    emitted += 1;
                    if emitted >= self.completion_cap || !advance(&mut index, &options) {
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Odometer increment; false once every combination has been produced.
fn advance(index: &mut [usize], options: &[Vec<&Expr>]) -> bool {
    for k in (0..index.len()).rev() {
        index[k] += 1;
        if index[k] < options[k].len() {
            return true;
        }
        index[k] = 0;
    }
    false
}

impl ProofEnvironment for MmEnvironment<'_> {
    type Goal = Expr;
    type Action = MmAction;

    fn root_goal(&self) -> Expr {
        self.theorem.expr.clone()
    }

    fn evaluate(&self, goal: &Expr) -> f64 {
        match self.evaluation {
            Evaluation::Constant(v) => v,
            Evaluation::Length(rate) => (-rate * goal.len() as f64).exp(),
            Evaluation::TruthTable(rate) => {
                if self.may_hold(goal) {
                    (-rate * goal.len() as f64).exp()
                } else {
                    0.0
                }
            }
        }
    }

    fn candidates(&self, goal: &Expr, beam: usize) -> Vec<Candidate<MmAction>> {
        let scored = self.scored_candidates(goal);
        if scored.is_empty() {
            return Vec::new();
        }
        let scores: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
        let priors = normalize_priors(&scores).expect("scores are positive and finite");
        let mut ranked: Vec<Candidate<MmAction>> = scored
            .into_iter()
            .zip(priors)
            .map(|((action, _), priority)| Candidate { action, priority })
            .collect();
        ranked.sort_by(|x, y| y.priority.total_cmp(&x.priority));
        ranked.truncate(beam);
        ranked
    }

    fn apply(&self, goal: &Expr, action: &MmAction) -> Result<Vec<Expr>, Invalid> {
        let assertion = self.db.assertions.get(action.assertion).ok_or(Invalid)?;
        if assertion.floating.iter().any(|f| action.subst.get(f.var).is_none())
            || action.subst.apply(&assertion.expr) != *goal
        {
            return Err(Invalid);
        }
        for &(x, y) in &assertion.disjoint {
            let (ix, iy) = (action.subst.get(x).unwrap_or_default(), action.subst.get(y).unwrap_or_default());
            if !disjoint_ok(self.db, ix, iy, &self.theorem.scope_disjoint) {
                return Err(Invalid);
            }
        }
        Ok(assertion.essential.iter().map(|e| action.subst.apply(&e.expr)).collect())
    }

    fn trivially_proven(&self, goal: &Expr) -> bool {
        self.theorem.essential.iter().any(|e| e.expr == *goal)
    }
}
