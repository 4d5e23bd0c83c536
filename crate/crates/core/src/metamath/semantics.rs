//! Two-valued truth tables for databases whose formula syntax is built from
//! the usual propositional connectives.

use std::collections::{BTreeSet, HashMap};

use super::database::{Assertion, Database, Sym};
use super::unify::SyntaxProver;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Connective {
    Not,
    Implies,
    And,
    Or,
    Iff,
}

impl Connective {
    fn from_symbol(name: &str) -> Option<(Connective, usize)> {
        match name {
            "-." => Some((Connective::Not, 1)),
            "->" => Some((Connective::Implies, 2)),
            "/\\" => Some((Connective::And, 2)),
            "\\/" => Some((Connective::Or, 2)),
            "<->" => Some((Connective::Iff, 2)),
            _ => None,
        }
    }

    fn apply(self, args: &[bool]) -> bool {
        match (self, args) {
            (Connective::Not, [a]) => !a,
            (Connective::Implies, [a, b]) => !a || *b,
            (Connective::And, [a, b]) => *a && *b,
            (Connective::Or, [a, b]) => *a || *b,
            (Connective::Iff, [a, b]) => a == b,
            _ => unreachable!("arity checked when the table is built"),
        }
    }
}

/// Truth-functional reading of a database's formula syntax. Present only if
/// every syntax axiom of the formula typecode is a recognized connective.
pub struct TruthTable {
    connectives: HashMap<String, Connective>,
    formula: Sym,
    judgement: Sym,
}

impl TruthTable {
    /// Recognizes the `wff`/`|-` convention; `None` for anything else.
    pub fn detect(db: &Database) -> Option<TruthTable> {
        let formula = db.sym("wff").filter(|s| db.is_syntactic(*s))?;
        let judgement = db.sym("|-")?;
        let mut connectives = HashMap::new();
        for axiom in &db.assertions {
            if axiom.typecode() != formula || !axiom.essential.is_empty() {
                continue;
            }
            let (connective, arity) = recognize(db, axiom)?;
            if axiom.floating.len() != arity || axiom.floating.iter().any(|f| f.typecode != formula) {
                return None;
            }
            connectives.insert(axiom.label.clone(), connective);
        }
        Some(TruthTable {
            connectives,
            formula,
            judgement,
        })
    }

    /// Value of a formula whose syntax proof is `rpn`, under `assignment`
    /// of floating-hypothesis labels.
    fn eval(&self, rpn: &[String], assignment: &HashMap<&str, bool>) -> Option<bool> {
        let mut stack = Vec::new();
        for label in rpn {
            if let Some(&v) = assignment.get(label.as_str()) {
                stack.push(v);
                continue;
            }
            let connective = *self.connectives.get(label)?;
            let arity = if connective == Connective::Not { 1 } else { 2 };
            let args = stack.split_off(stack.len().checked_sub(arity)?);
            stack.push(connective.apply(&args));
        }
        (stack.len() == 1).then(|| stack[0])
    }

    /// Whether `goal` holds in every row where all `hypotheses` hold.
    /// `None` when some expression is not a `|-` formula.
    pub fn entails(&self, prover: &SyntaxProver<'_>, hypotheses: &[&[Sym]], goal: &[Sym]) -> Option<bool> {
        let mut proofs = Vec::with_capacity(hypotheses.len() + 1);
        for expr in hypotheses.iter().copied().chain(std::iter::once(goal)) {
            if expr.first() != Some(&self.judgement) {
                return None;
            }
            proofs.push(prover.prove_parts(self.formula, &expr[1..])?);
        }
        let atoms: BTreeSet<&str> = proofs
            .iter()
            .flat_map(|p| p.iter())
            .filter(|l| !self.connectives.contains_key(l.as_str()))
            .map(String::as_str)
            .collect();
        let atoms: Vec<&str> = atoms.into_iter().collect();
        if atoms.len() > 16 {
            return None;
        }
        let (goal_proof, hyp_proofs) = proofs.split_last().expect("goal is present");
        for row in 0u32..1 << atoms.len() {
            let assignment: HashMap<&str, bool> =
                atoms.iter().enumerate().map(|(i, a)| (*a, row >> i & 1 == 1)).collect();
            let mut premises_hold = true;
            for h in hyp_proofs {
                premises_hold &= self.eval(h, &assignment)?;
            }
            if premises_hold && !self.eval(goal_proof, &assignment)? {
                return Some(false);
            }
        }
        Some(true)
    }
}

fn recognize(db: &Database, axiom: &Assertion) -> Option<(Connective, usize)> {
    let mut found = None;
    for &s in &axiom.expr[1..] {
        if db.symbols.is_var(s) {
            continue;
        }
        match (Connective::from_symbol(db.symbols.name(s)), found) {
            (Some(c), None) => found = Some(c),
            (Some(_), Some(_)) => return None,
            (None, _) if matches!(db.symbols.name(s), "(" | ")") => {}
            (None, _) => return None,
        }
    }
    found
}
