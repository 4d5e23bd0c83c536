//! One-way matching of assertion patterns against ground expressions, and a
//! memoizing syntax prover used both for type checking substitution images
//! and for emitting the floating-hypothesis parts of proofs.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::database::{Assertion, Database, Expr, FloatingHyp, Sym};

/// Default bound on the number of matches returned for one assertion.
pub const DEFAULT_MATCH_CAP: usize = 64;

/// Variable to symbol-string map. Images exclude the typecode.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution(pub BTreeMap<Sym, Expr>);

impl Substitution {
    pub fn get(&self, var: Sym) -> Option<&[Sym]> {
        self.0.get(&var).map(Vec::as_slice)
    }

    pub fn insert(&mut self, var: Sym, image: Expr) {
        self.0.insert(var, image);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of tokens over all images.
    pub fn size(&self) -> usize {
        self.0.values().map(Vec::len).sum()
    }

    /// Replaces every bound variable in `expr`; unbound symbols are kept.
    pub fn apply(&self, expr: &[Sym]) -> Expr {
        let mut out = Vec::with_capacity(expr.len());
        for s in expr {
            match self.0.get(s) {
                Some(image) => out.extend_from_slice(image),
                None => out.push(*s),
            }
        }
        out
    }
}

/// Enumerates bindings of the variables in `pattern` that make it equal to
/// `target`, in left-greedy order (earlier variables take the longest image
/// first). `accept(var, image)` filters candidate images; at most `cap`
/// results are returned. Variables already bound in `seed` must keep their
/// image.
pub fn match_expr(
    db: &Database,
    pattern: &[Sym],
    target: &[Sym],
    seed: &Substitution,
    cap: usize,
    accept: &mut dyn FnMut(Sym, &[Sym]) -> bool,
) -> Vec<Substitution> {
    let mut out = Vec::new();
    if cap == 0 {
        return out;
    }
    let mut bindings = seed.clone();
    let mut ctx = Matcher {
        db,
        pattern,
        target,
        cap,
        accept,
        out: &mut out,
    };
    ctx.go(0, 0, &mut bindings);
    out
}

struct Matcher<'a, 'f> {
    db: &'a Database,
    pattern: &'a [Sym],
    target: &'a [Sym],
    cap: usize,
    accept: &'f mut dyn FnMut(Sym, &[Sym]) -> bool,
    out: &'f mut Vec<Substitution>,
}

impl Matcher<'_, '_> {
    fn go(&mut self, i: usize, j: usize, bindings: &mut Substitution) {
        if self.out.len() >= self.cap {
            return;
        }
        if i == self.pattern.len() {
            if j == self.target.len() {
                self.out.push(bindings.clone());
            }
            return;
        }
        let sym = self.pattern[i];
        let rest = &self.target[j..];
        if !self.db.symbols.is_var(sym) {
            if rest.first() == Some(&sym) {
                self.go(i + 1, j + 1, bindings);
            }
            return;
        }
        if let Some(image) = bindings.get(sym) {
            if rest.starts_with(image) {
                let n = image.len();
                self.go(i + 1, j + n, bindings);
            }
            return;
        }
        // every remaining pattern symbol consumes at least one token
        let reserve = self.pattern.len() - i - 1;
        if rest.len() <= reserve {
            return;
        }
        for len in (1..=rest.len() - reserve).rev() {
            let image = &rest[..len];
            if !(self.accept)(sym, image) {
                continue;
            }
            bindings.insert(sym, image.to_vec());
            self.go(i + 1, j + len, bindings);
            bindings.0.remove(&sym);
            if self.out.len() >= self.cap {
                return;
            }
        }
    }
}

/// Proves expressions of syntactic typecodes from the syntax axioms of a
/// database and the floating hypotheses of one theorem's scope.
pub struct SyntaxProver<'d> {
    db: &'d Database,
    floating: Vec<FloatingHyp>,
    syntax_axioms: Vec<usize>,
    limit: usize,
    memo: RefCell<HashMap<Expr, Option<Rc<Vec<String>>>>>,
}

impl<'d> SyntaxProver<'d> {
    /// `floating` are the variable typings in scope; `limit` is the statement
    /// position before which syntax axioms may be used.
    pub fn new(db: &'d Database, floating: Vec<FloatingHyp>, limit: usize) -> Self {
        let syntax_axioms = db
            .assertions
            .iter()
            .enumerate()
            .filter(|(_, a)| a.position < limit && a.essential.is_empty() && db.is_syntactic(a.typecode()))
            .map(|(i, _)| i)
            .collect();
        SyntaxProver {
            db,
            floating,
            syntax_axioms,
            limit,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// Prover for the scope of `theorem`.
    pub fn for_assertion(db: &'d Database, theorem: &Assertion) -> Self {
        Self::new(db, theorem.scope_floating.clone(), theorem.position)
    }

    pub fn db(&self) -> &'d Database {
        self.db
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn is_well_typed(&self, typecode: Sym, body: &[Sym]) -> bool {
        self.prove_parts(typecode, body).is_some()
    }

    pub fn prove_parts(&self, typecode: Sym, body: &[Sym]) -> Option<Rc<Vec<String>>> {
        let mut expr = Vec::with_capacity(body.len() + 1);
        expr.push(typecode);
        expr.extend_from_slice(body);
        self.prove(&expr)
    }

    /// Reverse-Polish proof of `expr` (typecode first), or `None` if the
    /// expression is not derivable by syntax axioms.
    pub fn prove(&self, expr: &[Sym]) -> Option<Rc<Vec<String>>> {
        if let Some(done) = self.memo.borrow().get(expr) {
            return done.clone();
        }
        if expr.len() < 2 || !self.db.is_syntactic(expr[0]) {
            return None;
        }
        // guards against cyclic coercions while the entry is being computed
        self.memo.borrow_mut().insert(expr.to_vec(), None);
        let result = self.search(expr).map(Rc::new);
        self.memo.borrow_mut().insert(expr.to_vec(), result.clone());
        result
    }

    fn search(&self, expr: &[Sym]) -> Option<Vec<String>> {
        if let [tc, var] = expr {
            if let Some(f) = self.floating.iter().find(|f| f.var == *var && f.typecode == *tc) {
                return Some(vec![f.label.clone()]);
            }
        }
        for &id in &self.syntax_axioms {
            let axiom = &self.db.assertions[id];
            if axiom.typecode() != expr[0] {
                continue;
            }
            let mut accept = |var: Sym, image: &[Sym]| match axiom.floating_for(var) {
                Some(f) => self.is_well_typed(f.typecode, image),
                None => false,
            };
            let found = match_expr(self.db, &axiom.expr[1..], &expr[1..], &Substitution::default(), 1, &mut accept);
            if let Some(subst) = found.into_iter().next() {
                let mut proof = Vec::new();
                for f in &axiom.floating {
                    let image = subst.get(f.var)?;
                    proof.extend(self.prove_parts(f.typecode, image)?.iter().cloned());
                }
                proof.push(axiom.label.clone());
                return Some(proof);
            }
        }
        None
    }
}

/// Matches the conclusion of `assertion` against the ground `goal`,
/// keeping only type-correct images. An empty result means no match.
pub fn unify_conclusion(
    prover: &SyntaxProver<'_>,
    assertion: &Assertion,
    goal: &[Sym],
    cap: usize,
) -> Vec<Substitution> {
    assert!(!goal.is_empty(), "goal expression must be nonempty");
    if assertion.expr[0] != goal[0] {
        return Vec::new();
    }
    let mut accept = |var: Sym, image: &[Sym]| match assertion.floating_for(var) {
        Some(f) => prover.is_well_typed(f.typecode, image),
        None => false,
    };
    match_expr(
        prover.db(),
        &assertion.expr[1..],
        &goal[1..],
        &Substitution::default(),
        cap,
        &mut accept,
    )
}
