//! In-memory Metamath database: interned symbols, the statement list with
//! its block structure, and the frame of every assertion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// An interned math symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

/// A typecode followed by a symbol string.
pub type Expr = Vec<Sym>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymKind {
    Constant,
    Variable,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbols {
    names: Vec<String>,
    kinds: Vec<SymKind>,
    index: HashMap<String, Sym>,
}

impl Symbols {
    pub fn get(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.names[sym.0 as usize]
    }

    pub fn kind(&self, sym: Sym) -> SymKind {
        self.kinds[sym.0 as usize]
    }

    pub fn is_var(&self, sym: Sym) -> bool {
        self.kind(sym) == SymKind::Variable
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Registers `name`; returns `None` if it already exists with the other kind.
    pub(crate) fn declare(&mut self, name: &str, kind: SymKind) -> Option<Sym> {
        if let Some(sym) = self.get(name) {
            return (self.kind(sym) == kind).then_some(sym);
        }
        let sym = Sym(self.names.len() as u32);
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.index.insert(name.to_string(), sym);
        Some(sym)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Constants(Vec<Sym>),
    Variables(Vec<Sym>),
    Disjoint(Vec<Sym>),
    Floating { label: String, typecode: Sym, var: Sym },
    Essential { label: String, expr: Expr },
    Axiom { label: String, expr: Expr },
    Provable { label: String, expr: Expr, proof: Vec<String> },
    OpenBlock,
    CloseBlock,
}

impl Statement {
    pub fn label(&self) -> Option<&str> {
        match self {
            Statement::Floating { label, .. }
            | Statement::Essential { label, .. }
            | Statement::Axiom { label, .. }
            | Statement::Provable { label, .. } => Some(label),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssertionKind {
    Axiom,
    Theorem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloatingHyp {
    pub label: String,
    pub typecode: Sym,
    pub var: Sym,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EssentialHyp {
    pub label: String,
    pub expr: Expr,
}

/// An axiom or theorem together with its frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub label: String,
    pub kind: AssertionKind,
    pub expr: Expr,
    /// Mandatory floating hypotheses, in order of appearance.
    pub floating: Vec<FloatingHyp>,
    /// Essential hypotheses, in order of appearance.
    pub essential: Vec<EssentialHyp>,
    /// Mandatory disjoint-variable pairs, each stored with the smaller symbol first.
    pub disjoint: BTreeSet<(Sym, Sym)>,
    /// Every floating hypothesis active at the statement, mandatory or not.
    pub scope_floating: Vec<FloatingHyp>,
    /// Every disjoint pair active at the statement.
    pub scope_disjoint: BTreeSet<(Sym, Sym)>,
    /// Position in [`Database::statements`].
    pub position: usize,
    pub proof: Option<Vec<String>>,
}

impl Assertion {
    pub fn typecode(&self) -> Sym {
        self.expr[0]
    }

    /// Number of mandatory hypotheses a proof step pops.
    pub fn arity(&self) -> usize {
        self.floating.len() + self.essential.len()
    }

    pub fn floating_for(&self, var: Sym) -> Option<&FloatingHyp> {
        self.scope_floating.iter().find(|f| f.var == var)
    }
}

pub(crate) fn ordered_pair(a: Sym, b: Sym) -> (Sym, Sym) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// A hypothesis label resolved to its statement.
#[derive(Clone, Debug, PartialEq)]
pub enum Hypothesis {
    Floating(FloatingHyp),
    Essential(EssentialHyp),
}

impl Hypothesis {
    pub fn expr(&self) -> Expr {
        match self {
            Hypothesis::Floating(f) => vec![f.typecode, f.var],
            Hypothesis::Essential(e) => e.expr.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Database {
    pub symbols: Symbols,
    pub statements: Vec<Statement>,
    pub assertions: Vec<Assertion>,
    pub(crate) assertion_index: HashMap<String, usize>,
    pub(crate) hypotheses: HashMap<String, Hypothesis>,
    /// Typecodes of variables, i.e. the syntactic categories.
    pub(crate) variable_typecodes: BTreeSet<Sym>,
}

impl Database {
    pub fn assertion(&self, label: &str) -> Option<&Assertion> {
        self.assertion_index.get(label).map(|&i| &self.assertions[i])
    }

    pub fn assertion_id(&self, label: &str) -> Option<usize> {
        self.assertion_index.get(label).copied()
    }

    pub fn hypothesis(&self, label: &str) -> Option<&Hypothesis> {
        self.hypotheses.get(label)
    }

    pub fn theorems(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| a.kind == AssertionKind::Theorem)
    }

    /// Whether `typecode` names a syntactic category (the typecode of some
    /// floating hypothesis) rather than a judgement like `|-`.
    pub fn is_syntactic(&self, typecode: Sym) -> bool {
        self.variable_typecodes.contains(&typecode)
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.symbols.get(name)
    }

    /// Parses a space-separated symbol string against the declared symbols.
    pub fn expr(&self, text: &str) -> Option<Expr> {
        text.split_whitespace().map(|t| self.symbols.get(t)).collect()
    }

    pub fn display<'a>(&'a self, expr: &'a [Sym]) -> DisplayExpr<'a> {
        DisplayExpr { db: self, expr }
    }
}

pub struct DisplayExpr<'a> {
    db: &'a Database,
    expr: &'a [Sym],
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.expr.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.db.symbols.name(*s))?;
        }
        Ok(())
    }
}
