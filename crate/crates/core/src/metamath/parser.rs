//! Parser and printer for the uncompressed subset of the `.mm` format.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::database::{
    ordered_pair, Assertion, AssertionKind, Database, EssentialHyp, Expr, FloatingHyp, Hypothesis, Statement, Sym, SymKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("unterminated comment")]
    UnterminatedComment,
    #[error("statement not terminated by `$.`")]
    UnterminatedStatement,
    #[error("block opened with `${{` is never closed")]
    UnterminatedBlock,
    #[error("`$}}` without a matching `${{`")]
    UnmatchedBlockEnd,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid label `{0}`")]
    BadLabel(String),
    #[error("expected a keyword after label `{0}`")]
    MissingKeyword(String),
    #[error("unexpected token `{0}`")]
    Unexpected(String),
    #[error("symbol `{0}` is not declared")]
    UndeclaredSymbol(String),
    #[error("`{0}` is declared both as a constant and as a variable")]
    KindClash(String),
    #[error("`{0}` is not an active variable")]
    NotAVariable(String),
    #[error("`{0}` is not a constant")]
    NotAConstant(String),
    #[error("variable `{0}` is already active")]
    VariableRedeclared(String),
    #[error("constants must be declared in the outermost block")]
    NestedConstant,
    #[error("variable `{0}` is used without an active floating hypothesis")]
    MissingFloating(String),
    #[error("variable `{0}` already has an active floating hypothesis")]
    DuplicateFloating(String),
    #[error("a `$d` statement needs at least two distinct variables")]
    BadDisjoint,
    #[error("empty statement")]
    EmptyStatement,
    #[error("compressed proofs are not supported; re-export the database with uncompressed proofs")]
    CompressedProof,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let mut tokens = Vec::new();
    let mut in_comment: Option<usize> = None;
    for (n, line) in text.lines().enumerate() {
        for word in line.split_whitespace() {
            if in_comment.is_some() {
                if word == "$)" {
                    in_comment = None;
                }
                continue;
            }
            if word == "$(" {
                in_comment = Some(n + 1);
                continue;
            }
            tokens.push(Token { text: word, line: n + 1 });
        }
    }
    if let Some(line) = in_comment {
        return Err(ParseError {
            line,
            kind: ParseErrorKind::UnterminatedComment,
        });
    }
    Ok(tokens)
}

#[derive(Default)]
struct Scope {
    vars: Vec<Sym>,
    floating: Vec<FloatingHyp>,
    essential: Vec<EssentialHyp>,
    disjoint: Vec<(Sym, Sym)>,
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    db: Database,
    scopes: Vec<Scope>,
    labels: HashSet<String>,
}

fn is_keyword(t: &str) -> bool {
    t.starts_with('$')
}

fn valid_label(t: &str) -> bool {
    !t.is_empty() && t.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl<'a> Parser<'a> {
    fn err(&self, line: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, kind }
    }

    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or(1, |t| t.line)
    }

    fn active_var(&self, sym: Sym) -> bool {
        self.scopes.iter().any(|s| s.vars.contains(&sym))
    }

    fn active_floating(&self) -> impl Iterator<Item = &FloatingHyp> {
        self.scopes.iter().flat_map(|s| s.floating.iter())
    }

    /// Tokens up to the terminating keyword `end`, which is consumed.
    fn until(&mut self, start_line: usize, end: &str) -> Result<Vec<&'a str>, ParseError> {
        let mut out = Vec::new();
        loop {
            let Some(tok) = self.tokens.get(self.pos) else {
                return Err(self.err(start_line, ParseErrorKind::UnterminatedStatement));
            };
            self.pos += 1;
            if tok.text == end {
                return Ok(out);
            }
            if is_keyword(tok.text) {
                let kind = match tok.text {
                    "$c" | "$v" | "$f" | "$e" | "$d" | "$a" | "$p" | "$=" | "$." | "${" | "$}" => {
                        ParseErrorKind::UnterminatedStatement
                    }
                    other => ParseErrorKind::UnknownKeyword(other.to_string()),
                };
                return Err(self.err(tok.line, kind));
            }
            out.push(tok.text);
        }
    }

    fn math_expr(&self, line: usize, words: &[&str]) -> Result<Expr, ParseError> {
        let (first, rest) = words
            .split_first()
            .ok_or_else(|| self.err(line, ParseErrorKind::EmptyStatement))?;
        let typecode = self
            .db
            .symbols
            .get(first)
            .ok_or_else(|| self.err(line, ParseErrorKind::UndeclaredSymbol(first.to_string())))?;
        if self.db.symbols.kind(typecode) != SymKind::Constant {
            return Err(self.err(line, ParseErrorKind::NotAConstant(first.to_string())));
        }
        let mut expr = vec![typecode];
        for w in rest {
            let sym = self
                .db
                .symbols
                .get(w)
                .ok_or_else(|| self.err(line, ParseErrorKind::UndeclaredSymbol(w.to_string())))?;
            if self.db.symbols.is_var(sym) {
                if !self.active_var(sym) {
                    return Err(self.err(line, ParseErrorKind::NotAVariable(w.to_string())));
                }
                if !self.active_floating().any(|f| f.var == sym) {
                    return Err(self.err(line, ParseErrorKind::MissingFloating(w.to_string())));
                }
            }
            expr.push(sym);
        }
        Ok(expr)
    }

    fn claim_label(&mut self, line: usize, label: &str) -> Result<(), ParseError> {
        if !valid_label(label) {
            return Err(self.err(line, ParseErrorKind::BadLabel(label.to_string())));
        }
        if !self.labels.insert(label.to_string()) {
            return Err(self.err(line, ParseErrorKind::DuplicateLabel(label.to_string())));
        }
        Ok(())
    }

    fn declare(&mut self, line: usize, words: &[&str], kind: SymKind) -> Result<Vec<Sym>, ParseError> {
        let mut syms = Vec::new();
        for w in words {
            let sym = self
                .db
                .symbols
                .declare(w, kind)
                .ok_or_else(|| self.err(line, ParseErrorKind::KindClash(w.to_string())))?;
            if kind == SymKind::Variable {
                if self.active_var(sym) {
                    return Err(self.err(line, ParseErrorKind::VariableRedeclared(w.to_string())));
                }
                self.scopes.last_mut().expect("scope").vars.push(sym);
            }
            syms.push(sym);
        }
        Ok(syms)
    }

    fn assertion(&self, label: &str, kind: AssertionKind, expr: Expr, proof: Option<Vec<String>>) -> Assertion {
        let essential: Vec<EssentialHyp> = self.scopes.iter().flat_map(|s| s.essential.iter().cloned()).collect();
        let mut used: BTreeSet<Sym> = expr.iter().copied().filter(|s| self.db.symbols.is_var(*s)).collect();
        for e in &essential {
            used.extend(e.expr.iter().copied().filter(|s| self.db.symbols.is_var(*s)));
        }
        let scope_floating: Vec<FloatingHyp> = self.active_floating().cloned().collect();
        let floating = scope_floating.iter().filter(|f| used.contains(&f.var)).cloned().collect();
        let scope_disjoint: BTreeSet<(Sym, Sym)> = self.scopes.iter().flat_map(|s| s.disjoint.iter().copied()).collect();
        let disjoint = scope_disjoint
            .iter()
            .copied()
            .filter(|(a, b)| used.contains(a) && used.contains(b))
            .collect();
        Assertion {
            label: label.to_string(),
            kind,
            expr,
            floating,
            essential,
            disjoint,
            scope_floating,
            scope_disjoint,
            position: self.db.statements.len(),
            proof,
        }
    }

    fn push_assertion(&mut self, assertion: Assertion, statement: Statement) {
        self.db
            .assertion_index
            .insert(assertion.label.clone(), self.db.assertions.len());
        self.db.assertions.push(assertion);
        self.db.statements.push(statement);
    }

    fn run(mut self) -> Result<Database, ParseError> {
        while let Some(tok) = self.tokens.get(self.pos) {
            let line = tok.line;
            let text = tok.text;
            self.pos += 1;
            match text {
                "${" => {
                    self.scopes.push(Scope::default());
                    self.db.statements.push(Statement::OpenBlock);
                }
                "$}" => {
                    if self.scopes.len() == 1 {
                        return Err(self.err(line, ParseErrorKind::UnmatchedBlockEnd));
                    }
                    self.scopes.pop();
                    self.db.statements.push(Statement::CloseBlock);
                }
                "$c" => {
                    if self.scopes.len() != 1 {
                        return Err(self.err(line, ParseErrorKind::NestedConstant));
                    }
                    let words = self.until(line, "$.")?;
                    if words.is_empty() {
                        return Err(self.err(line, ParseErrorKind::EmptyStatement));
                    }
                    let syms = self.declare(line, &words, SymKind::Constant)?;
                    self.db.statements.push(Statement::Constants(syms));
                }
                "$v" => {
                    let words = self.until(line, "$.")?;
                    if words.is_empty() {
                        return Err(self.err(line, ParseErrorKind::EmptyStatement));
                    }
                    let syms = self.declare(line, &words, SymKind::Variable)?;
                    self.db.statements.push(Statement::Variables(syms));
                }
                "$d" => {
                    let words = self.until(line, "$.")?;
                    let mut vars = Vec::new();
                    for w in &words {
                        let sym = self.db.symbols.get(w).filter(|s| self.db.symbols.is_var(*s) && self.active_var(*s));
                        let sym = sym.ok_or_else(|| self.err(line, ParseErrorKind::NotAVariable(w.to_string())))?;
                        if vars.contains(&sym) {
                            return Err(self.err(line, ParseErrorKind::BadDisjoint));
                        }
                        vars.push(sym);
                    }
                    if vars.len() < 2 {
                        return Err(self.err(line, ParseErrorKind::BadDisjoint));
                    }
                    let scope = self.scopes.last_mut().expect("scope");
                    for (i, &a) in vars.iter().enumerate() {
                        for &b in &vars[i + 1..] {
                            scope.disjoint.push(ordered_pair(a, b));
                        }
                    }
                    self.db.statements.push(Statement::Disjoint(vars));
                }
                t if is_keyword(t) => {
                    let kind = match t {
                        "$f" | "$e" | "$a" | "$p" | "$=" | "$." | "$)" => ParseErrorKind::Unexpected(t.to_string()),
                        other => ParseErrorKind::UnknownKeyword(other.to_string()),
                    };
                    return Err(self.err(line, kind));
                }
                label => self.labeled(line, label)?,
            }
        }
        if self.scopes.len() > 1 {
            return Err(self.err(self.line(), ParseErrorKind::UnterminatedBlock));
        }
        Ok(self.db)
    }

    fn labeled(&mut self, line: usize, label: &str) -> Result<(), ParseError> {
        let keyword = self
            .tokens
            .get(self.pos)
            .map(|t| t.text)
            .ok_or_else(|| self.err(line, ParseErrorKind::MissingKeyword(label.to_string())))?;
        self.pos += 1;
        match keyword {
            "$f" => {
                self.claim_label(line, label)?;
                let words = self.until(line, "$.")?;
                let [tc, var] = words[..] else {
                    return Err(self.err(line, ParseErrorKind::Unexpected(words.join(" "))));
                };
                let typecode = self
                    .db
                    .symbols
                    .get(tc)
                    .filter(|s| !self.db.symbols.is_var(*s))
                    .ok_or_else(|| self.err(line, ParseErrorKind::NotAConstant(tc.to_string())))?;
                let var = self
                    .db
                    .symbols
                    .get(var)
                    .filter(|s| self.db.symbols.is_var(*s) && self.active_var(*s))
                    .ok_or_else(|| self.err(line, ParseErrorKind::NotAVariable(var.to_string())))?;
                if self.active_floating().any(|f| f.var == var) {
                    let name = self.db.symbols.name(var).to_string();
                    return Err(self.err(line, ParseErrorKind::DuplicateFloating(name)));
                }
                let hyp = FloatingHyp {
                    label: label.to_string(),
                    typecode,
                    var,
                };
                self.db.variable_typecodes.insert(typecode);
                self.db.hypotheses.insert(label.to_string(), Hypothesis::Floating(hyp.clone()));
                self.scopes.last_mut().expect("scope").floating.push(hyp);
                self.db.statements.push(Statement::Floating {
                    label: label.to_string(),
                    typecode,
                    var,
                });
            }
            "$e" => {
                self.claim_label(line, label)?;
                let words = self.until(line, "$.")?;
                let expr = self.math_expr(line, &words)?;
                let hyp = EssentialHyp {
                    label: label.to_string(),
                    expr: expr.clone(),
                };
                self.db.hypotheses.insert(label.to_string(), Hypothesis::Essential(hyp.clone()));
                self.scopes.last_mut().expect("scope").essential.push(hyp);
                self.db.statements.push(Statement::Essential {
                    label: label.to_string(),
                    expr,
                });
            }
            "$a" => {
                self.claim_label(line, label)?;
                let words = self.until(line, "$.")?;
                let expr = self.math_expr(line, &words)?;
                let assertion = self.assertion(label, AssertionKind::Axiom, expr.clone(), None);
                self.push_assertion(
                    assertion,
                    Statement::Axiom {
                        label: label.to_string(),
                        expr,
                    },
                );
            }
            "$p" => {
                self.claim_label(line, label)?;
                let words = self.until(line, "$=")?;
                let expr = self.math_expr(line, &words)?;
                let proof_line = self.line();
                let proof_words = self.until(line, "$.")?;
                if proof_words.first() == Some(&"(") {
                    return Err(self.err(proof_line, ParseErrorKind::CompressedProof));
                }
                let proof: Vec<String> = proof_words.iter().map(|s| s.to_string()).collect();
                let assertion = self.assertion(label, AssertionKind::Theorem, expr.clone(), Some(proof.clone()));
                self.push_assertion(
                    assertion,
                    Statement::Provable {
                        label: label.to_string(),
                        expr,
                        proof,
                    },
                );
            }
            other if is_keyword(other) => {
                let kind = match other {
                    "$c" | "$v" | "$d" | "$=" | "$." | "${" | "$}" => ParseErrorKind::MissingKeyword(label.to_string()),
                    _ => ParseErrorKind::UnknownKeyword(other.to_string()),
                };
                return Err(self.err(line, kind));
            }
            _ => return Err(self.err(line, ParseErrorKind::MissingKeyword(label.to_string()))),
        }
        Ok(())
    }
}

/// Parses `.mm` text into a database with resolved scopes and frames.
pub fn parse(text: &str) -> Result<Database, ParseError> {
    let parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        db: Database::default(),
        scopes: vec![Scope::default()],
        labels: HashSet::new(),
    };
    parser.run()
}

/// Prints the database back as `.mm` text. Comments are not preserved.
pub fn pretty_print(db: &Database) -> String {
    let names = |syms: &[Sym]| syms.iter().map(|s| db.symbols.name(*s)).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let mut depth = 0usize;
    for statement in &db.statements {
        if matches!(statement, Statement::CloseBlock) {
            depth = depth.saturating_sub(1);
        }
        let indent = "  ".repeat(depth);
        let _ = match statement {
            Statement::Constants(syms) => writeln!(out, "{indent}$c {} $.", names(syms)),
            Statement::Variables(syms) => writeln!(out, "{indent}$v {} $.", names(syms)),
            Statement::Disjoint(syms) => writeln!(out, "{indent}$d {} $.", names(syms)),
            Statement::Floating { label, typecode, var } => {
                writeln!(out, "{indent}{label} $f {} $.", names(&[*typecode, *var]))
            }
            Statement::Essential { label, expr } => writeln!(out, "{indent}{label} $e {} $.", names(expr)),
            Statement::Axiom { label, expr } => writeln!(out, "{indent}{label} $a {} $.", names(expr)),
            Statement::Provable { label, expr, proof } => {
                writeln!(out, "{indent}{label} $p {} $=\n{indent}  {} $.", names(expr), proof.join(" "))
            }
            Statement::OpenBlock => writeln!(out, "{indent}${{"),
            Statement::CloseBlock => writeln!(out, "{indent}$}}"),
        };
        if matches!(statement, Statement::OpenBlock) {
            depth += 1;
        }
    }
    out
}
