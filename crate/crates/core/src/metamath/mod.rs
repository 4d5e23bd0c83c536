//! Metamath backend: database parsing, substitution, backward application
//! and proof checking.

mod database;
mod env;
mod parser;
mod proof;
mod semantics;
mod unify;
mod verify;

use std::path::Path;

use thiserror::Error;

pub use database::{
    Assertion, AssertionKind, Database, DisplayExpr, EssentialHyp, Expr, FloatingHyp, Hypothesis, Statement, Sym,
    SymKind, Symbols,
};
pub use env::{Evaluation, MmAction, MmEnvironment};
pub use parser::{parse, pretty_print, ParseError, ParseErrorKind};
pub use proof::{extract_proof, ExtractError};
pub use semantics::TruthTable;
pub use unify::{match_expr, unify_conclusion, Substitution, SyntaxProver, DEFAULT_MATCH_CAP};
pub use verify::{verify_database, verify_proof, RejectReason};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
}

pub fn load(path: &Path) -> Result<Database, LoadError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: display.clone(),
        source,
    })?;
    parse(&text).map_err(|source| LoadError::Parse { path: display, source })
}

/// The propositional toy database shipped with the crate.
pub const TOY_DATABASE: &str = include_str!("../../fixtures/toy.mm");
