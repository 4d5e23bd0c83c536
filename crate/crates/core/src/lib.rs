//! Proof search over AND/OR trees.
//!
//! - [`proof_tree`]: the tree, its statistics and status propagation.
//! - [`policies`]: Holophrasm, Minimax, PUCT, Product Propagation, Proof
//!   Number Search, HyperTree and the PP/PUCT hybrids.
//! - [`environment`]: the oracle interface a problem domain implements.
//! - [`synthetic`]: random trees with known answers.
//! - [`metamath`]: a Metamath backend with an independent proof checker.
//! - [`harness`]: sweeps over theorems and configurations.

pub mod environment;
pub mod harness;
pub mod metamath;
pub mod policies;
pub mod proof_tree;
pub mod synthetic;

pub use environment::{Candidate, Invalid, ProofEnvironment};
pub use policies::{run_search, Algorithm, SearchConfig, SearchResult, SearchStatus};
pub use proof_tree::{NodeStatus, ProofStep};
