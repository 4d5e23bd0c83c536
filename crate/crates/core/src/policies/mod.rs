//! Search policies over [`crate::proof_tree`].
//!
//! Every tree policy runs in passes: one descent from the root, at most one
//! expansion per visited OR node, then a backup along the visited path.
//! Minimax is the exception and runs a single depth-limited search.

mod bandit;
mod hypertree;
mod minimax;
mod pns;
mod pp;
mod valuation;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::ProofEnvironment;
use crate::proof_tree::{NodeStatus, OrNode, ProofNumber, ProofStep, TreeContext};

pub use minimax::{minimax_search, MinimaxOutcome};
pub use pns::{pns_init, pns_select, pns_update, NodeKind};
pub use pp::{expand_fully, pp_backup_subtree, pp_combine_and, pp_combine_or, pp_value_and, pp_value_or};
pub use valuation::{holophrasm_valuation, modified_valuation, puct_valuation, ChildStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Holophrasm,
    Minimax,
    Puct,
    #[serde(rename = "pp")]
    ProductPropagation,
    #[serde(rename = "pns")]
    ProofNumber,
    #[serde(rename = "hypertree")]
    HyperTree,
    #[serde(rename = "pp-puct")]
    PpPuct,
    #[serde(rename = "pp-modified-bandit")]
    PpModifiedBandit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Holophrasm,
        Algorithm::Minimax,
        Algorithm::Puct,
        Algorithm::ProductPropagation,
        Algorithm::ProofNumber,
        Algorithm::HyperTree,
        Algorithm::PpPuct,
        Algorithm::PpModifiedBandit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Holophrasm => "holophrasm",
            Algorithm::Minimax => "minimax",
            Algorithm::Puct => "puct",
            Algorithm::ProductPropagation => "pp",
            Algorithm::ProofNumber => "pns",
            Algorithm::HyperTree => "hypertree",
            Algorithm::PpPuct => "pp-puct",
            Algorithm::PpModifiedBandit => "pp-modified-bandit",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let algo = match key.as_str() {
            "holophrasm" => Algorithm::Holophrasm,
            "minimax" => Algorithm::Minimax,
            "puct" => Algorithm::Puct,
            "pp" | "product-propagation" => Algorithm::ProductPropagation,
            "pns" | "proof-number" => Algorithm::ProofNumber,
            "hypertree" | "htps" => Algorithm::HyperTree,
            "pp-puct" | "pp+puct" => Algorithm::PpPuct,
            "pp-modified-bandit" | "pp-mb" | "modified-bandit" => Algorithm::PpModifiedBandit,
            _ => return Err(UnknownAlgorithm(s.to_string())),
        };
        Ok(algo)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    pub max_passes: u64,
    /// Wall-clock budget, checked between passes. `None` disables it.
    pub time_limit: Option<Duration>,
    pub beam: usize,
    pub c_puct: f64,
    pub a: f64,
    pub b: f64,
    pub minimax_depth: u32,
    pub minimax_breadth: usize,
    pub pns_disproof_selection: bool,
    /// When false, exhausted OR nodes are never declared dead.
    pub dead_marking: bool,
    pub hypertree_depth_cap: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            algorithm: Algorithm::Holophrasm,
            max_passes: 1000,
            time_limit: Some(Duration::from_secs(60)),
            beam: 10,
            c_puct: 0.2,
            a: 0.8,
            b: 0.5,
            minimax_depth: 2,
            minimax_breadth: 5,
            pns_disproof_selection: false,
            dead_marking: true,
            hypertree_depth_cap: 512,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("beam width must be at least 1")]
    ZeroBeam,
    #[error("max_passes must be at least 1")]
    ZeroPasses,
    #[error("{name} must be finite and {requirement}, got {value}")]
    BadConstant {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

impl SearchConfig {
    pub fn with_algorithm(algorithm: Algorithm) -> Self {
        SearchConfig {
            algorithm,
            ..SearchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.beam == 0 {
            return Err(ConfigError::ZeroBeam);
        }
        if self.max_passes == 0 {
            return Err(ConfigError::ZeroPasses);
        }
        let positive = [("c_puct", self.c_puct)];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(ConfigError::BadConstant {
                    name,
                    requirement: "> 0",
                    value,
                });
            }
        }
        for (name, value) in [("a", self.a), ("b", self.b)] {
            if !value.is_finite() || value < 0.0 {
                return Err(ConfigError::BadConstant {
                    name,
                    requirement: ">= 0",
                    value,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Proved,
    Disproved,
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct SearchResult<G, A> {
    pub status: SearchStatus,
    pub passes_used: u64,
    pub wall_time: Duration,
    pub proof: Option<ProofStep<G, A>>,
    pub nodes_created: u64,
    pub root_value: f64,
    pub root_pn: ProofNumber,
    pub root_dpn: ProofNumber,
}

impl<G, A> SearchResult<G, A> {
    pub fn proved(&self) -> bool {
        self.status == SearchStatus::Proved
    }
}

/// A live search: the tree and the context needed to run further passes.
pub struct SearchTree<'e, E: ProofEnvironment> {
    pub root: OrNode<E::Goal, E::Action>,
    pub ctx: TreeContext<'e, E>,
    pub config: SearchConfig,
    pub passes: u64,
}

impl<'e, E: ProofEnvironment> SearchTree<'e, E> {
    pub fn new(env: &'e E, goal: E::Goal, config: SearchConfig) -> Self {
        let mut ctx = TreeContext::new(env, config.beam);
        ctx.dead_marking = config.dead_marking;
        let mut root = OrNode::new(goal, &mut ctx);
        pns::refresh_or(&mut root);
        SearchTree {
            root,
            ctx,
            config,
            passes: 0,
        }
    }

    pub fn is_settled(&self) -> bool {
        self.root.status != NodeStatus::Open
    }

    /// Runs one pass of the configured tree policy.
    pub fn pass(&mut self) {
        let config = &self.config;
        match config.algorithm {
            Algorithm::Holophrasm | Algorithm::Puct => bandit::visit_or(&mut self.root, &mut self.ctx, config),
            Algorithm::ProductPropagation | Algorithm::PpPuct | Algorithm::PpModifiedBandit => {
                pp::visit_or(&mut self.root, &mut self.ctx, config)
            }
            Algorithm::ProofNumber => pns::visit_or(&mut self.root, &mut self.ctx, config),
            Algorithm::HyperTree => hypertree::hypertree_pass(&mut self.root, &mut self.ctx, config),
            Algorithm::Minimax => panic!("minimax does not run in passes"),
        }
        self.passes += 1;
    }
}

fn settle<G, A>(root: &OrNode<G, A>) -> SearchStatus {
    match root.status {
        NodeStatus::Proven => SearchStatus::Proved,
        NodeStatus::Dead => SearchStatus::Disproved,
        NodeStatus::Open => SearchStatus::BudgetExhausted,
    }
}

/// Searches for a proof of `goal` with the configured policy and budget.
///
/// Passes repeat until the root is proven or dead, the pass budget is spent,
/// or the time limit has elapsed. The clock is only read between passes.
pub fn run_search<E: ProofEnvironment>(env: &E, goal: E::Goal, config: &SearchConfig) -> SearchResult<E::Goal, E::Action> {
    let started = Instant::now();
    if config.algorithm == Algorithm::Minimax {
        return run_minimax(env, goal, config, started);
    }
    let mut tree = SearchTree::new(env, goal, config.clone());
    while !tree.is_settled() && tree.passes < config.max_passes {
        if config.time_limit.is_some_and(|limit| started.elapsed() >= limit) {
            break;
        }
        tree.pass();
    }
    let status = settle(&tree.root);
    log::debug!(
        "{} finished: {:?} after {} passes, {} nodes",
        config.algorithm,
        status,
        tree.passes,
        tree.ctx.nodes_created
    );
    SearchResult {
        status,
        passes_used: tree.passes,
        wall_time: started.elapsed(),
        proof: tree.root.extract_proof(),
        nodes_created: tree.ctx.nodes_created,
        root_value: tree.root.value,
        root_pn: tree.root.pn,
        root_dpn: tree.root.dpn,
    }
}

fn run_minimax<E: ProofEnvironment>(
    env: &E,
    goal: E::Goal,
    config: &SearchConfig,
    started: Instant,
) -> SearchResult<E::Goal, E::Action> {
    let outcome = minimax_search(env, &goal, config.minimax_depth, config.minimax_breadth);
    let status = if outcome.proof.is_some() {
        SearchStatus::Proved
    } else {
        SearchStatus::BudgetExhausted
    };
    let passes_used = if env.trivially_proven(&goal) { 0 } else { 1 };
    SearchResult {
        status,
        passes_used,
        wall_time: started.elapsed(),
        proof: outcome.proof,
        nodes_created: outcome.nodes_visited,
        root_value: outcome.value,
        root_pn: if status == SearchStatus::Proved { ProofNumber::ZERO } else { ProofNumber::ONE },
        root_dpn: if status == SearchStatus::Proved { ProofNumber::Infinite } else { ProofNumber::ONE },
    }
}

/// Index of the highest score, lowest index on ties.
pub(crate) fn argmax<I: IntoIterator<Item = (usize, f64)>>(scores: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Index of the lowest score, lowest index on ties.
pub(crate) fn argmin<I: IntoIterator<Item = (usize, f64)>>(scores: I) -> Option<usize> {
    argmax(scores.into_iter().map(|(i, s)| (i, -s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for algo in Algorithm::ALL {
            assert_eq!(algo.name().parse::<Algorithm>().unwrap(), algo);
            let json = serde_json::to_string(&algo).unwrap();
            assert_eq!(json, format!("\"{}\"", algo.name()));
        }
        assert_eq!("PP_PUCT".parse::<Algorithm>().unwrap(), Algorithm::PpPuct);
        assert!("alphazero".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let mut c = SearchConfig { beam: 0, ..SearchConfig::default() };
        assert_eq!(c.validate(), Err(ConfigError::ZeroBeam));
        c = SearchConfig::default();
        c.max_passes = 0;
        assert_eq!(c.validate(), Err(ConfigError::ZeroPasses));
        c = SearchConfig::default();
        c.a = f64::NAN;
        assert!(c.validate().is_err());
        c = SearchConfig::default();
        c.c_puct = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn default_constants() {
        let c = SearchConfig::default();
        assert_eq!((c.c_puct, c.a, c.b), (0.2, 0.8, 0.5));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax([(0, 1.0), (1, 3.0), (2, 3.0)]), Some(1));
        assert_eq!(argmin([(0, 2.0), (1, 1.0), (2, 1.0)]), Some(1));
        assert_eq!(argmax(Vec::<(usize, f64)>::new()), None);
    }
}
