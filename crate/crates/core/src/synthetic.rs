//! Seeded random AND/OR trees with known provability.
//!
//! A [`SyntheticTree`] is a finite proof space: OR nodes above `max_depth`
//! have between one and `or_branching` AND children, every AND child has
//! between one and `and_branching` hypotheses, and OR nodes at `max_depth`
//! are leaves that are initial hypotheses with probability
//! `leaf_proven_prob`. [`SyntheticEnv`] exposes a tree as a
//! [`ProofEnvironment`]; the brute-force evaluators here are the reference
//! the search policies are checked against.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::{normalize_priors, Candidate, Invalid, ProofEnvironment};
use crate::proof_tree::ProofStep;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub max_depth: u32,
    pub or_branching: u32,
    pub and_branching: u32,
    pub leaf_proven_prob: f64,
    pub oracle_noise: f64,
    /// 0 gives uniform candidate priors; 1 strongly favors provable children.
    pub prior_quality: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("malformed entry `{0}`, expected key=value")]
    Malformed(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("invalid spec: {0}")]
    Invalid(&'static str),
}

impl SyntheticSpec {
    pub fn new(seed: u64, max_depth: u32, or_branching: u32, and_branching: u32, leaf_proven_prob: f64) -> Self {
        SyntheticSpec {
            seed,
            max_depth,
            or_branching,
            and_branching,
            leaf_proven_prob,
            oracle_noise: 0.0,
            prior_quality: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.max_depth < 1 {
            return Err(SpecError::Invalid("max_depth must be at least 1"));
        }
        if self.or_branching < 1 || self.and_branching < 1 {
            return Err(SpecError::Invalid("branching factors must be at least 1"));
        }
        for p in [self.leaf_proven_prob, self.oracle_noise, self.prior_quality] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SpecError::Invalid("probabilities must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed={} max_depth={} or_branching={} and_branching={} leaf_proven_prob={} oracle_noise={} prior_quality={}",
            self.seed,
            self.max_depth,
            self.or_branching,
            self.and_branching,
            self.leaf_proven_prob,
            self.oracle_noise,
            self.prior_quality
        )
    }
}

impl FromStr for SyntheticSpec {
    type Err = SpecError;

    /// Whitespace-separated `key=value` pairs. `oracle_noise` and
    /// `prior_quality` default to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, SpecError> {
            value.parse().map_err(|_| SpecError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        let mut seed = None;
        let mut max_depth = None;
        let mut or_branching = None;
        let mut and_branching = None;
        let mut leaf_proven_prob = None;
        let mut oracle_noise = 0.0;
        let mut prior_quality = 0.0;
        for entry in s.split_whitespace() {
            let (key, value) = entry.split_once('=').ok_or_else(|| SpecError::Malformed(entry.to_string()))?;
            match key {
                "seed" => seed = Some(num(key, value)?),
                "max_depth" => max_depth = Some(num(key, value)?),
                "or_branching" => or_branching = Some(num(key, value)?),
                "and_branching" => and_branching = Some(num(key, value)?),
                "leaf_proven_prob" => leaf_proven_prob = Some(num(key, value)?),
                "oracle_noise" => oracle_noise = num(key, value)?,
                "prior_quality" => prior_quality = num(key, value)?,
                other => return Err(SpecError::UnknownKey(other.to_string())),
            }
        }
        let spec = SyntheticSpec {
            seed: seed.ok_or(SpecError::MissingKey("seed"))?,
            max_depth: max_depth.ok_or(SpecError::MissingKey("max_depth"))?,
            or_branching: or_branching.ok_or(SpecError::MissingKey("or_branching"))?,
            and_branching: and_branching.ok_or(SpecError::MissingKey("and_branching"))?,
            leaf_proven_prob: leaf_proven_prob.ok_or(SpecError::MissingKey("leaf_proven_prob"))?,
            oracle_noise,
            prior_quality,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a suite file: one spec per line, blank lines and `#` comments
/// ignored.
pub fn parse_suite(text: &str) -> Result<Vec<SyntheticSpec>, (usize, SpecError)> {
    text.lines()
        .enumerate()
        .map(|(n, line)| (n + 1, line.split('#').next().unwrap_or("").trim()))
        .filter(|(_, line)| !line.is_empty())
        .map(|(n, line)| line.parse().map_err(|e| (n, e)))
        .collect()
}

pub fn format_suite(specs: &[SyntheticSpec]) -> String {
    specs.iter().map(|s| format!("{s}\n")).collect()
}

/// `count` specs with shapes drawn uniformly: depth in `1..=max_depth`,
/// branchings in `1..=max_branching`, leaf probability in `[0.2, 0.8]`.
pub fn random_suite(count: usize, seed: u64, max_depth: u32, max_branching: u32, noise: f64) -> Vec<SyntheticSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| SyntheticSpec {
            seed: rng.gen(),
            max_depth: rng.gen_range(1..=max_depth.max(1)),
            or_branching: rng.gen_range(1..=max_branching.max(1)),
            and_branching: rng.gen_range(1..=max_branching.max(1)),
            leaf_proven_prob: (rng.gen_range(0.2..=0.8f64) * 100.0).round() / 100.0,
            oracle_noise: noise,
            prior_quality: 0.0,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynOr {
    pub depth: u32,
    pub children: Vec<usize>,
    pub leaf_proven: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynAnd {
    pub children: Vec<usize>,
}

/// Arena-allocated tree; node 0 of `ors` is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticTree {
    pub spec: SyntheticSpec,
    pub ors: Vec<SynOr>,
    pub ands: Vec<SynAnd>,
}

impl SyntheticTree {
    pub const ROOT: usize = 0;

    pub fn is_leaf(&self, or: usize) -> bool {
        self.ors[or].depth == self.spec.max_depth
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ors.len()).filter(|&i| self.is_leaf(i))
    }
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticTree {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tree = SyntheticTree {
        spec: spec.clone(),
        ors: Vec::new(),
        ands: Vec::new(),
    };
    grow_or(&mut tree, &mut rng, 0);
    tree
}

fn grow_or(tree: &mut SyntheticTree, rng: &mut ChaCha8Rng, depth: u32) -> usize {
    let id = tree.ors.len();
    tree.ors.push(SynOr {
        depth,
        children: Vec::new(),
        leaf_proven: false,
    });
    if depth >= tree.spec.max_depth {
        tree.ors[id].leaf_proven = rng.gen_bool(tree.spec.leaf_proven_prob);
        return id;
    }
    let width = rng.gen_range(1..=tree.spec.or_branching);
    for _ in 0..width {
        let and_id = tree.ands.len();
        tree.ands.push(SynAnd { children: Vec::new() });
        tree.ors[id].children.push(and_id);
        let hyps = rng.gen_range(1..=tree.spec.and_branching);
        for _ in 0..hyps {
            let child = grow_or(tree, rng, depth + 1);
            tree.ands[and_id].children.push(child);
        }
    }
    id
}

/// Exact provability of every OR node, by exhaustive recursion.
pub fn brute_force_provability(tree: &SyntheticTree) -> Vec<bool> {
    fn or(tree: &SyntheticTree, id: usize, out: &mut [bool]) -> bool {
        let node = &tree.ors[id];
        let mut any = node.leaf_proven;
        for &a in &node.children {
            let mut all = true;
            for &c in &tree.ands[a].children {
                // no short-circuit: every node gets its verdict
                all &= or(tree, c, out);
            }
            any |= all;
        }
        out[id] = any;
        any
    }
    let mut out = vec![false; tree.ors.len()];
    or(tree, SyntheticTree::ROOT, &mut out);
    out
}

pub fn brute_force_provable(tree: &SyntheticTree) -> bool {
    brute_force_provability(tree)[SyntheticTree::ROOT]
}

/// Exact Product Propagation value of the root given a value for every
/// leaf (`leaf_values[i]` for OR node `i`; entries of inner nodes are
/// ignored).
pub fn brute_force_pp_value(tree: &SyntheticTree, leaf_values: &[f64]) -> f64 {
    fn or(tree: &SyntheticTree, id: usize, leaf_values: &[f64]) -> f64 {
        let node = &tree.ors[id];
        if node.children.is_empty() {
            return leaf_values[id];
        }
        let mut all_fail = 1.0;
        for &a in &node.children {
            let mut all_hold = 1.0;
            for &c in &tree.ands[a].children {
                all_hold *= or(tree, c, leaf_values);
            }
            all_fail *= 1.0 - all_hold;
        }
        1.0 - all_fail
    }
    or(tree, SyntheticTree::ROOT, leaf_values)
}

/// SplitMix64 finalizer, used to derive per-node streams from one seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A degraded payout oracle: the true 0/1 verdict pulled towards the middle
/// by a uniform draw from `[0, noise]`, fixed per `(seed, node)`.
pub fn noisy_evaluate(provable: bool, node: usize, noise: f64, seed: u64) -> f64 {
    assert!((0.0..=1.0).contains(&noise), "noise {noise} outside [0, 1]");
    let truth = if provable { 1.0 } else { 0.0 };
    if noise == 0.0 {
        return truth;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(node as u64)));
    let delta = rng.gen_range(0.0..=noise);
    let v: f64 = if provable { truth - delta } else { truth + delta };
    v.clamp(0.0, 1.0)
}

/// [`ProofEnvironment`] over a synthetic tree. Goals are OR node ids,
/// actions are AND node ids.
pub struct SyntheticEnv<'t> {
    tree: &'t SyntheticTree,
    provable: Vec<bool>,
    leaf_values: Option<Vec<f64>>,
}

impl<'t> SyntheticEnv<'t> {
    pub fn new(tree: &'t SyntheticTree) -> Self {
        SyntheticEnv {
            tree,
            provable: brute_force_provability(tree),
            leaf_values: None,
        }
    }

    /// Replaces the payout of every leaf with `values[leaf]`.
    pub fn with_leaf_values(mut self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.tree.ors.len());
        self.leaf_values = Some(values);
        self
    }

    pub fn tree(&self) -> &SyntheticTree {
        self.tree
    }

    pub fn is_provable(&self, or: usize) -> bool {
        self.provable[or]
    }
}

impl ProofEnvironment for SyntheticEnv<'_> {
    type Goal = usize;
    type Action = usize;

    fn root_goal(&self) -> usize {
        SyntheticTree::ROOT
    }

    fn evaluate(&self, goal: &usize) -> f64 {
        if let Some(values) = &self.leaf_values {
            if self.tree.is_leaf(*goal) {
                return values[*goal];
            }
        }
        noisy_evaluate(self.provable[*goal], *goal, self.tree.spec.oracle_noise, self.tree.spec.seed)
    }

    fn candidates(&self, goal: &usize, beam: usize) -> Vec<Candidate<usize>> {
        let children = &self.tree.ors[*goal].children;
        if children.is_empty() {
            return Vec::new();
        }
        let quality = self.tree.spec.prior_quality;
        let scores: Vec<f64> = children
            .iter()
            .map(|&a| {
                let good = self.tree.ands[a].children.iter().all(|&c| self.provable[c]);
                if good {
                    1.0 + 4.0 * quality
                } else {
                    1.0
                }
            })
            .collect();
        let priors = normalize_priors(&scores).expect("non-empty, non-negative scores");
        let mut ranked: Vec<Candidate<usize>> = children.iter().zip(priors).map(|(&a, p)| Candidate::new(a, p)).collect();
        // stable: equal priors keep child order
        ranked.sort_by(|x, y| y.priority.total_cmp(&x.priority));
        ranked.truncate(beam);
        ranked
    }

    fn apply(&self, goal: &usize, action: &usize) -> Result<Vec<usize>, Invalid> {
        if !self.tree.ors[*goal].children.contains(action) {
            return Err(Invalid);
        }
        Ok(self.tree.ands[*action].children.clone())
    }

    fn trivially_proven(&self, goal: &usize) -> bool {
        self.tree.ors[*goal].leaf_proven
    }
}

/// Checks a proof against the tree: every step applies a real AND child of
/// its goal, premises match that child's hypotheses in order, and every
/// hypothesis leaf is an initial hypothesis.
pub fn check_proof(tree: &SyntheticTree, proof: &ProofStep<usize, usize>) -> Result<(), String> {
    match proof {
        ProofStep::Hypothesis(g) => {
            if tree.ors.get(*g).is_some_and(|n| n.leaf_proven) {
                Ok(())
            } else {
                Err(format!("goal {g} is not an initial hypothesis"))
            }
        }
        ProofStep::Apply { goal, action, premises } => {
            let node = tree.ors.get(*goal).ok_or_else(|| format!("unknown goal {goal}"))?;
            if !node.children.contains(action) {
                return Err(format!("{action} is not a child of goal {goal}"));
            }
            let expected = &tree.ands[*action].children;
            let got: Vec<usize> = premises.iter().map(|p| *p.goal()).collect();
            if &got != expected {
                return Err(format!("premises {got:?} do not match hypotheses {expected:?}"));
            }
            premises.iter().try_for_each(|p| check_proof(tree, p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::check_conformance;

    fn hand_tree(ors: Vec<(u32, Vec<usize>, bool)>, ands: Vec<Vec<usize>>, max_depth: u32) -> SyntheticTree {
        SyntheticTree {
            spec: SyntheticSpec::new(0, max_depth, 3, 3, 0.5),
            ors: ors
                .into_iter()
                .map(|(depth, children, leaf_proven)| SynOr {
                    depth,
                    children,
                    leaf_proven,
                })
                .collect(),
            ands: ands.into_iter().map(|children| SynAnd { children }).collect(),
        }
    }

    #[test]
    fn single_chain_all_proven() {
        let tree = generate(&SyntheticSpec::new(1, 1, 1, 1, 1.0));
        assert_eq!(tree.ors.len(), 2);
        assert_eq!(tree.ands.len(), 1);
        assert!(brute_force_provable(&tree));
    }

    #[test]
    fn no_proven_leaves_is_unprovable() {
        for seed in 0..20 {
            let tree = generate(&SyntheticSpec::new(seed, 3, 3, 2, 0.0));
            assert!(!brute_force_provable(&tree));
            assert!(tree.ands.iter().all(|a| !a.children.is_empty()));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = SyntheticSpec::new(42, 4, 3, 3, 0.4);
        assert_eq!(generate(&spec), generate(&spec));
        let other = SyntheticSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate(&spec), generate(&other));
    }

    #[test]
    fn shape_respects_spec() {
        let spec = SyntheticSpec::new(7, 4, 3, 2, 0.5);
        let tree = generate(&spec);
        for node in &tree.ors {
            if node.depth < 4 {
                assert!((1..=3).contains(&node.children.len()));
                assert!(!node.leaf_proven);
            } else {
                assert!(node.children.is_empty());
            }
        }
        assert!(tree.ands.iter().all(|a| (1..=2).contains(&a.children.len())));
    }

    #[test]
    fn provability_by_hand() {
        // root -> [AND0: leaf1 (proven), leaf2 (not)], [AND1: leaf3 (proven)]
        let tree = hand_tree(
            vec![(0, vec![0, 1], false), (1, vec![], true), (1, vec![], false), (1, vec![], true)],
            vec![vec![1, 2], vec![3]],
            1,
        );
        assert!(brute_force_provable(&tree));
        assert_eq!(brute_force_provability(&tree), vec![true, true, false, true]);

        let only_bad = hand_tree(
            vec![(0, vec![0], false), (1, vec![], true), (1, vec![], false)],
            vec![vec![1, 2]],
            1,
        );
        assert!(!brute_force_provable(&only_bad));
    }

    #[test]
    fn pp_reference_values() {
        let single = hand_tree(vec![(0, vec![], false)], vec![], 0);
        assert_eq!(brute_force_pp_value(&single, &[0.37]), 0.37);

        let one_and = hand_tree(
            vec![(0, vec![0], false), (1, vec![], false), (1, vec![], false)],
            vec![vec![1, 2]],
            1,
        );
        assert!((brute_force_pp_value(&one_and, &[0.0, 0.5, 0.5]) - 0.25).abs() < 1e-15);

        let two_ands = hand_tree(
            vec![
                (0, vec![0, 1], false),
                (1, vec![], false),
                (1, vec![], false),
                (1, vec![], false),
                (1, vec![], false),
            ],
            vec![vec![1, 2], vec![3, 4]],
            1,
        );
        let v = brute_force_pp_value(&two_ands, &[0.0, 0.5, 0.5, 0.5, 0.5]);
        assert!((v - 0.4375).abs() < 1e-15);
    }

    #[test]
    fn noise_model() {
        assert_eq!(noisy_evaluate(true, 3, 0.0, 9), 1.0);
        assert_eq!(noisy_evaluate(false, 3, 0.0, 9), 0.0);
        for node in 0..200 {
            let v = noisy_evaluate(node % 2 == 0, node, 1.0, 5);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, noisy_evaluate(node % 2 == 0, node, 1.0, 5));
        }
        let a: Vec<f64> = (0..10).map(|n| noisy_evaluate(true, n, 0.5, 1)).collect();
        assert!(a.iter().all(|v| (0.5..=1.0).contains(v)));
        assert!(a.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn spec_text_round_trip() {
        let spec = SyntheticSpec {
            oracle_noise: 0.125,
            prior_quality: 0.3,
            ..SyntheticSpec::new(99, 5, 3, 2, 0.45)
        };
        assert_eq!(spec.to_string().parse::<SyntheticSpec>().unwrap(), spec);
        let minimal: SyntheticSpec = "seed=1 max_depth=2 or_branching=2 and_branching=1 leaf_proven_prob=1".parse().unwrap();
        assert_eq!(minimal.oracle_noise, 0.0);
    }

    #[test]
    fn spec_text_errors() {
        assert_eq!("seed=1 depth".parse::<SyntheticSpec>(), Err(SpecError::Malformed("depth".into())));
        assert_eq!("bogus=1".parse::<SyntheticSpec>(), Err(SpecError::UnknownKey("bogus".into())));
        assert_eq!(
            "seed=1 max_depth=2 or_branching=2 and_branching=1".parse::<SyntheticSpec>(),
            Err(SpecError::MissingKey("leaf_proven_prob"))
        );
        assert!(matches!(
            "seed=x max_depth=2 or_branching=2 and_branching=1 leaf_proven_prob=1".parse::<SyntheticSpec>(),
            Err(SpecError::BadValue { .. })
        ));
        assert!(matches!(
            "seed=1 max_depth=0 or_branching=2 and_branching=1 leaf_proven_prob=1".parse::<SyntheticSpec>(),
            Err(SpecError::Invalid(_))
        ));
    }

    #[test]
    fn suite_file_round_trip() {
        let suite = random_suite(12, 3, 5, 3, 0.0);
        let text = format!("# generated\n\n{}", format_suite(&suite));
        assert_eq!(parse_suite(&text).unwrap(), suite);
        assert_eq!(parse_suite("seed=1\n").unwrap_err().0, 1);
    }

    #[test]
    fn environment_conformance() {
        for spec in random_suite(30, 11, 4, 3, 0.3) {
            let tree = generate(&spec);
            let env = SyntheticEnv::new(&tree);
            for goal in 0..tree.ors.len() {
                check_conformance(&env, &goal, 2).unwrap();
            }
        }
    }

    #[test]
    fn quality_skews_priors_towards_provable_children() {
        let tree = hand_tree(
            vec![(0, vec![0, 1], false), (1, vec![], false), (1, vec![], true)],
            vec![vec![1], vec![2]],
            1,
        );
        let mut skewed = tree.clone();
        skewed.spec.prior_quality = 1.0;
        let uniform = SyntheticEnv::new(&tree).candidates(&0, 10);
        assert_eq!(uniform.iter().map(|c| c.action).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(uniform[0].priority, 0.5);
        let ranked = SyntheticEnv::new(&skewed).candidates(&0, 10);
        assert_eq!(ranked[0].action, 1);
        assert!((ranked[0].priority - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn apply_rejects_foreign_actions() {
        let tree = generate(&SyntheticSpec::new(3, 2, 2, 2, 0.5));
        let env = SyntheticEnv::new(&tree);
        let foreign = tree.ands.len() + 5;
        assert_eq!(env.apply(&0, &foreign), Err(Invalid));
    }

    #[test]
    fn proof_checker() {
        let tree = generate(&SyntheticSpec::new(1, 1, 1, 1, 1.0));
        let good = ProofStep::Apply {
            goal: 0,
            action: 0,
            premises: vec![ProofStep::Hypothesis(1)],
        };
        assert!(check_proof(&tree, &good).is_ok());
        let bad = ProofStep::Apply {
            goal: 0,
            action: 0,
            premises: vec![],
        };
        assert!(check_proof(&tree, &bad).is_err());
        assert!(check_proof(&tree, &ProofStep::Hypothesis(0)).is_err());
    }
}
