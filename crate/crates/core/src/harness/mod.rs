//! Benchmark sweeps: every (problem, configuration) pair is one independent
//! job producing one [`BenchRow`]. Proofs are checked before a row claims
//! success.

use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metamath::{extract_proof, verify_proof, Database, Evaluation, MmEnvironment};
use crate::policies::{run_search, Algorithm, SearchConfig};
use crate::synthetic::{check_proof, generate, SyntheticEnv, SyntheticSpec};
use crate::environment::ProofEnvironment;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub theorem: String,
    pub algorithm: Algorithm,
    pub max_passes: u64,
    pub time_limit_ms: Option<u64>,
    pub proved: bool,
    pub passes_used: u64,
    pub wall_ms: f64,
    pub nodes_created: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub proof_length: Option<usize>,
    /// Set when the job panicked or its proof failed to check.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Outcome of one search, before it is attached to a configuration.
#[derive(Clone, Debug, Default)]
pub struct Attempt {
    pub proved: bool,
    pub passes_used: u64,
    pub nodes_created: u64,
    pub proof_length: Option<usize>,
    pub error: Option<String>,
    /// The checked proof, rendered for output. Empty unless proved.
    pub proof_text: String,
}

/// Something a sweep can run a search on.
pub trait Problem: Sync {
    fn id(&self) -> String;
    fn attempt(&self, config: &SearchConfig) -> Attempt;
}

/// One theorem of a Metamath database.
pub struct MetamathProblem<'d> {
    pub db: &'d Database,
    pub theorem: String,
    pub evaluation: Evaluation,
}

impl Problem for MetamathProblem<'_> {
    fn id(&self) -> String {
        self.theorem.clone()
    }

    fn attempt(&self, config: &SearchConfig) -> Attempt {
        let Some(env) = MmEnvironment::new(self.db, &self.theorem) else {
            return Attempt {
                error: Some(format!("no theorem labeled `{}`", self.theorem)),
                ..Attempt::default()
            };
        };
        let env = env.with_evaluation(self.evaluation);
        let result = run_search(&env, env.root_goal(), config);
        let mut attempt = Attempt {
            passes_used: result.passes_used,
            nodes_created: result.nodes_created,
            ..Attempt::default()
        };
        if !result.proved() {
            return attempt;
        }
        let checked = extract_proof(&env, result.proof.as_ref())
            .map_err(|e| e.to_string())
            .and_then(|labels| {
                verify_proof(self.db, &self.theorem, &labels)
                    .map(|()| labels)
                    .map_err(|e| e.to_string())
            });
        match checked {
            Ok(labels) => {
                attempt.proved = true;
                attempt.proof_length = Some(labels.len());
                attempt.proof_text = labels.join(" ");
            }
            Err(e) => attempt.error = Some(format!("proof rejected: {e}")),
        }
        attempt
    }
}

/// A synthetic tree, regenerated from its spec inside the job.
pub struct SyntheticProblem {
    pub index: usize,
    pub spec: SyntheticSpec,
}

impl Problem for SyntheticProblem {
    fn id(&self) -> String {
        format!("syn-{}", self.index)
    }

    fn attempt(&self, config: &SearchConfig) -> Attempt {
        let tree = generate(&self.spec);
        let env = SyntheticEnv::new(&tree);
        let result = run_search(&env, env.root_goal(), config);
        let mut attempt = Attempt {
            passes_used: result.passes_used,
            nodes_created: result.nodes_created,
            ..Attempt::default()
        };
        if let (true, Some(proof)) = (result.proved(), &result.proof) {
            match check_proof(&tree, proof) {
                Ok(()) => {
                    attempt.proved = true;
                    attempt.proof_length = Some(proof.steps());
                    attempt.proof_text = format!("{proof:?}");
                }
                Err(e) => attempt.error = Some(format!("proof rejected: {e}")),
            }
        }
        attempt
    }
}

/// A pass budget paired with an optional wall-clock limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub passes: u64,
    pub time_limit: Option<Duration>,
}

/// Every algorithm under every budget, other settings taken from `base`.
pub fn config_grid(base: &SearchConfig, algorithms: &[Algorithm], budgets: &[Budget]) -> Vec<SearchConfig> {
    let mut configs = Vec::with_capacity(algorithms.len() * budgets.len());
    for &algorithm in algorithms {
        for budget in budgets {
            configs.push(SearchConfig {
                algorithm,
                max_passes: budget.passes,
                time_limit: budget.time_limit,
                ..base.clone()
            });
        }
    }
    configs
}

fn run_job<P: Problem + ?Sized>(problem: &P, config: &SearchConfig) -> BenchRow {
    let started = Instant::now();
    let attempt = panic::catch_unwind(AssertUnwindSafe(|| problem.attempt(config))).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".to_string());
        Attempt {
            error: Some(format!("panicked: {message}")),
            ..Attempt::default()
        }
    });
    BenchRow {
        theorem: problem.id(),
        algorithm: config.algorithm,
        max_passes: config.max_passes,
        time_limit_ms: config.time_limit.map(|d| d.as_millis() as u64),
        proved: attempt.proved,
        passes_used: attempt.passes_used,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        nodes_created: attempt.nodes_created,
        proof_length: attempt.proof_length,
        error: attempt.error,
    }
}

/// Runs every configuration on every problem using `parallelism` threads.
/// Rows come back configuration-major, in input order, whatever the
/// parallelism.
pub fn sweep<P: Problem>(problems: &[P], configs: &[SearchConfig], parallelism: usize) -> Vec<BenchRow> {
    assert!(parallelism >= 1, "parallelism must be at least 1");
    let jobs: Vec<(&SearchConfig, &P)> = configs.iter().flat_map(|c| problems.iter().map(move |p| (c, p))).collect();
    if parallelism == 1 {
        return jobs.into_iter().map(|(c, p)| run_job(p, c)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .expect("thread pool");
    pool.install(|| jobs.into_par_iter().map(|(c, p)| run_job(p, c)).collect())
}

/// Proof count for one (algorithm, budget) cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub max_passes: u64,
    pub time_limit_ms: Option<u64>,
    pub proved: usize,
    pub total: usize,
}

/// Groups rows by (algorithm, max_passes, time_limit_ms), in order of first
/// appearance.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut out: Vec<SummaryRow> = Vec::new();
    for row in rows {
        let cell = out.iter_mut().find(|s| {
            s.algorithm == row.algorithm && s.max_passes == row.max_passes && s.time_limit_ms == row.time_limit_ms
        });
        let cell = match cell {
            Some(cell) => cell,
            None => {
                out.push(SummaryRow {
                    algorithm: row.algorithm,
                    max_passes: row.max_passes,
                    time_limit_ms: row.time_limit_ms,
                    proved: 0,
                    total: 0,
                });
                out.last_mut().expect("just pushed")
            }
        };
        cell.total += 1;
        cell.proved += usize::from(row.proved);
    }
    out
}

pub fn write_jsonl<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(text: &str) -> serde_json::Result<Vec<BenchRow>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in summary {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamath::{parse, TOY_DATABASE};
    use crate::synthetic::random_suite;

    fn synthetic(count: usize) -> Vec<SyntheticProblem> {
        random_suite(count, 7, 4, 3, 0.0)
            .into_iter()
            .enumerate()
            .map(|(index, spec)| SyntheticProblem { index, spec })
            .collect()
    }

    fn budgets(passes: &[u64]) -> Vec<Budget> {
        passes.iter().map(|&p| Budget { passes: p, time_limit: None }).collect()
    }

    #[test]
    fn grid_cardinality() {
        let configs = config_grid(
            &SearchConfig::default(),
            &[Algorithm::ProductPropagation, Algorithm::Puct],
            &budgets(&[5, 50]),
        );
        let rows = sweep(&synthetic(10), &configs, 2);
        assert_eq!(rows.len(), 40);
        assert_eq!(rows[0].algorithm, Algorithm::ProductPropagation);
        assert_eq!(rows[0].max_passes, 5);
        assert_eq!(rows[0].theorem, "syn-0");
        assert_eq!(rows[39].algorithm, Algorithm::Puct);
        assert_eq!(rows[39].theorem, "syn-9");
    }

    #[test]
    fn empty_problem_list() {
        let configs = config_grid(&SearchConfig::default(), &[Algorithm::Holophrasm], &budgets(&[10]));
        let rows = sweep::<SyntheticProblem>(&[], &configs, 4);
        assert!(rows.is_empty());
        assert!(summarize(&rows).is_empty());
    }

    struct Exploding;

    impl Problem for Exploding {
        fn id(&self) -> String {
            "boom".into()
        }
        fn attempt(&self, _: &SearchConfig) -> Attempt {
            panic!("kaboom")
        }
    }

    #[test]
    fn panics_become_failed_rows() {
        let rows = sweep(&[Exploding, Exploding], &[SearchConfig::default()], 2);
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert!(!row.proved);
            assert!(row.error.as_deref().unwrap().contains("kaboom"));
        }
    }

    #[test]
    fn metamath_rows_are_checked() {
        let db = parse(TOY_DATABASE).unwrap();
        let problems: Vec<MetamathProblem> = ["a1i", "id", "nonexistent"]
            .into_iter()
            .map(|t| MetamathProblem {
                db: &db,
                theorem: t.into(),
                evaluation: Evaluation::TruthTable(0.3),
            })
            .collect();
        let base = SearchConfig { beam: 16, ..SearchConfig::default() };
        let configs = config_grid(&base, &[Algorithm::ProductPropagation], &budgets(&[200]));
        let rows = sweep(&problems, &configs, 1);
        assert!(rows[0].proved && rows[1].proved);
        assert!(rows[0].proof_length.unwrap() > 0);
        assert!(!rows[2].proved);
        assert!(rows[2].error.as_deref().unwrap().contains("nonexistent"));
    }

    #[test]
    fn summary_and_serialization() {
        let configs = config_grid(&SearchConfig::default(), &[Algorithm::Holophrasm], &budgets(&[3, 30]));
        let rows = sweep(&synthetic(6), &configs, 1);
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary.iter().map(|s| s.total).sum::<usize>(), 12);
        let expected: usize = rows.iter().filter(|r| r.max_passes == 30 && r.proved).count();
        assert_eq!(summary[1].proved, expected);

        let mut jsonl = Vec::new();
        write_jsonl(&rows, &mut jsonl).unwrap();
        assert_eq!(read_jsonl(std::str::from_utf8(&jsonl).unwrap()).unwrap(), rows);

        let mut csv = Vec::new();
        write_summary_csv(&summary, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("algorithm,max_passes,time_limit_ms,proved,total"));
        assert_eq!(lines.next(), Some(format!("holophrasm,3,,{},6", summary[0].proved).as_str()));
    }
}
