use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use andor_core::harness::{
    config_grid, summarize, sweep, write_jsonl, write_summary_csv, BenchRow, Budget, MetamathProblem, Problem,
    SyntheticProblem,
};
use andor_core::metamath::{self, verify_proof, Database, Evaluation, TOY_DATABASE};
use andor_core::synthetic::{format_suite, parse_suite, random_suite};
use andor_core::{Algorithm, SearchConfig};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "andor-prover", version, about = "AND/OR tree proof search over Metamath and synthetic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a proof of one theorem and write it out.
    Prove(ProveArgs),
    /// Sweep algorithms and budgets over a theorem list or a synthetic suite.
    Bench(BenchArgs),
    /// Write a random synthetic suite.
    Gen(GenArgs),
    /// Check a proof file against a theorem.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DbArgs {
    /// Metamath database; the bundled propositional toy database if omitted.
    #[arg(long)]
    db: Option<PathBuf>,
}

impl DbArgs {
    fn load(&self) -> Result<Database> {
        match &self.db {
            Some(path) => Ok(metamath::load(path)?),
            None => Ok(metamath::parse(TOY_DATABASE).expect("bundled database parses")),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalKind {
    Constant,
    Length,
    TruthTable,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1000)]
    passes: u64,
    /// Wall-clock limit such as `60s` or `2m`; `none` disables it.
    #[arg(long, default_value = "60s", value_parser = parse_limit)]
    time_limit: Limit,
    #[arg(long, default_value_t = 16)]
    beam: usize,
    /// PUCT exploration constant.
    #[arg(long, default_value_t = 0.2)]
    c: f64,
    /// Modified-bandit prior weight.
    #[arg(long, default_value_t = 0.8)]
    a: f64,
    /// Modified-bandit exploration weight.
    #[arg(long, default_value_t = 0.5)]
    b: f64,
    /// Minimax breadth.
    #[arg(long, default_value_t = 16)]
    breadth: usize,
    /// Minimax depth.
    #[arg(long, default_value_t = 4)]
    depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Never declare exhausted goals unprovable.
    #[arg(long)]
    no_dead_marking: bool,
    /// Proof number search descends by lowest disproof number at OR nodes.
    #[arg(long, alias = "pns-paper-selection")]
    pns_disproof_selection: bool,
    /// Goal evaluation used as the payout estimate.
    #[arg(long, value_enum, default_value = "truth-table")]
    eval: EvalKind,
    /// Decay per symbol for the length-based evaluations.
    #[arg(long, default_value_t = 0.3)]
    rate: f64,
}

type Limit = Option<Duration>;

fn parse_limit(text: &str) -> Result<Limit, String> {
    if text == "none" {
        return Ok(None);
    }
    humantime::parse_duration(text).map(Some).map_err(|e| e.to_string())
}

impl SearchArgs {
    fn config(&self, algorithm: Algorithm) -> Result<SearchConfig> {
        let config = SearchConfig {
            algorithm,
            max_passes: self.passes,
            time_limit: self.time_limit,
            beam: self.beam,
            c_puct: self.c,
            a: self.a,
            b: self.b,
            minimax_depth: self.depth,
            minimax_breadth: self.breadth,
            pns_disproof_selection: self.pns_disproof_selection,
            dead_marking: !self.no_dead_marking,
            seed: self.seed,
            ..SearchConfig::default()
        };
        config.validate()?;
        Ok(config)
    }

    fn evaluation(&self) -> Evaluation {
        match self.eval {
            EvalKind::Constant => Evaluation::Constant(0.5),
            EvalKind::Length => Evaluation::Length(self.rate),
            EvalKind::TruthTable => Evaluation::TruthTable(self.rate),
        }
    }
}

#[derive(Args)]
struct ProveArgs {
    #[command(flatten)]
    db: DbArgs,
    #[arg(long)]
    theorem: String,
    #[arg(long, default_value = "pp")]
    algo: Algorithm,
    #[command(flatten)]
    search: SearchArgs,
    /// Proof file; `<theorem>.proof` if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    db: DbArgs,
    /// Synthetic suite to run instead of a database.
    #[arg(long, conflicts_with_all = ["db", "theorem"])]
    suite: Option<PathBuf>,
    /// Theorems to run (repeatable); every theorem of the database if omitted.
    #[arg(long)]
    theorem: Vec<String>,
    /// Algorithms, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "pp")]
    algo: Vec<Algorithm>,
    /// Pass budgets, comma separated; each is paired with --time-limit.
    #[arg(long = "budgets", value_delimiter = ',')]
    budgets: Vec<u64>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// JSON-lines rows; the CSV summary goes next to it with a `.csv`
    /// extension. Without it only the summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    depth: u32,
    #[arg(long, default_value_t = 3)]
    branching: u32,
    /// Payout oracle noise in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    db: DbArgs,
    #[arg(long)]
    theorem: String,
    /// Whitespace-separated labels.
    #[arg(long)]
    proof: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ANDOR_PROVER_LOG")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Prove(args) => prove(args),
        Command::Bench(args) => bench(args),
        Command::Gen(args) => gen(args),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn prove(args: ProveArgs) -> Result<()> {
    let db = args.db.load()?;
    let config = args.search.config(args.algo)?;
    let problem = MetamathProblem {
        db: &db,
        theorem: args.theorem.clone(),
        evaluation: args.search.evaluation(),
    };
    let attempt = problem.attempt(&config);
    if let Some(e) = attempt.error {
        bail!("{e}");
    }
    println!(
        "{}: {} after {} passes, {} nodes",
        args.theorem,
        if attempt.proved { "proved" } else { "not proved" },
        attempt.passes_used,
        attempt.nodes_created
    );
    if !attempt.proved {
        bail!("no proof of {} within the budget", args.theorem);
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{}.proof", args.theorem)));
    fs::write(&out, format!("{}\n", attempt.proof_text)).with_context(|| format!("cannot write {}", out.display()))?;
    println!("Accept; proof written to {}", out.display());
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let budgets: Vec<Budget> = if args.budgets.is_empty() { vec![args.search.passes] } else { args.budgets.clone() }
        .into_iter()
        .map(|passes| Budget {
            passes,
            time_limit: args.search.time_limit,
        })
        .collect();
    let base = args.search.config(Algorithm::ProductPropagation)?;
    let configs = config_grid(&base, &args.algo, &budgets);
    if args.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let rows = match &args.suite {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let specs = parse_suite(&text).map_err(|(line, e)| anyhow::anyhow!("{}:{line}: {e}", path.display()))?;
            let problems: Vec<SyntheticProblem> =
                specs.into_iter().enumerate().map(|(index, spec)| SyntheticProblem { index, spec }).collect();
            sweep(&problems, &configs, args.jobs)
        }
        None => {
            let db = args.db.load()?;
            let theorems: Vec<String> = if args.theorem.is_empty() {
                db.theorems().map(|t| t.label.clone()).collect()
            } else {
                args.theorem.clone()
            };
            let problems: Vec<MetamathProblem> = theorems
                .into_iter()
                .map(|theorem| MetamathProblem {
                    db: &db,
                    theorem,
                    evaluation: args.search.evaluation(),
                })
                .collect();
            sweep(&problems, &configs, args.jobs)
        }
    };
    report_failures(&rows);
    let summary = summarize(&rows);
    if let Some(out) = &args.out {
        let file = fs::File::create(out).with_context(|| format!("cannot write {}", out.display()))?;
        write_jsonl(&rows, io::BufWriter::new(file))?;
        let csv_path = out.with_extension("csv");
        let file = fs::File::create(&csv_path).with_context(|| format!("cannot write {}", csv_path.display()))?;
        write_summary_csv(&summary, file)?;
        log::info!("wrote {} rows to {} and {}", rows.len(), out.display(), csv_path.display());
    }
    write_summary_csv(&summary, io::stdout().lock())?;
    Ok(())
}

fn report_failures(rows: &[BenchRow]) {
    for row in rows {
        if let Some(e) = &row.error {
            log::warn!("{} with {}: {e}", row.theorem, row.algorithm);
        }
    }
}

fn gen(args: GenArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.noise) {
        bail!("--noise must lie in [0, 1]");
    }
    let suite = random_suite(args.count, args.seed, args.depth, args.branching, args.noise);
    let text = format_suite(&suite);
    match &args.out {
        Some(path) => write_file(path, &text),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn verify(args: VerifyArgs) -> Result<()> {
    let db = args.db.load()?;
    let text = fs::read_to_string(&args.proof).with_context(|| format!("cannot read {}", args.proof.display()))?;
    let labels: Vec<&str> = text.split_whitespace().collect();
    match verify_proof(&db, &args.theorem, &labels) {
        Ok(()) => {
            println!("Accept");
            Ok(())
        }
        Err(reason) => bail!("Reject: {reason}"),
    }
}
