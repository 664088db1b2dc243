use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use treecv::{Loss, Strategy};
use treecv_cli::learner::{self, parse_loss, LearnerKind, LearnerSpec};
use treecv_cli::plan::{self, DataSource, ExperimentPlan, KChoice, Preprocess, SynthSpec};
use treecv_cli::records::{read_records, JsonSink, RecordSink};
use treecv_cli::stability::StabilityPlan;
use treecv_cli::{bench, report, run, stability, Invalid};

#[derive(Parser)]
#[command(name = "treecv", version, about = "Tree-structured k-fold cross-validation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (k, scheduler, ordering, repetition) of a plan; one CSV row per run.
    Run(RunArgs),
    /// Median wall time per (n, k, scheduler, ordering) over a size grid.
    Bench(BenchArgs),
    /// Held-out risk gap between single-pass and chunked training.
    Stability(StabilityArgs),
    /// Aggregate run records into mean ± std per cell.
    Report(ReportArgs),
}

#[derive(Args)]
struct LearnerArgs {
    #[arg(long, default_value = "pegasos")]
    learner: LearnerKind,
    /// PEGASOS regularization.
    #[arg(long, default_value_t = learner::DEFAULT_LAMBDA)]
    lambda: f64,
    /// LSQSGD step size; defaults to 1/sqrt(n).
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of k-means centers.
    #[arg(long, default_value_t = 3)]
    clusters: usize,
}

impl LearnerArgs {
    fn spec(&self) -> LearnerSpec {
        match self.learner {
            LearnerKind::Pegasos => LearnerSpec::Pegasos { lambda: self.lambda },
            LearnerKind::LsqSgd => LearnerSpec::LsqSgd { alpha: self.alpha },
            LearnerKind::KMeans => LearnerSpec::KMeans { clusters: self.clusters },
            LearnerKind::Mean => LearnerSpec::Mean,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Sparse text dataset (`label idx:value ...`).
    #[arg(long, conflicts_with = "synth", required_unless_present = "synth")]
    data: Option<PathBuf>,
    /// Synthetic dataset, e.g. `classification:n=2000,d=20,noise=0.1`.
    #[arg(long)]
    synth: Option<SynthSpec>,
    /// Feature count to enforce when parsing `--data`.
    #[arg(long)]
    dim: Option<usize>,
    /// Class value that becomes +1 (all others -1).
    #[arg(long)]
    binarize: Option<f64>,
    /// Scale features to unit variance.
    #[arg(long)]
    scale: bool,
    /// Min-max scale targets onto [0, 1].
    #[arg(long)]
    unit_targets: bool,
    #[command(flatten)]
    learner: LearnerArgs,
    /// zeroone, squared or quantization; defaults to the learner's loss.
    #[arg(long, value_parser = parse_loss)]
    loss: Option<Loss>,
    /// Fold counts, `n` for leave-one-out.
    #[arg(long, default_value = "5,10", value_delimiter = ',')]
    k: Vec<KChoice>,
    #[arg(long, default_value = "both", value_parser = ["tree", "standard", "both"])]
    scheduler: String,
    #[arg(long, default_value = "fixed", value_parser = ["fixed", "randomized", "both"])]
    ordering: String,
    /// Tree strategy: copy or save-revert.
    #[arg(long, default_value = "copy", value_parser = plan::parse_strategy)]
    strategy: Strategy,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Skip standard-CV runs needing more point updates than this (0 = never skip).
    #[arg(long, default_value_t = plan::DEFAULT_BUDGET)]
    budget: u64,
}

impl PlanArgs {
    fn plan(&self) -> ExperimentPlan {
        let source = match (&self.data, self.synth) {
            (Some(path), _) => DataSource::File(path.clone()),
            (None, Some(spec)) => DataSource::Synth(spec),
            (None, None) => unreachable!("clap requires one source"),
        };
        let learner = self.learner.spec();
        let mut plan = ExperimentPlan::new(source, learner);
        plan.dim = self.dim;
        plan.preprocess = Preprocess {
            binarize: self.binarize,
            scale: self.scale,
            unit_targets: self.unit_targets,
        };
        plan.loss = self.loss.unwrap_or(learner.default_loss());
        plan.ks = self.k.clone();
        plan.schedulers = plan::parse_schedulers(&self.scheduler).expect("checked by clap");
        plan.orderings = plan::parse_orderings(&self.ordering).expect("checked by clap");
        plan.strategy = self.strategy;
        plan.reps = self.reps;
        plan.seed = self.seed;
        plan.threads = self.threads;
        plan.standard_budget = (self.budget > 0).then_some(self.budget);
        plan
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// Record the recursion trace in the JSON output.
    #[arg(long, requires = "json")]
    trace: bool,
    /// Check each tree run against replayed standard CV.
    #[arg(long)]
    verify: bool,
    /// CSV destination, appended to if it exists; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON Lines report per successful run.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// Ascending dataset sizes, e.g. `500,1000,2000`.
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, default_value = stability::DEFAULT_SYNTH)]
    synth: SynthSpec,
    /// Training set sizes.
    #[arg(long = "n", value_delimiter = ',', default_value = stability::DEFAULT_NS)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = stability::DEFAULT_SEEDS)]
    seeds: usize,
    /// Chunks fed sequentially to the chunked model.
    #[arg(long, default_value_t = stability::DEFAULT_CHUNKS)]
    chunks: usize,
    /// Held-out points per seed.
    #[arg(long, default_value_t = stability::DEFAULT_TEST_SIZE)]
    test_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Record CSV written by `run`.
    input: PathBuf,
    /// Aggregate CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the text tables here instead of stdout.
    #[arg(long)]
    text: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<Invalid>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Run(args) => {
            let mut plan = args.plan.plan();
            plan.trace = args.trace;
            plan.verify = args.verify;
            plan.validate()?;
            let data = plan.load()?;
            let mut sink = RecordSink::open(args.out.as_deref())?;
            let mut json = args.json.as_deref().map(JsonSink::create).transpose()?;
            let summary = run::cmd_run(&plan, &data, &mut sink, json.as_mut())?;
            eprintln!(
                "{} runs: {} failed, {} over budget, {} verification failures",
                summary.rows, summary.errors, summary.skipped, summary.verify_failures
            );
            Ok(if summary.errors + summary.verify_failures > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Bench(args) => {
            let mut plan = args.plan.plan();
            plan.n_grid = args.n_grid;
            plan.validate()?;
            let data = plan.load()?;
            let rows = bench::cmd_bench(&plan, &data)?;
            bench::write_csv(&rows, output(args.out.as_deref())?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability(args) => {
            let plan = StabilityPlan {
                learner: args.learner.spec(),
                synth: args.synth,
                ns: args.ns,
                seeds: args.seeds,
                chunks: args.chunks,
                test_size: args.test_size,
                seed: args.seed,
            };
            let rows = stability::cmd_stability(&plan)?;
            stability::write_csv(&rows, output(args.out.as_deref())?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report(args) => {
            let records = read_records(&args.input)?;
            let cells = report::cmd_report(&records)?;
            if let Some(out) = &args.out {
                report::write_csv(&cells, output(Some(out))?)?;
            }
            let mut text = output(args.text.as_deref())?;
            text.write_all(report::render_tables(&cells).as_bytes())?;
            text.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
