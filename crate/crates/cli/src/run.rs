//! Executes the runs of a plan.

use treecv::{
    brute_force_oracle, standard_cv_with_threads, tree_cv, tree_feed_order, CvReport, Dataset,
    FeedOrder, Parallelism, Partition, Scheduler, Strategy, TreeCvConfig,
};

use crate::learner::loss_flag;
use crate::plan::{rep_dataset, rep_seed, ExperimentPlan};
use crate::records::{JsonSink, RecordSink, ReportJson, RunRecord, STATUS_BUDGET, STATUS_ERROR, STATUS_OK};

/// Coordinates of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    pub n: usize,
    pub k: usize,
    pub scheduler: Scheduler,
    pub ordering: FeedOrder,
    pub repetition: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Done { report: CvReport<f64>, verified: Option<bool> },
    BudgetExceeded { needed: u64 },
    Failed(String),
}

/// Point updates standard CV spends on `n` points in `k` folds.
pub fn standard_updates(n: usize, k: usize) -> u64 {
    (n as u64) * (k as u64 - 1)
}

/// Runs one cross-validation on `data` (already shuffled for the repetition).
pub fn execute(plan: &ExperimentPlan, data: &Dataset<f64>, spec: &RunSpec) -> RunOutcome {
    let partition = match Partition::new(data.len(), spec.k) {
        Ok(p) => p,
        Err(err) => return RunOutcome::Failed(err.to_string()),
    };
    let proto = match plan.learner.build(data.dim(), data.len()) {
        Ok(l) => l,
        Err(err) => return RunOutcome::Failed(err.to_string()),
    };
    let factory = || proto.clone();
    let result = match spec.scheduler {
        Scheduler::Tree => {
            let config = TreeCvConfig {
                strategy: plan.strategy,
                ordering: spec.ordering,
                parallel: if plan.threads > 1 {
                    Parallelism::ForkJoin { max_workers: plan.threads }
                } else {
                    Parallelism::Sequential
                },
                seed: spec.seed,
                trace: plan.trace,
            };
            tree_cv(factory, data, &partition, plan.loss, &config)
        }
        Scheduler::Standard => {
            let needed = standard_updates(data.len(), spec.k);
            if plan.standard_budget.is_some_and(|budget| needed > budget) {
                return RunOutcome::BudgetExceeded { needed };
            }
            standard_cv_with_threads(factory, data, &partition, plan.loss, spec.ordering, spec.seed, plan.threads)
        }
    };
    let report = match result {
        Ok(r) => r,
        Err(err) => return RunOutcome::Failed(err.to_string()),
    };
    let verified = (plan.verify && spec.scheduler == Scheduler::Tree).then(|| {
        let orders: Vec<_> = (0..spec.k)
            .map(|fold| tree_feed_order(&partition, fold, spec.ordering, spec.seed))
            .collect();
        brute_force_oracle(factory, data, &partition, plan.loss, &orders, spec.seed)
            .map(|oracle| bits(&oracle.per_fold_scores) == bits(&report.per_fold_scores))
            .unwrap_or(false)
    });
    RunOutcome::Done { report, verified }
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

/// Row skeleton carrying the plan coordinates of a run.
pub fn base_record(plan: &ExperimentPlan, d: usize, spec: &RunSpec) -> RunRecord {
    RunRecord {
        row_id: 0,
        status: String::new(),
        source: plan.source.to_string(),
        learner: plan.learner.name().into(),
        params: plan.learner.params(),
        loss: loss_flag(plan.loss).into(),
        n: spec.n,
        d,
        k: spec.k,
        scheduler: spec.scheduler.to_string(),
        ordering: spec.ordering.to_string(),
        strategy: match (spec.scheduler, plan.strategy) {
            (Scheduler::Standard, _) => "-".into(),
            (_, Strategy::Copy) => "copy".into(),
            (_, Strategy::SaveRevert) => "save-revert".into(),
        },
        threads: plan.threads,
        repetition: spec.repetition,
        seed: spec.seed,
        estimate: None,
        per_fold_scores: String::new(),
        point_updates: None,
        snapshots: None,
        nodes_visited: None,
        model_transfers: None,
        evaluations: None,
        verified: String::new(),
        wall_time_secs: None,
        message: String::new(),
    }
}

pub fn record_outcome(record: &mut RunRecord, outcome: &RunOutcome) {
    match outcome {
        RunOutcome::Done { report, verified } => {
            record.status = STATUS_OK.into();
            record.fill_report(report);
            record.verified = match verified {
                Some(true) => "pass".into(),
                Some(false) => "fail".into(),
                None => String::new(),
            };
        }
        RunOutcome::BudgetExceeded { needed } => {
            record.status = STATUS_BUDGET.into();
            record.message = format!("needs {needed} point updates");
        }
        RunOutcome::Failed(msg) => {
            record.status = STATUS_ERROR.into();
            record.message = msg.clone();
        }
    }
}

/// Run coordinates in canonical order: k, scheduler, ordering, repetition.
pub fn run_specs(plan: &ExperimentPlan, n: usize) -> Vec<RunSpec> {
    let mut specs = Vec::new();
    for &k in &plan.ks {
        for &scheduler in &plan.schedulers {
            for &ordering in &plan.orderings {
                for repetition in 0..plan.reps {
                    specs.push(RunSpec {
                        n,
                        k: k.resolve(n),
                        scheduler,
                        ordering,
                        repetition,
                        seed: rep_seed(plan.seed, repetition),
                    });
                }
            }
        }
    }
    specs
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub rows: usize,
    pub errors: usize,
    pub skipped: usize,
    pub verify_failures: usize,
}

/// Executes every run of the plan, writing one row per run as it finishes.
pub fn cmd_run(
    plan: &ExperimentPlan,
    data: &Dataset<f64>,
    sink: &mut RecordSink,
    mut json: Option<&mut JsonSink>,
) -> anyhow::Result<RunSummary> {
    let reps: Vec<Dataset<f64>> = (0..plan.reps).map(|r| rep_dataset(data, plan.seed, r)).collect();
    let mut summary = RunSummary::default();
    for spec in run_specs(plan, data.len()) {
        let outcome = execute(plan, &reps[spec.repetition], &spec);
        let mut record = base_record(plan, data.dim(), &spec);
        record_outcome(&mut record, &outcome);
        sink.write(&mut record)?;
        summary.rows += 1;
        match &outcome {
            RunOutcome::Done { report, verified } => {
                if *verified == Some(false) {
                    summary.verify_failures += 1;
                }
                if let Some(json) = json.as_deref_mut() {
                    json.write(&ReportJson::new(record.row_id, report))?;
                }
            }
            RunOutcome::BudgetExceeded { .. } => summary.skipped += 1,
            RunOutcome::Failed(_) => summary.errors += 1,
        }
    }
    Ok(summary)
}
