//! Wall-time sweeps over dataset sizes.

use serde::Serialize;
use treecv::{FeedOrder, Scheduler};

use crate::plan::{rep_dataset, ExperimentPlan};
use crate::run::{execute, run_specs, RunOutcome};

/// Median timing of one (n, k, scheduler, ordering) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub scheduler: String,
    pub ordering: String,
    pub reps: usize,
    pub status: String,
    pub median_wall_secs: Option<f64>,
    pub point_updates: Option<u64>,
    /// Standard median over tree median; on tree rows.
    pub speedup: Option<f64>,
    /// Randomized median over fixed median; on randomized rows.
    pub randomized_ratio: Option<f64>,
    pub message: String,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Times every plan cell at every grid size, `plan.reps` times each.
/// An empty grid benchmarks the whole dataset.
pub fn cmd_bench(plan: &ExperimentPlan, data: &treecv::Dataset<f64>) -> anyhow::Result<Vec<BenchRow>> {
    let grid = if plan.n_grid.is_empty() {
        vec![data.len()]
    } else {
        plan.n_grid.clone()
    };
    let mut rows = Vec::new();
    for &n in &grid {
        let sliced = data.head(n);
        let reps: Vec<_> = (0..plan.reps).map(|r| rep_dataset(&sliced, plan.seed, r)).collect();
        let specs = run_specs(plan, n);
        for cell in specs.chunks(plan.reps) {
            let first = cell[0];
            let mut times = Vec::new();
            let mut updates = None;
            let mut status = "ok".to_string();
            let mut message = String::new();
            for spec in cell {
                match execute(plan, &reps[spec.repetition], spec) {
                    RunOutcome::Done { report, .. } => {
                        times.push(report.wall_time.as_secs_f64());
                        updates = Some(report.counters.point_updates);
                    }
                    RunOutcome::BudgetExceeded { needed } => {
                        status = "budget-exceeded".into();
                        message = format!("needs {needed} point updates");
                        break;
                    }
                    RunOutcome::Failed(msg) => {
                        status = "error".into();
                        message = msg;
                        break;
                    }
                }
            }
            let ok = status == "ok";
            rows.push(BenchRow {
                n,
                k: first.k,
                scheduler: first.scheduler.to_string(),
                ordering: first.ordering.to_string(),
                reps: plan.reps,
                status,
                median_wall_secs: if ok { median(&mut times) } else { None },
                point_updates: if ok { updates } else { None },
                speedup: None,
                randomized_ratio: None,
                message,
            });
        }
    }
    fill_ratios(&mut rows);
    Ok(rows)
}

fn fill_ratios(rows: &mut [BenchRow]) {
    let lookup = |rows: &[BenchRow], n: usize, k: usize, s: Scheduler, o: FeedOrder| {
        rows.iter()
            .find(|r| r.n == n && r.k == k && r.scheduler == s.to_string() && r.ordering == o.to_string())
            .and_then(|r| r.median_wall_secs)
    };
    for i in 0..rows.len() {
        let (n, k) = (rows[i].n, rows[i].k);
        let Some(own) = rows[i].median_wall_secs else { continue };
        if rows[i].scheduler == Scheduler::Tree.to_string() {
            let ordering = if rows[i].ordering == FeedOrder::Fixed.to_string() {
                FeedOrder::Fixed
            } else {
                FeedOrder::Randomized
            };
            rows[i].speedup = lookup(rows, n, k, Scheduler::Standard, ordering).map(|s| s / own);
        }
        if rows[i].ordering == FeedOrder::Randomized.to_string() {
            let scheduler = if rows[i].scheduler == Scheduler::Tree.to_string() {
                Scheduler::Tree
            } else {
                Scheduler::Standard
            };
            rows[i].randomized_ratio = lookup(rows, n, k, scheduler, FeedOrder::Fixed).map(|f| own / f);
        }
    }
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
