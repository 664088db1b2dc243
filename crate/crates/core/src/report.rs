use std::fmt;
use std::ops::AddAssign;
use std::time::Duration;

use crate::scalar::{KahanSum, Scalar};

/// Counted work performed during a cross-validation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounters {
    /// Single-point model updates.
    pub point_updates: u64,
    /// Model copies or snapshot/restore pairs.
    pub snapshots: u64,
    /// Recursion-tree nodes visited.
    pub nodes_visited: u64,
    /// Chunk-level update dispatches: a model sent to the holder of one chunk
    /// and back. Mirrors the communication cost of a distributed run.
    pub model_transfers: u64,
    /// Per-point loss evaluations.
    pub evaluations: u64,
}

impl AddAssign for WorkCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.point_updates += rhs.point_updates;
        self.snapshots += rhs.snapshots;
        self.nodes_visited += rhs.nodes_visited;
        self.model_transfers += rhs.model_transfers;
        self.evaluations += rhs.evaluations;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheduler {
    Tree,
    Standard,
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheduler::Tree => "tree",
            Scheduler::Standard => "standard",
        })
    }
}

/// How training points are presented to the learner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeedOrder {
    /// Dataset order, chunk by chunk.
    Fixed,
    /// Fresh seeded permutation of each training phase.
    Randomized,
}

impl fmt::Display for FeedOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeedOrder::Fixed => "fixed",
            FeedOrder::Randomized => "randomized",
        })
    }
}

/// One recursion node as visited by the tree scheduler.
///
/// Ranges are 0-based inclusive chunk indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTrace {
    pub start: usize,
    pub end: usize,
    /// `None` at leaves.
    pub midpoint: Option<usize>,
    /// Points fed to build the left child's model (chunks `m+1..=e`).
    pub points_fed_left: usize,
    /// Points fed to build the right child's model (chunks `s..=m`).
    pub points_fed_right: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport<T> {
    /// Chunk-mean loss of each fold, indexed by chunk.
    pub per_fold_scores: Vec<T>,
    /// `(1/k) * sum(per_fold_scores)`.
    pub estimate: T,
    pub counters: WorkCounters,
    pub wall_time: Duration,
    pub scheduler: Scheduler,
    pub ordering: FeedOrder,
    pub seed: u64,
    /// Pre-order node list; empty unless tracing was requested.
    pub trace: Vec<NodeTrace>,
}

impl<T: Scalar> CvReport<T> {
    /// Equality on everything except wall time.
    pub fn same_result(&self, other: &Self) -> bool {
        let bits = |v: &[T]| -> Vec<u64> { v.iter().map(|x| x.to_f64().unwrap().to_bits()).collect() };
        bits(&self.per_fold_scores) == bits(&other.per_fold_scores)
            && self.estimate.to_f64().map(f64::to_bits) == other.estimate.to_f64().map(f64::to_bits)
            && self.counters == other.counters
            && self.scheduler == other.scheduler
            && self.ordering == other.ordering
            && self.seed == other.seed
            && self.trace == other.trace
    }
}

/// Equal-weight fold average with compensated summation.
pub(crate) fn fold_average<T: Scalar>(scores: &[T]) -> T {
    let total: KahanSum<T> = scores.iter().copied().collect();
    total.total() / T::of_count(scores.len() as u64)
}
