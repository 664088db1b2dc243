//! Tree-structured k-fold cross-validation.
//!
//! The scheduler recurses over ranges of held-out chunks `[s, e]`. A node
//! receives a model trained on every chunk outside its range, splits the
//! range at `m = (s + e) / 2`, and builds the two child models from the
//! incoming one: the left child (holding out `s..=m`) is fed `m+1..=e`, the
//! right child (holding out `m+1..=e`) is fed `s..=m`. Leaves evaluate their
//! model on the single held-out chunk. Each chunk is therefore fed once per
//! level, so a run costs `O(n log k)` point updates instead of `O(n k)`.
//!
//! Left is always processed before right, and every child owns a random
//! stream derived from `(seed, s, e)`, so fork-join runs reproduce the
//! sequential result bit for bit.

use std::ops::RangeInclusive;
use std::time::Instant;

use crate::data::{DataPoint, Dataset};
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::{evaluate_chunk, Loss};
use crate::partition::Partition;
use crate::report::{fold_average, CvReport, FeedOrder, NodeTrace, Scheduler, WorkCounters};
use crate::rng::CounterRng;
use crate::scalar::Scalar;

const TREE_TAG: u64 = 0x7472_6565; // "tree"
pub(crate) const LEARNER_STREAM: u64 = 1;
pub(crate) const FEED_STREAM: u64 = 2;

/// How a node keeps its incoming model while building the first child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Clone the model; the clone becomes the left child.
    #[default]
    Copy,
    /// Snapshot before the left subtree, restore before the right one.
    SaveRevert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    /// Run sibling subtrees concurrently on at most `max_workers` threads.
    ForkJoin { max_workers: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCvConfig {
    pub strategy: Strategy,
    pub ordering: FeedOrder,
    pub parallel: Parallelism,
    pub seed: u64,
    /// Record a [`NodeTrace`] per visited node.
    pub trace: bool,
}

impl Default for TreeCvConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Copy,
            ordering: FeedOrder::Fixed,
            parallel: Parallelism::Sequential,
            seed: 0,
            trace: false,
        }
    }
}

impl TreeCvConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Random stream owned by the node that holds out chunks `s..=e`.
pub(crate) fn node_stream(seed: u64, s: usize, e: usize) -> CounterRng {
    CounterRng::new(seed).derive(&[TREE_TAG, s as u64, e as u64])
}

/// Feeds the points of a contiguous chunk range to `model`.
///
/// Fixed ordering presents them in dataset order; randomized ordering
/// presents one permutation of all of them drawn from `stream`.
pub fn feed<T, L>(
    model: &mut L,
    dataset: &Dataset<T>,
    partition: &Partition,
    chunks: RangeInclusive<usize>,
    ordering: FeedOrder,
    stream: CounterRng,
    counters: &mut WorkCounters,
) -> Result<()>
where
    T: Scalar,
    L: IncrementalLearner<T>,
{
    let n_chunks = chunks.end() + 1 - chunks.start();
    let points = &dataset.points()[partition.span(chunks)];
    if points.is_empty() {
        return Err(CvError::InvalidChunk("nothing to feed".into()));
    }
    feed_points(model, points, ordering, stream)?;
    counters.point_updates += points.len() as u64;
    counters.model_transfers += n_chunks as u64;
    Ok(())
}

pub(crate) fn feed_points<T, L>(
    model: &mut L,
    points: &[DataPoint<T>],
    ordering: FeedOrder,
    mut stream: CounterRng,
) -> Result<()>
where
    T: Scalar,
    L: IncrementalLearner<T>,
{
    match ordering {
        FeedOrder::Fixed => model.update(points),
        FeedOrder::Randomized => {
            let order = stream.permutation(points.len());
            model.update(order.iter().map(|&i| &points[i]))
        }
    }
}

struct Ctx<'a, T> {
    dataset: &'a Dataset<T>,
    partition: &'a Partition,
    loss: Loss,
    config: &'a TreeCvConfig,
    fork_depth: usize,
}

#[derive(Default)]
struct Branch {
    counters: WorkCounters,
    trace: Vec<NodeTrace>,
}

impl Branch {
    fn absorb(&mut self, other: Branch) {
        self.counters += other.counters;
        self.trace.extend(other.trace);
    }
}

impl<T: Scalar> Ctx<'_, T> {
    /// Turns `model` (trained on everything outside the parent range) into the
    /// model for child `[s, e]` by feeding `fed`.
    fn prepare<L: IncrementalLearner<T>>(
        &self,
        model: &mut L,
        child: (usize, usize),
        fed: RangeInclusive<usize>,
        parent: (usize, usize),
        counters: &mut WorkCounters,
    ) -> Result<()> {
        let stream = node_stream(self.config.seed, child.0, child.1);
        model.reseed(stream.split(LEARNER_STREAM));
        feed(
            model,
            self.dataset,
            self.partition,
            fed,
            self.config.ordering,
            stream.split(FEED_STREAM),
            counters,
        )
        .map_err(|err| err.at_node(parent.0, parent.1))
    }

    fn recurse<L: IncrementalLearner<T>>(
        &self,
        s: usize,
        e: usize,
        depth: usize,
        model: &mut L,
        scores: &mut [T],
    ) -> Result<Branch> {
        let mut branch = Branch::default();
        branch.counters.nodes_visited += 1;
        if s == e {
            let chunk = self.partition.chunk_points(self.dataset, s);
            scores[0] = evaluate_chunk(model, chunk, self.loss, &mut branch.counters)
                .map_err(|err| err.at_node(s, e))?;
            if self.config.trace {
                branch.trace.push(NodeTrace {
                    start: s,
                    end: e,
                    midpoint: None,
                    points_fed_left: 0,
                    points_fed_right: 0,
                    depth,
                });
            }
            return Ok(branch);
        }

        let m = (s + e) / 2;
        if self.config.trace {
            branch.trace.push(NodeTrace {
                start: s,
                end: e,
                midpoint: Some(m),
                points_fed_left: self.partition.span(m + 1..=e).len(),
                points_fed_right: self.partition.span(s..=m).len(),
                depth,
            });
        }
        branch.counters.snapshots += 1;
        let (left_scores, right_scores) = scores.split_at_mut(m - s + 1);

        match self.config.strategy {
            Strategy::Copy => {
                let mut left_model = model.clone();
                let right_model = model;
                if depth < self.fork_depth {
                    let (left, right) = rayon::join(
                        || self.child(&mut left_model, (s, m), m + 1..=e, (s, e), depth, left_scores),
                        || self.child(right_model, (m + 1, e), s..=m, (s, e), depth, right_scores),
                    );
                    branch.absorb(left?);
                    branch.absorb(right?);
                } else {
                    branch.absorb(self.child(&mut left_model, (s, m), m + 1..=e, (s, e), depth, left_scores)?);
                    drop(left_model);
                    branch.absorb(self.child(right_model, (m + 1, e), s..=m, (s, e), depth, right_scores)?);
                }
            }
            Strategy::SaveRevert => {
                let saved = model.snapshot();
                branch.absorb(self.child(model, (s, m), m + 1..=e, (s, e), depth, left_scores)?);
                model.restore(&saved).map_err(|err| {
                    CvError::InconsistentState(format!(
                        "restoring the model of range ({s}, {e}) failed: {err}"
                    ))
                })?;
                branch.absorb(self.child(model, (m + 1, e), s..=m, (s, e), depth, right_scores)?);
            }
        }
        Ok(branch)
    }

    fn child<L: IncrementalLearner<T>>(
        &self,
        model: &mut L,
        range: (usize, usize),
        fed: RangeInclusive<usize>,
        parent: (usize, usize),
        parent_depth: usize,
        scores: &mut [T],
    ) -> Result<Branch> {
        let mut counters = WorkCounters::default();
        self.prepare(model, range, fed, parent, &mut counters)?;
        let mut branch = self.recurse(range.0, range.1, parent_depth + 1, model, scores)?;
        branch.counters += counters;
        Ok(branch)
    }
}

/// Computes the k-fold CV estimate with the tree scheduler.
///
/// The learner produced by `learner_factory` is reset with
/// [`IncrementalLearner::fresh`] before use.
pub fn tree_cv<T, L, F>(
    learner_factory: F,
    dataset: &Dataset<T>,
    partition: &Partition,
    loss: Loss,
    config: &TreeCvConfig,
) -> Result<CvReport<T>>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: FnOnce() -> L,
{
    partition.check_matches(dataset)?;
    let k = partition.k();
    let fork_depth = match config.parallel {
        Parallelism::Sequential => 0,
        Parallelism::ForkJoin { max_workers } => {
            if max_workers == 0 {
                return Err(CvError::InvalidConfig("fork-join needs at least one worker".into()));
            }
            if config.strategy == Strategy::SaveRevert {
                return Err(CvError::InvalidConfig(
                    "save-revert shares one model across branches and cannot fork; use the copy strategy"
                        .into(),
                ));
            }
            // a few levels beyond one task per worker keeps the pool busy
            (usize::BITS - max_workers.leading_zeros()) as usize + 3
        }
    };
    let ctx = Ctx {
        dataset,
        partition,
        loss,
        config,
        fork_depth,
    };

    let started = Instant::now();
    let mut model = learner_factory().fresh();
    model.reseed(node_stream(config.seed, 0, k - 1).split(LEARNER_STREAM));
    let mut scores = vec![T::zero(); k];
    let branch = match config.parallel {
        Parallelism::Sequential => ctx.recurse(0, k - 1, 0, &mut model, &mut scores)?,
        Parallelism::ForkJoin { max_workers } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(max_workers)
                .build()
                .map_err(|err| CvError::InvalidConfig(format!("thread pool: {err}")))?;
            pool.install(|| ctx.recurse(0, k - 1, 0, &mut model, &mut scores))?
        }
    };
    let wall_time = started.elapsed();

    Ok(CvReport {
        estimate: fold_average(&scores),
        per_fold_scores: scores,
        counters: branch.counters,
        wall_time,
        scheduler: Scheduler::Tree,
        ordering: config.ordering,
        seed: config.seed,
        trace: branch.trace,
    })
}

/// Leave-one-out CV: [`tree_cv`] with one point per chunk.
pub fn loocv<T, L, F>(
    learner_factory: F,
    dataset: &Dataset<T>,
    loss: Loss,
    config: &TreeCvConfig,
) -> Result<CvReport<T>>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: FnOnce() -> L,
{
    let partition = Partition::new(dataset.len(), dataset.len())?;
    tree_cv(learner_factory, dataset, &partition, loss, config)
}

/// Point indices in the order the tree scheduler feeds them to the model
/// that is finally evaluated on chunk `fold`.
pub fn tree_feed_order(
    partition: &Partition,
    fold: usize,
    ordering: FeedOrder,
    seed: u64,
) -> Vec<usize> {
    assert!(fold < partition.k(), "fold {fold} out of range");
    let mut order = Vec::with_capacity(partition.n() - partition.chunk_len(fold));
    let (mut s, mut e) = (0, partition.k() - 1);
    while s < e {
        let m = (s + e) / 2;
        let (child, fed) = if fold <= m {
            ((s, m), m + 1..=e)
        } else {
            ((m + 1, e), s..=m)
        };
        let span = partition.span(fed);
        match ordering {
            FeedOrder::Fixed => order.extend(span),
            FeedOrder::Randomized => {
                let mut stream = node_stream(seed, child.0, child.1).split(FEED_STREAM);
                let perm = stream.permutation(span.len());
                order.extend(perm.into_iter().map(|i| span.start + i));
            }
        }
        (s, e) = child;
    }
    order
}
