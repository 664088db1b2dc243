//! Standard k-repetition cross-validation: one model trained from scratch
//! per fold. Serves as the correctness oracle and the speedup baseline.

use std::time::Instant;

use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::{evaluate_chunk, Loss};
use crate::partition::Partition;
use crate::report::{fold_average, CvReport, FeedOrder, Scheduler, WorkCounters};
use crate::rng::CounterRng;
use crate::scalar::Scalar;
use crate::treecv::{FEED_STREAM, LEARNER_STREAM};

const STANDARD_TAG: u64 = 0x7374_6463; // "stdc"

fn fold_stream(seed: u64, fold: usize) -> CounterRng {
    CounterRng::new(seed).derive(&[STANDARD_TAG, fold as u64])
}

/// Training indices for `fold` in dataset order, skipping the held-out chunk.
fn training_indices(partition: &Partition, fold: usize) -> Vec<usize> {
    let held = partition.chunk(fold);
    (0..held.start).chain(held.end..partition.n()).collect()
}

fn run_fold<T, L, F>(
    factory: &F,
    dataset: &Dataset<T>,
    partition: &Partition,
    loss: Loss,
    fold: usize,
    order: &[usize],
    seed: u64,
) -> Result<(T, WorkCounters)>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: Fn() -> L,
{
    let mut counters = WorkCounters::default();
    let points = dataset.points();
    let mut model = factory().fresh();
    model.reseed(fold_stream(seed, fold).split(LEARNER_STREAM));
    model
        .update(order.iter().map(|&i| &points[i]))
        .map_err(|err| err.at_node(fold, fold))?;
    counters.point_updates += order.len() as u64;
    counters.model_transfers += partition.k() as u64 - 1;
    let score = evaluate_chunk(&model, partition.chunk_points(dataset, fold), loss, &mut counters)
        .map_err(|err| err.at_node(fold, fold))?;
    Ok((score, counters))
}

fn assemble<T: Scalar>(
    results: Vec<(T, WorkCounters)>,
    started: Instant,
    ordering: FeedOrder,
    seed: u64,
) -> CvReport<T> {
    let mut counters = WorkCounters::default();
    let mut scores = Vec::with_capacity(results.len());
    for (score, c) in results {
        scores.push(score);
        counters += c;
    }
    CvReport {
        estimate: fold_average(&scores),
        per_fold_scores: scores,
        counters,
        wall_time: started.elapsed(),
        scheduler: Scheduler::Standard,
        ordering,
        seed,
        trace: Vec::new(),
    }
}

/// Trains `k` independent models, each on every chunk but one.
///
/// Fixed ordering feeds the training points in dataset order; randomized
/// ordering feeds one seeded permutation of them per fold.
pub fn standard_cv<T, L, F>(
    learner_factory: F,
    dataset: &Dataset<T>,
    partition: &Partition,
    loss: Loss,
    ordering: FeedOrder,
    seed: u64,
) -> Result<CvReport<T>>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: Fn() -> L,
{
    partition.check_matches(dataset)?;
    let started = Instant::now();
    let results = (0..partition.k())
        .map(|fold| {
            let order = fold_order(partition, fold, ordering, seed);
            run_fold(&learner_factory, dataset, partition, loss, fold, &order, seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(results, started, ordering, seed))
}

fn fold_order(partition: &Partition, fold: usize, ordering: FeedOrder, seed: u64) -> Vec<usize> {
    let mut order = training_indices(partition, fold);
    if ordering == FeedOrder::Randomized {
        fold_stream(seed, fold).split(FEED_STREAM).shuffle(&mut order);
    }
    order
}

/// [`standard_cv`] with folds spread over `threads` workers. Results are
/// identical to the sequential run.
pub fn standard_cv_with_threads<T, L, F>(
    learner_factory: F,
    dataset: &Dataset<T>,
    partition: &Partition,
    loss: Loss,
    ordering: FeedOrder,
    seed: u64,
    threads: usize,
) -> Result<CvReport<T>>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: Fn() -> L + Sync,
{
    partition.check_matches(dataset)?;
    let started = Instant::now();
    let one_fold = |fold: usize| {
        let order = fold_order(partition, fold, ordering, seed);
        run_fold(&learner_factory, dataset, partition, loss, fold, &order, seed)
    };
    let results = if threads <= 1 {
        (0..partition.k()).map(one_fold).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|err| CvError::InvalidConfig(format!("thread pool: {err}")))?;
        pool.install(|| {
            (0..partition.k())
                .into_par_iter()
                .map(one_fold)
                .collect::<Result<Vec<_>>>()
        })?
    };
    Ok(assemble(results, started, ordering, seed))
}

/// Standard CV with a caller-supplied feeding order per fold.
///
/// `orders[i]` must be a permutation of the point indices outside chunk `i`.
/// Replaying the tree scheduler's order here reproduces its fold scores
/// exactly for deterministic learners.
pub fn brute_force_oracle<T, L, F>(
    learner_factory: F,
    dataset: &Dataset<T>,
    partition: &Partition,
    loss: Loss,
    orders: &[Vec<usize>],
    seed: u64,
) -> Result<CvReport<T>>
where
    T: Scalar,
    L: IncrementalLearner<T>,
    F: Fn() -> L,
{
    partition.check_matches(dataset)?;
    if orders.len() != partition.k() {
        return Err(CvError::InvalidOrder {
            fold: orders.len(),
            reason: format!("expected {} orders, got {}", partition.k(), orders.len()),
        });
    }
    for (fold, order) in orders.iter().enumerate() {
        check_order(partition, fold, order)?;
    }
    let started = Instant::now();
    let results = orders
        .iter()
        .enumerate()
        .map(|(fold, order)| run_fold(&learner_factory, dataset, partition, loss, fold, order, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(results, started, FeedOrder::Fixed, seed))
}

fn check_order(partition: &Partition, fold: usize, order: &[usize]) -> Result<()> {
    let held = partition.chunk(fold);
    let invalid = |reason: String| CvError::InvalidOrder { fold, reason };
    if order.len() != partition.n() - held.len() {
        return Err(invalid(format!(
            "has {} entries, expected {}",
            order.len(),
            partition.n() - held.len()
        )));
    }
    let mut seen = vec![false; partition.n()];
    for &i in order {
        if i >= partition.n() {
            return Err(invalid(format!("index {i} out of range")));
        }
        if held.contains(&i) {
            return Err(invalid(format!("index {i} belongs to the held-out chunk")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(invalid(format!("index {i} repeated")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataPoint;
    use crate::learners::MeanPredictor;

    fn outcomes(ys: &[f64]) -> Dataset<f64> {
        Dataset::from_points(ys.iter().map(|&y| DataPoint::real(vec![], y)).collect()).unwrap()
    }

    #[test]
    fn two_fold_mean_predictor() {
        let ds = outcomes(&[1.0, 3.0]);
        let p = Partition::new(2, 2).unwrap();
        let r = standard_cv(MeanPredictor::new, &ds, &p, Loss::SquaredError, FeedOrder::Fixed, 0)
            .unwrap();
        assert_eq!(r.estimate, 4.0);
    }

    #[test]
    fn loocv_counts() {
        let ds = outcomes(&[1.0, 2.0, 3.0, 4.0]);
        let p = Partition::new(4, 4).unwrap();
        let r = standard_cv(MeanPredictor::new, &ds, &p, Loss::SquaredError, FeedOrder::Fixed, 0)
            .unwrap();
        assert_eq!(r.counters.point_updates, 12);
        assert_eq!(r.counters.evaluations, 4);
    }

    #[test]
    fn zero_loss_constant_data() {
        let ds = outcomes(&[2.0; 5]);
        let p = Partition::new(5, 5).unwrap();
        let r = standard_cv(MeanPredictor::new, &ds, &p, Loss::SquaredError, FeedOrder::Randomized, 9)
            .unwrap();
        assert_eq!(r.estimate, 0.0);
    }

    #[test]
    fn dataset_order_matches_fixed() {
        let ds = outcomes(&[1.0, 5.0, 2.0, 8.0, 3.0]);
        let p = Partition::new(5, 2).unwrap();
        let orders: Vec<Vec<usize>> = (0..2).map(|f| training_indices(&p, f)).collect();
        let a = brute_force_oracle(MeanPredictor::new, &ds, &p, Loss::SquaredError, &orders, 0).unwrap();
        let b = standard_cv(MeanPredictor::new, &ds, &p, Loss::SquaredError, FeedOrder::Fixed, 0)
            .unwrap();
        assert_eq!(a.per_fold_scores, b.per_fold_scores);
    }

    #[test]
    fn order_invariance_for_mean() {
        let ds = outcomes(&[1.0, 5.0, 2.0, 8.0]);
        let p = Partition::new(4, 2).unwrap();
        let a = vec![vec![2, 3], vec![0, 1]];
        let b = vec![vec![3, 2], vec![1, 0]];
        let ra = brute_force_oracle(MeanPredictor::new, &ds, &p, Loss::SquaredError, &a, 0).unwrap();
        let rb = brute_force_oracle(MeanPredictor::new, &ds, &p, Loss::SquaredError, &b, 0).unwrap();
        assert_eq!(ra.per_fold_scores, rb.per_fold_scores);
    }

    #[test]
    fn rejects_bad_orders() {
        let ds = outcomes(&[1.0, 5.0, 2.0, 8.0]);
        let p = Partition::new(4, 2).unwrap();
        for bad in [
            vec![vec![2], vec![0, 1]],
            vec![vec![2, 2], vec![0, 1]],
            vec![vec![0, 3], vec![0, 1]],
            vec![vec![2, 9], vec![0, 1]],
        ] {
            assert!(matches!(
                brute_force_oracle(MeanPredictor::new, &ds, &p, Loss::SquaredError, &bad, 0),
                Err(CvError::InvalidOrder { fold: 0, .. })
            ));
        }
    }

    #[test]
    fn threads_do_not_change_results() {
        let ys: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin()).collect();
        let ds = outcomes(&ys);
        let p = Partition::new(40, 7).unwrap();
        let a = standard_cv(MeanPredictor::new, &ds, &p, Loss::SquaredError, FeedOrder::Randomized, 5)
            .unwrap();
        let b = standard_cv_with_threads(
            MeanPredictor::new,
            &ds,
            &p,
            Loss::SquaredError,
            FeedOrder::Randomized,
            5,
            4,
        )
        .unwrap();
        assert!(a.same_result(&b));
    }
}
