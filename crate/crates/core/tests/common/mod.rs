#![allow(dead_code)]

use std::sync::{Arc, Mutex};

use treecv::{
    CounterRng, CvError, DataPoint, Dataset, IncrementalLearner, Outcome, Partition, Prediction,
};

/// (predicted point id, sorted ids the model learned from) per prediction.
pub type PredictionLog = Arc<Mutex<Vec<(usize, Vec<usize>)>>>;

/// Records, for every prediction, which point was predicted and the
/// multiset of point ids the model had learned from. Point ids live in `x[0]`.
#[derive(Clone)]
pub struct Spy {
    pub seen: Vec<usize>,
    pub log: PredictionLog,
}

impl Spy {
    pub fn new(log: PredictionLog) -> Self {
        Self { seen: Vec::new(), log }
    }
}

impl IncrementalLearner<f64> for Spy {
    type State = Vec<usize>;

    fn update_point(&mut self, p: &DataPoint<f64>) -> Result<(), CvError> {
        self.seen.push(p.x[0] as usize);
        Ok(())
    }

    fn predict(&self, x: &[f64]) -> Result<Prediction<f64>, CvError> {
        let mut seen = self.seen.clone();
        seen.sort_unstable();
        self.log.lock().unwrap().push((x[0] as usize, seen));
        Ok(Prediction::Real(0.0))
    }

    fn snapshot(&self) -> Vec<usize> {
        self.seen.clone()
    }

    fn restore(&mut self, state: &Vec<usize>) -> Result<(), CvError> {
        self.seen.clone_from(state);
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self::new(self.log.clone())
    }
}

/// Mean predictor that perturbs every outcome with noise from its own
/// random stream; exercises reseeding and stream capture in snapshots.
#[derive(Clone)]
pub struct NoisyMean {
    pub sum: f64,
    pub count: u64,
    pub rng: CounterRng,
}

impl NoisyMean {
    pub fn new() -> Self {
        Self { sum: 0.0, count: 0, rng: CounterRng::new(0) }
    }
}

impl IncrementalLearner<f64> for NoisyMean {
    type State = (f64, u64, CounterRng);

    fn update_point(&mut self, p: &DataPoint<f64>) -> Result<(), CvError> {
        let y = p.y.real().ok_or(CvError::LabelRequired { learner: "noisy", expected: "real" })?;
        self.sum += y + 0.1 * self.rng.next_normal();
        self.count += 1;
        Ok(())
    }

    fn predict(&self, _: &[f64]) -> Result<Prediction<f64>, CvError> {
        Ok(Prediction::Real(self.sum / self.count.max(1) as f64))
    }

    fn snapshot(&self) -> Self::State {
        (self.sum, self.count, self.rng)
    }

    fn restore(&mut self, s: &Self::State) -> Result<(), CvError> {
        (self.sum, self.count, self.rng) = *s;
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self::new()
    }

    fn reseed(&mut self, stream: CounterRng) {
        self.rng = stream;
    }
}

/// Points whose first feature is their index and whose outcome is real.
pub fn indexed_dataset(n: usize) -> Dataset<f64> {
    Dataset::from_points(
        (0..n)
            .map(|i| DataPoint::new(vec![i as f64], Outcome::Real((i % 7) as f64)))
            .collect(),
    )
    .unwrap()
}

/// Tree-induced fixed feeding order for every fold, derived by walking the
/// whole recursion tree.
pub fn tree_orders(partition: &Partition) -> Vec<Vec<usize>> {
    fn walk(p: &Partition, s: usize, e: usize, prefix: Vec<usize>, out: &mut [Vec<usize>]) {
        if s == e {
            out[s] = prefix;
            return;
        }
        let m = (s + e) / 2;
        let mut left = prefix.clone();
        for c in m + 1..=e {
            left.extend(p.chunk(c));
        }
        walk(p, s, m, left, out);
        let mut right = prefix;
        for c in s..=m {
            right.extend(p.chunk(c));
        }
        walk(p, m + 1, e, right, out);
    }
    let mut out = vec![Vec::new(); partition.k()];
    walk(partition, 0, partition.k() - 1, Vec::new(), &mut out);
    out
}

/// Depth of every leaf in the recursion tree over `k` chunks.
pub fn leaf_depths(k: usize) -> Vec<usize> {
    fn walk(s: usize, e: usize, depth: usize, out: &mut Vec<usize>) {
        if s == e {
            out.push(depth);
        } else {
            let m = (s + e) / 2;
            walk(s, m, depth + 1, out);
            walk(m + 1, e, depth + 1, out);
        }
    }
    let mut out = Vec::new();
    walk(0, k - 1, 0, &mut out);
    out
}

pub fn ceil_log2(k: usize) -> u64 {
    (usize::BITS - (k - 1).leading_zeros()) as u64
}
