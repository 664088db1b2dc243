//! The incremental-learner contract.

use crate::data::DataPoint;
use crate::error::Result;
use crate::loss::Prediction;
use crate::rng::CounterRng;
use crate::scalar::Scalar;

/// An incremental learning algorithm together with its current model.
///
/// Updating with a batch is equivalent to updating with its points one at a
/// time in the given order. Cloning duplicates the whole model state and is
/// what the copy strategy uses to preserve a model at a recursion node.
pub trait IncrementalLearner<T: Scalar>: Clone + Send {
    /// Value capturing everything needed to reproduce the model bit-exactly,
    /// including step counters and random-stream position.
    type State: Clone + Send + Sync;

    fn update_point(&mut self, point: &DataPoint<T>) -> Result<()>;

    fn update<'a, I>(&mut self, batch: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a DataPoint<T>>,
        T: 'a,
    {
        for point in batch {
            self.update_point(point)?;
        }
        Ok(())
    }

    fn predict(&self, x: &[T]) -> Result<Prediction<T>>;

    fn snapshot(&self) -> Self::State;

    /// Fails with `StateMismatch` if `state` came from a differently configured learner.
    fn restore(&mut self, state: &Self::State) -> Result<()>;

    /// Untrained model with the same configuration.
    fn fresh(&self) -> Self;

    /// Replaces the model's random stream. Learners without randomness ignore it.
    fn reseed(&mut self, _stream: CounterRng) {}
}
