use crate::data::{DataPoint, Outcome};
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::Prediction;
use crate::scalar::{ExactSum, Scalar};

/// Predicts the mean outcome seen so far, ignoring inputs.
///
/// The model is `(sum, count)` with the sum kept exactly, so the prediction
/// is the same for every feeding order and batching of the same multiset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeanPredictor<T> {
    sum: ExactSum<T>,
    count: u64,
}

impl<T: Scalar> MeanPredictor<T> {
    pub fn new() -> Self {
        Self {
            sum: ExactSum::new(),
            count: 0,
        }
    }

    pub fn sum(&self) -> T {
        self.sum.total()
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

impl<T: Scalar> IncrementalLearner<T> for MeanPredictor<T> {
    type State = Self;

    fn update_point(&mut self, point: &DataPoint<T>) -> Result<()> {
        let Outcome::Real(y) = point.y else {
            return Err(CvError::LabelRequired {
                learner: "mean predictor",
                expected: "real-valued",
            });
        };
        self.sum.add(y);
        self.count += 1;
        Ok(())
    }

    fn predict(&self, _x: &[T]) -> Result<Prediction<T>> {
        if self.count == 0 {
            return Err(CvError::UntrainedModel("mean predictor has seen no outcomes"));
        }
        Ok(Prediction::Real(self.sum.total() / T::of_count(self.count)))
    }

    fn snapshot(&self) -> Self {
        self.clone()
    }

    fn restore(&mut self, state: &Self) -> Result<()> {
        self.clone_from(state);
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self::new()
    }
}
