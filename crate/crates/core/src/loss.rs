use crate::data::{DataPoint, Label, Outcome};
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::report::WorkCounters;
use crate::scalar::{squared_distance, KahanSum, Scalar};

/// Output of a model for one input.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction<T> {
    Label(Label),
    Real(T),
    /// Cluster center assigned to the input.
    Center(Vec<T>),
}

impl<T> Prediction<T> {
    fn kind(&self) -> &'static str {
        match self {
            Prediction::Label(_) => "label",
            Prediction::Real(_) => "real",
            Prediction::Center(_) => "center",
        }
    }
}

/// Performance measure `loss(p, x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Loss {
    /// `1` when the predicted label differs from the true one, else `0`.
    Misclassification,
    /// `(p - y)^2`.
    SquaredError,
    /// `||x - c||^2` for the assigned center `c`.
    Quantization,
}

impl Loss {
    pub fn name(&self) -> &'static str {
        match self {
            Loss::Misclassification => "misclassification",
            Loss::SquaredError => "squared-error",
            Loss::Quantization => "quantization",
        }
    }

    pub fn evaluate<T: Scalar>(&self, p: &Prediction<T>, x: &[T], y: &Outcome<T>) -> Result<T> {
        let mismatch = || CvError::LossMismatch {
            loss: self.name(),
            prediction: p.kind(),
            outcome: y.kind(),
        };
        match (self, p, y) {
            (Loss::Misclassification, Prediction::Label(pl), Outcome::Label(yl)) => {
                Ok(if pl == yl { T::zero() } else { T::one() })
            }
            (Loss::SquaredError, Prediction::Real(pv), Outcome::Real(yv)) => {
                let r = *pv - *yv;
                Ok(r * r)
            }
            (Loss::Quantization, Prediction::Center(c), _) => {
                if c.len() != x.len() {
                    return Err(mismatch());
                }
                Ok(squared_distance(x, c))
            }
            _ => Err(mismatch()),
        }
    }
}

/// Mean loss of `model` over `chunk`. Predict-only: the model is not touched.
pub fn evaluate_chunk<T, L>(
    model: &L,
    chunk: &[DataPoint<T>],
    loss: Loss,
    counters: &mut WorkCounters,
) -> Result<T>
where
    T: Scalar,
    L: IncrementalLearner<T>,
{
    if chunk.is_empty() {
        return Err(CvError::InvalidChunk("cannot evaluate on an empty chunk".into()));
    }
    let mut acc = KahanSum::new();
    for point in chunk {
        let p = model.predict(&point.x)?;
        acc.add(loss.evaluate(&p, &point.x, &point.y)?);
    }
    counters.evaluations += chunk.len() as u64;
    Ok(acc.total() / T::of_count(chunk.len() as u64))
}
