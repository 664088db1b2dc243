use crate::data::{DataPoint, Label, Outcome};
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::Prediction;
use crate::scalar::{dot, Scalar};

use super::check_dim;

/// Linear PEGASOS, single-point steps, no projection, last iterate kept.
///
/// Step `t` (1-based) uses `eta = 1 / (lambda * t)`; the step counter
/// carries over between incremental updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Pegasos<T> {
    w: Vec<T>,
    t: u64,
    lambda: T,
}

impl<T: Scalar> Pegasos<T> {
    pub fn new(dim: usize, lambda: T) -> Result<Self> {
        if !lambda.is_finite() || lambda <= T::zero() {
            return Err(CvError::InvalidConfig(format!(
                "PEGASOS lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            w: vec![T::zero(); dim],
            t: 0,
            lambda,
        })
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn decision(&self, x: &[T]) -> T {
        dot(&self.w, x)
    }
}

impl<T: Scalar> IncrementalLearner<T> for Pegasos<T> {
    type State = Self;

    fn update_point(&mut self, point: &DataPoint<T>) -> Result<()> {
        let Outcome::Label(label) = point.y else {
            return Err(CvError::LabelRequired {
                learner: "PEGASOS",
                expected: "+1/-1 label",
            });
        };
        check_dim(self.w.len(), point.x.len())?;
        let y: T = label.sign();
        self.t += 1;
        let eta = T::one() / (self.lambda * T::of_count(self.t));
        let violated = y * dot(&self.w, &point.x) < T::one();
        let shrink = T::one() - eta * self.lambda;
        if violated {
            let step = eta * y;
            for (w, &x) in self.w.iter_mut().zip(&point.x) {
                *w = shrink * *w + step * x;
            }
        } else {
            for w in &mut self.w {
                *w = shrink * *w;
            }
        }
        Ok(())
    }

    /// Sign of the decision value; a zero score predicts `+1`.
    fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        check_dim(self.w.len(), x.len())?;
        Ok(Prediction::Label(Label::from_score(self.decision(x))))
    }

    fn snapshot(&self) -> Self {
        self.clone()
    }

    fn restore(&mut self, state: &Self) -> Result<()> {
        if state.w.len() != self.w.len() || state.lambda != self.lambda {
            return Err(CvError::StateMismatch(format!(
                "PEGASOS(d={}, lambda={}) cannot restore PEGASOS(d={}, lambda={})",
                self.w.len(),
                self.lambda,
                state.w.len(),
                state.lambda
            )));
        }
        self.w.clone_from(&state.w);
        self.t = state.t;
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self {
            w: vec![T::zero(); self.w.len()],
            t: 0,
            lambda: self.lambda,
        }
    }
}
