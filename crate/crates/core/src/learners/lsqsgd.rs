use crate::data::{DataPoint, Outcome};
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::Prediction;
use crate::scalar::{dot, Scalar};

use super::check_dim;

/// Rescales `v` onto the unit l2 sphere when its norm exceeds 1.
pub fn project_unit_ball<T: Scalar>(v: &mut [T]) {
    let norm = dot(v, v).sqrt();
    if norm > T::one() {
        for x in v.iter_mut() {
            *x = *x / norm;
        }
    }
}

/// Least-squares SGD over the unit l2 ball with a fixed step size.
///
/// The model used for prediction is the running average of the projected
/// iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqSgd<T> {
    w: Vec<T>,
    w_avg: Vec<T>,
    t: u64,
    alpha: T,
}

impl<T: Scalar> LsqSgd<T> {
    pub fn new(dim: usize, alpha: T) -> Result<Self> {
        if !alpha.is_finite() || alpha <= T::zero() {
            return Err(CvError::InvalidConfig(format!(
                "LSQSGD step size must be positive, got {alpha}"
            )));
        }
        Ok(Self {
            w: vec![T::zero(); dim],
            w_avg: vec![T::zero(); dim],
            t: 0,
            alpha,
        })
    }

    /// Step size `n^{-1/2}`.
    pub fn with_dataset_size(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, T::one() / T::of_count(n.max(1) as u64).sqrt())
    }

    pub fn current(&self) -> &[T] {
        &self.w
    }

    pub fn average(&self) -> &[T] {
        &self.w_avg
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

impl<T: Scalar> IncrementalLearner<T> for LsqSgd<T> {
    type State = Self;

    fn update_point(&mut self, point: &DataPoint<T>) -> Result<()> {
        let Outcome::Real(y) = point.y else {
            return Err(CvError::LabelRequired {
                learner: "LSQSGD",
                expected: "real-valued",
            });
        };
        check_dim(self.w.len(), point.x.len())?;
        let residual = dot(&self.w, &point.x) - y;
        let two = T::one() + T::one();
        let coef = self.alpha * two * residual;
        for (w, &x) in self.w.iter_mut().zip(&point.x) {
            *w = *w - coef * x;
        }
        project_unit_ball(&mut self.w);
        self.t += 1;
        let t = T::of_count(self.t);
        for (a, &w) in self.w_avg.iter_mut().zip(&self.w) {
            *a = *a + (w - *a) / t;
        }
        Ok(())
    }

    /// `<w_avg, x>`; an untrained model predicts 0.
    fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        check_dim(self.w.len(), x.len())?;
        Ok(Prediction::Real(dot(&self.w_avg, x)))
    }

    fn snapshot(&self) -> Self {
        self.clone()
    }

    fn restore(&mut self, state: &Self) -> Result<()> {
        if state.w.len() != self.w.len() || state.alpha != self.alpha {
            return Err(CvError::StateMismatch(format!(
                "LSQSGD(d={}, alpha={}) cannot restore LSQSGD(d={}, alpha={})",
                self.w.len(),
                self.alpha,
                state.w.len(),
                state.alpha
            )));
        }
        self.w.clone_from(&state.w);
        self.w_avg.clone_from(&state.w_avg);
        self.t = state.t;
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self {
            w: vec![T::zero(); self.w.len()],
            w_avg: vec![T::zero(); self.w.len()],
            t: 0,
            alpha: self.alpha,
        }
    }
}
