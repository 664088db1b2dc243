use crate::data::DataPoint;
use crate::error::{CvError, Result};
use crate::learner::IncrementalLearner;
use crate::loss::Prediction;
use crate::scalar::{squared_distance, Scalar};

use super::check_dim;

/// Sequential k-means.
///
/// The first `K` distinct points seen become the initial centers. After
/// that each point moves its nearest center (lowest index on ties) to the
/// running mean of the points assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct OnlineKMeans<T> {
    clusters: usize,
    dim: usize,
    centers: Vec<Vec<T>>,
    counts: Vec<u64>,
}

impl<T: Scalar> OnlineKMeans<T> {
    pub fn new(dim: usize, clusters: usize) -> Result<Self> {
        if clusters == 0 {
            return Err(CvError::InvalidConfig("k-means needs at least one cluster".into()));
        }
        Ok(Self {
            clusters,
            dim,
            centers: Vec::with_capacity(clusters),
            counts: Vec::with_capacity(clusters),
        })
    }

    pub fn centers(&self) -> &[Vec<T>] {
        &self.centers
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    fn nearest(&self, x: &[T]) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (j, c) in self.centers.iter().enumerate() {
            let d = squared_distance(x, c);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    }
}

impl<T: Scalar> IncrementalLearner<T> for OnlineKMeans<T> {
    type State = Self;

    fn update_point(&mut self, point: &DataPoint<T>) -> Result<()> {
        check_dim(self.dim, point.x.len())?;
        let x = &point.x;
        if self.centers.len() < self.clusters && !self.centers.iter().any(|c| c == x) {
            self.centers.push(x.clone());
            self.counts.push(1);
            return Ok(());
        }
        let j = self.nearest(x).expect("at least one center exists here");
        self.counts[j] += 1;
        let n = T::of_count(self.counts[j]);
        for (c, &v) in self.centers[j].iter_mut().zip(x) {
            *c = *c + (v - *c) / n;
        }
        Ok(())
    }

    /// Nearest existing center; errors before any point has been seen.
    fn predict(&self, x: &[T]) -> Result<Prediction<T>> {
        check_dim(self.dim, x.len())?;
        let j = self
            .nearest(x)
            .ok_or(CvError::UntrainedModel("k-means has no centers yet"))?;
        Ok(Prediction::Center(self.centers[j].clone()))
    }

    fn snapshot(&self) -> Self {
        self.clone()
    }

    fn restore(&mut self, state: &Self) -> Result<()> {
        if state.dim != self.dim || state.clusters != self.clusters {
            return Err(CvError::StateMismatch(format!(
                "k-means(d={}, K={}) cannot restore k-means(d={}, K={})",
                self.dim, self.clusters, state.dim, state.clusters
            )));
        }
        self.centers.clone_from(&state.centers);
        self.counts.clone_from(&state.counts);
        Ok(())
    }

    fn fresh(&self) -> Self {
        Self {
            clusters: self.clusters,
            dim: self.dim,
            centers: Vec::with_capacity(self.clusters),
            counts: Vec::with_capacity(self.clusters),
        }
    }
}
