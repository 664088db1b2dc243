use std::ops::{Range, RangeInclusive};

use crate::data::{DataPoint, Dataset};
use crate::error::{CvError, Result};
use crate::scalar::Scalar;

/// Division of `n` points into `k` contiguous chunks.
///
/// The first `n mod k` chunks hold `ceil(n/k)` points and the rest hold
/// `floor(n/k)`. Chunks are addressed by 0-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    bounds: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k < 2 || k > n {
            return Err(CvError::InvalidFoldCount { k, n });
        }
        let (base, extra) = (n / k, n % k);
        let mut bounds = Vec::with_capacity(k + 1);
        bounds.push(0);
        let mut end = 0;
        for i in 0..k {
            end += base + usize::from(i < extra);
            bounds.push(end);
        }
        Ok(Self { bounds })
    }

    pub fn k(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn n(&self) -> usize {
        *self.bounds.last().expect("at least two bounds")
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// Point indices of chunk `i`.
    pub fn chunk(&self, i: usize) -> Range<usize> {
        self.bounds[i]..self.bounds[i + 1]
    }

    pub fn chunk_len(&self, i: usize) -> usize {
        self.bounds[i + 1] - self.bounds[i]
    }

    pub fn chunk_sizes(&self) -> Vec<usize> {
        self.bounds.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Point indices covered by a contiguous range of chunks.
    pub fn span(&self, chunks: RangeInclusive<usize>) -> Range<usize> {
        self.bounds[*chunks.start()]..self.bounds[*chunks.end() + 1]
    }

    pub fn check_matches<T: Scalar>(&self, dataset: &Dataset<T>) -> Result<()> {
        if self.n() != dataset.len() {
            return Err(CvError::InvalidConfig(format!(
                "partition covers {} points but the dataset has {}",
                self.n(),
                dataset.len()
            )));
        }
        Ok(())
    }

    pub fn chunk_points<'a, T: Scalar>(
        &self,
        dataset: &'a Dataset<T>,
        i: usize,
    ) -> &'a [DataPoint<T>] {
        &dataset.points()[self.chunk(i)]
    }
}

/// Splits `dataset` into `k` chunks by the ceiling rule.
pub fn partition<T: Scalar>(dataset: &Dataset<T>, k: usize) -> Result<Partition> {
    Partition::new(dataset.len(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn loocv_sizes() {
        assert_eq!(Partition::new(4, 4).unwrap().chunk_sizes(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn ceiling_rule() {
        assert_eq!(Partition::new(10, 3).unwrap().chunk_sizes(), vec![4, 3, 3]);
        assert_eq!(Partition::new(6, 3).unwrap().chunk_sizes(), vec![2, 2, 2]);
    }

    #[test]
    fn invalid_fold_counts() {
        assert_eq!(
            Partition::new(5, 1),
            Err(CvError::InvalidFoldCount { k: 1, n: 5 })
        );
        assert_eq!(
            Partition::new(5, 6),
            Err(CvError::InvalidFoldCount { k: 6, n: 5 })
        );
        assert!(Partition::new(1, 2).is_err());
    }

    #[test]
    fn span_of_chunks() {
        let p = Partition::new(10, 3).unwrap();
        assert_eq!(p.span(1..=2), 4..10);
        assert_eq!(p.span(0..=0), 0..4);
    }

    proptest! {
        #[test]
        fn chunks_disjoint_covering_balanced(n in 2usize..500, k_seed in 0usize..1000) {
            let k = 2 + k_seed % (n - 1);
            let p = Partition::new(n, k).unwrap();
            prop_assert_eq!(p.k(), k);
            let mut covered = 0;
            for i in 0..k {
                let c = p.chunk(i);
                prop_assert_eq!(c.start, covered);
                prop_assert!(!c.is_empty());
                covered = c.end;
            }
            prop_assert_eq!(covered, n);
            let sizes = p.chunk_sizes();
            let max = *sizes.iter().max().unwrap();
            let min = *sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);
            // larger chunks come first
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
