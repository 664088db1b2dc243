//! Data points and datasets.
//!
//! A dataset is an ordered multiset of `(x, y)` pairs sharing one feature
//! dimension. Order matters: it is the canonical feeding order for
//! fixed-order runs.

use std::fmt;

use crate::error::{CvError, Result};
use crate::scalar::Scalar;

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Label::Pos => T::one(),
            Label::Neg => -T::one(),
        }
    }

    /// `+1` for nonnegative scores, `-1` otherwise.
    pub fn from_score<T: Scalar>(score: T) -> Self {
        if score >= T::zero() {
            Label::Pos
        } else {
            Label::Neg
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Pos => f.write_str("+1"),
            Label::Neg => f.write_str("-1"),
        }
    }
}

/// Outcome `y` attached to an input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome<T> {
    Real(T),
    Label(Label),
    NoLabel,
}

impl<T: Scalar> Outcome<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Real(_) => "real",
            Outcome::Label(_) => "label",
            Outcome::NoLabel => "no-label",
        }
    }

    pub fn real(&self) -> Option<T> {
        match *self {
            Outcome::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn label(&self) -> Option<Label> {
        match *self {
            Outcome::Label(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint<T> {
    pub x: Vec<T>,
    pub y: Outcome<T>,
}

impl<T: Scalar> DataPoint<T> {
    pub fn new(x: Vec<T>, y: Outcome<T>) -> Self {
        Self { x, y }
    }

    pub fn real(x: Vec<T>, y: T) -> Self {
        Self::new(x, Outcome::Real(y))
    }

    pub fn labeled(x: Vec<T>, y: Label) -> Self {
        Self::new(x, Outcome::Label(y))
    }

    pub fn unlabeled(x: Vec<T>) -> Self {
        Self::new(x, Outcome::NoLabel)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Ordered multiset of points with a shared feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    points: Vec<DataPoint<T>>,
    dim: usize,
}

impl<T: Scalar> Dataset<T> {
    /// Validates dimensions, finiteness and the all-or-nothing rule for `NoLabel`.
    pub fn new(dim: usize, points: Vec<DataPoint<T>>) -> Result<Self> {
        let mut unlabeled = 0usize;
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != dim {
                return Err(CvError::InvalidDataset(format!(
                    "point {i} has dimension {} but the dataset has {dim}",
                    p.x.len()
                )));
            }
            if p.x.iter().any(|v| !v.is_finite()) {
                return Err(CvError::InvalidDataset(format!(
                    "point {i} has a non-finite feature"
                )));
            }
            match p.y {
                Outcome::Real(v) if !v.is_finite() => {
                    return Err(CvError::InvalidDataset(format!(
                        "point {i} has a non-finite outcome"
                    )))
                }
                Outcome::NoLabel => unlabeled += 1,
                _ => {}
            }
        }
        if unlabeled != 0 && unlabeled != points.len() {
            return Err(CvError::InvalidDataset(format!(
                "{unlabeled} of {} points are unlabeled; NoLabel must cover the whole dataset",
                points.len()
            )));
        }
        Ok(Self { points, dim })
    }

    /// Infers the dimension from the first point (0 when empty).
    pub fn from_points(points: Vec<DataPoint<T>>) -> Result<Self> {
        let dim = points.first().map_or(0, DataPoint::dim);
        Self::new(dim, points)
    }

    pub fn points(&self) -> &[DataPoint<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<DataPoint<T>> {
        self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_unlabeled(&self) -> bool {
        self.points
            .first()
            .is_some_and(|p| matches!(p.y, Outcome::NoLabel))
    }

    /// First `n` points as a new dataset.
    pub fn head(&self, n: usize) -> Self {
        Self {
            points: self.points[..n.min(self.len())].to_vec(),
            dim: self.dim,
        }
    }

    /// Reorders points by `order`, which must be a permutation of `0..n`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        debug_assert_eq!(order.len(), self.len());
        Self {
            points: order.iter().map(|&i| self.points[i].clone()).collect(),
            dim: self.dim,
        }
    }

    /// Drops every outcome, producing an unsupervised dataset.
    pub fn without_labels(&self) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| DataPoint::unlabeled(p.x.clone()))
                .collect(),
            dim: self.dim,
        }
    }

    /// Converts real outcomes that are exactly `+1` or `-1` into class labels.
    pub fn with_binary_labels(&self) -> Result<Self> {
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let y = match p.y {
                    Outcome::Label(l) => l,
                    Outcome::Real(v) if v == T::one() => Label::Pos,
                    Outcome::Real(v) if v == -T::one() => Label::Neg,
                    other => {
                        return Err(CvError::InvalidDataset(format!(
                            "point {i}: outcome {other:?} is not a +1/-1 label"
                        )))
                    }
                };
                Ok(DataPoint::labeled(p.x.clone(), y))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            dim: self.dim,
        })
    }
}
