use crate::data::{DataPoint, Dataset, Label, Outcome};
use crate::error::{CvError, Result};
use crate::scalar::Scalar;

/// Preprocessing step to fit on a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformKind<T> {
    /// Divide each feature by its population standard deviation (no centering).
    UnitVariance,
    /// Min-max scale real outcomes onto `[0, 1]`.
    TargetsToUnit,
    /// Outcomes equal to the given class become `+1`, all others `-1`.
    Binarize(T),
}

/// A transform together with the statistics fitted for it.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec<T> {
    UnitVariance {
        std: Vec<T>,
        /// Zero-variance features, passed through unscaled.
        degenerate: Vec<usize>,
    },
    TargetsToUnit {
        min: T,
        max: T,
    },
    Binarize {
        positive: T,
    },
}

fn real_outcomes<T: Scalar>(dataset: &Dataset<T>) -> Result<Vec<T>> {
    dataset
        .points()
        .iter()
        .map(|p| {
            p.y.real().ok_or(CvError::LabelRequired {
                learner: "transform",
                expected: "real-valued",
            })
        })
        .collect()
}

impl<T: Scalar> TransformSpec<T> {
    pub fn fit(dataset: &Dataset<T>, kind: TransformKind<T>) -> Result<Self> {
        if dataset.is_empty() {
            return Err(CvError::InvalidDataset("cannot fit a transform on no data".into()));
        }
        let n = T::of_count(dataset.len() as u64);
        match kind {
            TransformKind::UnitVariance => {
                let d = dataset.dim();
                let mut mean = vec![T::zero(); d];
                for p in dataset.points() {
                    for (m, &v) in mean.iter_mut().zip(&p.x) {
                        *m = *m + v;
                    }
                }
                mean.iter_mut().for_each(|m| *m = *m / n);
                let mut var = vec![T::zero(); d];
                for p in dataset.points() {
                    for ((s, &v), &m) in var.iter_mut().zip(&p.x).zip(&mean) {
                        *s = *s + (v - m) * (v - m);
                    }
                }
                let std: Vec<T> = var.into_iter().map(|s| (s / n).sqrt()).collect();
                let degenerate = (0..d).filter(|&j| std[j] == T::zero()).collect();
                Ok(TransformSpec::UnitVariance { std, degenerate })
            }
            TransformKind::TargetsToUnit => {
                let ys = real_outcomes(dataset)?;
                let min = ys.iter().copied().fold(T::infinity(), T::min);
                let max = ys.iter().copied().fold(T::neg_infinity(), T::max);
                if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
                    return Err(CvError::DegenerateRange(format!(
                        "all targets equal {min}; cannot scale to [0, 1]"
                    )));
                }
                Ok(TransformSpec::TargetsToUnit { min, max })
            }
            TransformKind::Binarize(positive) => {
                real_outcomes(dataset)?;
                Ok(TransformSpec::Binarize { positive })
            }
        }
    }

    pub fn apply(&self, dataset: &Dataset<T>) -> Result<Dataset<T>> {
        let points = dataset
            .points()
            .iter()
            .map(|p| self.apply_point(p))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(dataset.dim(), points)
    }

    fn apply_point(&self, p: &DataPoint<T>) -> Result<DataPoint<T>> {
        match self {
            TransformSpec::UnitVariance { std, .. } => {
                if std.len() != p.x.len() {
                    return Err(CvError::InvalidDataset(format!(
                        "transform fitted on {} features, got {}",
                        std.len(),
                        p.x.len()
                    )));
                }
                let x = p
                    .x
                    .iter()
                    .zip(std)
                    .map(|(&v, &s)| if s == T::zero() { v } else { v / s })
                    .collect();
                Ok(DataPoint::new(x, p.y))
            }
            TransformSpec::TargetsToUnit { min, max } => {
                let y = p.y.real().ok_or(CvError::LabelRequired {
                    learner: "transform",
                    expected: "real-valued",
                })?;
                Ok(DataPoint::real(p.x.clone(), (y - *min) / (*max - *min)))
            }
            TransformSpec::Binarize { positive } => {
                let y = match p.y {
                    Outcome::Real(v) if v == *positive => Label::Pos,
                    Outcome::Real(_) => Label::Neg,
                    _ => {
                        return Err(CvError::LabelRequired {
                            learner: "transform",
                            expected: "real-valued class",
                        })
                    }
                };
                Ok(DataPoint::labeled(p.x.clone(), y))
            }
        }
    }
}

/// Fits `kind` on the full dataset and applies it, returning the fitted spec
/// for reuse.
pub fn fit_apply_transform<T: Scalar>(
    dataset: &Dataset<T>,
    kind: TransformKind<T>,
) -> Result<(Dataset<T>, TransformSpec<T>)> {
    let spec = TransformSpec::fit(dataset, kind)?;
    Ok((spec.apply(dataset)?, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn column(xs: &[f64]) -> Dataset<f64> {
        Dataset::from_points(xs.iter().map(|&v| DataPoint::real(vec![v], v)).collect()).unwrap()
    }

    #[test]
    fn unit_std_column_unchanged() {
        let (out, spec) = fit_apply_transform(&column(&[0.0, 2.0]), TransformKind::UnitVariance).unwrap();
        assert_eq!(out, column(&[0.0, 2.0]));
        assert_eq!(spec, TransformSpec::UnitVariance { std: vec![1.0], degenerate: vec![] });
    }

    #[test]
    fn zero_variance_passes_through() {
        let ds = Dataset::from_points(vec![
            DataPoint::real(vec![3.0, 1.0], 0.0),
            DataPoint::real(vec![3.0, 5.0], 0.0),
        ])
        .unwrap();
        let (out, spec) = fit_apply_transform(&ds, TransformKind::UnitVariance).unwrap();
        assert_eq!(out.points()[0].x[0], 3.0);
        assert!(matches!(spec, TransformSpec::UnitVariance { degenerate, .. } if degenerate == vec![0]));
    }

    #[test]
    fn scaled_features_have_unit_std() {
        let mut rng = CounterRng::new(8);
        let pts = (0..300)
            .map(|_| DataPoint::real(vec![7.0 * rng.next_normal() + 3.0, 0.01 * rng.next_f64()], 0.0))
            .collect();
        let ds = Dataset::from_points(pts).unwrap();
        let (out, _) = fit_apply_transform(&ds, TransformKind::UnitVariance).unwrap();
        for j in 0..2 {
            let col: Vec<f64> = out.points().iter().map(|p| p.x[j]).collect();
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / col.len() as f64).sqrt();
            assert!((std - 1.0).abs() < 1e-9, "feature {j}: {std}");
        }
    }

    #[test]
    fn targets_min_max() {
        let (out, _) = fit_apply_transform(&column(&[10.0, 20.0, 30.0]), TransformKind::TargetsToUnit).unwrap();
        let ys: Vec<f64> = out.points().iter().map(|p| p.y.real().unwrap()).collect();
        assert_eq!(ys, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn constant_targets_degenerate() {
        assert!(matches!(
            fit_apply_transform(&column(&[4.0, 4.0]), TransformKind::TargetsToUnit),
            Err(CvError::DegenerateRange(_))
        ));
    }

    #[test]
    fn binarize_one_vs_rest() {
        let (out, _) = fit_apply_transform(&column(&[1.0, 2.0, 3.0]), TransformKind::Binarize(1.0)).unwrap();
        let ys: Vec<Outcome<f64>> = out.points().iter().map(|p| p.y).collect();
        assert_eq!(
            ys,
            vec![Outcome::Label(Label::Pos), Outcome::Label(Label::Neg), Outcome::Label(Label::Neg)]
        );
        // a fitted binarizer cannot be applied to its own output
        let spec = TransformSpec::Binarize { positive: 1.0 };
        assert!(spec.apply(&out).is_err());
    }
}
