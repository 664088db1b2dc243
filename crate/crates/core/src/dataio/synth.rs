//! Seeded synthetic datasets for desk-scale experiments.

use crate::data::{DataPoint, Dataset, Label};
use crate::error::{CvError, Result};
use crate::rng::CounterRng;
use crate::scalar::Scalar;

const CLASSIFICATION_TAG: u64 = 0x636c_6173;
const REGRESSION_TAG: u64 = 0x7265_6772;
const BLOBS_TAG: u64 = 0x626c_6f62;

fn check_sizes(n: usize, d: usize) -> Result<()> {
    if n < 2 || d < 1 {
        return Err(CvError::InvalidSize(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    Ok(())
}

fn unit_direction(rng: &mut CounterRng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn cast<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::of(x)).collect()
}

/// Gaussian inputs labeled by a random hyperplane through the origin.
///
/// Points closer than `margin` to the hyperplane are pushed out to
/// distance `margin`; each label is then flipped with probability `noise`.
pub fn synth_classification<T: Scalar>(
    n: usize,
    d: usize,
    margin: f64,
    noise: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    check_sizes(n, d)?;
    if margin.is_nan() || margin < 0.0 || !(0.0..=1.0).contains(&noise) {
        return Err(CvError::InvalidSize(format!(
            "need margin >= 0 and noise in [0, 1], got {margin}, {noise}"
        )));
    }
    let mut rng = CounterRng::new(seed).split(CLASSIFICATION_TAG);
    let normal = unit_direction(&mut rng, d);
    let points = (0..n)
        .map(|_| {
            let mut x: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
            let score: f64 = x.iter().zip(&normal).map(|(a, b)| a * b).sum();
            let side = if score >= 0.0 { 1.0 } else { -1.0 };
            if score.abs() < margin {
                let push = side * (margin - score.abs());
                x.iter_mut().zip(&normal).for_each(|(v, u)| *v += push * u);
            }
            let mut label = if side > 0.0 { Label::Pos } else { Label::Neg };
            if rng.next_f64() < noise {
                label = match label {
                    Label::Pos => Label::Neg,
                    Label::Neg => Label::Pos,
                };
            }
            DataPoint::labeled(cast(&x), label)
        })
        .collect();
    Dataset::new(d, points)
}

/// Gaussian inputs with a noisy linear target, min-max scaled to `[0, 1]`.
pub fn synth_regression<T: Scalar>(n: usize, d: usize, noise: f64, seed: u64) -> Result<Dataset<T>> {
    check_sizes(n, d)?;
    if noise.is_nan() || noise < 0.0 {
        return Err(CvError::InvalidSize(format!("need noise >= 0, got {noise}")));
    }
    let mut rng = CounterRng::new(seed).split(REGRESSION_TAG);
    let w = unit_direction(&mut rng, d);
    let raw: Vec<(Vec<f64>, f64)> = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
            let y = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + noise * rng.next_normal();
            (x, y)
        })
        .collect();
    let min = raw.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let max = raw.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    if max.partial_cmp(&min) != Some(std::cmp::Ordering::Greater) {
        return Err(CvError::DegenerateRange("generated targets are constant".into()));
    }
    let points = raw
        .into_iter()
        .map(|(x, y)| DataPoint::real(cast(&x), T::of((y - min) / (max - min))))
        .collect();
    Dataset::new(d, points)
}

/// Unlabeled points around `clusters` centers drawn uniformly from
/// `[-10, 10]^d`. Point `i` belongs to blob `i mod clusters`.
pub fn synth_blobs<T: Scalar>(
    n: usize,
    d: usize,
    clusters: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset<T>> {
    check_sizes(n, d)?;
    if clusters == 0 || spread.is_nan() || spread < 0.0 {
        return Err(CvError::InvalidSize(format!(
            "need clusters >= 1 and spread >= 0, got {clusters}, {spread}"
        )));
    }
    let mut rng = CounterRng::new(seed).split(BLOBS_TAG);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..d).map(|_| 20.0 * rng.next_f64() - 10.0).collect())
        .collect();
    let points = (0..n)
        .map(|i| {
            let c = &centers[i % clusters];
            let x: Vec<f64> = c.iter().map(|&v| v + spread * rng.next_normal()).collect();
            DataPoint::unlabeled(cast(&x))
        })
        .collect();
    Dataset::new(d, points)
}
