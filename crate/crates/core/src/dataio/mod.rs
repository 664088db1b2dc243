//! Dataset ingestion, preprocessing and synthetic generators.

mod sparse;
mod synth;
mod transform;

pub use sparse::{parse_sparse_str, parse_sparse_text, to_sparse_text, write_sparse_text, RawRecord};
pub use synth::{synth_blobs, synth_classification, synth_regression};
pub use transform::{fit_apply_transform, TransformKind, TransformSpec};

use crate::data::Dataset;
use crate::rng::CounterRng;
use crate::scalar::Scalar;

const SHUFFLE_TAG: u64 = 0x7368_7566; // "shuf"

/// Seeded Fisher-Yates permutation of the points.
pub fn shuffle_dataset<T: Scalar>(dataset: &Dataset<T>, seed: u64) -> Dataset<T> {
    let order = CounterRng::new(seed)
        .split(SHUFFLE_TAG)
        .permutation(dataset.len());
    dataset.permuted(&order)
}
