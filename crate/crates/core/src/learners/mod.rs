//! Shipped incremental learners.

mod kmeans;
mod lsqsgd;
mod mean;
mod pegasos;

pub use kmeans::OnlineKMeans;
pub use lsqsgd::{project_unit_ball, LsqSgd};
pub use mean::MeanPredictor;
pub use pegasos::Pegasos;

use crate::error::{CvError, Result};

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(CvError::InvalidDataset(format!(
            "expected {expected} features, got {got}"
        )));
    }
    Ok(())
}
