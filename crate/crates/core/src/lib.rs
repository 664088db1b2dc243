//! Tree-structured k-fold cross-validation for incremental learners.
//!
//! [`tree_cv`] trains all `k` fold models along a binary recursion over
//! chunk ranges, so each chunk is fed to `O(log k)` models instead of
//! `k - 1`. [`standard_cv`] is the conventional one-model-per-fold
//! computation used as the baseline and correctness oracle.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the common instantiations.

pub mod baseline;
pub mod data;
pub mod dataio;
pub mod error;
pub mod learner;
pub mod learners;
pub mod loss;
pub mod partition;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod treecv;

pub use baseline::{brute_force_oracle, standard_cv, standard_cv_with_threads};
pub use data::{DataPoint, Dataset, Label, Outcome};
pub use error::{CvError, ParseErrorKind, Result};
pub use learner::IncrementalLearner;
pub use learners::{LsqSgd, MeanPredictor, OnlineKMeans, Pegasos};
pub use loss::{evaluate_chunk, Loss, Prediction};
pub use partition::{partition, Partition};
pub use report::{CvReport, FeedOrder, NodeTrace, Scheduler, WorkCounters};
pub use rng::CounterRng;
pub use scalar::{ExactSum, KahanSum, Scalar};
pub use treecv::{feed, loocv, tree_cv, tree_feed_order, Parallelism, Strategy, TreeCvConfig};

pub type DataPoint64 = DataPoint<f64>;
pub type Dataset64 = Dataset<f64>;
pub type CvReport64 = CvReport<f64>;
pub type Pegasos64 = Pegasos<f64>;
pub type LsqSgd64 = LsqSgd<f64>;
pub type OnlineKMeans64 = OnlineKMeans<f64>;
pub type MeanPredictor64 = MeanPredictor<f64>;

pub type DataPoint32 = DataPoint<f32>;
pub type Dataset32 = Dataset<f32>;
pub type CvReport32 = CvReport<f32>;
pub type Pegasos32 = Pegasos<f32>;
pub type LsqSgd32 = LsqSgd<f32>;
pub type OnlineKMeans32 = OnlineKMeans<f32>;
pub type MeanPredictor32 = MeanPredictor<f32>;
