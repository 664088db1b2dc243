use std::fmt;
use std::str::FromStr;

use treecv::{
    CounterRng, CvError, DataPoint, IncrementalLearner, Loss, LsqSgd, MeanPredictor,
    OnlineKMeans, Pegasos, Prediction,
};

/// PEGASOS regularization used when none is given.
pub const DEFAULT_LAMBDA: f64 = 1e-2;

/// Learner selection plus hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearnerSpec {
    Pegasos { lambda: f64 },
    /// `alpha = None` uses `1/sqrt(n)` for the dataset size `n`.
    LsqSgd { alpha: Option<f64> },
    KMeans { clusters: usize },
    Mean,
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Pegasos { .. } => "pegasos",
            LearnerSpec::LsqSgd { .. } => "lsqsgd",
            LearnerSpec::KMeans { .. } => "kmeans",
            LearnerSpec::Mean => "mean",
        }
    }

    pub fn default_loss(&self) -> Loss {
        match self {
            LearnerSpec::Pegasos { .. } => Loss::Misclassification,
            LearnerSpec::LsqSgd { .. } | LearnerSpec::Mean => Loss::SquaredError,
            LearnerSpec::KMeans { .. } => Loss::Quantization,
        }
    }

    /// Untrained learner for `dim` features and a dataset of `n` points.
    pub fn build(&self, dim: usize, n: usize) -> treecv::Result<AnyLearner> {
        Ok(match *self {
            LearnerSpec::Pegasos { lambda } => AnyLearner::Pegasos(Pegasos::new(dim, lambda)?),
            LearnerSpec::LsqSgd { alpha: Some(alpha) } => AnyLearner::LsqSgd(LsqSgd::new(dim, alpha)?),
            LearnerSpec::LsqSgd { alpha: None } => {
                AnyLearner::LsqSgd(LsqSgd::with_dataset_size(dim, n)?)
            }
            LearnerSpec::KMeans { clusters } => AnyLearner::KMeans(OnlineKMeans::new(dim, clusters)?),
            LearnerSpec::Mean => AnyLearner::Mean(MeanPredictor::new()),
        })
    }

    /// Hyperparameter summary for output rows, e.g. `lambda=0.0001`.
    pub fn params(&self) -> String {
        match self {
            LearnerSpec::Pegasos { lambda } => format!("lambda={lambda:?}"),
            LearnerSpec::LsqSgd { alpha: Some(a) } => format!("alpha={a:?}"),
            LearnerSpec::LsqSgd { alpha: None } => "alpha=1/sqrt(n)".into(),
            LearnerSpec::KMeans { clusters } => format!("clusters={clusters}"),
            LearnerSpec::Mean => String::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerKind {
    Pegasos,
    LsqSgd,
    KMeans,
    Mean,
}

impl FromStr for LearnerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pegasos" => Ok(LearnerKind::Pegasos),
            "lsqsgd" => Ok(LearnerKind::LsqSgd),
            "kmeans" => Ok(LearnerKind::KMeans),
            "mean" => Ok(LearnerKind::Mean),
            _ => Err(format!("unknown learner '{s}' (pegasos, lsqsgd, kmeans, mean)")),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LearnerKind::Pegasos => "pegasos",
            LearnerKind::LsqSgd => "lsqsgd",
            LearnerKind::KMeans => "kmeans",
            LearnerKind::Mean => "mean",
        })
    }
}

pub fn parse_loss(s: &str) -> Result<Loss, String> {
    match s {
        "zeroone" => Ok(Loss::Misclassification),
        "squared" => Ok(Loss::SquaredError),
        "quantization" => Ok(Loss::Quantization),
        _ => Err(format!("unknown loss '{s}' (zeroone, squared, quantization)")),
    }
}

pub fn loss_flag(loss: Loss) -> &'static str {
    match loss {
        Loss::Misclassification => "zeroone",
        Loss::SquaredError => "squared",
        Loss::Quantization => "quantization",
    }
}

/// One of the shipped learners behind a single type, so that the harness
/// can pick the learner at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyLearner {
    Pegasos(Pegasos<f64>),
    LsqSgd(LsqSgd<f64>),
    KMeans(OnlineKMeans<f64>),
    Mean(MeanPredictor<f64>),
}

macro_rules! each {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            AnyLearner::Pegasos($m) => $body,
            AnyLearner::LsqSgd($m) => $body,
            AnyLearner::KMeans($m) => $body,
            AnyLearner::Mean($m) => $body,
        }
    };
}

impl IncrementalLearner<f64> for AnyLearner {
    type State = AnyLearner;

    fn update_point(&mut self, point: &DataPoint<f64>) -> treecv::Result<()> {
        each!(self, m => m.update_point(point))
    }

    fn predict(&self, x: &[f64]) -> treecv::Result<Prediction<f64>> {
        each!(self, m => m.predict(x))
    }

    fn snapshot(&self) -> AnyLearner {
        match self {
            AnyLearner::Pegasos(m) => AnyLearner::Pegasos(m.snapshot()),
            AnyLearner::LsqSgd(m) => AnyLearner::LsqSgd(m.snapshot()),
            AnyLearner::KMeans(m) => AnyLearner::KMeans(m.snapshot()),
            AnyLearner::Mean(m) => AnyLearner::Mean(m.snapshot()),
        }
    }

    fn restore(&mut self, state: &AnyLearner) -> treecv::Result<()> {
        match (self, state) {
            (AnyLearner::Pegasos(m), AnyLearner::Pegasos(s)) => m.restore(s),
            (AnyLearner::LsqSgd(m), AnyLearner::LsqSgd(s)) => m.restore(s),
            (AnyLearner::KMeans(m), AnyLearner::KMeans(s)) => m.restore(s),
            (AnyLearner::Mean(m), AnyLearner::Mean(s)) => m.restore(s),
            _ => Err(CvError::StateMismatch("state belongs to a different learner".into())),
        }
    }

    fn fresh(&self) -> Self {
        match self {
            AnyLearner::Pegasos(m) => AnyLearner::Pegasos(m.fresh()),
            AnyLearner::LsqSgd(m) => AnyLearner::LsqSgd(m.fresh()),
            AnyLearner::KMeans(m) => AnyLearner::KMeans(m.fresh()),
            AnyLearner::Mean(m) => AnyLearner::Mean(m.fresh()),
        }
    }

    fn reseed(&mut self, stream: CounterRng) {
        each!(self, m => m.reseed(stream))
    }
}
