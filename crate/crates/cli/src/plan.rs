//! What to run: dataset source, learner, fold counts and run coordinates.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::Context;
use treecv::dataio::{
    fit_apply_transform, parse_sparse_text, shuffle_dataset, synth_blobs, synth_classification,
    synth_regression, TransformKind,
};
use treecv::{CounterRng, Dataset, FeedOrder, Loss, Outcome, Scheduler, Strategy};

use crate::invalid;
use crate::learner::LearnerSpec;

const REP_TAG: u64 = 0x7265_7073; // "reps"

/// Synthetic dataset description, written `kind:key=value,...`.
///
/// ```
/// use treecv_cli::SynthSpec;
/// let s: SynthSpec = "classification:n=500,d=4,noise=0.05".parse().unwrap();
/// assert_eq!(s.n(), 500);
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SynthSpec {
    Classification { n: usize, d: usize, margin: f64, noise: f64, seed: Option<u64> },
    Regression { n: usize, d: usize, noise: f64, seed: Option<u64> },
    Blobs { n: usize, d: usize, clusters: usize, spread: f64, seed: Option<u64> },
}

impl SynthSpec {
    pub fn n(&self) -> usize {
        match *self {
            SynthSpec::Classification { n, .. } | SynthSpec::Regression { n, .. } | SynthSpec::Blobs { n, .. } => n,
        }
    }

    pub fn with_n(mut self, size: usize) -> Self {
        match &mut self {
            SynthSpec::Classification { n, .. } | SynthSpec::Regression { n, .. } | SynthSpec::Blobs { n, .. } => {
                *n = size
            }
        }
        self
    }

    fn seed(&self) -> Option<u64> {
        match *self {
            SynthSpec::Classification { seed, .. }
            | SynthSpec::Regression { seed, .. }
            | SynthSpec::Blobs { seed, .. } => seed,
        }
    }

    /// Generates the dataset; `fallback_seed` is used when the spec names none.
    pub fn generate(&self, fallback_seed: u64) -> treecv::Result<Dataset<f64>> {
        let seed = self.seed().unwrap_or(fallback_seed);
        match *self {
            SynthSpec::Classification { n, d, margin, noise, .. } => synth_classification(n, d, margin, noise, seed),
            SynthSpec::Regression { n, d, noise, .. } => synth_regression(n, d, noise, seed),
            SynthSpec::Blobs { n, d, clusters, spread, .. } => synth_blobs(n, d, clusters, spread, seed),
        }
    }
}

impl FromStr for SynthSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut n = 1000usize;
        let mut d = 10usize;
        let mut margin = 0.0f64;
        let mut noise = 0.1f64;
        let mut clusters = 3usize;
        let mut spread = 1.0f64;
        let mut seed = None;
        for pair in rest.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{pair}'"))?;
            let bad = || format!("bad value for {key}: '{value}'");
            match key {
                "n" => n = value.parse().map_err(|_| bad())?,
                "d" => d = value.parse().map_err(|_| bad())?,
                "margin" => margin = value.parse().map_err(|_| bad())?,
                "noise" => noise = value.parse().map_err(|_| bad())?,
                "clusters" => clusters = value.parse().map_err(|_| bad())?,
                "spread" => spread = value.parse().map_err(|_| bad())?,
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(format!("unknown synth key '{key}'")),
            }
        }
        match kind {
            "classification" => Ok(SynthSpec::Classification { n, d, margin, noise, seed }),
            "regression" => Ok(SynthSpec::Regression { n, d, noise, seed }),
            "blobs" => Ok(SynthSpec::Blobs { n, d, clusters, spread, seed }),
            _ => Err(format!("unknown synth kind '{kind}' (classification, regression, blobs)")),
        }
    }
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SynthSpec::Classification { n, d, margin, noise, .. } => {
                write!(f, "classification:n={n},d={d},margin={margin:?},noise={noise:?}")?
            }
            SynthSpec::Regression { n, d, noise, .. } => write!(f, "regression:n={n},d={d},noise={noise:?}")?,
            SynthSpec::Blobs { n, d, clusters, spread, .. } => {
                write!(f, "blobs:n={n},d={d},clusters={clusters},spread={spread:?}")?
            }
        }
        match self.seed() {
            Some(seed) => write!(f, ",seed={seed}"),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    Synth(SynthSpec),
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::File(path) => write!(f, "{}", path.display()),
            DataSource::Synth(spec) => spec.fmt(f),
        }
    }
}

/// Preprocessing applied after loading, fitted on the whole dataset.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Preprocess {
    /// Class value mapped to `+1`; every other value becomes `-1`.
    pub binarize: Option<f64>,
    /// Divide features by their standard deviation.
    pub scale: bool,
    /// Min-max scale real targets onto `[0, 1]`.
    pub unit_targets: bool,
}

/// A fold count; `N` means one point per chunk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    N,
}

impl KChoice {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            KChoice::Fixed(k) => k,
            KChoice::N => n,
        }
    }

    /// Parses `5,10,n`.
    pub fn parse_list(s: &str) -> Result<Vec<KChoice>, String> {
        s.split(',').map(str::trim).map(str::parse).collect()
    }
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "n" | "N" => Ok(KChoice::N),
            _ => s.parse().map(KChoice::Fixed).map_err(|_| format!("bad fold count '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub source: DataSource,
    pub preprocess: Preprocess,
    /// Dimension to enforce when parsing a file.
    pub dim: Option<usize>,
    pub learner: LearnerSpec,
    pub loss: Loss,
    pub ks: Vec<KChoice>,
    pub schedulers: Vec<Scheduler>,
    pub orderings: Vec<FeedOrder>,
    pub reps: usize,
    pub seed: u64,
    /// Worker threads per run; 1 runs sequentially.
    pub threads: usize,
    pub strategy: Strategy,
    pub trace: bool,
    pub verify: bool,
    /// Standard-CV runs needing more point updates than this are skipped.
    pub standard_budget: Option<u64>,
    /// Dataset sizes for `bench`; empty means the whole dataset.
    pub n_grid: Vec<usize>,
}

impl ExperimentPlan {
    /// Plan with defaults for everything but the data and learner.
    pub fn new(source: DataSource, learner: LearnerSpec) -> Self {
        Self {
            source,
            preprocess: Preprocess::default(),
            dim: None,
            loss: learner.default_loss(),
            learner,
            ks: vec![KChoice::Fixed(5), KChoice::Fixed(10)],
            schedulers: vec![Scheduler::Tree, Scheduler::Standard],
            orderings: vec![FeedOrder::Fixed],
            reps: 1,
            seed: 0,
            threads: 1,
            strategy: Strategy::Copy,
            trace: false,
            verify: false,
            standard_budget: Some(DEFAULT_BUDGET),
            n_grid: Vec::new(),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.reps == 0 {
            return Err(invalid("--reps must be at least 1"));
        }
        if self.threads == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        if self.ks.is_empty() || self.schedulers.is_empty() || self.orderings.is_empty() {
            return Err(invalid("plan has no runs: empty k, scheduler or ordering list"));
        }
        if self.ks.iter().any(|&k| k == KChoice::Fixed(0) || k == KChoice::Fixed(1)) {
            return Err(invalid("fold counts must be at least 2"));
        }
        if self.strategy == Strategy::SaveRevert && self.threads > 1 {
            return Err(invalid("the save-revert strategy runs sequentially; use --threads 1"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("--n-grid must be strictly ascending"));
        }
        let expected = self.learner.default_loss();
        if self.loss != expected {
            return Err(invalid(format!(
                "{} is scored with the {} loss, not {}",
                self.learner.name(),
                crate::learner::loss_flag(expected),
                crate::learner::loss_flag(self.loss)
            )));
        }
        Ok(())
    }

    /// Loads, preprocesses and checks the dataset against the learner.
    /// Synthetic data is generated at the largest grid size when that
    /// exceeds the spec's `n`.
    pub fn load(&self) -> anyhow::Result<Dataset<f64>> {
        let raw = match &self.source {
            DataSource::File(path) => {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                parse_sparse_text(BufReader::new(file), self.dim)
                    .map_err(|err| invalid(format!("{}: {err}", path.display())))?
            }
            DataSource::Synth(spec) => {
                let n = self.n_grid.last().copied().unwrap_or(0).max(spec.n());
                spec.with_n(n).generate(self.seed).map_err(|err| invalid(err.to_string()))?
            }
        };
        let data = prepare(raw, self.learner, self.preprocess)?;
        if let Some(&largest) = self.n_grid.last() {
            if largest > data.len() {
                return Err(invalid(format!(
                    "--n-grid asks for {largest} points but the dataset has {}",
                    data.len()
                )));
            }
        }
        Ok(data)
    }
}

pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// Applies preprocessing and converts outcomes to what `learner` consumes.
pub fn prepare(
    mut data: Dataset<f64>,
    learner: LearnerSpec,
    preprocess: Preprocess,
) -> anyhow::Result<Dataset<f64>> {
    let bad = |err: treecv::CvError| invalid(err.to_string());
    if data.is_empty() {
        return Err(invalid("dataset is empty"));
    }
    if let Some(class) = preprocess.binarize {
        data = fit_apply_transform(&data, TransformKind::Binarize(class)).map_err(bad)?.0;
    }
    if preprocess.scale {
        data = fit_apply_transform(&data, TransformKind::UnitVariance).map_err(bad)?.0;
    }
    if preprocess.unit_targets {
        data = fit_apply_transform(&data, TransformKind::TargetsToUnit).map_err(bad)?.0;
    }
    match learner {
        LearnerSpec::Pegasos { .. } => data.with_binary_labels().map_err(bad),
        LearnerSpec::KMeans { .. } => Ok(data.without_labels()),
        LearnerSpec::LsqSgd { .. } | LearnerSpec::Mean => match data.points()[0].y {
            Outcome::Real(_) => Ok(data),
            _ => Err(invalid(format!("{} needs real-valued targets", learner.name()))),
        },
    }
}

/// Seed of repetition `rep`; also the scheduler seed of its runs.
pub fn rep_seed(base: u64, rep: usize) -> u64 {
    CounterRng::new(base).derive(&[REP_TAG, rep as u64]).next_u64()
}

/// The dataset as seen by repetition `rep`: a seeded shuffle.
pub fn rep_dataset(data: &Dataset<f64>, base: u64, rep: usize) -> Dataset<f64> {
    shuffle_dataset(data, rep_seed(base, rep))
}

pub fn parse_schedulers(s: &str) -> Result<Vec<Scheduler>, String> {
    match s {
        "tree" => Ok(vec![Scheduler::Tree]),
        "standard" => Ok(vec![Scheduler::Standard]),
        "both" => Ok(vec![Scheduler::Tree, Scheduler::Standard]),
        _ => Err(format!("unknown scheduler '{s}' (tree, standard, both)")),
    }
}

pub fn parse_orderings(s: &str) -> Result<Vec<FeedOrder>, String> {
    match s {
        "fixed" => Ok(vec![FeedOrder::Fixed]),
        "randomized" => Ok(vec![FeedOrder::Randomized]),
        "both" => Ok(vec![FeedOrder::Fixed, FeedOrder::Randomized]),
        _ => Err(format!("unknown ordering '{s}' (fixed, randomized, both)")),
    }
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "copy" => Ok(Strategy::Copy),
        "save-revert" => Ok(Strategy::SaveRevert),
        _ => Err(format!("unknown strategy '{s}' (copy, save-revert)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synth_spec_round_trips_through_display() {
        for text in [
            "classification:n=20,d=3,margin=0.5,noise=0.0",
            "regression:n=7,d=1,noise=0.25,seed=9",
            "blobs:n=30,d=2,clusters=4,spread=0.0",
        ] {
            let spec: SynthSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert!("cubes:n=3".parse::<SynthSpec>().is_err());
        assert!("regression:n=x".parse::<SynthSpec>().is_err());
        assert!("regression:q=1".parse::<SynthSpec>().is_err());
    }

    #[test]
    fn k_lists() {
        assert_eq!(
            KChoice::parse_list("2, 5,n").unwrap(),
            vec![KChoice::Fixed(2), KChoice::Fixed(5), KChoice::N]
        );
        assert!(KChoice::parse_list("2,x").is_err());
        assert_eq!(KChoice::N.resolve(17), 17);
    }

    #[test]
    fn validation() {
        let plan = ExperimentPlan::new(
            DataSource::Synth("regression:n=20".parse().unwrap()),
            LearnerSpec::Mean,
        );
        plan.validate().unwrap();
        let mut bad = plan.clone();
        bad.loss = Loss::Misclassification;
        assert!(bad.validate().is_err());
        let mut bad = plan.clone();
        bad.ks = vec![KChoice::Fixed(1)];
        assert!(bad.validate().is_err());
        let mut bad = plan;
        bad.n_grid = vec![10, 10];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn rep_datasets_differ_and_repeat() {
        let data = SynthSpec::Regression { n: 50, d: 2, noise: 0.1, seed: None }.generate(3).unwrap();
        assert_eq!(rep_dataset(&data, 1, 0), rep_dataset(&data, 1, 0));
        assert_ne!(rep_dataset(&data, 1, 0), rep_dataset(&data, 1, 1));
    }

    #[test]
    fn pegasos_needs_plus_minus_one() {
        let data = SynthSpec::Regression { n: 10, d: 2, noise: 0.1, seed: None }.generate(3).unwrap();
        assert!(prepare(data, LearnerSpec::Pegasos { lambda: 0.1 }, Preprocess::default()).is_err());
    }
}
