//! Gap between single-pass and chunked training on held-out data.
//!
//! For each seed the single-pass model sees all training points in one
//! random order; the chunked model sees the same points chunk by chunk,
//! each chunk in its own random order. Chunk `j` draws its order from
//! stream `j + 1` and the single pass from stream `1`, so one chunk
//! reproduces the single pass exactly.

use serde::Serialize;
use treecv::{evaluate_chunk, CounterRng, Dataset, IncrementalLearner, Loss, Partition, WorkCounters};

use crate::invalid;
use crate::learner::LearnerSpec;
use crate::plan::{prepare, Preprocess, SynthSpec};
use crate::report::mean_std;

const STABILITY_TAG: u64 = 0x7374_6162; // "stab"

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityPlan {
    pub learner: LearnerSpec,
    pub synth: SynthSpec,
    pub ns: Vec<usize>,
    pub seeds: usize,
    /// Number of sequential chunks `l`.
    pub chunks: usize,
    pub test_size: usize,
    pub seed: u64,
}

pub const DEFAULT_SYNTH: &str = "classification:d=20,noise=0.1";
pub const DEFAULT_NS: &str = "500,2000,8000";
pub const DEFAULT_SEEDS: usize = 50;
pub const DEFAULT_CHUNKS: usize = 10;
pub const DEFAULT_TEST_SIZE: usize = 2000;

impl Default for StabilityPlan {
    /// PEGASOS on noisy 20-dimensional classification data.
    fn default() -> Self {
        Self {
            learner: LearnerSpec::Pegasos { lambda: crate::learner::DEFAULT_LAMBDA },
            synth: DEFAULT_SYNTH.parse().expect("valid default"),
            ns: DEFAULT_NS.split(',').map(|n| n.parse().expect("valid default")).collect(),
            seeds: DEFAULT_SEEDS,
            chunks: DEFAULT_CHUNKS,
            test_size: DEFAULT_TEST_SIZE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: usize,
    pub chunks: usize,
    pub seeds: usize,
    pub mean_gap: f64,
    pub std_gap: f64,
    pub mean_risk_batch: f64,
    pub mean_risk_chunked: f64,
}

/// Held-out risk of the single-pass and the chunked model for one seed.
pub fn gap_once(
    learner: LearnerSpec,
    loss: Loss,
    train: &Dataset<f64>,
    test: &Dataset<f64>,
    chunks: usize,
    seed: u64,
) -> anyhow::Result<(f64, f64)> {
    let n = train.len();
    let orders = CounterRng::new(seed).split(STABILITY_TAG);
    let proto = learner.build(train.dim(), n)?;
    let points = train.points();

    let mut batch = proto.clone();
    let order = orders.split(1).permutation(n);
    batch.update(order.iter().map(|&i| &points[i]))?;

    let mut chunked = proto;
    let spans: Vec<_> = if chunks == 1 {
        std::iter::once(0..n).collect()
    } else {
        let partition = Partition::new(n, chunks)?;
        (0..chunks).map(|j| partition.chunk(j)).collect()
    };
    for (j, span) in spans.into_iter().enumerate() {
        let perm = orders.split(j as u64 + 1).permutation(span.len());
        chunked.update(perm.iter().map(|&i| &points[span.start + i]))?;
    }

    let mut counters = WorkCounters::default();
    Ok((
        evaluate_chunk(&batch, test.points(), loss, &mut counters)?,
        evaluate_chunk(&chunked, test.points(), loss, &mut counters)?,
    ))
}

pub fn cmd_stability(plan: &StabilityPlan) -> anyhow::Result<Vec<GapRow>> {
    if plan.seeds == 0 || plan.ns.is_empty() || plan.test_size == 0 {
        return Err(invalid("stability needs at least one size, one seed and a test set"));
    }
    if plan.ns.iter().any(|&n| n < plan.chunks) || plan.chunks == 0 {
        return Err(invalid(format!("every n must be at least the chunk count {}", plan.chunks)));
    }
    let loss = plan.learner.default_loss();
    plan.ns
        .iter()
        .map(|&n| {
            let mut gaps = Vec::with_capacity(plan.seeds);
            let mut batch_risk = Vec::with_capacity(plan.seeds);
            let mut chunked_risk = Vec::with_capacity(plan.seeds);
            for s in 0..plan.seeds {
                let seed = CounterRng::new(plan.seed)
                    .derive(&[STABILITY_TAG, n as u64, s as u64])
                    .next_u64();
                let data = plan.synth.with_n(n + plan.test_size).generate(seed)?;
                let data = prepare(data, plan.learner, Preprocess::default())?;
                let mut points = data.into_points();
                let test = Dataset::from_points(points.split_off(n))?;
                let train = Dataset::from_points(points)?;
                let (b, c) = gap_once(plan.learner, loss, &train, &test, plan.chunks, seed)?;
                gaps.push((b - c).abs());
                batch_risk.push(b);
                chunked_risk.push(c);
            }
            let (mean_gap, std_gap) = mean_std(&gaps).expect("seeds > 0");
            Ok(GapRow {
                n,
                chunks: plan.chunks,
                seeds: plan.seeds,
                mean_gap,
                std_gap,
                mean_risk_batch: mean_std(&batch_risk).expect("seeds > 0").0,
                mean_risk_chunked: mean_std(&chunked_risk).expect("seeds > 0").0,
            })
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(rows: &[GapRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
