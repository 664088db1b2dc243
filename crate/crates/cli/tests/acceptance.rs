//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use treecv::dataio::{parse_sparse_str, synth_classification, synth_regression, to_sparse_text};
use treecv::learners::project_unit_ball;
use treecv::{
    brute_force_oracle, evaluate_chunk, loocv, standard_cv, standard_cv_with_threads, tree_cv,
    tree_feed_order, CounterRng, CvError, DataPoint, Dataset, FeedOrder, IncrementalLearner, Label,
    Loss, LsqSgd, MeanPredictor, OnlineKMeans, Parallelism, ParseErrorKind, Partition, Pegasos,
    Prediction, Strategy, TreeCvConfig, WorkCounters,
};
use treecv_cli::learner::{LearnerSpec, DEFAULT_LAMBDA};
use treecv_cli::plan::{DataSource, ExperimentPlan, KChoice};
use treecv_cli::records::{read_records, RecordSink};
use treecv_cli::report::cmd_report;
use treecv_cli::run::cmd_run;
use treecv_cli::stability::{cmd_stability, StabilityPlan};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type ErrorCase = (&'static str, usize, fn(&ParseErrorKind) -> bool);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

fn ok<T>(r: treecv::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = CounterRng::new(1);
    let mut compared = 0;
    for case in 0..50u64 {
        let n = 7 + rng.below(194) as usize;
        let d = 1 + rng.below(5) as usize;
        let data: Dataset<f64> = ok(synth_regression(n, d, 0.3, 100 + case))?;
        for k in [2, 3, 5, 7, n] {
            let p = ok(Partition::new(n, k))?;
            for ordering in [FeedOrder::Fixed, FeedOrder::Randomized] {
                let cfg = TreeCvConfig { ordering, seed: case, ..TreeCvConfig::default() };
                let tree = ok(tree_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, &cfg))?;
                let std = ok(standard_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, ordering, case))?;
                for (fold, (a, b)) in tree.per_fold_scores.iter().zip(&std.per_fold_scores).enumerate() {
                    ensure!(rel_close(*a, *b, 1e-12), "case {case} n={n} k={k} fold {fold}: {a} vs {b}");
                }
                ensure!(rel_close(tree.estimate, std.estimate, 1e-12), "case {case} k={k} estimate");
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} tree/standard comparisons within 1e-12 relative, fold by fold"))
}

fn replay_matches<L, F>(factory: F, data: &Dataset<f64>, k: usize, loss: Loss) -> Result<(), String>
where
    L: IncrementalLearner<f64>,
    F: Fn() -> L,
{
    let p = ok(Partition::new(data.len(), k))?;
    let tree = ok(tree_cv(&factory, data, &p, loss, &TreeCvConfig::default()))?;
    let orders: Vec<_> = (0..k).map(|f| tree_feed_order(&p, f, FeedOrder::Fixed, 0)).collect();
    let oracle = ok(brute_force_oracle(&factory, data, &p, loss, &orders, 0))?;
    ensure!(
        bits(&tree.per_fold_scores) == bits(&oracle.per_fold_scores),
        "n={} k={k}: {:?} vs {:?}",
        data.len(),
        tree.per_fold_scores,
        oracle.per_fold_scores
    );
    Ok(())
}

fn criterion_2() -> Outcome {
    let mut runs = 0;
    for (i, n) in [16usize, 37, 128, 257, 500].into_iter().enumerate() {
        let cls: Dataset<f64> = ok(synth_classification(n, 6, 0.05, 0.1, i as u64))?;
        let reg: Dataset<f64> = ok(synth_regression(n, 6, 0.1, i as u64))?;
        for k in [4, 8, 16] {
            replay_matches(|| Pegasos::new(6, 0.01).unwrap(), &cls, k, Loss::Misclassification)?;
            replay_matches(|| LsqSgd::with_dataset_size(6, n).unwrap(), &reg, k, Loss::SquaredError)?;
            runs += 2;
        }
    }
    Ok(format!("{runs} PEGASOS/LSQSGD runs bit-identical to replayed tree orders"))
}

fn criterion_3() -> Outcome {
    let data: Dataset<f64> = ok(synth_regression(200, 2, 0.1, 3))?;
    for k in 2..=64 {
        let p = ok(Partition::new(200, k))?;
        for strategy in [Strategy::Copy, Strategy::SaveRevert] {
            let cfg = TreeCvConfig { strategy, ..TreeCvConfig::default() };
            let r = ok(tree_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, &cfg))?;
            let k = k as u64;
            ensure!(r.counters.nodes_visited == 2 * k - 1, "k={k}: {} nodes", r.counters.nodes_visited);
            ensure!(r.counters.snapshots == k - 1, "k={k}: {} snapshots", r.counters.snapshots);
        }
    }
    Ok("nodes = 2k-1 and snapshots = k-1 for k = 2..64, both strategies".into())
}

fn ceil_log2(k: usize) -> u64 {
    (usize::BITS - (k - 1).leading_zeros()) as u64
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for n in [64usize, 100, 257, 1000] {
        let data: Dataset<f64> = ok(synth_regression(n, 1, 0.1, n as u64))?;
        for k in 2..=64.min(n) {
            let p = ok(Partition::new(n, k))?;
            let r = ok(tree_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, &TreeCvConfig::default()))?;
            let bound = n as u64 * ceil_log2(k);
            ensure!(r.counters.point_updates <= bound, "n={n} k={k}: {} > {bound}", r.counters.point_updates);
            checked += 1;
        }
    }
    for k in [2usize, 4, 8, 16] {
        for b in [1usize, 3, 10] {
            let n = b * k;
            let data: Dataset<f64> = ok(synth_regression(n, 1, 0.1, 9))?;
            let p = ok(Partition::new(n, k))?;
            let tree = ok(tree_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, &TreeCvConfig::default()))?;
            let std = ok(standard_cv(MeanPredictor::new, &data, &p, Loss::SquaredError, FeedOrder::Fixed, 0))?;
            let log = k.trailing_zeros() as u64;
            ensure!(tree.counters.point_updates == n as u64 * log, "n={n} k={k}: tree {}", tree.counters.point_updates);
            ensure!(
                std.counters.point_updates == (n * (k - 1)) as u64,
                "n={n} k={k}: standard {}",
                std.counters.point_updates
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} (n, k) pairs within n*ceil(log2 k); equality at n = bk"))
}

fn criterion_5() -> Outcome {
    let data: Dataset<f64> = ok(synth_classification(2000, 20, 0.1, 0.1, 5))?;
    let factory = || Pegasos::new(20, DEFAULT_LAMBDA).unwrap();
    let tree = ok(loocv(factory, &data, Loss::Misclassification, &TreeCvConfig::default()))?;
    let p = ok(Partition::new(2000, 2000))?;
    let std = ok(standard_cv(factory, &data, &p, Loss::Misclassification, FeedOrder::Fixed, 0))?;
    let (t, s) = (tree.wall_time.as_secs_f64(), std.wall_time.as_secs_f64());
    ensure!(t * 10.0 <= s, "tree {t:.4}s vs standard {s:.4}s");
    Ok(format!(
        "tree {t:.4}s vs standard {s:.4}s ({:.0}x); point updates {} vs {}",
        s / t,
        tree.counters.point_updates,
        std.counters.point_updates
    ))
}

fn criterion_6() -> Outcome {
    let plan = StabilityPlan { ns: vec![500, 8000], ..StabilityPlan::default() };
    let rows = cmd_stability(&plan).map_err(|e| e.to_string())?;
    let (small, large) = (rows[0].mean_gap, rows[1].mean_gap);
    ensure!(large < small, "gap at n=8000 {large} is not below n=500 {small}");
    Ok(format!("mean |gap| over {} seeds: n=500 {small:.4}, n=8000 {large:.4}", plan.seeds))
}

fn criterion_7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("runs.csv");
    let mut plan = ExperimentPlan::new(
        DataSource::Synth("classification:n=10000,d=20,noise=0.1".parse()?),
        LearnerSpec::Pegasos { lambda: DEFAULT_LAMBDA },
    );
    plan.ks = vec![KChoice::Fixed(5), KChoice::Fixed(10)];
    plan.orderings = vec![FeedOrder::Randomized];
    plan.reps = 20;
    plan.seed = 7;
    let err = |e: anyhow::Error| e.to_string();
    let data = plan.load().map_err(err)?;
    let mut sink = RecordSink::open(Some(&path)).map_err(err)?;
    cmd_run(&plan, &data, &mut sink, None).map_err(err)?;
    drop(sink);
    let cells = cmd_report(&read_records(&path).map_err(err)?).map_err(err)?;
    let mut lines = Vec::new();
    for k in [5, 10] {
        let cell = |s: &str| cells.iter().find(|c| c.key.k == k && c.key.scheduler == s).unwrap();
        let (t, s) = (cell("tree"), cell("standard"));
        ensure!(t.count == 20 && s.count == 20, "k={k}: missing repetitions");
        // sample variance from the population std
        let m = 20.0;
        let se = ((t.std.unwrap().powi(2) + s.std.unwrap().powi(2)) * m / (m - 1.0) / m).sqrt();
        let diff = (t.mean.unwrap() - s.mean.unwrap()).abs();
        ensure!(diff <= 3.0 * se, "k={k}: |diff| {diff} > 3 * {se}");
        lines.push(format!("k={k} |diff| {diff:.4} <= 3*SE {:.4}", 3.0 * se));
    }
    Ok(lines.join("; "))
}

fn criterion_8() -> Outcome {
    // PEGASOS two-step trace
    let pos = |x: f64| DataPoint::labeled(vec![x], Label::Pos);
    let mut peg = ok(Pegasos::new(1, 1.0))?;
    ok(peg.update_point(&pos(1.0)))?;
    ensure!(peg.weights() == [1.0], "pegasos step 1: {:?}", peg.weights());
    ok(peg.update_point(&pos(1.0)))?;
    ensure!(peg.weights() == [0.5], "pegasos step 2: {:?}", peg.weights());
    ensure!(ok(peg.predict(&[2.0]))? == Prediction::Label(Label::Pos), "pegasos predict");
    let zero = ok(Pegasos::<f64>::new(1, 1.0))?;
    ensure!(ok(zero.predict(&[3.0]))? == Prediction::Label(Label::Pos), "pegasos tie");

    // PEGASOS replay from a snapshot at t = 7
    let data: Dataset<f64> = ok(synth_classification(8, 1, 0.0, 0.0, 1))?;
    let mut a = ok(Pegasos::new(1, 0.1))?;
    ok(a.update(&data.points()[..7]))?;
    let saved = a.snapshot();
    ok(a.update_point(&data.points()[7]))?;
    let first = a.weights().to_vec();
    ok(a.restore(&saved))?;
    ok(a.update_point(&data.points()[7]))?;
    ensure!(bits(&first) == bits(a.weights()), "pegasos replay");

    // LSQSGD step, projection and zero residual
    let mut lsq = ok(LsqSgd::new(1, 0.5))?;
    ok(lsq.update_point(&DataPoint::real(vec![1.0], 1.0)))?;
    ensure!(lsq.current() == [1.0], "lsqsgd step: {:?}", lsq.current());
    ok(lsq.update_point(&DataPoint::real(vec![2.0], 2.0)))?;
    ensure!(lsq.current() == [1.0] && lsq.steps() == 2 && lsq.average() == [1.0], "lsqsgd zero residual");
    let mut v = [3.0f64, 4.0];
    project_unit_ball(&mut v);
    ensure!((v[0] - 0.6).abs() <= 1e-12 && (v[1] - 0.8).abs() <= 1e-12, "projection {v:?}");

    // k-means running mean, nearest center and quantization loss
    let pt = |x: f64| DataPoint::unlabeled(vec![x]);
    let mut one = ok(OnlineKMeans::new(1, 1))?;
    ok(one.update_point(&pt(2.0)))?;
    ensure!(one.centers()[0] == [2.0], "kmeans first center");
    ok(one.update_point(&pt(4.0)))?;
    ensure!(one.centers()[0] == [3.0], "kmeans running mean");
    let mut two = ok(OnlineKMeans::new(1, 2))?;
    ok(two.update(&[pt(0.0), pt(10.0)]))?;
    ensure!(ok(two.predict(&[4.0]))? == Prediction::Center(vec![0.0]), "kmeans nearest");
    let mut c = WorkCounters::default();
    ensure!(ok(evaluate_chunk(&two, &[pt(4.0)], Loss::Quantization, &mut c))? == 16.0, "quantization loss");
    ok(two.update_point(&pt(1.0)))?;
    ensure!(two.centers()[0] == [0.5] && two.centers()[1] == [10.0], "kmeans update");

    // mean predictor
    let mut mean = MeanPredictor::<f64>::new();
    ensure!(matches!(mean.predict(&[]), Err(CvError::UntrainedModel(_))), "untrained mean");
    ok(mean.update(&[DataPoint::real(vec![], 1.0), DataPoint::real(vec![], 2.0)]))?;
    ensure!(ok(mean.predict(&[]))? == Prediction::Real(1.5), "mean prediction");
    Ok("PEGASOS, LSQSGD, k-means and mean hand oracles exact".into())
}

fn criterion_9() -> Outcome {
    let cls: Dataset<f64> = ok(synth_classification(300, 5, 0.0, 0.1, 2))?;
    let reg: Dataset<f64> = ok(synth_regression(300, 5, 0.1, 2))?;
    let mut compared = 0;
    for k in [2, 7, 16, 300] {
        let p = ok(Partition::new(300, k))?;
        for ordering in [FeedOrder::Fixed, FeedOrder::Randomized] {
            let base = TreeCvConfig { ordering, seed: 11, trace: true, ..TreeCvConfig::default() };
            let peg = || Pegasos::new(5, 0.01).unwrap();
            let lsq = || LsqSgd::new(5, 0.1).unwrap();
            let reference_p = ok(tree_cv(peg, &cls, &p, Loss::Misclassification, &base))?;
            let reference_l = ok(tree_cv(lsq, &reg, &p, Loss::SquaredError, &base))?;
            let mut configs = vec![base.clone()];
            configs.push(TreeCvConfig { strategy: Strategy::SaveRevert, ..base.clone() });
            for w in [1, 2, 4, 8] {
                configs.push(TreeCvConfig { parallel: Parallelism::ForkJoin { max_workers: w }, ..base.clone() });
            }
            for cfg in &configs {
                let rp = ok(tree_cv(peg, &cls, &p, Loss::Misclassification, cfg))?;
                let rl = ok(tree_cv(lsq, &reg, &p, Loss::SquaredError, cfg))?;
                ensure!(rp.same_result(&reference_p), "pegasos k={k} {ordering} {cfg:?}");
                ensure!(rl.same_result(&reference_l), "lsqsgd k={k} {ordering} {cfg:?}");
                compared += 2;
            }
            let seq = ok(standard_cv(peg, &cls, &p, Loss::Misclassification, ordering, 11))?;
            let par = ok(standard_cv_with_threads(peg, &cls, &p, Loss::Misclassification, ordering, 11, 4))?;
            ensure!(seq.same_result(&par), "standard k={k} {ordering}");
            compared += 1;
        }
    }
    Ok(format!("{compared} repeated runs identical to their reference (sequential, save-revert, fork-join 1-8 workers)"))
}

fn random_dataset(rng: &mut CounterRng) -> Dataset<f64> {
    let d = 1 + rng.below(12) as usize;
    let n = 1 + rng.below(30) as usize;
    let value = |rng: &mut CounterRng| match rng.below(4) {
        0 => 0.0,
        1 => (rng.below(41) as f64) - 20.0,
        2 => (rng.next_f64() - 0.5) * 10f64.powi(rng.below(40) as i32 - 20),
        _ => f64::from_bits(rng.next_u64() & !(0x7ffu64 << 52) | ((rng.below(2000) + 24) << 52)),
    };
    let mut points: Vec<DataPoint<f64>> = (0..n)
        .map(|_| {
            let x = (0..d).map(|_| value(rng)).collect();
            DataPoint::real(x, value(rng))
        })
        .collect();
    points[0].x[d - 1] = 1.0;
    Dataset::new(d, points).unwrap()
}

fn criterion_10() -> Outcome {
    let mut rng = CounterRng::new(10);
    for case in 0..1000 {
        let data = random_dataset(&mut rng);
        let text = to_sparse_text(&data);
        let back: Dataset<f64> = ok(parse_sparse_str(&text, None))?;
        ensure!(back == data, "case {case} did not round-trip:\n{text}");
    }
    let cases: [ErrorCase; 3] = [
        ("1 1:1\n1 3:1 2:1\n", 2, |k| matches!(k, ParseErrorKind::NonMonotoneIndex { previous: 3, index: 2 })),
        ("1 1:1\n\n-1 0:4\n", 3, |k| matches!(k, ParseErrorKind::ZeroIndex)),
        ("1 1:abc\n", 1, |k| matches!(k, ParseErrorKind::Value { .. })),
    ];
    for (text, line, expected) in cases {
        match parse_sparse_str::<f64>(text, None) {
            Err(CvError::Parse { line: l, kind }) if l == line && expected(&kind) => {}
            other => return Err(format!("{text:?}: got {other:?}")),
        }
    }
    Ok("1000 datasets round-tripped exactly; 3 error cases report their line".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence (mean predictor)", criterion_1),
        ("trace equivalence (PEGASOS, LSQSGD)", criterion_2),
        ("node and snapshot counts", criterion_3),
        ("work bound", criterion_4),
        ("measured LOOCV speedup", criterion_5),
        ("stability gap shrinks", criterion_6),
        ("estimate agreement under randomized ordering", criterion_7),
        ("learner hand oracles", criterion_8),
        ("determinism", criterion_9),
        ("parser round-trip and errors", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
