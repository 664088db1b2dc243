//! Aggregation of run records into mean and standard deviation per cell.
//!
//! Standard deviations are population deviations (divide by the count).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use treecv::ExactSum;

use crate::invalid;
use crate::records::{RunRecord, STATUS_OK};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GroupKey {
    pub source: String,
    pub learner: String,
    pub params: String,
    pub loss: String,
    pub n: usize,
    pub k: usize,
    pub scheduler: String,
    pub ordering: String,
}

impl GroupKey {
    fn of(r: &RunRecord) -> Self {
        Self {
            source: r.source.clone(),
            learner: r.learner.clone(),
            params: r.params.clone(),
            loss: r.loss.clone(),
            n: r.n,
            k: r.k,
            scheduler: r.scheduler.clone(),
            ordering: r.ordering.clone(),
        }
    }
}

/// One aggregate cell. `mean` and `std` are absent when no run succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub key: GroupKey,
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Rows that contributed.
    pub row_ids: Vec<u64>,
    /// Rows of the group that did not succeed.
    pub excluded_row_ids: Vec<u64>,
}

pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let count = values.len() as f64;
    let mut sum = ExactSum::new();
    values.iter().for_each(|&v| sum.add(v));
    let mean = sum.total() / count;
    let mut sq = ExactSum::new();
    values.iter().for_each(|&v| sq.add((v - mean) * (v - mean)));
    Some((mean, (sq.total() / count).sqrt()))
}

/// Groups records by everything but the repetition, in key order.
pub fn cmd_report(records: &[RunRecord]) -> anyhow::Result<Vec<Aggregate>> {
    if records.is_empty() {
        return Err(invalid("no records to report"));
    }
    let mut groups: BTreeMap<GroupKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(GroupKey::of(r)).or_default().push(r);
    }
    let cells = groups
        .into_iter()
        .map(|(key, rows)| {
            let (ok, bad): (Vec<&RunRecord>, Vec<&RunRecord>) =
                rows.into_iter().partition(|r| r.status == STATUS_OK && r.estimate.is_some());
            let values: Vec<f64> = ok.iter().filter_map(|r| r.estimate).collect();
            let stats = mean_std(&values);
            Aggregate {
                key,
                count: values.len(),
                mean: stats.map(|s| s.0),
                std: stats.map(|s| s.1),
                row_ids: ok.iter().map(|r| r.row_id).collect(),
                excluded_row_ids: bad.iter().map(|r| r.row_id).collect(),
            }
        })
        .collect();
    Ok(cells)
}

#[derive(Debug, Serialize)]
struct AggregateRow<'a> {
    source: &'a str,
    learner: &'a str,
    params: &'a str,
    loss: &'a str,
    n: usize,
    k: usize,
    scheduler: &'a str,
    ordering: &'a str,
    count: usize,
    mean: Option<f64>,
    std: Option<f64>,
    row_ids: String,
    excluded_row_ids: String,
}

fn id_list(ids: &[u64]) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn write_csv<W: std::io::Write>(cells: &[Aggregate], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(AggregateRow {
            source: &c.key.source,
            learner: &c.key.learner,
            params: &c.key.params,
            loss: &c.key.loss,
            n: c.key.n,
            k: c.key.k,
            scheduler: &c.key.scheduler,
            ordering: &c.key.ordering,
            count: c.count,
            mean: c.mean,
            std: c.std,
            row_ids: id_list(&c.row_ids),
            excluded_row_ids: id_list(&c.excluded_row_ids),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Text tables, one per dataset/learner: a row per fold count and a column
/// per scheduler and ordering. Cells without a successful run read `N/A`.
pub fn render_tables(cells: &[Aggregate]) -> String {
    let mut tables: BTreeMap<(&str, &str, &str, &str, usize), Vec<&Aggregate>> = BTreeMap::new();
    for c in cells {
        let key = (&c.key.source[..], &c.key.learner[..], &c.key.params[..], &c.key.loss[..], c.key.n);
        tables.entry(key).or_default().push(c);
    }
    let mut text = String::from("# mean ± population std over repetitions\n");
    for ((source, learner, params, loss, n), cells) in tables {
        let mut columns: Vec<(&str, &str)> = cells
            .iter()
            .map(|c| (&c.key.scheduler[..], &c.key.ordering[..]))
            .collect();
        columns.sort();
        columns.dedup();
        let mut ks: Vec<usize> = cells.iter().map(|c| c.key.k).collect();
        ks.sort_unstable();
        ks.dedup();

        let _ = writeln!(text, "\n{source} | {learner} {params} | loss {loss} | n = {n}");
        let mut rows = vec![std::iter::once("k".to_string())
            .chain(columns.iter().map(|(s, o)| format!("{s}/{o}")))
            .collect::<Vec<_>>()];
        for &k in &ks {
            let mut row = vec![if k == n { "n".to_string() } else { k.to_string() }];
            for col in &columns {
                let cell = cells
                    .iter()
                    .find(|c| c.key.k == k && (&c.key.scheduler[..], &c.key.ordering[..]) == *col);
                row.push(match cell.and_then(|c| c.mean.zip(c.std)) {
                    Some((m, s)) => format!("{m:.4} ± {s:.4}"),
                    None => "N/A".into(),
                });
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell:>w$}"))
                .collect();
            let _ = writeln!(text, "{}", line.join("  ").trim_end());
        }
    }
    text
}
