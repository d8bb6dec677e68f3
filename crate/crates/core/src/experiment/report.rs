//! Experiment outputs.
//!
//! `write_outputs` creates in the output directory:
//!
//! * `results.csv`: feature_set, mean, se, n_runs (se empty with one run)
//! * `scores.csv`: feature_set, run, balanced_accuracy
//! * `confusion.csv`: feature_set, run, seed, and the four confusion counts
//! * `table.txt`: the human-readable summary from [`format_table`]

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ResultsRow, ResultsTable};
use crate::error::{Error, Result};
use crate::evalstats::{ConfusionMatrix, RunScore};

/// `mean ± se` in percent with two decimals and no leading zero on the
/// error, e.g. `69.39 ± .06`; `n/a` when the error is unavailable.
pub fn format_score(mean: f64, se: Option<f64>) -> String {
    let se = match se {
        Some(se) => {
            let s = format!("{:.2}", se * 100.0);
            s.strip_prefix('0').map(str::to_string).unwrap_or(s)
        }
        None => "n/a".to_string(),
    };
    format!("{:.2} ± {se}", mean * 100.0)
}

pub fn format_table(table: &ResultsTable) -> String {
    const HEAD: &str = "Input Features";
    const SCORE: &str = "Balanced Accuracy (% +/- S.E.)";
    let width = table
        .rows
        .iter()
        .map(|r| r.feature_set.chars().count())
        .chain([HEAD.len()])
        .max()
        .unwrap_or(0);
    let mut out = format!("{HEAD:<width$} | {SCORE}\n");
    out.push_str(&format!(
        "{}-+-{}\n",
        "-".repeat(width),
        "-".repeat(SCORE.len())
    ));
    for r in &table.rows {
        out.push_str(&format!(
            "{:<width$} | {}\n",
            r.feature_set,
            format_score(r.mean(), r.standard_error())
        ));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct SummaryRecord {
    feature_set: String,
    mean: f64,
    se: Option<f64>,
    n_runs: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRecord {
    feature_set: String,
    run: usize,
    balanced_accuracy: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConfusionRecord {
    feature_set: String,
    run: usize,
    seed: u64,
    true_pos_pred_pos: u64,
    true_pos_pred_neg: u64,
    true_neg_pred_pos: u64,
    true_neg_pred_neg: u64,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse("csv", 0, format!("{}: {other:?}", path.display())),
    }
}

fn write_csv<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize()
        .map(|rec| rec.map_err(|e| csv_err(path, e)))
        .collect()
}

pub fn write_outputs(dir: impl AsRef<Path>, table: &ResultsTable) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_csv(
        &dir.join("results.csv"),
        table.rows.iter().map(|r| SummaryRecord {
            feature_set: r.feature_set.clone(),
            mean: r.mean(),
            se: r.standard_error(),
            n_runs: r.n_runs(),
        }),
    )?;
    let runs = || {
        table
            .rows
            .iter()
            .flat_map(|r| r.runs.iter().map(move |s| (r, s)))
    };
    write_csv(
        &dir.join("scores.csv"),
        runs().map(|(r, s)| ScoreRecord {
            feature_set: r.feature_set.clone(),
            run: s.run_index,
            balanced_accuracy: s.balanced_accuracy,
        }),
    )?;
    write_csv(
        &dir.join("confusion.csv"),
        runs().map(|(r, s)| ConfusionRecord {
            feature_set: r.feature_set.clone(),
            run: s.run_index,
            seed: s.seed,
            true_pos_pred_pos: s.confusion.counts[0][0],
            true_pos_pred_neg: s.confusion.counts[0][1],
            true_neg_pred_pos: s.confusion.counts[1][0],
            true_neg_pred_neg: s.confusion.counts[1][1],
        }),
    )?;
    let path = dir.join("table.txt");
    std::fs::write(&path, format_table(table)).map_err(|e| Error::io(&path, e))
}

/// Rebuilds a results table from `scores.csv` and `confusion.csv`.
pub fn read_outputs(dir: impl AsRef<Path>) -> Result<ResultsTable> {
    let dir = dir.as_ref();
    let scores: Vec<ScoreRecord> = read_csv(&dir.join("scores.csv"))?;
    let confusion: Vec<ConfusionRecord> = read_csv(&dir.join("confusion.csv"))?;
    let mut cms: BTreeMap<(String, usize), (u64, ConfusionMatrix)> = BTreeMap::new();
    for c in confusion {
        let cm = ConfusionMatrix::from_counts([
            [c.true_pos_pred_pos, c.true_pos_pred_neg],
            [c.true_neg_pred_pos, c.true_neg_pred_neg],
        ]);
        cms.insert((c.feature_set, c.run), (c.seed, cm));
    }
    let mut rows: Vec<ResultsRow> = Vec::new();
    for s in scores {
        let (seed, confusion) = cms
            .get(&(s.feature_set.clone(), s.run))
            .copied()
            .ok_or_else(|| {
                Error::parse(
                    "results",
                    0,
                    format!("no confusion row for {} run {}", s.feature_set, s.run),
                )
            })?;
        let score = RunScore {
            run_index: s.run,
            seed,
            balanced_accuracy: s.balanced_accuracy,
            confusion,
        };
        match rows.iter_mut().find(|r| r.feature_set == s.feature_set) {
            Some(r) => r.runs.push(score),
            None => rows.push(ResultsRow {
                feature_set: s.feature_set,
                runs: vec![score],
            }),
        }
    }
    for r in &mut rows {
        r.runs.sort_by_key(|s| s.run_index);
    }
    Ok(ResultsTable { rows })
}
