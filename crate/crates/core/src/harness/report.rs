//! CSV output of campaigns.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::{mean_std, TrialRecord};
use crate::error::{Error, Result};

#[derive(Serialize)]
struct TrialRow<'a> {
    trial: usize,
    rounds: usize,
    guesses: usize,
    mode: String,
    oracle: &'a str,
    outcome: String,
    tame_count: u64,
    wild_count_computed: u64,
    wild_count_predicted: u64,
    max_depth: usize,
    min_tame_depth: Option<usize>,
    gb_time_mean_s: f64,
    gb_time_std_s: f64,
    total_s: f64,
}

/// Campaign aggregate in the layout of the published runtime table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub guessed_vars: usize,
    pub solving_time_s: f64,
    pub std_dev_s: f64,
    pub tame_cases: u64,
    pub total_cases: u64,
    pub tame_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRow {
    pub depth: usize,
    pub tame: u64,
    pub wild: u64,
    pub tame_fraction: f64,
}

fn fraction(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

/// Tame-case Gröbner times pooled over all trials.
pub fn summarize(records: &[TrialRecord]) -> Summary {
    let times: Vec<f64> = records.iter().flat_map(|r| r.tame_gb_seconds()).collect();
    let (mean, std) = mean_std(&times);
    let tame: u64 = records.iter().map(|r| r.stats.tame_cases()).sum();
    let wild: u64 = records.iter().map(|r| r.stats.wild_cases()).sum();
    Summary {
        guessed_vars: records.first().map_or(0, |r| r.guesses),
        solving_time_s: mean,
        std_dev_s: std,
        tame_cases: tame,
        total_cases: tame + wild,
        tame_fraction: fraction(tame, tame + wild),
    }
}

pub fn depth_profile(records: &[TrialRecord]) -> Vec<DepthRow> {
    let mut rows: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for r in records {
        for (&d, &n) in &r.stats.tame_by_depth {
            rows.entry(d).or_default().0 += n;
        }
        for (&d, &n) in &r.stats.wild_by_depth {
            rows.entry(d).or_default().1 += n;
        }
    }
    rows.into_iter()
        .map(|(depth, (tame, wild))| DepthRow {
            depth,
            tame,
            wild,
            tame_fraction: fraction(tame, tame + wild),
        })
        .collect()
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::Writer::from_writer(file))
}

fn flush(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = writer(path)?;
    for r in records {
        let (mean, std) = mean_std(&r.tame_gb_seconds());
        w.serialize(TrialRow {
            trial: r.trial,
            rounds: r.rounds,
            guesses: r.guesses,
            mode: r.mode.to_string(),
            oracle: &r.oracle,
            outcome: r.outcome.to_string(),
            tame_count: r.stats.tame_cases(),
            wild_count_computed: r.stats.computed_wild,
            wild_count_predicted: r.stats.predicted_wild,
            max_depth: r.stats.max_depth,
            min_tame_depth: r.stats.min_tame_depth,
            gb_time_mean_s: mean,
            gb_time_std_s: std,
            total_s: r.total.as_secs_f64(),
        })?;
    }
    flush(w, path)
}

pub fn write_summary_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.serialize(summarize(records))?;
    flush(w, path)
}

pub fn write_depth_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut w = writer(path)?;
    for row in depth_profile(records) {
        w.serialize(row)?;
    }
    flush(w, path)
}
