//! CSV output and trailing-window summaries.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::experiment::EpisodeRecord;
use super::scenario::Policy;

pub const CSV_HEADER: &str = "episode,mean_reward,final_battery,sigma,seconds";

pub fn csv_file_name(scenario: &str, policy: Policy, seed: u64) -> String {
    format!("{scenario}_{policy}_seed{seed}.csv")
}

/// One row per episode. With `include_timing` false the `seconds` column
/// is written as 0, making the file a pure function of (scenario, seed).
pub fn write_csv<W: Write>(mut w: W, records: &[EpisodeRecord], include_timing: bool) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let secs = if include_timing { r.seconds } else { 0.0 };
        writeln!(w, "{},{},{},{},{}", r.episode, r.mean_reward, r.final_battery, r.sigma, secs)?;
    }
    w.flush()
}

pub fn write_csv_file(
    dir: &Path,
    scenario: &str,
    policy: Policy,
    seed: u64,
    records: &[EpisodeRecord],
    include_timing: bool,
) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(csv_file_name(scenario, policy, seed));
    let f = fs::File::create(&path)?;
    write_csv(io::BufWriter::new(f), records, include_timing)?;
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    /// Mean per-slot reward over the last `window` episodes.
    pub trailing_mean: f64,
    pub window: usize,
    pub best_episode: usize,
    pub best_mean: f64,
    pub episodes: usize,
}

/// Trailing-window mean and best episode. A window longer than the run is
/// clamped with a warning; `None` for an empty run.
pub fn summarize(records: &[EpisodeRecord], window: usize) -> Option<Summary> {
    if records.is_empty() {
        return None;
    }
    let mut w = window.max(1);
    if w > records.len() {
        log::warn!("trailing window {w} exceeds {} episodes; clamping", records.len());
        w = records.len();
    }
    let tail = &records[records.len() - w..];
    let trailing_mean = tail.iter().map(|r| r.mean_reward).sum::<f64>() / w as f64;
    let best = records.iter().fold(&records[0], |b, r| if r.mean_reward > b.mean_reward { r } else { b });
    Some(Summary {
        trailing_mean,
        window: w,
        best_episode: best.episode,
        best_mean: best.mean_reward,
        episodes: records.len(),
    })
}

/// Plain-text table, one row per labelled summary.
pub fn comparison_table(rows: &[(String, Summary)]) -> String {
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>9}  {:>14}  {:>12}  {:>9}", "run", "episodes", "trailing mean", "best mean", "best ep");
    for (label, s) in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>14.4}  {:>12.4}  {:>9}",
            label, s.episodes, s.trailing_mean, s.best_mean, s.best_episode
        );
    }
    out
}
