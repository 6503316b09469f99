//! Seeded Monte Carlo driver.
//!
//! Each (n, trial) pair samples its strings on substreams derived from
//! (seed, n, trial, string index), builds the tree incrementally, and
//! records height statistics. Trials are embarrassingly parallel; records
//! are aggregated in canonical (n, trial) order, so output is identical
//! for any worker count.

mod csv_out;

pub use csv_out::{dist_label, write_summary_csv, write_trials_csv};

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitstreams::{
    mix_key, sample_string_with, BitstreamError, DistributionSpec, LazyBitString,
    DEFAULT_MAX_DEPTH,
};
use crate::patricia::{distinct_first_one_count, PatriciaError, PatriciaTree};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("trial n={n} trial={trial} failed: {source}")]
    Trial {
        n: u64,
        trial: u64,
        source: PatriciaError,
    },
    #[error("height list must be nonempty")]
    EmptyHeights,
    #[error(transparent)]
    Bitstream(#[from] BitstreamError),
}

fn default_max_depth() -> u64 {
    DEFAULT_MAX_DEPTH
}

fn default_emit_per_trial() -> bool {
    true
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(rename = "dist")]
    pub spec: DistributionSpec,
    pub n_grid: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u64,
    #[serde(default = "default_emit_per_trial")]
    pub emit_per_trial: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.spec
            .validate()
            .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
        if self.n_grid.is_empty() {
            return Err(ExperimentError::InvalidConfig("n_grid is empty".into()));
        }
        if self.n_grid.iter().any(|&n| n == 0) {
            return Err(ExperimentError::InvalidConfig(
                "n_grid entries must be positive".into(),
            ));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::InvalidConfig(
                "n_grid must be strictly ascending".into(),
            ));
        }
        if self.trials == 0 {
            return Err(ExperimentError::InvalidConfig(
                "trials must be at least 1".into(),
            ));
        }
        if self.max_depth == 0 {
            return Err(ExperimentError::InvalidConfig(
                "max_depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub n: u64,
    pub trial_index: u64,
    pub height: u64,
    pub distinct_first_one: u64,
    /// Number of strings starting with the level pattern 0...01 of length
    /// `beta_n`; only defined for the mixture laws.
    pub prefix_match_count: Option<u64>,
    pub max_split_index: u64,
    pub elapsed: Duration,
}

impl TrialRecord {
    /// Equality of everything except wall-clock timing.
    pub fn same_stats(&self, other: &TrialRecord) -> bool {
        self.n == other.n
            && self.trial_index == other.trial_index
            && self.height == other.height
            && self.distinct_first_one == other.distinct_first_one
            && self.prefix_match_count == other.prefix_match_count
            && self.max_split_index == other.max_split_index
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailPoint {
    pub t: u64,
    /// Fraction of trial heights at or below `mean - t`.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: u64,
    pub trials: u64,
    pub mean_height: f64,
    pub std_height: f64,
    pub min_height: u64,
    pub max_height: u64,
    pub h_over_n: f64,
    /// 0 at n = 1, where the denominator vanishes.
    pub h_over_log2n: f64,
    /// mean height over n/alpha_n, for the mixture laws only. Reported
    /// against the resolved sequence, i.e. the log-transformed one for nu.
    pub h_over_floor: Option<f64>,
    pub mean_distinct: f64,
    pub tail: Vec<TailPoint>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn row_for(&self, n: u64) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Number of strings whose first `|v|` bits equal `v`.
pub fn count_prefix_matches(
    strings: &mut [LazyBitString],
    v: &[bool],
) -> Result<u64, ExperimentError> {
    if v.is_empty() {
        return Err(ExperimentError::Bitstream(BitstreamError::EmptyPrefix));
    }
    let mut count = 0u64;
    'strings: for s in strings.iter_mut() {
        for (idx, &bit) in v.iter().enumerate() {
            if s.bit_at(idx as u64 + 1)? != bit {
                continue 'strings;
            }
        }
        count += 1;
    }
    Ok(count)
}

/// Fraction of heights at or below `threshold`.
pub fn empirical_tail(heights: &[u64], threshold: f64) -> Result<f64, ExperimentError> {
    if heights.is_empty() {
        return Err(ExperimentError::EmptyHeights);
    }
    let hits = heights.iter().filter(|&&h| h as f64 <= threshold).count();
    Ok(hits as f64 / heights.len() as f64)
}

/// The level pattern 0...01 of length `beta_n` whose match count is the
/// binomial statistic of the mixture laws, when the spec is a mixture.
fn level_pattern(spec: &DistributionSpec, n: u64) -> Option<Vec<bool>> {
    match spec.resolved().as_ref() {
        DistributionSpec::Mixture { alpha, .. } => {
            let beta = alpha.beta_of(n) as usize;
            let mut v = vec![false; beta];
            v[beta - 1] = true;
            Some(v)
        }
        _ => None,
    }
}

/// Runs one seeded trial: samples `n` strings, inserts them one by one, and
/// measures the tree.
pub fn run_trial(
    config: &ExperimentConfig,
    n: u64,
    trial_index: u64,
) -> Result<TrialRecord, ExperimentError> {
    config.validate()?;
    let start = Instant::now();
    let fail = |source: PatriciaError| ExperimentError::Trial {
        n,
        trial: trial_index,
        source,
    };
    let mut strings: Vec<LazyBitString> = (0..n)
        .map(|i| {
            let key = mix_key(config.seed, &[n, trial_index, i]);
            sample_string_with(&config.spec, key, i as u32, config.max_depth)
                .map_err(|e| fail(e.into()))
        })
        .collect::<Result<_, _>>()?;
    let mut tree = PatriciaTree::new();
    for i in 0..n as u32 {
        tree.insert(&mut strings, i).map_err(fail)?;
    }
    let distinct = distinct_first_one_count(&mut strings).map_err(fail)?;
    let prefix_match_count = match level_pattern(&config.spec, n) {
        Some(v) => Some(count_prefix_matches(&mut strings, &v)?),
        None => None,
    };
    Ok(TrialRecord {
        n,
        trial_index,
        height: tree.height(),
        distinct_first_one: distinct,
        prefix_match_count,
        max_split_index: tree.max_split_index(),
        elapsed: start.elapsed(),
    })
}

/// Runs the full grid, possibly in parallel, and aggregates per-n summaries
/// in canonical order.
pub fn run_grid(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, Summary), ExperimentError> {
    config.validate()?;
    let cells: Vec<(u64, u64)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();
    // Parallel map preserves cell order, which is already (n, trial) sorted.
    let records: Vec<TrialRecord> = cells
        .par_iter()
        .map(|&(n, t)| run_trial(config, n, t))
        .collect::<Result<_, _>>()?;
    let summary = summarize(config, &records)?;
    Ok((records, summary))
}

fn summarize(
    config: &ExperimentConfig,
    records: &[TrialRecord],
) -> Result<Summary, ExperimentError> {
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        let group: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
        if group.is_empty() {
            return Err(ExperimentError::InvalidConfig(format!(
                "no records for n = {n}"
            )));
        }
        let trials = group.len() as u64;
        let heights: Vec<u64> = group.iter().map(|r| r.height).collect();
        let mean = heights.iter().sum::<u64>() as f64 / trials as f64;
        let var = if trials > 1 {
            heights
                .iter()
                .map(|&h| (h as f64 - mean).powi(2))
                .sum::<f64>()
                / (trials - 1) as f64
        } else {
            0.0
        };
        let mean_distinct =
            group.iter().map(|r| r.distinct_first_one).sum::<u64>() as f64 / trials as f64;
        let h_over_floor = match config.spec.resolved().as_ref() {
            DistributionSpec::Mixture { alpha, .. } => {
                Some(mean / (n as f64 / alpha.value_at(n)))
            }
            _ => None,
        };
        let sqrt_n = (n as f64).sqrt().ceil() as u64;
        let tail = [sqrt_n, 2 * sqrt_n, 4 * sqrt_n]
            .into_iter()
            .map(|t| {
                Ok(TailPoint {
                    t,
                    fraction: empirical_tail(&heights, mean - t as f64)?,
                })
            })
            .collect::<Result<_, ExperimentError>>()?;
        rows.push(SummaryRow {
            n,
            trials,
            mean_height: mean,
            std_height: var.sqrt(),
            min_height: *heights.iter().min().expect("nonempty"),
            max_height: *heights.iter().max().expect("nonempty"),
            h_over_n: mean / n as f64,
            h_over_log2n: if n > 1 {
                mean / (n as f64).log2()
            } else {
                0.0
            },
            h_over_floor,
            mean_distinct,
            tail,
        });
    }
    Ok(Summary { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstreams::{parse_bits, AlphaSpec, DEFAULT_A_CAP};

    fn config(spec: DistributionSpec, n_grid: Vec<u64>, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            spec,
            n_grid,
            trials,
            seed,
            max_depth: DEFAULT_MAX_DEPTH,
            emit_per_trial: true,
        }
    }

    fn mixture_config(n_grid: Vec<u64>, trials: u64, seed: u64) -> ExperimentConfig {
        config(
            DistributionSpec::Mixture {
                alpha: AlphaSpec::Power { eps: 0.5 },
                a_cap: DEFAULT_A_CAP,
            },
            n_grid,
            trials,
            seed,
        )
    }

    #[test]
    fn config_validation() {
        let good = config(DistributionSpec::Bernoulli { p: 0.5 }, vec![1, 2], 1, 0);
        assert!(good.validate().is_ok());
        let mut bad = good.clone();
        bad.n_grid = vec![];
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.n_grid = vec![2, 1];
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.trials = 0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.spec = DistributionSpec::Bernoulli { p: 2.0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_string_trial_has_height_zero() {
        let cfg = config(DistributionSpec::Bernoulli { p: 0.5 }, vec![1], 1, 7);
        let rec = run_trial(&cfg, 1, 0).unwrap();
        assert_eq!(rec.height, 0);
        assert_eq!(rec.distinct_first_one, 1);
        assert_eq!(rec.max_split_index, 0);
    }

    #[test]
    fn trial_invariants_hold() {
        let cfg = config(DistributionSpec::MuN { n: 4 }, vec![2, 16, 64], 20, 11);
        for &n in &cfg.n_grid {
            for t in 0..cfg.trials {
                let rec = run_trial(&cfg, n, t).unwrap();
                assert!(rec.height <= n - 1);
                assert!(rec.distinct_first_one >= 1);
                assert!(rec.height + 1 >= rec.distinct_first_one);
                if let Some(x) = rec.prefix_match_count {
                    assert!(x <= n);
                }
            }
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = mixture_config(vec![64], 3, 123);
        for t in 0..3 {
            let a = run_trial(&cfg, 64, t).unwrap();
            let b = run_trial(&cfg, 64, t).unwrap();
            assert!(a.same_stats(&b));
        }
    }

    #[test]
    fn grid_reproducible_across_worker_counts() {
        let cfg = mixture_config(vec![8, 32], 6, 99);
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_grid(&cfg).unwrap())
        };
        let (rec1, sum1) = run_with(1);
        let (rec4, sum4) = run_with(4);
        assert_eq!(rec1.len(), rec4.len());
        for (a, b) in rec1.iter().zip(rec4.iter()) {
            assert!(a.same_stats(b));
        }
        assert_eq!(sum1, sum4);
    }

    #[test]
    fn summary_of_single_leaf_grid() {
        let cfg = config(DistributionSpec::Bernoulli { p: 0.5 }, vec![1], 1, 5);
        let (records, summary) = run_grid(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        let row = summary.row_for(1).unwrap();
        assert_eq!(row.mean_height, 0.0);
        assert_eq!(row.h_over_log2n, 0.0);
        assert_eq!(row.trials, 1);
    }

    #[test]
    fn mixture_summary_reports_floor_ratio() {
        let cfg = mixture_config(vec![256], 4, 3);
        let (_, summary) = run_grid(&cfg).unwrap();
        let row = summary.row_for(256).unwrap();
        // alpha_256 = 16, floor = 16; heights are positive so the ratio is.
        assert!(row.h_over_floor.unwrap() > 0.0);
        let bern = config(DistributionSpec::Bernoulli { p: 0.5 }, vec![16], 2, 3);
        let (_, summary) = run_grid(&bern).unwrap();
        assert!(summary.row_for(16).unwrap().h_over_floor.is_none());
    }

    #[test]
    fn count_prefix_matches_examples() {
        let mut strings = vec![
            LazyBitString::fixed(0, parse_bits("100").unwrap()),
            LazyBitString::fixed(1, parse_bits("110").unwrap()),
            LazyBitString::fixed(2, parse_bits("001").unwrap()),
        ];
        assert_eq!(
            count_prefix_matches(&mut strings, &parse_bits("1").unwrap()).unwrap(),
            2
        );
        assert_eq!(
            count_prefix_matches(&mut strings, &parse_bits("00").unwrap()).unwrap(),
            1
        );
        assert!(count_prefix_matches(&mut strings, &[]).is_err());
    }

    #[test]
    fn level_pattern_match_count_tracks_binomial_mean() {
        // At n = 4096 with the square-root family, beta = 4 and the count is
        // Binomial(4096, 2^-4): mean 256, sd ~15.5.
        let cfg = mixture_config(vec![4096], 30, 2024);
        let mut total = 0u64;
        for t in 0..cfg.trials {
            let rec = run_trial(&cfg, 4096, t).unwrap();
            total += rec.prefix_match_count.unwrap();
        }
        let mean = total as f64 / cfg.trials as f64;
        let sd_of_mean = (4096.0f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt()
            / (cfg.trials as f64).sqrt();
        assert!(
            (mean - 256.0).abs() < 4.0 * sd_of_mean,
            "mean {mean} too far from 256"
        );
    }

    #[test]
    fn empirical_tail_examples() {
        assert_eq!(empirical_tail(&[5, 5, 5], 4.0).unwrap(), 0.0);
        assert_eq!(empirical_tail(&[5, 5, 5], 5.0).unwrap(), 1.0);
        assert_eq!(empirical_tail(&[1, 2, 3, 4], 2.5).unwrap(), 0.5);
        assert!(empirical_tail(&[], 1.0).is_err());
    }
}
