//! Descriptive statistics, normality testing and paired two-condition tests.
//!
//! All tests are two-sided; significance is declared at [`ALPHA`].

mod compare;
mod normality;
mod paired;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare_conditions, REPORT_CSV_HEADER, ComparisonReport, ComparisonRow, Limb, Metric, Outcome};
pub use normality::shapiro_wilk;
pub use paired::{paired_t, wilcoxon_signed_rank, wilcoxon_signed_rank_with, WilcoxonMethod, EXACT_MAX_N};

pub const ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("sample too small")]
    SampleTooSmall,
    #[error("sample too large")]
    SampleTooLarge,
    #[error("zero variance")]
    ZeroVariance,
    #[error("degenerate pairs")]
    DegeneratePairs,
    #[error("no nonzero pairs")]
    NoNonzeroPairs,
    #[error("unmatched samples: {0}")]
    UnmatchedSamples(String),
}

/// Mean, sample standard deviation (n − 1 denominator, 0 when n = 1) and count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} ± {:.2}", self.mean, self.sd)
    }
}

pub fn describe(x: &[f64]) -> Result<Description, StatsError> {
    check_finite(x)?;
    if x.is_empty() {
        return Err(StatsError::Empty);
    }
    // Welford's update keeps the SD accurate for data far from zero.
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = x.len();
    let sd = if n > 1 { (m2 / (n - 1) as f64).sqrt() } else { 0.0 };
    Ok(Description { n, mean, sd })
}

fn check_finite(x: &[f64]) -> Result<(), StatsError> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(StatsError::NonFinite(i)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    ShapiroWilk,
    PairedT,
    WilcoxonSignedRank,
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::ShapiroWilk => "shapiro-wilk",
            TestKind::PairedT => "paired t",
            TestKind::WilcoxonSignedRank => "wilcoxon",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub test: TestKind,
    pub statistic: f64,
    pub df: Option<f64>,
    /// Two-sided p value in [0, 1].
    pub p: f64,
    /// Set for Wilcoxon results computed by full enumeration.
    pub exact: bool,
    pub significant: bool,
}

impl TestResult {
    fn new(test: TestKind, statistic: f64, df: Option<f64>, p: f64, exact: bool) -> TestResult {
        let p = p.clamp(0.0, 1.0);
        TestResult {
            test,
            statistic,
            df,
            p,
            exact,
            significant: p < ALPHA,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn describe_small_cases() {
        assert_eq!(describe(&[5.0]).unwrap(), Description { n: 1, mean: 5.0, sd: 0.0 });
        let d = describe(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((d.n, d.mean, d.sd), (3, 2.0, 1.0));
        assert_eq!(describe(&[]), Err(StatsError::Empty));
        assert_eq!(describe(&[1.0, f64::NAN]), Err(StatsError::NonFinite(1)));
    }

    #[test]
    fn describe_matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let d = describe(&x).unwrap();
        assert!(((d.mean - mean) / mean).abs() < 1e-12);
        assert!(((d.sd - var.sqrt()) / var.sqrt()).abs() < 1e-12);
    }
}
