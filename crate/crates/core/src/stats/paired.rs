//! Paired two-sample tests on differences `d = x − y`.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use super::{check_finite, describe, StatsError, TestKind, TestResult};

/// Largest post-drop sample size for which the Wilcoxon p value is enumerated exactly.
pub const EXACT_MAX_N: usize = 12;

fn differences(x: &[f64], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::UnmatchedSamples(format!(
            "{} vs {} observations",
            x.len(),
            y.len()
        )));
    }
    check_finite(x)?;
    check_finite(y)?;
    Ok(x.iter().zip(y).map(|(a, b)| a - b).collect())
}

/// Dependent-samples t test.
pub fn paired_t(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    let d = differences(x, y)?;
    if d.len() < 2 {
        return Err(StatsError::SampleTooSmall);
    }
    let desc = describe(&d)?;
    if desc.sd == 0.0 {
        return Err(StatsError::DegeneratePairs);
    }
    let n = d.len() as f64;
    let t = desc.mean / (desc.sd / n.sqrt());
    let df = n - 1.0;
    let dist = StudentsT::new(0.0, 1.0, df).expect("df ≥ 1");
    let p = 2.0 * dist.sf(t.abs());
    Ok(TestResult::new(TestKind::PairedT, t, Some(df), p, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WilcoxonMethod {
    /// Exact for n ≤ [`EXACT_MAX_N`], normal approximation above.
    #[default]
    Auto,
    Exact,
    Approximate,
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    wilcoxon_signed_rank_with(x, y, WilcoxonMethod::Auto)
}

/// Signed-rank test: zero differences dropped, tied |d| get average ranks,
/// statistic `W = min(W+, W−)`.
pub fn wilcoxon_signed_rank_with(
    x: &[f64],
    y: &[f64],
    method: WilcoxonMethod,
) -> Result<TestResult, StatsError> {
    let d: Vec<f64> = differences(x, y)?.into_iter().filter(|&v| v != 0.0).collect();
    if d.is_empty() {
        return Err(StatsError::NoNonzeroPairs);
    }
    let n = d.len();
    let ranks = average_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let total: f64 = ranks.iter().sum();
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let w = w_plus.min(total - w_plus);

    let exact = match method {
        WilcoxonMethod::Auto => n <= EXACT_MAX_N,
        WilcoxonMethod::Exact => true,
        WilcoxonMethod::Approximate => false,
    };
    let p = if exact {
        exact_p(&ranks, w)
    } else {
        approximate_p(&ranks, w)
    };
    Ok(TestResult::new(TestKind::WilcoxonSignedRank, w, None, p, exact))
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Fraction of the 2ⁿ sign assignments whose statistic is at least as extreme.
fn exact_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len();
    assert!(n < 31, "exact enumeration limited to small samples");
    let total: f64 = ranks.iter().sum();
    // Average ranks are multiples of 0.5, so sums are exact in f64.
    let extreme = (0u32..1 << n)
        .filter(|mask| {
            let plus: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            plus.min(total - plus) <= w
        })
        .count();
    (extreme as f64 / (1u64 << n) as f64).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
fn approximate_p(ranks: &[f64], w: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((mean - w).abs() - 0.5).max(0.0) / var.sqrt();
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * unit.sf(z)).min(1.0)
}
