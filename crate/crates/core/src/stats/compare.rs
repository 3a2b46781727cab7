//! Two-condition comparison of per-limb exercise summaries.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::Write;

use serde::Serialize;

use super::{describe, paired_t, shapiro_wilk, wilcoxon_signed_rank, Description, StatsError, TestResult, ALPHA};
use crate::kinematics::{Exercise, LimbStatus, Side};
use crate::reps::ExerciseSummary;

/// Limb grouping key: impaired/intact when declared, otherwise the anatomical side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Limb {
    Status(LimbStatus),
    Side(Side),
}

impl Limb {
    fn of(s: &ExerciseSummary) -> Limb {
        s.limb_status.map_or(Limb::Side(s.side), Limb::Status)
    }
}

impl fmt::Display for Limb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limb::Status(s) => s.fmt(f),
            Limb::Side(s) => s.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean peak joint angle, degrees.
    PeakAngle,
    /// Mean movement velocity, degrees per second.
    Velocity,
}

impl Metric {
    fn value(self, s: &ExerciseSummary) -> f64 {
        match self {
            Metric::PeakAngle => s.peak_mean_deg,
            Metric::Velocity => s.vel_mean_dps,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::PeakAngle => "peak_deg",
            Metric::Velocity => "velocity_dps",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Every paired difference is exactly zero.
    NoDifference,
    Tested {
        /// Shapiro-Wilk p on the differences; `None` when it could not be run.
        normality_p: Option<f64>,
        result: TestResult,
    },
}

impl Outcome {
    pub fn significant(&self) -> bool {
        matches!(self, Outcome::Tested { result, .. } if result.significant)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub exercise: Exercise,
    pub limb: Limb,
    pub metric: Metric,
    pub a: Description,
    pub b: Description,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

type GroupKey = (Exercise, Limb);

fn group(summaries: &[ExerciseSummary]) -> BTreeMap<GroupKey, Vec<&ExerciseSummary>> {
    let mut groups: BTreeMap<GroupKey, Vec<&ExerciseSummary>> = BTreeMap::new();
    for s in summaries {
        groups.entry((s.exercise, Limb::of(s))).or_default().push(s);
    }
    groups
}

/// Pairs rows by participant when every row names one, otherwise by order.
fn pair<'a>(
    key: GroupKey,
    a: &[&'a ExerciseSummary],
    b: &[&'a ExerciseSummary],
) -> Result<Vec<(&'a ExerciseSummary, &'a ExerciseSummary)>, StatsError> {
    let unmatched = |why: String| StatsError::UnmatchedSamples(format!("{} {}: {why}", key.0, key.1));
    let named = a.iter().chain(b).all(|s| s.participant.is_some());
    if named {
        let mut by_name: BTreeMap<&str, &ExerciseSummary> = BTreeMap::new();
        for s in b {
            if by_name.insert(s.participant.as_deref().unwrap(), s).is_some() {
                return Err(unmatched(format!("duplicate participant {:?}", s.participant)));
            }
        }
        let mut pairs = Vec::new();
        for s in a {
            let name = s.participant.as_deref().unwrap();
            let other = by_name
                .remove(name)
                .ok_or_else(|| unmatched(format!("participant {name} missing from second set")))?;
            pairs.push((*s, other));
        }
        if let Some(name) = by_name.keys().next() {
            return Err(unmatched(format!("participant {name} missing from first set")));
        }
        Ok(pairs)
    } else if a.len() == b.len() {
        Ok(a.iter().copied().zip(b.iter().copied()).collect())
    } else {
        Err(unmatched(format!("{} vs {} rows", a.len(), b.len())))
    }
}

/// Routes the paired differences to the appropriate test: paired t when the
/// differences pass Shapiro-Wilk (p ≥ α), the signed-rank test otherwise or
/// when normality cannot be assessed.
fn test_pairs(x: &[f64], y: &[f64]) -> Result<Outcome, StatsError> {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if d.iter().all(|&v| v == 0.0) {
        return Ok(Outcome::NoDifference);
    }
    let normality_p = match shapiro_wilk(&d) {
        Ok(r) => Some(r.p),
        Err(StatsError::SampleTooSmall | StatsError::ZeroVariance) => None,
        Err(e) => return Err(e),
    };
    let result = match normality_p {
        Some(p) if p >= ALPHA => paired_t(x, y)?,
        _ => wilcoxon_signed_rank(x, y)?,
    };
    Ok(Outcome::Tested { normality_p, result })
}

pub fn compare_conditions(
    a: &[ExerciseSummary],
    b: &[ExerciseSummary],
) -> Result<ComparisonReport, StatsError> {
    let ga = group(a);
    let gb = group(b);
    if let Some(key) = gb.keys().find(|k| !ga.contains_key(k)) {
        return Err(StatsError::UnmatchedSamples(format!(
            "{} {} only in second set",
            key.0, key.1
        )));
    }
    let mut rows = Vec::new();
    for (key, rows_a) in &ga {
        let rows_b = gb.get(key).ok_or_else(|| {
            StatsError::UnmatchedSamples(format!("{} {} only in first set", key.0, key.1))
        })?;
        let pairs = pair(*key, rows_a, rows_b)?;
        for metric in [Metric::PeakAngle, Metric::Velocity] {
            let x: Vec<f64> = pairs.iter().map(|(s, _)| metric.value(s)).collect();
            let y: Vec<f64> = pairs.iter().map(|(_, s)| metric.value(s)).collect();
            rows.push(ComparisonRow {
                exercise: key.0,
                limb: key.1,
                metric,
                a: describe(&x)?,
                b: describe(&y)?,
                outcome: test_pairs(&x, &y)?,
            });
        }
    }
    Ok(ComparisonReport { rows })
}

pub const REPORT_CSV_HEADER: &str =
    "exercise,limb,metric,n,a_mean,a_sd,b_mean,b_sd,test,statistic,df,p,exact,normality_p,significant";

impl ComparisonReport {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let header = ["exercise", "limb", "metric", "n", "A mean±SD", "B mean±SD", "test", "stat", "p", ""];
        let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
        for r in &self.rows {
            let (test, stat, p, mark) = match &r.outcome {
                Outcome::NoDifference => ("no difference".to_string(), "-".into(), "-".into(), String::new()),
                Outcome::Tested { result, .. } => (
                    result.test.to_string(),
                    format!("{:.3}", result.statistic),
                    format!("{:.4}", result.p),
                    if result.significant { "*".into() } else { String::new() },
                ),
            };
            cells.push(vec![
                r.exercise.to_string(),
                r.limb.to_string(),
                r.metric.to_string(),
                r.a.n.to_string(),
                r.a.to_string(),
                r.b.to_string(),
                test,
                stat,
                p,
                mark,
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| cells.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        let _ = writeln!(out, "* p < {ALPHA}");
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        w.write_record(REPORT_CSV_HEADER.split(','))?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            let (test, stat, df, p, exact, norm, sig) = match &r.outcome {
                Outcome::NoDifference => ("none".to_string(), String::new(), String::new(), String::new(), String::new(), String::new(), false),
                Outcome::Tested { normality_p, result } => (
                    format!("{:?}", result.test).to_lowercase(),
                    result.statistic.to_string(),
                    opt(result.df),
                    result.p.to_string(),
                    result.exact.to_string(),
                    opt(*normality_p),
                    result.significant,
                ),
            };
            w.write_record([
                r.exercise.to_string(),
                r.limb.to_string(),
                r.metric.to_string(),
                r.a.n.to_string(),
                r.a.mean.to_string(),
                r.a.sd.to_string(),
                r.b.mean.to_string(),
                r.b.sd.to_string(),
                test,
                stat,
                df,
                p,
                exact,
                norm,
                sig.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::TestKind;

    fn summary(participant: usize, exercise: Exercise, status: LimbStatus, peak: f64, vel: f64) -> ExerciseSummary {
        ExerciseSummary {
            participant: Some(format!("p{participant:02}")),
            exercise,
            side: if status == LimbStatus::Impaired { Side::Left } else { Side::Right },
            limb_status: Some(status),
            n_detected: 12,
            n_included: 10,
            peak_mean_deg: peak,
            peak_sd_deg: 2.0,
            vel_mean_dps: vel,
            vel_sd_dps: 5.0,
            flags: vec![],
        }
    }

    /// Condition B moves at 0.9× the velocity of A with identical magnitudes.
    fn slower_condition() -> (Vec<ExerciseSummary>, Vec<ExerciseSummary>) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (e, exercise) in Exercise::ALL.into_iter().enumerate() {
            for status in [LimbStatus::Impaired, LimbStatus::Intact] {
                for p in 0..10 {
                    let peak = 25.0 + 3.0 * e as f64 + ((p * 7) % 10) as f64;
                    let vel = 40.0 + ((p * 13) % 17) as f64 * 1.5;
                    a.push(summary(p, exercise, status, peak, vel));
                    b.push(summary(p, exercise, status, peak, 0.9 * vel));
                }
            }
        }
        (a, b)
    }

    #[test]
    fn slower_condition_is_flagged_only_for_velocity() {
        let (a, mut b) = slower_condition();
        b.reverse();
        let report = compare_conditions(&a, &b).unwrap();
        assert_eq!(report.rows.len(), 4 * 2 * 2);
        for row in &report.rows {
            match row.metric {
                Metric::Velocity => assert!(row.outcome.significant(), "{row:?}"),
                Metric::PeakAngle => {
                    assert_eq!(row.outcome, Outcome::NoDifference);
                    assert!(!row.outcome.significant());
                }
            }
        }
        let text = report.to_text();
        for e in Exercise::ALL {
            assert_eq!(text.matches(e.as_str()).count(), 4, "{text}");
        }
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 17);
    }

    #[test]
    fn normal_differences_use_paired_t() {
        let a: Vec<_> = (0..8).map(|p| summary(p, Exercise::Squat, LimbStatus::Intact, 30.0, 50.0 + p as f64)).collect();
        let b: Vec<_> = (0..8)
            .map(|p| summary(p, Exercise::Squat, LimbStatus::Intact, 30.0 + [0.5, -0.3, 0.1, 0.8, -0.6, 0.2, 0.0, -0.1][p], 48.0 + p as f64))
            .collect();
        let report = compare_conditions(&a, &b).unwrap();
        let peak = &report.rows[0];
        match &peak.outcome {
            Outcome::Tested { normality_p: Some(np), result } => {
                assert!(*np >= ALPHA);
                assert_eq!(result.test, TestKind::PairedT);
            }
            other => panic!("{other:?}"),
        }
        // Constant nonzero differences cannot be tested for normality.
        match &report.rows[1].outcome {
            Outcome::Tested { normality_p: None, result } => assert_eq!(result.test, TestKind::WilcoxonSignedRank),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identical_conditions_report_no_difference() {
        let (a, _) = slower_condition();
        let report = compare_conditions(&a, &a).unwrap();
        assert!(report.rows.iter().all(|r| r.outcome == Outcome::NoDifference));
        assert!(report.to_text().contains("no difference"));
    }

    #[test]
    fn mismatched_sets_are_rejected() {
        let (a, b) = slower_condition();
        let err = compare_conditions(&a, &b[1..]).unwrap_err();
        assert!(matches!(err, StatsError::UnmatchedSamples(_)));
        assert!(err.to_string().starts_with("unmatched samples"));
        let unnamed: Vec<_> = a.iter().cloned().map(|s| ExerciseSummary { participant: None, ..s }).collect();
        assert!(compare_conditions(&unnamed, &unnamed[..unnamed.len() - 1]).is_err());
    }
}
