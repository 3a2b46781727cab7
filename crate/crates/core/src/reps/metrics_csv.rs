use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ExerciseSummary, RepError};
use crate::kinematics::{Exercise, LimbStatus, Side};

pub const METRICS_CSV_HEADER: &str =
    "exercise,side,limb_status,n_detected,n_included,peak_mean_deg,peak_sd_deg,vel_mean_dps,vel_sd_dps";

/// One CSV row. `participant` is an optional trailing column used to pair
/// rows across conditions; it is omitted on write when no row carries one.
#[derive(Debug, Serialize, Deserialize)]
struct Row {
    exercise: Exercise,
    side: Side,
    #[serde(default, deserialize_with = "csv::invalid_option")]
    limb_status: Option<LimbStatus>,
    n_detected: usize,
    n_included: usize,
    peak_mean_deg: f64,
    peak_sd_deg: f64,
    vel_mean_dps: f64,
    vel_sd_dps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    participant: Option<String>,
}

fn csv_err(e: impl std::fmt::Display) -> RepError {
    RepError::Csv(e.to_string())
}

pub fn write_metrics_csv<W: Write>(summaries: &[ExerciseSummary], out: W) -> Result<(), RepError> {
    let with_participant = summaries.iter().any(|s| s.participant.is_some());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut header: Vec<&str> = METRICS_CSV_HEADER.split(',').collect();
    if with_participant {
        header.push("participant");
    }
    w.write_record(&header).map_err(csv_err)?;
    for s in summaries {
        let mut record = vec![
            s.exercise.to_string(),
            s.side.to_string(),
            s.limb_status.map(|l| l.to_string()).unwrap_or_default(),
            s.n_detected.to_string(),
            s.n_included.to_string(),
            s.peak_mean_deg.to_string(),
            s.peak_sd_deg.to_string(),
            s.vel_mean_dps.to_string(),
            s.vel_sd_dps.to_string(),
        ];
        if with_participant {
            record.push(s.participant.clone().unwrap_or_default());
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(csv_err)?;
    Ok(())
}

/// Reads rows by header name; column order and extra columns are tolerated.
/// Summary flags are not stored and are recomputed from `n_included`.
pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<ExerciseSummary>, RepError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row.map_err(csv_err)?;
        if row.n_included > row.n_detected {
            return Err(RepError::Csv(format!(
                "n_included {} exceeds n_detected {}",
                row.n_included, row.n_detected
            )));
        }
        let mut flags = Vec::new();
        if row.n_included == 1 {
            flags.push(super::SummaryFlag::SingleRep);
        }
        if !super::STUDY_REP_RANGE.contains(&row.n_included) {
            flags.push(super::SummaryFlag::RepCountOutOfRange);
        }
        out.push(ExerciseSummary {
            participant: row.participant.filter(|p| !p.is_empty()),
            exercise: row.exercise,
            side: row.side,
            limb_status: row.limb_status,
            n_detected: row.n_detected,
            n_included: row.n_included,
            peak_mean_deg: row.peak_mean_deg,
            peak_sd_deg: row.peak_sd_deg,
            vel_mean_dps: row.vel_mean_dps,
            vel_sd_dps: row.vel_sd_dps,
            flags,
        });
    }
    Ok(out)
}
