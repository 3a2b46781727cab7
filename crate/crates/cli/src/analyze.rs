use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use telephyt_core::kinematics::{Exercise, Side};
use telephyt_core::motion::Recording;
use telephyt_core::pipeline::{analyze_recording, Analysis, AnalysisConfig, AnalysisRequest};
use telephyt_core::reps::{rep_velocity, write_metrics_csv, ExerciseSummary, RepSource};
use tracing::{info, warn};

use crate::args::{AnalyzeArgs, Selection};
use crate::error::CliError;

/// Loads a recording; an empty file or one without frames is reported as
/// insufficient data rather than a format error.
pub fn load_recording(path: &Path) -> Result<Recording, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::in_file(path, e))?;
    if bytes.is_empty() {
        return Err(CliError::in_file(path, "insufficient data: empty file"));
    }
    let rec = telephyt_core::motion::parse_recording(&bytes).map_err(|e| CliError::in_file(path, e))?;
    if rec.frames.is_empty() {
        return Err(CliError::in_file(path, "insufficient data: no frames"));
    }
    Ok(rec)
}

pub fn load_config(path: Option<&Path>) -> Result<AnalysisConfig, CliError> {
    let Some(path) = path else {
        return Ok(AnalysisConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let cfg: AnalysisConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    cfg.segmentation.validate().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

/// Exercise/side pairs to analyse: the explicit selection, else every
/// exercise named in the header (all of them if none is) on both sides.
pub fn targets(rec: &Recording, sel: &Selection) -> Vec<(Exercise, Side)> {
    let exercises: Vec<Exercise> = match sel.exercise {
        Some(e) => vec![e],
        None if rec.header.exercises.is_empty() => Exercise::ALL.to_vec(),
        None => {
            let mut listed = rec.header.exercises.clone();
            listed.sort();
            listed.dedup();
            listed
        }
    };
    let sides: Vec<Side> = sel.side.map_or(Side::BOTH.to_vec(), |s| vec![s]);
    exercises
        .iter()
        .flat_map(|&e| sides.iter().map(move |&s| (e, s)))
        .collect()
}

pub fn run_selection(rec: &Recording, sel: &Selection) -> Result<Vec<Analysis>, CliError> {
    let cfg = load_config(sel.config.as_deref())?;
    targets(rec, sel)
        .into_iter()
        .map(|(exercise, side)| {
            let req = AnalysisRequest { exercise, side, user_id: sel.user, window_ms: None };
            let analysis = analyze_recording(rec, &req, &cfg).map_err(CliError::data)?;
            if analysis.source == RepSource::Manual {
                info!(%exercise, %side, user_id = analysis.user_id, "manual start/end labels override automatic segmentation");
            }
            Ok(analysis)
        })
        .collect()
}

pub fn rep_table(a: &Analysis) -> String {
    let mut out = String::new();
    let status = a.limb_status.map(|s| format!(" ({s})")).unwrap_or_default();
    let source = match a.source {
        RepSource::Automatic => "automatic",
        RepSource::Manual => "manual labels",
    };
    let _ = writeln!(out, "user {}  {}  {}{}  segmentation: {}", a.user_id, a.exercise, a.side, status, source);
    let _ = writeln!(
        out,
        "{:>4} {:>8} {:>8} {:>8} {:>9} {:>9} {:>10}  {}",
        "rep", "t_0 s", "t_peak s", "t_end s", "θ_0 °", "θ_peak °", "vel °/s", "status"
    );
    for (i, r) in a.reps.iter().enumerate() {
        let vel = rep_velocity(r).map_or("-".to_string(), |v| format!("{v:.2}"));
        let status = r.excluded.map_or("included".to_string(), |e| format!("excluded: {e}"));
        let _ = writeln!(
            out,
            "{:>4} {:>8.3} {:>8.3} {:>8.3} {:>9.2} {:>9.2} {:>10}  {}",
            i + 1,
            r.t_0,
            r.t_peak,
            r.t_end,
            r.theta_0,
            r.theta_peak,
            vel,
            status
        );
    }
    match &a.summary {
        Ok(s) => {
            let flags: Vec<String> = s.flags.iter().map(|f| f.to_string()).collect();
            let _ = writeln!(
                out,
                "summary: {}/{} included  peak {:.2} ± {:.2} °  velocity {:.2} ± {:.2} °/s{}",
                s.n_included,
                s.n_detected,
                s.peak_mean_deg,
                s.peak_sd_deg,
                s.vel_mean_dps,
                s.vel_sd_dps,
                if flags.is_empty() { String::new() } else { format!("  [{}]", flags.join(", ")) }
            );
        }
        Err(e) => {
            let _ = writeln!(out, "summary: {e}");
        }
    }
    out
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let rec = load_recording(&args.recording)?;
    let analyses = run_selection(&rec, &args.selection)?;
    let mut stdout = io::stdout().lock();
    for a in &analyses {
        writeln!(stdout, "{}", rep_table(a)).map_err(CliError::usage)?;
    }
    let summaries: Vec<ExerciseSummary> = analyses
        .iter()
        .filter_map(|a| a.summary.as_ref().ok().cloned())
        .map(|s| ExerciseSummary { participant: args.participant.clone(), ..s })
        .collect();
    if summaries.is_empty() {
        return Err(CliError::in_file(&args.recording, "insufficient data: no valid repetitions"));
    }
    for a in analyses.iter().filter(|a| a.summary.is_err()) {
        warn!(exercise = %a.exercise, side = %a.side, "no valid repetitions");
    }
    if let Some(path) = &args.metrics {
        let file = fs::File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        write_metrics_csv(&summaries, io::BufWriter::new(file)).map_err(CliError::usage)?;
        info!(path = %path.display(), rows = summaries.len(), "metrics written");
    }
    Ok(())
}
