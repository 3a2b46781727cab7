use std::fs;
use std::io::{self, Write};
use std::path::Path;

use telephyt_core::reps::{read_metrics_csv, ExerciseSummary};
use telephyt_core::stats::compare_conditions;
use tracing::info;

use crate::args::StatsArgs;
use crate::error::CliError;

fn read(path: &Path) -> Result<Vec<ExerciseSummary>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::in_file(path, e))?;
    let rows = read_metrics_csv(io::BufReader::new(file)).map_err(|e| CliError::in_file(path, e))?;
    if rows.is_empty() {
        return Err(CliError::in_file(path, "insufficient data: no rows"));
    }
    Ok(rows)
}

pub fn stats(args: &StatsArgs) -> Result<(), CliError> {
    let report = compare_conditions(&read(&args.a)?, &read(&args.b)?).map_err(CliError::data)?;
    io::stdout()
        .lock()
        .write_all(report.to_text().as_bytes())
        .map_err(CliError::usage)?;
    if let Some(path) = &args.out {
        let file = fs::File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        report.write_csv(io::BufWriter::new(file)).map_err(CliError::usage)?;
        info!(path = %path.display(), "report written");
    }
    Ok(())
}
