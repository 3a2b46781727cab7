use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use telephyt_core::motion::Recording;
use telephyt_core::pipeline::write_angles_csv;
use tracing::info;

use crate::analyze::{load_recording, run_selection};
use crate::args::{ExportArgs, ExportFormat};
use crate::error::CliError;

pub const FRAMES_CSV_HEADER: &str = "user_id,timestamp_ms,joint,x,y,z,confidence";
pub const FRAMES_FILE: &str = "frames.csv";

/// Every joint of every frame, in recording order.
pub fn write_frames_csv<W: Write>(rec: &Recording, mut out: W) -> io::Result<()> {
    writeln!(out, "{FRAMES_CSV_HEADER}")?;
    for f in &rec.frames {
        for (j, joint) in f.joints.iter().enumerate() {
            let [x, y, z] = joint.position;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                f.user_id,
                f.timestamp_ms,
                j,
                x,
                y,
                z,
                joint.confidence as u8
            )?;
        }
    }
    out.flush()
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, io::BufWriter<fs::File>), CliError> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((path, io::BufWriter::new(file)))
}

pub fn export(args: &ExportArgs) -> Result<(), CliError> {
    let rec = load_recording(&args.recording)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::Usage(format!("{}: {e}", args.out_dir.display())))?;
    match args.format {
        ExportFormat::Csv => {
            let (path, out) = create(&args.out_dir, FRAMES_FILE)?;
            write_frames_csv(&rec, out).map_err(CliError::usage)?;
            info!(path = %path.display(), frames = rec.frames.len(), "frames exported");
        }
        ExportFormat::Angles => {
            for a in run_selection(&rec, &args.selection)? {
                let (path, out) = create(&args.out_dir, &format!("{}_{}.csv", a.exercise, a.side))?;
                write_angles_csv(&a.series, out).map_err(CliError::usage)?;
                info!(path = %path.display(), "angle series exported");
            }
        }
    }
    Ok(())
}
