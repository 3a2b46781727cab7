use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use telephyt_core::kinematics::{Exercise, Side};
use telephyt_core::wire::Role;

#[derive(Parser, Debug)]
#[command(name = "telephyt", version, about = "Tele-rehabilitation motion relay and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the session hub (WebSocket relay and recorder).
    Serve(ServeArgs),
    /// Generate synthetic exercise motion and stream it to a hub or write a recording.
    Simulate(SimulateArgs),
    /// Stream a recording into a hub room, each recorded user joining with its role.
    Replay(ReplayArgs),
    /// Segment repetitions and summarise peak angle and velocity.
    Analyze(AnalyzeArgs),
    /// Compare two metrics CSVs (condition A vs condition B).
    Stats(StatsArgs),
    /// Export frames or angle series of a recording as CSV.
    Export(ExportArgs),
}

#[derive(Args, Debug)]
pub struct ServeArgs {
    #[arg(long, env = "TELEPHYT_LISTEN", default_value = telephyt_hub::DEFAULT_LISTEN)]
    pub listen: SocketAddr,
    #[arg(long, env = "TELEPHYT_REC_DIR", default_value = "recordings")]
    pub rec_dir: PathBuf,
    /// Per-sender frame rate cap in Hz.
    #[arg(long, env = "TELEPHYT_MAX_RATE", default_value_t = telephyt_hub::DEFAULT_MAX_RATE_HZ)]
    pub max_rate: f64,
    #[arg(long, env = "TELEPHYT_MAX_ROOMS", default_value_t = telephyt_hub::DEFAULT_MAX_ROOMS)]
    pub max_rooms: usize,
    /// Seconds an empty room is kept before removal.
    #[arg(long, env = "TELEPHYT_IDLE_TIMEOUT", default_value_t = telephyt_hub::DEFAULT_IDLE_TIMEOUT.as_secs_f64())]
    pub idle_timeout: f64,
    /// Directory served at `/` (the browser client).
    #[arg(long, env = "TELEPHYT_STATIC_DIR")]
    pub static_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("target").required(true).args(["connect", "out"])))]
pub struct SimulateArgs {
    /// JSON session or single-exercise script.
    #[arg(long)]
    pub script: PathBuf,
    /// Hub URL to stream to, e.g. ws://127.0.0.1:8080.
    #[arg(long, env = "TELEPHYT_CONNECT")]
    pub connect: Option<String>,
    /// Write a `.tpr` recording instead of streaming.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "TELEPHYT_ROOM", default_value = "sim")]
    pub room: String,
    /// Role to join as; observers cannot send frames.
    #[arg(long, default_value = "patient")]
    pub role: Role,
    #[arg(long, default_value = "simulated patient")]
    pub name: String,
    /// Playback speed factor when streaming.
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub recording: PathBuf,
    #[arg(long, env = "TELEPHYT_CONNECT")]
    pub connect: String,
    /// Room to join; defaults to the recorded room id.
    #[arg(long, env = "TELEPHYT_ROOM")]
    pub room: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
}

/// Selection shared by `analyze` and `export`.
#[derive(Args, Debug)]
pub struct Selection {
    /// Defaults to every exercise listed in the recording header.
    #[arg(long)]
    pub exercise: Option<Exercise>,
    /// Defaults to both sides.
    #[arg(long)]
    pub side: Option<Side>,
    /// Tracked user; defaults to the patient or the only user.
    #[arg(long)]
    pub user: Option<u32>,
    /// JSON analysis configuration (filter, resampling, segmentation).
    #[arg(long, env = "TELEPHYT_CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    pub recording: PathBuf,
    #[command(flatten)]
    pub selection: Selection,
    /// Metrics CSV output path.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Participant id written to the metrics CSV, used to pair conditions.
    #[arg(long)]
    pub participant: Option<String>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Report CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// One row per frame and joint.
    Csv,
    /// One `t_s,theta_deg` file per exercise and side.
    Angles,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    pub recording: PathBuf,
    #[arg(long, value_enum)]
    pub format: ExportFormat,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub selection: Selection,
}
