use std::time::Duration;

use telephyt_hub::{Hub, HubConfig, Server};
use tracing::info;

use crate::args::ServeArgs;
use crate::error::CliError;

pub async fn serve(args: &ServeArgs) -> Result<(), CliError> {
    if !(args.idle_timeout > 0.0 && args.idle_timeout.is_finite()) {
        return Err(CliError::Usage(format!("idle timeout must be positive, got {}", args.idle_timeout)));
    }
    let config = HubConfig {
        listen: args.listen,
        max_rooms: args.max_rooms,
        max_rate_hz: args.max_rate,
        rec_dir: args.rec_dir.clone(),
        idle_timeout: Duration::from_secs_f64(args.idle_timeout),
        static_dir: args.static_dir.clone(),
        ..HubConfig::default()
    };
    let hub = Hub::new(config).map_err(CliError::usage)?;
    let server = Server::bind(hub).await.map_err(CliError::usage)?;
    let written = server
        .run(async {
            let _ = tokio::signal::ctrl_c().await;
            info!("interrupt received, shutting down");
        })
        .await
        .map_err(CliError::usage)?;
    for path in written {
        info!(path = %path.display(), "recording finalised");
    }
    Ok(())
}
