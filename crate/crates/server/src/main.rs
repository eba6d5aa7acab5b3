use clap::Parser;
use fusalens_server::{log_filter, serve, ServerConfig};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() -> std::process::ExitCode {
    let config = ServerConfig::parse();
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::new(log_filter(&config)))
        .init();
    match serve(config).await {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            tracing::error!("{e}");
            eprintln!("fusalens-server: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}
