//! Decision service and command-line front end.

pub mod cli;
pub mod engine;
pub mod http;

pub use engine::{Engine, EngineConfig, EngineError};

/// Installs a stderr logger filtered by `SXACML_LOG` (default `warn`).
pub fn init_logging() {
    let filter = tracing_subscriber::EnvFilter::try_from_env("SXACML_LOG")
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn"));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}
