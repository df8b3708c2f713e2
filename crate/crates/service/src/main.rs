use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    sxacml_service::init_logging();
    sxacml_service::cli::run(sxacml_service::cli::Cli::parse())
}
