//! Command-line interface.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use sxacml::fixtures::load_request_file;

use crate::engine::{Engine, EngineConfig};

#[derive(Debug, Parser)]
#[command(name = "sxacml", version, about = "Semantic attribute-based access control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one request document and print the decision document.
    Decide(DecideArgs),
    /// Run the HTTP decision service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct Sources {
    /// Policy documents, highest priority first.
    #[arg(long, num_args = 1.., required = true)]
    pub policies: Vec<PathBuf>,
    /// Ontology documents (domain ontologies and instance data).
    #[arg(long, num_args = 1.., required = true)]
    pub ontologies: Vec<PathBuf>,
    /// Mapping ontologies, merged with the others.
    #[arg(long, num_args = 1..)]
    pub mapping: Vec<PathBuf>,
}

impl Sources {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            ontologies: self.ontologies.clone(),
            mapping: self.mapping.clone(),
            policies: self.policies.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    #[command(flatten)]
    pub sources: Sources,
    /// Request document (JSON).
    #[arg(long)]
    pub request: PathBuf,
    /// Write the decision document here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print the rule trace of every evaluation to stderr.
    #[arg(long)]
    pub explain: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub sources: Sources,
    /// Address to listen on.
    #[arg(long, env = "SXACML_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
}

/// Exit codes: 0 when every decision is Permit, Deny or NotApplicable, 2
/// when any is Indeterminate, 1 on load or I/O errors.
pub fn run(cli: Cli) -> ExitCode {
    match cli.command {
        Command::Decide(args) => decide(args),
        Command::Serve(args) => serve(args),
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("sxacml: {message}");
    ExitCode::from(1)
}

fn decide(args: DecideArgs) -> ExitCode {
    let pdp = match args.sources.config().load() {
        Ok(pdp) => pdp,
        Err(e) => return fail(e),
    };
    let ctx = match load_request_file(&args.request) {
        Ok(ctx) => ctx,
        Err(e) => return fail(e),
    };
    let (decisions, explanations) = if args.explain {
        pdp.decide_explained(&ctx)
    } else {
        (pdp.decide(&ctx), Vec::new())
    };
    let stderr = std::io::stderr();
    let mut err = stderr.lock();
    for explanation in &explanations {
        let label = explanation
            .resource
            .as_ref()
            .map_or(sxacml::pdp::AS_REQUESTED, |r| r.as_str());
        for entry in &explanation.trace {
            let _ = writeln!(err, "{label}: {entry}");
        }
    }
    let document = decisions.to_document();
    let written = match &args.output {
        Some(path) => std::fs::write(path, &document).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(document.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        return fail(e);
    }
    if decisions.any_indeterminate() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn serve(args: ServeArgs) -> ExitCode {
    let pdp = match args.sources.config().load() {
        Ok(pdp) => pdp,
        Err(e) => return fail(e),
    };
    if let Err(e) = pdp.classified() {
        return fail(e);
    }
    let engine = Arc::new(Engine::new(pdp));
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => return fail(e),
    };
    let result: Result<(), std::io::Error> = runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen).await?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        axum::serve(listener, crate::http::router(engine))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(format!("{}: {e}", args.listen)),
    }
}
