#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use sxacml::fixtures::{FixtureKind, FixtureManifest};
use sxacml_service::{Engine, EngineConfig};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn manifest() -> FixtureManifest {
    FixtureManifest::load(fixtures().join("manifest.json")).unwrap()
}

pub fn fixture_config() -> EngineConfig {
    let manifest = manifest();
    EngineConfig {
        ontologies: manifest.paths(FixtureKind::Ontology),
        mapping: Vec::new(),
        policies: manifest.paths(FixtureKind::Policy),
    }
}

pub fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// Starts the service on an ephemeral port inside the current runtime.
pub async fn start(config: &EngineConfig) -> (SocketAddr, Arc<Engine>) {
    let engine = Arc::new(Engine::new(config.load().unwrap()));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = sxacml_service::http::router(Arc::clone(&engine));
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (addr, engine)
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sxacml")).args(args).output().unwrap()
}

/// `sxacml decide` over the fixture stack; returns (exit code, stdout, stderr).
pub fn cli_decide(request: &Path, extra: &[&str]) -> (i32, String, String) {
    let config = fixture_config();
    let mut args: Vec<String> = vec!["decide".into(), "--policies".into()];
    args.extend(config.policies.iter().map(|p| p.display().to_string()));
    args.push("--ontologies".into());
    args.extend(config.ontologies.iter().map(|p| p.display().to_string()));
    args.push("--request".into());
    args.push(request.display().to_string());
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = cli(&refs);
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}
