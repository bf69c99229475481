//! Std side of the demographic globe: dataset ingestion from CSV/JSON, the
//! JSON dataset bundle, PNG atlas output, the HTTP API and the CLI.

pub mod assets;
pub mod bundle;
pub mod cli;
pub mod ingest;
pub mod service;

pub use bundle::Bundle;
