use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltqp_align::fixture::NetworkConfiguration;
use ltqp_align::traversal::{Policy, DEFAULT_MAX_DOCUMENTS, DEFAULT_WORKERS};

#[derive(Debug, Parser)]
#[command(name = "ltqp-align", version, about = "Link-traversal SPARQL queries with subweb-scoped schema alignment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a deterministic pod network fixture.
    Generate(GenerateArgs),
    /// Run a query over a fixture or a live network.
    Query(QueryArgs),
    /// Host the base and heterogeneous networks plus the execution API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 8)]
    pub pods: usize,
    #[arg(long = "config", value_parser = parse_configuration, default_value = "heterogeneous")]
    pub configuration: NetworkConfiguration,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub posts_per_pod: usize,
    #[arg(long, default_value_t = 10)]
    pub likes_per_pod: usize,
    #[arg(long, default_value_t = 12)]
    pub tags: usize,
    #[arg(long, default_value_t = 0.5)]
    pub variant_fraction: f64,
    #[arg(long, default_value = ltqp_align::fixture::DEFAULT_BASE)]
    pub base: String,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the whole fixture as one JSON bundle.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Fixture directory or JSON bundle.
    #[arg(long, conflicts_with = "seed")]
    pub fixture: Option<PathBuf>,
    /// Seed IRI of a live network (repeatable).
    #[arg(long)]
    pub seed: Vec<String>,
    #[arg(long, conflicts_with = "query_name")]
    pub query_file: Option<PathBuf>,
    #[arg(long)]
    pub query_name: Option<String>,
    #[arg(long, value_enum, default_value = "on")]
    pub alignment: Switch,
    #[arg(long, value_parser = parse_policy, default_value = "follow-all")]
    pub policy: Policy,
    #[arg(long, default_value_t = DEFAULT_MAX_DOCUMENTS)]
    pub max_docs: usize,
    #[arg(long, default_value_t = 180_000)]
    pub timeout_ms: u64,
    #[arg(long)]
    pub deterministic: bool,
    #[arg(long, default_value_t = DEFAULT_WORKERS)]
    pub workers: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write the JSON execution report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// JSON array of issuer rules.
    #[arg(long)]
    pub issuer_rules: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Origin clients use to reach the service, when it differs from the bind address.
    #[arg(long)]
    pub origin: Option<String>,
    /// Fixtures to host (repeatable); defaults to generated base and heterogeneous networks.
    #[arg(long)]
    pub fixture: Vec<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub pods: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

fn parse_configuration(s: &str) -> Result<NetworkConfiguration, String> {
    s.parse()
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse()
}
