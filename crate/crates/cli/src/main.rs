mod args;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;
use ltqp_align::alignment::parse_issuer_rules;
use ltqp_align::fixture::{generate, FixtureConfig, FixtureSet, NetworkConfiguration};
use ltqp_align::source::{DirectorySource, HttpSource, SourceLayer, DEFAULT_HTTP_TIMEOUT};
use ltqp_align::sparql::parse_query;
use ltqp_align::traversal::{execute, ExecutionReport, TerminationCause, TraversalConfig};
use ltqp_align_server::Server;

use args::{Cli, Command, Format, GenerateArgs, QueryArgs, ServeArgs, Switch};

const EXIT_USAGE: u8 = 1;
const EXIT_FETCH: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;

/// A failure carrying its exit code.
struct Failure(u8, anyhow::Error);

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure(EXIT_USAGE, e.into())
}

fn fatal(e: impl Into<anyhow::Error>) -> Failure {
    Failure(EXIT_FETCH, e.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => run_generate(&a),
        Command::Query(a) => run_query(&a),
        Command::Serve(a) => run_serve(&a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn run_generate(a: &GenerateArgs) -> Result<u8, Failure> {
    let cfg = FixtureConfig {
        pod_count: a.pods,
        posts_per_pod: a.posts_per_pod,
        likes_per_pod: a.likes_per_pod,
        tag_vocabulary_size: a.tags,
        variant_fraction: if a.configuration == NetworkConfiguration::Base { 0.0 } else { a.variant_fraction },
        random_seed: a.seed,
        configuration: a.configuration,
        base: a.base.clone(),
    };
    let fx = generate(&cfg).map_err(usage)?;
    fx.export_directory(&a.out).map_err(fatal)?;
    if let Some(bundle) = &a.bundle {
        fs::write(bundle, fx.to_bundle()).with_context(|| format!("writing {}", bundle.display())).map_err(fatal)?;
    }
    eprintln!(
        "wrote {} documents ({} rule sets) to {}",
        fx.documents.len(),
        fx.rule_set_documents.len(),
        a.out.display()
    );
    Ok(0)
}

fn run_query(a: &QueryArgs) -> Result<u8, Failure> {
    if a.query_file.is_none() && a.query_name.is_none() {
        return Err(usage(anyhow::anyhow!("one of --query-file or --query-name is required")));
    }
    if a.fixture.is_none() && a.seed.is_empty() {
        return Err(usage(anyhow::anyhow!("either --fixture or at least one --seed is required")));
    }
    let fixture = match &a.fixture {
        Some(path) => Some(FixtureSet::load(path).with_context(|| format!("loading {}", path.display())).map_err(fatal)?),
        None => None,
    };
    let (text, mut seeds) = match (&a.query_file, &a.query_name, &fixture) {
        (Some(file), _, _) => {
            let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display())).map_err(usage)?;
            let seeds = fixture.as_ref().map(|fx| vec![format!("{}u0/card", fx.base())]).unwrap_or_default();
            (text, seeds)
        }
        (None, Some(name), Some(fx)) => {
            let q = fx.query(name).map_err(usage)?;
            (q.text.clone(), q.seeds.clone())
        }
        (None, Some(_), None) => return Err(usage(anyhow::anyhow!("--query-name needs --fixture"))),
        (None, None, _) => unreachable!(),
    };
    if !a.seed.is_empty() {
        seeds = a.seed.clone();
    }
    let query = parse_query(&text).map_err(usage)?;
    let mut cfg = TraversalConfig::new(seeds)
        .alignment(a.alignment == Switch::On)
        .policy(a.policy)
        .max_documents(a.max_docs)
        .timeout(Duration::from_millis(a.timeout_ms))
        .deterministic(a.deterministic)
        .workers(a.workers);
    if let Some(fx) = &fixture {
        cfg = cfg.skip_namespaces(fx.skip_namespaces.clone());
    }
    if let Some(path) = &a.issuer_rules {
        let json = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        cfg = cfg.issuer_rules(parse_issuer_rules(&json).map_err(usage)?);
    }
    cfg.validate().map_err(usage)?;

    let source: Box<dyn SourceLayer> = match (&a.fixture, &fixture) {
        (Some(path), Some(_)) if path.is_dir() => Box::new(DirectorySource::open(path).map_err(fatal)?),
        (_, Some(fx)) => Box::new(fx.source()),
        _ => Box::new(HttpSource::new(DEFAULT_HTTP_TIMEOUT).map_err(fatal)?),
    };
    let report = execute(&query, cfg.clone(), source.as_ref()).map_err(usage)?;

    if let Some(path) = &a.report {
        write_report(path, &report).map_err(fatal)?;
    }
    let timed_out = report.termination_cause == TerminationCause::Timeout;
    let seeds_reached = report.documents_fetched.iter().any(|d| cfg.seeds.iter().any(|s| s.split('#').next() == Some(&d.iri)));
    if !seeds_reached && !timed_out {
        for e in &report.fetch_errors {
            eprintln!("{e}");
        }
        return Err(fatal(anyhow::anyhow!("no seed document could be fetched")));
    }
    let rendered = match a.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.results.to_sparql_json()).expect("results serialize")),
        Format::Csv => report.results.to_csv(),
        Format::Table => report.results.to_text_table(),
    };
    io::stdout().write_all(rendered.as_bytes()).map_err(fatal)?;
    log::info!(
        "{} rows, {} documents, {} rule sets, {:?}",
        report.results.len(),
        report.documents_fetched.len(),
        report.rule_sets_discovered.len(),
        report.termination_cause
    );
    Ok(if timed_out { EXIT_TIMEOUT } else { 0 })
}

fn write_report(path: &Path, report: &ExecutionReport) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&report.to_json())?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn run_serve(a: &ServeArgs) -> Result<u8, Failure> {
    let fixtures = if a.fixture.is_empty() {
        let sized = |cfg: FixtureConfig| FixtureConfig { pod_count: a.pods, ..cfg };
        vec![
            generate(&sized(FixtureConfig::base_network(a.seed))).map_err(usage)?,
            generate(&sized(FixtureConfig::heterogeneous(a.seed))).map_err(usage)?,
        ]
    } else {
        a.fixture
            .iter()
            .map(|p| FixtureSet::load(p).with_context(|| format!("loading {}", p.display())))
            .collect::<anyhow::Result<Vec<_>>>()
            .map_err(fatal)?
    };
    let runtime = tokio::runtime::Runtime::new().map_err(fatal)?;
    runtime.block_on(async {
        let server = Server::bind(a.bind, fixtures, a.origin.as_deref()).await.map_err(fatal)?;
        let state = server.state();
        eprintln!("serving on {}", state.origin());
        for n in state.descriptors() {
            eprintln!("  {} network at {} ({} documents)", n.name, n.base, n.document_count);
        }
        server.run().await.map_err(fatal)?;
        Ok(0)
    })
}
