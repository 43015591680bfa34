//! The `topicforge` command line.
//!
//! By default every command works on a local workspace directory. With
//! `--server URL` the same commands are sent to a running service instead;
//! corpus and factorization names are then the ids the server assigns.
//! `--json` prints exactly the JSON the service would return.

pub mod error;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use topicforge_client::Client;
use topicforge_core::nmf::NmfConfig;
use topicforge_core::query::{split_list, sparsity, Query, QueryResult};
use topicforge_core::report::{
    self, to_json, CorpusRequest, CorpusSummary, ExclusiveTerm, FactorizationSummary, ResidualCurve, Sparsity,
};
use topicforge_core::text::{build_corpus, load_documents, load_stopwords, Corpus, PipelineConfig};
use topicforge_core::topics::{render_text, TopicReport};
use topicforge_core::workspace::{is_valid_name, slugify, StoredFactorization, Workspace};
use topicforge_core::{factorize, LabeledMatrix};

pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "topicforge", version, about = "Term-document matrices, NMF and topic reports")]
pub struct Cli {
    /// Workspace directory for corpora and factorizations.
    #[arg(long, global = true, env = "TOPICFORGE_WORKSPACE", default_value = "topicforge-workspace")]
    pub workspace: PathBuf,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Send commands to a topicforge service at this URL.
    #[arg(long, global = true, env = "TOPICFORGE_SERVER")]
    pub server: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a corpus from a directory of .txt files, a JSON document list,
    /// or a ready-made matrix (.csv or JSON).
    Ingest(IngestArgs),
    /// Selection queries over a corpus matrix.
    Query(QueryArgs),
    /// Run NMF on a corpus.
    Factorize(FactorizeArgs),
    /// Topic report, renaming and rank-one terms.
    Topics(TopicsArgs),
    /// Write a stored object as CSV or JSON.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub input: PathBuf,
    /// Corpus name (local workspace only); defaults to the input file name.
    #[arg(long)]
    pub name: Option<String>,
    /// Drop terms occurring fewer than N times in the whole corpus [default: 4].
    #[arg(long, value_name = "N")]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub no_stem: bool,
    /// Stop-word file, one word per line.
    #[arg(long, value_name = "FILE", conflicts_with = "no_stopwords")]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub no_stopwords: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("selection").required(true).args(["docs", "terms", "diff", "exclusive", "sparsity"])))]
pub struct QueryArgs {
    pub corpus: String,
    /// Term frequencies summed over these documents (comma-separated).
    #[arg(long)]
    pub docs: Option<String>,
    /// Per-document counts summed over these terms (comma-separated).
    #[arg(long)]
    pub terms: Option<String>,
    /// Term frequencies of document A minus document B.
    #[arg(long, value_name = "A,B")]
    pub diff: Option<String>,
    /// Terms that occur in exactly one document.
    #[arg(long)]
    pub exclusive: bool,
    /// Fraction of zero entries.
    #[arg(long)]
    pub sparsity: bool,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    pub corpus: String,
    #[arg(long)]
    pub rank: usize,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Stop when the relative change of the residual drops below this.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Rescale W columns to unit sum.
    #[arg(long)]
    pub normalize_w: bool,
    /// Factorization name (local workspace only); defaults to CORPUS-rRANK.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct TopicsArgs {
    pub factorization: String,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Rename a topic (by number or current name); may be repeated.
    #[arg(long = "name", value_name = "TOPIC=NAME")]
    pub names: Vec<String>,
    /// Print the rank-one matrix of one topic instead of the report.
    #[arg(long, value_name = "TOPIC")]
    pub rank_one: Option<String>,
    /// Show loadings below this value as 0 in the text report.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    /// Corpus term-by-document matrix.
    Matrix,
    /// Stored factorization (JSON only).
    Factorization,
    /// Residual after each iteration.
    Residuals,
    W,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub kind: ExportKind,
    /// Corpus name for `matrix`, factorization name otherwise.
    pub name: String,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(short, long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

enum Backend {
    Local(Workspace),
    Remote(Client),
}

/// Run one command and return what it prints on stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let backend = match &cli.server {
        Some(url) => Backend::Remote(Client::new(url)?),
        None => Backend::Local(Workspace::open(&cli.workspace)),
    };
    match cli.command {
        Command::Ingest(args) => ingest(&backend, args, cli.json),
        Command::Query(args) => query(&backend, args, cli.json),
        Command::Factorize(args) => run_factorize(&backend, args, cli.json),
        Command::Topics(args) => topics(&backend, args, cli.json),
        Command::Export(args) => export(&backend, args, cli.json),
    }
}

/// Right-aligned values next to left-aligned labels.
fn table(rows: &[(String, String)]) -> String {
    let lw = rows.iter().map(|(l, _)| l.chars().count()).max().unwrap_or(0);
    let vw = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(l, v)| format!("{l:<lw$}  {v:>vw$}\n"))
        .collect()
}

fn pairs<'a>(items: impl IntoIterator<Item = (&'a topicforge_core::Label, f64)>) -> Vec<(String, String)> {
    items.into_iter().map(|(l, v)| (l.to_string(), v.to_string())).collect()
}

fn check_name(name: &str) -> Result<(), CliError> {
    if is_valid_name(name) {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "invalid name {name:?}: use letters, digits, '-' or '_' (max 64)"
        )))
    }
}

fn read_matrix(path: &Path) -> Result<LabeledMatrix, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    LabeledMatrix::read_csv(file).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn ingest_request(args: &IngestArgs) -> Result<CorpusRequest, CliError> {
    let path = &args.input;
    let meta = fs::metadata(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let extension = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);

    let matrix = if meta.is_dir() {
        None
    } else {
        match extension.as_deref() {
            Some("csv") => Some(read_matrix(path)?),
            Some("json") => {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
                let value: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
                if value.is_object() {
                    Some(
                        serde_json::from_value(value)
                            .map_err(|e| CliError::io(format!("{}: not a matrix: {e}", path.display())))?,
                    )
                } else {
                    None
                }
            }
            _ => {
                return Err(CliError::io(format!(
                    "{}: expected a directory, a .json file or a .csv file",
                    path.display()
                )))
            }
        }
    };

    if let Some(matrix) = matrix {
        if args.min_count.is_some() || args.no_stem || args.stopwords.is_some() || args.no_stopwords {
            return Err(CliError::invalid("pipeline options do not apply to a matrix input"));
        }
        return Ok(CorpusRequest {
            documents: None,
            config: None,
            matrix: Some(matrix),
        });
    }

    let documents = load_documents(path)?;
    let mut config = PipelineConfig::default().with_stem(!args.no_stem);
    if let Some(n) = args.min_count {
        config = config.with_min_total_count(n);
    }
    if args.no_stopwords {
        config.stopwords.clear();
    } else if let Some(file) = &args.stopwords {
        config.stopwords = load_stopwords(file)?;
    }
    Ok(CorpusRequest {
        documents: Some(documents),
        config: Some(config),
        matrix: None,
    })
}

fn local_corpus(request: CorpusRequest) -> Result<Corpus, CliError> {
    match (request.documents, request.matrix) {
        (Some(docs), _) => Ok(build_corpus(docs, request.config.unwrap_or_default())?),
        (None, Some(matrix)) => Ok(Corpus::from_matrix(matrix)),
        (None, None) => unreachable!("ingest_request always sets one"),
    }
}

fn render_summary(summary: &CorpusSummary) -> String {
    let mut out = format!("{}: {} x {}\n", summary.corpus_id, summary.n_terms, summary.n_docs);
    out.push_str("top terms:\n");
    for line in table(&pairs(summary.top_terms.iter().map(|(l, v)| (l, *v)))).lines() {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn ingest(backend: &Backend, args: IngestArgs, json: bool) -> Result<String, CliError> {
    let request = ingest_request(&args)?;
    let (summary, body) = match backend {
        Backend::Local(ws) => {
            let name = match &args.name {
                Some(n) => n.clone(),
                None => args
                    .input
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .and_then(slugify)
                    .unwrap_or_else(|| "corpus".to_string()),
            };
            check_name(&name)?;
            let corpus = local_corpus(request)?;
            ws.save_corpus(&name, &corpus)?;
            let summary = CorpusSummary::new(name, &corpus);
            let body = to_json(&summary);
            (summary, body)
        }
        Backend::Remote(client) => {
            if args.name.is_some() {
                eprintln!("note: --name is ignored with --server; the server assigns ids");
            }
            let f = client.create_corpus(&request)?;
            (f.value, f.body)
        }
    };
    Ok(if json { body } else { render_summary(&summary) })
}

fn parse_query(args: &QueryArgs) -> Result<Option<Query>, CliError> {
    if let Some(d) = &args.docs {
        return Ok(Some(Query::Docs(split_list(d))));
    }
    if let Some(t) = &args.terms {
        return Ok(Some(Query::Terms(split_list(t))));
    }
    if let Some(d) = &args.diff {
        return match <[String; 2]>::try_from(split_list(d)) {
            Ok([a, b]) => Ok(Some(Query::Diff(a, b))),
            Err(_) => Err(CliError::invalid("--diff takes two documents: --diff A,B")),
        };
    }
    Ok(None)
}

fn render_query(result: &QueryResult) -> String {
    format!("{}\n{}", result.description, table(&pairs(result.vector.iter())))
}

fn render_exclusive(terms: &[ExclusiveTerm]) -> String {
    if terms.is_empty() {
        return "no term occurs in exactly one document\n".to_string();
    }
    terms.iter().map(|t| format!("{} → {}\n", t.term, t.document)).collect()
}

fn query(backend: &Backend, args: QueryArgs, json: bool) -> Result<String, CliError> {
    let selection = parse_query(&args)?;
    match backend {
        Backend::Local(ws) => {
            let matrix = ws.load_corpus(&args.corpus)?.matrix;
            if let Some(q) = selection {
                let result = q.run(&matrix)?;
                return Ok(if json { to_json(&result) } else { render_query(&result) });
            }
            if args.exclusive {
                let terms = report::exclusive_terms(&matrix);
                return Ok(if json { to_json(&terms) } else { render_exclusive(&terms) });
            }
            let s = Sparsity {
                sparsity: sparsity(&matrix),
            };
            Ok(if json { to_json(&s) } else { format!("sparsity: {}\n", s.sparsity) })
        }
        Backend::Remote(client) => {
            if let Some(q) = selection {
                let f = client.query(&args.corpus, &q)?;
                return Ok(if json { f.body } else { render_query(&f.value) });
            }
            if args.exclusive {
                let f = client.exclusive(&args.corpus)?;
                return Ok(if json { f.body } else { render_exclusive(&f.value) });
            }
            let f = client.sparsity(&args.corpus)?;
            Ok(if json { f.body } else { format!("sparsity: {}\n", f.value.sparsity) })
        }
    }
}

fn render_factorization(s: &FactorizationSummary) -> String {
    format!(
        "{}: residual {:.6}, {} iterations, {}\n",
        s.factorization_id,
        s.residual,
        s.iterations,
        if s.converged { "converged" } else { "not converged" }
    )
}

fn run_factorize(backend: &Backend, args: FactorizeArgs, json: bool) -> Result<String, CliError> {
    let mut config = NmfConfig::new(args.rank).with_normalize_w(args.normalize_w);
    if let Some(r) = args.restarts {
        config = config.with_restarts(r);
    }
    if let Some(s) = args.seed {
        config = config.with_seed(s);
    }
    if let Some(m) = args.max_iters {
        config = config.with_max_iters(m);
    }
    if let Some(t) = args.tol {
        config = config.with_rel_tol(t);
    }
    let (summary, body) = match backend {
        Backend::Local(ws) => {
            let name = args.name.clone().unwrap_or_else(|| format!("{}-r{}", args.corpus, args.rank));
            check_name(&name)?;
            let corpus = ws.load_corpus(&args.corpus)?;
            let f = factorize(&corpus.matrix, &config)?;
            let summary = FactorizationSummary::new(name.clone(), &f);
            ws.save_factorization(&name, &StoredFactorization::new(args.corpus.clone(), f))?;
            let body = to_json(&summary);
            (summary, body)
        }
        Backend::Remote(client) => {
            if args.name.is_some() {
                eprintln!("note: --name is ignored with --server; the server assigns ids");
            }
            let f = client.factorize(&args.corpus, &config)?;
            (f.value, f.body)
        }
    };
    Ok(if json { body } else { render_factorization(&summary) })
}

fn parse_renames(names: &[String]) -> Result<Vec<(String, String)>, CliError> {
    names
        .iter()
        .map(|spec| match spec.split_once('=') {
            Some((g, n)) if !g.trim().is_empty() => Ok((g.trim().to_string(), n.to_string())),
            _ => Err(CliError::invalid(format!("--name expects TOPIC=NAME, got {spec:?}"))),
        })
        .collect()
}

fn topics(backend: &Backend, args: TopicsArgs, json: bool) -> Result<String, CliError> {
    let renames = parse_renames(&args.names)?;
    let render = |report: &TopicReport| render_text(report, args.threshold);
    match backend {
        Backend::Local(ws) => {
            let mut stored = ws.load_factorization(&args.factorization)?;
            if !renames.is_empty() {
                for (g, name) in &renames {
                    let view = stored.view()?;
                    let renamed = view.name_topic(view.resolve(g)?, name)?;
                    stored.topic_names = renamed.names().to_vec();
                }
                ws.save_factorization(&args.factorization, &stored)?;
            }
            let view = stored.view()?;
            if let Some(g) = &args.rank_one {
                let m = view.rank_one_term(view.resolve(g)?)?;
                return Ok(if json { to_json(&m) } else { m.to_csv_string() });
            }
            let report = view.report(args.top_k)?;
            Ok(if json { to_json(&report) } else { render(&report) })
        }
        Backend::Remote(client) => {
            for (g, name) in &renames {
                client.rename_topic(&args.factorization, g, name)?;
            }
            if let Some(g) = &args.rank_one {
                let f = client.rank_one(&args.factorization, g)?;
                return Ok(if json { f.body } else { f.value.to_csv_string() });
            }
            let f = client.topics(&args.factorization, Some(args.top_k))?;
            Ok(if json { f.body } else { render(&f.value) })
        }
    }
}

fn export(backend: &Backend, args: ExportArgs, json: bool) -> Result<String, CliError> {
    let format = match (args.format, json, args.kind) {
        (Some(f), _, _) => f,
        (None, true, _) | (None, _, ExportKind::Factorization) => Format::Json,
        (None, false, _) => Format::Csv,
    };
    let name = args.name.as_str();
    let text = match (args.kind, format) {
        (ExportKind::Factorization, Format::Csv) => {
            return Err(CliError::invalid(
                "a factorization exports as JSON only; export w, h or residuals for CSV",
            ))
        }
        (ExportKind::Matrix, _) => {
            let (matrix, body) = match backend {
                Backend::Local(ws) => {
                    let m = ws.load_corpus(name)?.matrix;
                    let body = to_json(&m);
                    (m, body)
                }
                Backend::Remote(client) => {
                    let f = client.matrix(name)?;
                    (f.value, f.body)
                }
            };
            match format {
                Format::Csv => matrix.to_csv_string(),
                Format::Json => body,
            }
        }
        (kind, format) => {
            let (stored, body) = match backend {
                Backend::Local(ws) => {
                    let s = ws.load_factorization(name)?;
                    let body = to_json(&s);
                    (s, body)
                }
                Backend::Remote(client) => {
                    let f = client.factorization(name)?;
                    (f.value, f.body)
                }
            };
            let f = &stored.factorization;
            match (kind, format) {
                (ExportKind::Factorization, _) => body,
                (ExportKind::Residuals, Format::Csv) => f.residual_history_csv(),
                (ExportKind::Residuals, Format::Json) => to_json(&ResidualCurve {
                    residual_history: f.residual_history.clone(),
                }),
                (ExportKind::W, Format::Csv) => f.w.to_csv_string(),
                (ExportKind::W, Format::Json) => to_json(&f.w),
                (ExportKind::H, Format::Csv) => f.h.to_csv_string(),
                (ExportKind::H, Format::Json) => to_json(&f.h),
                (ExportKind::Matrix, _) => unreachable!("handled above"),
            }
        }
    };
    match &args.output {
        Some(path) => {
            let mut text = text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_aligns_labels_left_and_values_right() {
        let rows = vec![("a".to_string(), "1".to_string()), ("bbb".to_string(), "-20".to_string())];
        assert_eq!(table(&rows), "a      1\nbbb  -20\n");
    }

    #[test]
    fn rename_specs() {
        assert_eq!(
            parse_renames(&["1=Horror".into(), "Comedy=Satire=ish".into()]).unwrap(),
            vec![("1".into(), "Horror".into()), ("Comedy".into(), "Satire=ish".into())]
        );
        assert_eq!(parse_renames(&["Horror".into()]).unwrap_err().code, exit::INVALID);
        assert_eq!(parse_renames(&["=x".into()]).unwrap_err().code, exit::INVALID);
    }

    #[test]
    fn server_error_codes_map_to_exit_codes() {
        use topicforge_client::ClientError;
        let http = |status, error: &str| ClientError::Http {
            status,
            error: error.into(),
            message: String::new(),
        };
        assert_eq!(CliError::from(http(404, "not_found")).code, exit::UNKNOWN);
        assert_eq!(CliError::from(http(400, "unknown_label")).code, exit::UNKNOWN);
        assert_eq!(CliError::from(http(409, "duplicate_name")).code, exit::UNKNOWN);
        assert_eq!(CliError::from(http(422, "empty_corpus")).code, exit::EMPTY);
        assert_eq!(CliError::from(http(422, "rank_too_large")).code, exit::INVALID);
        assert_eq!(CliError::from(ClientError::Transport("down".into())).code, exit::IO);
    }
}
