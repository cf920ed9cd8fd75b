//! The `exfor` command line.
//!
//! Exit status: 0 clean, 1 completed with warnings, 2 structural errors in
//! strict mode, 3 usage or IO error. Data goes to standard output (or
//! `--out`), diagnostics to standard error.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use exfor_core::document::{entry_to_document, DocValue, Document, Object};
use exfor_core::normalize::UnitTable;
use exfor_core::query::{parse_query, QueryExpr};
use exfor_core::syntax::{DiagCode, ParseOptions};

use crate::config::{OutputMode, RunConfig, Settings, STORE_ENV};
use crate::inputs::{discover, load_units, read_text};
use crate::pipeline::{format_diagnostic, normalize_file, parse_file, ParsedFile};
use crate::search::{find, find_one};
use crate::store::{DocumentStore, StoreError};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_ERRORS: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "exfor", version, about = "Convert, validate, store and query EXFOR nuclear reaction data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert EXFOR files to entry documents, one JSON object per line
    Convert(InputArgs),
    /// Parse EXFOR files and report diagnostics
    Validate(InputArgs),
    /// Convert, normalize and store subentry documents
    Ingest(InputArgs),
    /// Query the store with a JSON filter
    Query(QueryArgs),
    /// Summarize the store
    Stats(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    #[command(flatten)]
    options: Options,
    /// EXFOR files or directories
    inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[command(flatten)]
    options: Options,
    /// Filter such as '{"BIB.REACTION": {"$regex": "^\\(26-FE-56"}}'
    query: Option<String>,
    /// Read the filter from a file
    #[arg(long, value_name = "PATH")]
    query_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Options {
    /// Write data output here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Store file [default: $EXFOR_STORE, then exfor.ndjson]
    #[arg(long, value_name = "PATH")]
    store: Option<PathBuf>,
    /// Unit rule file
    #[arg(long, value_name = "PATH")]
    units: Option<PathBuf>,
    /// Treat counter and layout inconsistencies as errors
    #[arg(long)]
    strict: bool,
    /// Pretty-print JSON output
    #[arg(long)]
    pretty: bool,
    /// Return only the first match
    #[arg(long)]
    first: bool,
    /// Print only the number of matches
    #[arg(long)]
    count: bool,
    /// key=value file with defaults for these options
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, value_name = "MODE", value_parser = ["ndjson", "pretty-json", "summary"])]
    output: Option<String>,
}

impl Options {
    fn settings(&self, inputs: Vec<PathBuf>, query_file: Option<PathBuf>) -> Settings {
        let output = match (&self.output, self.pretty) {
            (Some(mode), _) => Some(mode.parse().expect("clap checks the value")),
            (None, true) => Some(OutputMode::PrettyJson),
            (None, false) => None,
        };
        Settings {
            inputs,
            out: self.out.clone(),
            store: self.store.clone(),
            units: self.units.clone(),
            query_file,
            strict: self.strict.then_some(true),
            pretty: self.pretty.then_some(true),
            first: self.first.then_some(true),
            count: self.count.then_some(true),
            output,
        }
    }
}

/// Run with the process environment.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var_os(STORE_ENV).map(PathBuf::from), stdout, stderr)
}

/// Run with an explicit value for the store environment variable.
pub fn run_with_env<I, T>(args: I, env_store: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_CLEAN
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let (options, settings) = match &cli.command {
        Command::Convert(a) | Command::Validate(a) | Command::Ingest(a) | Command::Stats(a) => {
            (&a.options, a.options.settings(a.inputs.clone(), None))
        }
        Command::Query(a) => (&a.options, a.options.settings(Vec::new(), a.query_file.clone())),
    };
    let settings = match &options.config {
        Some(path) => match Settings::load(path) {
            Ok(file) => settings.or(file),
            Err(e) => return usage(stderr, e),
        },
        None => settings,
    };
    let config = RunConfig::resolve(settings, env_store);
    let mut ctx = Context { config, stderr };
    let result = match &cli.command {
        Command::Convert(_) => ctx.convert(stdout),
        Command::Validate(_) => ctx.validate(stdout),
        Command::Ingest(_) => ctx.ingest(stdout),
        Command::Query(a) => ctx.query(a.query.as_deref(), stdout),
        Command::Stats(_) => ctx.stats(stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure(message)) => usage(ctx.stderr, message),
    }
}

fn usage(stderr: &mut dyn Write, message: impl std::fmt::Display) -> i32 {
    let _ = writeln!(stderr, "exfor: {message}");
    EXIT_USAGE
}

/// A usage or IO failure; maps to exit status 3.
#[derive(Debug)]
struct Failure(String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

struct Context<'a> {
    config: RunConfig,
    stderr: &'a mut dyn Write,
}

/// Tracks the worst outcome seen so far.
#[derive(Debug, Default)]
struct Status {
    warnings: bool,
    errors: bool,
}

impl Status {
    fn code(&self, strict: bool) -> i32 {
        match (self.errors, self.warnings) {
            (true, _) if strict => EXIT_ERRORS,
            (true, _) | (_, true) => EXIT_WARNINGS,
            _ => EXIT_CLEAN,
        }
    }
}

impl Context<'_> {
    fn opts(&self) -> ParseOptions {
        ParseOptions { strict: self.config.strict }
    }

    fn inputs(&self) -> Result<Vec<PathBuf>, Failure> {
        if self.config.inputs.is_empty() {
            return Err(Failure("no input files given".into()));
        }
        Ok(discover(&self.config.inputs)?)
    }

    fn report(&mut self, file: &ParsedFile, status: &mut Status) {
        for d in &file.diagnostics {
            let _ = writeln!(self.stderr, "{}", format_diagnostic(&file.path, d));
            if d.is_error() {
                status.errors = true;
            } else {
                status.warnings = true;
            }
        }
    }

    fn convert(&mut self, stdout: &mut dyn Write) -> CmdResult {
        let files = self.inputs()?;
        let mode = self.config.output_or(OutputMode::Ndjson);
        let mut sink = Sink::new(self.config.out.as_deref(), stdout)?;
        let mut status = Status::default();
        let (mut entries, mut subentries) = (0, 0);
        for path in &files {
            let parsed = parse_file(path, &self.opts())?;
            self.report(&parsed, &mut status);
            for entry in &parsed.entries {
                entries += 1;
                subentries += entry.subentries.len();
                let doc = entry_to_document(entry);
                match mode {
                    OutputMode::Ndjson => sink.line(&doc.to_json())?,
                    OutputMode::PrettyJson => sink.line(&doc.to_json_pretty())?,
                    OutputMode::Summary => {}
                }
            }
        }
        if mode == OutputMode::Summary {
            sink.line(&format!("{entries} entries, {subentries} subentries"))?;
        }
        sink.finish()?;
        Ok(status.code(self.config.strict))
    }

    fn validate(&mut self, stdout: &mut dyn Write) -> CmdResult {
        let files = self.inputs()?;
        let mut status = Status::default();
        let mut rows = Vec::new();
        let mut by_code: BTreeMap<DiagCode, (usize, String)> = BTreeMap::new();
        for path in &files {
            let parsed = parse_file(path, &self.opts())?;
            self.report(&parsed, &mut status);
            for d in &parsed.diagnostics {
                let slot = by_code.entry(d.code).or_insert_with(|| (0, location(path, d.line_no)));
                slot.0 += 1;
            }
            rows.push((path.display().to_string(), parsed.seen, parsed.warnings(), parsed.errors()));
        }

        let report = Object::from_iter([
            (
                "files".to_owned(),
                DocValue::Array(
                    rows.iter()
                        .map(|(path, entries, warnings, errors)| {
                            DocValue::Object(Object::from_iter([
                                ("path".to_owned(), DocValue::from(path.as_str())),
                                ("entries".to_owned(), count(*entries)),
                                ("warnings".to_owned(), count(*warnings)),
                                ("errors".to_owned(), count(*errors)),
                            ]))
                        })
                        .collect(),
                ),
            ),
            (
                "diagnostics".to_owned(),
                DocValue::Array(
                    by_code
                        .iter()
                        .map(|(code, (n, first))| {
                            DocValue::Object(Object::from_iter([
                                ("code".to_owned(), DocValue::from(code.as_str())),
                                ("count".to_owned(), count(*n)),
                                ("first".to_owned(), DocValue::from(first.as_str())),
                            ]))
                        })
                        .collect(),
                ),
            ),
        ]);
        let mut text = String::new();
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(4);
        text.push_str(&format!("{:<width$}  {:>7}  {:>8}  {:>6}\n", "file", "entries", "warnings", "errors"));
        for (path, entries, warnings, errors) in &rows {
            text.push_str(&format!("{path:<width$}  {entries:>7}  {warnings:>8}  {errors:>6}\n"));
        }
        if by_code.is_empty() {
            text.push_str("no diagnostics\n");
        } else {
            text.push_str(&format!("\n{:<20}  {:>5}  first\n", "code", "count"));
            for (code, (n, first)) in &by_code {
                text.push_str(&format!("{:<20}  {n:>5}  {first}\n", code.as_str()));
            }
        }
        self.emit_report(stdout, &report, &text)?;
        Ok(status.code(self.config.strict))
    }

    fn ingest(&mut self, stdout: &mut dyn Write) -> CmdResult {
        let files = self.inputs()?;
        let units = load_units(self.config.units.as_deref())?;
        let opts = self.opts();
        let normalized = files
            .par_iter()
            .map(|path| parse_file(path, &opts).map(|parsed| normalize_file(parsed, &units)))
            .collect::<Result<Vec<_>, _>>()?;

        let mut status = Status::default();
        let mut warnings = 0;
        let (mut entries, mut documents) = (0, 0);
        for file in &normalized {
            self.report(&file.parsed, &mut status);
            warnings += file.parsed.warnings();
            for w in &file.warnings {
                let _ = writeln!(self.stderr, "{}: warning: {w}", file.parsed.path.display());
                status.warnings = true;
                warnings += 1;
            }
            entries += file.parsed.entries.len();
            documents += file.documents.len();
        }

        let mut store = DocumentStore::open_or_create(&self.config.store)?;
        self.report_corrupt(&store, &mut status);
        let docs = normalized.into_iter().flat_map(|f| f.documents);
        let (report, failure) = match store.ingest(docs) {
            Ok(report) => (report, None),
            Err(e) => (e.report, Some(e.error)),
        };
        if report.rejected > 0 {
            let _ = writeln!(self.stderr, "warning: {} documents without an ID were rejected", report.rejected);
            status.warnings = true;
        }
        let object = Object::from_iter([
            ("entries".to_owned(), count(entries)),
            ("subentry_documents".to_owned(), count(documents)),
            ("inserted".to_owned(), count(report.inserted)),
            ("replaced".to_owned(), count(report.replaced)),
            ("rejected".to_owned(), count(report.rejected)),
            ("warnings".to_owned(), count(warnings)),
        ]);
        let text = format!(
            "entries {entries}\nsubentry documents {documents}\ninserted {}\nreplaced {}\nrejected {}\nwarnings {warnings}\n",
            report.inserted, report.replaced, report.rejected
        );
        self.emit_report(stdout, &object, &text)?;
        if let Some(error) = failure {
            return Err(error.into());
        }
        Ok(status.code(self.config.strict))
    }

    fn report_corrupt(&mut self, store: &DocumentStore, status: &mut Status) {
        for e in store.corrupt_lines() {
            let _ = writeln!(self.stderr, "warning: {e}");
            status.warnings = true;
        }
    }

    fn query(&mut self, inline: Option<&str>, stdout: &mut dyn Write) -> CmdResult {
        let text = match (inline, &self.config.query_file) {
            (Some(_), Some(_)) => return Err(Failure("give the query inline or with --query-file, not both".into())),
            (Some(text), None) => text.to_owned(),
            (None, Some(path)) => read_text(path)?,
            (None, None) => return Err(Failure("no query given".into())),
        };
        let query = parse_query(&text).map_err(|e| Failure(format!("bad query: {e}")))?;
        let store = DocumentStore::open(&self.config.store)?;
        let mut status = Status::default();
        let matches = self.run_query(&store, &query, &mut status);
        let mode = self.config.output_or(OutputMode::Ndjson);
        let mut sink = Sink::new(self.config.out.as_deref(), stdout)?;
        if self.config.count || mode == OutputMode::Summary {
            sink.line(&matches.len().to_string())?;
        } else {
            for doc in &matches {
                match mode {
                    OutputMode::PrettyJson => sink.line(&doc.to_json_pretty())?,
                    _ => sink.line(&doc.to_json())?,
                }
            }
        }
        sink.finish()?;
        Ok(status.code(false))
    }

    fn run_query(&mut self, store: &DocumentStore, query: &QueryExpr, status: &mut Status) -> Vec<Document> {
        let mut note = |e: StoreError, stderr: &mut dyn Write| {
            let _ = writeln!(stderr, "warning: {e}");
            status.warnings = true;
        };
        if self.config.first && query.id_lookup().is_some() {
            return match find_one(store, query) {
                Ok(found) => found.into_iter().collect(),
                Err(e) => {
                    note(e, self.stderr);
                    Vec::new()
                }
            };
        }
        let mut matches = Vec::new();
        for item in find(store, query) {
            match item {
                Ok(doc) => {
                    matches.push(doc);
                    if self.config.first {
                        break;
                    }
                }
                Err(e) => note(e, self.stderr),
            }
        }
        matches
    }

    fn stats(&mut self, stdout: &mut dyn Write) -> CmdResult {
        let units = load_units(self.config.units.as_deref())?;
        let store = DocumentStore::open(&self.config.store)?;
        let mut status = Status::default();
        let mut docs = 0;
        let mut entry_ids = BTreeSet::new();
        let mut keywords: HashMap<String, usize> = HashMap::new();
        let mut unit_counts: BTreeMap<String, usize> = BTreeMap::new();
        for item in store.scan() {
            let doc = match item {
                Ok(doc) => doc,
                Err(e) => {
                    let _ = writeln!(self.stderr, "warning: {e}");
                    status.warnings = true;
                    continue;
                }
            };
            docs += 1;
            let entry = doc.get("ENTRYID").and_then(DocValue::as_str).or_else(|| doc.id().and_then(|id| id.get(..5)));
            if let Some(entry) = entry {
                entry_ids.insert(entry.to_owned());
            }
            if let Some(bib) = doc.get("BIB").and_then(DocValue::as_object) {
                for key in bib.keys() {
                    *keywords.entry(key.to_owned()).or_default() += 1;
                }
            }
            for unit in stored_units(&doc) {
                *unit_counts.entry(unit.to_owned()).or_default() += 1;
            }
        }
        let mut top: Vec<(String, usize)> = keywords.into_iter().collect();
        top.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        top.truncate(10);
        let unit_rows: Vec<UnitRow> = unit_counts.iter().map(|(u, n)| UnitRow::classify(u, *n, &units)).collect();
        let unconverted: Vec<&UnitRow> = unit_rows.iter().filter(|r| r.status != UnitStatus::Standard).collect();

        let object = Object::from_iter([
            ("documents".to_owned(), count(docs)),
            ("entries".to_owned(), count(entry_ids.len())),
            (
                "bib_keywords".to_owned(),
                DocValue::Object(top.iter().map(|(k, n)| (k.clone(), count(*n))).collect()),
            ),
            (
                "units".to_owned(),
                DocValue::Array(
                    unit_rows
                        .iter()
                        .map(|r| {
                            DocValue::Object(Object::from_iter([
                                ("unit".to_owned(), DocValue::from(r.unit.as_str())),
                                ("count".to_owned(), count(r.count)),
                                ("status".to_owned(), DocValue::from(r.status.as_str())),
                                (
                                    "from".to_owned(),
                                    DocValue::Array(r.sources.iter().map(|s| DocValue::from(s.as_str())).collect()),
                                ),
                            ]))
                        })
                        .collect(),
                ),
            ),
            (
                "unconverted".to_owned(),
                DocValue::Array(
                    unconverted
                        .iter()
                        .map(|r| {
                            DocValue::Object(Object::from_iter([
                                ("unit".to_owned(), DocValue::from(r.unit.as_str())),
                                ("energy_or_cross_section".to_owned(), DocValue::Bool(r.physical)),
                            ]))
                        })
                        .collect(),
                ),
            ),
        ]);

        let mut text = format!("documents {docs}\nentries {}\n", entry_ids.len());
        text.push_str("\ntop BIB keywords\n");
        for (k, n) in &top {
            text.push_str(&format!("  {k:<20} {n}\n"));
        }
        text.push_str("\nunits (stored, standardized from)\n");
        for r in &unit_rows {
            let from = if r.sources.is_empty() { String::new() } else { format!("  <- {}", r.sources.join(" ")) };
            text.push_str(&format!("  {:<16} {:>6}  {}{from}\n", r.unit, r.count, r.status.as_str()));
        }
        text.push_str("\nunconverted units\n");
        if unconverted.is_empty() {
            text.push_str("  none\n");
        }
        for r in &unconverted {
            let flag = if r.physical { "  energy/cross-section" } else { "" };
            text.push_str(&format!("  {}{flag}\n", r.unit));
        }
        self.emit_report(stdout, &object, &text)?;
        Ok(status.code(false))
    }

    fn emit_report(&self, stdout: &mut dyn Write, object: &Object, text: &str) -> Result<(), Failure> {
        let mut sink = Sink::new(self.config.out.as_deref(), stdout)?;
        let doc = Document::new(object.clone());
        match self.config.output_or(OutputMode::Summary) {
            OutputMode::Summary => sink.raw(text)?,
            OutputMode::Ndjson => sink.line(&doc.to_json())?,
            OutputMode::PrettyJson => sink.line(&doc.to_json_pretty())?,
        }
        sink.finish()
    }
}

fn count(n: usize) -> DocValue {
    DocValue::Number(n as f64)
}

fn location(path: &Path, line: usize) -> String {
    match line {
        0 => path.display().to_string(),
        n => format!("{}:{n}", path.display()),
    }
}

/// Unit strings of DATA columns and COMMON fields.
fn stored_units(doc: &Document) -> impl Iterator<Item = &str> {
    doc.as_object()
        .iter()
        .filter(|(key, _)| *key == "DATA" || key.starts_with("COMMON"))
        .filter_map(|(_, block)| block.get("UNIT").and_then(DocValue::as_array))
        .flatten()
        .filter_map(DocValue::as_str)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UnitStatus {
    /// A rule target: what standardization produces.
    Standard,
    /// Has a rule that was not applied, so the store was built with
    /// different rules.
    Convertible,
    PassThrough,
}

impl UnitStatus {
    fn as_str(self) -> &'static str {
        match self {
            UnitStatus::Standard => "standard",
            UnitStatus::Convertible => "convertible",
            UnitStatus::PassThrough => "pass-through",
        }
    }
}

#[derive(Debug)]
struct UnitRow {
    unit: String,
    count: usize,
    status: UnitStatus,
    /// Units that standardize to this one.
    sources: Vec<String>,
    /// Mentions an energy or cross-section unit known to the rule table.
    physical: bool,
}

impl UnitRow {
    fn classify(unit: &str, count: usize, table: &UnitTable) -> UnitRow {
        let status = match table.rule_for(unit) {
            Some(rule) if rule.target == unit && rule.factor == 1.0 => UnitStatus::Standard,
            Some(_) => UnitStatus::Convertible,
            None => UnitStatus::PassThrough,
        };
        let sources = table.rules().iter().filter(|r| r.target == unit).map(|r| r.source.clone()).collect();
        let physical = unit
            .split('/')
            .any(|part| table.rules().iter().any(|r| r.source == part || r.target == part));
        UnitRow { unit: unit.to_owned(), count, status, sources, physical }
    }
}

/// Data output: a file given by `--out`, or standard output.
struct Sink<'a> {
    file: Option<(PathBuf, BufWriter<File>)>,
    stdout: &'a mut dyn Write,
}

impl<'a> Sink<'a> {
    fn new(out: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Self, Failure> {
        let file = match out {
            Some(path) => {
                let f = File::create(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                Some((path.to_path_buf(), BufWriter::new(f)))
            }
            None => None,
        };
        Ok(Sink { file, stdout })
    }

    fn raw(&mut self, text: &str) -> Result<(), Failure> {
        let result = match &mut self.file {
            Some((_, w)) => w.write_all(text.as_bytes()),
            None => self.stdout.write_all(text.as_bytes()),
        };
        result.map_err(|e| self.fail(e))
    }

    fn line(&mut self, text: &str) -> Result<(), Failure> {
        self.raw(text)?;
        self.raw("\n")
    }

    fn finish(mut self) -> Result<(), Failure> {
        let result = match &mut self.file {
            Some((_, w)) => w.flush(),
            None => self.stdout.flush(),
        };
        result.map_err(|e| self.fail(e))
    }

    fn fail(&self, e: std::io::Error) -> Failure {
        match &self.file {
            Some((path, _)) => Failure(format!("{}: {e}", path.display())),
            None => Failure(format!("standard output: {e}")),
        }
    }
}
