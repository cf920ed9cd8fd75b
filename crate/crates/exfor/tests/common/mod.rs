#![allow(dead_code)]

use std::path::{Path, PathBuf};

use exfor::cli;
use exfor::core::normalize::UnitTable;
use exfor::core::syntax::ParseOptions;
use exfor::inputs::discover;
use exfor::pipeline::{normalize_file, parse_file};
use exfor::store::DocumentStore;

pub const FE56_SIG: &str = r"^\(26-FE-56\(N,[^)]+\)[^,]*,,SIG\)";

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The full clean corpus, session entries included.
pub fn corpus() -> PathBuf {
    fixtures().join("corpus")
}

/// Three entries with six data subentries.
pub fn session() -> PathBuf {
    corpus().join("session")
}

pub fn corpus_files() -> Vec<PathBuf> {
    discover(&[corpus()]).unwrap()
}

/// Parse, normalize and ingest `inputs` into a new store at `path`.
pub fn build_store(inputs: &[PathBuf], path: &Path) -> DocumentStore {
    let mut store = DocumentStore::open_or_create(path).unwrap();
    let units = UnitTable::default();
    for file in discover(inputs).unwrap() {
        let parsed = parse_file(&file, &ParseOptions::LENIENT).unwrap();
        assert!(parsed.diagnostics.is_empty(), "{}: {:?}", file.display(), parsed.diagnostics);
        store.ingest(normalize_file(parsed, &units).documents).unwrap();
    }
    store
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

pub fn run_env(args: &[&str], env_store: Option<&Path>) -> Output {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("exfor").chain(args.iter().copied());
    let code = cli::run_with_env(argv, env_store.map(Path::to_path_buf), &mut stdout, &mut stderr);
    Output { code, stdout: String::from_utf8(stdout).unwrap(), stderr: String::from_utf8(stderr).unwrap() }
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Subentry IDs and REACTION strings read straight from the fixture text,
/// without the library parser.
pub fn raw_reactions(files: &[PathBuf]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for file in files {
        let text = std::fs::read_to_string(file).unwrap();
        let mut subent = String::new();
        for line in text.lines() {
            if line.starts_with("SUBENT ") {
                subent = line[11..22].trim().to_owned();
            } else if line.starts_with("REACTION ") && line.as_bytes().get(10) == Some(&b' ') {
                out.push((subent.clone(), line[11..line.len().min(66)].trim_end().to_owned()));
            }
        }
    }
    out
}
