//! Corpus runner. Each `name.expect` sidecar next to `name.foid` lists CLI
//! invocations with their expected exit code and an output substring:
//!
//! ```text
//! source: one is not even
//! 0 | check even.foid | ok (1 proof)
//! ```
//!
//! Arguments naming `.foid` or `.hyp` files are resolved against the corpus
//! directory. Blank lines and lines starting with `#` are ignored.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::cli;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {msg}", path.display())]
    Malformed { path: PathBuf, line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub exit: i32,
    pub args: Vec<String>,
    pub expect: String,
}

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub name: String,
    pub theory: PathBuf,
    pub citation: String,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub case: String,
    pub step: Step,
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub elapsed: Duration,
}

impl StepResult {
    pub fn passed(&self) -> bool {
        self.code == self.step.exit && (self.stdout.contains(&self.step.expect) || self.stderr.contains(&self.step.expect))
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<StepResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(StepResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StepResult> {
        self.results.iter().filter(|r| !r.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let mark = if r.passed() { "pass" } else { "FAIL" };
            writeln!(f, "{mark} {}: foid {} ({:.2?})", r.case, r.step.args.join(" "), r.elapsed)?;
            if !r.passed() {
                writeln!(f, "  expected exit {} with {:?}, got exit {}", r.step.exit, r.step.expect, r.code)?;
                for l in r.stdout.lines().chain(r.stderr.lines()) {
                    writeln!(f, "  | {l}")?;
                }
            }
        }
        let bad = self.failures().count();
        write!(f, "{} of {} steps passed", self.results.len() - bad, self.results.len())
    }
}

fn parse_sidecar(path: &Path, text: &str) -> Result<(String, Vec<Step>), CorpusError> {
    let bad = |line, msg: &str| CorpusError::Malformed { path: path.to_path_buf(), line, msg: msg.into() };
    let mut citation = String::new();
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(c) = line.strip_prefix("source:") {
            citation = c.trim().to_string();
            continue;
        }
        let mut parts = line.splitn(3, '|').map(str::trim);
        let (Some(exit), Some(args), Some(expect)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(i + 1, "expected `exit | args | output`"));
        };
        let exit = exit.parse().map_err(|_| bad(i + 1, "exit code is not a number"))?;
        let args: Vec<String> = args.split_whitespace().map(String::from).collect();
        if args.is_empty() {
            return Err(bad(i + 1, "no command"));
        }
        steps.push(Step { exit, args, expect: expect.to_string() });
    }
    if citation.is_empty() {
        return Err(bad(1, "missing `source:` line"));
    }
    Ok((citation, steps))
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

/// Loads every case under `dir`, sorted by name.
pub fn load_cases(dir: &Path) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut cases = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io(dir))? {
        let path = entry.map_err(io(dir))?.path();
        if path.extension().is_some_and(|e| e == "expect") {
            let text = std::fs::read_to_string(&path).map_err(io(&path))?;
            let (citation, steps) = parse_sidecar(&path, &text)?;
            let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            cases.push(CorpusCase { theory: path.with_extension("foid"), name, citation, steps });
        }
    }
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(cases)
}

fn resolve(dir: &Path, arg: &str) -> String {
    let p = Path::new(arg);
    let is_file = p.extension().is_some_and(|e| e == "foid" || e == "hyp");
    if is_file && p.is_relative() {
        dir.join(p).display().to_string()
    } else {
        arg.to_string()
    }
}

pub fn run_case(dir: &Path, case: &CorpusCase) -> Vec<StepResult> {
    case.steps
        .iter()
        .map(|step| {
            let args = std::iter::once("foid".to_string()).chain(step.args.iter().map(|a| resolve(dir, a)));
            let t = Instant::now();
            let (code, stdout, stderr) = cli::run_captured(args);
            StepResult { case: case.name.clone(), step: step.clone(), code, stdout, stderr, elapsed: t.elapsed() }
        })
        .collect()
}

/// Runs every case in `dir`. Cases run in parallel; results keep case order.
pub fn run_corpus(dir: &Path) -> Result<Report, CorpusError> {
    let cases = load_cases(dir)?;
    let results = cases.par_iter().flat_map_iter(|c| run_case(dir, c)).collect();
    Ok(Report { results })
}
