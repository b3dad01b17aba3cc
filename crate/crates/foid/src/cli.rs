//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::kernel::{check_script, indscheme_instance, lint, matimps, CheckError, Proof, Warning};
use crate::parser::{document_to_string, parse_extending, parse_named, Document, ParseError};
use crate::semantics::{Semantics, Structure, ThreeValued, Truth};
use crate::stable::stable_models;
use crate::syntax::{name, Formula, Name, Sequent};
use crate::validator::{validate, Config, Outcome, Verdict};
use crate::wf::well_founded_model;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "foid", version, about = "Proof checker and model finder for FO(ID)")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Print traces and per-proof detail.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SemArg {
    Wf,
    Stable,
    Both,
}

impl SemArg {
    fn list(self) -> Vec<Semantics> {
        match self {
            SemArg::Wf => vec![Semantics::Wf],
            SemArg::Stable => vec![Semantics::Stable],
            SemArg::Both => vec![Semantics::Wf, Semantics::Stable],
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Bounds {
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_n: u32,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub cap: u32,
    /// Allow function symbols of arity two or more.
    #[arg(long)]
    pub wide_functions: bool,
}

impl Bounds {
    fn config(&self) -> Config {
        Config {
            max_n: self.max_n as usize,
            cap: self.cap as usize,
            wide_functions: self.wide_functions,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every proof in the given files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Report lint warnings for every proof.
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Well-founded model, or stable models, of a definition in a context.
    Model {
        file: PathBuf,
        def: String,
        context: String,
        #[arg(long, value_enum, default_value_t = SemArg::Wf)]
        semantics: SemArg,
        #[arg(long, default_value_t = 20)]
        cap: u32,
    },
    /// Every stable model of a definition in a context.
    Stable {
        file: PathBuf,
        def: String,
        context: String,
        #[arg(long, default_value_t = 20)]
        cap: u32,
    },
    /// Search small structures for a counterexample to a sequent.
    Validate {
        file: PathBuf,
        sequent: String,
        #[arg(long, value_enum, default_value_t = SemArg::Both)]
        semantics: SemArg,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// First-order approximation of a sequent as a pure first-order document.
    ExportFo {
        file: PathBuf,
        sequent: String,
        /// File of `induction` requests to add scheme instances for.
        #[arg(long)]
        hyps: Option<PathBuf>,
    },
}

struct Out<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    format: Format,
    color: bool,
    verbose: bool,
}

impl Out<'_> {
    fn paint(&self, text: &str, code: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    fn error(&mut self, s: impl AsRef<str>) {
        let e = self.paint("error", "31");
        let _ = writeln!(self.err, "{e}: {}", s.as_ref());
    }

    fn record(&mut self, fields: &[(&str, String)]) {
        let mut s = String::new();
        for (i, (k, v)) in fields.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            if v.is_empty() || v.contains(|c: char| c.is_whitespace() || c == '"') {
                let _ = write!(s, "{k}={v:?}");
            } else {
                let _ = write!(s, "{k}={v}");
            }
        }
        self.line(s);
    }
}

/// Outcome of checking one proof block.
#[derive(Debug)]
pub struct ProofResult {
    pub target: Name,
    pub result: Result<Proof, CheckError>,
    pub warnings: Vec<Warning>,
}

pub fn check_document(doc: &Document) -> Vec<ProofResult> {
    doc.proofs
        .iter()
        .map(|b| {
            let result = check_script(&doc.sequents[&b.target], &b.root);
            let warnings = result.as_ref().map(lint).unwrap_or_default();
            ProofResult {
                target: b.target.clone(),
                result,
                warnings,
            }
        })
        .collect()
}

pub fn load(path: &Path) -> Result<Document, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_named(&text, &path.display().to_string()).map_err(|e: ParseError| e.to_string())
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

fn cmd_check(o: &mut Out, files: &[PathBuf], lint_only: bool) -> i32 {
    let mut docs = Vec::new();
    for f in files {
        match load(f) {
            Ok(d) => docs.push((f, d)),
            Err(e) => {
                o.error(e);
                return EXIT_USAGE;
            }
        }
    }
    let (mut total, mut failed, mut warned) = (0, 0, 0);
    for (file, doc) in &docs {
        let file = file.display().to_string();
        for r in check_document(doc) {
            total += 1;
            match &r.result {
                Ok(p) if o.format == Format::Structured => o.record(&[
                    ("kind", "proof".into()),
                    ("file", file.clone()),
                    ("target", r.target.to_string()),
                    ("status", "ok".into()),
                    ("nodes", p.nodes.len().to_string()),
                ]),
                Ok(p) => {
                    if !lint_only {
                        let ok = o.paint("ok", "32");
                        let detail = if o.verbose { format!(" ({} nodes)", p.nodes.len()) } else { String::new() };
                        o.line(format!("{file}: {}: {ok}{detail}", r.target));
                    }
                }
                Err(e) if o.format == Format::Structured => {
                    failed += 1;
                    o.record(&[
                        ("kind", "proof".into()),
                        ("file", file.clone()),
                        ("target", r.target.to_string()),
                        ("status", "fail".into()),
                        ("node", e.node.to_string()),
                        ("path", e.path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")),
                        ("rule", e.tag.to_string()),
                        ("reason", e.reason.code().into()),
                        ("message", e.message.clone()),
                    ])
                }
                Err(e) => {
                    failed += 1;
                    let at = e.span.as_ref().map_or_else(|| file.to_string(), ToString::to_string);
                    o.error(format!("{at}: {}: {e}", r.target));
                    for f in &e.formulas {
                        let _ = writeln!(o.err, "  {f}");
                    }
                }
            }
            for w in &r.warnings {
                warned += 1;
                if o.format == Format::Structured {
                    o.record(&[
                        ("kind", "warning".into()),
                        ("file", file.clone()),
                        ("target", r.target.to_string()),
                        ("lint", w.kind.code().into()),
                        ("node", w.node.to_string()),
                        ("message", w.message.clone()),
                    ]);
                } else {
                    let w = w.to_string();
                    let w = o.paint(&w, "33");
                    o.line(format!("{file}: {}: {w}", r.target));
                }
            }
        }
    }
    if o.format == Format::Structured {
        o.record(&[
            ("kind", "summary".into()),
            ("proofs", total.to_string()),
            ("failed", failed.to_string()),
            ("warnings", warned.to_string()),
        ]);
    } else if lint_only {
        o.line(format!("{} in {}", plural(warned, "warning"), plural(total, "proof")));
    } else if total == 0 {
        o.line("0 proofs");
    } else if failed == 0 {
        o.line(format!("ok ({})", plural(total, "proof")));
    } else {
        o.line(format!("FAILED ({failed} of {})", plural(total, "proof")));
    }
    if failed > 0 {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

fn tuple_str(t: &[u32]) -> String {
    match t {
        [] => String::new(),
        [e] => e.to_string(),
        _ => format!("({})", t.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
    }
}

/// `P: 0↦t, 1↦u` for each defined predicate.
pub fn model_summary(doc: &Document, def: &Name, m: &ThreeValued) -> String {
    let d = &doc.definitions[def];
    let n = m.lower.size;
    d.defined()
        .iter()
        .map(|p| {
            let a = d.arity(p).unwrap_or(0);
            let vals: Vec<String> = (0..n.pow(a as u32))
                .map(|i| {
                    let t = crate::semantics::decode(i, a, n);
                    let v = m.value(p, &t).unwrap_or(Truth::U);
                    if a == 0 {
                        v.to_string()
                    } else {
                        format!("{}↦{v}", tuple_str(&t))
                    }
                })
                .collect();
            format!("{p}: {}", vals.join(", "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn lookup(o: &mut Out, doc: &Document, def: &str, ctx: &str) -> Option<(Name, Structure)> {
    let d = name(def);
    if !doc.definitions.contains_key(&d) {
        o.error(format!("unknown definition {def}"));
        return None;
    }
    match doc.structures.get(ctx) {
        Some(s) => Some((d, s.clone())),
        None => {
            o.error(format!("unknown structure {ctx}"));
            None
        }
    }
}

fn cmd_model(o: &mut Out, file: &Path, def: &str, ctx: &str, sem: SemArg, cap: u32) -> i32 {
    let doc = match load(file) {
        Ok(d) => d,
        Err(e) => {
            o.error(e);
            return EXIT_USAGE;
        }
    };
    let Some((def, ctx)) = lookup(o, &doc, def, ctx) else { return EXIT_USAGE };
    let d = doc.definitions[&def].clone();
    let mut code = EXIT_OK;
    for sem in sem.list() {
        match sem {
            Semantics::Wf => match well_founded_model(&d, &ctx) {
                Ok((m, trace)) => {
                    let total = if m.is_two_valued() { "total" } else { "non-total" };
                    let summary = model_summary(&doc, &def, &m);
                    if o.format == Format::Structured {
                        o.record(&[("kind", "wf".into()), ("model", summary), ("total", (total == "total").to_string())]);
                    } else {
                        o.line(format!("{summary}; {total}"));
                    }
                    if o.verbose {
                        for l in trace.to_string().lines() {
                            o.line(format!("  {l}"));
                        }
                    }
                }
                Err(e) => {
                    o.error(e.to_string());
                    code = EXIT_FAIL;
                }
            },
            Semantics::Stable => match stable_models(&d, &ctx, cap as usize) {
                Ok(ms) => {
                    if o.format == Format::Structured {
                        o.record(&[("kind", "stable".into()), ("count", ms.len().to_string())]);
                    } else {
                        o.line(plural(ms.len(), "stable model"));
                    }
                    for (i, m) in ms.into_iter().enumerate() {
                        let summary = model_summary(&doc, &def, &ThreeValued::exact(m));
                        if o.format == Format::Structured {
                            o.record(&[("kind", "stable-model".into()), ("index", (i + 1).to_string()), ("model", summary)]);
                        } else {
                            o.line(format!("model {}: {summary}", i + 1));
                        }
                    }
                }
                Err(e) => {
                    o.error(e.to_string());
                    code = EXIT_FAIL;
                }
            },
        }
    }
    code
}

fn cmd_validate(o: &mut Out, file: &Path, seq: &str, sem: SemArg, cfg: &Config) -> i32 {
    let doc = match load(file) {
        Ok(d) => d,
        Err(e) => {
            o.error(e);
            return EXIT_USAGE;
        }
    };
    let Some(s) = doc.sequents.get(seq) else {
        o.error(format!("unknown sequent {seq}"));
        return EXIT_USAGE;
    };
    let mut code = EXIT_OK;
    for sem in sem.list() {
        match validate(s, sem, cfg) {
            Ok(v) => {
                report_verdict(o, seq, &v);
                if v.is_counterexample() {
                    code = EXIT_FAIL;
                }
            }
            Err(e) => {
                o.error(e.to_string());
                return EXIT_FAIL;
            }
        }
    }
    code
}

fn report_verdict(o: &mut Out, seq: &str, v: &Verdict) {
    if o.format == Format::Structured {
        let (result, extra) = match &v.outcome {
            Outcome::NoCounterexample => ("no-counterexample", String::new()),
            Outcome::Counterexample(s) => ("counterexample", crate::parser::structure_to_string(s)),
            Outcome::Aborted { size, bits } => ("aborted", format!("size {size}, 2^{bits}")),
        };
        o.record(&[
            ("kind", "verdict".into()),
            ("sequent", seq.into()),
            ("semantics", v.semantics.to_string()),
            ("tested", v.tested.to_string()),
            ("result", result.into()),
            ("detail", extra),
        ]);
        return;
    }
    o.line(format!("{seq}: {v}"));
    if let Outcome::Counterexample(s) = &v.outcome {
        o.line(format!("  {}", crate::parser::structure_to_string(s)));
    }
}

/// Pure first-order document approximating `seq`: each definition on the
/// left is replaced by its material implications, plus the requested
/// induction instances.
pub fn export_fo(doc: &Document, seq: &Sequent, hyps: Option<&Document>) -> Result<Document, String> {
    let mut out = Document {
        signature: doc.signature.clone(),
        ..Document::default()
    };
    let mut left: Vec<Formula> = Vec::new();
    let mut k = 0;
    let mut push = |out: &mut Document, left: &mut Vec<Formula>, prefix: &str, f: Formula| {
        k += 1;
        out.formulas.insert(name(&format!("{prefix}{k}")), f.clone());
        left.push(f);
    };
    for f in &seq.left {
        match f {
            Formula::Def(d) => {
                for m in matimps(d) {
                    push(&mut out, &mut left, "M", m);
                }
            }
            f if f.is_pure_fo() => left.push(f.clone()),
            f => return Err(format!("{f} nests a definition")),
        }
    }
    if let Some(h) = hyps {
        for (n, ind) in &h.inductions {
            let f = indscheme_instance(&ind.def, &ind.pred, &ind.hyps).map_err(|e| format!("{n}: {e}"))?;
            push(&mut out, &mut left, "S", f);
        }
    }
    if let Some(f) = seq.right.iter().find(|f| !f.is_pure_fo()) {
        return Err(format!("{f} nests a definition"));
    }
    out.sequents.insert(name("Export"), Sequent::new(left, seq.right.iter().cloned()));
    Ok(out)
}

fn cmd_export(o: &mut Out, file: &Path, seq: &str, hyps: Option<&Path>) -> i32 {
    let doc = match load(file) {
        Ok(d) => d,
        Err(e) => {
            o.error(e);
            return EXIT_USAGE;
        }
    };
    let Some(s) = doc.sequents.get(seq) else {
        o.error(format!("unknown sequent {seq}"));
        return EXIT_USAGE;
    };
    let hdoc = match hyps {
        None => None,
        Some(p) => {
            let text = match std::fs::read_to_string(p) {
                Ok(t) => t,
                Err(e) => {
                    o.error(format!("{}: {e}", p.display()));
                    return EXIT_USAGE;
                }
            };
            match parse_extending(&doc, &text, &p.display().to_string()) {
                Ok(d) => Some(d),
                Err(e) => {
                    o.error(e.to_string());
                    return EXIT_USAGE;
                }
            }
        }
    };
    match export_fo(&doc, s, hdoc.as_ref()) {
        Ok(d) => {
            let _ = write!(o.out, "{}", document_to_string(&d));
            EXIT_OK
        }
        Err(e) => {
            o.error(e);
            EXIT_FAIL
        }
    }
}

fn color_wanted(out_is_tty: bool) -> bool {
    out_is_tty && std::env::var_os("FOID_NO_COLOR").is_none()
}

/// Run the tool on `args` (program name first); returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    run_parsed(cli, out, err, false)
}

/// Entry point of the binary: colors only when stdout is a terminal.
pub fn main_with_std() -> i32 {
    let tty = std::io::stdout().is_terminal();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_parsed(cli, &mut stdout.lock(), &mut stderr.lock(), tty)
}

fn run_parsed(cli: Cli, out: &mut dyn Write, err: &mut dyn Write, tty: bool) -> i32 {
    let mut o = Out {
        out,
        err,
        format: cli.format,
        color: color_wanted(tty) && cli.format == Format::Text,
        verbose: cli.verbose,
    };
    match &cli.cmd {
        Command::Check { files } => cmd_check(&mut o, files, false),
        Command::Lint { files } => cmd_check(&mut o, files, true),
        Command::Model {
            file,
            def,
            context,
            semantics,
            cap,
        } => cmd_model(&mut o, file, def, context, *semantics, *cap),
        Command::Stable { file, def, context, cap } => cmd_model(&mut o, file, def, context, SemArg::Stable, *cap),
        Command::Validate {
            file,
            sequent,
            semantics,
            bounds,
        } => cmd_validate(&mut o, file, sequent, *semantics, &bounds.config()),
        Command::ExportFo { file, sequent, hyps } => cmd_export(&mut o, file, sequent, hyps.as_deref()),
    }
}

/// Run and capture `(exit, stdout, stderr)`.
pub fn run_captured<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(args, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}
