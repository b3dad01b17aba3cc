//! Concrete `.foid` syntax: declarations, definitions, formulas, sequents,
//! structures, induction requests and proof scripts, with a printer whose
//! output parses back to the same values.
//!
//! ```text
//! pred Nat/1, Even/1.  fun succ/1.  const zero.
//! def Phi { Even(zero) <- true. forall n. Even(succ(n)) <- Nat(n) & ~Even(n). }
//! sequent S: Phi |- ~Even(succ(zero)).
//! structure O { dom = 2; zero = 0; succ: 0->1, 1->1; Nat = {0, 1}; }
//! induction I: Phi; Even; Even[z] := G(z).
//! proof of S: notR(~Even(succ(zero))) { ... }
//! ```
//! Precedence, tightest first: `~`, `&`, `|`, `=>` (right), `<=>`.
//! Quantifiers extend as far right as possible.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::kernel::{ScriptArgs, ScriptNode, Tag};
use crate::semantics::{Elem, FuncTable, Relation, Structure};
use crate::syntax::{name, Definition, Formula, Hyp, Hyps, Name, Rule, Sequent, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    SyntaxError,
    ArityMismatch,
    UnknownSymbol,
    IncompleteFunctionTable,
    OutOfDomainValue,
    Redefinition,
    InvalidDefinition,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub preds: IndexMap<Name, usize>,
    pub funcs: IndexMap<Name, usize>,
    pub consts: IndexSet<Name>,
}

/// A request for an induction-scheme instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induction {
    pub def: Arc<Definition>,
    pub pred: Name,
    pub hyps: Hyps,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofBlock {
    pub target: Name,
    pub root: ScriptNode,
    pub span: Option<SourceSpan>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub signature: Signature,
    pub definitions: IndexMap<Name, Arc<Definition>>,
    pub formulas: IndexMap<Name, Formula>,
    pub sequents: IndexMap<Name, Sequent>,
    pub structures: IndexMap<Name, Structure>,
    pub inductions: IndexMap<Name, Induction>,
    pub proofs: Vec<ProofBlock>,
}

impl Document {
    pub fn definition_name(&self, d: &Definition) -> Option<&Name> {
        self.definitions.iter().find(|(_, e)| ***e == *d).map(|(k, _)| k)
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const PUNCT: [&str; 24] = [
    "<=>", "=>", "<-", "|-", "->", ":=", "!=", "(", ")", "{", "}", "[", "]", ",", ";", ".", ":", "=", "~", "&", "|",
    "/", "@", "!",
];

fn lex(text: &str, file: &Arc<str>) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let span = |line, column, length| SourceSpan {
        file: file.clone(),
        line,
        column,
        length,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Ident(s), span(line, col, i - start)));
            col += i - start;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::SyntaxError,
                span: span(line, col, i - start),
                message: "integer too large".into(),
            })?;
            out.push((Tok::Int(v), span(line, col, i - start)));
            col += i - start;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(*p)) {
            Some(p) => {
                out.push((Tok::Punct(p), span(line, col, p.len())));
                i += p.len();
                col += p.len();
            }
            None => {
                return Err(ParseError {
                    kind: ParseErrorKind::SyntaxError,
                    span: span(line, col, 1),
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, span(line, col, 0)));
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    doc: Document,
    scope: Vec<Name>,
}

type PResult<T> = Result<T, ParseError>;

const KEYWORDS: [&str; 6] = ["forall", "exists", "true", "false", "def", "drop"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1.clone()
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            kind,
            span: self.span(),
            message: message.into(),
        })
    }

    fn expected<T>(&self, what: &str) -> PResult<T> {
        self.err(ParseErrorKind::SyntaxError, format!("expected {what}, found {}", self.peek()))
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.expected(&format!("`{p}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.expected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let n = name(s);
                self.bump();
                Ok(n)
            }
            _ => self.expected("identifier"),
        }
    }

    fn int(&mut self) -> PResult<u64> {
        match self.peek() {
            Tok::Int(v) => {
                let v = *v;
                self.bump();
                Ok(v)
            }
            _ => self.expected("integer"),
        }
    }

    fn in_scope(&self, x: &str) -> bool {
        self.scope.iter().any(|y| &**y == x)
    }

    // ------------------------------------------------------------ items

    fn document(&mut self) -> PResult<()> {
        while *self.peek() != Tok::Eof {
            let kw = match self.peek() {
                Tok::Ident(s) => s.clone(),
                _ => return self.expected("a declaration or item"),
            };
            match kw.as_str() {
                "pred" | "fun" => self.declaration(&kw)?,
                "const" => {
                    self.bump();
                    loop {
                        let sp = self.span();
                        let c = self.ident()?;
                        self.check_fresh_symbol(&c, &sp)?;
                        self.doc.signature.consts.insert(c);
                        if !self.eat(",") {
                            break;
                        }
                    }
                    self.expect(".")?;
                }
                "def" => {
                    self.bump();
                    let sp = self.span();
                    let n = self.ident()?;
                    self.check_fresh_item(&n, &sp)?;
                    let d = self.def_body()?;
                    self.doc.definitions.insert(n, d);
                }
                "formula" => {
                    self.bump();
                    let sp = self.span();
                    let n = self.ident()?;
                    self.check_fresh_item(&n, &sp)?;
                    self.expect(":")?;
                    let f = self.formula()?;
                    self.expect(".")?;
                    self.doc.formulas.insert(n, f);
                }
                "sequent" => {
                    self.bump();
                    let sp = self.span();
                    let n = self.ident()?;
                    self.check_fresh_item(&n, &sp)?;
                    self.expect(":")?;
                    let s = self.sequent()?;
                    self.expect(".")?;
                    self.doc.sequents.insert(n, s);
                }
                "structure" => {
                    self.bump();
                    let sp = self.span();
                    let n = self.ident()?;
                    self.check_fresh_item(&n, &sp)?;
                    let s = self.structure()?;
                    self.doc.structures.insert(n, s);
                }
                "induction" => {
                    self.bump();
                    let sp = self.span();
                    let n = self.ident()?;
                    self.check_fresh_item(&n, &sp)?;
                    self.expect(":")?;
                    let def = self.def_ref()?;
                    self.expect(";")?;
                    let pred = self.ident()?;
                    self.expect(";")?;
                    let hyps = self.hyps()?;
                    self.expect(".")?;
                    self.doc.inductions.insert(n, Induction { def, pred, hyps });
                }
                "proof" => {
                    let sp = self.span();
                    self.bump();
                    self.expect_kw("of")?;
                    let tsp = self.span();
                    let target = self.ident()?;
                    if !self.doc.sequents.contains_key(&target) {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownSymbol,
                            span: tsp,
                            message: format!("unknown sequent {target}"),
                        });
                    }
                    self.expect(":")?;
                    let root = self.node()?;
                    self.eat(".");
                    self.doc.proofs.push(ProofBlock {
                        target,
                        root,
                        span: Some(sp),
                    });
                }
                _ => return self.expected("a declaration or item"),
            }
        }
        Ok(())
    }

    fn symbol_kind(&self, n: &str) -> Option<&'static str> {
        let s = &self.doc.signature;
        if s.preds.contains_key(n) {
            Some("predicate")
        } else if s.funcs.contains_key(n) {
            Some("function")
        } else if s.consts.contains(n) {
            Some("constant")
        } else if self.doc.definitions.contains_key(n) {
            Some("definition")
        } else {
            None
        }
    }

    fn check_fresh_symbol(&self, n: &str, sp: &SourceSpan) -> PResult<()> {
        match self.symbol_kind(n) {
            Some(k) => Err(ParseError {
                kind: ParseErrorKind::Redefinition,
                span: sp.clone(),
                message: format!("{n} is already declared as a {k}"),
            }),
            None => Ok(()),
        }
    }

    fn check_fresh_item(&self, n: &str, sp: &SourceSpan) -> PResult<()> {
        let d = &self.doc;
        let taken = d.definitions.contains_key(n)
            || d.formulas.contains_key(n)
            || d.sequents.contains_key(n)
            || d.structures.contains_key(n)
            || d.inductions.contains_key(n)
            || d.signature.preds.contains_key(n)
            || d.signature.funcs.contains_key(n);
        if taken {
            return Err(ParseError {
                kind: ParseErrorKind::Redefinition,
                span: sp.clone(),
                message: format!("name {n} is already used"),
            });
        }
        Ok(())
    }

    fn declaration(&mut self, kw: &str) -> PResult<()> {
        self.bump();
        loop {
            let sp = self.span();
            let n = self.ident()?;
            self.check_fresh_symbol(&n, &sp)?;
            self.expect("/")?;
            let a = self.int()? as usize;
            if kw == "pred" {
                self.doc.signature.preds.insert(n, a);
            } else if a == 0 {
                self.doc.signature.consts.insert(n);
            } else {
                self.doc.signature.funcs.insert(n, a);
            }
            if !self.eat(",") {
                break;
            }
        }
        self.expect(".")
    }

    fn def_body(&mut self) -> PResult<Arc<Definition>> {
        let sp = self.span();
        self.expect("{")?;
        let mut rules = Vec::new();
        while !self.eat("}") {
            rules.push(self.rule()?);
        }
        Definition::new(rules).map(Arc::new).map_err(|e| ParseError {
            kind: ParseErrorKind::InvalidDefinition,
            span: sp,
            message: e.to_string(),
        })
    }

    fn def_ref(&mut self) -> PResult<Arc<Definition>> {
        if self.is_kw("def") {
            self.bump();
            return self.def_body();
        }
        let sp = self.span();
        let n = self.ident()?;
        self.doc.definitions.get(&n).cloned().ok_or(ParseError {
            kind: ParseErrorKind::UnknownSymbol,
            span: sp,
            message: format!("unknown definition {n}"),
        })
    }

    fn var_list(&mut self) -> PResult<Vec<Name>> {
        let mut vs = vec![self.ident()?];
        while self.eat(",") {
            vs.push(self.ident()?);
        }
        self.expect(".")?;
        Ok(vs)
    }

    fn rule(&mut self) -> PResult<Rule> {
        let bound = if self.is_kw("forall") {
            self.bump();
            self.var_list()?
        } else {
            Vec::new()
        };
        let depth = self.scope.len();
        self.scope.extend(bound.iter().cloned());
        let r = (|| {
            let sp = self.span();
            let head = self.ident()?;
            let Some(&arity) = self.doc.signature.preds.get(&head) else {
                return Err(ParseError {
                    kind: ParseErrorKind::UnknownSymbol,
                    span: sp,
                    message: format!("rule head {head} is not a declared predicate"),
                });
            };
            let args = self.args(arity, &head, &sp)?;
            self.expect("<-")?;
            let body = self.formula()?;
            self.expect(".")?;
            Ok(Rule { bound, head, args, body })
        })();
        self.scope.truncate(depth);
        r
    }

    fn args(&mut self, arity: usize, head: &str, sp: &SourceSpan) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        if self.eat("(") {
            if !self.is(")") {
                args.push(self.term()?);
                while self.eat(",") {
                    args.push(self.term()?);
                }
            }
            self.expect(")")?;
        }
        if args.len() != arity {
            return Err(ParseError {
                kind: ParseErrorKind::ArityMismatch,
                span: sp.clone(),
                message: format!("{head} expects {arity} arguments, got {}", args.len()),
            });
        }
        Ok(args)
    }

    // ------------------------------------------------------------ formulas

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.imp()?;
        while self.eat("<=>") {
            f = Formula::iff(f, self.imp()?);
        }
        Ok(f)
    }

    fn imp(&mut self) -> PResult<Formula> {
        let f = self.or()?;
        if self.eat("=>") {
            return Ok(Formula::implies(f, self.imp()?));
        }
        Ok(f)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut f = self.and()?;
        while self.eat("|") {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            let all = self.is_kw("forall");
            self.bump();
            let vs = self.var_list()?;
            let depth = self.scope.len();
            self.scope.extend(vs.iter().cloned());
            let body = self.formula();
            self.scope.truncate(depth);
            let body = body?;
            return Ok(if all {
                Formula::forall_all(&vs, body)
            } else {
                Formula::exists_all(&vs, body)
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Formula> {
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.is_kw("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if self.is_kw("false") {
            self.bump();
            return Ok(Formula::False);
        }
        if self.is_kw("def") {
            self.bump();
            return Ok(Formula::Def(self.def_body()?));
        }
        let Tok::Ident(id) = self.peek().clone() else {
            return self.expected("formula");
        };
        if !self.in_scope(&id) {
            if let Some(d) = self.doc.definitions.get(id.as_str()) {
                let d = d.clone();
                self.bump();
                return Ok(Formula::Def(d));
            }
            if let Some(f) = self.doc.formulas.get(id.as_str()) {
                let f = f.clone();
                self.bump();
                return Ok(f);
            }
            if let Some(&a) = self.doc.signature.preds.get(id.as_str()) {
                let sp = self.span();
                self.bump();
                let args = self.args(a, &id, &sp)?;
                return Ok(Formula::Atom(name(&id), args));
            }
            let declared = self.doc.signature.funcs.contains_key(id.as_str()) || self.doc.signature.consts.contains(id.as_str());
            if !declared && (*self.peek_at(1) == Tok::Punct("(") || !matches!(self.peek_at(1), Tok::Punct("=") | Tok::Punct("!="))) {
                return self.err(ParseErrorKind::UnknownSymbol, format!("unknown predicate {id}"));
            }
        }
        let lhs = self.term()?;
        if self.eat("=") {
            return Ok(Formula::Eq(lhs, self.term()?));
        }
        if self.eat("!=") {
            return Ok(Formula::not(Formula::Eq(lhs, self.term()?)));
        }
        self.expected("`=` or `!=`")
    }

    fn term(&mut self) -> PResult<Term> {
        let sp = self.span();
        let id = self.ident()?;
        if self.in_scope(&id) {
            if self.is("(") {
                return self.err(ParseErrorKind::ArityMismatch, format!("variable {id} applied to arguments"));
            }
            return Ok(Term::Obj(id));
        }
        if let Some(&a) = self.doc.signature.funcs.get(&id) {
            let args = self.args(a, &id, &sp)?;
            return Ok(Term::App(id, args));
        }
        if self.doc.signature.preds.contains_key(&id) || self.doc.definitions.contains_key(&id) {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownSymbol,
                span: sp,
                message: format!("{id} is not a term"),
            });
        }
        if self.is("(") {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownSymbol,
                span: sp,
                message: format!("unknown function {id}"),
            });
        }
        Ok(Term::Obj(id))
    }

    fn formula_list_until(&mut self, stop: &[&str]) -> PResult<Vec<Formula>> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Eof || stop.iter().any(|s| self.is(s)) {
            return Ok(out);
        }
        loop {
            if self.eat("[") {
                if !self.is("]") {
                    out.push(self.formula()?);
                    while self.eat(",") {
                        out.push(self.formula()?);
                    }
                }
                self.expect("]")?;
            } else {
                out.push(self.formula()?);
            }
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn sequent(&mut self) -> PResult<Sequent> {
        let left = self.formula_list_until(&["|-"])?;
        self.expect("|-")?;
        let right = self.formula_list_until(&[".", ")", ";", "{", "}"])?;
        Ok(Sequent::new(left, right))
    }

    // ------------------------------------------------------------ structures

    fn elem(&mut self, n: usize) -> PResult<Elem> {
        let sp = self.span();
        let v = self.int()?;
        if v as usize >= n {
            return Err(ParseError {
                kind: ParseErrorKind::OutOfDomainValue,
                span: sp,
                message: format!("{v} is outside the domain of size {n}"),
            });
        }
        Ok(v as Elem)
    }

    fn tuple(&mut self, n: usize) -> PResult<Vec<Elem>> {
        if self.eat("(") {
            let mut t = Vec::new();
            if !self.is(")") {
                t.push(self.elem(n)?);
                while self.eat(",") {
                    t.push(self.elem(n)?);
                }
            }
            self.expect(")")?;
            Ok(t)
        } else {
            Ok(vec![self.elem(n)?])
        }
    }

    fn structure(&mut self) -> PResult<Structure> {
        self.expect("{")?;
        self.expect_kw("dom")?;
        self.expect("=")?;
        let sp = self.span();
        let n = self.int()? as usize;
        if n == 0 {
            return Err(ParseError {
                kind: ParseErrorKind::OutOfDomainValue,
                span: sp,
                message: "domain must be nonempty".into(),
            });
        }
        let mut s = Structure::new(n);
        while self.eat(";") {
            if self.is("}") {
                break;
            }
            let sp = self.span();
            let id = self.ident()?;
            let declared = self.annotated_arity()?;
            let arity_of = |this: &Parser| declared.or_else(|| this.doc.signature.preds.get(&id).copied());
            if self.eat(":") {
                let mut entries: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
                let mut arity = declared.or_else(|| self.doc.signature.funcs.get(&id).copied());
                loop {
                    let esp = self.span();
                    let t = self.tuple(n)?;
                    self.expect("->")?;
                    let v = self.elem(n)?;
                    if *arity.get_or_insert(t.len()) != t.len() {
                        return Err(ParseError {
                            kind: ParseErrorKind::ArityMismatch,
                            span: esp,
                            message: format!("{id} entry has the wrong number of arguments"),
                        });
                    }
                    if entries.insert(t, v).is_some_and(|old| old != v) {
                        return Err(ParseError {
                            kind: ParseErrorKind::SyntaxError,
                            span: esp,
                            message: format!("conflicting entries for {id}"),
                        });
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                let arity = arity.unwrap_or(0);
                let total = n.pow(arity as u32);
                if entries.len() != total {
                    return Err(ParseError {
                        kind: ParseErrorKind::IncompleteFunctionTable,
                        span: sp,
                        message: format!("{id} has {} of {total} entries", entries.len()),
                    });
                }
                if arity == 0 {
                    s.objects.insert(id, entries.into_values().next().unwrap());
                } else {
                    s.functions.insert(id, FuncTable { arity, values: entries.into_values().collect() });
                }
                continue;
            }
            self.expect("=")?;
            if self.is_kw("true") || self.is_kw("false") {
                let v = self.is_kw("true");
                self.bump();
                let mut r = Relation::empty(0, n);
                r.set(0, v);
                s.relations.insert(id, r);
            } else if self.eat("{") {
                let mut tuples = Vec::new();
                if !self.is("}") {
                    tuples.push((self.span(), self.tuple(n)?));
                    while self.eat(",") {
                        tuples.push((self.span(), self.tuple(n)?));
                    }
                }
                self.expect("}")?;
                let arity = arity_of(self).or(tuples.first().map(|(_, t)| t.len())).unwrap_or(0);
                if let Some((tsp, _)) = tuples.iter().find(|(_, t)| t.len() != arity) {
                    return Err(ParseError {
                        kind: ParseErrorKind::ArityMismatch,
                        span: tsp.clone(),
                        message: format!("{id} has arity {arity}"),
                    });
                }
                s.relations.insert(id, Relation::from_tuples(arity, n, tuples.into_iter().map(|(_, t)| t)));
            } else {
                let v = self.elem(n)?;
                s.objects.insert(id, v);
            }
        }
        self.expect("}")?;
        Ok(s)
    }

    fn annotated_arity(&mut self) -> PResult<Option<usize>> {
        if self.eat("/") {
            return Ok(Some(self.int()? as usize));
        }
        Ok(None)
    }

    // ------------------------------------------------------------ proofs

    fn hyps(&mut self) -> PResult<Hyps> {
        let mut hyps = Hyps::new();
        loop {
            let sp = self.span();
            let q = self.ident()?;
            self.expect("[")?;
            let mut vars = Vec::new();
            if !self.is("]") {
                vars.push(self.ident()?);
                while self.eat(",") {
                    vars.push(self.ident()?);
                }
            }
            self.expect("]")?;
            self.expect(":=")?;
            let formula = self.formula()?;
            if hyps.insert(q.clone(), Hyp { vars, formula }).is_some() {
                return Err(ParseError {
                    kind: ParseErrorKind::Redefinition,
                    span: sp,
                    message: format!("two hypotheses for {q}"),
                });
            }
            if !self.eat(",") {
                return Ok(hyps);
            }
        }
    }

    fn node(&mut self) -> PResult<ScriptNode> {
        let sp = self.span();
        let tag_name = self.ident()?;
        let Some(tag) = Tag::from_name(&tag_name) else {
            return Err(ParseError {
                kind: ParseErrorKind::UnknownSymbol,
                span: sp,
                message: format!("unknown rule {tag_name}"),
            });
        };
        let args = if self.eat("(") {
            let a = self.script_args(tag)?;
            self.expect(")")?;
            a
        } else {
            ScriptArgs::None
        };
        let sequent = if self.eat("@") { Some(self.sequent()?) } else { None };
        let mut children = Vec::new();
        if self.eat("{") {
            while !self.eat("}") {
                children.push(self.node()?);
                if !self.eat(";") {
                    self.expect("}")?;
                    break;
                }
            }
        }
        Ok(ScriptNode {
            tag,
            args,
            sequent,
            children,
            span: Some(sp),
        })
    }

    fn script_args(&mut self, tag: Tag) -> PResult<ScriptArgs> {
        use Tag::*;
        Ok(match tag {
            Ax | EqR => ScriptArgs::None,
            Wk => {
                let drop = self.is_kw("drop");
                if drop {
                    self.bump();
                }
                let s = self.sequent()?;
                if drop {
                    ScriptArgs::Drop(s)
                } else {
                    ScriptArgs::Premise(s)
                }
            }
            Subst => {
                let t = self.term()?;
                self.expect(";")?;
                let x = self.ident()?;
                self.expect(";")?;
                ScriptArgs::Subst(t, x, self.sequent()?)
            }
            AllL | ExR => {
                let f = self.formula()?;
                self.expect(";")?;
                ScriptArgs::FormulaTerm(f, self.term()?)
            }
            EqL => {
                let t = self.term()?;
                self.expect("=")?;
                let s = self.term()?;
                self.expect(";")?;
                let x = self.ident()?;
                self.expect(",")?;
                let y = self.ident()?;
                self.expect(";")?;
                ScriptArgs::EqL {
                    t,
                    s,
                    x,
                    y,
                    templates: self.sequent()?,
                }
            }
            DefR => {
                let def = self.def_ref()?;
                self.expect(";")?;
                let rule = self.int()? as usize;
                let mut witnesses = Vec::new();
                if self.eat(";") {
                    witnesses.push(self.term()?);
                    while self.eat(",") {
                        witnesses.push(self.term()?);
                    }
                }
                ScriptArgs::DefR { def, rule, witnesses }
            }
            DefL | DefL2 => {
                let def = self.def_ref()?;
                self.expect(";")?;
                let sp = self.span();
                let (pred, args) = match self.formula()? {
                    Formula::Atom(p, a) => (p, a),
                    _ => {
                        return Err(ParseError {
                            kind: ParseErrorKind::SyntaxError,
                            span: sp,
                            message: "expected the defined atom".into(),
                        })
                    }
                };
                self.expect(";")?;
                ScriptArgs::DefL {
                    def,
                    pred,
                    args,
                    hyps: self.hyps()?,
                }
            }
            _ => ScriptArgs::Formula(self.formula()?),
        })
    }
}

fn parser_for(text: &str, file: &str, base: Option<&Document>) -> PResult<Parser> {
    let file: Arc<str> = Arc::from(file);
    Ok(Parser {
        toks: lex(text, &file)?,
        pos: 0,
        doc: base.cloned().unwrap_or_default(),
        scope: Vec::new(),
    })
}

/// Parse a document.
pub fn parse(text: &str) -> Result<Document, ParseError> {
    parse_named(text, "<input>")
}

pub fn parse_named(text: &str, file: &str) -> Result<Document, ParseError> {
    parse_extending(&Document::default(), text, file)
}

/// Parse `text` with the declarations and items of `base` in scope; the
/// result contains both.
pub fn parse_extending(base: &Document, text: &str, file: &str) -> Result<Document, ParseError> {
    let mut p = parser_for(text, file, Some(base))?;
    p.document()?;
    Ok(p.doc)
}

/// Parse one formula against the declarations of `ctx`.
pub fn parse_formula(ctx: &Document, text: &str) -> Result<Formula, ParseError> {
    let mut p = parser_for(text, "<formula>", Some(ctx))?;
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.expected("end of formula");
    }
    Ok(f)
}

/// Parse one sequent `Γ |- Δ` against the declarations of `ctx`.
pub fn parse_sequent(ctx: &Document, text: &str) -> Result<Sequent, ParseError> {
    let mut p = parser_for(text, "<sequent>", Some(ctx))?;
    let s = p.sequent()?;
    if *p.peek() != Tok::Eof {
        return p.expected("end of sequent");
    }
    Ok(s)
}

/// Parse a single `structure Name { ... }` block, or its braces alone.
pub fn parse_structure(text: &str) -> Result<Structure, ParseError> {
    let mut p = parser_for(text, "<structure>", None)?;
    if p.is_kw("structure") {
        p.bump();
        p.ident()?;
    }
    let s = p.structure()?;
    if *p.peek() != Tok::Eof {
        return p.expected("end of structure");
    }
    Ok(s)
}

// ---------------------------------------------------------------- printer

/// Printing context: definitions equal to a named one print as that name.
#[derive(Clone, Copy, Default)]
pub struct Names<'a> {
    doc: Option<&'a Document>,
}

impl<'a> Names<'a> {
    pub fn of(doc: &'a Document) -> Names<'a> {
        Names { doc: Some(doc) }
    }

    fn def_name(&self, d: &Definition) -> Option<&'a Name> {
        self.doc.and_then(|doc| doc.definition_name(d))
    }
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

pub fn term_to_string(t: &Term) -> String {
    match t {
        Term::Obj(x) => x.to_string(),
        Term::App(f, args) => format!("{f}({})", join(args, ", ", term_to_string)),
    }
}

fn quant_prefix(f: &Formula) -> (&'static str, Vec<&Name>, &Formula) {
    let (kw, mut cur) = match f {
        Formula::Forall(..) => ("forall", f),
        _ => ("exists", f),
    };
    let mut vars = Vec::new();
    loop {
        match (kw, cur) {
            ("forall", Formula::Forall(x, b)) | ("exists", Formula::Exists(x, b)) => {
                vars.push(x);
                cur = b;
            }
            _ => return (kw, vars, cur),
        }
    }
}

pub fn formula_to_string(f: &Formula, names: Names<'_>) -> String {
    fmt_formula(f, 0, names)
}

fn fmt_formula(f: &Formula, ctx: u8, names: Names<'_>) -> String {
    let wrap = |s: String, prec: u8| if ctx > prec { format!("({s})") } else { s };
    match f {
        Formula::Atom(p, args) if args.is_empty() => p.to_string(),
        Formula::Atom(p, args) => format!("{p}({})", join(args, ", ", term_to_string)),
        Formula::Eq(a, b) => format!("{} = {}", term_to_string(a), term_to_string(b)),
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Not(g) => match &**g {
            Formula::Eq(..) => format!("~({})", fmt_formula(g, 0, names)),
            _ => format!("~{}", fmt_formula(g, 5, names)),
        },
        Formula::And(a, b) => wrap(format!("{} & {}", fmt_formula(a, 4, names), fmt_formula(b, 5, names)), 4),
        Formula::Or(a, b) => wrap(format!("{} | {}", fmt_formula(a, 3, names), fmt_formula(b, 4, names)), 3),
        Formula::Implies(a, b) => wrap(format!("{} => {}", fmt_formula(a, 3, names), fmt_formula(b, 2, names)), 2),
        Formula::Iff(a, b) => wrap(format!("{} <=> {}", fmt_formula(a, 1, names), fmt_formula(b, 2, names)), 1),
        Formula::Forall(..) | Formula::Exists(..) => {
            let (kw, vars, body) = quant_prefix(f);
            let vs = join(&vars, ", ", |v| v.to_string());
            wrap(format!("{kw} {vs}. {}", fmt_formula(body, 0, names)), 0)
        }
        Formula::Def(d) => match names.def_name(d) {
            Some(n) => n.to_string(),
            None => format!("def {}", definition_to_string(d, names)),
        },
    }
}

pub fn rule_to_string(r: &Rule, names: Names<'_>) -> String {
    let head = formula_to_string(&r.head_atom(), names);
    let body = formula_to_string(&r.body, names);
    if r.bound.is_empty() {
        format!("{head} <- {body}.")
    } else {
        format!("forall {}. {head} <- {body}.", join(&r.bound, ", ", |v| v.to_string()))
    }
}

pub fn definition_to_string(d: &Definition, names: Names<'_>) -> String {
    if d.rules().is_empty() {
        return "{ }".into();
    }
    format!("{{ {} }}", join(d.rules(), " ", |r| rule_to_string(r, names)))
}

pub fn sequent_to_string(s: &Sequent, names: Names<'_>) -> String {
    let side = |fs: &indexmap::IndexSet<Formula>| fs.iter().map(|f| formula_to_string(f, names)).collect::<Vec<_>>().join(", ");
    let (l, r) = (side(&s.left), side(&s.right));
    match (l.is_empty(), r.is_empty()) {
        (true, true) => "|-".into(),
        (true, false) => format!("|- {r}"),
        (false, true) => format!("{l} |-"),
        (false, false) => format!("{l} |- {r}"),
    }
}

fn hyps_to_string(h: &Hyps, names: Names<'_>) -> String {
    h.iter()
        .map(|(q, h)| format!("{q}[{}] := {}", join(&h.vars, ", ", |v| v.to_string()), formula_to_string(&h.formula, names)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn def_ref_to_string(d: &Definition, names: Names<'_>) -> String {
    match names.def_name(d) {
        Some(n) => n.to_string(),
        None => format!("def {}", definition_to_string(d, names)),
    }
}

pub fn script_args_to_string(a: &ScriptArgs, names: Names<'_>) -> Option<String> {
    let f = |x: &Formula| formula_to_string(x, names);
    Some(match a {
        ScriptArgs::None => return None,
        ScriptArgs::Formula(x) => f(x),
        ScriptArgs::FormulaTerm(x, t) => format!("{}; {}", f(x), term_to_string(t)),
        ScriptArgs::Premise(s) => sequent_to_string(s, names),
        ScriptArgs::Drop(s) => format!("drop {}", sequent_to_string(s, names)),
        ScriptArgs::Subst(t, x, s) => format!("{}; {x}; {}", term_to_string(t), sequent_to_string(s, names)),
        ScriptArgs::EqL { t, s, x, y, templates } => format!(
            "{} = {}; {x}, {y}; {}",
            term_to_string(t),
            term_to_string(s),
            sequent_to_string(templates, names)
        ),
        ScriptArgs::DefR { def, rule, witnesses } => {
            let mut s = format!("{}; {rule}", def_ref_to_string(def, names));
            if !witnesses.is_empty() {
                write!(s, "; {}", join(witnesses, ", ", term_to_string)).unwrap();
            }
            s
        }
        ScriptArgs::DefL { def, pred, args, hyps } => format!(
            "{}; {}; {}",
            def_ref_to_string(def, names),
            f(&Formula::Atom(pred.clone(), args.clone())),
            hyps_to_string(hyps, names)
        ),
    })
}

pub fn script_to_string(n: &ScriptNode, names: Names<'_>, indent: usize) -> String {
    let mut s = n.tag.name().to_string();
    if let Some(a) = script_args_to_string(&n.args, names) {
        write!(s, "({a})").unwrap();
    }
    if let Some(q) = &n.sequent {
        write!(s, " @ {}", sequent_to_string(q, names)).unwrap();
    }
    if !n.children.is_empty() {
        let pad = "  ".repeat(indent + 1);
        s.push_str(" {\n");
        for c in &n.children {
            writeln!(s, "{pad}{};", script_to_string(c, names, indent + 1)).unwrap();
        }
        write!(s, "{}}}", "  ".repeat(indent)).unwrap();
    }
    s
}

pub fn structure_to_string(st: &Structure) -> String {
    let mut items = vec![format!("dom = {}", st.size)];
    for (o, v) in &st.objects {
        items.push(format!("{o} = {v}"));
    }
    let tuple = |t: &[Elem]| {
        if t.len() == 1 {
            t[0].to_string()
        } else {
            format!("({})", join(t, ", ", |e| e.to_string()))
        }
    };
    for (f, t) in &st.functions {
        let entries: Vec<String> = (0..t.values.len())
            .map(|i| format!("{}->{}", tuple(&crate::semantics::decode(i, t.arity, st.size)), t.values[i]))
            .collect();
        items.push(format!("{f}: {}", entries.join(", ")));
    }
    for (p, r) in &st.relations {
        if r.arity() == 0 {
            items.push(format!("{p} = {}", r.get(0)));
        } else {
            let ts: Vec<String> = r.tuples(st.size).map(|t| tuple(&t)).collect();
            items.push(format!("{p}/{} = {{{}}}", r.arity(), ts.join(", ")));
        }
    }
    format!("{{ {}; }}", items.join("; "))
}

pub fn document_to_string(d: &Document) -> String {
    let names = Names::of(d);
    let mut out = String::new();
    let sig = &d.signature;
    if !sig.preds.is_empty() {
        writeln!(out, "pred {}.", join(&sig.preds.iter().collect::<Vec<_>>(), ", ", |(p, a)| format!("{p}/{a}"))).unwrap();
    }
    if !sig.funcs.is_empty() {
        writeln!(out, "fun {}.", join(&sig.funcs.iter().collect::<Vec<_>>(), ", ", |(p, a)| format!("{p}/{a}"))).unwrap();
    }
    if !sig.consts.is_empty() {
        writeln!(out, "const {}.", join(&sig.consts.iter().collect::<Vec<_>>(), ", ", |c| c.to_string())).unwrap();
    }
    // a definition prints by name only once it has been introduced
    let mut partial = Document {
        signature: d.signature.clone(),
        ..Document::default()
    };
    for (n, def) in &d.definitions {
        writeln!(out, "def {n} {}", definition_to_string(def, Names::of(&partial))).unwrap();
        partial.definitions.insert(n.clone(), def.clone());
    }
    for (n, f) in &d.formulas {
        writeln!(out, "formula {n}: {}.", formula_to_string(f, names)).unwrap();
    }
    for (n, s) in &d.sequents {
        writeln!(out, "sequent {n}: {}.", sequent_to_string(s, names)).unwrap();
    }
    for (n, s) in &d.structures {
        writeln!(out, "structure {n} {}", structure_to_string(s)).unwrap();
    }
    for (n, i) in &d.inductions {
        writeln!(out, "induction {n}: {}; {}; {}.", def_ref_to_string(&i.def, names), i.pred, hyps_to_string(&i.hyps, names)).unwrap();
    }
    for p in &d.proofs {
        writeln!(out, "proof of {}: {}", p.target, script_to_string(&p.root, names, 0)).unwrap();
    }
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&term_to_string(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&formula_to_string(self, Names::default()))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&sequent_to_string(self, Names::default()))
    }
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&definition_to_string(self, Names::default()))
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&document_to_string(self))
    }
}

/// Strip spans so that reparsed scripts compare equal.
pub fn without_spans(mut d: Document) -> Document {
    fn strip(n: &mut ScriptNode) {
        n.span = None;
        n.children.iter_mut().for_each(strip);
    }
    for p in &mut d.proofs {
        p.span = None;
        strip(&mut p.root);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    const EVEN: &str = "pred Nat/1, Even/1. fun succ/1. const zero.
        def Phi { Even(zero) <- true. forall n. Even(succ(n)) <- Nat(n) & ~Even(n). }";

    #[test]
    fn parses_even_definition() {
        let d = parse(EVEN).unwrap();
        let phi = &d.definitions["Phi"];
        assert_eq!(phi.rules().len(), 2);
        assert_eq!(phi.rules()[0].body, Formula::True);
        assert_eq!(phi.rules()[1].bound, vec![name("n")]);
    }

    #[test]
    fn sequent_with_definition_on_right() {
        let d = parse("pred P/0. def Phi { P <- ~P. } sequent S: [Phi] |- ~Phi.").unwrap();
        let s = &d.sequents["S"];
        assert!(matches!(s.left[0], Formula::Def(_)));
        assert!(matches!(&s.right[0], Formula::Not(g) if matches!(**g, Formula::Def(_))));
    }

    #[test]
    fn syntax_errors_have_spans() {
        let e = parse("pred P/1. formula F: P(x.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::SyntaxError);
        assert_eq!((e.span.line, e.span.column), (1, 25));
        let e = parse("pred P/1. formula F: Q(x).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownSymbol);
        let e = parse("pred P/1. formula F: P(x, y).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::ArityMismatch);
    }

    #[test]
    fn printer_precedence() {
        let d = parse("pred P/0, Q/0.").unwrap();
        let f = parse_formula(&d, "~(P & Q)").unwrap();
        assert_eq!(f.to_string(), "~(P & Q)");
        assert_eq!(Formula::True.to_string(), "true");
        for s in ["P | Q & P", "(P | Q) & P", "P => Q => P", "(P => Q) => P", "~(forall x. x = x) & P", "P <=> Q <=> P"] {
            let f = parse_formula(&d, s).unwrap();
            assert_eq!(parse_formula(&d, &f.to_string()).unwrap(), f, "{s}");
        }
    }

    #[test]
    fn structures() {
        let s = parse_structure("structure O' { dom=2; zero=0; succ: 0->1, 1->1; }").unwrap();
        assert_eq!(s.functions["succ"].values, vec![1, 1]);
        assert_eq!(s.objects["zero"], 0);
        let e = parse_structure("structure B { dom=2; succ: 0->5; }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::OutOfDomainValue);
        let e = parse_structure("structure B { dom=2; succ: 0->1; }").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::IncompleteFunctionTable);
        let s = parse_structure("{ dom = 2; E/2 = {}; }").unwrap();
        assert!(s.relations["E"].is_empty());
        let back = parse_structure(&structure_to_string(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn document_roundtrip() {
        let text = format!("{EVEN} sequent S: Phi, forall x. ~(zero = succ(x)) |- ~Even(succ(zero)).
            structure O {{ dom = 2; zero = 0; succ: 0->1, 1->1; Nat = {{0, 1}}; }}
            proof of S: notR(~Even(succ(zero))) {{ defL(Phi; Even(succ(zero)); Even[z] := ~(exists v. z = succ(v) & Even(v))) {{ ax; ax; ax }} }}");
        let d = parse(&text).unwrap();
        let again = parse(&document_to_string(&d)).unwrap();
        assert_eq!(without_spans(again), without_spans(d));
    }
}
