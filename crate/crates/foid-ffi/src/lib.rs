//! C interface to the foid kernel and engines.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every call returns a [`FoidStatus`]; on failure
//! [`foid_last_error`] describes the problem until the next call on the same
//! thread. Strings returned through out-parameters are released with
//! [`foid_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use foid::cli::{check_document, model_summary};
use foid::parser::{parse_named, Document};
use foid::semantics::Semantics;
use foid::stable::stable_models;
use foid::syntax::name;
use foid::validator::{validate, Config, Outcome};
use foid::wf::well_founded_model;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoidStatus {
    Ok = 0,
    /// A proof was rejected or a counterexample was found.
    Failed = 1,
    ParseError = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    UnknownName = 5,
    /// A search space exceeded its configured bound.
    Limit = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoidSemantics {
    Wf = 0,
    Stable = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoidOutcome {
    NoCounterexample = 0,
    Counterexample = 1,
    /// Some domain size exceeded the atom cap; smaller sizes were searched.
    Aborted = 2,
}

/// Result of checking every proof of a document.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FoidCheckSummary {
    pub proofs: usize,
    pub failed: usize,
    pub warnings: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct FoidVerdict {
    pub outcome: FoidOutcome,
    /// Largest domain size searched exhaustively.
    pub tested: usize,
    /// Size of the counterexample or of the first aborted domain, else 0.
    pub size: usize,
}

/// A parsed theory file.
pub struct FoidDocument(Document);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(FoidStatus, String);

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<FoidStatus, Failure>) -> FoidStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Failure(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal error");
            FoidStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FoidStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FoidStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn doc_ref<'a>(d: *const FoidDocument) -> Result<&'a Document, Failure> {
    d.as_ref().map(|d| &d.0).ok_or_else(|| Failure(FoidStatus::NullArgument, "document is null".into()))
}

fn out_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(FoidStatus::Internal, "string contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn null_out<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(FoidStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call.
#[no_mangle]
pub extern "C" fn foid_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parse a theory. `file` names the source in error messages and may be null.
///
/// # Safety
/// `source` and `file` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn foid_document_parse(source: *const c_char, file: *const c_char, out: *mut *mut FoidDocument) -> FoidStatus {
    guard(|| {
        null_out(out)?;
        let src = text(source, "source")?;
        let file = if file.is_null() { "<input>" } else { text(file, "file")? };
        let doc = parse_named(src, file).map_err(|e| Failure(FoidStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(FoidDocument(doc)));
        Ok(FoidStatus::Ok)
    })
}

/// # Safety
/// `doc` must be null or a handle from [`foid_document_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foid_document_free(doc: *mut FoidDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Check every proof. Returns `Failed` when any proof is rejected; the
/// summary is filled in either way.
///
/// # Safety
/// `doc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn foid_document_check(doc: *const FoidDocument, out: *mut FoidCheckSummary) -> FoidStatus {
    guard(|| {
        null_out(out)?;
        let doc = doc_ref(doc)?;
        let results = check_document(doc);
        let mut s = FoidCheckSummary { proofs: results.len(), ..Default::default() };
        let mut first = None;
        for r in &results {
            s.warnings += r.warnings.len();
            if let Err(e) = &r.result {
                s.failed += 1;
                first.get_or_insert_with(|| format!("{}: {e}", r.target));
            }
        }
        *out = s;
        match first {
            Some(msg) => Err(Failure(FoidStatus::Failed, msg)),
            None => Ok(FoidStatus::Ok),
        }
    })
}

/// Search for a counterexample to the named sequent over all structures with
/// at most `max_n` elements. A counterexample gives status `Failed`.
///
/// # Safety
/// `doc` must be a live handle, `sequent` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn foid_validate(
    doc: *const FoidDocument,
    sequent: *const c_char,
    semantics: FoidSemantics,
    max_n: usize,
    cap: usize,
    out: *mut FoidVerdict,
) -> FoidStatus {
    guard(|| {
        null_out(out)?;
        let doc = doc_ref(doc)?;
        let key = text(sequent, "sequent")?;
        let seq = doc.sequents.get(key).ok_or_else(|| Failure(FoidStatus::UnknownName, format!("unknown sequent {key}")))?;
        let sem = match semantics {
            FoidSemantics::Wf => Semantics::Wf,
            FoidSemantics::Stable => Semantics::Stable,
        };
        let cfg = Config { max_n, cap, ..Config::default() };
        let v = validate(seq, sem, &cfg).map_err(|e| Failure(FoidStatus::Limit, e.to_string()))?;
        let (outcome, size) = match &v.outcome {
            Outcome::NoCounterexample => (FoidOutcome::NoCounterexample, 0),
            Outcome::Counterexample(s) => (FoidOutcome::Counterexample, s.size),
            Outcome::Aborted { size, .. } => (FoidOutcome::Aborted, *size),
        };
        *out = FoidVerdict { outcome, tested: v.tested, size };
        Ok(if outcome == FoidOutcome::Counterexample { FoidStatus::Failed } else { FoidStatus::Ok })
    })
}

/// Well-founded model of definition `def` over structure `context`, written
/// as text such as `Even: 0↦t, 1↦u`. `total` receives whether it is two-valued.
///
/// # Safety
/// `doc` must be a live handle, names NUL-terminated, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn foid_wf_model(
    doc: *const FoidDocument,
    def: *const c_char,
    context: *const c_char,
    out: *mut *mut c_char,
    total: *mut bool,
) -> FoidStatus {
    guard(|| {
        null_out(out)?;
        null_out(total)?;
        let doc = doc_ref(doc)?;
        let (dn, cn) = (text(def, "definition")?, text(context, "context")?);
        let d = doc.definitions.get(dn).ok_or_else(|| Failure(FoidStatus::UnknownName, format!("unknown definition {dn}")))?;
        let c = doc.structures.get(cn).ok_or_else(|| Failure(FoidStatus::UnknownName, format!("unknown structure {cn}")))?;
        let m = well_founded_model(d, c).map_err(|e| Failure(FoidStatus::Failed, e.to_string()))?.0;
        *total = m.is_two_valued();
        out_string(out, model_summary(doc, &name(dn), &m))?;
        Ok(FoidStatus::Ok)
    })
}

/// Number of stable models of `def` over `context`, enumerating at most
/// `cap` unknown atoms.
///
/// # Safety
/// `doc` must be a live handle, names NUL-terminated, `count` writable.
#[no_mangle]
pub unsafe extern "C" fn foid_stable_count(
    doc: *const FoidDocument,
    def: *const c_char,
    context: *const c_char,
    cap: usize,
    count: *mut usize,
) -> FoidStatus {
    guard(|| {
        null_out(count)?;
        let doc = doc_ref(doc)?;
        let (dn, cn) = (text(def, "definition")?, text(context, "context")?);
        let d = doc.definitions.get(dn).ok_or_else(|| Failure(FoidStatus::UnknownName, format!("unknown definition {dn}")))?;
        let c = doc.structures.get(cn).ok_or_else(|| Failure(FoidStatus::UnknownName, format!("unknown structure {cn}")))?;
        let ms = stable_models(d, c, cap).map_err(|e| Failure(FoidStatus::Limit, e.to_string()))?;
        *count = ms.len();
        Ok(FoidStatus::Ok)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn foid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
