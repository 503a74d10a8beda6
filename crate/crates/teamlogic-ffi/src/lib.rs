//! C ABI for the team-logic toolkit.
//!
//! Handles are opaque pointers created and freed by this library; every
//! function that can fail returns a [`TlStatus`] and stores a message
//! retrievable through [`tl_last_error`]. Strings returned by the
//! library must be released with [`tl_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::ptr;

use libc::c_char;

use teamlogic::decision::{entails_bounded, entails_nf, VerdictStatus};
use teamlogic::normal_form::{NfError, DEFAULT_TYPE_CAP};
use teamlogic::proof::{check_derivation, derivation_from_json, System};
use teamlogic::semantics::eval_team;
use teamlogic::syntax::{parse_any, print_formula, Formula, PropSet};
use teamlogic::{KripkeModel, Team};

/// Status codes returned by the fallible functions.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum TlStatus {
    TlOk = 0,
    /// Malformed formula, model, or proof input.
    TlBadInput = 1,
    /// Evaluation or decision failed (signature, model size, ...).
    TlEvalError = 2,
    /// An enumeration cap was exceeded; retry with the bounded search.
    TlCapExceeded = 3,
    /// The proof was parsed but rejected by the checker.
    TlProofRejected = 4,
    /// A required pointer argument was null.
    TlNullPointer = 5,
}

/// Verdicts returned by the entailment functions.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum TlVerdict {
    TlEntails = 0,
    TlCounterModel = 1,
    TlBoundExhausted = 2,
}

/// Opaque formula handle.
pub struct TlFormula(Formula);

/// Opaque model handle.
pub struct TlModel(KripkeModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).ok();
    });
}

fn to_c_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => ptr::null_mut(),
    }
}

// Reads a required UTF-8 argument; on failure records the error.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, TlStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is null"));
        return Err(TlStatus::TlNullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        TlStatus::TlBadInput
    })
}

/// Returns a copy of the last error message on this thread, or null.
/// The caller frees it with `tl_string_free`.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => to_c_string(msg.to_string_lossy().into_owned()),
        None => ptr::null_mut(),
    })
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not
/// yet freed; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a formula of any of the supported logics.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid
/// location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_parse(
    text: *const c_char,
    out: *mut *mut TlFormula,
) -> TlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TlStatus::TlNullPointer;
    }
    let text = match read_str(text, "formula text") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match parse_any(text).and_then(|f| f.infer_logic().map(|_| f)) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(TlFormula(f)));
            TlStatus::TlOk
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlBadInput
        }
    }
}

/// Prints a formula in the canonical surface syntax.
///
/// # Safety
/// `f` must be a live handle from `tl_formula_parse`.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_print(f: *const TlFormula) -> *mut c_char {
    if f.is_null() {
        set_error("formula handle is null");
        return ptr::null_mut();
    }
    to_c_string(print_formula(&(*f).0))
}

/// # Safety
/// `f` must be a live handle from `tl_formula_parse`.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_modal_depth(f: *const TlFormula) -> u32 {
    if f.is_null() {
        return 0;
    }
    (*f).0.modal_depth()
}

/// # Safety
/// `f` must be a live handle from `tl_formula_parse`.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_is_classical(f: *const TlFormula) -> bool {
    if f.is_null() {
        return false;
    }
    (*f).0.is_classical()
}

/// # Safety
/// `f` must be a handle from `tl_formula_parse`, not yet freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_formula_free(f: *mut TlFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parses a model from its JSON representation.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid
/// location to store the handle.
#[no_mangle]
pub unsafe extern "C" fn tl_model_parse(json: *const c_char, out: *mut *mut TlModel) -> TlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TlStatus::TlNullPointer;
    }
    let json = match read_str(json, "model JSON") {
        Ok(t) => t,
        Err(status) => return status,
    };
    match KripkeModel::from_json(json) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(TlModel(m)));
            TlStatus::TlOk
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlBadInput
        }
    }
}

/// Serializes a model back to JSON.
///
/// # Safety
/// `m` must be a live handle from `tl_model_parse`.
#[no_mangle]
pub unsafe extern "C" fn tl_model_to_json(m: *const TlModel) -> *mut c_char {
    if m.is_null() {
        set_error("model handle is null");
        return ptr::null_mut();
    }
    to_c_string((*m).0.to_json())
}

/// # Safety
/// `m` must be a handle from `tl_model_parse`, not yet freed; null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn tl_model_free(m: *mut TlModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Evaluates a formula on a team, given as a comma-separated world list
/// (empty string for the empty team).
///
/// # Safety
/// `model` and `formula` must be live handles, `team` a valid string,
/// and `out` a valid location for the result.
#[no_mangle]
pub unsafe extern "C" fn tl_eval_team(
    model: *const TlModel,
    team: *const c_char,
    formula: *const TlFormula,
    out: *mut bool,
) -> TlStatus {
    if model.is_null() || formula.is_null() || out.is_null() {
        set_error("model, formula, or out pointer is null");
        return TlStatus::TlNullPointer;
    }
    let team = match read_str(team, "team") {
        Ok(t) => Team::parse(t),
        Err(status) => return status,
    };
    match eval_team(&(*model).0, &team, &(*formula).0) {
        Ok(v) => {
            *out = v;
            TlStatus::TlOk
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlEvalError
        }
    }
}

unsafe fn parse_formula_list(
    texts: *const *const c_char,
    count: usize,
) -> Result<Vec<Formula>, TlStatus> {
    let mut out = Vec::with_capacity(count);
    if count > 0 && texts.is_null() {
        set_error("premise array is null");
        return Err(TlStatus::TlNullPointer);
    }
    for i in 0..count {
        let text = read_str(*texts.add(i), "premise")?;
        let f = parse_any(text).map_err(|e| {
            set_error(e.to_string());
            TlStatus::TlBadInput
        })?;
        out.push(f);
    }
    Ok(out)
}

unsafe fn parse_conclusion(text: *const c_char) -> Result<Formula, TlStatus> {
    let text = read_str(text, "conclusion")?;
    parse_any(text).map_err(|e| {
        set_error(e.to_string());
        TlStatus::TlBadInput
    })
}

/// Decides entailment with the normal-form method over the signature of
/// the given formulas.
///
/// # Safety
/// `premises` must point to `premise_count` valid strings, `conclusion`
/// must be a valid string, and `out` a valid location for the verdict.
#[no_mangle]
pub unsafe extern "C" fn tl_entails_nf(
    premises: *const *const c_char,
    premise_count: usize,
    conclusion: *const c_char,
    out: *mut TlVerdict,
) -> TlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TlStatus::TlNullPointer;
    }
    let premises = match parse_formula_list(premises, premise_count) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let conclusion = match parse_conclusion(conclusion) {
        Ok(f) => f,
        Err(status) => return status,
    };
    let props = premises
        .iter()
        .chain([&conclusion])
        .fold(PropSet::default(), |acc, f| acc.union(&f.props()));
    match entails_nf(&premises, &conclusion, &props, DEFAULT_TYPE_CAP) {
        Ok(v) => {
            *out = match v.status {
                VerdictStatus::Entails => TlVerdict::TlEntails,
                VerdictStatus::CounterModel { .. } => TlVerdict::TlCounterModel,
                VerdictStatus::BoundExhausted => TlVerdict::TlBoundExhausted,
            };
            TlStatus::TlOk
        }
        Err(e @ NfError::TypeExplosion(_)) => {
            set_error(e.to_string());
            TlStatus::TlCapExceeded
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlEvalError
        }
    }
}

/// Refutation search over all models with up to `max_worlds` worlds.
///
/// # Safety
/// Same contract as `tl_entails_nf`.
#[no_mangle]
pub unsafe extern "C" fn tl_entails_bounded(
    premises: *const *const c_char,
    premise_count: usize,
    conclusion: *const c_char,
    max_worlds: usize,
    out: *mut TlVerdict,
) -> TlStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return TlStatus::TlNullPointer;
    }
    if max_worlds == 0 || max_worlds > 5 {
        set_error("max_worlds must be between 1 and 5");
        return TlStatus::TlBadInput;
    }
    let premises = match parse_formula_list(premises, premise_count) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let conclusion = match parse_conclusion(conclusion) {
        Ok(f) => f,
        Err(status) => return status,
    };
    match entails_bounded(&premises, &conclusion, max_worlds) {
        Ok(v) => {
            *out = match v.status {
                VerdictStatus::Entails => TlVerdict::TlEntails,
                VerdictStatus::CounterModel { .. } => TlVerdict::TlCounterModel,
                VerdictStatus::BoundExhausted => TlVerdict::TlBoundExhausted,
            };
            TlStatus::TlOk
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlEvalError
        }
    }
}

/// Checks a proof file (JSON) against a system (`mlinc`, `mlmight`, or
/// `mlsmight`; pass null to use the system declared in the file). On
/// acceptance, stores the printed conclusion in `out_conclusion` when
/// that pointer is non-null.
///
/// # Safety
/// `json` must be a valid string; `system` may be null; `out_conclusion`
/// may be null or must be a valid store location.
#[no_mangle]
pub unsafe extern "C" fn tl_check_proof(
    json: *const c_char,
    system: *const c_char,
    out_conclusion: *mut *mut c_char,
) -> TlStatus {
    let json = match read_str(json, "proof JSON") {
        Ok(t) => t,
        Err(status) => return status,
    };
    let (declared, derivation) = match derivation_from_json(json) {
        Ok(x) => x,
        Err(e) => {
            set_error(e.to_string());
            return TlStatus::TlBadInput;
        }
    };
    let system = if system.is_null() {
        match declared {
            Some(s) => s,
            None => {
                set_error("no system given and none declared in the file");
                return TlStatus::TlBadInput;
            }
        }
    } else {
        let name = match read_str(system, "system") {
            Ok(t) => t,
            Err(status) => return status,
        };
        match System::from_name(name) {
            Some(s) => s,
            None => {
                set_error(format!("unknown system `{name}`"));
                return TlStatus::TlBadInput;
            }
        }
    };
    match check_derivation(&derivation, system) {
        Ok((conclusion, _open)) => {
            if !out_conclusion.is_null() {
                *out_conclusion = to_c_string(print_formula(&conclusion));
            }
            TlStatus::TlOk
        }
        Err(e) => {
            set_error(e.to_string());
            TlStatus::TlProofRejected
        }
    }
}
