//! C ABI over `ramflow`.
//!
//! Objects are opaque handles released by their `_free` function. Every
//! fallible call returns a [`RamflowStatus`] and writes its result through
//! an out pointer; on failure `ramflow_last_error` describes the cause for
//! the calling thread. Strings returned by the library are released with
//! `ramflow_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, size_t};
use ramflow::classes::{ClassSpec, StructureClass};
use ramflow::limit::ConstructionState;
use ramflow::{Embedding, Error, FinStructure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RamflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Malformed = 3,
    NotMember = 4,
    BoundTooLarge = 5,
    InvalidArgument = 6,
    Precondition = 7,
    Panic = 8,
}

pub struct RamflowStructure {
    inner: FinStructure,
}

pub struct RamflowClass {
    inner: ClassSpec,
}

pub struct RamflowConstruction {
    inner: ConstructionState,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> RamflowStatus {
    match e {
        Error::InvalidSignature(_)
        | Error::InvalidStructure(_)
        | Error::SignatureMismatch(_)
        | Error::MalformedEmbedding(_)
        | Error::MalformedInput(_)
        | Error::InvalidClass(_)
        | Error::InconsistentMap(_)
        | Error::Document(_) => RamflowStatus::Malformed,
        Error::NotMember { .. } | Error::InadmissibleOrder(_) => RamflowStatus::NotMember,
        Error::BoundTooLarge { .. } => RamflowStatus::BoundTooLarge,
        Error::InvalidArgument(_) => RamflowStatus::InvalidArgument,
        Error::Precondition(_) => RamflowStatus::Precondition,
    }
}

enum Fail {
    Null,
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RamflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RamflowStatus::Ok
        }
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument");
            RamflowStatus::NullPointer
        }
        Ok(Err(Fail::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            RamflowStatus::InvalidUtf8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            RamflowStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    out.write(value);
    Ok(())
}

/// Why the last call on this thread failed, or null after a success. Valid
/// until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ramflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ramflow_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a structure document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_structure_from_json(
    json: *const c_char,
    out: *mut *mut RamflowStructure,
) -> RamflowStatus {
    guard(|| {
        let s = FinStructure::from_json(text(json)?)?;
        write(out, Box::into_raw(Box::new(RamflowStructure { inner: s })))
    })
}

/// Serializes a structure; release the string with `ramflow_string_free`.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_structure_to_json(s: *const RamflowStructure, out: *mut *mut c_char) -> RamflowStatus {
    guard(|| {
        let json = borrow(s)?.inner.to_json();
        let c = CString::new(json).expect("JSON has no NUL");
        write(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_structure_size(s: *const RamflowStructure, out: *mut size_t) -> RamflowStatus {
    guard(|| write(out, borrow(s)?.inner.size()))
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ramflow_structure_free(s: *mut RamflowStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Parses a class such as `graph`, `kn-free:4` or `poset`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_class_parse(spec: *const c_char, ordered: bool, out: *mut *mut RamflowClass) -> RamflowStatus {
    guard(|| {
        let c = ClassSpec::parse(text(spec)?, ordered)?;
        write(out, Box::into_raw(Box::new(RamflowClass { inner: c })))
    })
}

/// # Safety
/// `c` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ramflow_class_free(c: *mut RamflowClass) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_class_contains(
    c: *const RamflowClass,
    s: *const RamflowStructure,
    out: *mut bool,
) -> RamflowStatus {
    guard(|| {
        let yes = borrow(c)?.inner.contains(&borrow(s)?.inner)?;
        write(out, yes)
    })
}

/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_are_isomorphic(
    a: *const RamflowStructure,
    b: *const RamflowStructure,
    out: *mut bool,
) -> RamflowStatus {
    guard(|| {
        let iso = ramflow::are_isomorphic(&borrow(a)?.inner, &borrow(b)?.inner)?;
        write(out, iso.is_some())
    })
}

/// Number of embeddings of `b` into `a`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_count_embeddings(
    b: *const RamflowStructure,
    a: *const RamflowStructure,
    out: *mut size_t,
) -> RamflowStatus {
    guard(|| write(out, ramflow::embedding::count_embeddings(&borrow(b)?.inner, &borrow(a)?.inner)))
}

/// Decides whether every `k`-colouring of the copies of `a` in `c` has a
/// copy of `b` in one colour.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_arrows(
    c: *const RamflowStructure,
    b: *const RamflowStructure,
    a: *const RamflowStructure,
    k: size_t,
    out: *mut bool,
) -> RamflowStatus {
    guard(|| {
        let r = ramflow::ramsey::arrows(&borrow(c)?.inner, &borrow(b)?.inner, &borrow(a)?.inner, k)?;
        write(out, r.arrows)
    })
}

/// Amalgam of `i: a → b` and `j: a → c` in `class`. The maps list the
/// images of `0..|a|`; `out_k` and `out_l` may be null, otherwise they
/// receive `|b|` and `|c|` entries.
///
/// # Safety
/// Handles must be live; `i` and `j` must point to `a_len` readable
/// entries; non-null out pointers must be writable for their lengths.
#[no_mangle]
pub unsafe extern "C" fn ramflow_amalgamate(
    a: *const RamflowStructure,
    b: *const RamflowStructure,
    c: *const RamflowStructure,
    i: *const size_t,
    j: *const size_t,
    a_len: size_t,
    class: *const RamflowClass,
    out_d: *mut *mut RamflowStructure,
    out_k: *mut size_t,
    out_l: *mut size_t,
) -> RamflowStatus {
    guard(|| {
        let (a, b, c) = (&borrow(a)?.inner, &borrow(b)?.inner, &borrow(c)?.inner);
        let class = &borrow(class)?.inner;
        if a_len > 0 && (i.is_null() || j.is_null()) {
            return Err(Fail::Null);
        }
        let slice = |p: *const size_t| if a_len == 0 { Vec::new() } else { std::slice::from_raw_parts(p, a_len).to_vec() };
        let (ei, ej) = (Embedding::new(slice(i)), Embedding::new(slice(j)));
        let r = ramflow::amalgamation::amalgamate(a, b, c, &ei, &ej, class)?;
        if !out_k.is_null() {
            std::ptr::copy_nonoverlapping(r.k.map().as_ptr(), out_k, r.k.len());
        }
        if !out_l.is_null() {
            std::ptr::copy_nonoverlapping(r.l.map().as_ptr(), out_l, r.l.len());
        }
        write(out_d, Box::into_raw(Box::new(RamflowStructure { inner: r.d })))
    })
}

/// Number of admissible linear orders of `s` for `class`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_admissible_order_count(
    s: *const RamflowStructure,
    class: *const RamflowClass,
    out: *mut size_t,
) -> RamflowStatus {
    guard(|| {
        let n = ramflow::flows::admissible_orders(&borrow(s)?.inner, &borrow(class)?.inner)?.len();
        write(out, n)
    })
}

/// Whether the automorphism group of `s` acts transitively on its
/// admissible orders.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_flow_is_minimal(
    s: *const RamflowStructure,
    class: *const RamflowClass,
    out: *mut bool,
) -> RamflowStatus {
    guard(|| {
        let flow = ramflow::flows::FiniteFlow::new(&borrow(s)?.inner, &borrow(class)?.inner)?;
        write(out, ramflow::flows::is_minimal(&flow)?)
    })
}

/// Starts a limit construction from `seed`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_construction_new(
    seed: *const RamflowStructure,
    class: *const RamflowClass,
    window: size_t,
    out: *mut *mut RamflowConstruction,
) -> RamflowStatus {
    guard(|| {
        let st = ConstructionState::new(&borrow(seed)?.inner, &borrow(class)?.inner, window)?;
        write(out, Box::into_raw(Box::new(RamflowConstruction { inner: st })))
    })
}

/// Performs one step and writes the number of invariant violations found
/// on the new stage.
///
/// # Safety
/// `st` must be a live handle; `violations` may be null.
#[no_mangle]
pub unsafe extern "C" fn ramflow_construction_step(st: *mut RamflowConstruction, violations: *mut size_t) -> RamflowStatus {
    guard(|| {
        let st = &mut st.as_mut().ok_or(Fail::Null)?.inner;
        st.step()?;
        if !violations.is_null() {
            violations.write(st.audit().len());
        }
        Ok(())
    })
}

/// Copy of the latest stage.
///
/// # Safety
/// `st` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ramflow_construction_current(
    st: *const RamflowConstruction,
    out: *mut *mut RamflowStructure,
) -> RamflowStatus {
    guard(|| {
        let s = borrow(st)?.inner.current().clone();
        write(out, Box::into_raw(Box::new(RamflowStructure { inner: s })))
    })
}

/// # Safety
/// `st` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ramflow_construction_free(st: *mut RamflowConstruction) {
    if !st.is_null() {
        drop(Box::from_raw(st));
    }
}
