//! C interface to the cks engine.
//!
//! Contexts and lattices are opaque handles created by `cks_*` functions and
//! released with the matching `_free`. Every fallible function returns a
//! [`CksStatus`]; on failure [`cks_last_error`] describes what went wrong.
//! Concept indexes are 0-based, as in the Rust library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cks_core::interchange::{parse_clif, parse_fcif, ClifDocument};
use cks_core::linkage::{ext_linkage, ext_similarity, int_linkage};
use cks_core::{ConceptLattice, Error, FormalContext};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CksStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    NotInContext = 4,
    IndexOutOfRange = 5,
    EmptyExtent = 6,
    EmptyIntent = 7,
    InvalidInput = 8,
    Panic = 9,
}

/// A formal context.
pub struct CksContext(FormalContext);

/// A concept lattice together with the context it was built from.
pub struct CksLattice(ConceptLattice);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CksStatus, message: impl Into<String>) -> CksStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> CksStatus {
    let status = match &e {
        Error::Syntax { .. } | Error::Undeclared { .. } | Error::DuplicateDeclaration { .. } => CksStatus::Syntax,
        Error::NotInContext { .. } => CksStatus::NotInContext,
        Error::IndexOutOfRange { .. } => CksStatus::IndexOutOfRange,
        Error::EmptyExtent(_) => CksStatus::EmptyExtent,
        Error::EmptyIntent(_) => CksStatus::EmptyIntent,
        _ => CksStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`CksStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), CksStatus>) -> CksStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CksStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(CksStatus::Panic, "internal error"),
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, CksStatus> {
    if s.is_null() {
        return Err(fail(CksStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(CksStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, CksStatus> {
    p.as_ref().ok_or_else(|| fail(CksStatus::NullArgument, "null handle"))
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), CksStatus> {
    if out.is_null() {
        return Err(fail(CksStatus::NullArgument, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cks_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses FCIF text into a new context.
///
/// # Safety
/// `fcif` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_context_parse_fcif(fcif: *const c_char, out: *mut *mut CksContext) -> CksStatus {
    guard(|| {
        let text = text(fcif)?;
        let ctx = parse_fcif(text).and_then(|d| d.to_context()).map_err(from_error)?;
        store(out, Box::into_raw(Box::new(CksContext(ctx))))
    })
}

/// # Safety
/// `ctx` must be null or a live context handle.
#[no_mangle]
pub unsafe extern "C" fn cks_context_object_count(ctx: *const CksContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.0.object_count())
}

/// # Safety
/// `ctx` must be null or a live context handle.
#[no_mangle]
pub unsafe extern "C" fn cks_context_attribute_count(ctx: *const CksContext) -> usize {
    ctx.as_ref().map_or(0, |c| c.0.attribute_count())
}

/// # Safety
/// `ctx` must be null or a handle from [`cks_context_parse_fcif`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cks_context_free(ctx: *mut CksContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Builds the concept lattice of `ctx`. The context handle stays owned by
/// the caller.
///
/// # Safety
/// `ctx` must be a live context handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_build(ctx: *const CksContext, out: *mut *mut CksLattice) -> CksStatus {
    guard(|| {
        let ctx = handle(ctx)?;
        let lattice = ConceptLattice::build(ctx.0.clone());
        store(out, Box::into_raw(Box::new(CksLattice(lattice))))
    })
}

/// Rebuilds a lattice from CLIF text.
///
/// # Safety
/// `clif` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_parse_clif(clif: *const c_char, out: *mut *mut CksLattice) -> CksStatus {
    guard(|| {
        let text = text(clif)?;
        let lattice = parse_clif(text).and_then(|d| d.to_lattice()).map_err(from_error)?;
        store(out, Box::into_raw(Box::new(CksLattice(lattice))))
    })
}

/// # Safety
/// `lattice` must be null or a live lattice handle.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_concept_count(lattice: *const CksLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.0.len())
}

/// Writes the lattice as CLIF. Release the string with [`cks_string_free`].
///
/// # Safety
/// `lattice` must be a live handle, `type_name` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_emit_clif(
    lattice: *const CksLattice,
    type_name: *const c_char,
    out: *mut *mut c_char,
) -> CksStatus {
    guard(|| {
        let l = handle(lattice)?;
        let name = text(type_name)?;
        let clif = ClifDocument::from_lattice(name, &l.0).emit();
        let c = CString::new(clif).map_err(|_| fail(CksStatus::InvalidInput, "CLIF text contains NUL"))?;
        store(out, c.into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cks_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Whether concept `k0` lies below or at `k1`.
///
/// # Safety
/// `lattice` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_leq(
    lattice: *const CksLattice,
    k0: usize,
    k1: usize,
    out: *mut bool,
) -> CksStatus {
    guard(|| {
        let l = handle(lattice)?;
        let v = l.0.leq(k0, k1).map_err(from_error)?;
        store(out, v)
    })
}

/// Size of the common extent of two concepts.
///
/// # Safety
/// `lattice` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cks_ext_similarity(
    lattice: *const CksLattice,
    k0: usize,
    k1: usize,
    out: *mut usize,
) -> CksStatus {
    guard(|| {
        let l = handle(lattice)?;
        let v = ext_similarity(&l.0, k0, k1).map_err(from_error)?;
        store(out, v)
    })
}

/// Extensional linkage as an exact fraction `numer / denom`.
///
/// # Safety
/// `lattice` must be a live handle; `numer` and `denom` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn cks_ext_linkage(
    lattice: *const CksLattice,
    k0: usize,
    k1: usize,
    numer: *mut usize,
    denom: *mut usize,
) -> CksStatus {
    guard(|| {
        let l = handle(lattice)?;
        let r = ext_linkage(&l.0, k0, k1).map_err(from_error)?;
        store(numer, *r.numer())?;
        store(denom, *r.denom())
    })
}

/// Intensional linkage as an exact fraction `numer / denom`.
///
/// # Safety
/// `lattice` must be a live handle; `numer` and `denom` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn cks_int_linkage(
    lattice: *const CksLattice,
    k0: usize,
    k1: usize,
    numer: *mut usize,
    denom: *mut usize,
) -> CksStatus {
    guard(|| {
        let l = handle(lattice)?;
        let r = int_linkage(&l.0, k0, k1).map_err(from_error)?;
        store(numer, *r.numer())?;
        store(denom, *r.denom())
    })
}

/// # Safety
/// `lattice` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cks_lattice_free(lattice: *mut CksLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}
