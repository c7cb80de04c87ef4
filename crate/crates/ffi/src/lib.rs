//! C ABI for the tym compiler and interpreter.
//!
//! A program is analyzed once into an opaque [`TymProgram`] handle, which can
//! then be lowered to C++ or run in the interpreter any number of times.
//! Every function returns a [`TymStatus`]; strings handed back to the caller
//! are owned by the caller and released with [`tym_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tymc::argsfile::{parse_args, validate};
use tymc::codegen::{emit_module_with, EmitOptions, EmitTarget, ErrorStyle};
use tymc::diag::render_all;
use tymc::driver::{frontend, interpret, EXIT_OK, EXIT_RUNTIME};
use tymc::TypedProgram;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TymStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// The source has lexical, syntax or semantic errors.
    Diagnostics = 3,
    /// The args text is malformed or does not match the parameters.
    BadArguments = 4,
    /// The program raised a runtime error or called `error`.
    RuntimeError = 5,
    /// An internal error; the library is still usable.
    Internal = 6,
}

/// Code generation target.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TymTarget {
    Octave = 0,
    Standalone = 1,
    /// Octave target with `error` lowered to a stream print.
    OctaveStream = 2,
}

/// An analyzed tym function.
pub struct TymProgram {
    program: TypedProgram,
    name: CString,
}

fn to_c(s: String) -> *mut c_char {
    // Interior NULs cannot occur in generated text; strip defensively.
    let s = s.replace('\0', "");
    CString::new(s).expect("NUL bytes removed").into_raw()
}

unsafe fn put(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = to_c(s);
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, TymStatus> {
    if p.is_null() {
        return Err(TymStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| TymStatus::InvalidUtf8)
}

fn guard(f: impl FnOnce() -> TymStatus) -> TymStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(TymStatus::Internal)
}

/// Analyzes `source`. On success stores a new handle in `*out`. Rendered
/// diagnostics (errors, or warnings on success) go to `*diagnostics` when it
/// is not null.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable;
/// `diagnostics` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tym_program_new(
    source: *const c_char,
    out: *mut *mut TymProgram,
    diagnostics: *mut *mut c_char,
) -> TymStatus {
    guard(|| {
        if out.is_null() {
            return TymStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let src = match read_str(source) {
            Ok(s) => s,
            Err(e) => return e,
        };
        match frontend(src) {
            Ok(program) => {
                put(diagnostics, render_all(&program.warnings, "<source>"));
                let name = CString::new(program.name.clone()).expect("identifiers have no NUL");
                *out = Box::into_raw(Box::new(TymProgram { program, name }));
                TymStatus::Ok
            }
            Err(diags) => {
                put(diagnostics, render_all(&diags, "<source>"));
                TymStatus::Diagnostics
            }
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `program` must be null or a handle from [`tym_program_new`] that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn tym_program_free(program: *mut TymProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// The function name. The string is owned by the handle.
///
/// # Safety
/// `program` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tym_program_name(program: *const TymProgram) -> *const c_char {
    match program.as_ref() {
        Some(p) => p.name.as_ptr(),
        None => ptr::null(),
    }
}

/// Number of parameters, or 0 for a null handle.
///
/// # Safety
/// `program` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tym_program_param_count(program: *const TymProgram) -> usize {
    program.as_ref().map_or(0, |p| p.program.params.len())
}

/// Lowers the program to C++ and stores the translation unit in `*out`.
///
/// # Safety
/// `program` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tym_program_emit(
    program: *const TymProgram,
    target: TymTarget,
    out: *mut *mut c_char,
) -> TymStatus {
    guard(|| {
        let (Some(p), false) = (program.as_ref(), out.is_null()) else {
            return TymStatus::NullArgument;
        };
        let opts = match target {
            TymTarget::Octave => EmitOptions::new(EmitTarget::Octave),
            TymTarget::Standalone => EmitOptions::new(EmitTarget::Standalone),
            TymTarget::OctaveStream => EmitOptions { target: EmitTarget::Octave, octave_error: ErrorStyle::Stream },
        };
        put(out, emit_module_with(&p.program, &opts).source_text);
        TymStatus::Ok
    })
}

/// Runs the program in the interpreter. `args` is in the args file format
/// and may be null for a function without parameters. The printed result
/// goes to `*out_stdout` and messages to `*out_stderr`; either may be null.
///
/// # Safety
/// `program` must be a live handle; `args` must be null or NUL-terminated;
/// the output pointers must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tym_program_interp(
    program: *const TymProgram,
    args: *const c_char,
    out_stdout: *mut *mut c_char,
    out_stderr: *mut *mut c_char,
) -> TymStatus {
    guard(|| {
        let Some(p) = program.as_ref() else {
            return TymStatus::NullArgument;
        };
        let text = if args.is_null() {
            ""
        } else {
            match read_str(args) {
                Ok(s) => s,
                Err(e) => return e,
            }
        };
        let values = match parse_args(text) {
            Ok(v) => v,
            Err(e) => {
                put(out_stderr, format!("{e}\n"));
                return TymStatus::BadArguments;
            }
        };
        if let Err(e) = validate(&p.program.name, &p.program.param_types(), &values) {
            put(out_stderr, format!("{e}\n"));
            return TymStatus::BadArguments;
        }
        let outcome = interpret(&p.program, &values);
        put(out_stdout, outcome.stdout);
        put(out_stderr, outcome.stderr);
        match outcome.code {
            EXIT_OK => TymStatus::Ok,
            EXIT_RUNTIME => TymStatus::RuntimeError,
            _ => TymStatus::Internal,
        }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn tym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn tym_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
