//! C interface to `noether-core`.
//!
//! A problem file is parsed once into an opaque [`NoetherProblem`] handle and
//! commands are then run against it with the same words the command-line
//! tool accepts, minus the file argument. Every function returns a
//! [`NoetherStatus`]; the exit-code values coincide with the tool's.
//!
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`noether_string_free`]. [`noether_last_error`] describes
//! the most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use noether_core::cli::{run_words, Format, Settings};
use noether_core::problem::{ParseOptions, Problem};
use noether_core::verify::DEFAULT_TRIALS;

/// Result of every call. Non-negative values match the command-line exit
/// codes; negative values are interface misuse.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoetherStatus {
    Ok = 0,
    /// Malformed input, unknown name or unknown command.
    Input = 2,
    /// The computation itself failed, e.g. headroom overflow.
    Domain = 3,
    /// A claim was refuted: not a symmetry, failed identity, and so on.
    Refuted = 4,
    NullArgument = -1,
    InvalidUtf8 = -2,
    Panic = -3,
}

impl NoetherStatus {
    fn from_code(code: i32) -> Self {
        match code {
            0 => NoetherStatus::Ok,
            2 => NoetherStatus::Input,
            4 => NoetherStatus::Refuted,
            _ => NoetherStatus::Domain,
        }
    }
}

/// Run configuration. Obtain defaults from [`noether_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoetherOptions {
    pub seed: u64,
    /// Random evaluation points per certificate; zero is treated as one.
    pub trials: u64,
    /// Derivative headroom; zero selects the automatic bound.
    pub max_order: u32,
    /// `key=value` records instead of `key: value` text.
    pub records: bool,
}

impl Default for NoetherOptions {
    fn default() -> Self {
        NoetherOptions {
            seed: 0,
            trials: DEFAULT_TRIALS as u64,
            max_order: 0,
            records: false,
        }
    }
}

impl NoetherOptions {
    fn settings(&self) -> Settings {
        Settings {
            seed: self.seed,
            trials: usize::try_from(self.trials.max(1)).unwrap_or(usize::MAX),
            max_order: (self.max_order > 0).then_some(self.max_order),
            format: if self.records {
                Format::Records
            } else {
                Format::Text
            },
        }
    }
}

/// A parsed problem file.
pub struct NoetherProblem {
    problem: Problem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Runs `body` with the error slot cleared and panics turned into a status.
fn guard(body: impl FnOnce() -> NoetherStatus) -> NoetherStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            NoetherStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, NoetherStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(NoetherStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        NoetherStatus::InvalidUtf8
    })
}

unsafe fn read_options(p: *const NoetherOptions) -> NoetherOptions {
    if p.is_null() {
        NoetherOptions::default()
    } else {
        *p
    }
}

/// Default options: seed 0, 16 trials, automatic headroom, text output.
#[no_mangle]
pub extern "C" fn noether_options_default() -> NoetherOptions {
    NoetherOptions::default()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn noether_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses problem-file text. Only `max_order` is read from `options`, which
/// may be null. On success `*out` receives a handle for
/// [`noether_problem_free`]; otherwise it is set to null.
///
/// # Safety
/// `text` must be a NUL-terminated string, `out` a valid pointer, and
/// `options` null or valid.
#[no_mangle]
pub unsafe extern "C" fn noether_problem_parse(
    text: *const c_char,
    options: *const NoetherOptions,
    out: *mut *mut NoetherProblem,
) -> NoetherStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return NoetherStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let text = match read_str(text, "text") {
            Ok(t) => t,
            Err(status) => return status,
        };
        let parse = ParseOptions {
            max_order: read_options(options).settings().max_order,
        };
        match Problem::parse_with(text, &parse) {
            Ok(problem) => {
                *out = Box::into_raw(Box::new(NoetherProblem { problem }));
                NoetherStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                NoetherStatus::from_code(e.exit_code())
            }
        }
    })
}

/// Releases a handle from [`noether_problem_parse`]. Null is ignored.
///
/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn noether_problem_free(problem: *mut NoetherProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Runs one command, given as the command-line words without the file, e.g.
/// `{"current", "L", "time", "--normal", "N"}`. `options` may be null.
///
/// Whenever the status is non-negative `*report` receives the rendered
/// report, including for refuted claims; release it with
/// [`noether_string_free`]. On interface errors it is set to null.
///
/// # Safety
/// `problem` must be a live handle, `argv` must point to `argc`
/// NUL-terminated strings, `report` must be valid and `options` null or
/// valid.
#[no_mangle]
pub unsafe extern "C" fn noether_run(
    problem: *const NoetherProblem,
    argv: *const *const c_char,
    argc: usize,
    options: *const NoetherOptions,
    report: *mut *mut c_char,
) -> NoetherStatus {
    guard(|| {
        if report.is_null() {
            set_error("report is null");
            return NoetherStatus::NullArgument;
        }
        *report = ptr::null_mut();
        if problem.is_null() || (argv.is_null() && argc > 0) {
            set_error("problem or argv is null");
            return NoetherStatus::NullArgument;
        }
        let mut words = Vec::with_capacity(argc);
        for i in 0..argc {
            match read_str(*argv.add(i), "argument") {
                Ok(w) => words.push(w.to_owned()),
                Err(status) => return status,
            }
        }
        let settings = read_options(options).settings();
        let outcome = run_words(&(*problem).problem, &words, &settings);
        if let Some(m) = &outcome.message {
            set_error(m.clone());
        }
        let text = outcome.report.render(settings.format).replace('\0', " ");
        *report = CString::new(text).expect("NULs replaced").into_raw();
        NoetherStatus::from_code(outcome.code)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn noether_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the latest failure on this thread, or null. The pointer is
/// valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn noether_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
