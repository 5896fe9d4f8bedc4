//! C interface to `neurotopo`.
//!
//! Codes and reports live behind opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`NtStatus`]; on failure the message is kept per thread and read back
//! with [`nt_last_error_message`]. Neuron indices are 1-based, as in the
//! command-line tool.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use neurotopo::code::{binarize, ActivationMatrix};
use neurotopo::infogeo::{test_hole, NullMode, TestOptions, DEFAULT_SMOOTHING};
use neurotopo::report::{analyze, describe, load_code, run_feature, AnalyzeOptions, Feature};
use neurotopo::topology::{betti, build_complex};
use neurotopo::{CodeMatrix, Codeword, Error};

/// Result of every fallible call. The input, numerical and configuration
/// classes carry the same numbers as the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NtStatus {
    Ok = 0,
    InvalidInput = 2,
    Numerical = 3,
    Config = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NtNullMode {
    Eta = 0,
    Theta = 1,
}

/// Options shared by the analysis and test calls. Start from
/// [`nt_options_default`] and change what you need.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct NtOptions {
    pub alpha: f64,
    pub smoothing: f64,
    pub seed: u64,
    /// One of the [`NtNullMode`] values.
    pub null_mode: u32,
    /// Complex dimension; holes are tested below it.
    pub max_dim: usize,
    /// Highest monomial order built from disjoint pairs.
    pub max_order: usize,
    /// Include stage timings in analysis reports.
    pub timings: bool,
}

/// A binary code: samples by neurons.
pub struct NtCode {
    inner: CodeMatrix,
    source: String,
    binarized: bool,
}

/// A JSON report produced by [`nt_analyze`] or [`nt_test_feature`].
pub struct NtReport {
    json: CString,
    significant: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

enum Failure {
    Lib(Error),
    Status(NtStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(NtStatus::NullPointer, format!("{what} is null"))
}

fn status_of(e: &Error) -> NtStatus {
    match e.exit_code() {
        3 => NtStatus::Numerical,
        4 => NtStatus::Config,
        _ => NtStatus::InvalidInput,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NtStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NtStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, message))) => {
            set_last_error(message);
            s
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal panic: {message}"));
            NtStatus::Panic
        }
    }
}

unsafe fn code_ref<'a>(code: *const NtCode) -> Result<&'a NtCode, Failure> {
    // SAFETY: the caller passes a handle from this library or null.
    unsafe { code.as_ref() }.ok_or_else(|| null("code"))
}

unsafe fn options_or_default(opts: *const NtOptions) -> NtOptions {
    // SAFETY: the caller passes a valid options struct or null.
    unsafe { opts.as_ref() }
        .copied()
        .unwrap_or_else(|| nt_options_default())
}

fn test_options(o: &NtOptions) -> Result<TestOptions, Failure> {
    let null_mode = match o.null_mode {
        m if m == NtNullMode::Eta as u32 => NullMode::Eta,
        m if m == NtNullMode::Theta as u32 => NullMode::Theta,
        m => return Err(Error::Config(format!("unknown null mode {m}")).into()),
    };
    Ok(TestOptions {
        alpha: o.alpha,
        smoothing: o.smoothing,
        seed: o.seed,
        null_mode,
        ..Default::default()
    })
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: `out` was checked non-null by the caller of this helper.
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

fn new_report<S: serde::Serialize>(value: &S, significant: bool) -> Result<NtReport, Failure> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Status(NtStatus::Panic, format!("report serialization failed: {e}")))?;
    Ok(NtReport {
        json: CString::new(text).expect("JSON has no interior NUL"),
        significant,
    })
}

/// Version of the library as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null after a
/// successful one. Valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn nt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn nt_options_default() -> NtOptions {
    let a = AnalyzeOptions::default();
    NtOptions {
        alpha: a.tests.alpha,
        smoothing: DEFAULT_SMOOTHING,
        seed: a.tests.seed,
        null_mode: NtNullMode::Eta as u32,
        max_dim: a.max_dim,
        max_order: a.max_order,
        timings: false,
    }
}

/// Builds a code from `n_samples * n_neurons` bytes in row-major order,
/// each 0 or 1.
///
/// # Safety
/// `bits` must point to that many readable bytes and `out` must be a valid
/// place to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn nt_code_from_bits(
    n_neurons: usize,
    n_samples: usize,
    bits: *const u8,
    out: *mut *mut NtCode,
) -> NtStatus {
    guard(|| {
        if bits.is_null() {
            return Err(null("bits"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n_neurons
            .checked_mul(n_samples)
            .ok_or_else(|| Error::InvalidInput("code size overflows".into()))?;
        // SAFETY: checked non-null; the caller guarantees `len` bytes.
        let data = unsafe { std::slice::from_raw_parts(bits, len) };
        if let Some(k) = data.iter().position(|&b| b > 1) {
            return Err(Error::InvalidInput(format!("entry {k} is {}, expected 0 or 1", data[k])).into());
        }
        let rows: Vec<Codeword> = if n_neurons == 0 {
            Vec::new()
        } else {
            data.chunks(n_neurons)
                .map(|r| Codeword::from_bits(&r.iter().map(|&b| b == 1).collect::<Vec<_>>()))
                .collect()
        };
        let inner = CodeMatrix::from_codewords(n_neurons, rows)?;
        // SAFETY: checked non-null above.
        unsafe {
            put(
                out,
                NtCode {
                    inner,
                    source: "<memory>".into(),
                    binarized: false,
                },
            )
        };
        Ok(())
    })
}

/// Builds a code from real activations in row-major order, thresholding
/// each neuron at its mean.
///
/// # Safety
/// `values` must point to `n_samples * n_neurons` readable doubles and
/// `out` must be a valid place to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn nt_code_from_activations(
    n_neurons: usize,
    n_samples: usize,
    values: *const f64,
    out: *mut *mut NtCode,
) -> NtStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n_neurons
            .checked_mul(n_samples)
            .ok_or_else(|| Error::InvalidInput("activation size overflows".into()))?;
        // SAFETY: checked non-null; the caller guarantees `len` doubles.
        let data = unsafe { std::slice::from_raw_parts(values, len) };
        let act = ActivationMatrix::new(n_neurons, data.to_vec())?;
        // SAFETY: checked non-null above.
        unsafe {
            put(
                out,
                NtCode {
                    inner: binarize(&act),
                    source: "<memory>".into(),
                    binarized: true,
                },
            )
        };
        Ok(())
    })
}

/// Reads a headerless CSV of 0/1 entries, or of activations when
/// `binarize` is true.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid place to store
/// the new handle.
#[no_mangle]
pub unsafe extern "C" fn nt_code_load_csv(path: *const c_char, binarize: bool, out: *mut *mut NtCode) -> NtStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null; the caller guarantees termination.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| Error::InvalidInput("path is not UTF-8".into()))?;
        let (inner, meta) = load_code(path, binarize)?;
        // SAFETY: checked non-null above.
        unsafe {
            put(
                out,
                NtCode {
                    inner,
                    source: meta.source,
                    binarized: binarize,
                },
            )
        };
        Ok(())
    })
}

/// # Safety
/// `code` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nt_code_free(code: *mut NtCode) {
    if !code.is_null() {
        // SAFETY: the handle came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(code) });
    }
}

/// Number of neurons and of samples (rows) in the code.
///
/// # Safety
/// `code` must be a live handle; the output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn nt_code_shape(code: *const NtCode, n_neurons: *mut usize, n_samples: *mut usize) -> NtStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let c = unsafe { code_ref(code) }?;
        // SAFETY: each pointer is written only when non-null.
        unsafe {
            if let Some(n) = n_neurons.as_mut() {
                *n = c.inner.n_neurons();
            }
            if let Some(m) = n_samples.as_mut() {
                *m = c.inner.n_samples();
            }
        }
        Ok(())
    })
}

/// Betti numbers `β_0 .. β_{max_dim-1}` of the code's complex. `len`
/// receives the count; when `capacity` is too small nothing is written to
/// `out` and the call returns `BufferTooSmall`.
///
/// # Safety
/// `code` must be a live handle, `out` must hold `capacity` values and
/// `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nt_betti(
    code: *const NtCode,
    max_dim: usize,
    out: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> NtStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let c = unsafe { code_ref(code) }?;
        if len.is_null() {
            return Err(null("len"));
        }
        if max_dim == 0 {
            return Err(Error::Config("max_dim must be at least 1".into()).into());
        }
        let b = betti(&build_complex(&c.inner, max_dim)).betti;
        // SAFETY: checked non-null above.
        unsafe { *len = b.len() };
        if b.len() > capacity {
            return Err(Failure::Status(
                NtStatus::BufferTooSmall,
                format!("{} Betti numbers do not fit in {capacity}", b.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: `out` holds at least `capacity >= b.len()` values.
        unsafe { ptr::copy_nonoverlapping(b.as_ptr(), out, b.len()) };
        Ok(())
    })
}

/// Number of significant `m`-dimensional holes after the hole test.
///
/// # Safety
/// `code` must be a live handle, `opts` null or valid, `holes` valid.
#[no_mangle]
pub unsafe extern "C" fn nt_test_hole(
    code: *const NtCode,
    m: usize,
    opts: *const NtOptions,
    holes: *mut usize,
) -> NtStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let c = unsafe { code_ref(code) }?;
        if holes.is_null() {
            return Err(null("holes"));
        }
        // SAFETY: forwarded caller contract.
        let o = unsafe { options_or_default(opts) };
        let r = test_hole(&c.inner, &build_complex(&c.inner, m + 1), m, &test_options(&o)?)?;
        // SAFETY: checked non-null above.
        unsafe { *holes = r.significant_holes };
        Ok(())
    })
}

/// Full analysis of a code as a JSON report.
///
/// # Safety
/// `code` must be a live handle, `opts` null or valid, `out` a valid place
/// to store the new report.
#[no_mangle]
pub unsafe extern "C" fn nt_analyze(code: *const NtCode, opts: *const NtOptions, out: *mut *mut NtReport) -> NtStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let c = unsafe { code_ref(code) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: forwarded caller contract.
        let o = unsafe { options_or_default(opts) };
        let analyze_opts = AnalyzeOptions {
            max_dim: o.max_dim,
            max_order: o.max_order,
            tests: test_options(&o)?,
            timings: o.timings,
        };
        let report = analyze(
            &c.inner,
            describe(&c.inner, c.source.clone(), c.binarized),
            &analyze_opts,
        )?;
        let significant = report.significance.significant.holes > 0;
        let r = new_report(&report, significant)?;
        // SAFETY: checked non-null above.
        unsafe { put(out, r) };
        Ok(())
    })
}

/// Tests one feature, written as on the command line: `"monomial i j"`,
/// `"mixed i j"` or `"hole m"`.
///
/// # Safety
/// `code` must be a live handle, `feature` NUL-terminated, `opts` null or
/// valid, `out` a valid place to store the new report.
#[no_mangle]
pub unsafe extern "C" fn nt_test_feature(
    code: *const NtCode,
    feature: *const c_char,
    opts: *const NtOptions,
    out: *mut *mut NtReport,
) -> NtStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let c = unsafe { code_ref(code) }?;
        if feature.is_null() {
            return Err(null("feature"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: checked non-null; the caller guarantees termination.
        let feature: Feature = unsafe { CStr::from_ptr(feature) }
            .to_str()
            .map_err(|_| Error::Config("feature is not UTF-8".into()))?
            .parse()?;
        // SAFETY: forwarded caller contract.
        let o = unsafe { options_or_default(opts) };
        let report = run_feature(&c.inner, feature, o.max_dim, &test_options(&o)?)?;
        let r = new_report(&report, report.decision().is_significant())?;
        // SAFETY: checked non-null above.
        unsafe { put(out, r) };
        Ok(())
    })
}

/// The report as NUL-terminated JSON, owned by the report.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nt_report_json(report: *const NtReport) -> *const c_char {
    // SAFETY: forwarded caller contract.
    unsafe { report.as_ref() }.map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Whether the tested feature was significant; for an analysis, whether
/// any hole was.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nt_report_significant(report: *const NtReport) -> bool {
    // SAFETY: forwarded caller contract.
    unsafe { report.as_ref() }.is_some_and(|r| r.significant)
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nt_report_free(report: *mut NtReport) {
    if !report.is_null() {
        // SAFETY: the handle came from `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(report) });
    }
}
