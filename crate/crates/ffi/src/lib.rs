//! C ABI for `nftsoliton`.
//!
//! Pairs and signals cross the boundary as opaque handles created by this
//! library and released with the matching `*_free` function. Every fallible
//! call returns an [`NftStatus`]; on failure a description is available from
//! [`nft_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nftsoliton::forward::find_eigenvalues;
use nftsoliton::synthesis::z_to_lambda;
use nftsoliton::{
    forward_fast, invert_fast, invert_sequential, synthesize_ab, CausalPolynomial, NftError,
    ScatteringPair, Signal, SpectrumSpec,
};
use num_complex::Complex64;

/// Complex number with the layout of C99 `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NftComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for NftComplex {
    fn from(z: Complex64) -> Self {
        NftComplex { re: z.re, im: z.im }
    }
}

impl From<NftComplex> for Complex64 {
    fn from(z: NftComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    NotPowerOfTwo = 4,
    InvalidPair = 5,
    Singular = 6,
    NumericalFailure = 7,
    Panic = 8,
}

/// Opaque scattering pair `(a, b)`.
pub struct NftPair(ScatteringPair);

/// Opaque signal of `D` scaled samples.
pub struct NftSignal(Signal);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &NftError) -> NftStatus {
    match err {
        NftError::Stage { source, .. } => status_of(source),
        NftError::NotPowerOfTwo(_) => NftStatus::NotPowerOfTwo,
        NftError::InvalidPair(_) => NftStatus::InvalidPair,
        NftError::SingularRecovery { .. } | NftError::MultipleRoot(_) => NftStatus::Singular,
        NftError::Domain(_)
        | NftError::InvalidInput(_)
        | NftError::FilterGain { .. }
        | NftError::TruncationTail { .. }
        | NftError::NotARoot(_) => NftStatus::InvalidArgument,
        _ => NftStatus::NumericalFailure,
    }
}

fn fail(status: NftStatus, msg: impl Into<String>) -> NftStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), NftStatus>) -> NftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NftStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(NftStatus::Panic, "internal panic"),
    }
}

fn check<T>(r: nftsoliton::Result<T>) -> Result<T, NftStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_complex(data: *const NftComplex, len: usize) -> Result<Vec<Complex64>, NftStatus> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(fail(NftStatus::NullPointer, "null input array"));
    }
    Ok(std::slice::from_raw_parts(data, len)
        .iter()
        .map(|&z| z.into())
        .collect())
}

unsafe fn write_complex(
    values: &[Complex64],
    out: *mut NftComplex,
    capacity: usize,
) -> Result<(), NftStatus> {
    if values.is_empty() {
        return Ok(());
    }
    if capacity < values.len() {
        return Err(fail(
            NftStatus::BufferTooSmall,
            format!("output holds {capacity} values, {} needed", values.len()),
        ));
    }
    if out.is_null() {
        return Err(fail(NftStatus::NullPointer, "null output array"));
    }
    let dst = std::slice::from_raw_parts_mut(out, values.len());
    for (d, v) in dst.iter_mut().zip(values) {
        *d = (*v).into();
    }
    Ok(())
}

unsafe fn out_ptr<'a, T>(out: *mut *mut T) -> Result<&'a mut *mut T, NftStatus> {
    out.as_mut()
        .ok_or_else(|| fail(NftStatus::NullPointer, "null output handle"))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, NftStatus> {
    p.as_ref()
        .ok_or_else(|| fail(NftStatus::NullPointer, "null handle"))
}

/// Message describing the last failure on this thread, or NULL. The string
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds the pair `(a, b)` for `k` eigenvalues in the upper half-plane and
/// a truncated-sinc continuous spectrum of gain `delta` and cutoff
/// `omega_c`, with `d` coefficients each.
///
/// # Safety
/// `lambdas` must point to `k` readable values (or be NULL when `k == 0`)
/// and `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_synthesize(
    lambdas: *const NftComplex,
    k: usize,
    delta: f64,
    d: usize,
    omega_c: f64,
    out: *mut *mut NftPair,
) -> NftStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let lambdas = read_complex(lambdas, k)?;
        let spec = check(SpectrumSpec::new(lambdas, delta, d, omega_c))?;
        let syn = check(synthesize_ab(&spec))?;
        *out = Box::into_raw(Box::new(NftPair(syn.pair)));
        Ok(())
    })
}

/// Wraps caller-provided coefficients of `a(z)` and `b(z)`, `d` each,
/// ordered by increasing power of `1/z`.
///
/// # Safety
/// `a` and `b` must each point to `d` readable values and `out` must be a
/// valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_pair_from_coeffs(
    a: *const NftComplex,
    b: *const NftComplex,
    d: usize,
    out: *mut *mut NftPair,
) -> NftStatus {
    guard(|| {
        let out = out_ptr(out)?;
        if d == 0 {
            return Err(fail(
                NftStatus::InvalidArgument,
                "pair needs at least one coefficient",
            ));
        }
        let a = check(CausalPolynomial::new(read_complex(a, d)?))?;
        let b = check(CausalPolynomial::new(read_complex(b, d)?))?;
        *out = Box::into_raw(Box::new(NftPair(ScatteringPair::new(a, b))));
        Ok(())
    })
}

/// Number of coefficients `D` of each polynomial, or 0 for NULL.
///
/// # Safety
/// `pair` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nft_pair_len(pair: *const NftPair) -> usize {
    pair.as_ref().map_or(0, |p| p.0.len())
}

/// Copies the coefficients of `a` and `b` into arrays of `capacity` values.
///
/// # Safety
/// `pair` must be a live handle; `a_out` and `b_out` must each point to
/// `capacity` writable values.
#[no_mangle]
pub unsafe extern "C" fn nft_pair_coeffs(
    pair: *const NftPair,
    a_out: *mut NftComplex,
    b_out: *mut NftComplex,
    capacity: usize,
) -> NftStatus {
    guard(|| {
        let p = &handle(pair)?.0;
        write_complex(p.a.coeffs(), a_out, capacity)?;
        write_complex(p.b.coeffs(), b_out, capacity)
    })
}

/// Releases a pair. NULL is ignored.
///
/// # Safety
/// `pair` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nft_pair_free(pair: *mut NftPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

unsafe fn invert_with(
    pair: *const NftPair,
    out: *mut *mut NftSignal,
    f: fn(&ScatteringPair) -> nftsoliton::Result<Signal>,
) -> NftStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let signal = check(f(&handle(pair)?.0))?;
        *out = Box::into_raw(Box::new(NftSignal(signal)));
        Ok(())
    })
}

/// Fast inversion of a pair; `D` must be a power of two.
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_invert_fast(
    pair: *const NftPair,
    out: *mut *mut NftSignal,
) -> NftStatus {
    invert_with(pair, out, |p| invert_fast(p).map(|(s, _)| s))
}

/// Sample-by-sample inversion of a pair.
///
/// # Safety
/// `pair` must be a live handle and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_invert_sequential(
    pair: *const NftPair,
    out: *mut *mut NftSignal,
) -> NftStatus {
    invert_with(pair, out, invert_sequential)
}

/// Wraps `d` caller-provided scaled samples.
///
/// # Safety
/// `samples` must point to `d` readable values and `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_signal_from_samples(
    samples: *const NftComplex,
    d: usize,
    out: *mut *mut NftSignal,
) -> NftStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let signal = check(Signal::new(read_complex(samples, d)?))?;
        *out = Box::into_raw(Box::new(NftSignal(signal)));
        Ok(())
    })
}

/// Number of samples, or 0 for NULL.
///
/// # Safety
/// `signal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nft_signal_len(signal: *const NftSignal) -> usize {
    signal.as_ref().map_or(0, |s| s.0.len())
}

/// Sample spacing `1/D`, or 0 for NULL.
///
/// # Safety
/// `signal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nft_signal_eps(signal: *const NftSignal) -> f64 {
    signal.as_ref().map_or(0.0, |s| s.0.eps())
}

/// Copies the samples into an array of `capacity` values.
///
/// # Safety
/// `signal` must be a live handle and `out` must point to `capacity`
/// writable values.
#[no_mangle]
pub unsafe extern "C" fn nft_signal_samples(
    signal: *const NftSignal,
    out: *mut NftComplex,
    capacity: usize,
) -> NftStatus {
    guard(|| write_complex(handle(signal)?.0.samples(), out, capacity))
}

/// Releases a signal. NULL is ignored.
///
/// # Safety
/// `signal` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nft_signal_free(signal: *mut NftSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Forward transform of a signal to its pair `(a, b)`; `D` must be a power
/// of two.
///
/// # Safety
/// `signal` must be a live handle and `out` a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn nft_forward(
    signal: *const NftSignal,
    out: *mut *mut NftPair,
) -> NftStatus {
    guard(|| {
        let out = out_ptr(out)?;
        let pair = check(forward_fast(&handle(signal)?.0))?;
        *out = Box::into_raw(Box::new(NftPair(pair)));
        Ok(())
    })
}

/// Eigenvalues `lambda_k` of the pair, from the roots of `a(z)` outside the
/// unit circle. `count` always receives the number found; the values are
/// written only when `capacity` is large enough.
///
/// # Safety
/// `pair` must be a live handle, `count` a valid pointer, and `out` must
/// point to `capacity` writable values (or be NULL when `capacity == 0`).
#[no_mangle]
pub unsafe extern "C" fn nft_find_eigenvalues(
    pair: *const NftPair,
    out: *mut NftComplex,
    capacity: usize,
    count: *mut usize,
) -> NftStatus {
    guard(|| {
        let p = &handle(pair)?.0;
        let count = count
            .as_mut()
            .ok_or_else(|| fail(NftStatus::NullPointer, "null count"))?;
        let roots = check(find_eigenvalues(&p.a))?;
        let eps = p.eps();
        let lambdas = roots
            .iter()
            .map(|&z| check(z_to_lambda(z, eps)))
            .collect::<Result<Vec<_>, _>>()?;
        *count = lambdas.len();
        write_complex(&lambdas, out, capacity)
    })
}
