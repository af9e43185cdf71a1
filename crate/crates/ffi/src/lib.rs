//! C ABI over `sphere-qmc`.
//!
//! Every function returns an [`SqmcStatus`]; on anything other than
//! `SQMC_STATUS_OK` the message is available from
//! [`sqmc_last_error_message`] on the same thread. Configurations are
//! opaque handles owned by the caller and released with
//! [`sqmc_config_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sphere_qmc::metrics::{wce_heat_kernel, wce_legendre, QuadSpec, SmoothnessParam, WceOptions, WceResult};
use sphere_qmc::samplers::{SamplerKind, SamplerSpec};
use sphere_qmc::spectral::{concentration_tail, explicit_confidence, zeta, BoundParams};
use sphere_qmc::{Configuration, Error, RngStream};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqmcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Domain = 3,
    /// Iteration, factorization or tolerance failure inside a computation.
    Numerical = 4,
    BufferTooSmall = 5,
    Io = 6,
    Panic = 7,
}

/// Sampler selector for [`sqmc_sample`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqmcSampler {
    SphericalEig = 0,
    SphericalDpp = 1,
    IidUniform = 2,
    EqualAreaJitter = 3,
    Fibonacci = 4,
}

/// Opaque point configuration.
pub struct SqmcConfig {
    inner: Configuration,
}

/// Worst-case error: `value² ± tail_bound` brackets the exact square.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqmcWce {
    pub value: f64,
    pub tail_bound: f64,
    pub truncation_l: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SqmcExplicitConfidence {
    pub wce_bound: f64,
    pub numerator: f64,
    pub failure_prob: f64,
    pub failure_prob_loose: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SqmcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidInput(_) | Error::Parse { .. } | Error::NotOrthogonal { .. } => SqmcStatus::InvalidInput,
            Error::Domain(_) | Error::Inadmissible(_) | Error::InfiniteEnergy(..) => SqmcStatus::Domain,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => SqmcStatus::Io,
            _ => SqmcStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(SqmcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SqmcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqmcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SqmcStatus::Panic
        }
    }
}

unsafe fn config_ref<'a>(c: *const SqmcConfig) -> Result<&'a Configuration, Failure> {
    c.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`) and returns its full length in
/// bytes, excluding the terminator. Returns 0 when there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sqmc_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqmc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a configuration from `n` points stored as `x0,y0,z0,x1,...`.
/// Points within `1e-6` of the unit sphere are renormalized; others are
/// rejected.
///
/// # Safety
/// `xyz` must point to `3 * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_config_from_xyz(xyz: *const f64, n: usize, out: *mut *mut SqmcConfig) -> SqmcStatus {
    guard(|| {
        if xyz.is_null() {
            return Err(null("xyz"));
        }
        let len = n.checked_mul(3).ok_or_else(|| Failure(SqmcStatus::InvalidInput, "n is too large".into()))?;
        let flat = std::slice::from_raw_parts(xyz, len);
        let triples: Vec<[f64; 3]> = flat.chunks_exact(3).map(|t| [t[0], t[1], t[2]]).collect();
        let c = Configuration::from_triples(&triples)?;
        write_out(out, Box::into_raw(Box::new(SqmcConfig { inner: c })))
    })
}

/// Draws one configuration from stream `(seed, stream_id)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_sample(
    sampler: u32,
    n: usize,
    seed: u64,
    stream_id: u64,
    out: *mut *mut SqmcConfig,
) -> SqmcStatus {
    guard(|| {
        let kind = match sampler {
            0 => SamplerKind::SphericalEig,
            1 => SamplerKind::SphericalDpp,
            2 => SamplerKind::IidUniform,
            3 => SamplerKind::EqualAreaJitter,
            4 => SamplerKind::Fibonacci,
            other => return Err(Failure(SqmcStatus::InvalidInput, format!("unknown sampler {other}"))),
        };
        let c = SamplerSpec::new(kind, n, RngStream::new(seed, stream_id))?.sample()?;
        write_out(out, Box::into_raw(Box::new(SqmcConfig { inner: c })))
    })
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqmc_config_len(config: *const SqmcConfig) -> usize {
    config.as_ref().map_or(0, |c| c.inner.len())
}

/// Copies the points as `x0,y0,z0,x1,...` into `out`, which holds `cap`
/// doubles and needs at least `3 * len`.
///
/// # Safety
/// `config` must be a live handle and `out` must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sqmc_config_copy_xyz(config: *const SqmcConfig, out: *mut f64, cap: usize) -> SqmcStatus {
    guard(|| {
        let c = config_ref(config)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let need = 3 * c.len();
        if cap < need {
            return Err(Failure(SqmcStatus::BufferTooSmall, format!("buffer holds {cap} doubles, need {need}")));
        }
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (slot, t) in dst.chunks_exact_mut(3).zip(c.triples()) {
            slot.copy_from_slice(&t);
        }
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `config` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqmc_config_free(config: *mut SqmcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

fn wce_out(r: WceResult) -> SqmcWce {
    SqmcWce {
        value: r.value,
        tail_bound: r.tail_bound,
        truncation_l: r.truncation_l,
    }
}

/// `wce(config; s)` by the Legendre series, certified to `tol` on the square.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_wce(config: *const SqmcConfig, s: f64, tol: f64, out: *mut SqmcWce) -> SqmcStatus {
    guard(|| {
        let c = config_ref(config)?;
        let r = wce_legendre(c, SmoothnessParam::new(s)?, &WceOptions::with_tol(tol))?;
        write_out(out, wce_out(r))
    })
}

/// `wce(config; s)` through the heat-kernel integral.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_wce_heat(config: *const SqmcConfig, s: f64, tol: f64, out: *mut SqmcWce) -> SqmcStatus {
    guard(|| {
        let c = config_ref(config)?;
        let quad = QuadSpec { tol, ..QuadSpec::default() };
        let r = wce_heat_kernel(c, SmoothnessParam::new(s)?, &quad)?;
        write_out(out, wce_out(r))
    })
}

/// Explicit confidence bound on `wce(·;2)` for `n` points and `eta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_explicit_confidence(n: u64, eta: f64, out: *mut SqmcExplicitConfidence) -> SqmcStatus {
    guard(|| {
        let e = explicit_confidence(n, eta)?;
        write_out(
            out,
            SqmcExplicitConfidence {
                wce_bound: e.wce_bound,
                numerator: e.numerator,
                failure_prob: e.failure_prob,
                failure_prob_loose: e.failure_prob_loose,
            },
        )
    })
}

/// Bound on `P(‖δ_N − σ‖_{-(2+eps)} > delta)`, clipped to [0, 1].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_concentration_tail(n: u64, eps: f64, delta: f64, out: *mut f64) -> SqmcStatus {
    guard(|| {
        let p = concentration_tail(&BoundParams::from_delta(n, eps, delta)?)?;
        write_out(out, p)
    })
}

/// Spectral zeta `Σ (2l+1) (l(l+1))^{-p}` with a certified error.
///
/// # Safety
/// `value` and `error` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sqmc_zeta(p: f64, tol: f64, value: *mut f64, error: *mut f64) -> SqmcStatus {
    guard(|| {
        if value.is_null() || error.is_null() {
            return Err(null("output pointer"));
        }
        let z = zeta(p, tol)?;
        write_out(value, z.value)?;
        write_out(error, z.error)
    })
}
