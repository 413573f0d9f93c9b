//! C ABI over the EDA kernel and the single-point link simulation.
//!
//! Complex buffers cross the boundary as interleaved `re, im` doubles and
//! every length argument counts complex samples. Functions return an
//! [`EdarofStatus`]; on failure the message is available from
//! [`edarof_last_error`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use edarof::eda::{eda_demodulate, eda_modulate, EdaMultiplex, SignalFrame};
use edarof::harness::{run_single, RunConfig};
use edarof::plan::{derive_drof_plan, derive_plan_with, ModulationPlan, PlanOptions};
use edarof::quantizer::{quantize_cartesian, QuantizerSpec};
use edarof::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdarofStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
    Simulation = 4,
    Panic = 5,
}

/// Opaque modulation plan.
pub struct EdarofPlan(ModulationPlan);

/// Opaque multiplexed signal with its segment layout.
pub struct EdarofMultiplex(EdaMultiplex);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct EdarofPlanInfo {
    pub inv_eta: f64,
    pub order_m: usize,
    pub frame_len: usize,
    pub n_p: usize,
    pub n_r: usize,
    pub mux_len: usize,
    pub drof_mode: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct EdarofRecord {
    pub inv_eta: f64,
    pub order_m: usize,
    pub n_p: usize,
    pub n_r: usize,
    pub snr_db: f64,
    pub evm_pct: f64,
    pub seed: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(EdarofStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::LengthMismatch { .. } => EdarofStatus::LengthMismatch,
            Error::Domain(_) | Error::Config(_) | Error::UnsupportedFormat(_) => {
                EdarofStatus::InvalidArgument
            }
            e if e.is_config() => EdarofStatus::InvalidArgument,
            _ => EdarofStatus::Simulation,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(EdarofStatus::NullPointer, format!("{what} is null"))
}

fn guard<F>(f: F) -> EdarofStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EdarofStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            EdarofStatus::Panic
        }
    }
}

unsafe fn read_complex(data: *const f64, n: usize) -> Result<Vec<Complex64>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(null("input buffer"));
    }
    let flat = std::slice::from_raw_parts(data, 2 * n);
    Ok(flat
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect())
}

unsafe fn write_complex(src: &[Complex64], out: *mut f64, capacity: usize) -> Result<(), Failure> {
    if capacity < src.len() {
        return Err(Failure(
            EdarofStatus::LengthMismatch,
            format!("output holds {capacity} samples, {} needed", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null("output buffer"));
    }
    let flat = std::slice::from_raw_parts_mut(out, 2 * src.len());
    for (dst, v) in flat.chunks_exact_mut(2).zip(src) {
        dst[0] = v.re;
        dst[1] = v.im;
    }
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn edarof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Plan for bandwidth expansion `inv_eta` (>= 1) over frames of `frame_len` samples,
/// with the default quantizer profile and equal-power scaling.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn edarof_plan_new(
    inv_eta: f64,
    frame_len: usize,
    out: *mut *mut EdarofPlan,
) -> EdarofStatus {
    guard(|| {
        let plan = derive_plan_with(inv_eta, frame_len, &PlanOptions::default())?;
        emit(out, EdarofPlan(plan))
    })
}

/// All-digital plan with `order` stages.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn edarof_plan_new_drof(
    order: usize,
    frame_len: usize,
    out: *mut *mut EdarofPlan,
) -> EdarofStatus {
    guard(|| {
        let plan = derive_drof_plan(order, frame_len, &PlanOptions::default())?;
        emit(out, EdarofPlan(plan))
    })
}

/// # Safety
/// `plan` must be null or a handle from `edarof_plan_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edarof_plan_free(plan: *mut EdarofPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// # Safety
/// `plan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edarof_plan_info(
    plan: *const EdarofPlan,
    out: *mut EdarofPlanInfo,
) -> EdarofStatus {
    guard(|| {
        let p = &deref(plan, "plan")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = EdarofPlanInfo {
            inv_eta: p.inv_eta,
            order_m: p.order_m,
            frame_len: p.frame_len,
            n_p: p.n_p,
            n_r: p.n_r,
            mux_len: p.mux_len(),
            drof_mode: p.drof_mode,
        };
        Ok(())
    })
}

/// Modulates `n` complex samples (`n` must equal the plan frame length).
///
/// # Safety
/// `samples` must hold `2 * n` doubles; `plan` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edarof_modulate(
    plan: *const EdarofPlan,
    samples: *const f64,
    n: usize,
    out: *mut *mut EdarofMultiplex,
) -> EdarofStatus {
    guard(|| {
        let p = &deref(plan, "plan")?.0;
        let x = read_complex(samples, n)?;
        let mux = eda_modulate(&SignalFrame::original(x, 1.0), p)?;
        emit(out, EdarofMultiplex(mux))
    })
}

/// # Safety
/// `mux` must be null or a handle from `edarof_modulate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn edarof_multiplex_free(mux: *mut EdarofMultiplex) {
    if !mux.is_null() {
        drop(Box::from_raw(mux));
    }
}

/// # Safety
/// `mux` must be live and `len` writable.
#[no_mangle]
pub unsafe extern "C" fn edarof_multiplex_len(
    mux: *const EdarofMultiplex,
    len: *mut usize,
) -> EdarofStatus {
    guard(|| {
        let m = &deref(mux, "multiplex")?.0;
        if len.is_null() {
            return Err(null("len"));
        }
        *len = m.samples.len();
        Ok(())
    })
}

/// Copies the multiplexed samples into `out`, which holds `capacity` complex samples.
///
/// # Safety
/// `out` must hold `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn edarof_multiplex_copy(
    mux: *const EdarofMultiplex,
    out: *mut f64,
    capacity: usize,
) -> EdarofStatus {
    guard(|| write_complex(&deref(mux, "multiplex")?.0.samples, out, capacity))
}

/// Replaces the samples (e.g. with a received copy); `n` must match the current length.
///
/// # Safety
/// `mux` must be live and `samples` hold `2 * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn edarof_multiplex_set_samples(
    mux: *mut EdarofMultiplex,
    samples: *const f64,
    n: usize,
) -> EdarofStatus {
    guard(|| {
        let m = mux.as_mut().ok_or_else(|| null("multiplex"))?;
        let x = read_complex(samples, n)?;
        m.0 = m.0.with_samples(x)?;
        Ok(())
    })
}

/// Reconstructs the frame into `out` (`capacity` complex samples, at least the
/// frame length). With `noisy`, digital segments are sliced back onto their lattice.
///
/// # Safety
/// Handles must be live; `out` must hold `2 * capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn edarof_demodulate(
    plan: *const EdarofPlan,
    mux: *const EdarofMultiplex,
    noisy: bool,
    out: *mut f64,
    capacity: usize,
) -> EdarofStatus {
    guard(|| {
        let p = &deref(plan, "plan")?.0;
        let m = &deref(mux, "multiplex")?.0;
        let frame = eda_demodulate(m, p, noisy)?;
        write_complex(&frame.samples, out, capacity)
    })
}

/// Mid-rise Cartesian quantizer with `n_a` levels per axis over `[-full_scale, full_scale]`.
/// `out` may alias `samples`.
///
/// # Safety
/// `samples` and `out` must each hold `2 * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn edarof_quantize_cartesian(
    samples: *const f64,
    n: usize,
    n_a: u32,
    full_scale: f64,
    out: *mut f64,
) -> EdarofStatus {
    guard(|| {
        let x = read_complex(samples, n)?;
        let q = quantize_cartesian(&x, &QuantizerSpec::cartesian(n_a, full_scale))?;
        write_complex(&q, out, n)
    })
}

/// One end-to-end link run at `inv_eta` with master seed `seed`.
/// `config_toml` is a configuration document, or null for the defaults.
///
/// # Safety
/// `config_toml` must be null or a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn edarof_run_single(
    config_toml: *const c_char,
    inv_eta: f64,
    seed: u64,
    out: *mut EdarofRecord,
) -> EdarofStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = if config_toml.is_null() {
            RunConfig::default()
        } else {
            let text = CStr::from_ptr(config_toml).to_str().map_err(|e| {
                Failure(
                    EdarofStatus::InvalidArgument,
                    format!("config is not UTF-8: {e}"),
                )
            })?;
            RunConfig::from_toml_str(text)?
        };
        cfg.seed = seed;
        cfg.validate()?;
        if !(inv_eta >= 1.0 && inv_eta.is_finite()) {
            return Err(Failure(
                EdarofStatus::InvalidArgument,
                format!("inv_eta {inv_eta} must be >= 1"),
            ));
        }
        let r = run_single(&cfg, inv_eta)?;
        *out = EdarofRecord {
            inv_eta: r.inv_eta,
            order_m: r.order_m,
            n_p: r.n_p,
            n_r: r.n_r,
            snr_db: r.snr_db,
            evm_pct: r.evm_pct,
            seed: r.seed,
        };
        Ok(())
    })
}
