//! C ABI over the `iacsit` library.
//!
//! Configurations and allocations are opaque heap handles released with
//! their `_free` function. Every call returns an [`IacsitStatus`]; on
//! failure [`iacsit_last_error`] describes the most recent error on the
//! calling thread. Strings returned through `char **` out-parameters are
//! owned by the caller and released with [`iacsit_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use iacsit::allocation::{complete_size, AllocationReport, MaskScope, RemovalMode};
use iacsit::channel::{AntennaConfig, ChannelMatrix};
use iacsit::cli::PrecodeOutput;
use iacsit::feasibility::{self, Classification};
use iacsit::precoding::{distributed_precode, SolverOptions};
use iacsit::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IacsitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    /// The configuration is infeasible for the requested operation.
    Infeasible = 5,
    /// Guard or invariant failure inside the library.
    Internal = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IacsitClassification {
    Infeasible = 0,
    Tight = 1,
    Super = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IacsitRemovalMode {
    Heuristic = 0,
    Exhaustive = 1,
}

/// Parsed antenna configuration.
pub struct IacsitConfig(AntennaConfig);

/// CSIT allocation together with its antenna-removal plan.
pub struct IacsitAllocation(AllocationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IacsitStatus {
    match e {
        Error::Parse { .. } => IacsitStatus::Parse,
        Error::NotTight(_) | Error::NotSuper(_) | Error::Infeasible(_) => IacsitStatus::Infeasible,
        e if e.is_internal() => IacsitStatus::Internal,
        _ => IacsitStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (IacsitStatus, String)>) -> IacsitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IacsitStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside iacsit".into());
            IacsitStatus::Panic
        }
    }
}

fn lib<T>(r: iacsit::Result<T>) -> Result<T, (IacsitStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (IacsitStatus, String) {
    (IacsitStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (IacsitStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), (IacsitStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no nul bytes").into_raw()
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn iacsit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version and RNG identifier as a static string.
#[no_mangle]
pub extern "C" fn iacsit_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(iacsit::cli::version_line()).expect("no nul"))
        .as_ptr()
}

/// Parses `[(N,M).(N,M)...]` notation, with `^k` repetition.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_config_parse(text: *const c_char, out: *mut *mut IacsitConfig) -> IacsitStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (IacsitStatus::InvalidUtf8, e.to_string()))?;
        let config: AntennaConfig = lib(s.parse())?;
        write(out, Box::into_raw(Box::new(IacsitConfig(config))), "out")
    })
}

/// # Safety
/// `config` must come from [`iacsit_config_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn iacsit_config_free(config: *mut IacsitConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_config_users(config: *const IacsitConfig, out: *mut usize) -> IacsitStatus {
    guard(|| write(out, deref(config, "config")?.0.users(), "out"))
}

/// Classifies the configuration with the polynomial tester.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_feasibility(
    config: *const IacsitConfig,
    out: *mut IacsitClassification,
) -> IacsitStatus {
    guard(|| {
        let c = match feasibility::is_feasible(&deref(config, "config")?.0).classification {
            Classification::Infeasible => IacsitClassification::Infeasible,
            Classification::Tight => IacsitClassification::Tight,
            Classification::Super => IacsitClassification::Super,
        };
        write(out, c, "out")
    })
}

/// Number of cross-link coefficients shared under complete CSIT.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_complete_size(config: *const IacsitConfig, out: *mut usize) -> IacsitStatus {
    guard(|| write(out, complete_size(&deref(config, "config")?.0), "out"))
}

/// Computes the incomplete CSIT allocation of a feasible configuration,
/// removing antennas first when it is super-feasible. `mode` is an
/// [`IacsitRemovalMode`] value.
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_allocate(
    config: *const IacsitConfig,
    mode: u32,
    out: *mut *mut IacsitAllocation,
) -> IacsitStatus {
    guard(|| {
        let config = &deref(config, "config")?.0;
        let mode = match mode {
            m if m == IacsitRemovalMode::Heuristic as u32 => RemovalMode::Heuristic,
            m if m == IacsitRemovalMode::Exhaustive as u32 => RemovalMode::Exhaustive,
            m => return Err((IacsitStatus::InvalidArgument, format!("unknown removal mode {m}"))),
        };
        let report = lib(AllocationReport::build(config, mode))?;
        write(out, Box::into_raw(Box::new(IacsitAllocation(report))), "out")
    })
}

/// # Safety
/// `alloc` must come from [`iacsit_allocate`] or be null.
#[no_mangle]
pub unsafe extern "C" fn iacsit_allocation_free(alloc: *mut IacsitAllocation) {
    if !alloc.is_null() {
        drop(Box::from_raw(alloc));
    }
}

/// Number of coefficients the allocation shares.
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_allocation_size(alloc: *const IacsitAllocation, out: *mut usize) -> IacsitStatus {
    guard(|| write(out, deref(alloc, "alloc")?.0.size, "out"))
}

/// Mask of transmitter `tx` (0-based) as bitsets over users: bit `i` of
/// `rx_set` is receiver `i`. `complete` is set for a full-CSIT mask, in
/// which case both sets cover every user.
///
/// # Safety
/// `alloc` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_allocation_mask(
    alloc: *const IacsitAllocation,
    tx: usize,
    rx_set: *mut u32,
    tx_set: *mut u32,
    complete: *mut bool,
) -> IacsitStatus {
    guard(|| {
        let report = &deref(alloc, "alloc")?.0;
        let k = report.config.users();
        let mask = report.masks.masks().get(tx).ok_or_else(|| {
            (
                IacsitStatus::InvalidArgument,
                format!("transmitter {tx} out of range for {k} users"),
            )
        })?;
        let s = mask.subic(k);
        write(rx_set, s.rx_mask(), "rx_set")?;
        write(tx_set, s.tx_mask(), "tx_set")?;
        write(complete, matches!(mask.scope, MaskScope::Complete), "complete")
    })
}

/// The allocation report as JSON, identical to `iacsit allocate --json`.
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_allocation_to_json(
    alloc: *const IacsitAllocation,
    out: *mut *mut c_char,
) -> IacsitStatus {
    guard(|| {
        let json = lib(serde_json::to_string(&deref(alloc, "alloc")?.0).map_err(Error::from))?;
        write(out, to_c_string(json), "out")
    })
}

/// Draws the channel from `seed`, runs distributed precoding under the
/// allocation and returns the result as JSON (the `iacsit precode --json`
/// document). Pass `tolerance <= 0` or `max_iterations == 0` for defaults.
///
/// # Safety
/// `alloc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn iacsit_precode_json(
    alloc: *const IacsitAllocation,
    seed: u64,
    tolerance: f64,
    max_iterations: u32,
    out: *mut *mut c_char,
) -> IacsitStatus {
    guard(|| {
        let report = &deref(alloc, "alloc")?.0;
        let defaults = SolverOptions::default();
        let opts = SolverOptions {
            tolerance: if tolerance > 0.0 { tolerance } else { defaults.tolerance },
            max_iterations: if max_iterations > 0 {
                max_iterations as usize
            } else {
                defaults.max_iterations
            },
            init_seed: seed,
        };
        lib(opts.validate())?;
        let config = &report.config;
        let h = ChannelMatrix::draw(config, seed);
        let plan = (report.plan.removed() > 0).then_some(&report.plan);
        let d = lib(distributed_precode(config, &report.masks, plan, &h, &opts))?;
        let output = PrecodeOutput {
            config,
            seed,
            solver: opts,
            allocation: report,
            converged: d.all_solves_converged(),
            leakage: d.leakage,
            replication_consistent: d.replication_consistent(),
            beamformers: &d.beamformers,
            solves: &d.solves,
        };
        let json = lib(serde_json::to_string(&output).map_err(Error::from))?;
        write(out, to_c_string(json), "out")
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn iacsit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
