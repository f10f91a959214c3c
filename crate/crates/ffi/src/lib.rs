//! C ABI over `ffpinn`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns an
//! [`FfpinnStatus`] and, on failure, stores a message retrievable with
//! [`ffpinn_last_error_message`] on the same thread. Strings handed out as
//! `char *` are released with [`ffpinn_string_free`]; `const char *`
//! results are borrowed from their handle.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ffpinn::experiments::{self, ExperimentConfig, ExperimentRecord, RunStatus, Task};
use ffpinn::networks::{init_params, Network};
use ffpinn::ntk::ntk_matrix;
use ffpinn::numerics::RngStream;
use ffpinn::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfpinnStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// Invalid configuration or argument (bad JSON, unknown key, wrong
    /// buffer length, non-UTF-8 string, size over a cap).
    Validation = 2,
    /// Non-finite loss, overflow, solver blow-up and similar.
    Numerical = 3,
    /// File system or serialization failure.
    Io = 4,
    /// A Rust panic was caught at the boundary.
    Panic = 5,
    /// Lookup of an unknown name.
    NotFound = 6,
    /// Anything else.
    Internal = 7,
}

/// A parsed experiment configuration.
pub struct FfpinnConfig {
    inner: ExperimentConfig,
}

/// The record of a finished run.
pub struct FfpinnRecord {
    inner: ExperimentRecord,
    names: Vec<CString>,
}

/// A network with its parameters.
pub struct FfpinnNetwork {
    net: Network,
    theta: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Null(&'static str),
    Arg(String),
    NotFound(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn status_of(e: &Error) -> FfpinnStatus {
    match e {
        e if e.is_numerical() => FfpinnStatus::Numerical,
        Error::Validation(_)
        | Error::SchemaVersion { .. }
        | Error::TooLarge { .. }
        | Error::Shape(_)
        | Error::Index { .. }
        | Error::Parameter(_) => FfpinnStatus::Validation,
        Error::Io(_) | Error::Json(_) | Error::Format { .. } => FfpinnStatus::Io,
        _ => FfpinnStatus::Internal,
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> FfpinnStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FfpinnStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("{what} is NULL"));
            FfpinnStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_last_error(msg);
            FfpinnStatus::Validation
        }
        Ok(Err(Fail::NotFound(msg))) => {
            set_last_error(msg);
            FfpinnStatus::NotFound
        }
        Ok(Err(Fail::Core(e))) => {
            let s = status_of(&e);
            set_last_error(match &e {
                Error::Validation(items) => format!("invalid configuration: {}", items.join("; ")),
                e => e.to_string(),
            });
            s
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FfpinnStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Arg(format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut *mut T, what: &'static str) -> Result<&'a mut *mut T, Fail> {
    let slot = p.as_mut().ok_or(Fail::Null(what))?;
    *slot = ptr::null_mut();
    Ok(slot)
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior NUL").into_raw()
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_out<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_len(what: &str, got: usize, need: usize) -> Result<(), Fail> {
    if got == need {
        Ok(())
    } else {
        Err(Fail::Arg(format!("{what}: length {got}, expected {need}")))
    }
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ffpinn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ffpinn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned through a `char **` out-parameter. NULL is a
/// no-op.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Newline-separated benchmark ids.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_benchmark_list(out: *mut *mut c_char) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = owned_string(experiments::list());
        Ok(())
    })
}

/// Equation and default scales of a benchmark.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_benchmark_describe(id: *const c_char, out: *mut *mut c_char) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let id = str_arg(id, "id")?;
        *out = owned_string(experiments::describe(id)?);
        Ok(())
    })
}

/// Parses a JSON configuration. Validation happens when it is run; call
/// [`ffpinn_config_validate`] to check earlier.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_from_json(json: *const c_char, out: *mut *mut FfpinnConfig) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = ExperimentConfig::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(FfpinnConfig { inner: cfg }));
        Ok(())
    })
}

/// Loads one of the built-in presets.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_from_preset(name: *const c_char, out: *mut *mut FfpinnConfig) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = experiments::preset(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(FfpinnConfig { inner: cfg }));
        Ok(())
    })
}

/// Sets the experiment and training seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_set_seed(config: *mut FfpinnConfig, seed: u64) -> FfpinnStatus {
    guard(|| {
        let c = mut_arg(config, "config")?;
        c.inner = c.inner.clone().with_seed(seed);
        Ok(())
    })
}

/// Sets the number of training iterations (PINN tasks) or epochs
/// (regression).
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_set_iterations(config: *mut FfpinnConfig, iterations: u64) -> FfpinnStatus {
    guard(|| {
        let c = mut_arg(config, "config")?;
        match c.inner.task {
            Task::Pinn => match &mut c.inner.training {
                Some(t) => t.iterations = iterations,
                None => return Err(Fail::Arg("config has no training section".into())),
            },
            Task::Regression => match &mut c.inner.regression {
                Some(r) => {
                    r.epochs = usize::try_from(iterations).map_err(|_| Fail::Arg("iterations: too large".into()))?
                }
                None => return Err(Fail::Arg("config has no regression section".into())),
            },
            _ => return Err(Fail::Arg("task has no iteration count".into())),
        }
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_validate(config: *const FfpinnConfig) -> FfpinnStatus {
    guard(|| {
        ref_arg(config, "config")?.inner.validate()?;
        Ok(())
    })
}

/// Canonical JSON of the configuration.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_to_json(config: *const FfpinnConfig, out: *mut *mut c_char) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = owned_string(ref_arg(config, "config")?.inner.to_json());
        Ok(())
    })
}

/// NULL is a no-op.
///
/// # Safety
/// `config` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_config_free(config: *mut FfpinnConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured task, writing artifacts into `out_dir`. A run that
/// aborts on a numerical failure still yields a record, with
/// [`ffpinn_record_succeeded`] false.
///
/// # Safety
/// `config` must be a live handle, `out_dir` a NUL-terminated string and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_run(
    config: *const FfpinnConfig,
    out_dir: *const c_char,
    out: *mut *mut FfpinnRecord,
) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = ref_arg(config, "config")?;
        let dir = str_arg(out_dir, "out_dir")?;
        let rec = experiments::run(&cfg.inner, Path::new(dir), None)?;
        let names = rec
            .metrics
            .keys()
            .map(|k| CString::new(k.as_str()).expect("metric names have no NUL"))
            .collect();
        *out = Box::into_raw(Box::new(FfpinnRecord { inner: rec, names }));
        Ok(())
    })
}

/// False for a failed run or a NULL handle.
///
/// # Safety
/// `record` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_succeeded(record: *const FfpinnRecord) -> bool {
    record.as_ref().is_some_and(|r| r.inner.status == RunStatus::Ok)
}

/// # Safety
/// `record` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_metric(
    record: *const FfpinnRecord,
    name: *const c_char,
    out: *mut f64,
) -> FfpinnStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        let rec = ref_arg(record, "record")?;
        let name = str_arg(name, "name")?;
        *out = *rec
            .inner
            .metrics
            .get(name)
            .ok_or_else(|| Fail::NotFound(format!("no metric `{name}`")))?;
        Ok(())
    })
}

/// Number of metrics; 0 for NULL.
///
/// # Safety
/// `record` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_metric_count(record: *const FfpinnRecord) -> usize {
    record.as_ref().map_or(0, |r| r.names.len())
}

/// Name of metric `index` in sorted order, borrowed from the record.
///
/// # Safety
/// `record` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_metric_name(
    record: *const FfpinnRecord,
    index: usize,
    out: *mut *const c_char,
) -> FfpinnStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        *out = ptr::null();
        let rec = ref_arg(record, "record")?;
        let name = rec
            .names
            .get(index)
            .ok_or_else(|| Fail::NotFound(format!("metric index {index} out of range")))?;
        *out = name.as_ptr();
        Ok(())
    })
}

/// The record as written to `record.json`.
///
/// # Safety
/// `record` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_to_json(record: *const FfpinnRecord, out: *mut *mut c_char) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rec = ref_arg(record, "record")?;
        let text = serde_json::to_string_pretty(&rec.inner).map_err(Error::from)?;
        *out = owned_string(text);
        Ok(())
    })
}

/// NULL is a no-op.
///
/// # Safety
/// `record` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_record_free(record: *mut FfpinnRecord) {
    if !record.is_null() {
        drop(Box::from_raw(record));
    }
}

/// Builds the configured architecture and initializes it from the config
/// seed, the same way a run does. PINN configs take their dimensions from
/// the benchmark; other tasks build a scalar network of one input.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_new(config: *const FfpinnConfig, out: *mut *mut FfpinnNetwork) -> FfpinnStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cfg = &ref_arg(config, "config")?.inner;
        let arch = cfg
            .architecture
            .as_ref()
            .ok_or_else(|| Fail::Core(Error::Validation(vec!["architecture: missing".into()])))?;
        let problems = arch.problems();
        if !problems.is_empty() {
            return Err(Error::Validation(problems).into());
        }
        let (input, output, spatial) = match cfg.task {
            Task::Pinn => {
                let b = cfg.benchmark()?;
                (b.input_dim(), b.output_dim(), b.spatial_dims())
            }
            _ => (1, 1, 1),
        };
        let root = RngStream::new(cfg.seed);
        let net = arch.build(input, output, spatial, &mut root.substream("features"))?;
        let theta = init_params(&net, &mut root.substream("init")).into_vec();
        *out = Box::into_raw(Box::new(FfpinnNetwork { net, theta }));
        Ok(())
    })
}

/// Any of the out pointers may be NULL.
///
/// # Safety
/// `network` must be a live handle; non-NULL out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_dims(
    network: *const FfpinnNetwork,
    input_dim: *mut usize,
    output_dim: *mut usize,
    n_params: *mut usize,
) -> FfpinnStatus {
    guard(|| {
        let n = ref_arg(network, "network")?;
        for (p, v) in [
            (input_dim, n.net.input_dim()),
            (output_dim, n.net.output_dim()),
            (n_params, n.theta.len()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the parameters into `out`, which must hold exactly `n_params`.
///
/// # Safety
/// `network` must be a live handle and `out` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_get_params(network: *const FfpinnNetwork, out: *mut f64, len: usize) -> FfpinnStatus {
    guard(|| {
        let n = ref_arg(network, "network")?;
        check_len("params", len, n.theta.len())?;
        slice_out(out, len, "out")?.copy_from_slice(&n.theta);
        Ok(())
    })
}

/// Replaces the parameters; `len` must equal `n_params`.
///
/// # Safety
/// `network` must be a live handle and `params` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_set_params(
    network: *mut FfpinnNetwork,
    params: *const f64,
    len: usize,
) -> FfpinnStatus {
    guard(|| {
        let n = mut_arg(network, "network")?;
        check_len("params", len, n.theta.len())?;
        let src = slice_arg(params, len, "params")?;
        if src.iter().any(|v| !v.is_finite()) {
            return Err(Fail::Arg("params: non-finite value".into()));
        }
        n.theta.copy_from_slice(src);
        Ok(())
    })
}

/// Evaluates the network at `n_points` row-major points of `input_dim`
/// coordinates; `out` receives `n_points * output_dim` values.
///
/// # Safety
/// `points` must hold `n_points * input_dim` doubles and `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_predict(
    network: *const FfpinnNetwork,
    points: *const f64,
    n_points: usize,
    out: *mut f64,
    out_len: usize,
) -> FfpinnStatus {
    guard(|| {
        let n = ref_arg(network, "network")?;
        check_len("out", out_len, n_points * n.net.output_dim())?;
        let pts = slice_arg(points, n_points * n.net.input_dim(), "points")?;
        let pred = n.net.predict(&n.theta, pts)?;
        slice_out(out, out_len, "out")?.copy_from_slice(&pred);
        Ok(())
    })
}

/// Empirical NTK Gram matrix of the first output at `n_points` points,
/// row-major `n_points × n_points` into `out`. At most 1024 points.
///
/// # Safety
/// `points` must hold `n_points * input_dim` doubles and `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_ntk(
    network: *const FfpinnNetwork,
    points: *const f64,
    n_points: usize,
    out: *mut f64,
    out_len: usize,
) -> FfpinnStatus {
    guard(|| {
        let n = ref_arg(network, "network")?;
        check_len("out", out_len, n_points.saturating_mul(n_points))?;
        let pts = slice_arg(points, n_points * n.net.input_dim(), "points")?;
        let k = ntk_matrix(&n.net, &n.theta, pts)?;
        slice_out(out, out_len, "out")?.copy_from_slice(k.data());
        Ok(())
    })
}

/// NULL is a no-op.
///
/// # Safety
/// `network` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ffpinn_network_free(network: *mut FfpinnNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}
