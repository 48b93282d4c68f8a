//! C ABI over `retcache`.
//!
//! Handles are opaque and owned by the caller once returned; release them with
//! the matching `*_free` function. Every fallible call returns an
//! [`RcStatus`]. On failure a description is kept per thread and can be read
//! with [`retcache_last_error_message`] until the next failing call on that
//! thread. Output pointers are written only on success.
//!
//! Plan matrices are exposed row-major: entry `(c, t)` sits at index
//! `c * num_slots + t`, content and slot indices zero-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use retcache::oracle::global_search_size;
use retcache::{
    brute_force_global, build_z_table, emit_report, load_config, popular_plan, random_plan,
    simulate, solve, ContactMode, DemandMatrix, Error, PlanReport, Scenario, ScenarioConfig,
    SimConfig,
};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    SearchSpaceTooLarge = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Contact model for [`retcache_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcContactMode {
    Bernoulli = 0,
    PoissonCount = 1,
}

/// Monte Carlo summary. `z_score` is NaN when `standard_error` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RcSimResult {
    pub trials: u64,
    pub seed: u64,
    pub empirical_download_cost: f64,
    pub standard_error: f64,
    pub analytic_download_cost: f64,
    pub analytic_storage_cost: f64,
    pub z_score: f64,
}

/// A validated scenario with its demand.
pub struct RcScenario {
    config: ScenarioConfig,
    scenario: Scenario,
    demand: DemandMatrix,
}

/// A caching plan with its cost report.
pub struct RcPlan {
    report: PlanReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> RcStatus {
    match err {
        Error::Parse(_) => RcStatus::Parse,
        Error::Validation(_) => RcStatus::Validation,
        Error::Domain(_) => RcStatus::Domain,
        Error::SearchSpaceTooLarge { .. } => RcStatus::SearchSpaceTooLarge,
        Error::Io(_) => RcStatus::Io,
    }
}

/// Runs `body`, converting errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), (RcStatus, String)>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside retcache");
            RcStatus::Panic
        }
    }
}

fn lib_err(err: Error) -> (RcStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (RcStatus, String) {
    (RcStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (RcStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), (RcStatus, String)> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn scenario_from(config: ScenarioConfig) -> Result<RcScenario, (RcStatus, String)> {
    let (scenario, demand) = config.build().map_err(lib_err)?;
    Ok(RcScenario {
        config,
        scenario,
        demand,
    })
}

/// Scenario with every parameter at its default.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn retcache_scenario_default(out: *mut *mut RcScenario) -> RcStatus {
    guard(|| {
        let handle = scenario_from(ScenarioConfig::default())?;
        write_out(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Scenario parsed from a JSON config.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writing one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn retcache_scenario_from_json(
    json: *const c_char,
    out: *mut *mut RcScenario,
) -> RcStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (RcStatus::InvalidUtf8, e.to_string()))?;
        let config = load_config(text).map_err(lib_err)?;
        let handle = scenario_from(config)?;
        write_out(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// # Safety
/// `scenario` must come from this library and not be used afterwards. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn retcache_scenario_free(scenario: *mut RcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Library size, horizon, fleet size and per-slot capacity. Any output
/// pointer may be null.
///
/// # Safety
/// `scenario` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_scenario_dims(
    scenario: *const RcScenario,
    num_contents: *mut usize,
    num_slots: *mut usize,
    num_helpers: *mut u32,
    total_capacity: *mut u32,
) -> RcStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.scenario;
        if !num_contents.is_null() {
            num_contents.write(s.num_contents);
        }
        if !num_slots.is_null() {
            num_slots.write(s.num_slots);
        }
        if !num_helpers.is_null() {
            num_helpers.write(s.num_helpers);
        }
        if !total_capacity.is_null() {
            total_capacity.write(s.total_capacity());
        }
        Ok(())
    })
}

enum Planner {
    Optimal,
    Popular,
    Random(u64),
}

unsafe fn make_plan(
    scenario: *const RcScenario,
    planner: Planner,
    out: *mut *mut RcPlan,
) -> RcStatus {
    guard(|| {
        let handle = deref(scenario, "scenario")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (s, d) = (&handle.scenario, &handle.demand);
        let z = build_z_table(s, d).map_err(lib_err)?;
        let report = match planner {
            Planner::Optimal => {
                let plan = solve(&z, s).map_err(lib_err)?.plan;
                PlanReport::new("dp", plan, &handle.config)
            }
            Planner::Popular => popular_plan(&z, s, d)
                .and_then(|p| PlanReport::new("popular", p, &handle.config)),
            Planner::Random(seed) => random_plan(&z, s, d, seed).and_then(|p| {
                let mut r = PlanReport::new("random", p, &handle.config)?;
                r.seed = Some(seed);
                r.rng_algorithm = Some(retcache::RNG_ALGORITHM.to_string());
                Ok(r)
            }),
        }
        .map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(RcPlan { report })), "out")
    })
}

/// Globally optimal plan.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_optimal(
    scenario: *const RcScenario,
    out: *mut *mut RcPlan,
) -> RcStatus {
    make_plan(scenario, Planner::Optimal, out)
}

/// Popular-caching baseline plan.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_popular(
    scenario: *const RcScenario,
    out: *mut *mut RcPlan,
) -> RcStatus {
    make_plan(scenario, Planner::Popular, out)
}

/// Random-caching baseline plan for `seed`.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_random(
    scenario: *const RcScenario,
    seed: u64,
    out: *mut *mut RcPlan,
) -> RcStatus {
    make_plan(scenario, Planner::Random(seed), out)
}

/// # Safety
/// `plan` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_free(plan: *mut RcPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Total cost and its download and storage parts.
///
/// # Safety
/// `plan` must be a live handle; all three outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_costs(
    plan: *const RcPlan,
    total: *mut f64,
    download: *mut f64,
    storage: *mut f64,
) -> RcStatus {
    guard(|| {
        let r = &deref(plan, "plan")?.report;
        if total.is_null() || download.is_null() || storage.is_null() {
            return Err(null("cost output"));
        }
        total.write(r.total_cost);
        download.write(r.download_cost);
        storage.write(r.storage_cost);
        Ok(())
    })
}

/// # Safety
/// `plan` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_dims(
    plan: *const RcPlan,
    num_contents: *mut usize,
    num_slots: *mut usize,
) -> RcStatus {
    guard(|| {
        let p = &deref(plan, "plan")?.report.plan;
        if num_contents.is_null() || num_slots.is_null() {
            return Err(null("dimension output"));
        }
        num_contents.write(p.num_contents());
        num_slots.write(p.num_slots());
        Ok(())
    })
}

/// Copies the helper-count matrix row-major into `buffer`, which must hold
/// at least `num_contents * num_slots` entries.
///
/// # Safety
/// `plan` must be a live handle and `buffer` writable for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_copy_matrix(
    plan: *const RcPlan,
    buffer: *mut u32,
    len: usize,
) -> RcStatus {
    guard(|| {
        let p = &deref(plan, "plan")?.report.plan;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let needed = p.num_contents() * p.num_slots();
        if len < needed {
            return Err((
                RcStatus::BufferTooSmall,
                format!("buffer holds {len} entries, plan needs {needed}"),
            ));
        }
        let dst = std::slice::from_raw_parts_mut(buffer, needed);
        for (chunk, row) in dst.chunks_mut(p.num_slots().max(1)).zip(p.rows()) {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// Full JSON report. Release the string with [`retcache_string_free`].
///
/// # Safety
/// `plan` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_plan_report_json(
    plan: *const RcPlan,
    out: *mut *mut c_char,
) -> RcStatus {
    guard(|| {
        let r = &deref(plan, "plan")?.report;
        let text = CString::new(emit_report(r)).map_err(|e| (RcStatus::Panic, e.to_string()))?;
        write_out(out, text.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn retcache_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Monte Carlo estimate of the plan's download cost under the scenario.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_simulate(
    scenario: *const RcScenario,
    plan: *const RcPlan,
    trials: u64,
    seed: u64,
    mode: RcContactMode,
    out: *mut RcSimResult,
) -> RcStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        let p = deref(plan, "plan")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let result = simulate(&SimConfig {
            scenario: &s.scenario,
            demand: &s.demand,
            plan: &p.report.plan,
            trials,
            seed,
            mode: match mode {
                RcContactMode::Bernoulli => ContactMode::Bernoulli,
                RcContactMode::PoissonCount => ContactMode::PoissonCount,
            },
        })
        .map_err(lib_err)?;
        out.write(RcSimResult {
            trials: result.trials,
            seed: result.seed,
            empirical_download_cost: result.empirical_download_cost,
            standard_error: result.standard_error,
            analytic_download_cost: result.analytic_download_cost,
            analytic_storage_cost: result.analytic_storage_cost,
            z_score: result.z_score.unwrap_or(f64::NAN),
        });
        Ok(())
    })
}

/// Optimal cost from the planner and from exhaustive search. Returns
/// `SEARCH_SPACE_TOO_LARGE` when the instance is beyond the oracle's limit.
///
/// # Safety
/// `scenario` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn retcache_verify(
    scenario: *const RcScenario,
    dp_cost: *mut f64,
    oracle_cost: *mut f64,
) -> RcStatus {
    guard(|| {
        let s = deref(scenario, "scenario")?;
        if dp_cost.is_null() || oracle_cost.is_null() {
            return Err(null("cost output"));
        }
        let (_, oracle) = brute_force_global(&s.scenario, &s.demand).map_err(|e| {
            let msg = format!("{e} (space {})", global_search_size(&s.scenario));
            (status_of(&e), msg)
        })?;
        let z = build_z_table(&s.scenario, &s.demand).map_err(lib_err)?;
        let dp = solve(&z, &s.scenario).map_err(lib_err)?;
        dp_cost.write(dp.allocation.optimal_cost);
        oracle_cost.write(oracle);
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn retcache_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code; do not free.
#[no_mangle]
pub extern "C" fn retcache_status_name(status: RcStatus) -> *const c_char {
    let name: &'static CStr = match status {
        RcStatus::Ok => c"ok",
        RcStatus::NullPointer => c"null pointer",
        RcStatus::InvalidUtf8 => c"invalid utf-8",
        RcStatus::Parse => c"parse error",
        RcStatus::Validation => c"validation error",
        RcStatus::Domain => c"domain error",
        RcStatus::SearchSpaceTooLarge => c"search space too large",
        RcStatus::Io => c"i/o error",
        RcStatus::BufferTooSmall => c"buffer too small",
        RcStatus::Panic => c"internal panic",
    };
    name.as_ptr()
}
