//! C ABI over the refarray simulator.
//!
//! Scenarios are opaque heap handles created by [`ra_scenario_new`] and
//! released with [`ra_scenario_free`]. Every fallible call returns an
//! [`RaStatus`]; on failure a description is available from
//! [`ra_last_error`] on the same thread until the next failing call.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use refarray::optimizer::{PhaseMethod, PhaseSearchConfig};
use refarray::{
    ArrayLayout, Deployment, Error, LinkParams, Objective, PhaseVector, Point2D, Room, Scenario,
    WallNormal,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGeometry = 3,
    Infeasible = 4,
    /// The capacity bound's denominator is not positive.
    BoundInvalid = 5,
    BudgetExceeded = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RaPoint {
    pub x: f64,
    pub y: f64,
}

/// Linear link constants; powers in milliwatts.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RaLinkParams {
    pub carrier_hz: f64,
    pub path_loss_exponent: f64,
    pub tx_power_mw: f64,
    pub noise_power_mw: f64,
    pub sinr_threshold: f64,
    pub rate_bps: f64,
}

/// Wall normal codes: 0 = +x, 1 = -x, 2 = +y, 3 = -y.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RaArrayLayout {
    pub center: RaPoint,
    pub wall_normal: u32,
    pub element_count: usize,
    pub element_spacing: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaObjective {
    /// Feasibility-gated transport capacity.
    TransportCapacity = 0,
    MinSinr = 1,
    /// SINR of the link given by `link`.
    SingleLinkSinr = 2,
}

/// Opaque scenario handle.
pub struct RaScenario {
    inner: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RaStatus {
    match e {
        Error::InvalidRoom(_)
        | Error::LayoutInvalid(_)
        | Error::DegenerateGeometry(_)
        | Error::InvalidDeployment(_) => RaStatus::InvalidGeometry,
        Error::Infeasible(_) => RaStatus::Infeasible,
        Error::BoundInvalid { .. } => RaStatus::BoundInvalid,
        Error::BudgetExceeded(_) => RaStatus::BudgetExceeded,
        _ => RaStatus::InvalidArgument,
    }
}

struct Fail(RaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RaStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RaStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RaStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn link_params(p: &RaLinkParams) -> Result<LinkParams, Fail> {
    Ok(LinkParams::new(
        p.carrier_hz,
        p.path_loss_exponent,
        p.tx_power_mw,
        p.noise_power_mw,
        p.sinr_threshold,
        p.rate_bps,
    )?)
}

fn wall(code: u32) -> Result<WallNormal, Fail> {
    Ok(match code {
        0 => WallNormal::PosX,
        1 => WallNormal::NegX,
        2 => WallNormal::PosY,
        3 => WallNormal::NegY,
        other => {
            return Err(Fail(
                RaStatus::InvalidArgument,
                format!("unknown wall normal code {other}"),
            ))
        }
    })
}

/// Builds a scenario. Positions must be grid points of the room.
///
/// # Safety
/// `layouts` must point to `n_layouts` values (or be null when zero); `tx` and
/// `rx` must each point to `pairs` points; `params` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ra_scenario_new(
    edge_length: f64,
    grid_divisions: u32,
    layouts: *const RaArrayLayout,
    n_layouts: usize,
    tx: *const RaPoint,
    rx: *const RaPoint,
    pairs: usize,
    params: *const RaLinkParams,
    out: *mut *mut RaScenario,
) -> RaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let params = link_params(params.as_ref().ok_or_else(|| null("params"))?)?;
        let room = Room::new(edge_length, grid_divisions)?;
        let layouts = slice(layouts, n_layouts, "layouts")?
            .iter()
            .map(|l| {
                Ok(ArrayLayout::new(
                    Point2D::new(l.center.x, l.center.y),
                    wall(l.wall_normal)?,
                    l.element_count,
                    l.element_spacing,
                )?)
            })
            .collect::<Result<Vec<_>, Fail>>()?;
        let points = |p: *const RaPoint, what: &str| -> Result<Vec<Point2D>, Fail> {
            Ok(slice(p, pairs, what)?
                .iter()
                .map(|p| Point2D::new(p.x, p.y))
                .collect())
        };
        let deployment = Deployment::new(points(tx, "tx")?, points(rx, "rx")?)?;
        let inner = Scenario::new(room, layouts, deployment, params)?;
        *out = Box::into_raw(Box::new(RaScenario { inner }));
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `scenario` must come from [`ra_scenario_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ra_scenario_free(scenario: *mut RaScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of links, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_scenario_pairs(scenario: *const RaScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.pairs())
}

/// Pooled reflector element count, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_scenario_element_count(scenario: *const RaScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.element_count())
}

unsafe fn handle<'a>(s: *const RaScenario) -> Result<&'a Scenario, Fail> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("scenario"))
}

unsafe fn phase_vector(phases: *const f64, n: usize) -> Result<PhaseVector, Fail> {
    Ok(PhaseVector::new(slice(phases, n, "phases")?.to_vec())?)
}

/// Linear SINR of zero-based link `link` under the given element phases.
///
/// # Safety
/// `phases` must point to `n_phases` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_sinr(
    scenario: *const RaScenario,
    phases: *const f64,
    n_phases: usize,
    link: usize,
    out: *mut f64,
) -> RaStatus {
    guard(|| {
        let s = handle(scenario)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = refarray::sinr(s, &phase_vector(phases, n_phases)?, link)?;
        Ok(())
    })
}

/// Transport capacity (0 unless every link is feasible) and the feasibility flag.
///
/// # Safety
/// `phases` must point to `n_phases` values; `capacity` and `feasible` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_transport_capacity(
    scenario: *const RaScenario,
    phases: *const f64,
    n_phases: usize,
    capacity: *mut f64,
    feasible: *mut bool,
) -> RaStatus {
    guard(|| {
        let s = handle(scenario)?;
        let capacity = capacity.as_mut().ok_or_else(|| null("capacity"))?;
        let feasible = feasible.as_mut().ok_or_else(|| null("feasible"))?;
        let report = refarray::transport_capacity(s, &phase_vector(phases, n_phases)?)?;
        *capacity = report.transport_capacity;
        *feasible = report.feasible;
        Ok(())
    })
}

/// Closed-form capacity bound. Returns `RA_STATUS_BOUND_INVALID` and leaves
/// `out` untouched when the bound is vacuous.
///
/// # Safety
/// `params` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ra_upper_bound(
    params: *const RaLinkParams,
    pairs: usize,
    elements: usize,
    d_min: f64,
    d_max: f64,
    out: *mut f64,
) -> RaStatus {
    guard(|| {
        let p = link_params(params.as_ref().ok_or_else(|| null("params"))?)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = refarray::upper_bound(&p, pairs, elements, d_min, d_max)?;
        Ok(())
    })
}

/// Coordinate ascent over a phase grid of step `phase_step` radians.
///
/// Writes the element phases into `out_phases` (capacity `n_out`, which must
/// equal the element count) and the objective value into `value`.
///
/// # Safety
/// `out_phases` must point to `n_out` writable values and `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ra_optimize_phases(
    scenario: *const RaScenario,
    objective: RaObjective,
    link: usize,
    phase_step: f64,
    max_sweeps: usize,
    out_phases: *mut f64,
    n_out: usize,
    value: *mut f64,
) -> RaStatus {
    guard(|| {
        let s = handle(scenario)?;
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        if n_out != s.element_count() {
            return Err(Fail(
                RaStatus::InvalidArgument,
                format!(
                    "output holds {n_out} phases, scenario has {} elements",
                    s.element_count()
                ),
            ));
        }
        let objective = match objective {
            RaObjective::TransportCapacity => Objective::TransportCapacity,
            RaObjective::MinSinr => Objective::MinSinr,
            RaObjective::SingleLinkSinr => Objective::SingleLinkSinr(link),
        };
        let cfg = PhaseSearchConfig {
            method: PhaseMethod::CoordinateAscent,
            phase_step,
            max_sweeps,
            ..PhaseSearchConfig::default()
        };
        let best = refarray::optimize_phases(s, objective, &cfg)?;
        if n_out > 0 {
            if out_phases.is_null() {
                return Err(null("out_phases"));
            }
            std::slice::from_raw_parts_mut(out_phases, n_out).copy_from_slice(best.phases.phases());
        }
        *value = best.value;
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ra_status_name(status: RaStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RaStatus::Ok => c"ok",
        RaStatus::NullPointer => c"null pointer",
        RaStatus::InvalidArgument => c"invalid argument",
        RaStatus::InvalidGeometry => c"invalid geometry",
        RaStatus::Infeasible => c"infeasible",
        RaStatus::BoundInvalid => c"bound invalid",
        RaStatus::BudgetExceeded => c"budget exceeded",
        RaStatus::Panic => c"panic",
    };
    s.as_ptr()
}
