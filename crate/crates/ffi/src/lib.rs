//! C ABI over `approxgrp`.
//!
//! Groups and lengths cross the boundary as opaque handles built from the
//! same JSON descriptors the scenario files use. Every call returns an
//! [`AgStatus`]; on failure the message is available from
//! [`ag_last_error_message`] on the same thread. Strings returned through
//! out-pointers are owned by the caller and released with [`ag_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use approxgrp::groups::{Element, Group, GroupSpec};
use approxgrp::length::{LengthFunction, LengthSpec};
use approxgrp::scenario::{run_scenario_str, Overrides};
use approxgrp::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidJson = 3,
    Structural = 4,
    Capability = 5,
    Domain = 6,
    Parameter = 7,
    Coverage = 8,
    Separation = 9,
    Folner = 10,
    Schema = 11,
    Panic = 12,
}

/// Report rendering for [`ag_run_scenario`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgFormat {
    Text = 0,
    Machine = 1,
}

/// Optional overrides for [`ag_run_scenario`]. Zero budget or samples keeps
/// the scenario's value; the seed applies only when `use_seed` is set.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct AgOverrides {
    pub budget: u64,
    pub samples: u64,
    pub seed: u64,
    pub use_seed: bool,
}

/// Opaque group handle.
pub struct AgGroup {
    group: Group,
}

/// Opaque length-function handle.
pub struct AgLength {
    length: LengthFunction,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Failure(AgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match &e {
            Error::Structural(_) => AgStatus::Structural,
            Error::Capability(_) => AgStatus::Capability,
            Error::Domain(_) => AgStatus::Domain,
            Error::Parameter(_) => AgStatus::Parameter,
            Error::Coverage { .. } => AgStatus::Coverage,
            Error::Separation { .. } => AgStatus::Separation,
            Error::Folner { .. } => AgStatus::Folner,
            Error::Schema(_) => AgStatus::Schema,
        };
        Failure(status, e.to_string())
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Failure {
    Failure(AgStatus::InvalidJson, format!("invalid {what}: {e}"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            AgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AgStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AgStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(AgStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(AgStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(AgStatus::NullPointer, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

unsafe fn parse_element(group: &Group, p: *const c_char, name: &str) -> Result<Element, Failure> {
    let g: Element = serde_json::from_str(read_str(p, name)?).map_err(|e| json_error(name, e))?;
    group.check(&g)?;
    Ok(g)
}

/// Builds a group from a JSON descriptor such as `{"kind":"sym","n":4}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_group_from_json(json: *const c_char, out: *mut *mut AgGroup) -> AgStatus {
    guard(|| {
        let spec: GroupSpec = serde_json::from_str(read_str(json, "json")?).map_err(|e| json_error("group", e))?;
        let group = Group::try_from(spec)?;
        write_out(out, Box::into_raw(Box::new(AgGroup { group })), "out")
    })
}

/// Releases a group handle. Null is ignored.
///
/// # Safety
/// `group` must come from [`ag_group_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ag_group_free(group: *mut AgGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Writes the group order to `out` and whether the group is finite to
/// `finite`. Infinite groups report order 0; finite orders above `u64`
/// fail with [`AgStatus::Capability`].
///
/// # Safety
/// `group` must be a live handle; `out` and `finite` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_group_order(group: *const AgGroup, out: *mut u64, finite: *mut bool) -> AgStatus {
    guard(|| {
        let g = &deref(group, "group")?.group;
        let order = match g.order() {
            Some(n) => u64::try_from(n)
                .map_err(|_| Failure(AgStatus::Capability, format!("order {n} does not fit in 64 bits")))?,
            None => 0,
        };
        write_out(out, order, "out")?;
        write_out(finite, g.is_finite(), "finite")
    })
}

/// Multiplies two JSON-encoded elements; the product is written to `out`
/// as JSON.
///
/// # Safety
/// `group` must be a live handle, `a` and `b` valid strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_group_multiply(
    group: *const AgGroup,
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> AgStatus {
    guard(|| {
        let g = &deref(group, "group")?.group;
        let x = parse_element(g, a, "a")?;
        let y = parse_element(g, b, "b")?;
        let product = g.multiply(&x, &y)?;
        let text = serde_json::to_string(&product).map_err(|e| json_error("element", e))?;
        write_out(out, to_c_string(text), "out")
    })
}

/// Builds a length function from a JSON descriptor such as
/// `{"kind":"hamming"}`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_length_from_json(json: *const c_char, out: *mut *mut AgLength) -> AgStatus {
    guard(|| {
        let spec: LengthSpec = serde_json::from_str(read_str(json, "json")?).map_err(|e| json_error("length", e))?;
        let length = LengthFunction::try_from(spec)?;
        write_out(out, Box::into_raw(Box::new(AgLength { length })), "out")
    })
}

/// Releases a length handle. Null is ignored.
///
/// # Safety
/// `length` must come from [`ag_length_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ag_length_free(length: *mut AgLength) {
    if !length.is_null() {
        drop(Box::from_raw(length));
    }
}

/// Evaluates a length on a JSON-encoded element of `group`.
///
/// # Safety
/// Both handles must be live, `element` a valid string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_length_evaluate(
    length: *const AgLength,
    group: *const AgGroup,
    element: *const c_char,
    out: *mut f64,
) -> AgStatus {
    guard(|| {
        let l = &deref(length, "length")?.length;
        let g = &deref(group, "group")?.group;
        let x = parse_element(g, element, "element")?;
        write_out(out, l.evaluate(&x)?, "out")
    })
}

/// Runs a scenario document. On success the rendered report goes to
/// `report` and whether every verdict held goes to `passed`. Bound
/// violations are not errors: they come back as `Ok` with `passed` false.
///
/// # Safety
/// `scenario` must be a valid string, `overrides` null or readable, and
/// `report` and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn ag_run_scenario(
    scenario: *const c_char,
    overrides: *const AgOverrides,
    format: AgFormat,
    report: *mut *mut c_char,
    passed: *mut bool,
) -> AgStatus {
    guard(|| {
        let text = read_str(scenario, "scenario")?;
        let o = overrides.as_ref().copied().unwrap_or_default();
        let samples = usize::try_from(o.samples)
            .map_err(|_| Failure(AgStatus::Parameter, "samples out of range".into()))?;
        let overrides = Overrides {
            budget: (o.budget != 0).then_some(o.budget),
            samples: (samples != 0).then_some(samples),
            seed: o.use_seed.then_some(o.seed),
        };
        let r = run_scenario_str(text, &overrides)?;
        let rendered = match format {
            AgFormat::Text => r.to_text(),
            AgFormat::Machine => r.to_machine(),
        };
        if report.is_null() || passed.is_null() {
            return Err(Failure(AgStatus::NullPointer, "report or passed is null".into()));
        }
        report.write(to_c_string(rendered));
        passed.write(r.passed);
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ag_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or null after a
/// successful call. The pointer stays valid until the next call on the
/// same thread.
#[no_mangle]
pub extern "C" fn ag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn ag_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
