//! C ABI over `netlab`.
//!
//! Objects are opaque handles released with their `_free` function.
//! Strings returned through `char **` are owned by the caller and released
//! with `netlab_string_free`. Every fallible call returns a `NetlabStatus`;
//! on failure `netlab_last_error_message` describes the error on the
//! calling thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use netlab::admissibility::report;
use netlab::construct::{build, Family};
use netlab::io::{net_from_json, net_to_json};
use netlab::net::{verify, Net, Tolerance};
use netlab::surface::{PolygonSpec, Surface};
use netlab::NetlabError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    GeometryError = 4,
    VerificationFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetlabFamily {
    Theta = 0,
    Tetra = 1,
    Figure8Odd = 2,
    Figure8Isosceles = 3,
    Figure8Hexagon = 4,
    BifocalTriangle = 5,
}

/// Opaque doubled polygon.
pub struct NetlabSurface(Surface);

/// Opaque geodesic net.
pub struct NetlabNet(Net);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &NetlabError) -> NetlabStatus {
    match e {
        NetlabError::Json(_) => NetlabStatus::ParseError,
        NetlabError::InvalidSpec(_)
        | NetlabError::InvalidTriangle(_)
        | NetlabError::NotMultipleOf3(_)
        | NetlabError::NotMultipleOf4(_)
        | NetlabError::NotOdd(_)
        | NetlabError::NotIsosceles => NetlabStatus::InvalidArgument,
        _ => NetlabStatus::GeometryError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (NetlabStatus, String)>) -> NetlabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            NetlabStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NetlabStatus::Panic
        }
    }
}

fn lift<T>(r: netlab::Result<T>) -> Result<T, (NetlabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (NetlabStatus, String) {
    (NetlabStatus::NullPointer, "null pointer argument".into())
}

fn into_c(s: String) -> Result<*mut c_char, (NetlabStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (NetlabStatus::InvalidArgument, "string contains NUL".into()))
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next netlab call on the same thread.
#[no_mangle]
pub extern "C" fn netlab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub unsafe extern "C" fn netlab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Doubled regular n-gon with circumradius `scale`.
#[no_mangle]
pub unsafe extern "C" fn netlab_surface_regular(n: u32, scale: f64, out: *mut *mut NetlabSurface) -> NetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let s = lift(Surface::new(PolygonSpec::regular(n, scale)))?;
        *out = Box::into_raw(Box::new(NetlabSurface(s)));
        Ok(())
    })
}

/// Doubled triangle with the given angles in degrees and longest side
/// `scale`.
#[no_mangle]
pub unsafe extern "C" fn netlab_surface_triangle(
    a_deg: f64,
    b_deg: f64,
    c_deg: f64,
    scale: f64,
    out: *mut *mut NetlabSurface,
) -> NetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let s = lift(Surface::new(PolygonSpec::triangle_degrees([a_deg, b_deg, c_deg], scale)))?;
        *out = Box::into_raw(Box::new(NetlabSurface(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn netlab_surface_free(s: *mut NetlabSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn netlab_surface_cone_count(s: *const NetlabSurface, out: *mut usize) -> NetlabStatus {
    guard(|| {
        let (s, out) = (s.as_ref().ok_or_else(null)?, out.as_mut().ok_or_else(null)?);
        *out = s.0.cones().len();
        Ok(())
    })
}

/// Sum of cone curvatures (4π for any doubled polygon).
#[no_mangle]
pub unsafe extern "C" fn netlab_surface_total_curvature(s: *const NetlabSurface, out: *mut f64) -> NetlabStatus {
    guard(|| {
        let (s, out) = (s.as_ref().ok_or_else(null)?, out.as_mut().ok_or_else(null)?);
        *out = s.0.total_curvature();
        Ok(())
    })
}

/// Build a net from a known family. `n` is used by the regular-polygon
/// families; `angles_deg` (three doubles) by `Figure8Isosceles` and may be
/// null otherwise.
#[no_mangle]
pub unsafe extern "C" fn netlab_construct(
    family: NetlabFamily,
    n: u32,
    angles_deg: *const f64,
    out: *mut *mut NetlabNet,
) -> NetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let f = match family {
            NetlabFamily::Theta => Family::Theta { n },
            NetlabFamily::Tetra => Family::Tetra { n },
            NetlabFamily::Figure8Odd => Family::Figure8Odd { n },
            NetlabFamily::Figure8Isosceles => {
                if angles_deg.is_null() {
                    return Err(null());
                }
                let a = std::slice::from_raw_parts(angles_deg, 3);
                Family::Figure8Isosceles { angles_deg: [a[0], a[1], a[2]] }
            }
            NetlabFamily::Figure8Hexagon => Family::Figure8Hexagon,
            NetlabFamily::BifocalTriangle => Family::BifocalTriangle,
        };
        let net = lift(build(f))?;
        *out = Box::into_raw(Box::new(NetlabNet(net)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn netlab_net_from_json(json: *const c_char, out: *mut *mut NetlabNet) -> NetlabStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (NetlabStatus::ParseError, "input is not UTF-8".to_string()))?;
        let net = lift(net_from_json(text))?;
        *out = Box::into_raw(Box::new(NetlabNet(net)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn netlab_net_to_json(net: *const NetlabNet, out: *mut *mut c_char) -> NetlabStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = into_c(net_to_json(&net.0))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn netlab_net_free(net: *mut NetlabNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

#[no_mangle]
pub unsafe extern "C" fn netlab_net_edge_count(net: *const NetlabNet, out: *mut usize) -> NetlabStatus {
    guard(|| {
        let (net, out) = (net.as_ref().ok_or_else(null)?, out.as_mut().ok_or_else(null)?);
        *out = net.0.edges.len();
        Ok(())
    })
}

/// Verify a net. `tol <= 0` selects the default geometric tolerance.
/// Writes the report JSON to `report_json` when it is not null. Returns
/// `VerificationFailed` when the net does not pass.
#[no_mangle]
pub unsafe extern "C" fn netlab_net_verify(
    net: *const NetlabNet,
    tol: f64,
    report_json: *mut *mut c_char,
) -> NetlabStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(null)?;
        let mut t = Tolerance::for_scale(net.0.surface.scale());
        if tol > 0.0 {
            t.geometry = tol;
        }
        let r = lift(verify(&net.0, t))?;
        if !report_json.is_null() {
            *report_json = into_c(serde_json::to_string(&r).expect("report serializes"))?;
        }
        if r.passed {
            Ok(())
        } else {
            Err((
                NetlabStatus::VerificationFailed,
                format!("max balancing defect {:e}, max residual {:e}", r.max_defect, r.max_residual),
            ))
        }
    })
}

/// Admissibility summary for the doubled regular n-gon as JSON.
#[no_mangle]
pub unsafe extern "C" fn netlab_admissible_json(n: u32, out: *mut *mut c_char) -> NetlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let r = lift(report(n, None))?;
        *out = into_c(serde_json::to_string(&r).expect("report serializes"))?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&NetlabError::Json("x".into())), NetlabStatus::ParseError);
        assert_eq!(status_of(&NetlabError::NotOdd(4)), NetlabStatus::InvalidArgument);
        assert_eq!(status_of(&NetlabError::MalformedNet("x".into())), NetlabStatus::GeometryError);
    }

    #[test]
    fn error_message_is_per_call() {
        let mut s = ptr::null_mut();
        unsafe {
            assert_eq!(netlab_surface_regular(2, 1.0, &mut s), NetlabStatus::InvalidArgument);
            assert!(!CStr::from_ptr(netlab_last_error_message()).to_bytes().is_empty());
            assert_eq!(netlab_surface_regular(5, 1.0, &mut s), NetlabStatus::Ok);
            assert!(CStr::from_ptr(netlab_last_error_message()).to_bytes().is_empty());
            netlab_surface_free(s);
        }
    }
}
