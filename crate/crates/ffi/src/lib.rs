//! C ABI for `jitterdisc`.
//!
//! Every fallible function returns a [`JdStatus`]; on failure the message is
//! available from [`jd_last_error_message`] on the same thread. Point sets
//! are opaque [`JdPointSet`] handles released with [`jd_pointset_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use jitterdisc::bounds::{lower_main_bound, mc_reference, smallm_lower_bound, upper_thm_bound, UpperConstant};
use jitterdisc::discrepancy::{
    signed_disc, star_disc_certified_upper, star_disc_exact, star_disc_heuristic, AxisRect, Closure, CoverSpec,
    DiscKind, DiscrepancyEstimate, Side,
};
use jitterdisc::harness::{load_point_set, save_point_set};
use jitterdisc::sampler::{generate, generate_lhs, generate_uniform, PointSet, StratifiedSpec};
use jitterdisc::{binom, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    Domain = 4,
    Range = 5,
    Parse = 6,
    Io = 7,
    Capacity = 8,
    Panic = 9,
    Other = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdSampler {
    Jittered = 0,
    HalfCube = 1,
    Uniform = 2,
    Lhs = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdDiscKind {
    Exact = 0,
    LowerWitness = 1,
    CertifiedUpper = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JdSide {
    None = 0,
    Underfull = 1,
    Overfull = 2,
}

/// Result of a discrepancy computation. `delta` is NaN unless
/// `kind == JD_DISC_KIND_CERTIFIED_UPPER`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JdDiscResult {
    pub value: f64,
    pub normalized: f64,
    pub delta: f64,
    pub kind: JdDiscKind,
    pub side: JdSide,
}

/// Bound values at `(m, d)`. A value is NaN when its formula is undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JdBounds {
    pub lower_main: f64,
    pub lower_main_applicable: bool,
    pub smallm_lower: f64,
    pub upper: f64,
    pub upper_applicable: bool,
    pub mc_reference: f64,
}

/// Opaque point set.
pub struct JdPointSet {
    inner: PointSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> JdStatus {
    match e {
        Error::Validation(_) => JdStatus::InvalidArgument,
        Error::Capacity { .. } => JdStatus::Capacity,
        Error::Infeasible { .. } => JdStatus::Infeasible,
        Error::Domain(_) => JdStatus::Domain,
        Error::Range(_) => JdStatus::Range,
        Error::Parse { .. } => JdStatus::Parse,
        Error::Io(_) => JdStatus::Io,
        _ => JdStatus::Other,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (JdStatus, String)>) -> JdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JdStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            JdStatus::Panic
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, (JdStatus, String)>;
}

impl<T> Lift<T> for jitterdisc::Result<T> {
    fn lift(self) -> Result<T, (JdStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (JdStatus, String) {
    (JdStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (JdStatus, String) {
    (JdStatus::InvalidArgument, msg.into())
}

unsafe fn handle<'a>(ps: *const JdPointSet) -> Result<&'a PointSet, (JdStatus, String)> {
    ps.as_ref().map(|h| &h.inner).ok_or_else(|| null("point set"))
}

unsafe fn out_ref<'a, T>(out: *mut T, what: &str) -> Result<&'a mut T, (JdStatus, String)> {
    out.as_mut().ok_or_else(|| null(what))
}

unsafe fn path_of<'a>(path: *const c_char) -> Result<&'a Path, (JdStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(Path::new)
        .map_err(|_| invalid("path is not valid UTF-8"))
}

fn boxed(p: PointSet) -> *mut JdPointSet {
    Box::into_raw(Box::new(JdPointSet { inner: p }))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn jd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Generates a point set. `size` is `m` for jittered sets, `d'` for
/// half-cube sets and `N` for uniform and Latin hypercube sets.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_generate(
    sampler: JdSampler,
    size: u64,
    dim: usize,
    seed: u64,
    out: *mut *mut JdPointSet,
) -> JdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = match sampler {
            JdSampler::Jittered => {
                let m = u32::try_from(size).map_err(|_| invalid(format!("m = {size} too large")))?;
                generate(&StratifiedSpec::full_grid(m, dim).lift()?, seed).lift()?
            }
            JdSampler::HalfCube => generate(&StratifiedSpec::half_cube(size as usize, dim).lift()?, seed).lift()?,
            JdSampler::Uniform => generate_uniform(size as usize, dim, seed).lift()?,
            JdSampler::Lhs => generate_lhs(size as usize, dim, seed).lift()?,
        };
        *out = boxed(p);
        Ok(())
    })
}

/// Copies `n * dim` row-major coordinates into a new point set.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_from_coords(
    coords: *const f64,
    n: usize,
    dim: usize,
    out: *mut *mut JdPointSet,
) -> JdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if coords.is_null() {
            return Err(null("coords"));
        }
        let len = n.checked_mul(dim).ok_or_else(|| invalid("n * dim overflows"))?;
        let v = std::slice::from_raw_parts(coords, len).to_vec();
        *out = boxed(PointSet::new(dim, v).lift()?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn jd_pointset_read(path: *const c_char, out: *mut *mut JdPointSet) -> JdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(load_point_set(path_of(path)?).lift()?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn jd_pointset_write(ps: *const JdPointSet, path: *const c_char) -> JdStatus {
    guard(|| save_point_set(handle(ps)?, path_of(path)?).lift())
}

/// Releases a point set; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_free(ps: *mut JdPointSet) {
    if !ps.is_null() {
        drop(Box::from_raw(ps));
    }
}

/// Number of points, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_len(ps: *const JdPointSet) -> usize {
    ps.as_ref().map_or(0, |h| h.inner.len())
}

/// Dimension, or 0 for null.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_dim(ps: *const JdPointSet) -> usize {
    ps.as_ref().map_or(0, |h| h.inner.dim())
}

/// Borrowed row-major coordinates (`len * dim` values), valid while the
/// handle lives; null for null.
#[no_mangle]
pub unsafe extern "C" fn jd_pointset_coords(ps: *const JdPointSet) -> *const f64 {
    ps.as_ref().map_or(ptr::null(), |h| h.inner.coords().as_ptr())
}

unsafe fn write_result(
    p: &PointSet,
    est: &DiscrepancyEstimate,
    out: *mut JdDiscResult,
    corner: *mut f64,
) -> Result<(), (JdStatus, String)> {
    let out = out_ref(out, "out")?;
    *out = JdDiscResult {
        value: est.value,
        normalized: est.value / p.len() as f64,
        delta: est.delta.unwrap_or(f64::NAN),
        kind: match est.kind {
            DiscKind::Exact => JdDiscKind::Exact,
            DiscKind::LowerWitness => JdDiscKind::LowerWitness,
            DiscKind::CertifiedUpper => JdDiscKind::CertifiedUpper,
        },
        side: match est.witness.as_ref().map(|w| w.side) {
            None => JdSide::None,
            Some(Side::Underfull) => JdSide::Underfull,
            Some(Side::Overfull) => JdSide::Overfull,
        },
    };
    if let (false, Some(w)) = (corner.is_null(), &est.witness) {
        std::slice::from_raw_parts_mut(corner, w.corner.len()).copy_from_slice(&w.corner);
    }
    Ok(())
}

/// Exact star discrepancy. `corner`, when non-null, receives `dim` witness
/// coordinates.
#[no_mangle]
pub unsafe extern "C" fn jd_star_disc_exact(
    ps: *const JdPointSet,
    out: *mut JdDiscResult,
    corner: *mut f64,
) -> JdStatus {
    guard(|| {
        let p = handle(ps)?;
        write_result(p, &star_disc_exact(p).lift()?, out, corner)
    })
}

/// Lower bound from `restarts` randomized local searches.
#[no_mangle]
pub unsafe extern "C" fn jd_star_disc_heuristic(
    ps: *const JdPointSet,
    restarts: usize,
    seed: u64,
    out: *mut JdDiscResult,
    corner: *mut f64,
) -> JdStatus {
    guard(|| {
        let p = handle(ps)?;
        write_result(p, &star_disc_heuristic(p, restarts, seed).lift()?, out, corner)
    })
}

/// Certified upper bound on an `(grid+1)^dim` cover.
#[no_mangle]
pub unsafe extern "C" fn jd_star_disc_certified(
    ps: *const JdPointSet,
    grid: u32,
    out: *mut JdDiscResult,
    corner: *mut f64,
) -> JdStatus {
    guard(|| {
        let p = handle(ps)?;
        let cover = CoverSpec::from_grid(grid, p.dim()).lift()?;
        write_result(p, &star_disc_certified_upper(p, &cover).lift()?, out, corner)
    })
}

/// `count - N·vol` for the box `[lo, hi)`; upper faces are closed when
/// `closed` is set. `lo` may be null for an anchored box.
#[no_mangle]
pub unsafe extern "C" fn jd_signed_disc(
    ps: *const JdPointSet,
    lo: *const f64,
    hi: *const f64,
    closed: bool,
    out: *mut f64,
) -> JdStatus {
    guard(|| {
        let p = handle(ps)?;
        let out = out_ref(out, "out")?;
        if hi.is_null() {
            return Err(null("hi"));
        }
        let d = p.dim();
        let hi = std::slice::from_raw_parts(hi, d).to_vec();
        let lo = if lo.is_null() {
            vec![0.0; d]
        } else {
            std::slice::from_raw_parts(lo, d).to_vec()
        };
        let rect = AxisRect::new(lo, hi).lift()?;
        let c = if closed { Closure::Closed } else { Closure::Strict };
        *out = signed_disc(p, &rect, &vec![c; d]).lift()?;
        Ok(())
    })
}

/// Lower and upper bounds for jittered sampling with `m^d` points.
/// `proof_constant` selects the constant carried through the upper-bound
/// proof instead of the stated one.
#[no_mangle]
pub unsafe extern "C" fn jd_bounds(m: u64, d: u64, proof_constant: bool, out: *mut JdBounds) -> JdStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let constant = if proof_constant { UpperConstant::Proof } else { UpperConstant::Statement };
        let (lower_main, lower_main_applicable) = match lower_main_bound(m, d) {
            Ok(b) => (b.value, b.applicable),
            Err(Error::Domain(_)) => (f64::NAN, false),
            Err(e) => return Err((status_of(&e), e.to_string())),
        };
        let upper = upper_thm_bound(m, d, constant).lift()?;
        let n = (m as f64).powf(d as f64);
        *out = JdBounds {
            lower_main,
            lower_main_applicable,
            smallm_lower: smallm_lower_bound(m, d).lift()?.value,
            upper: upper.value,
            upper_applicable: upper.applicable,
            mc_reference: if n <= u64::MAX as f64 {
                mc_reference(n as u64, d, 1.0).lift()?.value
            } else {
                (d as f64 * n).sqrt()
            },
        };
        Ok(())
    })
}

fn write_f64(out: *mut f64, v: jitterdisc::Result<f64>) -> JdStatus {
    guard(|| {
        let out = unsafe { out_ref(out, "out")? };
        *out = v.lift()?;
        Ok(())
    })
}

/// `α(c)` for the maximum of `k` binomials `Bin(n, 1/2)`.
#[no_mangle]
pub unsafe extern "C" fn jd_maxbin_alpha(n: u64, k: u64, c: f64, out: *mut f64) -> JdStatus {
    write_f64(out, binom::alpha(&binom::MaxBinParams { n, k, c }))
}

/// Lower bound on `Pr[X_max >= n/2 + α(c)]`.
#[no_mangle]
pub unsafe extern "C" fn jd_maxbin_prob_bound(n: u64, k: u64, c: f64, out: *mut f64) -> JdStatus {
    write_f64(out, binom::prob_bound(&binom::MaxBinParams { n, k, c }))
}

/// Lower bound on `E[max(0, X_max - n/2)]`.
#[no_mangle]
pub unsafe extern "C" fn jd_maxbin_expect_bound(n: u64, k: u64, out: *mut f64) -> JdStatus {
    write_f64(out, binom::expect_bound(n, k))
}

/// Exact `Pr[X_max >= threshold]`.
#[no_mangle]
pub unsafe extern "C" fn jd_maxbin_exact_prob(n: u64, k: u64, threshold: f64, out: *mut f64) -> JdStatus {
    write_f64(out, binom::exact_max_prob(n, k, threshold))
}

/// Exact `E[max(0, X_max - n/2)]`.
#[no_mangle]
pub unsafe extern "C" fn jd_maxbin_exact_expect(n: u64, k: u64, out: *mut f64) -> JdStatus {
    write_f64(out, binom::exact_max_binomial_expect(n, k))
}
