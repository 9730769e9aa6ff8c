//! C ABI for `twoarc`.
//!
//! Every fallible call returns a [`TwoarcStatus`]; on failure the message is
//! available from [`twoarc_last_error`] on the same thread. Handles are
//! opaque, owned by the caller and released with the matching `_free`.
//! Null handles and null output pointers yield `TWOARC_STATUS_MALFORMED`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use twoarc::cli::{request_from_json, run_request};
use twoarc::elliptic::Modulus;
use twoarc::error::{Error, ErrorKind};
use twoarc::geometry::{is_tn_tuple, modulus_from_tuple, EndpointTuple, TupleCertificate};
use twoarc::pell::{construct_pair, PolynomialPair};
use twoarc::trace::endpoints_from_pair;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoarcStatus {
    Ok = 0,
    Malformed = 1,
    Domain = 2,
    Numeric = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoarcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for TwoarcComplex {
    fn from(z: Complex64) -> Self {
        TwoarcComplex { re: z.re, im: z.im }
    }
}

impl From<TwoarcComplex> for Complex64 {
    fn from(z: TwoarcComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Outcome of the lattice test for one degree.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoarcCertificate {
    pub n: u32,
    pub m: i64,
    pub m_prime: i64,
    pub lambda: f64,
    pub lambda_prime: f64,
    pub lambda_residual: f64,
    pub lambda_prime_residual: f64,
    pub tolerance: f64,
    pub accepted: bool,
}

impl From<TupleCertificate> for TwoarcCertificate {
    fn from(c: TupleCertificate) -> Self {
        TwoarcCertificate {
            n: c.n,
            m: c.m,
            m_prime: c.m_prime,
            lambda: c.lambda,
            lambda_prime: c.lambda_prime,
            lambda_residual: c.lambda_residual,
            lambda_prime_residual: c.lambda_prime_residual,
            tolerance: c.tolerance,
            accepted: c.accepted,
        }
    }
}

pub struct TwoarcTuple(EndpointTuple);
pub struct TwoarcModulus(Modulus);
pub struct TwoarcPair(PolynomialPair);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(kind: ErrorKind) -> TwoarcStatus {
    match kind {
        ErrorKind::Input => TwoarcStatus::Malformed,
        ErrorKind::Domain => TwoarcStatus::Domain,
        ErrorKind::Numeric => TwoarcStatus::Numeric,
    }
}

fn malformed(msg: &str) -> Error {
    Error::Input(msg.to_string())
}

/// Runs `f`, recording its error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> TwoarcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TwoarcStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(e.kind())
        }
        Err(_) => {
            set_error("internal error (panic)".to_string());
            TwoarcStatus::Numeric
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| malformed(&format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(malformed("output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn twoarc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a tuple from four points.
///
/// # Safety
/// `points` must point to four readable `TwoarcComplex` values.
#[no_mangle]
pub unsafe extern "C" fn twoarc_tuple_new(points: *const TwoarcComplex, out: *mut *mut TwoarcTuple) -> TwoarcStatus {
    guard(|| {
        if points.is_null() {
            return Err(malformed("points is null"));
        }
        let p = std::slice::from_raw_parts(points, 4);
        let t = EndpointTuple::new([p[0].into(), p[1].into(), p[2].into(), p[3].into()])?;
        put(out, Box::into_raw(Box::new(TwoarcTuple(t))))
    })
}

/// # Safety
/// `tuple` must be null or come from `twoarc_tuple_new`, and is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn twoarc_tuple_free(tuple: *mut TwoarcTuple) {
    if !tuple.is_null() {
        drop(Box::from_raw(tuple));
    }
}

/// Lattice test of `tuple` for degree `n`.
///
/// # Safety
/// `tuple` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_tuple_check(
    tuple: *const TwoarcTuple,
    n: u32,
    tol: f64,
    out: *mut TwoarcCertificate,
) -> TwoarcStatus {
    guard(|| {
        let t = deref(tuple, "tuple")?;
        put(out, is_tn_tuple(&t.0, n, tol)?.into())
    })
}

/// Snaps `tuple` to the nearest T_n-tuple; writes `a2~`, `a3~` and the certificate
/// of the snapped tuple.
///
/// # Safety
/// `tuple` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_tuple_approximate(
    tuple: *const TwoarcTuple,
    n: u32,
    a2: *mut TwoarcComplex,
    a3: *mut TwoarcComplex,
    cert: *mut TwoarcCertificate,
) -> TwoarcStatus {
    guard(|| {
        let t = deref(tuple, "tuple")?;
        let ap = twoarc::density::approximate_tuple(&t.0, n)?;
        put(a2, ap.a_tilde2.into())?;
        put(a3, ap.a_tilde3.into())?;
        put(cert, ap.certificate.into())
    })
}

/// Modulus with the given `k`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_modulus_new(k: TwoarcComplex, out: *mut *mut TwoarcModulus) -> TwoarcStatus {
    guard(|| {
        let m = Modulus::new(k.into())?;
        put(out, Box::into_raw(Box::new(TwoarcModulus(m))))
    })
}

/// Modulus of the canonical ordering of `tuple`.
///
/// # Safety
/// `tuple` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_modulus_from_tuple(
    tuple: *const TwoarcTuple,
    out: *mut *mut TwoarcModulus,
) -> TwoarcStatus {
    guard(|| {
        let t = deref(tuple, "tuple")?;
        let m = modulus_from_tuple(&t.0)?;
        put(out, Box::into_raw(Box::new(TwoarcModulus(m))))
    })
}

/// # Safety
/// `modulus` must be null or a handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn twoarc_modulus_free(modulus: *mut TwoarcModulus) {
    if !modulus.is_null() {
        drop(Box::from_raw(modulus));
    }
}

/// Writes `k`, `K` and `K'`.
///
/// # Safety
/// `modulus` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_modulus_periods(
    modulus: *const TwoarcModulus,
    k: *mut TwoarcComplex,
    big_k: *mut TwoarcComplex,
    big_k_prime: *mut TwoarcComplex,
) -> TwoarcStatus {
    guard(|| {
        let m = &deref(modulus, "modulus")?.0;
        put(k, m.k.into())?;
        put(big_k, m.big_k.into())?;
        put(big_k_prime, m.big_k_prime.into())
    })
}

/// `sn`, `cn`, `dn` at `u`.
///
/// # Safety
/// `modulus` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_modulus_jacobi(
    modulus: *const TwoarcModulus,
    u: TwoarcComplex,
    sn: *mut TwoarcComplex,
    cn: *mut TwoarcComplex,
    dn: *mut TwoarcComplex,
) -> TwoarcStatus {
    guard(|| {
        let j = deref(modulus, "modulus")?.0.jacobi(u.into())?;
        put(sn, j.sn.into())?;
        put(cn, j.cn.into())?;
        put(dn, j.dn.into())
    })
}

/// Builds the Pell pair of a tuple certified at degree `n` with tolerance `tol`.
///
/// # Safety
/// `tuple` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_construct(
    tuple: *const TwoarcTuple,
    n: u32,
    tol: f64,
    out: *mut *mut TwoarcPair,
) -> TwoarcStatus {
    guard(|| {
        let t = deref(tuple, "tuple")?;
        let cert = is_tn_tuple(&t.0, n, tol)?;
        let pair = construct_pair(&t.0, &cert)?;
        put(out, Box::into_raw(Box::new(TwoarcPair(pair))))
    })
}

/// # Safety
/// `pair` must be null or a handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_free(pair: *mut TwoarcPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Degree of `T`, or 0 for a null handle.
///
/// # Safety
/// `pair` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_degree(pair: *const TwoarcPair) -> usize {
    pair.as_ref().map_or(0, |p| p.0.degree())
}

/// `max |T^2 - 1 - H U^2| / |tau|^2` on the generating tuple.
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_residual(pair: *const TwoarcPair, out: *mut f64) -> TwoarcStatus {
    guard(|| put(out, deref(pair, "pair")?.0.pell_residual))
}

unsafe fn copy_coeffs(src: &[Complex64], buf: *mut TwoarcComplex, len: usize) -> Result<(), Error> {
    if buf.is_null() {
        return Err(malformed("buffer is null"));
    }
    if len < src.len() {
        return Err(malformed(&format!("buffer holds {len}, need {}", src.len())));
    }
    for (i, z) in src.iter().enumerate() {
        buf.add(i).write((*z).into());
    }
    Ok(())
}

/// Copies the `degree + 1` coefficients of `T`, constant term first.
///
/// # Safety
/// `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_t_coeffs(
    pair: *const TwoarcPair,
    buf: *mut TwoarcComplex,
    len: usize,
) -> TwoarcStatus {
    guard(|| copy_coeffs(&deref(pair, "pair")?.0.t_coeffs, buf, len))
}

/// Copies the `degree - 1` coefficients of `U`, constant term first.
///
/// # Safety
/// `buf` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_u_coeffs(
    pair: *const TwoarcPair,
    buf: *mut TwoarcComplex,
    len: usize,
) -> TwoarcStatus {
    guard(|| copy_coeffs(&deref(pair, "pair")?.0.u_coeffs, buf, len))
}

/// The four simple zeros of `T^2 - 1`, sorted by real then imaginary part.
///
/// # Safety
/// `out` must have room for four values.
#[no_mangle]
pub unsafe extern "C" fn twoarc_pair_endpoints(pair: *const TwoarcPair, out: *mut TwoarcComplex) -> TwoarcStatus {
    guard(|| {
        let ends = endpoints_from_pair(&deref(pair, "pair")?.0)?;
        copy_coeffs(&ends, out, 4)
    })
}

/// Runs a JSON request (or re-runs an earlier report) exactly as the command
/// line does. On success and on job failure `*report` receives the JSON
/// report, to be released with `twoarc_string_free`.
///
/// # Safety
/// `request` must be a NUL-terminated string and `report` writable.
#[no_mangle]
pub unsafe extern "C" fn twoarc_run_json(request: *const c_char, report: *mut *mut c_char) -> TwoarcStatus {
    let mut code = 0;
    let status = guard(|| {
        if request.is_null() {
            return Err(malformed("request is null"));
        }
        let text = CStr::from_ptr(request)
            .to_str()
            .map_err(|_| malformed("request is not UTF-8"))?;
        let outcome = run_request(request_from_json(text)?);
        code = outcome.code;
        let c = CString::new(outcome.stdout).map_err(|_| malformed("report contains NUL"))?;
        put(report, c.into_raw())?;
        if outcome.code != 0 {
            set_error(outcome.stderr.trim_end().trim_start_matches("twoarc: ").to_string());
        }
        Ok(())
    });
    match (status, code) {
        (TwoarcStatus::Ok, 1) => TwoarcStatus::Malformed,
        (TwoarcStatus::Ok, 2) => TwoarcStatus::Domain,
        (TwoarcStatus::Ok, 3) => TwoarcStatus::Numeric,
        (s, _) => s,
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn twoarc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
