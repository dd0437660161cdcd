//! C ABI over the `gl2k` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions and released
//! by the matching `*_free`. Every fallible call returns a [`Gl2kStatus`]; on failure the
//! message is available from [`gl2k_last_error`] on the same thread. Panics are caught at
//! the boundary and reported as [`Gl2kStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use gl2k::config::RunConfig;
use gl2k::elliptic::EllipticDatum;
use gl2k::field::{AlgInt, FieldDescriptor};
use gl2k::kloosterman::{global_dirichlet, local_sum_bruteforce, local_sum_closed, LocalSumParams, Truncation};
use gl2k::report::VerificationReport;
use gl2k::{suites, Error};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gl2kStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8, or a parameter was out of range.
    InvalidArgument = 2,
    /// The input lies outside the domain of the requested quantity.
    Undefined = 3,
    /// An enumeration, factorization or quadrature budget was exceeded.
    Resource = 4,
    /// The requested point or regime is not supported.
    Unsupported = 5,
    /// The configuration text was malformed or failed validation.
    Config = 6,
    /// A panic inside the library.
    Internal = 7,
}

/// A number field: ℚ or a real quadratic field.
pub struct Gl2kField(FieldDescriptor);

/// A regular elliptic datum.
pub struct Gl2kDatum(EllipticDatum);

/// A verification report.
pub struct Gl2kReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> Gl2kStatus {
    match e {
        Error::Resource(_) | Error::Quadrature(_) => Gl2kStatus::Resource,
        Error::UndefinedInput(_) | Error::SquareDiscriminant | Error::InvalidDivisor(_) | Error::Pole(_) => Gl2kStatus::Undefined,
        Error::InvalidField(_) | Error::NotApplicable(_) => Gl2kStatus::InvalidArgument,
        Error::UnsupportedPrime(_) | Error::UnsupportedRegime(_) | Error::Nonconvergent(_) => Gl2kStatus::Unsupported,
        Error::Config(_) => Gl2kStatus::Config,
    }
}

struct Failure(Gl2kStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> Gl2kStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            Gl2kStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Gl2kStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(Gl2kStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    write(out, Box::into_raw(Box::new(value)), "out")
}

fn narrow(v: i128, what: &str) -> Result<i64, Failure> {
    i64::try_from(v).map_err(|_| Failure(Gl2kStatus::Resource, format!("{what} exceeds 64 bits")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(Gl2kStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread; empty after a successful call. The
/// pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn gl2k_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates the rational field.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_field_rational(out: *mut *mut Gl2kField) -> Gl2kStatus {
    guard(|| boxed(out, Gl2kField(FieldDescriptor::rational())))
}

/// Creates `ℚ(√m)` for squarefree `m > 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_field_quadratic(m: i64, out: *mut *mut Gl2kField) -> Gl2kStatus {
    guard(|| boxed(out, Gl2kField(FieldDescriptor::real_quadratic(m)?)))
}

/// Discriminant of the field (1 for ℚ).
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_field_discriminant(field: *const Gl2kField, out: *mut i64) -> Gl2kStatus {
    guard(|| write(out, deref(field, "field")?.0.disc, "out"))
}

/// Releases a field handle; null is ignored.
///
/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl2k_field_free(field: *mut Gl2kField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Creates a datum with `det γ = u·ρ^k` and trace `τ`, where `ρ` generates the prime of
/// index `index` above `p`. Integers are given as `x + yω`.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_datum_new(
    field: *const Gl2kField,
    p: u64,
    index: u8,
    k: u32,
    u_x: i64,
    u_y: i64,
    tau_x: i64,
    tau_y: i64,
    out: *mut *mut Gl2kDatum,
) -> Gl2kStatus {
    guard(|| {
        let field = &deref(field, "field")?.0;
        let primes = field.split_prime(p)?;
        let prime = primes
            .get(index as usize)
            .ok_or_else(|| Failure(Gl2kStatus::InvalidArgument, format!("no prime of index {index} above {p}")))?;
        let rho = if field.is_rational() {
            AlgInt::int(p as i128)
        } else {
            field
                .find_generator(&field.prime_power(prime, 1), 200)
                .ok_or_else(|| Failure(Gl2kStatus::Undefined, format!("no small generator for the prime above {p}")))?
        };
        let u = AlgInt::new(u_x as i128, u_y as i128);
        let tau = AlgInt::new(tau_x as i128, tau_y as i128);
        boxed(out, Gl2kDatum(EllipticDatum::new(field, prime, 1, rho, k, u, tau)?))
    })
}

/// Discriminant `δ = τ² − 4 det γ` as `x + yω`.
///
/// # Safety
/// `datum` must be a live handle; `x` and `y` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_datum_delta(datum: *const Gl2kDatum, x: *mut i64, y: *mut i64) -> Gl2kStatus {
    guard(|| {
        let delta = deref(datum, "datum")?.0.delta();
        write(x, narrow(delta.x, "δ")?, "x")?;
        write(y, narrow(delta.y, "δ")?, "y")
    })
}

/// Finite orbital value as a reduced fraction `numer/denom`, before the `p^{-k/2}` scaling.
///
/// # Safety
/// `datum` must be a live handle; `numer` and `denom` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_datum_finite_orbital(datum: *const Gl2kDatum, numer: *mut i64, denom: *mut i64) -> Gl2kStatus {
    guard(|| {
        let value = deref(datum, "datum")?.0.finite_orbital()?.rational;
        write(numer, narrow(*value.numer(), "orbital value")?, "numer")?;
        write(denom, narrow(*value.denom(), "orbital value")?, "denom")
    })
}

/// Truncated global Dirichlet series at `z` over primes of norm at most `bound`, with its
/// closed form and the tail bound of the truncation. Requires `Re z > 1`.
///
/// # Safety
/// `datum` must be a live handle; `value` and `closed` must point to two doubles each
/// (real, imaginary); `tail_bound` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_global_dirichlet(
    datum: *const Gl2kDatum,
    z_re: f64,
    z_im: f64,
    bound: u64,
    value: *mut f64,
    closed: *mut f64,
    tail_bound: *mut f64,
) -> Gl2kStatus {
    guard(|| {
        let datum = &deref(datum, "datum")?.0;
        if value.is_null() || closed.is_null() {
            return Err(null("value or closed"));
        }
        let g = global_dirichlet(datum, Complex64::new(z_re, z_im), Truncation::PrimeSupport { bound })?;
        value.write(g.eval.value.re);
        value.add(1).write(g.eval.value.im);
        closed.write(g.closed.re);
        closed.add(1).write(g.closed.im);
        write(tail_bound, g.eval.tail_bound, "tail_bound")
    })
}

/// Local Kloosterman-type sum at `𝔮^v, 𝔮^r` with constant `4uρ^{k'}`, for the prime of
/// index `index` above `q` and `ρ = ρ_x + ρ_y ω`. Writes the enumerated value and, when a
/// closed form applies, sets `has_closed` and writes it to `closed`.
///
/// # Safety
/// `field` must be a live handle; the output pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_local_sum(
    field: *const Gl2kField,
    q: u64,
    index: u8,
    v: u32,
    r: u32,
    u_x: i64,
    u_y: i64,
    rho_x: i64,
    rho_y: i64,
    k_prime: u32,
    bruteforce: *mut i64,
    closed: *mut i64,
    has_closed: *mut bool,
) -> Gl2kStatus {
    guard(|| {
        let field = &deref(field, "field")?.0;
        let prime = field
            .split_prime(q)?
            .into_iter()
            .nth(index as usize)
            .ok_or_else(|| Failure(Gl2kStatus::InvalidArgument, format!("no prime of index {index} above {q}")))?;
        let params = LocalSumParams {
            prime,
            v,
            r,
            u: AlgInt::new(u_x as i128, u_y as i128),
            rho: AlgInt::new(rho_x as i128, rho_y as i128),
            k_prime,
        };
        write(bruteforce, narrow(local_sum_bruteforce(field, &params)?, "sum")?, "bruteforce")?;
        match local_sum_closed(field, &params) {
            Ok(c) => {
                write(closed, narrow(c, "sum")?, "closed")?;
                write(has_closed, true, "has_closed")
            }
            Err(Error::UnsupportedRegime(_)) => write(has_closed, false, "has_closed"),
            Err(e) => Err(e.into()),
        }
    })
}

/// Releases a datum handle; null is ignored.
///
/// # Safety
/// `datum` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl2k_datum_free(datum: *mut Gl2kDatum) {
    if !datum.is_null() {
        drop(Box::from_raw(datum));
    }
}

/// Runs the suite named `suite` (`verify-dirichlet`, `verify-lfun` or `verify-orbital`)
/// under the TOML configuration `config` (may be empty or null for defaults).
///
/// # Safety
/// `suite` must be a nul-terminated string, `config` null or nul-terminated, and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_run_suite(suite: *const c_char, config: *const c_char, out: *mut *mut Gl2kReport) -> Gl2kStatus {
    guard(|| {
        let suite = text(suite, "suite")?;
        let cfg = if config.is_null() { RunConfig::from_toml("")? } else { RunConfig::from_toml(text(config, "config")?)? };
        let report = match suite {
            "verify-dirichlet" => suites::verify_dirichlet(&cfg)?,
            "verify-lfun" => suites::verify_lfun(&cfg)?,
            "verify-orbital" => suites::verify_orbital(&cfg)?,
            other => return Err(Failure(Gl2kStatus::InvalidArgument, format!("unknown suite {other:?}"))),
        };
        boxed(out, Gl2kReport(report))
    })
}

/// Whether every check in the report passed.
///
/// # Safety
/// `report` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_report_pass(report: *const Gl2kReport, out: *mut bool) -> Gl2kStatus {
    guard(|| write(out, deref(report, "report")?.0.pass, "out"))
}

/// Number of checks and failed checks in the report.
///
/// # Safety
/// `report` must be a live handle; `checks` and `failed` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_report_counts(report: *const Gl2kReport, checks: *mut usize, failed: *mut usize) -> Gl2kStatus {
    guard(|| {
        let r = &deref(report, "report")?.0;
        write(checks, r.checks.len(), "checks")?;
        write(failed, r.failures().count(), "failed")
    })
}

/// The report as JSON. Release the string with [`gl2k_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gl2k_report_json(report: *const Gl2kReport, out: *mut *mut c_char) -> Gl2kStatus {
    guard(|| {
        let json = deref(report, "report")?.0.to_json();
        let s = CString::new(json).map_err(|_| Failure(Gl2kStatus::Internal, "report contains nul".into()))?;
        write(out, s.into_raw(), "out")
    })
}

/// Releases a report handle; null is ignored.
///
/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl2k_report_free(report: *mut Gl2kReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl2k_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
