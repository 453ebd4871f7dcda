//! C ABI over the `nclab` library.
//!
//! Objects are opaque handles created by `nclab_*_new`/`nclab_*_parse`
//! style constructors and released with the matching `_free`. Every fallible
//! function returns an [`NclabStatus`]; on failure the message is available
//! from [`nclab_last_error`] on the same thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nclab::matalg::{HermitianOperator, Matrix, TraceState};
use nclab::moments::{exact_mixed_moment, MomentWord};
use nclab::ncpoly::{decompose_to_power_sums, parse_polynomial, DecomposeOptions, NcPolynomial, PowerSumDecomposition};
use nclab::tensorlab::{commutator_norm, ordered_cf_tensor, TensorSystem};
use nclab::Error;
use num_complex::Complex64;
use num_rational::BigRational;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NclabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Parse errors, bad arguments, dimension mismatches.
    InvalidInput = 3,
    /// Degree, term, dimension or partition cap exceeded.
    CapExceeded = 4,
    /// Non-Hermitian input, eigensolver or other numerical failure.
    Numerical = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

impl From<&Error> for NclabStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DegreeCap { .. } | Error::TermCap { .. } | Error::DimensionCap { .. } | Error::PartitionCap { .. } => {
                NclabStatus::CapExceeded
            }
            Error::NotHermitian { .. } | Error::Eigen(_) | Error::Numerical(_) | Error::Internal(_) => {
                NclabStatus::Numerical
            }
            _ => NclabStatus::InvalidInput,
        }
    }
}

/// Parsed noncommutative polynomial.
pub struct NclabPolynomial(NcPolynomial);

/// Power-sum decomposition of a polynomial.
pub struct NclabDecomposition(PowerSumDecomposition);

/// Hermitian matrix.
pub struct NclabOperator(HermitianOperator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: NclabStatus, msg: impl Into<String>) -> NclabStatus {
    set_error(msg.into());
    status
}

fn lib_err(e: Error) -> NclabStatus {
    fail(NclabStatus::from(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), NclabStatus>) -> NclabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NclabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(NclabStatus::Panic, "panic inside nclab"),
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, NclabStatus> {
    p.as_ref().ok_or_else(|| fail(NclabStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, NclabStatus> {
    p.as_mut().ok_or_else(|| fail(NclabStatus::NullPointer, format!("{name} is null")))
}

unsafe fn operators<'a>(ops: *const *const NclabOperator, count: usize) -> Result<Vec<&'a HermitianOperator>, NclabStatus> {
    if ops.is_null() {
        return Err(fail(NclabStatus::NullPointer, "ops is null"));
    }
    std::slice::from_raw_parts(ops, count).iter().map(|&p| deref(p, "operator").map(|o| &o.0)).collect()
}

fn into_c_string(s: String) -> Result<*mut c_char, NclabStatus> {
    CString::new(s).map(CString::into_raw).map_err(|_| fail(NclabStatus::Numerical, "string contains NUL"))
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nclab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nclab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `text` over `generators` letters `A1..Aa`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_poly` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_polynomial_parse(
    text: *const c_char,
    generators: usize,
    out_poly: *mut *mut NclabPolynomial,
) -> NclabStatus {
    guard(|| {
        let slot = out(out_poly, "out_poly")?;
        *slot = ptr::null_mut();
        let text = deref(text, "text")?;
        let text = CStr::from_ptr(text).to_str().map_err(|_| fail(NclabStatus::InvalidUtf8, "text is not UTF-8"))?;
        let p = parse_polynomial(text, generators).map_err(lib_err)?;
        *slot = Box::into_raw(Box::new(NclabPolynomial(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`nclab_polynomial_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nclab_polynomial_free(p: *mut NclabPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live polynomial handle and `out_sa` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_polynomial_is_self_adjoint(p: *const NclabPolynomial, out_sa: *mut bool) -> NclabStatus {
    guard(|| {
        *out(out_sa, "out_sa")? = deref(p, "p")?.0.is_self_adjoint();
        Ok(())
    })
}

/// # Safety
/// `p` must be a live polynomial handle and `out_degree` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_polynomial_degree(p: *const NclabPolynomial, out_degree: *mut usize) -> NclabStatus {
    guard(|| {
        *out(out_degree, "out_degree")? = deref(p, "p")?.0.degree();
        Ok(())
    })
}

/// Canonical text form; release with [`nclab_string_free`].
///
/// # Safety
/// `p` must be a live polynomial handle and `out_text` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_polynomial_to_string(p: *const NclabPolynomial, out_text: *mut *mut c_char) -> NclabStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = into_c_string(deref(p, "p")?.0.to_string())?;
        Ok(())
    })
}

/// Decomposes `p` into power sums of Lie elements with merge ratio
/// `q_num/q_den` and the default caps.
///
/// # Safety
/// `p` must be a live polynomial handle and `out_dec` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_decompose(
    p: *const NclabPolynomial,
    q_num: i64,
    q_den: i64,
    out_dec: *mut *mut NclabDecomposition,
) -> NclabStatus {
    guard(|| {
        let slot = out(out_dec, "out_dec")?;
        *slot = ptr::null_mut();
        let p = deref(p, "p")?;
        if q_den == 0 {
            return Err(fail(NclabStatus::InvalidInput, "q denominator is zero"));
        }
        let q = BigRational::new(q_num.into(), q_den.into());
        let opts = DecomposeOptions { q, ..DecomposeOptions::default() };
        let d = decompose_to_power_sums(&p.0, &opts).map_err(lib_err)?;
        *slot = Box::into_raw(Box::new(NclabDecomposition(d)));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from [`nclab_decompose`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nclab_decomposition_free(d: *mut NclabDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live decomposition handle and `out_len` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_decomposition_len(d: *const NclabDecomposition, out_len: *mut usize) -> NclabStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(d, "d")?.0.terms().len();
        Ok(())
    })
}

/// Coefficient (rounded to double) and exponent of term `index`.
///
/// # Safety
/// `d` must be a live decomposition handle; the out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_decomposition_term(
    d: *const NclabDecomposition,
    index: usize,
    out_re: *mut f64,
    out_im: *mut f64,
    out_exponent: *mut u32,
) -> NclabStatus {
    guard(|| {
        let terms = deref(d, "d")?.0.terms();
        let term =
            terms.get(index).ok_or_else(|| fail(NclabStatus::InvalidInput, format!("term {index} of {}", terms.len())))?;
        let c = term.coeff.to_complex64();
        *out(out_re, "out_re")? = c.re;
        *out(out_im, "out_im")? = c.im;
        *out(out_exponent, "out_exponent")? = term.exponent;
        Ok(())
    })
}

/// Exact JSON report; release with [`nclab_string_free`].
///
/// # Safety
/// `d` must be a live decomposition handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_decomposition_to_json(d: *const NclabDecomposition, out_json: *mut *mut c_char) -> NclabStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = into_c_string(deref(d, "d")?.0.to_json().to_string())?;
        Ok(())
    })
}

/// Whether `d` re-expands exactly to `p`.
///
/// # Safety
/// `d`, `p` must be live handles and `out_equal` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_decomposition_round_trip(
    d: *const NclabDecomposition,
    p: *const NclabPolynomial,
    out_equal: *mut bool,
) -> NclabStatus {
    guard(|| {
        let d = &deref(d, "d")?.0;
        let p = &deref(p, "p")?.0;
        *out(out_equal, "out_equal")? = d.expand() == p.clone().with_generators(d.generators());
        Ok(())
    })
}

/// Hermitian operator from `dim²` row-major entries given as interleaved
/// `(re, im)` doubles.
///
/// # Safety
/// `entries` must point to `2·dim²` readable doubles and `out_op` be writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_operator_new(dim: usize, entries: *const f64, out_op: *mut *mut NclabOperator) -> NclabStatus {
    guard(|| {
        let slot = out(out_op, "out_op")?;
        *slot = ptr::null_mut();
        if entries.is_null() {
            return Err(fail(NclabStatus::NullPointer, "entries is null"));
        }
        if dim == 0 {
            return Err(fail(NclabStatus::InvalidInput, "dim must be at least 1"));
        }
        let e = std::slice::from_raw_parts(entries, 2 * dim * dim);
        let m = Matrix::from_fn(dim, dim, |r, c| Complex64::new(e[2 * (r * dim + c)], e[2 * (r * dim + c) + 1]));
        let op = HermitianOperator::new(m).map_err(lib_err)?;
        *slot = Box::into_raw(Box::new(NclabOperator(op)));
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from [`nclab_operator_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nclab_operator_free(op: *mut NclabOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live operator handle and `out_dim` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_operator_dim(op: *const NclabOperator, out_dim: *mut usize) -> NclabStatus {
    guard(|| {
        *out(out_dim, "out_dim")? = deref(op, "op")?.0.dim();
        Ok(())
    })
}

/// Ascending eigenvalues into `buf`, which must hold at least `dim` values.
///
/// # Safety
/// `op` must be a live operator handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn nclab_operator_eigenvalues(op: *const NclabOperator, buf: *mut f64, len: usize) -> NclabStatus {
    guard(|| {
        let op = &deref(op, "op")?.0;
        if buf.is_null() {
            return Err(fail(NclabStatus::NullPointer, "buf is null"));
        }
        if len < op.dim() {
            return Err(fail(NclabStatus::BufferTooSmall, format!("need {} values, buffer holds {len}", op.dim())));
        }
        let ev = op.eigenvalues().map_err(lib_err)?;
        std::slice::from_raw_parts_mut(buf, ev.len()).copy_from_slice(ev);
        Ok(())
    })
}

/// `‖[Ã^α, B̃^β]‖` under the product trace on `copies` tensor factors.
///
/// # Safety
/// `a`, `b` must be live operator handles and `out_norm` writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_commutator_norm(
    a: *const NclabOperator,
    b: *const NclabOperator,
    alpha: u32,
    beta: u32,
    copies: usize,
    out_norm: *mut f64,
) -> NclabStatus {
    guard(|| {
        let (a, b) = (&deref(a, "a")?.0, &deref(b, "b")?.0);
        let sys = TensorSystem::new(a.dim(), copies).map_err(lib_err)?;
        *out(out_norm, "out_norm")? = commutator_norm(a, b, alpha, beta, &sys).map_err(lib_err)?;
        Ok(())
    })
}

/// `ρ^{⊗N}(Ã_{w₁}⋯Ã_{w_m})` for the normalized trace, with 1-based letters.
///
/// # Safety
/// `ops` must point to `count` live operator handles, `word` to `len`
/// readable values, and the out pointers be writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_exact_moment(
    ops: *const *const NclabOperator,
    count: usize,
    word: *const u32,
    len: usize,
    n: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NclabStatus {
    guard(|| {
        let ops = operators(ops, count)?;
        let dim = ops.first().ok_or_else(|| fail(NclabStatus::InvalidInput, "no operators"))?.dim();
        let letters: &[u32] = if len == 0 {
            &[]
        } else if word.is_null() {
            return Err(fail(NclabStatus::NullPointer, "word is null"));
        } else {
            std::slice::from_raw_parts(word, len)
        };
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l as usize > count) {
            return Err(fail(NclabStatus::InvalidInput, format!("letter {bad} outside 1..={count}")));
        }
        let letters: Vec<usize> = letters.iter().map(|&l| l as usize).collect();
        let w = MomentWord::from_one_based(&letters);
        let v = exact_mixed_moment(&TraceState::tracial(dim), &ops, &w, n).map_err(lib_err)?;
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}

/// `ρ^{⊗N}(e^{it₁Ã₁}⋯e^{it_aÃ_a})` at one point `t` of length `count`.
///
/// # Safety
/// `ops` must point to `count` live operator handles, `t` to `count`
/// readable doubles, and the out pointers be writable.
#[no_mangle]
pub unsafe extern "C" fn nclab_ordered_cf(
    ops: *const *const NclabOperator,
    count: usize,
    t: *const f64,
    copies: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> NclabStatus {
    guard(|| {
        let ops = operators(ops, count)?;
        let dim = ops.first().ok_or_else(|| fail(NclabStatus::InvalidInput, "no operators"))?.dim();
        let t = std::slice::from_raw_parts(deref(t, "t")?, count).to_vec();
        let sys = TensorSystem::new(dim, copies).map_err(lib_err)?;
        let v = ordered_cf_tensor(&ops, &[t], &sys).map_err(lib_err)?[0];
        *out(out_re, "out_re")? = v.re;
        *out(out_im, "out_im")? = v.im;
        Ok(())
    })
}
