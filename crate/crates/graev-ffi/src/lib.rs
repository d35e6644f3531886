//! C ABI for the graev-core library.
//!
//! Conventions:
//! - Handles are opaque pointers created by `*_new` and released by the
//!   matching `*_free`; passing them to any other library is undefined.
//! - Every fallible call returns a [`GraevStatus`]; on failure
//!   [`graev_last_error`] returns a thread-local UTF-8 message that stays
//!   valid until the next failing call on the same thread.
//! - Rational results are returned through [`GraevRational`] out-pointers
//!   as reduced `num/den` with `den > 0`; nothing is ever rounded.
//! - All `const char *` arguments must be NUL-terminated UTF-8.
//!
//! The generated header is `include/graev.h` (written by the build script).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use graev_core::combinatorics::{evaluate, nf_inv, nf_mul, NormalForm};
use graev_core::parse::{parse_amalgam_word, parse_file, parse_t_word};
use graev_core::product::{graev_norm, graev_norm_with, NormStrategy};
use graev_core::rational::Rat;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraevStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input text does not parse; see `graev_last_error`.
    ParseError = 3,
    /// A word does not parse over the system's alphabet.
    WordError = 4,
    /// A mathematical validation failed; see `graev_last_error`.
    MathError = 5,
    /// The library panicked internally; the handle is still usable.
    InternalError = 6,
}

/// An exact rational `num/den` in lowest terms, `den > 0`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GraevRational {
    pub num: i64,
    pub den: i64,
}

impl From<Rat> for GraevRational {
    fn from(r: Rat) -> Self {
        GraevRational { num: r.numer(), den: r.denom() }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(status: GraevStatus, msg: impl Into<Vec<u8>>) -> GraevStatus {
    let c = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
    status
}

/// The message of the last failing call on this thread. Never NULL; empty
/// before the first failure. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn graev_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// An amalgamated free product of finite metric groups, ready for distance
/// queries. Opaque.
pub struct GraevSystem {
    sys: graev_core::amalgam::AmalgamSystem,
}

/// An HNN extension of a finite metric group, ready for distance queries.
/// Opaque.
pub struct GraevHnn {
    group: graev_core::group::FiniteMetricGroup,
    hnn: graev_core::hnn::HnnGroup,
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GraevStatus> {
    if p.is_null() {
        return Err(set_error(GraevStatus::NullArgument, "NULL string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| set_error(GraevStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn guard<F: FnOnce() -> GraevStatus>(f: F) -> GraevStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => set_error(GraevStatus::InternalError, "internal panic"),
    }
}

/// Parse `text` (the documented line-oriented format) and build the
/// amalgam it declares. On success writes a handle to `out`.
///
/// # Safety
/// `text` must be NUL-terminated and `out` non-NULL and writable.
#[no_mangle]
pub unsafe extern "C" fn graev_system_new(
    text: *const c_char,
    out: *mut *mut GraevSystem,
) -> GraevStatus {
    guard(|| {
        if out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL out pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match parse_file(text) {
            Ok(f) => f,
            Err(e) => return set_error(GraevStatus::ParseError, e.to_string()),
        };
        match file.build_amalgam() {
            Ok(sys) => {
                *out = Box::into_raw(Box::new(GraevSystem { sys }));
                GraevStatus::Ok
            }
            Err(e) => set_error(GraevStatus::MathError, e.to_string()),
        }
    })
}

/// Release a handle created by `graev_system_new`. NULL is a no-op.
///
/// # Safety
/// `h` must come from `graev_system_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn graev_system_free(h: *mut GraevSystem) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn system_word(
    h: *const GraevSystem,
    w: *const c_char,
) -> Result<(&'static GraevSystem, NormalForm<graev_core::amalgam::AmLetter>), GraevStatus> {
    if h.is_null() {
        return Err(set_error(GraevStatus::NullArgument, "NULL system handle"));
    }
    let sys = &*h;
    let text = read_str(w)?;
    let word = parse_amalgam_word(&sys.sys, text)
        .map_err(|e| set_error(GraevStatus::WordError, e.to_string()))?;
    Ok((sys, evaluate(&sys.sys, &word)))
}

/// The Graev norm of the element spelled by `word`.
///
/// # Safety
/// `h` must be a live handle; `word` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn graev_system_norm(
    h: *const GraevSystem,
    word: *const c_char,
    out: *mut GraevRational,
) -> GraevStatus {
    guard(|| {
        if out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL out pointer");
        }
        match system_word(h, word) {
            Ok((sys, nf)) => {
                *out = graev_norm(&sys.sys, &nf).value.into();
                GraevStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// The Graev distance between the elements spelled by `f` and `g`.
///
/// # Safety
/// As for `graev_system_norm`.
#[no_mangle]
pub unsafe extern "C" fn graev_system_distance(
    h: *const GraevSystem,
    f: *const c_char,
    g: *const c_char,
    out: *mut GraevRational,
) -> GraevStatus {
    guard(|| {
        if out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL out pointer");
        }
        let (sys, nf) = match system_word(h, f) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let (_, ng) = match system_word(h, g) {
            Ok(x) => x,
            Err(s) => return s,
        };
        let diff = nf_mul(&sys.sys, &nf, &nf_inv(&sys.sys, &ng));
        *out = graev_norm(&sys.sys, &diff).value.into();
        GraevStatus::Ok
    })
}

/// Like `graev_system_norm` but cross-checked against the brute-force
/// search up to words of length `max_len`; fails with `MathError` if the
/// two strategies disagree.
///
/// # Safety
/// As for `graev_system_norm`.
#[no_mangle]
pub unsafe extern "C" fn graev_system_norm_checked(
    h: *const GraevSystem,
    word: *const c_char,
    max_len: usize,
    out: *mut GraevRational,
) -> GraevStatus {
    guard(|| {
        if out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL out pointer");
        }
        match system_word(h, word) {
            Ok((sys, nf)) => {
                match graev_norm_with(&sys.sys, &nf, NormStrategy::Both { max_len }) {
                    Ok(r) => {
                        *out = r.value.into();
                        GraevStatus::Ok
                    }
                    Err(e) => set_error(GraevStatus::MathError, e.to_string()),
                }
            }
            Err(s) => s,
        }
    })
}

/// Parse `text`, build the HNN extension it declares, and cap the explored
/// words at stable-letter degree `t_cap`.
///
/// # Safety
/// As for `graev_system_new`.
#[no_mangle]
pub unsafe extern "C" fn graev_hnn_new(
    text: *const c_char,
    t_cap: i64,
    out: *mut *mut GraevHnn,
) -> GraevStatus {
    guard(|| {
        if out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL out pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match parse_file(text) {
            Ok(f) => f,
            Err(e) => return set_error(GraevStatus::ParseError, e.to_string()),
        };
        let system = match file.build_hnn() {
            Ok(s) => s,
            Err(e) => return set_error(GraevStatus::ParseError, e.to_string()),
        };
        let group = system.group.clone();
        match graev_core::hnn::hnn_construct(system, t_cap) {
            Ok(hnn) => {
                *out = Box::into_raw(Box::new(GraevHnn { group, hnn }));
                GraevStatus::Ok
            }
            Err(e) => set_error(GraevStatus::MathError, e.to_string()),
        }
    })
}

/// Release a handle created by `graev_hnn_new`. NULL is a no-op.
///
/// # Safety
/// `h` must come from `graev_hnn_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn graev_hnn_free(h: *mut GraevHnn) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// The distance between two stable-letter words in the HNN extension,
/// minimized over representing pairs of length at most `max_len`.
///
/// # Safety
/// As for `graev_system_distance`.
#[no_mangle]
pub unsafe extern "C" fn graev_hnn_distance(
    h: *const GraevHnn,
    f: *const c_char,
    g: *const c_char,
    max_len: usize,
    out: *mut GraevRational,
) -> GraevStatus {
    guard(|| {
        if h.is_null() || out.is_null() {
            return set_error(GraevStatus::NullArgument, "NULL handle or out pointer");
        }
        let hnn = &*h;
        let parse = |p: *const c_char| -> Result<_, GraevStatus> {
            let text = read_str(p)?;
            parse_t_word(&hnn.group, text)
                .map_err(|e| set_error(GraevStatus::WordError, e.to_string()))
        };
        let wf = match parse(f) {
            Ok(w) => w,
            Err(s) => return s,
        };
        let wg = match parse(g) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match hnn.hnn.distance(&wf, &wg, max_len) {
            Ok(r) => {
                *out = r.value.into();
                GraevStatus::Ok
            }
            Err(e) => set_error(GraevStatus::MathError, e.to_string()),
        }
    })
}

/// Validate everything `text` declares. Returns `Ok` when every check
/// passes, `MathError` with the first failing report otherwise, or
/// `ParseError` if the text does not parse.
///
/// # Safety
/// `text` must be NUL-terminated UTF-8 (or NULL, which fails cleanly).
#[no_mangle]
pub unsafe extern "C" fn graev_validate(text: *const c_char) -> GraevStatus {
    guard(|| {
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match parse_file(text) {
            Ok(f) => f,
            Err(e) => return set_error(GraevStatus::ParseError, e.to_string()),
        };
        for g in &file.groups {
            let r = graev_core::group::validate_group(&g.table);
            if !r.passed {
                return set_error(GraevStatus::MathError, r.render());
            }
            let r = graev_core::group::validate_tsi_metric(g);
            if !r.passed {
                return set_error(GraevStatus::MathError, r.render());
            }
        }
        if !file.groups.is_empty() {
            match file.build_amalgam() {
                Ok(sys) => {
                    let r = sys.check();
                    if !r.passed {
                        return set_error(GraevStatus::MathError, r.render());
                    }
                }
                Err(e) => return set_error(GraevStatus::MathError, e.to_string()),
            }
        }
        if file.hnn.is_some() {
            match file.build_hnn() {
                Ok(sys) => {
                    let r = sys.validate();
                    if !r.passed {
                        return set_error(GraevStatus::MathError, r.render());
                    }
                }
                Err(e) => return set_error(GraevStatus::MathError, e.to_string()),
            }
        }
        GraevStatus::Ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    const Z2_Z3: &str = "\
group Z2
elements e a
table
e a
a e
metric
0 1
1 0

group Z3
elements e b b2
table
e b b2
b b2 e
b2 e b
metric
0 1 1
1 0 1
1 1 0
";

    fn c(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn round_trip_distance() {
        let text = c(Z2_Z3);
        let mut h: *mut GraevSystem = ptr::null_mut();
        unsafe {
            assert_eq!(graev_system_new(text.as_ptr(), &mut h), GraevStatus::Ok);
            let mut out = GraevRational { num: -1, den: -1 };
            let f = c("e");
            let g = c("ab");
            assert_eq!(
                graev_system_distance(h, f.as_ptr(), g.as_ptr(), &mut out),
                GraevStatus::Ok
            );
            assert_eq!((out.num, out.den), (2, 1));
            let w = c("a");
            assert_eq!(graev_system_norm(h, w.as_ptr(), &mut out), GraevStatus::Ok);
            assert_eq!((out.num, out.den), (1, 1));
            assert_eq!(
                graev_system_norm_checked(h, w.as_ptr(), 4, &mut out),
                GraevStatus::Ok
            );
            assert_eq!((out.num, out.den), (1, 1));
            graev_system_free(h);
        }
    }

    #[test]
    fn error_paths() {
        unsafe {
            let mut h: *mut GraevSystem = ptr::null_mut();
            let bad = c("grouple X");
            assert_eq!(graev_system_new(bad.as_ptr(), &mut h), GraevStatus::ParseError);
            let msg = CStr::from_ptr(graev_last_error()).to_str().unwrap();
            assert!(msg.contains("line 1"), "{msg}");
            assert_eq!(
                graev_system_new(ptr::null(), &mut h),
                GraevStatus::NullArgument
            );
            let good = c(Z2_Z3);
            assert_eq!(graev_system_new(good.as_ptr(), &mut h), GraevStatus::Ok);
            let mut out = GraevRational { num: 0, den: 0 };
            let junk = c("zz");
            assert_eq!(
                graev_system_norm(h, junk.as_ptr(), &mut out),
                GraevStatus::WordError
            );
            graev_system_free(h);
            assert_eq!(graev_validate(good.as_ptr()), GraevStatus::Ok);
            let broken = c(
                "group B\nelements e a b\ntable\ne a b\na b e\nb e a\nmetric\n0 1 5\n1 0 1\n5 1 0\n",
            );
            assert_eq!(graev_validate(broken.as_ptr()), GraevStatus::MathError);
        }
    }

    #[test]
    fn hnn_distance() {
        let text = c("\
group Z2
elements e a
table
e a
a e
metric
0 1
1 0
subgroup A = e a
subgroup B = e a

hnn base Z2 A A B B phi e->e a->a K 1
");
        let mut h: *mut GraevHnn = ptr::null_mut();
        unsafe {
            assert_eq!(graev_hnn_new(text.as_ptr(), 2, &mut h), GraevStatus::Ok);
            let mut out = GraevRational { num: 0, den: 0 };
            let f = c("t");
            let g = c("e");
            assert_eq!(
                graev_hnn_distance(h, f.as_ptr(), g.as_ptr(), 4, &mut out),
                GraevStatus::Ok
            );
            assert_eq!((out.num, out.den), (1, 1));
            graev_hnn_free(h);
        }
    }
}
