//! C ABI over the `bidgame` crate.
//!
//! Every function returns a [`BgStatus`]; on failure the message is kept per
//! thread and read with [`bg_last_error`]. Handles are opaque and released
//! with their matching `_free` function. Strings handed out by the library
//! are freed with [`bg_string_free`].

use bidgame::amount::Amount;
use bidgame::cli::{build_strategy, StrategySpec};
use bidgame::num::{fmt_q, parse_q, q_to_f64, Q};
use bidgame::richman::{as_richman, build_ssg, richman_exact, solve_ssg};
use bidgame::sim::{run_episode, summary_json, trace_jsonl, EpisodeConfig, EpisodeTrace, GameState};
use bidgame::{load_arena, Arena, Error, Player};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Domain = 5,
    Internal = 6,
    OutOfRange = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// A loaded game arena.
pub struct BgArena(Arena);

/// Exact per-vertex values.
pub struct BgValues(Vec<Q>);

/// A finished episode.
pub struct BgTrace {
    arena: Arena,
    trace: EpisodeTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(BgStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match e {
            Error::Parse { .. } => BgStatus::Parse,
            Error::Validation(_) => BgStatus::Validation,
            Error::Domain(_) => BgStatus::Domain,
            Error::Internal(_) => BgStatus::Internal,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BgStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("panic inside the library");
            BgStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(BgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(BgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn obj<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn bg_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parses an arena from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bg_arena_load(text: *const c_char, out: *mut *mut BgArena) -> BgStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let arena = load_arena(text)?;
        put(out, Box::into_raw(Box::new(BgArena(arena))), "out")
    })
}

/// # Safety
/// `arena` must come from [`bg_arena_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_arena_free(arena: *mut BgArena) {
    if !arena.is_null() {
        drop(Box::from_raw(arena));
    }
}

/// # Safety
/// `arena` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_arena_vertex_count(arena: *const BgArena, out: *mut usize) -> BgStatus {
    guard(|| put(out, obj(arena, "arena")?.0.n(), "out"))
}

/// Index of the vertex called `name`.
///
/// # Safety
/// `arena` must be a live handle, `name` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_arena_vertex_index(arena: *const BgArena, name: *const c_char, out: *mut usize) -> BgStatus {
    guard(|| {
        let a = &obj(arena, "arena")?.0;
        let v = a.require(str_arg(name, "name")?)?;
        put(out, v, "out")
    })
}

/// Exact thresholds: richman and reachability values, or the thresholds of
/// parity and mean-payoff games.
///
/// # Safety
/// `arena` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_solve_exact(arena: *const BgArena, out: *mut *mut BgValues) -> BgStatus {
    guard(|| {
        let a = &obj(arena, "arena")?.0;
        let values = match a.objective {
            bidgame::ObjectiveKind::Parity => bidgame::parity::parity_thresholds(a)?.values,
            bidgame::ObjectiveKind::MeanPayoff => bidgame::meanpayoff::mp_thresholds(a)?.values,
            _ => {
                let rich = as_richman(a)?;
                let mut v = richman_exact(&rich)?.values;
                v.truncate(a.n());
                v
            }
        };
        put(out, Box::into_raw(Box::new(BgValues(values))), "out")
    })
}

/// Float thresholds of a richman or reachability game through its
/// stochastic game. `out` receives one value per vertex.
///
/// # Safety
/// `arena` must be a live handle and `out` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bg_solve_float(arena: *const BgArena, tol: f64, out: *mut f64, len: usize) -> BgStatus {
    guard(|| {
        let a = &obj(arena, "arena")?.0;
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Fail(BgStatus::OutOfRange, "tolerance must be positive".into()));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        if len < a.n() {
            return Err(Fail(BgStatus::BufferTooSmall, format!("need {} entries", a.n())));
        }
        let rich = as_richman(a)?;
        let ssg = build_ssg(&rich)?;
        let val = solve_ssg(&ssg, tol)?;
        for v in 0..a.n() {
            out.add(v).write(1.0 - val[ssg.entry[v]]);
        }
        Ok(())
    })
}

/// # Safety
/// `values` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_values_len(values: *const BgValues, out: *mut usize) -> BgStatus {
    guard(|| put(out, obj(values, "values")?.0.len(), "out"))
}

/// # Safety
/// `values` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_values_get_f64(values: *const BgValues, index: usize, out: *mut f64) -> BgStatus {
    guard(|| {
        let x = obj(values, "values")?.0.get(index).ok_or_else(|| Fail(BgStatus::OutOfRange, format!("no value {index}")))?;
        put(out, q_to_f64(x), "out")
    })
}

/// The value as `p/q` in a newly allocated string.
///
/// # Safety
/// `values` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_values_get_string(values: *const BgValues, index: usize, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let x = obj(values, "values")?.0.get(index).ok_or_else(|| Fail(BgStatus::OutOfRange, format!("no value {index}")))?;
        put(out, into_c_string(fmt_q(x)), "out")
    })
}

/// # Safety
/// `values` must come from [`bg_solve_exact`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_values_free(values: *mut BgValues) {
    if !values.is_null() {
        drop(Box::from_raw(values));
    }
}

/// Plays one episode from `start` with strategies given as
/// `name[:key=value,...]`. `budget1` and `energy` are rationals such as
/// `3/10` or `0.3`; a null `energy` means 0, or the level a Max strategy
/// asks for.
///
/// # Safety
/// Pointers must be live handles, NUL-terminated strings or writable as named.
#[no_mangle]
pub unsafe extern "C" fn bg_simulate(
    arena: *const BgArena,
    p1: *const c_char,
    p2: *const c_char,
    budget1: *const c_char,
    energy: *const c_char,
    start: usize,
    horizon: u64,
    seed: u64,
    out: *mut *mut BgTrace,
) -> BgStatus {
    guard(|| {
        let a = &obj(arena, "arena")?.0;
        let rational = |p: *const c_char, what: &str| -> Result<Q, Fail> {
            let s = str_arg(p, what)?;
            parse_q(s).ok_or_else(|| Fail(BgStatus::Parse, format!("{what}: {s} is not a rational")))
        };
        let b1 = rational(budget1, "budget1")?;
        if b1 < Q::from_integer(0.into()) || b1 > Q::from_integer(1.into()) {
            return Err(Fail(BgStatus::OutOfRange, "budget1 must lie in [0, 1]".into()));
        }
        let b2 = Q::from_integer(1.into()) - &b1;
        let given = if energy.is_null() { None } else { Some(rational(energy, "energy")?) };
        if start >= a.n() {
            return Err(Fail(BgStatus::OutOfRange, format!("start {start} is not a vertex")));
        }
        let spec1 = StrategySpec::parse(str_arg(p1, "p1")?)?;
        let spec2 = StrategySpec::parse(str_arg(p2, "p2")?)?;
        let probe = given.clone().unwrap_or_else(|| Q::from_integer(0.into()));
        let build = |e: &Q| -> Result<_, Fail> {
            Ok((build_strategy(a, &spec1, Player::One, &b1, start, e, seed)?, build_strategy(a, &spec2, Player::Two, &b2, start, e, seed)?))
        };
        let (f1, f2) = build(&probe)?;
        let e0 = given.or(f1.energy).or(f2.energy).unwrap_or(probe);
        let (mut s1, mut s2) = build(&e0)?;
        let init = GameState::new(start, Amount::from_q(&b1), e0);
        let trace = run_episode(a, s1.strategy.as_mut(), s2.strategy.as_mut(), init, &EpisodeConfig::new(horizon))?;
        put(out, Box::into_raw(Box::new(BgTrace { arena: a.clone(), trace })), "out")
    })
}

/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_rounds(trace: *const BgTrace, out: *mut u64) -> BgStatus {
    guard(|| put(out, obj(trace, "trace")?.trace.summary.rounds, "out"))
}

/// 1 when no monitor failed and nobody played illegally, else 0.
///
/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_all_passed(trace: *const BgTrace, out: *mut i32) -> BgStatus {
    guard(|| put(out, obj(trace, "trace")?.trace.all_passed() as i32, "out"))
}

/// The episode as JSON lines (one per round, then the summary), or only
/// the summary line when `summary_only` is non-zero.
///
/// # Safety
/// `trace` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_json(trace: *const BgTrace, summary_only: i32, out: *mut *mut c_char) -> BgStatus {
    guard(|| {
        let t = obj(trace, "trace")?;
        let text = if summary_only != 0 { summary_json(&t.arena, &t.trace).to_string() } else { trace_jsonl(&t.arena, &t.trace) };
        put(out, into_c_string(text), "out")
    })
}

/// # Safety
/// `trace` must come from [`bg_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_trace_free(trace: *mut BgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// # Safety
/// `s` must be a string returned by this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
