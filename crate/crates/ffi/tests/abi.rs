use bidgame_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

const DETOUR: &str = "objective richman\nvertex v0\nvertex v1 target=2\nvertex v2\nvertex t target=1\n\
                    edge v0 v1\nedge v0 v2\nedge v2 v0\nedge v2 t\n";

fn load(text: &str) -> *mut BgArena {
    let c = CString::new(text).unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { bg_arena_load(c.as_ptr(), &mut a) }, BgStatus::Ok);
    a
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe { bg_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn exact_and_float_values() {
    let a = load(DETOUR);
    let mut n = 0;
    assert_eq!(unsafe { bg_arena_vertex_count(a, &mut n) }, BgStatus::Ok);
    assert_eq!(n, 4);
    let mut values = ptr::null_mut();
    assert_eq!(unsafe { bg_solve_exact(a, &mut values) }, BgStatus::Ok);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { bg_values_get_string(values, 2, &mut s) }, BgStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "1/3");
    unsafe { bg_string_free(s) };
    let mut x = 0.0;
    assert_eq!(unsafe { bg_values_get_f64(values, 9, &mut x) }, BgStatus::OutOfRange);
    let mut floats = [0.0; 4];
    assert_eq!(unsafe { bg_solve_float(a, 1e-10, floats.as_mut_ptr(), 4) }, BgStatus::Ok);
    assert!((floats[0] - 2.0 / 3.0).abs() < 1e-8);
    assert_eq!(unsafe { bg_solve_float(a, 1e-10, floats.as_mut_ptr(), 2) }, BgStatus::BufferTooSmall);
    unsafe {
        bg_values_free(values);
        bg_arena_free(a);
    }
}

#[test]
fn errors_are_reported() {
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { bg_arena_load(ptr::null(), &mut a) }, BgStatus::NullPointer);
    let bad = CString::new("vertex a\nedge a nowhere\n").unwrap();
    let status = unsafe { bg_arena_load(bad.as_ptr(), &mut a) };
    assert!(matches!(status, BgStatus::Parse | BgStatus::Validation), "{status:?}");
    assert!(!last_error().is_empty());
    let arena = load(DETOUR);
    let name = CString::new("missing").unwrap();
    let mut v = 0;
    assert_ne!(unsafe { bg_arena_vertex_index(arena, name.as_ptr(), &mut v) }, BgStatus::Ok);
    let name = CString::new("t").unwrap();
    assert_eq!(unsafe { bg_arena_vertex_index(arena, name.as_ptr(), &mut v) }, BgStatus::Ok);
    assert_eq!(v, 3);
    assert_eq!(last_error(), "");
    unsafe { bg_arena_free(arena) };
}

#[test]
fn simulation_round_trip() {
    let a = load(DETOUR);
    let p1 = CString::new("richman").unwrap();
    let p2 = CString::new("random:seed=7").unwrap();
    let b = CString::new("0.76").unwrap();
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { bg_simulate(a, p1.as_ptr(), p2.as_ptr(), b.as_ptr(), ptr::null(), 0, 50, 1, &mut t) }, BgStatus::Ok);
    let (mut rounds, mut passed) = (0, 0);
    unsafe {
        bg_trace_rounds(t, &mut rounds);
        bg_trace_all_passed(t, &mut passed);
    }
    assert!(rounds <= 2 && passed == 1);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { bg_trace_json(t, 1, &mut json) }, BgStatus::Ok);
    let summary: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    assert_eq!(summary["absorbed"], 1);
    unsafe {
        bg_string_free(json);
        bg_trace_free(t);
    }
    let low = CString::new("0.5").unwrap();
    let status = unsafe { bg_simulate(a, p1.as_ptr(), p2.as_ptr(), low.as_ptr(), ptr::null(), 0, 50, 1, &mut t) };
    assert_eq!(status, BgStatus::Domain);
    let unknown = CString::new("teleport").unwrap();
    let status = unsafe { bg_simulate(a, unknown.as_ptr(), p2.as_ptr(), b.as_ptr(), ptr::null(), 0, 50, 1, &mut t) };
    assert_eq!(status, BgStatus::Parse);
    unsafe { bg_arena_free(a) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bidgame.h")).unwrap();
    for f in ["bg_arena_load", "bg_solve_exact", "bg_solve_float", "bg_simulate", "bg_trace_json", "bg_last_error", "bg_string_free"] {
        assert!(header.contains(&format!(" {f}(")), "{f}");
    }
    assert!(header.contains("typedef struct BgArena BgArena;"));
}

/// Builds the C smoke test against the static library and runs it.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib_dir = deps.parent().unwrap();
    assert!(lib_dir.join("libbidgame_ffi.a").exists(), "static library missing in {}", lib_dir.display());
    let exe = deps.join("bidgame_ffi_smoke");
    let status = std::process::Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(lib_dir.join("libbidgame_ffi.a"))
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("v0 2/3"));
}
