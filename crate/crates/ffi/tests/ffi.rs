use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use efg_cyclic_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(efg_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn generate(name: &str) -> *mut EfgGame {
    let name = CString::new(name).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { efg_game_generate(name.as_ptr(), &mut g) },
        EfgStatus::Ok
    );
    assert!(!g.is_null());
    g
}

fn dims(g: *const EfgGame) -> (usize, usize, usize) {
    let (mut a, mut b, mut c) = (0, 0, 0);
    assert_eq!(
        unsafe { efg_game_dims(g, &mut a, &mut b, &mut c) },
        EfgStatus::Ok
    );
    (a, b, c)
}

#[test]
fn generate_dims_and_free() {
    let g = generate("kuhn");
    assert_eq!(dims(g), (14, 13, 30));
    unsafe { efg_game_free(g) };
    unsafe { efg_game_free(ptr::null_mut()) };
}

#[test]
fn unknown_game_sets_message() {
    let name = CString::new("nosuchgame").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { efg_game_generate(name.as_ptr(), &mut g) },
        EfgStatus::UnknownGame
    );
    assert!(g.is_null());
    assert!(last_error().contains("nosuchgame"));
}

#[test]
fn null_arguments() {
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { efg_game_generate(ptr::null(), &mut g) },
        EfgStatus::NullPointer
    );
    let name = CString::new("kuhn").unwrap();
    assert_eq!(
        unsafe { efg_game_generate(name.as_ptr(), ptr::null_mut()) },
        EfgStatus::NullPointer
    );
    let mut n = 0;
    assert_eq!(
        unsafe { efg_trace_len(ptr::null(), &mut n) },
        EfgStatus::NullPointer
    );
}

#[test]
fn save_load_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("k.efgsf").to_str().unwrap()).unwrap();
    let g = generate("kuhn");
    assert_eq!(unsafe { efg_game_save(g, path.as_ptr()) }, EfgStatus::Ok);
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { efg_game_load(path.as_ptr(), &mut h) },
        EfgStatus::Ok
    );
    assert_eq!(dims(h), dims(g));
    unsafe { efg_game_free(h) };
    let missing = CString::new(dir.path().join("none").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { efg_game_load(missing.as_ptr(), &mut h) },
        EfgStatus::Io
    );
    assert!(h.is_null());
    unsafe { efg_game_free(g) };
}

#[test]
fn solve_and_read_trace() {
    let g = generate("kuhn");
    let mut cfg = efg_config_default();
    cfg.algorithm = EfgAlgorithm::CfrPlus as u32;
    cfg.budget = 1000;
    cfg.cadence = 100;
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { efg_solve(g, &cfg, &mut t) }, EfgStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { efg_trace_len(t, &mut n) }, EfgStatus::Ok);
    assert_eq!(n, 10);
    let mut c = EfgCheckpoint::default();
    assert_eq!(unsafe { efg_trace_checkpoint(t, 9, &mut c) }, EfgStatus::Ok);
    assert_eq!(c.grad_computations, 1000);
    assert_eq!(
        unsafe { efg_trace_checkpoint(t, 10, &mut c) },
        EfgStatus::OutOfRange
    );

    let (nx, ny, _) = dims(g);
    let mut x = vec![0.0; nx];
    let mut y = vec![0.0; ny];
    assert_eq!(
        unsafe { efg_trace_average(t, 0, x.as_mut_ptr(), nx) },
        EfgStatus::Ok
    );
    assert_eq!(
        unsafe { efg_trace_average(t, 1, y.as_mut_ptr(), ny) },
        EfgStatus::Ok
    );
    assert_eq!(
        unsafe { efg_trace_average(t, 1, y.as_mut_ptr(), ny - 1) },
        EfgStatus::OutOfRange
    );
    let mut gap = f64::NAN;
    assert_eq!(
        unsafe { efg_duality_gap(g, x.as_ptr(), nx, y.as_ptr(), ny, &mut gap) },
        EfgStatus::Ok
    );
    assert!((gap - c.duality_gap).abs() < 1e-12);
    unsafe {
        efg_trace_free(t);
        efg_game_free(g);
    }
}

#[test]
fn bad_config_values() {
    let g = generate("matching_pennies");
    let mut t = ptr::null_mut();
    let mut cfg = efg_config_default();
    cfg.algorithm = 17;
    assert_eq!(unsafe { efg_solve(g, &cfg, &mut t) }, EfgStatus::Config);
    assert!(last_error().contains("algorithm"));
    let mut cfg = efg_config_default();
    cfg.restart_beta = 1.5;
    assert_eq!(unsafe { efg_solve(g, &cfg, &mut t) }, EfgStatus::Config);
    assert!(t.is_null());
    unsafe { efg_game_free(g) };
}

#[test]
fn infeasible_gap_input() {
    let g = generate("matching_pennies");
    let x = [1.0, 1.0, 1.0];
    let y = [1.0, 0.5, 0.5];
    let mut gap = 0.0;
    assert_eq!(
        unsafe { efg_duality_gap(g, x.as_ptr(), 3, y.as_ptr(), 3, &mut gap) },
        EfgStatus::Infeasible
    );
    assert_eq!(
        unsafe { efg_duality_gap(g, x.as_ptr(), 2, y.as_ptr(), 3, &mut gap) },
        EfgStatus::OutOfRange
    );
    unsafe { efg_game_free(g) };
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/efg_cyclic.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "efg_game_generate",
        "efg_game_load",
        "efg_game_save",
        "efg_game_free",
        "efg_game_dims",
        "efg_solve",
        "efg_trace_len",
        "efg_trace_checkpoint",
        "efg_trace_average",
        "efg_trace_free",
        "efg_duality_gap",
        "efg_last_error_message",
        "efg_config_default",
        "typedef struct EfgGame EfgGame;",
        "typedef struct EfgTrace EfgTrace;",
    ] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    // Syntax check with the system C compiler when one is available.
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-xc"])
        .arg(&header)
        .output()
    {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libefg_cyclic_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!(
            "skipping: no C compiler or static library at {}",
            lib.display()
        );
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let out = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(
        run.status.success(),
        "exit {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.starts_with("200 2000 "), "{stdout}");
}
