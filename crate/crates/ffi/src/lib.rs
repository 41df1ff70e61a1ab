//! C interface to the efg-cyclic solvers.
//!
//! Games and traces are opaque handles owned by the caller and released with
//! the matching `_free` function. Every fallible function returns an
//! [`EfgStatus`]; on failure [`efg_last_error_message`] describes the error
//! for the calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use efg_cyclic::blocks::BlockStrategy;
use efg_cyclic::error::{GameError, RegularizerError, SolverError};
use efg_cyclic::games::{generate, load_game, save_game, GameInstance};
use efg_cyclic::regularizer::LocalKind;
use efg_cyclic::solvers::{
    duality_gap, run_solver, Algorithm, Averaging, Init, RunConfig, SolverTrace,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfgStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Numerical = 3,
    Io = 4,
    UnknownGame = 5,
    Format = 6,
    Infeasible = 7,
    InvalidUtf8 = 8,
    OutOfRange = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfgAlgorithm {
    Ecyclicpda = 0,
    MirrorProx = 1,
    CfrPlus = 2,
    PcfrPlus = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfgRegularizer {
    Entropy = 0,
    Euclidean = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfgAveraging {
    /// The algorithm's own default.
    Default = 0,
    Uniform = 1,
    Linear = 2,
    Quadratic = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfgBlocks {
    Single = 0,
    Infosets = 1,
    Children = 2,
    Postorder = 3,
}

/// Solver configuration; fill with [`efg_config_default`] first.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EfgSolveConfig {
    /// An `EfgAlgorithm` value.
    pub algorithm: u32,
    /// An `EfgRegularizer` value.
    pub regularizer: u32,
    /// An `EfgAveraging` value.
    pub averaging: u32,
    /// An `EfgBlocks` value.
    pub blocks: u32,
    /// Stepsize multiplier `2^multiplier_exp`.
    pub multiplier_exp: i32,
    /// Gradient computations.
    pub budget: u64,
    /// Gradient computations between checkpoints; 0 picks by game size.
    pub cadence: u64,
    /// Restart fraction in (0, 1); 0 disables restarts.
    pub restart_beta: f64,
    /// Nonzero: start from a random interior point drawn from `seed`.
    pub use_seed: u8,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EfgCheckpoint {
    pub grad_computations: u64,
    pub duality_gap: f64,
    pub wall_ms: f64,
    pub restarted: u8,
}

/// Opaque game handle.
pub struct EfgGame(GameInstance);

/// Opaque solver trace handle.
pub struct EfgTrace(SolverTrace);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(EfgStatus, String);

impl From<GameError> for Fail {
    fn from(e: GameError) -> Self {
        let status = match &e {
            GameError::UnknownGame(_) => EfgStatus::UnknownGame,
            GameError::Io(_) => EfgStatus::Io,
            GameError::Format(_) | GameError::Treeplex(_) => EfgStatus::Format,
            GameError::BadParam(_) => EfgStatus::Config,
        };
        Fail(status, e.to_string())
    }
}

impl From<SolverError> for Fail {
    fn from(e: SolverError) -> Self {
        let status = match &e {
            SolverError::Numerical(_)
            | SolverError::Regularizer(RegularizerError::NonFiniteInput { .. })
            | SolverError::Regularizer(RegularizerError::CenterNotInterior { .. }) => {
                EfgStatus::Numerical
            }
            SolverError::Infeasible(_) => EfgStatus::Infeasible,
            _ => EfgStatus::Config,
        };
        Fail(status, e.to_string())
    }
}

fn fail(status: EfgStatus, msg: impl Into<String>) -> Fail {
    Fail(status, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EfgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EfgStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EfgStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(EfgStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(EfgStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| fail(EfgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| fail(EfgStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(fail(EfgStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn efg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Defaults: ECyclicPDA, entropy, algorithm averaging, single block,
/// multiplier 1, budget 10000, size-based cadence, no restarts, uniform start.
#[no_mangle]
pub extern "C" fn efg_config_default() -> EfgSolveConfig {
    EfgSolveConfig {
        algorithm: EfgAlgorithm::Ecyclicpda as u32,
        regularizer: EfgRegularizer::Entropy as u32,
        averaging: EfgAveraging::Default as u32,
        blocks: EfgBlocks::Single as u32,
        multiplier_exp: 0,
        budget: 10_000,
        cadence: 0,
        restart_beta: 0.0,
        use_seed: 0,
        seed: 0,
    }
}

/// Generates a named benchmark game into `*out`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn efg_game_generate(
    name: *const c_char,
    out: *mut *mut EfgGame,
) -> EfgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let g = generate(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(EfgGame(g)));
        Ok(())
    })
}

/// Loads an EFG-SF v1 file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn efg_game_load(path: *const c_char, out: *mut *mut EfgGame) -> EfgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let g = load_game(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(EfgGame(g)));
        Ok(())
    })
}

/// Writes `game` as EFG-SF v1.
///
/// # Safety
/// `game` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn efg_game_save(game: *const EfgGame, path: *const c_char) -> EfgStatus {
    guard(|| {
        let g = ref_arg(game, "game")?;
        save_game(&g.0, str_arg(path, "path")?)?;
        Ok(())
    })
}

/// Releases a game; null is ignored.
///
/// # Safety
/// `game` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn efg_game_free(game: *mut EfgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Sequence counts of both players and the payoff nonzero count.
///
/// # Safety
/// `game` must come from this library; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn efg_game_dims(
    game: *const EfgGame,
    n_x: *mut usize,
    n_y: *mut usize,
    nnz: *mut usize,
) -> EfgStatus {
    guard(|| {
        let g = ref_arg(game, "game")?;
        let (a, b, c) = g.0.dims();
        *out_arg(n_x, "n_x")? = a;
        *out_arg(n_y, "n_y")? = b;
        *out_arg(nnz, "nnz")? = c;
        Ok(())
    })
}

fn pick<T: Copy>(v: u32, options: &[T], what: &str) -> Result<T, Fail> {
    options
        .get(v as usize)
        .copied()
        .ok_or_else(|| fail(EfgStatus::Config, format!("bad {what} value {v}")))
}

fn to_config(c: &EfgSolveConfig) -> Result<RunConfig, Fail> {
    Ok(RunConfig {
        algorithm: pick(c.algorithm, &Algorithm::ALL, "algorithm")?,
        regularizer: pick(
            c.regularizer,
            &[LocalKind::Entropy, LocalKind::Euclidean],
            "regularizer",
        )?,
        averaging: pick(
            c.averaging,
            &[
                None,
                Some(Averaging::Uniform),
                Some(Averaging::Linear),
                Some(Averaging::Quadratic),
            ],
            "averaging",
        )?,
        blocks: pick(c.blocks, &BlockStrategy::ALL, "blocks")?,
        multiplier_exp: c.multiplier_exp,
        budget: c.budget,
        cadence: (c.cadence > 0).then_some(c.cadence),
        restart_beta: (c.restart_beta != 0.0).then_some(c.restart_beta),
        init: if c.use_seed != 0 {
            Init::Random(c.seed)
        } else {
            Init::Uniform
        },
        ..RunConfig::default()
    })
}

/// Runs a solver and stores the trace in `*out`.
///
/// # Safety
/// `game` must come from this library; `config` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn efg_solve(
    game: *const EfgGame,
    config: *const EfgSolveConfig,
    out: *mut *mut EfgTrace,
) -> EfgStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let g = ref_arg(game, "game")?;
        let cfg = to_config(ref_arg(config, "config")?)?;
        let trace = run_solver(&g.0, &cfg)?;
        *out = Box::into_raw(Box::new(EfgTrace(trace)));
        Ok(())
    })
}

/// Releases a trace; null is ignored.
///
/// # Safety
/// `trace` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn efg_trace_free(trace: *mut EfgTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of checkpoints.
///
/// # Safety
/// `trace` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn efg_trace_len(trace: *const EfgTrace, out: *mut usize) -> EfgStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(trace, "trace")?.0.checkpoints.len();
        Ok(())
    })
}

/// Checkpoint `index`.
///
/// # Safety
/// `trace` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn efg_trace_checkpoint(
    trace: *const EfgTrace,
    index: usize,
    out: *mut EfgCheckpoint,
) -> EfgStatus {
    guard(|| {
        let t = &ref_arg(trace, "trace")?.0;
        let out = out_arg(out, "out")?;
        let c = t.checkpoints.get(index).ok_or_else(|| {
            fail(
                EfgStatus::OutOfRange,
                format!("checkpoint {index} of {}", t.checkpoints.len()),
            )
        })?;
        *out = EfgCheckpoint {
            grad_computations: c.grad_computations,
            duality_gap: c.duality_gap,
            wall_ms: c.wall_ms,
            restarted: u8::from(c.restarted),
        };
        Ok(())
    })
}

/// Copies the final average of `player` (0 for x, 1 for y) into `buf`, which
/// must hold exactly that player's sequence count.
///
/// # Safety
/// `trace` must come from this library; `buf` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn efg_trace_average(
    trace: *const EfgTrace,
    player: u32,
    buf: *mut f64,
    len: usize,
) -> EfgStatus {
    guard(|| {
        let t = &ref_arg(trace, "trace")?.0;
        let v = match player {
            0 => &t.x_average,
            1 => &t.y_average,
            p => return Err(fail(EfgStatus::OutOfRange, format!("player {p}"))),
        };
        if len != v.len() {
            return Err(fail(
                EfgStatus::OutOfRange,
                format!("buffer holds {len} values, need {}", v.len()),
            ));
        }
        if buf.is_null() {
            return Err(fail(EfgStatus::NullPointer, "buf is null"));
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(v);
        Ok(())
    })
}

/// Duality gap of the sequence-form pair `(x, y)`.
///
/// # Safety
/// `game` must come from this library; `x` and `y` must hold `n_x` and `n_y`
/// doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn efg_duality_gap(
    game: *const EfgGame,
    x: *const f64,
    n_x: usize,
    y: *const f64,
    n_y: usize,
    out: *mut f64,
) -> EfgStatus {
    guard(|| {
        let g = &ref_arg(game, "game")?.0;
        let out = out_arg(out, "out")?;
        let (ex, ey, _) = g.dims();
        if n_x != ex || n_y != ey {
            return Err(fail(
                EfgStatus::OutOfRange,
                format!("expected lengths ({ex}, {ey}), got ({n_x}, {n_y})"),
            ));
        }
        *out = duality_gap(g, slice_arg(x, n_x, "x")?, slice_arg(y, n_y, "y")?)?;
        Ok(())
    })
}
