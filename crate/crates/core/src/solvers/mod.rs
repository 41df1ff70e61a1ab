//! Solvers, gap evaluation and the run driver.
//!
//! Work is measured in gradient computations: one product with the payoff
//! matrix for one player. ECyclicPDA, CFR+ and PCFR+ use two per iteration,
//! mirror prox four.

pub mod cfr;
pub mod ecyclic;
pub mod gap;
pub mod mirror_prox;
pub mod stepsize;
pub mod sweep;
pub mod trace;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::{single_block, BlockStrategy};
use crate::error::SolverError;
use crate::games::GameInstance;
use crate::regularizer::{DilatedRegularizer, LocalKind};
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex, ROOT_SEQ};

pub use cfr::{cfr_plus_step, pcfr_plus_step, CfrState};
pub use ecyclic::{
    ecyclicpda_reference_step, ecyclicpda_step, BlockPlan, Ecyclic, EcyclicState, ProxAnchor,
};
pub use gap::{best_response, duality_gap, Sense};
pub use mirror_prox::{mirror_prox_step, MirrorProxState};
pub use stepsize::{compute_mu, StepSizeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    ECyclicPda,
    MirrorProx,
    CfrPlus,
    PcfrPlus,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::ECyclicPda,
        Algorithm::MirrorProx,
        Algorithm::CfrPlus,
        Algorithm::PcfrPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ECyclicPda => "ecyclicpda",
            Algorithm::MirrorProx => "mp",
            Algorithm::CfrPlus => "cfr+",
            Algorithm::PcfrPlus => "pcfr+",
        }
    }

    /// Gradient computations per iteration.
    pub fn grad_units(self) -> u64 {
        match self {
            Algorithm::MirrorProx => 4,
            _ => 2,
        }
    }

    pub fn default_averaging(self) -> Averaging {
        match self {
            Algorithm::CfrPlus => Averaging::Linear,
            Algorithm::PcfrPlus => Averaging::Quadratic,
            _ => Averaging::Uniform,
        }
    }

    pub fn uses_regularizer(self) -> bool {
        matches!(self, Algorithm::ECyclicPda | Algorithm::MirrorProx)
    }

    pub fn uses_blocks(self) -> bool {
        self == Algorithm::ECyclicPda
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, SolverError> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                SolverError::Config(format!(
                    "unknown algorithm '{s}' (expected ecyclicpda, mp, cfr+ or pcfr+)"
                ))
            })
    }
}

/// Weight `w_k` of iterate `k` (1-based) in the running average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Averaging {
    Uniform,
    Linear,
    Quadratic,
}

impl Averaging {
    pub fn weight(self, k: u64) -> f64 {
        let k = k as f64;
        match self {
            Averaging::Uniform => 1.0,
            Averaging::Linear => k,
            Averaging::Quadratic => k * k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Averaging::Uniform => "uniform",
            Averaging::Linear => "linear",
            Averaging::Quadratic => "quadratic",
        }
    }
}

impl FromStr for Averaging {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, SolverError> {
        [Averaging::Uniform, Averaging::Linear, Averaging::Quadratic]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| SolverError::Config(format!("unknown averaging '{s}'")))
    }
}

/// Running weighted average `avg += w_k / W_k * (x_k - avg)`. Before the
/// first update it holds the start point.
#[derive(Debug, Clone)]
pub struct Averager {
    kind: Averaging,
    wsum: f64,
    avg: SequenceVector,
}

impl Averager {
    pub fn new(kind: Averaging, start: &[f64]) -> Self {
        Averager {
            kind,
            wsum: 0.0,
            avg: SequenceVector(start.to_vec()),
        }
    }

    pub fn kind(&self) -> Averaging {
        self.kind
    }

    pub fn update(&mut self, k: u64, x: &[f64]) {
        let w = self.kind.weight(k);
        self.wsum += w;
        let a = w / self.wsum;
        for (m, v) in self.avg.iter_mut().zip(x) {
            *m += a * (v - *m);
        }
    }

    pub fn value(&self) -> &[f64] {
        &self.avg
    }
}

/// Starting point of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Uniform,
    /// Random interior behavioral strategies drawn from the seed.
    Random(u64),
}

/// Random behavioral strategy with every probability at least `floor / n_j`
/// of the local mass, in sequence form.
pub fn random_strategy<R: Rng>(t: &Treeplex, rng: &mut R, floor: f64) -> SequenceVector {
    let mut b = vec![0.0; t.n_sequences()];
    b[ROOT_SEQ] = 1.0;
    for p in t.points() {
        let r = p.seqs();
        let n = p.n_actions() as f64;
        let draws: Vec<f64> = r
            .clone()
            .map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln())
            .collect();
        let total: f64 = draws.iter().sum();
        for (s, d) in r.zip(draws) {
            b[s] = floor / n + (1.0 - floor) * d / total;
        }
    }
    let b = BehavioralStrategy::from_flat(t, b).expect("dims match");
    t.behavioral_to_sequence(&b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub regularizer: LocalKind,
    /// `None` picks the algorithm's default.
    pub averaging: Option<Averaging>,
    pub blocks: BlockStrategy,
    /// Stepsize multiplier `2^multiplier_exp`.
    pub multiplier_exp: i32,
    /// Gradient computations.
    pub budget: u64,
    /// Gradient computations between checkpoints; `None` picks by game size.
    pub cadence: Option<u64>,
    pub restart_beta: Option<f64>,
    pub init: Init,
    /// `None` picks the regularizer's default.
    pub anchor: Option<ProxAnchor>,
    /// Stop at the first checkpoint at or below this gap.
    pub target_gap: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::ECyclicPda,
            regularizer: LocalKind::Entropy,
            averaging: None,
            blocks: BlockStrategy::Single,
            multiplier_exp: 0,
            budget: 10_000,
            cadence: None,
            restart_beta: None,
            init: Init::Uniform,
            anchor: None,
            target_gap: None,
        }
    }
}

/// Gap checks of the restart monitor happen every this many gradient computations.
pub const RESTART_CHECK_EVERY: u64 = 50;

/// 10 below 10^4 sequences in total, 100 otherwise.
pub fn default_cadence(game: &GameInstance) -> u64 {
    if game.treeplex_x.n_sequences() + game.treeplex_y.n_sequences() < 10_000 {
        10
    } else {
        100
    }
}

impl RunConfig {
    pub fn multiplier(&self) -> f64 {
        2f64.powi(self.multiplier_exp)
    }

    pub fn averaging(&self) -> Averaging {
        self.averaging.unwrap_or(self.algorithm.default_averaging())
    }

    pub fn anchor(&self) -> ProxAnchor {
        self.anchor
            .unwrap_or(ProxAnchor::default_for(self.regularizer))
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.budget < self.algorithm.grad_units() {
            return Err(SolverError::Config(format!(
                "budget {} is below one {} iteration ({} gradient computations)",
                self.budget,
                self.algorithm,
                self.algorithm.grad_units()
            )));
        }
        if self.cadence == Some(0) {
            return Err(SolverError::Config("cadence must be positive".into()));
        }
        if let Some(b) = self.restart_beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(SolverError::Config(format!(
                    "restart beta must lie in (0, 1), got {b}"
                )));
            }
        }
        if !(-1000..=1000).contains(&self.multiplier_exp) {
            return Err(SolverError::Config(format!(
                "multiplier exponent {} out of range",
                self.multiplier_exp
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub grad_computations: u64,
    /// Gap of the averages; for restarted runs the best gap seen so far.
    pub duality_gap: f64,
    pub wall_ms: f64,
    /// A restart happened since the previous checkpoint.
    pub restarted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub checkpoints: Vec<Checkpoint>,
    pub x_average: SequenceVector,
    pub y_average: SequenceVector,
    /// Stepsize parameters; `None` for the regret-matching methods.
    pub step: Option<StepSizeParams>,
    pub iterations: u64,
    pub grad_computations: u64,
    /// Payoff entries visited by gradient computations.
    pub touches: u64,
    pub restarts: usize,
}

impl SolverTrace {
    /// Gap at the last checkpoint, or infinity without checkpoints.
    pub fn final_gap(&self) -> f64 {
        self.checkpoints
            .last()
            .map_or(f64::INFINITY, |c| c.duality_gap)
    }
}

enum Engine {
    Ecyclic(Box<Ecyclic>, EcyclicState),
    Mp(DilatedRegularizer, DilatedRegularizer, MirrorProxState),
    Cfr(CfrState),
}

impl Engine {
    fn step(&mut self, game: &GameInstance, eta: f64) -> Result<(), SolverError> {
        match self {
            Engine::Ecyclic(e, st) => e.step(st, game, eta),
            Engine::Mp(rx, ry, st) => mirror_prox_step(st, game, rx, ry, eta),
            Engine::Cfr(st) => {
                if st.is_predictive() {
                    pcfr_plus_step(st, game)
                } else {
                    cfr_plus_step(st, game)
                }
            }
        }
    }

    fn averages(&self) -> (&[f64], &[f64]) {
        match self {
            Engine::Ecyclic(_, st) => (st.x.average(), st.y.average()),
            Engine::Mp(_, _, st) => (st.x_average(), st.y_average()),
            Engine::Cfr(st) => (st.x_average(), st.y_average()),
        }
    }

    fn restart(&mut self, game: &GameInstance, x: &[f64], y: &[f64]) -> Result<(), SolverError> {
        match self {
            Engine::Ecyclic(_, st) => st.restart(game, x, y),
            Engine::Mp(_, _, st) => st.restart(game, x, y),
            Engine::Cfr(st) => st.restart(game, x, y),
        }
    }

    fn touches(&self) -> u64 {
        match self {
            Engine::Ecyclic(_, st) => st.touches,
            Engine::Mp(_, _, st) => st.touches,
            Engine::Cfr(st) => st.touches,
        }
    }
}

fn build_engine(
    game: &GameInstance,
    cfg: &RunConfig,
    x0: &[f64],
    y0: &[f64],
) -> Result<(Engine, Option<StepSizeParams>), SolverError> {
    let avg = cfg.averaging();
    let regs = || {
        (
            DilatedRegularizer::new(cfg.regularizer, &game.treeplex_x),
            DilatedRegularizer::new(cfg.regularizer, &game.treeplex_y),
        )
    };
    Ok(match cfg.algorithm {
        Algorithm::ECyclicPda => {
            let (rx, ry) = regs();
            let plan = BlockPlan::from_strategy(game, cfg.blocks)?;
            let (mu_x, mu_y) = compute_mu(game, plan.x(), plan.y(), rx.norm())?;
            let step = StepSizeParams::new(
                mu_x,
                mu_y,
                rx.strong_convexity(),
                ry.strong_convexity(),
                cfg.multiplier(),
            );
            let solver = Ecyclic {
                reg_x: rx,
                reg_y: ry,
                plan,
                anchor: cfg.anchor(),
            };
            (
                Engine::Ecyclic(Box::new(solver), EcyclicState::new(game, x0, y0, avg)?),
                Some(step),
            )
        }
        Algorithm::MirrorProx => {
            let (rx, ry) = regs();
            let px = single_block(&game.treeplex_x)?;
            let py = single_block(&game.treeplex_y)?;
            let (mu_x, mu_y) = compute_mu(game, &px, &py, rx.norm())?;
            let step = StepSizeParams::new(
                mu_x,
                mu_y,
                rx.strong_convexity(),
                ry.strong_convexity(),
                cfg.multiplier(),
            );
            let st = MirrorProxState::new(game, x0, y0, avg)?;
            (Engine::Mp(rx, ry, st), Some(step))
        }
        Algorithm::CfrPlus | Algorithm::PcfrPlus => {
            let st = CfrState::new(game, x0, y0, avg, cfg.algorithm == Algorithm::PcfrPlus)?;
            (Engine::Cfr(st), None)
        }
    })
}

fn start_points(game: &GameInstance, init: Init) -> (SequenceVector, SequenceVector) {
    match init {
        Init::Uniform => (
            game.treeplex_x.uniform_strategy(),
            game.treeplex_y.uniform_strategy(),
        ),
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_strategy(&game.treeplex_x, &mut rng, 0.1);
            let y = random_strategy(&game.treeplex_y, &mut rng, 0.1);
            (x, y)
        }
    }
}

const FEASIBILITY_TOL: f64 = 1e-9;

fn check_averages(game: &GameInstance, x: &[f64], y: &[f64]) -> Result<(), SolverError> {
    if !game.treeplex_x.check_feasible(x, FEASIBILITY_TOL)?
        || !game.treeplex_y.check_feasible(y, FEASIBILITY_TOL)?
    {
        return Err(SolverError::Numerical(
            "average left the strategy space".into(),
        ));
    }
    Ok(())
}

/// Runs `cfg` and collects the trace.
pub fn run_solver(game: &GameInstance, cfg: &RunConfig) -> Result<SolverTrace, SolverError> {
    run_solver_with(game, cfg, |_| {})
}

/// Runs `cfg`, handing every checkpoint to `on_checkpoint` as soon as it is
/// recorded. With `restart_beta` set this is the restart wrapper.
pub fn run_solver_with<F: FnMut(&Checkpoint)>(
    game: &GameInstance,
    cfg: &RunConfig,
    mut on_checkpoint: F,
) -> Result<SolverTrace, SolverError> {
    cfg.validate()?;
    let clock = Instant::now();
    let (x0, y0) = start_points(game, cfg.init);
    let (mut engine, step) = build_engine(game, cfg, &x0, &y0)?;
    let eta = step.map_or(0.0, |s| s.eta);
    let units = cfg.algorithm.grad_units();
    let iterations = cfg.budget / units;
    let cadence = cfg.cadence.unwrap_or_else(|| default_cadence(game));

    let mut checkpoints = Vec::new();
    let mut grads = 0u64;
    let mut next_checkpoint = cadence;
    let mut next_restart_check = RESTART_CHECK_EVERY;
    let mut gap_ref = match cfg.restart_beta {
        Some(_) => gap::gap_unchecked(game, &x0, &y0),
        None => f64::INFINITY,
    };
    let mut best = f64::INFINITY;
    let mut restarts = 0;
    let mut pending_restart = false;
    let mut done = 0;

    for _ in 0..iterations {
        engine.step(game, eta)?;
        done += 1;
        grads += units;
        let mut gap_now = None;
        if let Some(beta) = cfg.restart_beta {
            if grads >= next_restart_check {
                while next_restart_check <= grads {
                    next_restart_check += RESTART_CHECK_EVERY;
                }
                let (x, y) = engine.averages();
                let g = gap::gap_unchecked(game, x, y);
                gap_now = Some(g);
                best = best.min(g);
                if g <= beta * gap_ref {
                    let (x, y) = (x.to_vec(), y.to_vec());
                    engine.restart(game, &x, &y)?;
                    gap_ref = g;
                    restarts += 1;
                    pending_restart = true;
                }
            }
        }
        if grads >= next_checkpoint {
            while next_checkpoint <= grads {
                next_checkpoint += cadence;
            }
            let (x, y) = engine.averages();
            check_averages(game, x, y)?;
            let g = match gap_now {
                Some(g) => g,
                None => gap::gap_unchecked(game, x, y),
            };
            if !g.is_finite() {
                return Err(SolverError::Numerical(format!("duality gap is {g}")));
            }
            best = best.min(g);
            let c = Checkpoint {
                grad_computations: grads,
                duality_gap: if cfg.restart_beta.is_some() { best } else { g },
                wall_ms: clock.elapsed().as_secs_f64() * 1e3,
                restarted: pending_restart,
            };
            pending_restart = false;
            on_checkpoint(&c);
            checkpoints.push(c);
            if cfg.target_gap.is_some_and(|t| g <= t) {
                break;
            }
        }
    }
    let (x, y) = engine.averages();
    Ok(SolverTrace {
        checkpoints,
        x_average: SequenceVector(x.to_vec()),
        y_average: SequenceVector(y.to_vec()),
        step,
        iterations: done,
        grad_computations: grads,
        touches: engine.touches(),
        restarts,
    })
}

/// [`run_solver`] with restarts at fraction `beta`.
pub fn restart_wrapper(
    game: &GameInstance,
    cfg: &RunConfig,
    beta: f64,
) -> Result<SolverTrace, SolverError> {
    run_solver(
        game,
        &RunConfig {
            restart_beta: Some(beta),
            ..cfg.clone()
        },
    )
}
