//! Extrapolated cyclic primal-dual method with block-coordinate updates.
//!
//! Each iteration sweeps the aligned blocks `t = 1..s`. For block `t` the
//! x-gradient rows of the block are formed against the extrapolated `y~`, the
//! block's local proxes run bottom-up with child values pushed into the parent
//! sequence's linear term, `x~` is refreshed on the block, and only then the
//! y-block gradient is formed against the refreshed `x~`. Every row and every
//! column of the payoff matrix is touched exactly once per iteration whatever
//! the number of blocks.

use crate::blocks::{align_partitions, validate_partition, BlockPartition, BlockStrategy};
use crate::error::SolverError;
use crate::games::GameInstance;
use crate::regularizer::{DilatedRegularizer, LocalKind, ProxWorkspace};
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex, ROOT_SEQ};

use super::Averager;

/// Prox center choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProxAnchor {
    /// Center at the previous iterate.
    LastIterate,
    /// Center fixed at the initial point, with the scaled gradients summed up
    /// (dual averaging of the extrapolated gradients).
    DualAveraging,
}

impl ProxAnchor {
    /// Entropy uses the previous iterate; the Euclidean kind uses dual averaging.
    pub fn default_for(kind: LocalKind) -> Self {
        match kind {
            LocalKind::Entropy => ProxAnchor::LastIterate,
            LocalKind::Euclidean => ProxAnchor::DualAveraging,
        }
    }
}

/// Aligned, validated block partitions of both players.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    x: BlockPartition,
    y: BlockPartition,
}

impl BlockPlan {
    pub fn new(
        game: &GameInstance,
        px: &BlockPartition,
        py: &BlockPartition,
    ) -> Result<Self, SolverError> {
        let (x, y) = align_partitions(px, py);
        validate_partition(&x, &game.treeplex_x)?;
        validate_partition(&y, &game.treeplex_y)?;
        Ok(BlockPlan { x, y })
    }

    pub fn from_strategy(game: &GameInstance, s: BlockStrategy) -> Result<Self, SolverError> {
        Self::new(
            game,
            &s.build(&game.treeplex_x)?,
            &s.build(&game.treeplex_y)?,
        )
    }

    pub fn x(&self) -> &BlockPartition {
        &self.x
    }

    pub fn y(&self) -> &BlockPartition {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Iterates and buffers of one player.
#[derive(Debug, Clone)]
pub struct PlayerIterates {
    /// `x_{k-1}` during an iteration, `x_k` after it.
    cur: SequenceVector,
    /// `x_{k-2}` during an iteration.
    prev: SequenceVector,
    /// Behavioral form of `cur`, as produced by the prox.
    beh: BehavioralStrategy,
    beh_next: BehavioralStrategy,
    tilde: Vec<f64>,
    grad: Vec<f64>,
    hat: Vec<f64>,
    anchor: BehavioralStrategy,
    acc: Vec<f64>,
    avg: Averager,
    scratch: Vec<f64>,
}

impl PlayerIterates {
    fn new(t: &Treeplex, start: &[f64], avg: Averager) -> Result<Self, SolverError> {
        let beh = t.sequence_to_behavioral(start)?;
        let n = t.n_sequences();
        Ok(PlayerIterates {
            cur: SequenceVector(start.to_vec()),
            prev: SequenceVector(start.to_vec()),
            beh_next: beh.clone(),
            anchor: beh.clone(),
            beh,
            tilde: start.to_vec(),
            grad: vec![0.0; n],
            hat: vec![0.0; n],
            acc: vec![0.0; n],
            avg,
            scratch: Vec::new(),
        })
    }

    fn restart(&mut self, t: &Treeplex, start: &[f64]) -> Result<(), SolverError> {
        let avg = self.avg.kind();
        *self = PlayerIterates::new(t, start, Averager::new(avg, start))?;
        Ok(())
    }

    pub fn current(&self) -> &[f64] {
        &self.cur
    }

    pub fn average(&self) -> &[f64] {
        self.avg.value()
    }

    pub fn behavioral(&self) -> &BehavioralStrategy {
        &self.beh
    }

    fn begin(&mut self, ratio: f64) {
        for ((t, &c), &p) in self
            .tilde
            .iter_mut()
            .zip(self.cur.iter())
            .zip(self.prev.iter())
        {
            *t = c + ratio * (c - p);
        }
        self.hat.iter_mut().for_each(|h| *h = 0.0);
    }

    /// Local prox at `j` with linear term `coef * grad + hat` (plus the running
    /// sum for dual averaging).
    fn local(
        &mut self,
        t: &Treeplex,
        reg: &DilatedRegularizer,
        j: usize,
        coef: f64,
        anchor: ProxAnchor,
    ) -> Result<(), SolverError> {
        let p = t.point(j);
        let seqs = p.seqs();
        self.scratch.clear();
        match anchor {
            ProxAnchor::LastIterate => {
                self.scratch
                    .extend(seqs.clone().map(|s| coef * self.grad[s] + self.hat[s]));
            }
            ProxAnchor::DualAveraging => {
                for s in seqs.clone() {
                    self.acc[s] += coef * self.grad[s];
                    self.scratch.push(self.acc[s] + self.hat[s]);
                }
            }
        }
        let center = match anchor {
            ProxAnchor::LastIterate => &self.beh.as_slice()[seqs.clone()],
            ProxAnchor::DualAveraging => &self.anchor.as_slice()[seqs.clone()],
        };
        let value = reg.local_step(
            j,
            &self.scratch,
            center,
            &mut self.beh_next.as_mut_slice()[seqs],
        );
        if !value.is_finite() {
            return Err(SolverError::Numerical(format!(
                "non-finite prox value at decision point {j}"
            )));
        }
        self.hat[p.parent_seq()] += value;
        Ok(())
    }

    /// `x~^j = b_k^j x_{k-1}^{p_j} + ratio (x_{k-1}^j - b_{k-1}^j x_{k-2}^{p_j})`.
    fn refresh_tilde(&mut self, t: &Treeplex, j: usize, ratio: f64) {
        let p = t.point(j);
        let (cp, pp) = (self.cur[p.parent_seq()], self.prev[p.parent_seq()]);
        let (bn, bo) = (self.beh_next.as_slice(), self.beh.as_slice());
        for s in p.seqs() {
            self.tilde[s] = bn[s] * cp + ratio * (self.cur[s] - bo[s] * pp);
        }
    }

    fn finish(&mut self, t: &Treeplex, k: u64) -> Result<(), SolverError> {
        std::mem::swap(&mut self.prev, &mut self.cur);
        t.behavioral_to_sequence_into(&self.beh_next, &mut self.cur);
        std::mem::swap(&mut self.beh, &mut self.beh_next);
        if self.cur.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Numerical("non-finite iterate".into()));
        }
        self.avg.update(k, &self.cur);
        Ok(())
    }
}

/// Full solver state between iterations.
#[derive(Debug, Clone)]
pub struct EcyclicState {
    pub x: PlayerIterates,
    pub y: PlayerIterates,
    /// `eta_{k-1}`; zero before the first iteration.
    pub eta_prev: f64,
    /// `H_k`, the sum of the steps taken.
    pub h_sum: f64,
    /// Completed iterations.
    pub k: u64,
    /// Payoff entries visited by gradient computations.
    pub touches: u64,
}

impl EcyclicState {
    /// Starts from `(x0, y0)` with `x_{-1} = x0`.
    pub fn new(
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
        avg: super::Averaging,
    ) -> Result<Self, SolverError> {
        Ok(EcyclicState {
            x: PlayerIterates::new(&game.treeplex_x, x0, Averager::new(avg, x0))?,
            y: PlayerIterates::new(&game.treeplex_y, y0, Averager::new(avg, y0))?,
            eta_prev: 0.0,
            h_sum: 0.0,
            k: 0,
            touches: 0,
        })
    }

    /// Restarts from `(x0, y0)`: extrapolation memory, averages and step sums are cleared.
    pub fn restart(
        &mut self,
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
    ) -> Result<(), SolverError> {
        self.x.restart(&game.treeplex_x, x0)?;
        self.y.restart(&game.treeplex_y, y0)?;
        self.eta_prev = 0.0;
        self.h_sum = 0.0;
        self.k = 0;
        Ok(())
    }

    fn ratio(&self, eta: f64) -> f64 {
        if self.eta_prev > 0.0 {
            self.eta_prev / eta
        } else {
            0.0
        }
    }

    fn end_iteration(&mut self, game: &GameInstance, eta: f64) -> Result<(), SolverError> {
        self.k += 1;
        self.x.finish(&game.treeplex_x, self.k)?;
        self.y.finish(&game.treeplex_y, self.k)?;
        self.eta_prev = eta;
        self.h_sum += eta;
        Ok(())
    }
}

/// Regularizers, blocks and anchor mode of one run.
#[derive(Debug, Clone)]
pub struct Ecyclic {
    pub reg_x: DilatedRegularizer,
    pub reg_y: DilatedRegularizer,
    pub plan: BlockPlan,
    pub anchor: ProxAnchor,
}

impl Ecyclic {
    /// One iteration with blockwise gradients and local proxes.
    pub fn step(
        &self,
        st: &mut EcyclicState,
        game: &GameInstance,
        eta: f64,
    ) -> Result<(), SolverError> {
        check_eta(eta)?;
        let (tx, ty, m) = (&game.treeplex_x, &game.treeplex_y, &game.payoff);
        let ratio = st.ratio(eta);
        st.x.begin(ratio);
        st.y.begin(ratio);
        let mut touches = 0u64;
        for (bx, by) in self.plan.x.blocks().iter().zip(self.plan.y.blocks()) {
            for &j in bx {
                for s in tx.point(j).seqs() {
                    st.x.grad[s] = m.row_dot(s, &st.y.tilde, &mut touches);
                }
            }
            for &j in bx {
                st.x.local(tx, &self.reg_x, j, eta, self.anchor)?;
            }
            for &j in bx {
                st.x.refresh_tilde(tx, j, ratio);
            }
            for &j in by {
                for s in ty.point(j).seqs() {
                    st.y.grad[s] = m.col_dot(s, &st.x.tilde, &mut touches);
                }
            }
            for &j in by {
                st.y.local(ty, &self.reg_y, j, -eta, self.anchor)?;
            }
            for &j in by {
                st.y.refresh_tilde(ty, j, ratio);
            }
        }
        // The empty sequence has no decision point; its row and column are
        // still part of a full gradient.
        st.x.grad[ROOT_SEQ] = m.row_dot(ROOT_SEQ, &st.y.tilde, &mut touches);
        st.y.grad[ROOT_SEQ] = m.col_dot(ROOT_SEQ, &st.x.tilde, &mut touches);
        st.touches += touches;
        st.end_iteration(game, eta)
    }

    /// One iteration computed the slow way: for every block, full gradients
    /// and a full treeplex prox, keeping only the block's coordinates.
    pub fn reference_step(
        &self,
        st: &mut EcyclicState,
        game: &GameInstance,
        eta: f64,
    ) -> Result<(), SolverError> {
        check_eta(eta)?;
        let (tx, ty, m) = (&game.treeplex_x, &game.treeplex_y, &game.payoff);
        let ratio = st.ratio(eta);
        st.x.begin(ratio);
        st.y.begin(ratio);
        let mut full_x = st.x.beh.clone();
        let mut full_y = st.y.beh.clone();
        let mut wsx = ProxWorkspace::new(tx);
        let mut wsy = ProxWorkspace::new(ty);
        for (bx, by) in self.plan.x.blocks().iter().zip(self.plan.y.blocks()) {
            let h = m.mul(&st.y.tilde);
            for &j in bx {
                for s in tx.point(j).seqs() {
                    st.x.grad[s] = h[s];
                }
            }
            full_prox(
                &st.x,
                tx,
                &self.reg_x,
                eta,
                self.anchor,
                &mut full_x,
                &mut wsx,
            )?;
            copy_block(tx, bx, &full_x, &mut st.x.beh_next);
            for &j in bx {
                st.x.refresh_tilde(tx, j, ratio);
            }
            let g = m.mul_t(&st.x.tilde);
            for &j in by {
                for s in ty.point(j).seqs() {
                    st.y.grad[s] = g[s];
                }
            }
            full_prox(
                &st.y,
                ty,
                &self.reg_y,
                -eta,
                self.anchor,
                &mut full_y,
                &mut wsy,
            )?;
            copy_block(ty, by, &full_y, &mut st.y.beh_next);
            for &j in by {
                st.y.refresh_tilde(ty, j, ratio);
            }
        }
        if self.anchor == ProxAnchor::DualAveraging {
            for (side, coef) in [(&mut st.x, eta), (&mut st.y, -eta)] {
                for (a, g) in side.acc.iter_mut().zip(&side.grad) {
                    *a += coef * g;
                }
            }
        }
        st.end_iteration(game, eta)
    }
}

fn check_eta(eta: f64) -> Result<(), SolverError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(SolverError::Config(format!(
            "step size must be positive, got {eta}"
        )));
    }
    Ok(())
}

fn full_prox(
    side: &PlayerIterates,
    t: &Treeplex,
    reg: &DilatedRegularizer,
    coef: f64,
    anchor: ProxAnchor,
    out: &mut BehavioralStrategy,
    ws: &mut ProxWorkspace,
) -> Result<(), SolverError> {
    let (lin, center): (Vec<f64>, _) = match anchor {
        ProxAnchor::LastIterate => (side.grad.iter().map(|g| coef * g).collect(), &side.beh),
        ProxAnchor::DualAveraging => (
            side.grad
                .iter()
                .zip(&side.acc)
                .map(|(g, a)| a + coef * g)
                .collect(),
            &side.anchor,
        ),
    };
    reg.prox_behavioral(t, &lin, center, out, ws)?;
    Ok(())
}

fn copy_block(
    t: &Treeplex,
    block: &[usize],
    from: &BehavioralStrategy,
    to: &mut BehavioralStrategy,
) {
    for &j in block {
        let r = t.point(j).seqs();
        to.as_mut_slice()[r.clone()].copy_from_slice(&from.as_slice()[r]);
    }
}

/// One fast iteration; see [`Ecyclic::step`].
pub fn ecyclicpda_step(
    state: &mut EcyclicState,
    game: &GameInstance,
    solver: &Ecyclic,
    eta: f64,
) -> Result<(), SolverError> {
    solver.step(state, game, eta)
}

/// One reference iteration; see [`Ecyclic::reference_step`].
pub fn ecyclicpda_reference_step(
    state: &mut EcyclicState,
    game: &GameInstance,
    solver: &Ecyclic,
    eta: f64,
) -> Result<(), SolverError> {
    solver.reference_step(state, game, eta)
}
