//! CFR+ and predictive CFR+ with alternating updates.
//!
//! At every decision point the regret-matching+ accumulator is updated with
//! the counterfactual regret `q - <b, q>`, where `q` holds the immediate
//! utility of each sequence plus the values of the decision points below it.
//! Accumulators are clipped at zero. The predictive variant plays regret
//! matching on `[R + m]^+` with `m` the last instantaneous regret.
//!
//! Each player's current strategy always reflects its current accumulators:
//! x updates against the current y, then y updates against the new x.

use crate::error::SolverError;
use crate::games::GameInstance;
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex, ROOT_SEQ};

use super::{Averager, Averaging};

const SEED_SCALE: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Side {
    regrets: Vec<f64>,
    prediction: Vec<f64>,
    beh: BehavioralStrategy,
    cur: SequenceVector,
    q: Vec<f64>,
    avg: Averager,
}

impl Side {
    fn new(t: &Treeplex, start: &[f64], avg: Averaging) -> Result<Self, SolverError> {
        let beh = t.sequence_to_behavioral(start)?;
        let n = t.n_sequences();
        // Tiny accumulators proportional to the start point make it the first
        // strategy played without otherwise biasing regret matching.
        let mut regrets = vec![0.0; n];
        let b = beh.as_slice();
        for p in t.points() {
            for s in p.seqs() {
                regrets[s] = SEED_SCALE * b[s];
            }
        }
        Ok(Side {
            regrets,
            prediction: vec![0.0; n],
            cur: SequenceVector(start.to_vec()),
            beh,
            q: vec![0.0; n],
            avg: Averager::new(avg, start),
        })
    }

    /// Regret matching on `[R + m]^+` (or `R` when not predictive); uniform
    /// when everything is zero.
    fn strategy(&mut self, t: &Treeplex, predictive: bool) {
        let b = self.beh.as_mut_slice();
        for p in t.points() {
            let r = p.seqs();
            let mut total = 0.0;
            for s in r.clone() {
                let v = if predictive {
                    (self.regrets[s] + self.prediction[s]).max(0.0)
                } else {
                    self.regrets[s]
                };
                b[s] = v;
                total += v;
            }
            if total > 0.0 {
                for s in r {
                    b[s] /= total;
                }
            } else {
                let u = 1.0 / p.n_actions() as f64;
                b[r].iter_mut().for_each(|v| *v = u);
            }
        }
        b[ROOT_SEQ] = 1.0;
        t.behavioral_to_sequence_into(&self.beh, &mut self.cur);
    }

    /// Points the accumulators at `start` while keeping their per-decision-point mass.
    fn restart(&mut self, t: &Treeplex, start: &[f64]) -> Result<(), SolverError> {
        self.beh = t.sequence_to_behavioral(start)?;
        let b = self.beh.as_slice();
        for p in t.points() {
            let mass = p
                .seqs()
                .map(|s| self.regrets[s])
                .sum::<f64>()
                .max(SEED_SCALE);
            for s in p.seqs() {
                self.regrets[s] = mass * b[s];
            }
        }
        self.prediction.iter_mut().for_each(|v| *v = 0.0);
        self.cur.copy_from_slice(start);
        self.avg = Averager::new(self.avg.kind(), start);
        Ok(())
    }

    /// Counterfactual regret update for utility `u` (to be maximized).
    fn observe(&mut self, t: &Treeplex, u: &[f64]) {
        self.q.copy_from_slice(u);
        let b = self.beh.as_slice();
        for &j in t.topo_order() {
            let p = t.point(j);
            let v: f64 = p.seqs().map(|s| b[s] * self.q[s]).sum();
            for s in p.seqs() {
                let r = self.q[s] - v;
                self.regrets[s] = (self.regrets[s] + r).max(0.0);
                self.prediction[s] = r;
            }
            self.q[p.parent_seq()] += v;
        }
    }
}

#[derive(Debug, Clone)]
pub struct CfrState {
    x: Side,
    y: Side,
    predictive: bool,
    pub k: u64,
    pub touches: u64,
}

impl CfrState {
    /// `predictive` selects PCFR+.
    pub fn new(
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
        avg: Averaging,
        predictive: bool,
    ) -> Result<Self, SolverError> {
        Ok(CfrState {
            x: Side::new(&game.treeplex_x, x0, avg)?,
            y: Side::new(&game.treeplex_y, y0, avg)?,
            predictive,
            k: 0,
            touches: 0,
        })
    }

    /// Restarts at `(x0, y0)`: each decision point's accumulator keeps its
    /// total but is redistributed along the start strategy; predictions and
    /// averages are cleared.
    pub fn restart(
        &mut self,
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
    ) -> Result<(), SolverError> {
        self.x.restart(&game.treeplex_x, x0)?;
        self.y.restart(&game.treeplex_y, y0)?;
        self.k = 0;
        Ok(())
    }

    pub fn is_predictive(&self) -> bool {
        self.predictive
    }

    pub fn x_current(&self) -> &[f64] {
        &self.x.cur
    }

    pub fn y_current(&self) -> &[f64] {
        &self.y.cur
    }

    pub fn x_average(&self) -> &[f64] {
        self.x.avg.value()
    }

    pub fn y_average(&self) -> &[f64] {
        self.y.avg.value()
    }

    /// Cumulative regrets of both players, sequence layout.
    pub fn regrets(&self) -> (&[f64], &[f64]) {
        (&self.x.regrets, &self.y.regrets)
    }
}

fn step(st: &mut CfrState, game: &GameInstance) -> Result<(), SolverError> {
    let (tx, ty, m) = (&game.treeplex_x, &game.treeplex_y, &game.payoff);
    let mut touches = 0;
    st.k += 1;
    // x minimizes x^T M y, so its utility is -M y.
    let u: Vec<f64> = (0..m.n_rows())
        .map(|r| -m.row_dot(r, &st.y.cur, &mut touches))
        .collect();
    st.x.observe(tx, &u);
    st.x.avg.update(st.k, &st.x.cur);
    st.x.strategy(tx, st.predictive);
    // y responds to the freshly updated x.
    let u: Vec<f64> = (0..m.n_cols())
        .map(|c| m.col_dot(c, &st.x.cur, &mut touches))
        .collect();
    st.y.observe(ty, &u);
    st.y.avg.update(st.k, &st.y.cur);
    st.y.strategy(ty, st.predictive);
    st.touches += touches;
    for side in [&st.x, &st.y] {
        if side
            .regrets
            .iter()
            .chain(side.cur.iter())
            .any(|v| !v.is_finite())
        {
            return Err(SolverError::Numerical("non-finite regret".into()));
        }
    }
    Ok(())
}

/// One CFR+ iteration.
pub fn cfr_plus_step(st: &mut CfrState, game: &GameInstance) -> Result<(), SolverError> {
    if st.predictive {
        return Err(SolverError::Config("state was created for PCFR+".into()));
    }
    step(st, game)
}

/// One PCFR+ iteration.
pub fn pcfr_plus_step(st: &mut CfrState, game: &GameInstance) -> Result<(), SolverError> {
    if !st.predictive {
        return Err(SolverError::Config("state was created for CFR+".into()));
    }
    step(st, game)
}
