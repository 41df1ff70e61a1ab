//! Mirror prox: a prox step at the current gradients gives a candidate point,
//! and a second prox from the same center at the candidate's gradients gives
//! the next iterate. Both steps use the same stepsize. The averages are taken
//! over the candidate points.

use crate::error::SolverError;
use crate::games::{GameInstance, PayoffMatrix};
use crate::regularizer::{DilatedRegularizer, ProxWorkspace};
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex};

use super::{Averager, Averaging};

#[derive(Debug, Clone)]
struct Side {
    cur: SequenceVector,
    beh: BehavioralStrategy,
    mid: SequenceVector,
    mid_beh: BehavioralStrategy,
    next_beh: BehavioralStrategy,
    lin: Vec<f64>,
    ws: ProxWorkspace,
    avg: Averager,
}

impl Side {
    fn new(t: &Treeplex, start: &[f64], avg: Averaging) -> Result<Self, SolverError> {
        let beh = t.sequence_to_behavioral(start)?;
        Ok(Side {
            cur: SequenceVector(start.to_vec()),
            mid: SequenceVector(start.to_vec()),
            mid_beh: beh.clone(),
            next_beh: beh.clone(),
            beh,
            lin: vec![0.0; t.n_sequences()],
            ws: ProxWorkspace::new(t),
            avg: Averager::new(avg, start),
        })
    }

    /// Prox from the current center with linear term `coef * grad`, into `out`.
    fn prox(
        &mut self,
        t: &Treeplex,
        reg: &DilatedRegularizer,
        coef: f64,
        grad: &[f64],
        into_mid: bool,
    ) -> Result<(), SolverError> {
        for (l, g) in self.lin.iter_mut().zip(grad) {
            *l = coef * g;
        }
        let out = if into_mid {
            &mut self.mid_beh
        } else {
            &mut self.next_beh
        };
        reg.prox_behavioral(t, &self.lin, &self.beh, out, &mut self.ws)?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MirrorProxState {
    x: Side,
    y: Side,
    pub k: u64,
    pub touches: u64,
}

fn rows(m: &PayoffMatrix, y: &[f64], touches: &mut u64) -> Vec<f64> {
    (0..m.n_rows()).map(|r| m.row_dot(r, y, touches)).collect()
}

fn cols(m: &PayoffMatrix, x: &[f64], touches: &mut u64) -> Vec<f64> {
    (0..m.n_cols()).map(|c| m.col_dot(c, x, touches)).collect()
}

impl MirrorProxState {
    pub fn new(
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
        avg: Averaging,
    ) -> Result<Self, SolverError> {
        Ok(MirrorProxState {
            x: Side::new(&game.treeplex_x, x0, avg)?,
            y: Side::new(&game.treeplex_y, y0, avg)?,
            k: 0,
            touches: 0,
        })
    }

    pub fn restart(
        &mut self,
        game: &GameInstance,
        x0: &[f64],
        y0: &[f64],
    ) -> Result<(), SolverError> {
        let avg = self.x.avg.kind();
        let touches = self.touches;
        *self = MirrorProxState::new(game, x0, y0, avg)?;
        self.touches = touches;
        Ok(())
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
}

/// One iteration: four gradient computations, two per player.
pub fn mirror_prox_step(
    st: &mut MirrorProxState,
    game: &GameInstance,
    reg_x: &DilatedRegularizer,
    reg_y: &DilatedRegularizer,
    eta: f64,
) -> Result<(), SolverError> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(SolverError::Config(format!(
            "step size must be positive, got {eta}"
        )));
    }
    let (tx, ty, m) = (&game.treeplex_x, &game.treeplex_y, &game.payoff);
    let mut touches = 0;
    let h = rows(m, &st.y.cur, &mut touches);
    let g = cols(m, &st.x.cur, &mut touches);
    st.x.prox(tx, reg_x, eta, &h, true)?;
    st.y.prox(ty, reg_y, -eta, &g, true)?;
    tx.behavioral_to_sequence_into(&st.x.mid_beh, &mut st.x.mid);
    ty.behavioral_to_sequence_into(&st.y.mid_beh, &mut st.y.mid);
    let h = rows(m, &st.y.mid, &mut touches);
    let g = cols(m, &st.x.mid, &mut touches);
    st.x.prox(tx, reg_x, eta, &h, false)?;
    st.y.prox(ty, reg_y, -eta, &g, false)?;
    st.touches += touches;
    st.k += 1;
    for (side, t) in [(&mut st.x, tx), (&mut st.y, ty)] {
        std::mem::swap(&mut side.beh, &mut side.next_beh);
        t.behavioral_to_sequence_into(&side.beh, &mut side.cur);
        if side
            .cur
            .iter()
            .chain(side.mid.iter())
            .any(|v| !v.is_finite())
        {
            return Err(SolverError::Numerical("non-finite iterate".into()));
        }
        side.avg.update(st.k, &side.mid);
    }
    Ok(())
}
