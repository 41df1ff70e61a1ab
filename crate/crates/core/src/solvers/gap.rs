use crate::error::SolverError;
use crate::games::GameInstance;
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex, ROOT_SEQ};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// Exact best response to a linear objective over the treeplex by one
/// bottom-up pass. Ties go to the lowest action index. Returns the pure
/// sequence-form strategy and the optimal value (including `grad[0]`).
pub fn best_response(t: &Treeplex, grad: &[f64], sense: Sense) -> (SequenceVector, f64) {
    assert_eq!(grad.len(), t.n_sequences());
    let sign = match sense {
        Sense::Max => 1.0,
        Sense::Min => -1.0,
    };
    // Signed so that the problem is always a maximization.
    let mut acc: Vec<f64> = grad.iter().map(|g| sign * g).collect();
    let mut choice = vec![0usize; t.n_points()];
    for &j in t.topo_order() {
        let p = t.point(j);
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (a, s) in p.seqs().enumerate() {
            if acc[s] > best_v {
                best_v = acc[s];
                best = a;
            }
        }
        choice[j] = best;
        acc[p.parent_seq()] += best_v;
    }
    let mut flat = vec![0.0; t.n_sequences()];
    flat[ROOT_SEQ] = 1.0;
    for (j, &a) in choice.iter().enumerate() {
        flat[t.seq(j, a)] = 1.0;
    }
    let b = BehavioralStrategy::from_flat(t, flat).expect("dims match");
    (t.behavioral_to_sequence(&b), sign * acc[ROOT_SEQ])
}

/// `max_v <M^T x, v> - min_u <M y, u>`.
pub fn duality_gap(game: &GameInstance, x: &[f64], y: &[f64]) -> Result<f64, SolverError> {
    let tol = 1e-9;
    let feasible = |t: &Treeplex, v: &[f64], who: &str| -> Result<(), SolverError> {
        if t.check_feasible(v, tol)? {
            Ok(())
        } else {
            Err(SolverError::Infeasible(format!(
                "{who} is not a feasible sequence-form strategy"
            )))
        }
    };
    feasible(&game.treeplex_x, x, "x")?;
    feasible(&game.treeplex_y, y, "y")?;
    Ok(gap_unchecked(game, x, y))
}

pub(crate) fn gap_unchecked(game: &GameInstance, x: &[f64], y: &[f64]) -> f64 {
    let (_, primal) = best_response(&game.treeplex_y, &game.payoff.mul_t(x), Sense::Max);
    let (_, dual) = best_response(&game.treeplex_x, &game.payoff.mul(y), Sense::Min);
    primal - dual
}
