use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blocks::BlockPartition;
use crate::error::SolverError;
use crate::games::GameInstance;
use crate::regularizer::NormKind;
use crate::treeplex::Treeplex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizeParams {
    pub mu_x: f64,
    pub mu_y: f64,
    pub c_phi: f64,
    pub c_psi: f64,
    pub multiplier: f64,
    pub eta: f64,
}

impl StepSizeParams {
    /// `eta = multiplier * sqrt(c_phi * c_psi) / (mu_x + mu_y)`. A zero
    /// matrix has no coupling; the base step is then taken as 1.
    pub fn new(mu_x: f64, mu_y: f64, c_phi: f64, c_psi: f64, multiplier: f64) -> Self {
        let base = if mu_x + mu_y > 0.0 {
            (c_phi * c_psi).sqrt() / (mu_x + mu_y)
        } else {
            1.0
        };
        StepSizeParams {
            mu_x,
            mu_y,
            c_phi,
            c_psi,
            multiplier,
            eta: multiplier * base,
        }
    }
}

const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITERS: usize = 500;

/// Block index per sequence; the root sequence gets -1.
fn seq_blocks(t: &Treeplex, p: &BlockPartition) -> Vec<i64> {
    let block_of = p.block_of(t.n_points());
    let mut out = vec![-1i64; t.n_sequences()];
    for (j, pt) in t.points().iter().enumerate() {
        for s in pt.seqs() {
            out[s] = block_of[j] as i64;
        }
    }
    out
}

/// Spectral norm of a sparse matrix given by triples, by power iteration on `A^T A`.
fn spectral_norm(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> f64 {
    if entries.is_empty() {
        return 0.0;
    }
    // A fixed pseudo-random start avoids landing in the null space of
    // structured matrices while keeping the result deterministic.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n_cols).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut w = vec![0.0; n_rows];
    let mut sigma = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        w.iter_mut().for_each(|e| *e = 0.0);
        for &(r, c, a) in entries {
            w[r] += a * v[c];
        }
        let mut next = vec![0.0; n_cols];
        for &(r, c, a) in entries {
            next[c] += a * w[r];
        }
        let norm = next.iter().map(|e| e * e).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let s = norm.sqrt();
        v.iter_mut().zip(&next).for_each(|(a, b)| *a = b / norm);
        let done = (s - sigma).abs() <= POWER_TOL * s;
        sigma = s;
        if done {
            break;
        }
    }
    sigma
}

/// `mu_x = |M_x|_* + |M_y|_*` and `mu_y = |M_x^T|_* + |M_y^T|_*`, where `M_x`
/// holds the entries whose x-block comes after their y-block and `M_y` the rest.
/// The l1 case uses the max absolute entry; the l2 case spectral norms.
pub fn compute_mu(
    game: &GameInstance,
    px: &BlockPartition,
    py: &BlockPartition,
    norm: NormKind,
) -> Result<(f64, f64), SolverError> {
    if px.len() != py.len() {
        return Err(SolverError::Config(format!(
            "partitions are not aligned: {} vs {} blocks",
            px.len(),
            py.len()
        )));
    }
    let bx = seq_blocks(&game.treeplex_x, px);
    let by = seq_blocks(&game.treeplex_y, py);
    let (mut mx, mut my) = (Vec::new(), Vec::new());
    for (r, c, v) in game.payoff.triples() {
        if bx[r] > by[c] {
            mx.push((r, c, v));
        } else {
            my.push((r, c, v));
        }
    }
    Ok(match norm {
        NormKind::L1 => {
            let max_abs =
                |e: &[(usize, usize, f64)]| e.iter().fold(0.0f64, |m, t| m.max(t.2.abs()));
            let mu = max_abs(&mx) + max_abs(&my);
            (mu, mu)
        }
        NormKind::L2 => {
            let (nr, nc) = (game.payoff.n_rows(), game.payoff.n_cols());
            let t = |e: &[(usize, usize, f64)]| {
                e.iter().map(|&(r, c, v)| (c, r, v)).collect::<Vec<_>>()
            };
            let mu_x = spectral_norm(nr, nc, &mx) + spectral_norm(nr, nc, &my);
            let mu_y = spectral_norm(nc, nr, &t(&mx)) + spectral_norm(nc, nr, &t(&my));
            (mu_x, mu_y)
        }
    })
}
