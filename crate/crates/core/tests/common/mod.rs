//! Oracles shared by the integration tests. They work on dense matrices and
//! touch the library only for treeplex structure.
#![allow(dead_code, clippy::needless_range_loop)]

use efg_cyclic::games::GameInstance;
use efg_cyclic::treeplex::{Treeplex, ROOT_SEQ};
use rand::Rng;

pub fn dense(game: &GameInstance) -> Vec<Vec<f64>> {
    let m = &game.payoff;
    let mut d = vec![vec![0.0; m.n_cols()]; m.n_rows()];
    for (r, c, v) in m.triples() {
        d[r][c] += v;
    }
    d
}

pub fn bilinear(d: &[Vec<f64>], x: &[f64], y: &[f64]) -> f64 {
    d.iter()
        .zip(x)
        .map(|(row, xi)| xi * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
        .sum()
}

/// Constraint rows `F v = f`: `v_root = 1` and, per decision point,
/// `sum of its sequences - parent sequence = 0`.
pub fn constraints(t: &Treeplex) -> Vec<Vec<f64>> {
    let n = t.n_sequences();
    let mut rows = Vec::with_capacity(1 + t.n_points());
    let mut r0 = vec![0.0; n];
    r0[ROOT_SEQ] = 1.0;
    rows.push(r0);
    for p in t.points() {
        let mut r = vec![0.0; n];
        for s in p.seqs() {
            r[s] = 1.0;
        }
        r[p.parent_seq()] -= 1.0;
        rows.push(r);
    }
    rows
}

/// All pure sequence-form strategies, choosing actions only at reachable
/// decision points.
pub fn pure_strategies(t: &Treeplex) -> Vec<Vec<f64>> {
    fn rec(t: &Treeplex, pending: &mut Vec<usize>, x: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        let Some(j) = pending.pop() else {
            out.push(x.clone());
            return;
        };
        for s in t.point(j).seqs() {
            x[s] = 1.0;
            let before = pending.len();
            pending.extend_from_slice(t.children(s));
            rec(t, pending, x, out);
            pending.truncate(before);
            x[s] = 0.0;
        }
        pending.push(j);
    }
    let mut x = vec![0.0; t.n_sequences()];
    x[ROOT_SEQ] = 1.0;
    let mut pending = t.children(ROOT_SEQ).to_vec();
    let mut out = Vec::new();
    rec(t, &mut pending, &mut x, &mut out);
    out
}

/// Gap by scanning every pure strategy of both players.
pub fn enumeration_gap(
    d: &[Vec<f64>],
    px: &[Vec<f64>],
    py: &[Vec<f64>],
    x: &[f64],
    y: &[f64],
) -> f64 {
    let best_y = py
        .iter()
        .map(|v| bilinear(d, x, v))
        .fold(f64::NEG_INFINITY, f64::max);
    let best_x = px
        .iter()
        .map(|u| bilinear(d, u, y))
        .fold(f64::INFINITY, f64::min);
    best_y - best_x
}

/// Random behavioral strategy in sequence form with all entries positive.
pub fn random_strategy<R: Rng>(t: &Treeplex, rng: &mut R) -> Vec<f64> {
    let mut x = vec![0.0; t.n_sequences()];
    x[ROOT_SEQ] = 1.0;
    for p in t.points() {
        let w: Vec<f64> = p.seqs().map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let parent = x[p.parent_seq()];
        for (s, wi) in p.seqs().zip(w) {
            x[s] = parent * wi / total;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex with Bland's rule: min c^T z, A z = b, z >= 0.

const EPS: f64 = 1e-11;

fn pivot(t: &mut [Vec<f64>], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let row = t[r].clone();
    for (i, other) in t.iter_mut().enumerate() {
        if i != r {
            let f = other[c];
            if f != 0.0 {
                for (v, rv) in other.iter_mut().zip(&row) {
                    *v -= f * rv;
                }
            }
        }
    }
}

/// Runs simplex iterations on a tableau whose last row holds reduced costs
/// and whose last column holds the right-hand side. Columns at or beyond
/// `n_allowed` never enter. Pricing is Dantzig's rule, falling back to
/// Bland's rule while the objective stalls.
fn iterate(t: &mut [Vec<f64>], basis: &mut [usize], n_allowed: usize) -> Result<(), &'static str> {
    let m = basis.len();
    let rhs = t[0].len() - 1;
    let mut stalled = 0;
    for _ in 0..1_000_000 {
        let bland = stalled > 50;
        let enter = if bland {
            (0..n_allowed).find(|&j| t[m][j] < -EPS)
        } else {
            (0..n_allowed)
                .filter(|&j| t[m][j] < -EPS)
                .min_by(|&i, &j| t[m][i].total_cmp(&t[m][j]))
        };
        let Some(enter) = enter else {
            return Ok(());
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][rhs].max(0.0) / t[i][enter];
                let better = match leave {
                    None => true,
                    Some(_) if ratio < best - 1e-12 => true,
                    Some(l) if ratio <= best + 1e-12 => {
                        if bland {
                            basis[i] < basis[l]
                        } else {
                            t[i][enter] > t[l][enter]
                        }
                    }
                    Some(_) => false,
                };
                if better {
                    leave = Some(i);
                    best = best.min(ratio);
                }
            }
        }
        let leave = leave.ok_or("unbounded")?;
        let before = t[m][rhs];
        pivot(t, leave, enter);
        basis[leave] = enter;
        if (t[m][rhs] - before).abs() <= 1e-14 {
            stalled += 1;
        } else {
            stalled = 0;
        }
    }
    Err("iteration limit")
}

pub fn simplex(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<(f64, Vec<f64>), &'static str> {
    let (m, n) = (a.len(), c.len());
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Phase 1: minimize the sum of artificials.
    for i in 0..m {
        for j in 0..width {
            t[m][j] -= t[i][j];
        }
        t[m][n + i] = 0.0;
    }
    iterate(&mut t, &mut basis, n + m)?;
    if -t[m][width - 1] > 1e-9 {
        return Err("infeasible");
    }
    // Drive remaining artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, i, j);
                basis[i] = j;
            }
        }
    }
    // Phase 2.
    t[m] = vec![0.0; width];
    t[m][..n].copy_from_slice(c);
    for i in 0..m {
        let cb = if basis[i] < n { c[basis[i]] } else { 0.0 };
        if cb != 0.0 {
            let row = t[i].clone();
            for (v, r) in t[m].iter_mut().zip(&row) {
                *v -= cb * r;
            }
        }
    }
    iterate(&mut t, &mut basis, n)?;
    let mut z = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            z[bi] = t[i][width - 1];
        }
    }
    let value = c.iter().zip(&z).map(|(a, b)| a * b).sum();
    Ok((value, z))
}

/// `min_x max_y x^T M y` as the sequence-form LP
/// `min v_root` s.t. `F_y^T v - M^T x >= 0`, `F_x x = e`, `x >= 0`.
/// Returns the value and the minimizer's strategy.
pub fn lp_min_max(game: &GameInstance) -> (f64, Vec<f64>) {
    let d = dense(game);
    let fx = constraints(&game.treeplex_x);
    let fy = constraints(&game.treeplex_y);
    let (nx, ny, ky) = (
        game.treeplex_x.n_sequences(),
        game.treeplex_y.n_sequences(),
        fy.len(),
    );
    // Columns: x | v+ | v- | slack.
    let n = nx + 2 * ky + ny;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for s in 0..ny {
        let mut row = vec![0.0; n];
        for r in 0..nx {
            row[r] = -d[r][s];
        }
        for k in 0..ky {
            row[nx + k] = fy[k][s];
            row[nx + ky + k] = -fy[k][s];
        }
        row[nx + 2 * ky + s] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    for (k, f) in fx.iter().enumerate() {
        let mut row = vec![0.0; n];
        row[..nx].copy_from_slice(f);
        a.push(row);
        b.push(if k == 0 { 1.0 } else { 0.0 });
    }
    let mut c = vec![0.0; n];
    c[nx] = 1.0;
    c[nx + ky] = -1.0;
    let (value, z) = simplex(&a, &b, &c).expect("sequence-form LP is feasible and bounded");
    (value, z[..nx].to_vec())
}

// ---------------------------------------------------------------------------
// Dilated regularizers with unit weights, written out term by term:
// entropy `x_a ln(x_a / x_p)` and Euclidean `x_a^2 / (2 x_p)`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reg {
    Entropy,
    Euclidean,
}

pub fn reg_value(reg: Reg, t: &Treeplex, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for p in t.points() {
        let q = x[p.parent_seq()];
        for s in p.seqs() {
            if x[s] > 0.0 {
                total += match reg {
                    Reg::Entropy => x[s] * (x[s] / q).ln(),
                    Reg::Euclidean => x[s] * x[s] / (2.0 * q),
                };
            }
        }
    }
    total
}

/// Requires every entry to be positive.
pub fn reg_gradient(reg: Reg, t: &Treeplex, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for p in t.points() {
        let q = p.parent_seq();
        for s in p.seqs() {
            match reg {
                Reg::Entropy => {
                    g[s] += (x[s] / x[q]).ln() + 1.0;
                    g[q] -= x[s] / x[q];
                }
                Reg::Euclidean => {
                    g[s] += x[s] / x[q];
                    g[q] -= 0.5 * x[s] * x[s] / (x[q] * x[q]);
                }
            }
        }
    }
    g
}

fn reg_hessian(reg: Reg, t: &Treeplex, x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut h = vec![vec![0.0; n]; n];
    for p in t.points() {
        let q = p.parent_seq();
        for s in p.seqs() {
            let (ss, sq, qq) = match reg {
                Reg::Entropy => (1.0 / x[s], -1.0 / x[q], x[s] / (x[q] * x[q])),
                Reg::Euclidean => (
                    1.0 / x[q],
                    -x[s] / (x[q] * x[q]),
                    x[s] * x[s] / (x[q] * x[q] * x[q]),
                ),
            };
            h[s][s] += ss;
            h[s][q] += sq;
            h[q][s] += sq;
            h[q][q] += qq;
        }
    }
    h
}

/// `<lin, x> + D(x, center)` for an interior center.
pub fn prox_objective(reg: Reg, t: &Treeplex, lin: &[f64], center: &[f64], x: &[f64]) -> f64 {
    let gc = reg_gradient(reg, t, center);
    let mut v = reg_value(reg, t, x) - reg_value(reg, t, center);
    for i in 0..x.len() {
        v += lin[i] * x[i] - gc[i] * (x[i] - center[i]);
    }
    v
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// [`solve_dense`] followed by rounds of iterative refinement, for the
/// badly conditioned KKT systems near the boundary.
fn solve_refined(a: Vec<Vec<f64>>, b: Vec<f64>) -> Vec<f64> {
    let mut x = solve_dense(a.clone(), b.clone());
    for _ in 0..3 {
        let r: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(row, bi)| bi - row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>())
            .collect();
        let d = solve_dense(a.clone(), r);
        x.iter_mut().zip(d).for_each(|(xi, di)| *xi += di);
    }
    x
}

/// `argmin_x <lin, x> + D(x, center)` by equality-constrained Newton from the
/// uniform strategy. Only valid when the minimizer is interior, which always
/// holds for entropy.
pub fn newton_prox(reg: Reg, t: &Treeplex, lin: &[f64], center: &[f64]) -> Vec<f64> {
    let n = t.n_sequences();
    let gc = reg_gradient(reg, t, center);
    let q: Vec<f64> = lin.iter().zip(&gc).map(|(l, g)| l - g).collect();
    let objective =
        |x: &[f64]| q.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + reg_value(reg, t, x);
    let e = constraints(t);
    let k = e.len();
    let mut x = t.uniform_strategy().into_inner();
    for _ in 0..200 {
        let mut grad = reg_gradient(reg, t, &x);
        for (g, qi) in grad.iter_mut().zip(&q) {
            *g += qi;
        }
        let h = reg_hessian(reg, t, &x);
        let mut kkt = vec![vec![0.0; n + k]; n + k];
        let mut rhs = vec![0.0; n + k];
        for i in 0..n {
            kkt[i][..n].copy_from_slice(&h[i]);
            for (r, row) in e.iter().enumerate() {
                kkt[i][n + r] = row[i];
                kkt[n + r][i] = row[i];
            }
            rhs[i] = -grad[i];
        }
        let sol = solve_refined(kkt, rhs);
        let dx = &sol[..n];
        let decrement: f64 = -dx.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
        if decrement < 1e-28 {
            break;
        }
        let mut step = 1.0f64;
        for (xi, di) in x.iter().zip(dx) {
            if *di < 0.0 {
                step = step.min(-0.99 * xi / di);
            }
        }
        // Near the optimum objective differences drop below roundoff, so
        // take full steps there.
        if decrement < 1e-12 && step >= 1.0 {
            x.iter_mut().zip(dx).for_each(|(a, b)| *a += b);
            continue;
        }
        let f0 = objective(&x);
        loop {
            let cand: Vec<f64> = x.iter().zip(dx).map(|(a, b)| a + step * b).collect();
            if objective(&cand) <= f0 - 0.25 * step * decrement || step < 1e-12 {
                x = cand;
                break;
            }
            step *= 0.5;
        }
    }
    x
}
