//! Local simplex regularizers and their dilated composition over a treeplex.
//!
//! For a local regularizer `phi_j` on the simplex, the dilated regularizer is
//! `phi(x) = sum_j beta_j * x[p_j] * phi_j(x^j / x[p_j])`. Its prox decomposes
//! into one local prox per decision point, visited bottom-up, where each local
//! optimum value is added to the parent sequence's linear term.

use std::str::FromStr;

use crate::error::{RegularizerError, SolverError};
use crate::treeplex::{BehavioralStrategy, SequenceVector, Treeplex, ROOT_SEQ};

/// Lower bound applied to behavioral entries before taking logs.
pub const ENTROPY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalKind {
    /// Negative entropy `sum b ln b`, 1-strongly convex w.r.t. l1.
    Entropy,
    /// `0.5 * |b|^2`, 1-strongly convex w.r.t. l2.
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    L1,
    L2,
}

impl FromStr for LocalKind {
    type Err = SolverError;
    fn from_str(s: &str) -> Result<Self, SolverError> {
        match s {
            "entropy" | "dilated-entropy" => Ok(LocalKind::Entropy),
            "euclidean" | "l2" | "dilated-l2" => Ok(LocalKind::Euclidean),
            "global-entropy" | "dilatable-global-entropy" => Err(SolverError::Config(
                "the dilatable global entropy regularizer is not supported; use entropy or euclidean".into(),
            )),
            other => Err(SolverError::Config(format!("unknown regularizer '{other}'"))),
        }
    }
}

impl LocalKind {
    pub fn norm(self) -> NormKind {
        match self {
            LocalKind::Entropy => NormKind::L1,
            LocalKind::Euclidean => NormKind::L2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DilatedRegularizer {
    kind: LocalKind,
    weights: Vec<f64>,
    strong_convexity: f64,
}

fn check_finite(v: &[f64]) -> Result<(), RegularizerError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(RegularizerError::NonFiniteInput { index }),
        None => Ok(()),
    }
}

/// `argmin_{b in simplex} <g, b> + w * D(b, center)`, written to `out`; returns the minimum.
/// Entropy centers are floored at [`ENTROPY_FLOOR`] and so are the outputs.
fn local_prox_unchecked(
    kind: LocalKind,
    g: &[f64],
    center: &[f64],
    w: f64,
    out: &mut [f64],
) -> f64 {
    match kind {
        LocalKind::Entropy => {
            let mut m = f64::NEG_INFINITY;
            for ((o, &gi), &ci) in out.iter_mut().zip(g).zip(center) {
                *o = ci.max(ENTROPY_FLOOR).ln() - gi / w;
                m = m.max(*o);
            }
            let mut s = 0.0;
            for o in out.iter_mut() {
                *o = (*o - m).exp();
                s += *o;
            }
            for o in out.iter_mut() {
                *o = (*o / s).max(ENTROPY_FLOOR);
            }
            -w * (m + s.ln())
        }
        LocalKind::Euclidean => {
            for ((o, &gi), &ci) in out.iter_mut().zip(g).zip(center) {
                *o = ci - gi / w;
            }
            project_simplex(out);
            let mut value = 0.0;
            for ((&b, &gi), &ci) in out.iter().zip(g).zip(center) {
                value += gi * b + 0.5 * w * (b - ci) * (b - ci);
            }
            value
        }
    }
}

/// In-place Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &mut [f64]) {
    let mut theta = f64::NEG_INFINITY;
    loop {
        let (mut sum, mut k) = (0.0, 0usize);
        for &x in v.iter() {
            if x > theta {
                sum += x;
                k += 1;
            }
        }
        let next = (sum - 1.0) / k as f64;
        if next <= theta {
            break;
        }
        theta = next;
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Local prox on a simplex: returns `(argmin, value)` of
/// `<g, b> + w * D(b, center)`.
pub fn local_prox(
    kind: LocalKind,
    g: &[f64],
    center: &[f64],
    w: f64,
) -> Result<(Vec<f64>, f64), RegularizerError> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(RegularizerError::BadWeight(w));
    }
    assert_eq!(g.len(), center.len());
    check_finite(g)?;
    check_finite(center)?;
    if kind == LocalKind::Entropy {
        if let Some(index) = center.iter().position(|&c| c <= 0.0) {
            return Err(RegularizerError::CenterNotInterior {
                index,
                value: center[index],
            });
        }
    }
    let mut out = vec![0.0; g.len()];
    let value = local_prox_unchecked(kind, g, center, w, &mut out);
    Ok((out, value))
}

/// Scratch space for [`DilatedRegularizer::prox_behavioral`].
#[derive(Debug, Clone, Default)]
pub struct ProxWorkspace {
    hhat: Vec<f64>,
    g: Vec<f64>,
    /// Decision points visited by prox calls so far.
    pub visits: u64,
}

impl ProxWorkspace {
    pub fn new(t: &Treeplex) -> Self {
        ProxWorkspace {
            hhat: vec![0.0; t.n_sequences()],
            g: Vec::new(),
            visits: 0,
        }
    }
}

impl DilatedRegularizer {
    /// Unit weights, declared strong convexity 1 w.r.t. the kind's norm.
    pub fn new(kind: LocalKind, t: &Treeplex) -> Self {
        DilatedRegularizer {
            kind,
            weights: vec![1.0; t.n_points()],
            strong_convexity: 1.0,
        }
    }

    pub fn with_weights(
        kind: LocalKind,
        weights: Vec<f64>,
        strong_convexity: f64,
    ) -> Result<Self, RegularizerError> {
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(RegularizerError::BadWeight(w));
        }
        if !(strong_convexity > 0.0) {
            return Err(RegularizerError::BadWeight(strong_convexity));
        }
        Ok(DilatedRegularizer {
            kind,
            weights,
            strong_convexity,
        })
    }

    pub fn kind(&self) -> LocalKind {
        self.kind
    }

    pub fn norm(&self) -> NormKind {
        self.kind.norm()
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    /// Local prox at decision point `j` with weight `beta_j`.
    #[inline]
    pub fn local_step(&self, j: usize, g: &[f64], center: &[f64], out: &mut [f64]) -> f64 {
        local_prox_unchecked(self.kind, g, center, self.weights[j], out)
    }

    /// `argmin_x <lin, x> + D(x, center)` in behavioral form, where the
    /// center is given by its behavioral strategy. One bottom-up pass.
    pub fn prox_behavioral(
        &self,
        t: &Treeplex,
        lin: &[f64],
        center: &BehavioralStrategy,
        out: &mut BehavioralStrategy,
        ws: &mut ProxWorkspace,
    ) -> Result<(), RegularizerError> {
        assert_eq!(self.weights.len(), t.n_points());
        assert_eq!(lin.len(), t.n_sequences());
        check_finite(lin)?;
        ws.hhat.clear();
        ws.hhat.resize(t.n_sequences(), 0.0);
        let c = center.as_slice();
        for &j in t.topo_order() {
            let p = t.point(j);
            let r = p.seqs();
            ws.g.clear();
            ws.g.extend(r.clone().map(|s| lin[s] + ws.hhat[s]));
            let value = self.local_step(j, &ws.g, &c[r.clone()], &mut out.as_mut_slice()[r]);
            if !value.is_finite() {
                return Err(RegularizerError::NonFiniteInput {
                    index: p.parent_seq(),
                });
            }
            ws.hhat[p.parent_seq()] += value;
            ws.visits += 1;
        }
        out.as_mut_slice()[ROOT_SEQ] = 1.0;
        Ok(())
    }

    /// `argmin_{x in X} eta * <h, x> + D(x, center)` in sequence form.
    pub fn dilated_prox(
        &self,
        t: &Treeplex,
        eta: f64,
        h: &[f64],
        center: &[f64],
    ) -> Result<SequenceVector, RegularizerError> {
        if self.kind == LocalKind::Entropy {
            self.check_interior(center)?;
        }
        let cb = t.sequence_to_behavioral(center)?;
        let lin: Vec<f64> = h.iter().map(|v| eta * v).collect();
        let mut out = cb.clone();
        let mut ws = ProxWorkspace::new(t);
        self.prox_behavioral(t, &lin, &cb, &mut out, &mut ws)?;
        Ok(t.behavioral_to_sequence(&out))
    }

    fn check_interior(&self, x: &[f64]) -> Result<(), RegularizerError> {
        match x.iter().position(|&v| !(v > 0.0)) {
            Some(index) => Err(RegularizerError::CenterNotInterior {
                index,
                value: x[index],
            }),
            None => Ok(()),
        }
    }

    /// Dilated value; the root sequence contributes nothing.
    pub fn value(&self, t: &Treeplex, x: &[f64]) -> Result<f64, RegularizerError> {
        if x.len() != t.n_sequences() {
            return Err(crate::error::TreeplexError::DimensionMismatch {
                expected: t.n_sequences(),
                got: x.len(),
            }
            .into());
        }
        check_finite(x)?;
        let mut total = 0.0;
        for (j, p) in t.points().iter().enumerate() {
            let parent = x[p.parent_seq()];
            let local = &x[p.seqs()];
            let term = match self.kind {
                LocalKind::Entropy => local
                    .iter()
                    .map(|&v| if v > 0.0 { v * (v / parent).ln() } else { 0.0 })
                    .sum::<f64>(),
                LocalKind::Euclidean => {
                    if parent > 0.0 {
                        local.iter().map(|v| v * v).sum::<f64>() / (2.0 * parent)
                    } else {
                        0.0
                    }
                }
            };
            total += self.weights[j] * term;
        }
        Ok(total)
    }

    /// Gradient of [`Self::value`] with respect to every sequence, the root included.
    /// Entropy requires `x > 0`; for the Euclidean kind a zero parent uses the
    /// uniform local strategy.
    pub fn gradient(&self, t: &Treeplex, x: &[f64]) -> Result<SequenceVector, RegularizerError> {
        if self.kind == LocalKind::Entropy {
            self.check_interior(x)?;
        }
        let b = t.sequence_to_behavioral(x)?;
        Ok(self.gradient_behavioral(t, &b))
    }

    /// Gradient expressed through a behavioral strategy:
    /// `beta_j * grad phi_j(b^j)_a - sum over children j' of beta_j' * (<grad phi_j'(b'), b'> - phi_j'(b'))`.
    pub fn gradient_behavioral(&self, t: &Treeplex, b: &BehavioralStrategy) -> SequenceVector {
        let mut grad = SequenceVector::zeros(t.n_sequences());
        let bs = b.as_slice();
        for (j, p) in t.points().iter().enumerate() {
            let w = self.weights[j];
            let local = &bs[p.seqs()];
            let conj = match self.kind {
                LocalKind::Entropy => {
                    for s in p.seqs() {
                        grad[s] += w * (bs[s].max(ENTROPY_FLOOR).ln() + 1.0);
                    }
                    // <grad, b> - phi(b) = sum b (ln b + 1) - sum b ln b = 1
                    local.iter().sum::<f64>()
                }
                LocalKind::Euclidean => {
                    for s in p.seqs() {
                        grad[s] += w * bs[s];
                    }
                    0.5 * local.iter().map(|v| v * v).sum::<f64>()
                }
            };
            grad[p.parent_seq()] -= w * conj;
        }
        grad
    }

    /// `D(y, x) = phi(y) - phi(x) - <grad phi(x), y - x>`.
    pub fn bregman(&self, t: &Treeplex, y: &[f64], x: &[f64]) -> Result<f64, RegularizerError> {
        let g = self.gradient(t, x)?;
        let lin: f64 = g
            .iter()
            .zip(y.iter().zip(x))
            .map(|(gi, (yi, xi))| gi * (yi - xi))
            .sum();
        Ok(self.value(t, y)? - self.value(t, x)? - lin)
    }

    /// Upper bound on `sup_u D(u, x0)` for `x0` the uniform strategy.
    pub fn divergence_bound_uniform(&self, t: &Treeplex) -> f64 {
        t.points()
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let n = p.n_actions() as f64;
                self.weights[j]
                    * match self.kind {
                        LocalKind::Entropy => n.ln(),
                        LocalKind::Euclidean => 0.5 * (1.0 - 1.0 / n),
                    }
            })
            .sum()
    }
}
