//! Sequence-form strategy spaces.
//!
//! A [`Treeplex`] stores one player's decision points. Decision point ids are
//! numbered top-down, so a parent always has a smaller id than its children,
//! and the bottom-up order is simply descending id. Sequence 0 is the empty
//! sequence; the actions of each decision point occupy a contiguous range, and
//! the ranges are laid out in bottom-up order (the deepest decision point owns
//! the range starting at 1).

use std::ops::{Deref, DerefMut};

use crate::error::TreeplexError;

/// Index of the empty sequence.
pub const ROOT_SEQ: usize = 0;

/// Parent reference used when describing a treeplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parent {
    Root,
    Seq { point: usize, action: usize },
}

/// Input description of one decision point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSpec {
    pub parents: Vec<Parent>,
    pub actions: Vec<String>,
}

impl PointSpec {
    pub fn new<S: Into<String>>(parent: Parent, actions: impl IntoIterator<Item = S>) -> Self {
        PointSpec {
            parents: vec![parent],
            actions: actions.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionPoint {
    parent_seq: usize,
    parent_point: Option<usize>,
    seq_start: usize,
    actions: Vec<String>,
}

impl DecisionPoint {
    pub fn parent_seq(&self) -> usize {
        self.parent_seq
    }
    pub fn parent_point(&self) -> Option<usize> {
        self.parent_point
    }
    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn actions(&self) -> &[String] {
        &self.actions
    }
    pub fn seqs(&self) -> std::ops::Range<usize> {
        self.seq_start..self.seq_start + self.actions.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Treeplex {
    points: Vec<DecisionPoint>,
    n_sequences: usize,
    /// Decision points reached right after each sequence (index 0: root points).
    children: Vec<Vec<usize>>,
    /// Owning decision point of each sequence; `usize::MAX` for the root.
    seq_point: Vec<usize>,
    topo_order: Vec<usize>,
}

impl Treeplex {
    /// Builds and validates a treeplex. Points must be listed parents first.
    pub fn new(specs: Vec<PointSpec>) -> Result<Self, TreeplexError> {
        let n = specs.len();
        if let Some(j) = specs.iter().position(|s| s.actions.is_empty()) {
            return Err(TreeplexError::NoActions { point: j });
        }
        let mut seq_start = vec![0usize; n];
        let mut next = 1;
        for j in (0..n).rev() {
            seq_start[j] = next;
            next += specs[j].actions.len();
        }
        let n_sequences = next;
        let mut parent_of = Vec::with_capacity(n);
        for (j, spec) in specs.iter().enumerate() {
            for p in &spec.parents {
                if let Parent::Seq { point, action } = *p {
                    if point >= n {
                        return Err(TreeplexError::UnknownId { id: point });
                    }
                    if action >= specs[point].actions.len() {
                        return Err(TreeplexError::UnknownId { id: action });
                    }
                }
            }
            match spec.parents.as_slice() {
                [p] => parent_of.push(*p),
                [first, rest @ ..] if rest.iter().all(|p| p == first) => {
                    let seq = match *first {
                        Parent::Root => ROOT_SEQ,
                        Parent::Seq { point, action } => seq_start[point] + action,
                    };
                    return Err(TreeplexError::OverlappingChildren { point: j, seq });
                }
                ps => {
                    return Err(TreeplexError::MultipleParents {
                        point: j,
                        count: ps.len(),
                    })
                }
            }
        }
        for j in 0..n {
            if let Parent::Seq { point, .. } = parent_of[j] {
                if point >= j {
                    let mut cur = point;
                    for _ in 0..=n {
                        if cur == j {
                            return Err(TreeplexError::CycleDetected { point: j });
                        }
                        match parent_of[cur] {
                            Parent::Seq { point, .. } => cur = point,
                            Parent::Root => break,
                        }
                    }
                    return Err(TreeplexError::BadTopoOrder {
                        point: j,
                        parent: point,
                    });
                }
            }
        }

        let mut seq_point = vec![usize::MAX; n_sequences];
        let mut children = vec![Vec::new(); n_sequences];
        let mut points = Vec::with_capacity(n);
        for (j, spec) in specs.into_iter().enumerate() {
            let (parent_seq, parent_point) = match parent_of[j] {
                Parent::Root => (ROOT_SEQ, None),
                Parent::Seq { point, action } => (seq_start[point] + action, Some(point)),
            };
            children[parent_seq].push(j);
            seq_point[seq_start[j]..seq_start[j] + spec.actions.len()].fill(j);
            points.push(DecisionPoint {
                parent_seq,
                parent_point,
                seq_start: seq_start[j],
                actions: spec.actions,
            });
        }
        Ok(Treeplex {
            points,
            n_sequences,
            children,
            seq_point,
            topo_order: (0..n).rev().collect(),
        })
    }

    /// Single decision point with `n` actions.
    pub fn simplex(n: usize) -> Self {
        Treeplex::new(vec![PointSpec::new(
            Parent::Root,
            (0..n).map(|a| format!("a{a}")),
        )])
        .expect("valid simplex")
    }

    /// Re-checks every structural invariant by brute force.
    pub fn validate(&self) -> Result<(), TreeplexError> {
        let n = self.points.len();
        let mut seen = vec![false; n];
        for (s, kids) in self.children.iter().enumerate() {
            for &j in kids {
                if j >= n {
                    return Err(TreeplexError::UnknownId { id: j });
                }
                if seen[j] {
                    return Err(TreeplexError::OverlappingChildren { point: j, seq: s });
                }
                seen[j] = true;
                if self.points[j].parent_seq != s {
                    return Err(TreeplexError::MultipleParents { point: j, count: 2 });
                }
            }
        }
        if let Some(j) = seen.iter().position(|&b| !b) {
            return Err(TreeplexError::MultipleParents { point: j, count: 0 });
        }
        let mut pos = vec![0usize; n];
        for (i, &j) in self.topo_order.iter().enumerate() {
            pos[j] = i;
        }
        for j in 0..n {
            let mut steps = 0;
            let mut cur = self.points[j].parent_point;
            while let Some(p) = cur {
                steps += 1;
                if steps > n || p == j {
                    return Err(TreeplexError::CycleDetected { point: j });
                }
                if pos[p] < pos[j] {
                    return Err(TreeplexError::BadTopoOrder {
                        point: j,
                        parent: p,
                    });
                }
                cur = self.points[p].parent_point;
            }
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_sequences(&self) -> usize {
        self.n_sequences
    }

    pub fn point(&self, j: usize) -> &DecisionPoint {
        &self.points[j]
    }

    pub fn points(&self) -> &[DecisionPoint] {
        &self.points
    }

    /// Sequence index of action `a` at decision point `j`.
    pub fn seq(&self, j: usize, a: usize) -> usize {
        debug_assert!(a < self.points[j].n_actions());
        self.points[j].seq_start + a
    }

    /// Decision point owning sequence `s`, or `None` for the root sequence.
    pub fn seq_owner(&self, s: usize) -> Option<usize> {
        match self.seq_point[s] {
            usize::MAX => None,
            j => Some(j),
        }
    }

    /// Decision points reached immediately after sequence `s`.
    pub fn children(&self, s: usize) -> &[usize] {
        &self.children[s]
    }

    /// Bottom-up order: every decision point after its whole subtree.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// All decision points in the subtree rooted at `j`, including `j`, ascending.
    pub fn subtree_decision_points(&self, j: usize) -> Result<Vec<usize>, TreeplexError> {
        if j >= self.points.len() {
            return Err(TreeplexError::UnknownId { id: j });
        }
        let mut out = vec![j];
        let mut i = 0;
        while i < out.len() {
            let d = out[i];
            for s in self.points[d].seqs() {
                out.extend_from_slice(&self.children[s]);
            }
            i += 1;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Number of decision points on the path from `j` to the root, counting `j`.
    pub fn depth(&self, j: usize) -> usize {
        let mut d = 1;
        let mut cur = self.points[j].parent_point;
        while let Some(p) = cur {
            d += 1;
            cur = self.points[p].parent_point;
        }
        d
    }

    fn check_len(&self, len: usize) -> Result<(), TreeplexError> {
        if len != self.n_sequences {
            return Err(TreeplexError::DimensionMismatch {
                expected: self.n_sequences,
                got: len,
            });
        }
        Ok(())
    }

    /// Root value 1, flow conservation and nonnegativity, all within `tol`.
    pub fn check_feasible(&self, v: &[f64], tol: f64) -> Result<bool, TreeplexError> {
        self.check_len(v.len())?;
        if !((v[ROOT_SEQ] - 1.0).abs() <= tol) {
            return Ok(false);
        }
        if v.iter().any(|&x| !(x >= -tol)) {
            return Ok(false);
        }
        for p in &self.points {
            let sum: f64 = v[p.seqs()].iter().sum();
            if !((sum - v[p.parent_seq]).abs() <= tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn uniform_behavioral(&self) -> BehavioralStrategy {
        let mut probs = vec![1.0; self.n_sequences];
        for p in &self.points {
            let u = 1.0 / p.n_actions() as f64;
            probs[p.seqs()].fill(u);
        }
        BehavioralStrategy { probs }
    }

    pub fn uniform_strategy(&self) -> SequenceVector {
        self.behavioral_to_sequence(&self.uniform_behavioral())
    }

    /// Top-down pass: `x[(j,a)] = x[p_j] * b^j[a]`.
    pub fn behavioral_to_sequence(&self, b: &BehavioralStrategy) -> SequenceVector {
        let mut out = SequenceVector::zeros(self.n_sequences);
        self.behavioral_to_sequence_into(b, &mut out);
        out
    }

    pub fn behavioral_to_sequence_into(&self, b: &BehavioralStrategy, out: &mut [f64]) {
        assert_eq!(b.probs.len(), self.n_sequences);
        assert_eq!(out.len(), self.n_sequences);
        out[ROOT_SEQ] = 1.0;
        for p in &self.points {
            let parent = out[p.parent_seq];
            for s in p.seqs() {
                out[s] = parent * b.probs[s];
            }
        }
    }

    /// `b^j = v^j / v^{p_j}`, uniform wherever the parent value is not positive.
    pub fn sequence_to_behavioral(&self, v: &[f64]) -> Result<BehavioralStrategy, TreeplexError> {
        self.check_len(v.len())?;
        let mut probs = vec![1.0; self.n_sequences];
        for p in &self.points {
            let parent = v[p.parent_seq];
            if parent > 0.0 {
                for s in p.seqs() {
                    probs[s] = v[s] / parent;
                }
            } else {
                probs[p.seqs()].fill(1.0 / p.n_actions() as f64);
            }
        }
        Ok(BehavioralStrategy { probs })
    }
}

/// A vector indexed by sequences, entry 0 being the empty sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SequenceVector(pub Vec<f64>);

impl SequenceVector {
    pub fn zeros(n: usize) -> Self {
        SequenceVector(vec![0.0; n])
    }
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for SequenceVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for SequenceVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for SequenceVector {
    fn from(v: Vec<f64>) -> Self {
        SequenceVector(v)
    }
}

/// Per-decision-point action distributions, stored in sequence layout:
/// `probs[seq(j, a)] = b^j[a]` and `probs[0] = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BehavioralStrategy {
    probs: Vec<f64>,
}

impl BehavioralStrategy {
    pub fn from_flat(t: &Treeplex, probs: Vec<f64>) -> Result<Self, TreeplexError> {
        t.check_len(probs.len())?;
        Ok(BehavioralStrategy { probs })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.probs
    }

    pub fn local<'a>(&'a self, t: &Treeplex, j: usize) -> &'a [f64] {
        &self.probs[t.point(j).seqs()]
    }

    /// True when every local distribution sums to one within `tol` and is nonnegative.
    pub fn is_valid(&self, t: &Treeplex, tol: f64) -> bool {
        self.probs.len() == t.n_sequences()
            && t.points().iter().all(|p| {
                let b = &self.probs[p.seqs()];
                b.iter().all(|&v| v >= -tol) && (b.iter().sum::<f64>() - 1.0).abs() <= tol
            })
    }
}
