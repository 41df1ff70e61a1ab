//! Converts a game tree into two treeplexes and a chance-weighted payoff matrix.

use std::collections::{HashMap, VecDeque};

use super::{GameInstance, PayoffMatrix};
use crate::error::GameError;
use crate::treeplex::{Parent, PointSpec, Treeplex};

pub(crate) enum Node<S> {
    /// Payoff to player 0 (the x player).
    Terminal(f64),
    Chance(Vec<(f64, S)>),
    /// `infoset` must identify everything `player` has observed.
    Decision {
        player: usize,
        infoset: Vec<u32>,
        children: Vec<S>,
    },
}

pub(crate) trait Rules {
    type State;
    fn root(&self) -> Self::State;
    fn expand(&self, s: &Self::State) -> Node<Self::State>;
    /// Action labels at a decision node; called once per infoset.
    fn labels(&self, s: &Self::State) -> Vec<String>;
}

/// Raw sequence: 0 for the root, otherwise `(point + 1) << 8 | action`.
type RawSeq = u64;

fn raw_seq(point: usize, action: usize) -> RawSeq {
    ((point as u64 + 1) << 8) | action as u64
}

struct RawPoint {
    parent: RawSeq,
    labels: Vec<String>,
    /// Children per action, in discovery order.
    children: Vec<Vec<usize>>,
}

#[derive(Default)]
struct Side {
    index: HashMap<Vec<u32>, usize>,
    points: Vec<RawPoint>,
    roots: Vec<usize>,
}

impl Side {
    fn visit(
        &mut self,
        key: Vec<u32>,
        parent: RawSeq,
        n: usize,
        labels: impl FnOnce() -> Vec<String>,
    ) -> Result<usize, GameError> {
        if let Some(&j) = self.index.get(&key) {
            let p = &self.points[j];
            if p.parent != parent || p.children.len() != n {
                return Err(GameError::BadParam("game violates perfect recall".into()));
            }
            return Ok(j);
        }
        assert!(n < 256, "too many actions");
        let j = self.points.len();
        let labels = labels();
        assert_eq!(labels.len(), n);
        self.points.push(RawPoint {
            parent,
            labels,
            children: vec![Vec::new(); n],
        });
        if parent == 0 {
            self.roots.push(j);
        } else {
            let (pj, pa) = ((parent >> 8) as usize - 1, (parent & 0xff) as usize);
            self.points[pj].children[pa].push(j);
        }
        self.index.insert(key, j);
        Ok(j)
    }

    /// Renumbers points breadth-first and returns the treeplex plus a map
    /// from raw point id to final id.
    fn finish(self) -> Result<(Treeplex, Vec<usize>), GameError> {
        let n = self.points.len();
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = self.roots.iter().copied().collect();
        while let Some(j) = queue.pop_front() {
            new_id[j] = order.len();
            order.push(j);
            for kids in &self.points[j].children {
                queue.extend(kids.iter().copied());
            }
        }
        let mut points: Vec<Option<RawPoint>> = self.points.into_iter().map(Some).collect();
        let mut specs = Vec::with_capacity(n);
        for &j in &order {
            let p = points[j].take().expect("visited once");
            let parent = if p.parent == 0 {
                Parent::Root
            } else {
                Parent::Seq {
                    point: new_id[(p.parent >> 8) as usize - 1],
                    action: (p.parent & 0xff) as usize,
                }
            };
            specs.push(PointSpec {
                parents: vec![parent],
                actions: p.labels,
            });
        }
        Ok((Treeplex::new(specs)?, new_id))
    }
}

struct Walker<'r, R: Rules> {
    rules: &'r R,
    sides: [Side; 2],
    payoffs: HashMap<(RawSeq, RawSeq), f64>,
}

impl<R: Rules> Walker<'_, R> {
    fn walk(&mut self, s: &R::State, reach: f64, cur: [RawSeq; 2]) -> Result<(), GameError> {
        match self.rules.expand(s) {
            Node::Terminal(u) => {
                *self.payoffs.entry((cur[0], cur[1])).or_insert(0.0) += -reach * u;
            }
            Node::Chance(outcomes) => {
                for (p, child) in &outcomes {
                    self.walk(child, reach * p, cur)?;
                }
            }
            Node::Decision {
                player,
                infoset,
                children,
            } => {
                let rules = self.rules;
                let j = self.sides[player]
                    .visit(infoset, cur[player], children.len(), || rules.labels(s))?;
                for (a, child) in children.iter().enumerate() {
                    let mut next = cur;
                    next[player] = raw_seq(j, a);
                    self.walk(child, reach, next)?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn build<R: Rules>(name: &str, rules: &R) -> Result<GameInstance, GameError> {
    let mut w = Walker {
        rules,
        sides: [Side::default(), Side::default()],
        payoffs: HashMap::new(),
    };
    w.walk(&rules.root(), 1.0, [0, 0])?;
    let Walker {
        sides: [sx, sy],
        payoffs,
        ..
    } = w;
    let (tx, idx) = sx.finish()?;
    let (ty, idy) = sy.finish()?;
    let map = |t: &Treeplex, ids: &[usize], raw: RawSeq| {
        if raw == 0 {
            0
        } else {
            t.seq(ids[(raw >> 8) as usize - 1], (raw & 0xff) as usize)
        }
    };
    let triples = payoffs
        .into_iter()
        .map(|((rx, ry), v)| (map(&tx, &idx, rx), map(&ty, &idy, ry), v))
        .collect();
    let m = PayoffMatrix::from_triples(tx.n_sequences(), ty.n_sequences(), triples)?;
    GameInstance::new(name, tx, ty, m)
}
