//! Leduc hold'em with a configurable number of ranks, two copies of each.
//!
//! Ante 1; raises of 2 in the first round and 4 in the second; at most two
//! raises per round. Folding is only offered when facing a bet. A pair with the
//! public card wins, otherwise the higher private card, otherwise a split.

use super::builder::{build, Node, Rules};
use super::GameInstance;
use crate::error::GameError;

const CALL: u8 = 0;
const RAISE: u8 = 1;
const FOLD: u8 = 2;
const PUBLIC_BASE: u32 = 100;

#[derive(Clone)]
struct State {
    cards: [Option<u8>; 2],
    public: Option<u8>,
    round: u8,
    /// Actions in the current round.
    actions: Vec<u8>,
    raises: u8,
    facing: bool,
    spent: [f64; 2],
    /// Observation tokens shared by both players.
    public_hist: Vec<u32>,
    folded: Option<usize>,
    done: bool,
}

struct Leduc {
    ranks: u8,
}

impl Leduc {
    fn to_act(&self, s: &State) -> usize {
        s.actions.len() % 2
    }

    fn legal(&self, s: &State) -> Vec<u8> {
        if s.facing {
            let mut v = vec![FOLD, CALL];
            if s.raises < 2 {
                v.push(RAISE);
            }
            v
        } else {
            vec![CALL, RAISE]
        }
    }

    fn apply(&self, s: &State, a: u8) -> State {
        let mut n = s.clone();
        let p = self.to_act(s);
        n.actions.push(a);
        n.public_hist.push(a as u32);
        let bet = if s.round == 0 { 2.0 } else { 4.0 };
        match a {
            FOLD => {
                n.folded = Some(p);
                n.done = true;
            }
            CALL => {
                let closes = s.facing || !s.actions.is_empty();
                n.spent[p] = n.spent[1 - p];
                n.facing = false;
                if closes {
                    if s.round == 1 {
                        n.done = true;
                    } else {
                        n.round = 1;
                        n.actions.clear();
                        n.raises = 0;
                        n.public_hist.push(u32::MAX);
                    }
                }
            }
            _ => {
                n.spent[p] = n.spent[1 - p] + bet;
                n.raises += 1;
                n.facing = true;
            }
        }
        n
    }

    fn payoff(&self, s: &State) -> f64 {
        if let Some(p) = s.folded {
            return if p == 0 { -s.spent[0] } else { s.spent[1] };
        }
        let (c0, c1, pc) = (s.cards[0].unwrap(), s.cards[1].unwrap(), s.public.unwrap());
        let strength = |c: u8| if c == pc { 1000 + c as i32 } else { c as i32 };
        match strength(c0).cmp(&strength(c1)) {
            std::cmp::Ordering::Greater => s.spent[1],
            std::cmp::Ordering::Less => -s.spent[0],
            std::cmp::Ordering::Equal => 0.0,
        }
    }
}

impl Rules for Leduc {
    type State = State;

    fn root(&self) -> State {
        State {
            cards: [None, None],
            public: None,
            round: 0,
            actions: Vec::new(),
            raises: 0,
            facing: false,
            spent: [1.0, 1.0],
            public_hist: Vec::new(),
            folded: None,
            done: false,
        }
    }

    fn expand(&self, s: &State) -> Node<State> {
        let r = self.ranks as usize;
        let deck = 2 * r;
        if s.cards[0].is_none() {
            return Node::Chance(
                (0..self.ranks)
                    .map(|c| {
                        let mut n = s.clone();
                        n.cards[0] = Some(c);
                        (2.0 / deck as f64, n)
                    })
                    .collect(),
            );
        }
        if s.cards[1].is_none() {
            let c0 = s.cards[0].unwrap();
            return Node::Chance(
                (0..self.ranks)
                    .map(|c| {
                        let left = if c == c0 { 1.0 } else { 2.0 };
                        let mut n = s.clone();
                        n.cards[1] = Some(c);
                        (left / (deck - 1) as f64, n)
                    })
                    .collect(),
            );
        }
        if s.done {
            return Node::Terminal(self.payoff(s));
        }
        if s.round == 1 && s.public.is_none() {
            let used = |c: u8| s.cards.iter().filter(|&&x| x == Some(c)).count();
            return Node::Chance(
                (0..self.ranks)
                    .filter(|&c| used(c) < 2)
                    .map(|c| {
                        let mut n = s.clone();
                        n.public = Some(c);
                        n.public_hist.push(PUBLIC_BASE + c as u32);
                        ((2 - used(c)) as f64 / (deck - 2) as f64, n)
                    })
                    .collect(),
            );
        }
        let p = self.to_act(s);
        let mut infoset = vec![s.cards[p].unwrap() as u32];
        infoset.extend_from_slice(&s.public_hist);
        let children = self
            .legal(s)
            .into_iter()
            .map(|a| self.apply(s, a))
            .collect();
        Node::Decision {
            player: p,
            infoset,
            children,
        }
    }

    fn labels(&self, s: &State) -> Vec<String> {
        self.legal(s)
            .into_iter()
            .map(|a| match (a, s.facing) {
                (FOLD, _) => "fold",
                (CALL, true) => "call",
                (CALL, false) => "check",
                _ => "raise",
            })
            .map(String::from)
            .collect()
    }
}

pub fn build_leduc(ranks: usize) -> Result<GameInstance, GameError> {
    if !(2..=64).contains(&ranks) {
        return Err(GameError::BadParam(format!(
            "leduc needs 2..=64 ranks, got {ranks}"
        )));
    }
    build(&format!("leduc{ranks}"), &Leduc { ranks: ranks as u8 })
}
