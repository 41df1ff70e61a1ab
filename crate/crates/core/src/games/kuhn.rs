//! Kuhn poker: cards J < Q < K, ante 1, one bet of size 1.

use super::builder::{build, Node, Rules};
use super::GameInstance;

const CHECK: u8 = 0;
const RAISE: u8 = 1;

#[derive(Clone)]
struct State {
    started: bool,
    cards: Option<(u8, u8)>,
    hist: Vec<u8>,
}

struct Kuhn;

fn showdown(c: (u8, u8), stake: f64) -> f64 {
    if c.0 > c.1 {
        stake
    } else {
        -stake
    }
}

impl Rules for Kuhn {
    type State = State;

    fn root(&self) -> State {
        State {
            started: false,
            cards: None,
            hist: Vec::new(),
        }
    }

    fn expand(&self, s: &State) -> Node<State> {
        if !s.started {
            let next = State {
                started: true,
                ..s.clone()
            };
            return Node::Decision {
                player: 0,
                infoset: Vec::new(),
                children: vec![next],
            };
        }
        let Some(c) = s.cards else {
            let mut deals = Vec::new();
            for a in 0..3u8 {
                for b in (0..3u8).filter(|&b| b != a) {
                    deals.push((
                        1.0 / 6.0,
                        State {
                            cards: Some((a, b)),
                            ..s.clone()
                        },
                    ));
                }
            }
            return Node::Chance(deals);
        };
        let push = |a: u8| {
            let mut n = s.clone();
            n.hist.push(a);
            n
        };
        let acts = || vec![push(0), push(1)];
        match s.hist.as_slice() {
            [] => Node::Decision {
                player: 0,
                infoset: vec![c.0 as u32],
                children: acts(),
            },
            [h] => Node::Decision {
                player: 1,
                infoset: vec![c.1 as u32, *h as u32],
                children: acts(),
            },
            [CHECK, CHECK] => Node::Terminal(showdown(c, 1.0)),
            [CHECK, RAISE] => Node::Decision {
                player: 0,
                infoset: vec![c.0 as u32, 0, 1],
                children: acts(),
            },
            [RAISE, CHECK] => Node::Terminal(1.0),
            [RAISE, RAISE] => Node::Terminal(showdown(c, 2.0)),
            [CHECK, RAISE, CHECK] => Node::Terminal(-1.0),
            [CHECK, RAISE, RAISE] => Node::Terminal(showdown(c, 2.0)),
            _ => unreachable!("kuhn history"),
        }
    }

    fn labels(&self, s: &State) -> Vec<String> {
        let facing = matches!(s.hist.as_slice(), [RAISE] | [CHECK, RAISE]);
        let l: [&str; 2] = if !s.started {
            return vec!["start".into()];
        } else if facing {
            ["fold", "call"]
        } else {
            ["check", "raise"]
        };
        l.iter().map(|x| x.to_string()).collect()
    }
}

/// Kuhn poker. Player 1 (x) has a leading single-action "start" decision
/// point, so its treeplex has 7 decision points and 14 sequences.
pub fn build_kuhn() -> GameInstance {
    build("kuhn", &Kuhn).expect("kuhn is well formed")
}
