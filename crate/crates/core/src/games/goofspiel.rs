//! Goofspiel with `n` ranks: each round a prize card is drawn uniformly from
//! the remaining prizes, both players bid a card from their hand at the same
//! time, and the bids are then revealed. The higher bid wins the prize's value
//! (its rank, 1-based); ties discard the prize. Payoff is the difference of the
//! prize sums won.

use super::builder::{build, Node, Rules};
use super::GameInstance;
use crate::error::GameError;

#[derive(Clone)]
struct State {
    hands: [u8; 2],
    prizes: u8,
    prize: Option<u8>,
    bid0: Option<u8>,
    /// Public tokens: prize, bid 0, bid 1 per finished round.
    hist: Vec<u32>,
    score: i32,
}

struct Goofspiel {
    n: u8,
}

fn cards(mask: u8) -> impl Iterator<Item = u8> {
    (0..8u8).filter(move |c| mask & (1 << c) != 0)
}

impl Goofspiel {
    fn infoset(&self, s: &State) -> Vec<u32> {
        let mut k = s.hist.clone();
        k.push(100 + s.prize.unwrap() as u32);
        k
    }
}

impl Rules for Goofspiel {
    type State = State;

    fn root(&self) -> State {
        let all = ((1u16 << self.n) - 1) as u8;
        State {
            hands: [all, all],
            prizes: all,
            prize: None,
            bid0: None,
            hist: Vec::new(),
            score: 0,
        }
    }

    fn expand(&self, s: &State) -> Node<State> {
        let Some(prize) = s.prize else {
            if s.prizes == 0 {
                return Node::Terminal(s.score as f64);
            }
            let left = s.prizes.count_ones() as f64;
            return Node::Chance(
                cards(s.prizes)
                    .map(|c| {
                        let mut n = s.clone();
                        n.prize = Some(c);
                        n.prizes &= !(1 << c);
                        (1.0 / left, n)
                    })
                    .collect(),
            );
        };
        match s.bid0 {
            None => {
                let children = cards(s.hands[0])
                    .map(|b| {
                        let mut n = s.clone();
                        n.bid0 = Some(b);
                        n.hands[0] &= !(1 << b);
                        n
                    })
                    .collect();
                Node::Decision {
                    player: 0,
                    infoset: self.infoset(s),
                    children,
                }
            }
            Some(b0) => {
                let children = cards(s.hands[1])
                    .map(|b1| {
                        let mut n = s.clone();
                        n.hands[1] &= !(1 << b1);
                        n.bid0 = None;
                        n.prize = None;
                        let value = prize as i32 + 1;
                        n.score += match b0.cmp(&b1) {
                            std::cmp::Ordering::Greater => value,
                            std::cmp::Ordering::Less => -value,
                            std::cmp::Ordering::Equal => 0,
                        };
                        n.hist
                            .extend_from_slice(&[prize as u32, b0 as u32, b1 as u32]);
                        n
                    })
                    .collect();
                Node::Decision {
                    player: 1,
                    infoset: self.infoset(s),
                    children,
                }
            }
        }
    }

    fn labels(&self, s: &State) -> Vec<String> {
        let p = if s.bid0.is_none() { 0 } else { 1 };
        cards(s.hands[p]).map(|c| format!("bid{}", c + 1)).collect()
    }
}

pub fn build_goofspiel(ranks: usize) -> Result<GameInstance, GameError> {
    if !(2..=5).contains(&ranks) {
        return Err(GameError::BadParam(format!(
            "goofspiel needs 2..=5 ranks, got {ranks}"
        )));
    }
    build(&format!("goofspiel{ranks}"), &Goofspiel { n: ranks as u8 })
}
