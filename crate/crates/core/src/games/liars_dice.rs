//! Liar's Dice with one die per player.
//!
//! Bids `(quantity, face)` are totally ordered quantity-major: `(1,1) < (1,2)
//! < ... < (1,F) < (2,1) < ... < (2,F)`. Player 1 must open with a bid; after
//! that the player to move either raises to any higher bid or calls "liar".
//! A call is won by the bidder when at least `quantity` dice show `face`.

use super::builder::{build, Node, Rules};
use super::GameInstance;
use crate::error::GameError;

#[derive(Clone)]
struct State {
    dice: [Option<u8>; 2],
    bids: Vec<u8>,
    called: bool,
}

struct LiarsDice {
    faces: u8,
}

impl LiarsDice {
    fn n_bids(&self) -> u8 {
        2 * self.faces
    }

    fn bid(&self, b: u8) -> (u8, u8) {
        (b / self.faces + 1, b % self.faces + 1)
    }

    /// Legal moves: higher bids, then a call (encoded as `n_bids`) unless opening.
    fn legal(&self, s: &State) -> Vec<u8> {
        let first = s.bids.last().map_or(0, |&b| b + 1);
        let mut v: Vec<u8> = (first..self.n_bids()).collect();
        if !s.bids.is_empty() {
            v.push(self.n_bids());
        }
        v
    }
}

impl Rules for LiarsDice {
    type State = State;

    fn root(&self) -> State {
        State {
            dice: [None, None],
            bids: Vec::new(),
            called: false,
        }
    }

    fn expand(&self, s: &State) -> Node<State> {
        for p in 0..2 {
            if s.dice[p].is_none() {
                let w = 1.0 / self.faces as f64;
                return Node::Chance(
                    (0..self.faces)
                        .map(|f| {
                            let mut n = s.clone();
                            n.dice[p] = Some(f + 1);
                            (w, n)
                        })
                        .collect(),
                );
            }
        }
        if s.called {
            let bidder = (s.bids.len() - 1) % 2;
            let (q, f) = self.bid(*s.bids.last().unwrap());
            let count = s.dice.iter().filter(|&&d| d == Some(f)).count() as u8;
            let bidder_wins = count >= q;
            let p0_wins = bidder_wins == (bidder == 0);
            return Node::Terminal(if p0_wins { 1.0 } else { -1.0 });
        }
        let p = s.bids.len() % 2;
        let mut infoset = vec![s.dice[p].unwrap() as u32];
        infoset.extend(s.bids.iter().map(|&b| b as u32));
        let children = self
            .legal(s)
            .into_iter()
            .map(|a| {
                let mut n = s.clone();
                if a == self.n_bids() {
                    n.called = true;
                } else {
                    n.bids.push(a);
                }
                n
            })
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
            .map(|a| {
                if a == self.n_bids() {
                    "liar".to_string()
                } else {
                    let (q, f) = self.bid(a);
                    format!("{q}x{f}")
                }
            })
            .collect()
    }
}

/// The six-faced game.
pub fn build_liars_dice() -> GameInstance {
    build_liars_dice_with(6).expect("six faces is valid")
}

/// Reduced variants with fewer faces, used for testing.
pub fn build_liars_dice_with(faces: usize) -> Result<GameInstance, GameError> {
    if !(2..=16).contains(&faces) {
        return Err(GameError::BadParam(format!(
            "liar's dice needs 2..=16 faces, got {faces}"
        )));
    }
    let name = if faces == 6 {
        "liars_dice".to_string()
    } else {
        format!("liars_dice{faces}")
    };
    build(&name, &LiarsDice { faces: faces as u8 })
}
