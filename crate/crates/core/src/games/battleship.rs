//! Battleship on a 2x3 grid.
//!
//! Each player secretly places one ship of length 2 (7 placements), then the
//! players alternate shots, player 1 first, each firing at most `shots` times
//! and never at the same cell twice. The shooter learns hit or miss; the
//! target sees where the shot landed. The game ends as soon as a ship is sunk
//! or both players are out of shots. Sinking the opponent's ship is worth 4.

use super::builder::{build, Node, Rules};
use super::GameInstance;
use crate::error::GameError;

const ROWS: u8 = 2;
const COLS: u8 = 3;
const SHIP_VALUE: f64 = 4.0;

#[derive(Clone)]
struct State {
    ships: [Option<u8>; 2],
    /// Cells shot by each player, as bitmasks.
    shot: [u8; 2],
    n_shots: [u8; 2],
    /// Per-player observation tokens after placement.
    obs: [Vec<u32>; 2],
    turn: usize,
}

struct Battleship {
    shots: u8,
    placements: Vec<u8>,
}

fn placements() -> Vec<u8> {
    let cell = |r: u8, c: u8| r * COLS + c;
    let mut v = Vec::new();
    for r in 0..ROWS {
        for c in 0..COLS - 1 {
            v.push((1 << cell(r, c)) | (1 << cell(r, c + 1)));
        }
    }
    for r in 0..ROWS - 1 {
        for c in 0..COLS {
            v.push((1 << cell(r, c)) | (1 << cell(r + 1, c)));
        }
    }
    v
}

impl Battleship {
    fn sunk(&self, s: &State, owner: usize) -> bool {
        let ship = s.ships[owner].unwrap();
        s.shot[1 - owner] & ship == ship
    }

    fn free_cells(&self, s: &State) -> impl Iterator<Item = u8> + '_ {
        let shot = s.shot[s.turn];
        (0..ROWS * COLS).filter(move |c| shot & (1 << c) == 0)
    }
}

impl Rules for Battleship {
    type State = State;

    fn root(&self) -> State {
        State {
            ships: [None, None],
            shot: [0, 0],
            n_shots: [0, 0],
            obs: [Vec::new(), Vec::new()],
            turn: 0,
        }
    }

    fn expand(&self, s: &State) -> Node<State> {
        for p in 0..2 {
            if s.ships[p].is_none() {
                let children = self
                    .placements
                    .iter()
                    .map(|&m| {
                        let mut n = s.clone();
                        n.ships[p] = Some(m);
                        n
                    })
                    .collect();
                return Node::Decision {
                    player: p,
                    infoset: Vec::new(),
                    children,
                };
            }
        }
        if self.sunk(s, 0) {
            return Node::Terminal(-SHIP_VALUE);
        }
        if self.sunk(s, 1) {
            return Node::Terminal(SHIP_VALUE);
        }
        if s.n_shots[0] >= self.shots && s.n_shots[1] >= self.shots {
            return Node::Terminal(0.0);
        }
        let p = s.turn;
        let mut infoset = vec![s.ships[p].unwrap() as u32];
        infoset.extend_from_slice(&s.obs[p]);
        let children = self
            .free_cells(s)
            .map(|c| {
                let mut n = s.clone();
                n.shot[p] |= 1 << c;
                n.n_shots[p] += 1;
                let hit = s.ships[1 - p].unwrap() & (1 << c) != 0;
                n.obs[p].push(100 + 2 * c as u32 + hit as u32);
                n.obs[1 - p].push(200 + c as u32);
                if n.n_shots[1 - p] < self.shots {
                    n.turn = 1 - p;
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
        if s.ships[0].is_none() || s.ships[1].is_none() {
            return self
                .placements
                .iter()
                .map(|&m| {
                    let cells: Vec<String> = (0..ROWS * COLS)
                        .filter(|c| m & (1 << c) != 0)
                        .map(|c| c.to_string())
                        .collect();
                    format!("place{}", cells.join("-"))
                })
                .collect();
        }
        self.free_cells(s)
            .map(|c| format!("shoot{}{}", c / COLS, c % COLS))
            .collect()
    }
}

/// Three shots per player.
pub fn build_battleship() -> GameInstance {
    build_battleship_with(3).expect("three shots is valid")
}

/// Variant with a different shot budget, used for testing.
pub fn build_battleship_with(shots: usize) -> Result<GameInstance, GameError> {
    if !(1..=6).contains(&shots) {
        return Err(GameError::BadParam(format!(
            "battleship needs 1..=6 shots, got {shots}"
        )));
    }
    let name = if shots == 3 {
        "battleship".to_string()
    } else {
        format!("battleship{shots}")
    };
    build(
        &name,
        &Battleship {
            shots: shots as u8,
            placements: placements(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_shot_by_hand() {
        // x: 7 placements, then one shot at 6 cells: 7 + 7*6.
        // y: 7 placements, then per own ship and observed shot, any of the 6 cells.
        // A single shot cannot sink a length-2 ship, so every payoff is zero.
        let g = build_battleship_with(1).unwrap();
        assert_eq!(g.treeplex_x.n_sequences(), 1 + 7 + 42);
        assert_eq!(g.treeplex_y.n_sequences(), 1 + 7 + 7 * 6 * 6);
        assert!(g.payoff.triples().all(|(_, _, v)| v == 0.0));
    }

    #[test]
    fn seven_placements() {
        assert_eq!(placements().len(), 7);
        assert!(placements().iter().all(|m| m.count_ones() == 2));
    }
}
