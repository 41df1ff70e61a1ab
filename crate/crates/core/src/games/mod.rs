//! Benchmark games in sequence form and the on-disk game format.

mod battleship;
mod builder;
mod format;
mod goofspiel;
mod kuhn;
mod leduc;
mod liars_dice;
mod matrix;

pub use battleship::{build_battleship, build_battleship_with};
pub use format::{load_game, read_game, save_game, write_game};
pub use goofspiel::build_goofspiel;
pub use kuhn::build_kuhn;
pub use leduc::build_leduc;
pub use liars_dice::{build_liars_dice, build_liars_dice_with};
pub use matrix::{PayoffMatrix, PayoffStats};

use crate::error::GameError;
use crate::treeplex::{Parent, PointSpec, Treeplex};

/// Two treeplexes and the payoff matrix. Player x minimizes and player y
/// maximizes `sum M[r][c] * x[r] * y[c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    pub name: String,
    pub treeplex_x: Treeplex,
    pub treeplex_y: Treeplex,
    pub payoff: PayoffMatrix,
}

impl GameInstance {
    pub fn new(
        name: impl Into<String>,
        tx: Treeplex,
        ty: Treeplex,
        payoff: PayoffMatrix,
    ) -> Result<Self, GameError> {
        if payoff.n_rows() != tx.n_sequences() || payoff.n_cols() != ty.n_sequences() {
            return Err(GameError::Format(format!(
                "payoff dims {}x{} do not match sequence counts {}x{}",
                payoff.n_rows(),
                payoff.n_cols(),
                tx.n_sequences(),
                ty.n_sequences()
            )));
        }
        Ok(GameInstance {
            name: name.into(),
            treeplex_x: tx,
            treeplex_y: ty,
            payoff,
        })
    }

    /// `(n_x, n_y, nnz)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.treeplex_x.n_sequences(),
            self.treeplex_y.n_sequences(),
            self.payoff.nnz(),
        )
    }

    /// The same game seen from the other seat: treeplexes swapped, payoffs
    /// transposed and negated.
    pub fn swap_players(&self) -> GameInstance {
        GameInstance {
            name: self.name.clone(),
            treeplex_x: self.treeplex_y.clone(),
            treeplex_y: self.treeplex_x.clone(),
            payoff: self.payoff.transpose_negated(),
        }
    }
}

pub fn payoff_stats(m: &PayoffMatrix) -> PayoffStats {
    m.stats()
}

/// 2x2 matching pennies on two single-decision-point treeplexes. y wins on a match.
pub fn build_matching_pennies() -> GameInstance {
    let side =
        || Treeplex::new(vec![PointSpec::new(Parent::Root, ["heads", "tails"])]).expect("valid");
    let (tx, ty) = (side(), side());
    let mut triples = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            let v = if a == b { 1.0 } else { -1.0 };
            triples.push((tx.seq(0, a), ty.seq(0, b), v));
        }
    }
    let m = PayoffMatrix::from_triples(3, 3, triples).expect("valid");
    GameInstance::new("matching_pennies", tx, ty, m).expect("valid")
}

fn parse_suffix(name: &str, prefix: &str) -> Option<Result<Option<usize>, GameError>> {
    let rest = name.strip_prefix(prefix)?;
    if rest.is_empty() {
        return Some(Ok(None));
    }
    Some(
        rest.parse::<usize>()
            .map(Some)
            .map_err(|_| GameError::UnknownGame(name.to_string())),
    )
}

/// Builds a game by name: `kuhn`, `leduc[N]`, `goofspiel[N]`, `liars_dice[F]`,
/// `battleship[S]`, `matching_pennies`. Suffixes are ranks, die faces or shots.
pub fn generate(name: &str) -> Result<GameInstance, GameError> {
    match name {
        "kuhn" => return Ok(build_kuhn()),
        "matching_pennies" => return Ok(build_matching_pennies()),
        _ => {}
    }
    if let Some(n) = parse_suffix(name, "leduc") {
        return build_leduc(n?.unwrap_or(13));
    }
    if let Some(n) = parse_suffix(name, "goofspiel") {
        return build_goofspiel(n?.unwrap_or(4));
    }
    if let Some(n) = parse_suffix(name, "liars_dice") {
        return match n? {
            None => Ok(build_liars_dice()),
            Some(f) => build_liars_dice_with(f),
        };
    }
    if let Some(n) = parse_suffix(name, "battleship") {
        return match n? {
            None => Ok(build_battleship()),
            Some(s) => build_battleship_with(s),
        };
    }
    Err(GameError::UnknownGame(name.to_string()))
}
