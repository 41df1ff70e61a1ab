//! EFG-SF v1: one JSON document, written one record per line.
//!
//! ```text
//! {"format":"EFG-SF","version":1,"name":"kuhn","dims":[14,13],
//! "players":[
//! {"decision_points":[
//! {"id":0,"parent_seq":0,"actions":["start"]},
//! ...
//! ]},
//! ...
//! ],
//! "payoffs":[
//! [2,5,-1.6666666666666666e-1],
//! ...
//! ]}
//! ```
//!
//! Decision point ids run `0..n` in listing order and parents are listed
//! before children. `parent_seq` is a sequence index of the same player, 0
//! being the empty sequence. Sequences are laid out by walking the listing
//! backwards: the last decision point owns indices `1..1+n_last`, and so on.
//! Payoff values carry 17 significant digits.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{GameInstance, PayoffMatrix};
use crate::error::GameError;
use crate::treeplex::{Parent, PointSpec, Treeplex};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGame {
    format: String,
    version: u32,
    name: String,
    #[serde(default)]
    dims: Option<[usize; 2]>,
    players: Vec<FilePlayer>,
    payoffs: Vec<(usize, usize, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePlayer {
    decision_points: Vec<FilePoint>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePoint {
    id: usize,
    parent_seq: usize,
    actions: Vec<String>,
}

pub fn write_game<W: Write>(g: &GameInstance, mut w: W) -> std::io::Result<()> {
    let name = serde_json::to_string(&g.name).expect("string serializes");
    writeln!(
        w,
        "{{\"format\":\"EFG-SF\",\"version\":1,\"name\":{name},\"dims\":[{},{}],",
        g.treeplex_x.n_sequences(),
        g.treeplex_y.n_sequences()
    )?;
    writeln!(w, "\"players\":[")?;
    for (pi, t) in [&g.treeplex_x, &g.treeplex_y].into_iter().enumerate() {
        writeln!(w, "{{\"decision_points\":[")?;
        for (j, p) in t.points().iter().enumerate() {
            let actions = serde_json::to_string(p.actions()).expect("strings serialize");
            let sep = if j + 1 < t.n_points() { "," } else { "" };
            writeln!(
                w,
                "{{\"id\":{j},\"parent_seq\":{},\"actions\":{actions}}}{sep}",
                p.parent_seq()
            )?;
        }
        writeln!(w, "]}}{}", if pi == 0 { "," } else { "" })?;
    }
    writeln!(w, "],")?;
    writeln!(w, "\"payoffs\":[")?;
    let nnz = g.payoff.nnz();
    for (i, (r, c, v)) in g.payoff.triples().enumerate() {
        let sep = if i + 1 < nnz { "," } else { "" };
        writeln!(w, "[{r},{c},{v:.16e}]{sep}")?;
    }
    writeln!(w, "]}}")?;
    w.flush()
}

pub fn save_game(g: &GameInstance, path: impl AsRef<Path>) -> Result<(), GameError> {
    let f = File::create(path)?;
    write_game(g, BufWriter::new(f))?;
    Ok(())
}

fn treeplex_from_file(p: usize, points: Vec<FilePoint>) -> Result<Treeplex, GameError> {
    let n = points.len();
    let field = |i: usize, f: &str| format!("players[{p}].decision_points[{i}].{f}");
    let mut owner = vec![(usize::MAX, 0usize); 1];
    for j in (0..n).rev() {
        for a in 0..points[j].actions.len() {
            owner.push((j, a));
        }
    }
    let mut specs = Vec::with_capacity(n);
    for (i, fp) in points.into_iter().enumerate() {
        if fp.id != i {
            return Err(GameError::Format(format!(
                "{}: expected {i}, found {}",
                field(i, "id"),
                fp.id
            )));
        }
        if fp.actions.is_empty() {
            return Err(GameError::Format(format!(
                "{}: empty action list",
                field(i, "actions")
            )));
        }
        let parent = match fp.parent_seq {
            0 => Parent::Root,
            s if s < owner.len() => Parent::Seq {
                point: owner[s].0,
                action: owner[s].1,
            },
            s => {
                return Err(GameError::Format(format!(
                    "{}: sequence {s} out of range",
                    field(i, "parent_seq")
                )))
            }
        };
        specs.push(PointSpec {
            parents: vec![parent],
            actions: fp.actions,
        });
    }
    Treeplex::new(specs).map_err(|e| GameError::Format(format!("players[{p}]: {e}")))
}

pub fn read_game<R: Read>(r: R) -> Result<GameInstance, GameError> {
    let fg: FileGame = serde_json::from_reader(r).map_err(|e| {
        if e.is_io() {
            GameError::Io(e.into())
        } else {
            GameError::Format(format!("line {} column {}: {e}", e.line(), e.column()))
        }
    })?;
    if fg.format != "EFG-SF" {
        return Err(GameError::Format(format!(
            "format: expected \"EFG-SF\", found {:?}",
            fg.format
        )));
    }
    if fg.version != 1 {
        return Err(GameError::Format(format!(
            "version: unsupported version {}",
            fg.version
        )));
    }
    if fg.players.len() != 2 {
        return Err(GameError::Format(format!(
            "players: expected 2 players, found {}",
            fg.players.len()
        )));
    }
    let mut players = fg.players.into_iter();
    let tx = treeplex_from_file(0, players.next().unwrap().decision_points)?;
    let ty = treeplex_from_file(1, players.next().unwrap().decision_points)?;
    if let Some([nx, ny]) = fg.dims {
        if nx != tx.n_sequences() || ny != ty.n_sequences() {
            return Err(GameError::Format(format!(
                "dims: header says [{nx},{ny}], decision points give [{},{}]",
                tx.n_sequences(),
                ty.n_sequences()
            )));
        }
    }
    let mut seen = HashSet::with_capacity(fg.payoffs.len());
    for (i, &(r, c, _)) in fg.payoffs.iter().enumerate() {
        if !seen.insert((r, c)) {
            return Err(GameError::Format(format!(
                "payoffs[{i}]: duplicate entry ({r}, {c})"
            )));
        }
    }
    let m = PayoffMatrix::from_triples(tx.n_sequences(), ty.n_sequences(), fg.payoffs)?;
    GameInstance::new(fg.name, tx, ty, m)
}

pub fn load_game(path: impl AsRef<Path>) -> Result<GameInstance, GameError> {
    let f = File::open(path)?;
    read_game(BufReader::new(f))
}
