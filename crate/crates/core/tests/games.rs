//! Game sizes against walkers written directly from the rules. Each walker
//! keys infosets by strings and counts sequences and distinct terminal
//! sequence pairs, with no shared code with the library builders.

use std::collections::{HashMap, HashSet};

use efg_cyclic::games::{generate, load_game, save_game};

#[derive(Default)]
struct Counter {
    infosets: [HashMap<String, usize>; 2],
    pairs: HashSet<(String, String)>,
}

impl Counter {
    /// Registers a decision and returns the sequence strings of its actions.
    fn decide(&mut self, player: usize, key: String, n: usize) -> Vec<String> {
        let prev = self.infosets[player].insert(key.clone(), n);
        assert!(
            prev.is_none() || prev == Some(n),
            "inconsistent action count at {key}"
        );
        (0..n).map(|a| format!("{key}#{a}")).collect()
    }

    fn terminal(&mut self, seqs: &[String; 2]) {
        self.pairs.insert((seqs[0].clone(), seqs[1].clone()));
    }

    fn dims(&self) -> (usize, usize, usize) {
        let seqs = |p: usize| 1 + self.infosets[p].values().sum::<usize>();
        (seqs(0), seqs(1), self.pairs.len())
    }
}

fn leduc_dims(ranks: usize) -> (usize, usize, usize) {
    #[derive(Clone)]
    struct Bet {
        round: usize,
        hist: String,
        in_round: Vec<char>,
        raises: usize,
        facing: bool,
    }
    fn betting(c: &mut Counter, ranks: usize, cards: [usize; 2], b: Bet, seqs: [String; 2]) {
        let p = b.in_round.len() % 2;
        let actions: Vec<char> = if b.facing {
            if b.raises < 2 {
                vec!['f', 'c', 'r']
            } else {
                vec!['f', 'c']
            }
        } else {
            vec!['c', 'r']
        };
        let key = format!("p{p}:{}:{}", cards[p], b.hist);
        let names = c.decide(p, key, actions.len());
        for (act, name) in actions.iter().zip(names) {
            let mut s = seqs.clone();
            s[p] = name;
            let mut n = b.clone();
            n.hist.push(*act);
            n.in_round.push(*act);
            match act {
                'f' => c.terminal(&s),
                'r' => {
                    n.raises += 1;
                    n.facing = true;
                    betting(c, ranks, cards, n, s);
                }
                _ => {
                    let closes = b.facing || !b.in_round.is_empty();
                    if !closes {
                        n.facing = false;
                        betting(c, ranks, cards, n, s);
                    } else if b.round == 1 {
                        c.terminal(&s);
                    } else {
                        for pc in 0..ranks {
                            let used = cards.iter().filter(|&&k| k == pc).count();
                            if used < 2 {
                                let nb = Bet {
                                    round: 1,
                                    hist: format!("{}/{pc}/", n.hist),
                                    in_round: Vec::new(),
                                    raises: 0,
                                    facing: false,
                                };
                                betting(c, ranks, cards, nb, s.clone());
                            }
                        }
                    }
                }
            }
        }
    }
    let mut c = Counter::default();
    for a in 0..ranks {
        for b in 0..ranks {
            let start = Bet {
                round: 0,
                hist: String::new(),
                in_round: Vec::new(),
                raises: 0,
                facing: false,
            };
            betting(&mut c, ranks, [a, b], start, [String::new(), String::new()]);
        }
    }
    c.dims()
}

fn goofspiel_dims(n: usize) -> (usize, usize, usize) {
    fn round(
        c: &mut Counter,
        prizes: Vec<usize>,
        hands: [Vec<usize>; 2],
        hist: String,
        seqs: [String; 2],
    ) {
        if prizes.is_empty() {
            c.terminal(&seqs);
            return;
        }
        for (i, &prize) in prizes.iter().enumerate() {
            let mut rest = prizes.clone();
            rest.remove(i);
            let h = format!("{hist}[{prize}]");
            let n0 = c.decide(0, format!("p0:{h}"), hands[0].len());
            let n1 = c.decide(1, format!("p1:{h}"), hands[1].len());
            for (i0, &b0) in hands[0].iter().enumerate() {
                for (i1, &b1) in hands[1].iter().enumerate() {
                    let mut hs = hands.clone();
                    hs[0].remove(i0);
                    hs[1].remove(i1);
                    let s = [n0[i0].clone(), n1[i1].clone()];
                    round(c, rest.clone(), hs, format!("{hist}({prize},{b0},{b1})"), s);
                }
            }
        }
    }
    let mut c = Counter::default();
    let all: Vec<usize> = (0..n).collect();
    round(
        &mut c,
        all.clone(),
        [all.clone(), all],
        String::new(),
        [String::new(), String::new()],
    );
    c.dims()
}

fn liars_dice_dims(faces: usize) -> (usize, usize, usize) {
    let n_bids = 2 * faces;
    fn play(c: &mut Counter, n_bids: usize, dice: [usize; 2], bids: Vec<usize>, seqs: [String; 2]) {
        let p = bids.len() % 2;
        let next = bids.last().map_or(0, |b| b + 1);
        // The opener must bid; afterwards calling is always allowed.
        let mut actions: Vec<Option<usize>> = (next..n_bids).map(Some).collect();
        if !bids.is_empty() {
            actions.push(None);
        }
        let names = c.decide(p, format!("p{p}:{}:{bids:?}", dice[p]), actions.len());
        for (a, name) in actions.into_iter().zip(names) {
            let mut s = seqs.clone();
            s[p] = name;
            match a {
                None => c.terminal(&s),
                Some(b) => {
                    let mut nb = bids.clone();
                    nb.push(b);
                    play(c, n_bids, dice, nb, s);
                }
            }
        }
    }
    let mut c = Counter::default();
    for d0 in 0..faces {
        for d1 in 0..faces {
            play(
                &mut c,
                n_bids,
                [d0, d1],
                Vec::new(),
                [String::new(), String::new()],
            );
        }
    }
    c.dims()
}

fn battleship_dims(shots: usize) -> (usize, usize, usize) {
    const CELLS: usize = 6;
    let ships: Vec<[usize; 2]> = vec![[0, 1], [1, 2], [3, 4], [4, 5], [0, 3], [1, 4], [2, 5]];
    struct St {
        ships: [[usize; 2]; 2],
        shot: [Vec<usize>; 2],
        obs: [String; 2],
        turn: usize,
    }
    fn play(c: &mut Counter, shots: usize, st: St, seqs: [String; 2]) {
        let sunk = |owner: usize| {
            st.ships[owner]
                .iter()
                .all(|cell| st.shot[1 - owner].contains(cell))
        };
        if sunk(0) || sunk(1) || (st.shot[0].len() >= shots && st.shot[1].len() >= shots) {
            c.terminal(&seqs);
            return;
        }
        let p = st.turn;
        let free: Vec<usize> = (0..CELLS).filter(|x| !st.shot[p].contains(x)).collect();
        let names = c.decide(
            p,
            format!("p{p}:{:?}:{}", st.ships[p], st.obs[p]),
            free.len(),
        );
        for (&cell, name) in free.iter().zip(names) {
            let mut s = seqs.clone();
            s[p] = name;
            let mut shot = st.shot.clone();
            shot[p].push(cell);
            let mut obs = st.obs.clone();
            let hit = st.ships[1 - p].contains(&cell);
            obs[p].push_str(&format!("s{cell}{}", if hit { 'h' } else { 'm' }));
            obs[1 - p].push_str(&format!("t{cell}"));
            let turn = if shot[1 - p].len() < shots { 1 - p } else { p };
            play(
                c,
                shots,
                St {
                    ships: st.ships,
                    shot,
                    obs,
                    turn,
                },
                s,
            );
        }
    }
    let mut c = Counter::default();
    let n0 = c.decide(0, "p0:place".into(), ships.len());
    let n1 = c.decide(1, "p1:place".into(), ships.len());
    for (i, a) in ships.iter().enumerate() {
        for (j, b) in ships.iter().enumerate() {
            let st = St {
                ships: [*a, *b],
                shot: [Vec::new(), Vec::new()],
                obs: [String::new(), String::new()],
                turn: 0,
            };
            play(&mut c, shots, st, [n0[i].clone(), n1[j].clone()]);
        }
    }
    c.dims()
}

#[test]
fn kuhn_and_pennies_sizes() {
    assert_eq!(generate("kuhn").unwrap().dims(), (14, 13, 30));
    assert_eq!(generate("matching_pennies").unwrap().dims(), (3, 3, 4));
}

#[test]
fn leduc_matches_walker() {
    for r in [2, 3] {
        assert_eq!(
            generate(&format!("leduc{r}")).unwrap().dims(),
            leduc_dims(r),
            "leduc{r}"
        );
    }
}

#[test]
fn goofspiel_matches_walker() {
    assert_eq!(goofspiel_dims(2), (13, 13, 8));
    for n in [2, 3] {
        assert_eq!(
            generate(&format!("goofspiel{n}")).unwrap().dims(),
            goofspiel_dims(n),
            "goofspiel{n}"
        );
    }
}

#[test]
fn liars_dice_matches_walker() {
    assert_eq!(liars_dice_dims(2), (31, 31, 60));
    for f in [2, 3] {
        assert_eq!(
            generate(&format!("liars_dice{f}")).unwrap().dims(),
            liars_dice_dims(f),
            "liars_dice{f}"
        );
    }
}

#[test]
fn battleship_matches_walker() {
    assert_eq!(battleship_dims(1), (50, 260, 7 * 7 * 36));
    for s in [1, 2] {
        assert_eq!(
            generate(&format!("battleship{s}")).unwrap().dims(),
            battleship_dims(s),
            "battleship{s}"
        );
    }
}

#[test]
fn one_shot_battleship_is_all_zero() {
    let g = generate("battleship1").unwrap();
    assert!(g.payoff.triples().all(|(_, _, v)| v == 0.0));
}

#[test]
fn save_load_preserves_matrix() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["kuhn", "leduc2", "battleship1"] {
        let g = generate(name).unwrap();
        let path = dir.path().join(format!("{name}.efg"));
        save_game(&g, &path).unwrap();
        let h = load_game(&path).unwrap();
        assert_eq!(h.dims(), g.dims());
        let mut a: Vec<_> = g.payoff.triples().collect();
        let mut b: Vec<_> = h.payoff.triples().collect();
        a.sort_by(|p, q| p.partial_cmp(q).unwrap());
        b.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert_eq!(a, b);
    }
}
