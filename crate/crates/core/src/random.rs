//! Random diagrams and movies for tests and benchmarks.
//!
//! Diagrams start as braid closures, which are planar by construction, and
//! are then perturbed by random local events so that tests also see
//! configurations no braid produces directly.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cobordism::{Movie, MovieEvent};
use crate::diagram::{apply_event, Crossing, Diagram, EdgeId, Side, Sign};
use crate::error::{Error, Result};

/// Closure of a braid on `strands` strands. Letter `k > 0` is a positive
/// crossing between positions `k-1` and `k`; `-k` is the negative one.
pub fn braid_closure(strands: usize, word: &[i32]) -> Result<Diagram> {
    if strands == 0 {
        return Err(Error::InvalidDiagram(
            "a braid needs at least one strand".into(),
        ));
    }
    let mut cur: Vec<EdgeId> = (0..strands as EdgeId).collect();
    let mut next_id = strands as EdgeId;
    let mut crossings = Vec::with_capacity(word.len());
    for &letter in word {
        let j = letter.unsigned_abs() as usize;
        if letter == 0 || j >= strands {
            return Err(Error::InvalidDiagram(format!(
                "braid letter {letter} out of range for {strands} strands"
            )));
        }
        let (a, b) = (cur[j - 1], cur[j]);
        let (a2, b2) = (next_id, next_id + 1);
        next_id += 2;
        // Strands run upward; the strand entering at the left leaves at the
        // right. Slots go counterclockwise from the incoming under-strand.
        let c = if letter > 0 {
            Crossing::new([b, b2, a2, a], Sign::Pos)
        } else {
            Crossing::new([a, b, b2, a2], Sign::Neg)
        };
        crossings.push(c);
        cur[j - 1] = a2;
        cur[j] = b2;
    }
    // Close up: the last edge at each position is the first one.
    let close: std::collections::BTreeMap<EdgeId, EdgeId> = cur
        .iter()
        .enumerate()
        .map(|(p, &e)| (e, p as EdgeId))
        .collect();
    for c in &mut crossings {
        for e in &mut c.edges {
            if let Some(&p) = close.get(e) {
                *e = p;
            }
        }
    }
    let free: Vec<EdgeId> = cur
        .iter()
        .enumerate()
        .filter(|&(p, &e)| e == p as EdgeId)
        .map(|(p, _)| p as EdgeId)
        .collect();
    Diagram::new(crossings, free)
}

pub fn random_braid_word<R: Rng>(rng: &mut R, strands: usize, len: usize) -> Vec<i32> {
    if strands < 2 {
        return Vec::new();
    }
    (0..len)
        .map(|_| {
            let j = rng.gen_range(1..strands as i32);
            if rng.gen_bool(0.5) {
                j
            } else {
                -j
            }
        })
        .collect()
}

/// Which events `random_event` may propose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventClass {
    Morse,
    Reidemeister,
    Any,
}

fn random_side<R: Rng>(rng: &mut R) -> Side {
    if rng.gen_bool(0.5) {
        Side::Left
    } else {
        Side::Right
    }
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// One candidate event of the given kind, or `None` when the diagram has no
/// plausible site. Candidates may still be rejected by `apply_event`.
fn propose<R: Rng>(rng: &mut R, d: &Diagram, kind: usize) -> Option<MovieEvent> {
    let edges = d.edge_ids();
    let pick = |rng: &mut R| edges.choose(rng).copied();
    match kind {
        0 => Some(MovieEvent::Birth),
        1 => d
            .free_circles()
            .choose(rng)
            .map(|&edge| MovieEvent::Death { edge }),
        2 => {
            let a = pick(rng)?;
            let b = if rng.gen_bool(0.2) { a } else { pick(rng)? };
            Some(MovieEvent::Saddle { a, b })
        }
        3 => Some(MovieEvent::R1Add {
            edge: pick(rng)?,
            sign: random_sign(rng),
            side: random_side(rng),
        }),
        4 => {
            let loops: Vec<(EdgeId, Sign)> = d
                .crossings()
                .iter()
                .flat_map(|c| {
                    (0..4)
                        .filter(|&s| c.edges[s] == c.edges[(s + 1) % 4])
                        .map(move |s| (c.edges[s], c.sign))
                })
                .collect();
            loops
                .choose(rng)
                .map(|&(edge, sign)| MovieEvent::R1Remove { edge, sign })
        }
        5 => {
            let over = pick(rng)?;
            let under = if rng.gen_bool(0.15) { over } else { pick(rng)? };
            let side = |rng: &mut R| {
                if rng.gen_bool(0.3) {
                    None
                } else {
                    Some(random_side(rng))
                }
            };
            Some(MovieEvent::R2Add {
                over,
                under,
                over_side: side(rng),
                under_side: side(rng),
                over_first: over == under && rng.gen_bool(0.5),
            })
        }
        6 => {
            let bigons: Vec<[EdgeId; 2]> = d
                .faces()
                .into_iter()
                .filter(|f| f.len() == 2)
                .map(|f| {
                    let v: Vec<EdgeId> = f.iter().map(|&(e, _)| e).collect();
                    [v[0], v[1]]
                })
                .collect();
            bigons
                .choose(rng)
                .map(|&[a, b]| MovieEvent::R2Remove { a, b })
        }
        _ => {
            let triangles: Vec<[EdgeId; 3]> = d
                .faces()
                .into_iter()
                .filter(|f| f.len() == 3)
                .map(|f| {
                    let v: Vec<EdgeId> = f.iter().map(|&(e, _)| e).collect();
                    [v[0], v[1], v[2]]
                })
                .collect();
            triangles.choose(rng).map(|&edges| MovieEvent::R3 { edges })
        }
    }
}

/// A random event applicable to `d` that keeps the crossing count at most
/// `max_crossings`. Gives up after a bounded number of attempts.
pub fn random_event<R: Rng>(
    rng: &mut R,
    d: &Diagram,
    class: EventClass,
    max_crossings: usize,
) -> Option<MovieEvent> {
    let kinds: &[usize] = match class {
        EventClass::Morse => &[0, 1, 2],
        EventClass::Reidemeister => &[3, 4, 5, 6, 7],
        EventClass::Any => &[0, 1, 2, 3, 4, 5, 6, 7],
    };
    for _ in 0..200 {
        let kind = *kinds.choose(rng).expect("nonempty");
        let Some(ev) = propose(rng, d, kind) else {
            continue;
        };
        if let Ok((t, _)) = apply_event(d, &ev) {
            if t.n_crossings() <= max_crossings {
                return Some(ev);
            }
        }
    }
    None
}

/// A random diagram with at most `max_crossings` crossings: a braid closure
/// on up to four strands, then a few random Reidemeister events.
pub fn random_diagram<R: Rng>(rng: &mut R, max_crossings: usize) -> Diagram {
    let strands = rng.gen_range(1..=4usize);
    let len = if strands < 2 || max_crossings == 0 {
        0
    } else {
        rng.gen_range(0..=max_crossings)
    };
    let word = random_braid_word(rng, strands, len);
    let mut d = braid_closure(strands, &word).expect("braid closures are valid");
    for _ in 0..rng.gen_range(0..4) {
        match random_event(rng, &d, EventClass::Reidemeister, max_crossings) {
            Some(ev) => d = apply_event(&d, &ev).expect("checked event").0,
            None => break,
        }
    }
    d
}

/// A random movie of `len` events from `source`, staying within
/// `max_crossings` at every frame.
pub fn random_movie<R: Rng>(
    rng: &mut R,
    source: Diagram,
    len: usize,
    class: EventClass,
    max_crossings: usize,
) -> Movie {
    let mut d = source.clone();
    let mut events = Vec::with_capacity(len);
    for _ in 0..len {
        let Some(ev) = random_event(rng, &d, class, max_crossings) else {
            break;
        };
        d = apply_event(&d, &ev).expect("checked event").0;
        events.push(ev);
    }
    Movie::new(source, events)
}
