//! Local rewrites of a diagram under elementary movie events.
//!
//! Fresh edges take the smallest ids unused by the source diagram, issued in
//! site order. Surviving crossings keep their relative order; new crossings
//! are appended. Edges not touched by an event keep their ids.

use std::collections::{BTreeMap, BTreeSet};

use super::{Crossing, Diagram, EdgeId, Side, Sign, Slot};
use crate::cobordism::MovieEvent;
use crate::error::{Error, Result};

/// How edges of the source diagram map to edges of the target.
///
/// Untouched edges map to themselves. Consumed edges map to the new edges
/// that replace them (possibly none, for a death).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeCorrespondence {
    pub map: BTreeMap<EdgeId, Vec<EdgeId>>,
    /// New edges in issue order.
    pub created: Vec<EdgeId>,
}

impl EdgeCorrespondence {
    pub fn image(&self, e: EdgeId) -> &[EdgeId] {
        self.map.get(&e).map_or(&[], |v| v.as_slice())
    }

    /// True if `e` survives unchanged.
    pub fn is_untouched(&self, e: EdgeId) -> bool {
        self.map.get(&e).is_some_and(|v| v.len() == 1 && v[0] == e)
    }
}

/// Data the chain maps need about where an event happened.
#[derive(Clone, Debug)]
pub(crate) enum Local {
    Birth {
        edge: EdgeId,
    },
    Death,
    Saddle {
        a: EdgeId,
        b: EdgeId,
        /// `f1`, and `f2` when the saddle produces two edges.
        new: Vec<EdgeId>,
    },
    R1Add {
        sign: Sign,
        arc_in: EdgeId,
        loop_edge: EdgeId,
        arc_out: EdgeId,
        old: EdgeId,
    },
    R1Remove {
        crossing: usize,
        sign: Sign,
        arc_in: EdgeId,
        loop_edge: EdgeId,
        arc_out: EdgeId,
        new: EdgeId,
    },
    /// A bigon between `over` and `under` strands; crossing indices refer to
    /// the diagram that contains the bigon.
    R2Add {
        crossings: [usize; 2],
        bigon: [EdgeId; 2],
        /// Pairs (edge without bigon, edge with bigon) along the outer arcs.
        outer: Vec<(EdgeId, EdgeId)>,
    },
    R2Remove {
        crossings: [usize; 2],
        bigon: [EdgeId; 2],
        /// Pairs (edge without bigon, edge with bigon) along the outer arcs.
        outer: Vec<(EdgeId, EdgeId)>,
    },
    R3 {
        /// Crossing between the middle and bottom strands.
        mb: usize,
        /// Crossings of the top strand with middle and bottom.
        tm: usize,
        tb: usize,
        /// Triangle edges (top, middle, bottom) before and after.
        before: [EdgeId; 3],
        after: [EdgeId; 3],
    },
}

pub(crate) struct Rewrite {
    pub diagram: Diagram,
    pub corr: EdgeCorrespondence,
    /// Source crossing index to target crossing index.
    pub crossing_map: Vec<Option<usize>>,
    pub local: Local,
}

/// Applies one event, returning the new diagram and the edge correspondence.
pub fn apply_event(d: &Diagram, ev: &MovieEvent) -> Result<(Diagram, EdgeCorrespondence)> {
    let rw = rewrite(d, ev)?;
    Ok((rw.diagram, rw.corr))
}

pub(crate) fn rewrite(d: &Diagram, ev: &MovieEvent) -> Result<Rewrite> {
    match *ev {
        MovieEvent::Birth => birth(d),
        MovieEvent::Death { edge } => death(d, edge),
        MovieEvent::Saddle { a, b } => saddle(d, a, b),
        MovieEvent::R1Add { edge, sign, side } => r1_add(d, edge, sign, side),
        MovieEvent::R1Remove { edge, sign } => r1_remove(d, edge, sign),
        MovieEvent::R2Add {
            over,
            under,
            over_side,
            under_side,
            over_first,
        } => r2_add(d, over, under, over_side, under_side, over_first),
        MovieEvent::R2Remove { a, b } => r2_remove(d, a, b),
        MovieEvent::R3 { edges } => r3(d, edges),
    }
}

/// Mutable copy of a diagram's raw data.
struct Draft {
    crossings: Vec<Crossing>,
    free: Vec<EdgeId>,
}

impl Draft {
    fn of(d: &Diagram) -> Self {
        Draft {
            crossings: d.crossings.clone(),
            free: d.free.clone(),
        }
    }

    fn put(&mut self, at: Slot, e: EdgeId) {
        self.crossings[at.crossing].edges[at.slot] = e;
    }

    fn drop_free(&mut self, e: EdgeId) {
        self.free.retain(|&f| f != e);
    }

    fn finish(self) -> Result<Diagram> {
        Diagram::new(self.crossings, self.free)
    }
}

fn identity_map(d: &Diagram, except: &[EdgeId]) -> BTreeMap<EdgeId, Vec<EdgeId>> {
    d.edge_ids()
        .iter()
        .filter(|e| !except.contains(e))
        .map(|&e| (e, vec![e]))
        .collect()
}

fn identity_crossings(d: &Diagram) -> Vec<Option<usize>> {
    (0..d.n_crossings()).map(Some).collect()
}

fn require_edge(d: &Diagram, kind: &str, e: EdgeId) -> Result<()> {
    if d.has_edge(e) {
        Ok(())
    } else {
        Err(Error::site(kind, format!("edge {e} is not in the diagram")))
    }
}

fn birth(d: &Diagram) -> Result<Rewrite> {
    let f = d.fresh_ids(1, &BTreeSet::new())[0];
    let mut dr = Draft::of(d);
    dr.free.push(f);
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence {
            map: identity_map(d, &[]),
            created: vec![f],
        },
        crossing_map: identity_crossings(d),
        local: Local::Birth { edge: f },
    })
}

fn death(d: &Diagram, e: EdgeId) -> Result<Rewrite> {
    if !d.is_free(e) {
        return Err(Error::site(
            "death",
            format!("edge {e} is not a free circle"),
        ));
    }
    let mut dr = Draft::of(d);
    dr.drop_free(e);
    let mut map = identity_map(d, &[e]);
    map.insert(e, vec![]);
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence {
            map,
            created: vec![],
        },
        crossing_map: identity_crossings(d),
        local: Local::Death,
    })
}

/// Whether some face has both edge sides on it, or the edges lie in
/// different components (which can always be arranged to share a face).
fn share_face(d: &Diagram, a: (EdgeId, Side), b: (EdgeId, Side)) -> bool {
    let comps = d.edge_components();
    if comps[&a.0] != comps[&b.0] {
        return true;
    }
    d.faces().iter().any(|f| f.contains(&a) && f.contains(&b))
}

fn saddle(d: &Diagram, a: EdgeId, b: EdgeId) -> Result<Rewrite> {
    require_edge(d, "saddle", a)?;
    require_edge(d, "saddle", b)?;
    if a != b
        && !share_face(d, (a, Side::Left), (b, Side::Left))
        && !share_face(d, (a, Side::Right), (b, Side::Right))
    {
        return Err(Error::site(
            "saddle",
            format!("edges {a} and {b} do not share a face with compatible orientations"),
        ));
    }
    let mut dr = Draft::of(d);
    let (fa, fb) = (d.is_free(a), d.is_free(b));
    let new: Vec<EdgeId>;
    let mut map = identity_map(d, &[a, b]);
    if a == b {
        let f = d.fresh_ids(2, &BTreeSet::new());
        if fa {
            dr.drop_free(a);
            dr.free.extend([f[0], f[1]]);
        } else {
            let ends = d.ends(a).expect("crossing edge");
            dr.put(ends.tail, f[0]);
            dr.put(ends.head, f[0]);
            dr.free.push(f[1]);
        }
        map.insert(a, f.clone());
        new = f;
    } else if fa || fb {
        let f = d.fresh_ids(1, &BTreeSet::new())[0];
        for (e, free) in [(a, fa), (b, fb)] {
            if free {
                dr.drop_free(e);
            } else {
                let ends = d.ends(e).expect("crossing edge");
                dr.put(ends.tail, f);
                dr.put(ends.head, f);
            }
        }
        if fa && fb {
            dr.free.push(f);
        }
        map.insert(a, vec![f]);
        map.insert(b, vec![f]);
        new = vec![f];
    } else {
        let f = d.fresh_ids(2, &BTreeSet::new());
        let (ea, eb) = (d.ends(a).unwrap(), d.ends(b).unwrap());
        dr.put(ea.tail, f[0]);
        dr.put(eb.head, f[0]);
        dr.put(eb.tail, f[1]);
        dr.put(ea.head, f[1]);
        map.insert(a, f.clone());
        map.insert(b, f.clone());
        new = f;
    }
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence {
            map,
            created: new.clone(),
        },
        crossing_map: identity_crossings(d),
        local: Local::Saddle { a, b, new },
    })
}

fn r1_add(d: &Diagram, e: EdgeId, sign: Sign, side: Side) -> Result<Rewrite> {
    let kind = if sign == Sign::Pos { "r1+" } else { "r1-" };
    require_edge(d, kind, e)?;
    let free = d.is_free(e);
    let ids = d.fresh_ids(if free { 2 } else { 3 }, &BTreeSet::new());
    let (a, b) = (ids[0], ids[1]);
    let c = if free { a } else { ids[2] };
    // The loop side is fixed by the sign and by whether the strand passes
    // under or over first.
    let edges = match (sign, side) {
        (Sign::Pos, Side::Left) => [a, c, b, b],
        (Sign::Pos, Side::Right) => [b, b, c, a],
        (Sign::Neg, Side::Right) => [a, b, b, c],
        (Sign::Neg, Side::Left) => [b, a, c, b],
    };
    let mut dr = Draft::of(d);
    if free {
        dr.drop_free(e);
    } else {
        let ends = d.ends(e).unwrap();
        dr.put(ends.tail, a);
        dr.put(ends.head, c);
    }
    dr.crossings.push(Crossing::new(edges, sign));
    let mut map = identity_map(d, &[e]);
    map.insert(e, ids.clone());
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence { map, created: ids },
        crossing_map: identity_crossings(d),
        local: Local::R1Add {
            sign,
            arc_in: a,
            loop_edge: b,
            arc_out: c,
            old: e,
        },
    })
}

/// Result of deleting crossings by letting both strands pass straight through.
struct PassThrough {
    draft: Draft,
    crossing_map: Vec<Option<usize>>,
    /// Each merged chain of old edges (in strand order) and its new edge.
    chains: Vec<(Vec<EdgeId>, EdgeId)>,
}

fn pass_through(d: &Diagram, remove: &[usize], site_edges: &[EdgeId]) -> PassThrough {
    let removed: BTreeSet<usize> = remove.iter().copied().collect();
    let mut visited: BTreeSet<EdgeId> = BTreeSet::new();
    let mut chains: Vec<Vec<EdgeId>> = Vec::new();
    let touching: Vec<EdgeId> = {
        let mut v: Vec<EdgeId> = site_edges.to_vec();
        for &k in remove {
            v.extend(d.crossings[k].edges);
        }
        v
    };
    for &e in &touching {
        if visited.contains(&e) {
            continue;
        }
        // Walk back to the start of the chain.
        let mut start = e;
        loop {
            let tail = d.ends(start).unwrap().tail;
            if !removed.contains(&tail.crossing) {
                break;
            }
            let prev = d.crossings[tail.crossing].edges[(tail.slot + 2) % 4];
            if prev == e {
                break;
            }
            start = prev;
        }
        let mut chain = vec![start];
        visited.insert(start);
        let mut cur = start;
        loop {
            let head = d.ends(cur).unwrap().head;
            if !removed.contains(&head.crossing) {
                break;
            }
            let next = d.crossings[head.crossing].edges[(head.slot + 2) % 4];
            if next == start {
                break;
            }
            chain.push(next);
            visited.insert(next);
            cur = next;
        }
        chains.push(chain);
    }
    let ids = d.fresh_ids(chains.len(), &BTreeSet::new());
    let mut draft = Draft::of(d);
    for (chain, &id) in chains.iter().zip(&ids) {
        let tail = d.ends(chain[0]).unwrap().tail;
        let head = d.ends(*chain.last().unwrap()).unwrap().head;
        if removed.contains(&tail.crossing) {
            draft.free.push(id);
        } else {
            draft.put(tail, id);
            draft.put(head, id);
        }
    }
    let mut crossing_map = Vec::with_capacity(d.n_crossings());
    let mut kept = Vec::new();
    for (i, c) in draft.crossings.iter().enumerate() {
        if removed.contains(&i) {
            crossing_map.push(None);
        } else {
            crossing_map.push(Some(kept.len()));
            kept.push(*c);
        }
    }
    draft.crossings = kept;
    PassThrough {
        draft,
        crossing_map,
        chains: chains.into_iter().zip(ids).collect(),
    }
}

fn chain_map(d: &Diagram, chains: &[(Vec<EdgeId>, EdgeId)]) -> EdgeCorrespondence {
    let consumed: Vec<EdgeId> = chains.iter().flat_map(|(c, _)| c.iter().copied()).collect();
    let mut map = identity_map(d, &consumed);
    for (chain, id) in chains {
        for &e in chain {
            map.insert(e, vec![*id]);
        }
    }
    EdgeCorrespondence {
        map,
        created: chains.iter().map(|(_, id)| *id).collect(),
    }
}

fn r1_remove(d: &Diagram, e: EdgeId, sign: Sign) -> Result<Rewrite> {
    let kind = if sign == Sign::Pos {
        "r1+inv"
    } else {
        "r1-inv"
    };
    require_edge(d, kind, e)?;
    let Some(ends) = d.ends(e) else {
        return Err(Error::site(kind, format!("edge {e} is a free circle")));
    };
    let k = ends.tail.crossing;
    let gap = (ends.tail.slot + 4 - ends.head.slot) % 4;
    if ends.head.crossing != k || gap % 2 == 0 {
        return Err(Error::site(kind, format!("edge {e} is not a kink loop")));
    }
    if d.crossings[k].sign != sign {
        return Err(Error::site(
            kind,
            format!("kink on edge {e} has the other sign"),
        ));
    }
    let arc_in = d.crossings[k].edges[(ends.head.slot + 2) % 4];
    let arc_out = d.crossings[k].edges[(ends.tail.slot + 2) % 4];
    let pt = pass_through(d, &[k], &[e]);
    let new = pt.chains[0].1;
    Ok(Rewrite {
        corr: chain_map(d, &pt.chains),
        crossing_map: pt.crossing_map,
        diagram: pt.draft.finish()?,
        local: Local::R1Remove {
            crossing: k,
            sign,
            arc_in,
            loop_edge: e,
            arc_out,
            new,
        },
    })
}

fn r2_sides(
    d: &Diagram,
    over: EdgeId,
    under: EdgeId,
    over_side: Option<Side>,
    under_side: Option<Side>,
) -> Result<(Side, Side)> {
    let sides = [Side::Left, Side::Right];
    let cands: Vec<(Side, Side)> = sides
        .iter()
        .flat_map(|&so| sides.iter().map(move |&su| (so, su)))
        .filter(|&(so, su)| over_side.is_none_or(|x| x == so) && under_side.is_none_or(|x| x == su))
        .collect();
    cands
        .into_iter()
        .find(|&(so, su)| share_face(d, (over, so), (under, su)))
        .ok_or_else(|| {
            Error::site(
                "r2+",
                format!("edges {over} and {under} do not share a face on the requested sides"),
            )
        })
}

/// The finger of the over strand dips across the under strand inside the
/// shared face; the two crossings are listed along the under strand.
fn r2_crossings(so: Side, su: Side, o: [EdgeId; 3], u: [EdgeId; 3]) -> [Crossing; 2] {
    let ([o1, o2, o3], [u1, u2, u3]) = (o, u);
    let (first, second) = match (su, so) {
        (Side::Left, Side::Right) => (
            Crossing::new([u1, o2, u2, o1], Sign::Pos),
            Crossing::new([u2, o2, u3, o3], Sign::Neg),
        ),
        (Side::Left, Side::Left) => (
            Crossing::new([u1, o2, u2, o3], Sign::Neg),
            Crossing::new([u2, o2, u3, o1], Sign::Pos),
        ),
        (Side::Right, Side::Right) => (
            Crossing::new([u1, o3, u2, o2], Sign::Pos),
            Crossing::new([u2, o1, u3, o2], Sign::Neg),
        ),
        (Side::Right, Side::Left) => (
            Crossing::new([u1, o1, u2, o2], Sign::Neg),
            Crossing::new([u2, o3, u3, o2], Sign::Pos),
        ),
    };
    [first, second]
}

/// R2 of an edge across itself: one part of `e` becomes the finger and
/// another part the strand it crosses.
fn r2_add_self(d: &Diagram, e: EdgeId, so: Side, su: Side, over_first: bool) -> Result<Rewrite> {
    let free = d.is_free(e);
    if free && so != su {
        return Err(Error::site(
            "r2+",
            format!("circle {e} has no face on both of its sides"),
        ));
    }
    let ids = d.fresh_ids(if free { 4 } else { 5 }, &BTreeSet::new());
    let (a, b, m) = (ids[0], ids[1], ids[2]);
    let (c, z) = (ids[3], if free { ids[0] } else { ids[4] });
    // Along e: a, b, m, c, z; the middle edge m ends the first part and
    // starts the second.
    let (o, u) = if over_first {
        ([a, b, m], [m, c, z])
    } else {
        ([m, c, z], [a, b, m])
    };
    let [first, second] = r2_crossings(so, su, o, u);
    let mut dr = Draft::of(d);
    if free {
        dr.drop_free(e);
    } else {
        let ends = d.ends(e).unwrap();
        dr.put(ends.tail, a);
        dr.put(ends.head, z);
    }
    let n = d.n_crossings();
    dr.crossings.push(first);
    dr.crossings.push(second);
    let mut map = identity_map(d, &[e]);
    map.insert(e, if free { vec![a, b, m, c] } else { ids.clone() });
    let mut outer = vec![(e, a), (e, m)];
    if !free {
        outer.push((e, z));
    }
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence { map, created: ids },
        crossing_map: identity_crossings(d),
        local: Local::R2Add {
            crossings: [n, n + 1],
            bigon: [o[1], u[1]],
            outer,
        },
    })
}

fn r2_add(
    d: &Diagram,
    over: EdgeId,
    under: EdgeId,
    over_side: Option<Side>,
    under_side: Option<Side>,
    over_first: bool,
) -> Result<Rewrite> {
    require_edge(d, "r2+", over)?;
    require_edge(d, "r2+", under)?;
    let (so, su) = r2_sides(d, over, under, over_side, under_side)?;
    if over == under {
        return r2_add_self(d, over, so, su, over_first);
    }
    let (of, uf) = (d.is_free(over), d.is_free(under));
    let count = 6 - of as usize - uf as usize;
    let ids = d.fresh_ids(count, &BTreeSet::new());
    let mut it = ids.iter().copied();
    let o1 = it.next().unwrap();
    let o2 = it.next().unwrap();
    let o3 = if of { o1 } else { it.next().unwrap() };
    let u1 = it.next().unwrap();
    let u2 = it.next().unwrap();
    let u3 = if uf { u1 } else { it.next().unwrap() };
    let [first, second] = r2_crossings(so, su, [o1, o2, o3], [u1, u2, u3]);
    let mut dr = Draft::of(d);
    for (e, free, start, end) in [(over, of, o1, o3), (under, uf, u1, u3)] {
        if free {
            dr.drop_free(e);
        } else {
            let ends = d.ends(e).unwrap();
            dr.put(ends.tail, start);
            dr.put(ends.head, end);
        }
    }
    let n = d.n_crossings();
    dr.crossings.push(first);
    dr.crossings.push(second);
    let mut map = identity_map(d, &[over, under]);
    map.insert(over, if of { vec![o1, o2] } else { vec![o1, o2, o3] });
    map.insert(under, if uf { vec![u1, u2] } else { vec![u1, u2, u3] });
    let mut outer = vec![(over, o1), (under, u1)];
    if !of {
        outer.push((over, o3));
    }
    if !uf {
        outer.push((under, u3));
    }
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence { map, created: ids },
        crossing_map: identity_crossings(d),
        local: Local::R2Add {
            crossings: [n, n + 1],
            bigon: [o2, u2],
            outer,
        },
    })
}

fn r2_remove(d: &Diagram, a: EdgeId, b: EdgeId) -> Result<Rewrite> {
    require_edge(d, "r2-", a)?;
    require_edge(d, "r2-", b)?;
    let (Some(ea), Some(eb)) = (d.ends(a), d.ends(b)) else {
        return Err(Error::site("r2-", "bigon edges cannot be free circles"));
    };
    if a == b || ea.tail.crossing == ea.head.crossing {
        return Err(Error::site(
            "r2-",
            format!("edges {a} and {b} do not bound a bigon"),
        ));
    }
    let xs: BTreeSet<usize> = [ea.tail.crossing, ea.head.crossing].into();
    let ys: BTreeSet<usize> = [eb.tail.crossing, eb.head.crossing].into();
    if xs != ys {
        return Err(Error::site(
            "r2-",
            format!("edges {a} and {b} do not bound a bigon"),
        ));
    }
    let a_over = [ea.tail, ea.head].map(|s| Crossing::is_over(s.slot));
    let b_over = [eb.tail, eb.head].map(|s| Crossing::is_over(s.slot));
    let (over, under) = match (a_over, b_over) {
        ([true, true], [false, false]) => (a, b),
        ([false, false], [true, true]) => (b, a),
        _ => {
            return Err(Error::site(
                "r2-",
                "one bigon edge must pass over at both crossings",
            ))
        }
    };
    let is_face = d
        .faces()
        .iter()
        .any(|f| f.len() == 2 && f.iter().any(|&(e, _)| e == a) && f.iter().any(|&(e, _)| e == b));
    if !is_face {
        return Err(Error::site(
            "r2-",
            format!("edges {a} and {b} do not bound a face"),
        ));
    }
    let crossings: Vec<usize> = xs.into_iter().collect();
    let pt = pass_through(d, &crossings, &[over, under]);
    let mut outer = Vec::new();
    for (chain, id) in &pt.chains {
        outer.push((*id, chain[0]));
        if chain.len() > 1 && chain.last() != chain.first() {
            outer.push((*id, *chain.last().unwrap()));
        }
    }
    outer.retain(|&(_, e)| e != a && e != b);
    Ok(Rewrite {
        corr: chain_map(d, &pt.chains),
        crossing_map: pt.crossing_map,
        diagram: pt.draft.finish()?,
        local: Local::R2Remove {
            crossings: [crossings[0], crossings[1]],
            bigon: [over, under],
            outer,
        },
    })
}

fn r3(d: &Diagram, edges: [EdgeId; 3]) -> Result<Rewrite> {
    for e in edges {
        require_edge(d, "r3", e)?;
    }
    let ends: Vec<_> = edges
        .iter()
        .map(|&e| {
            d.ends(e)
                .ok_or_else(|| Error::site("r3", "triangle edges cannot be free circles"))
        })
        .collect::<Result<_>>()?;
    let is_face = d
        .faces()
        .iter()
        .any(|f| f.len() == 3 && edges.iter().all(|&e| f.iter().any(|&(x, _)| x == e)));
    if !is_face {
        return Err(Error::site(
            "r3",
            format!("edges {edges:?} do not bound a triangular face"),
        ));
    }
    let mut role: [Option<usize>; 3] = [None; 3];
    for (i, en) in ends.iter().enumerate() {
        let r = match (
            Crossing::is_over(en.tail.slot),
            Crossing::is_over(en.head.slot),
        ) {
            (true, true) => 0,
            (false, false) => 2,
            _ => 1,
        };
        if role[r].is_some() {
            return Err(Error::site(
                "r3",
                "triangle needs one strand over twice, one under twice and one mixed",
            ));
        }
        role[r] = Some(i);
    }
    let [t, m, b] = role.map(|r| r.unwrap());
    let shared = |i: usize, j: usize| -> Result<usize> {
        let ci: BTreeSet<usize> = [ends[i].tail.crossing, ends[i].head.crossing].into();
        let cj: BTreeSet<usize> = [ends[j].tail.crossing, ends[j].head.crossing].into();
        let common: Vec<usize> = ci.intersection(&cj).copied().collect();
        match common.as_slice() {
            [c] => Ok(*c),
            _ => Err(Error::site("r3", "triangle edges do not meet pairwise")),
        }
    };
    let (tm, tb, mb) = (shared(t, m)?, shared(t, b)?, shared(m, b)?);
    let ids = d.fresh_ids(3, &BTreeSet::new());
    let mut dr = Draft::of(d);
    // Each strand meets its two triangle crossings in the opposite order
    // afterwards; the local picture at each crossing is unchanged.
    for (k, &i) in [t, m, b].iter().enumerate() {
        let p = edges[i];
        let en = ends[i];
        let in_slot = Slot {
            crossing: en.tail.crossing,
            slot: (en.tail.slot + 2) % 4,
        };
        let out_slot = Slot {
            crossing: en.head.crossing,
            slot: (en.head.slot + 2) % 4,
        };
        let p_in = d.crossings[in_slot.crossing].edges[in_slot.slot];
        let p_out = d.crossings[out_slot.crossing].edges[out_slot.slot];
        let _ = p;
        dr.put(in_slot, ids[k]);
        dr.put(en.tail, p_out);
        dr.put(en.head, p_in);
        dr.put(out_slot, ids[k]);
    }
    let mut map = identity_map(d, &edges);
    for (k, &i) in [t, m, b].iter().enumerate() {
        map.insert(edges[i], vec![ids[k]]);
    }
    Ok(Rewrite {
        diagram: dr.finish()?,
        corr: EdgeCorrespondence {
            map,
            created: ids.clone(),
        },
        crossing_map: identity_crossings(d),
        local: Local::R3 {
            mb,
            tm,
            tb,
            before: [edges[t], edges[m], edges[b]],
            after: [ids[0], ids[1], ids[2]],
        },
    })
}
