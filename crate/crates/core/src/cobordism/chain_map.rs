//! Chain maps induced by elementary events.
//!
//! Morse events use the Frobenius maps directly. R1 and R2 use the standard
//! Gaussian-elimination maps for the small circle or bigon they create or
//! destroy; R3 expands the crossing away from the sliding strand, reduces the
//! bigon that appears in one of its resolutions, and reassembles on the other
//! side.

use std::collections::HashMap;

use crate::complex::{local_transfer, ChainVector, LabeledSmoothing};
use crate::diagram::{CircleSet, Crossing, Diagram, EdgeId, Local, Rewrite, Smoothing};
use crate::f2linalg::BitVec;

/// Memoized resolutions of one diagram.
pub(crate) struct Resolver<'a> {
    pub d: &'a Diagram,
    cache: HashMap<Smoothing, CircleSet>,
}

impl<'a> Resolver<'a> {
    pub fn new(d: &'a Diagram) -> Self {
        Resolver {
            d,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, s: &Smoothing) -> &CircleSet {
        if !self.cache.contains_key(s) {
            let cs = self.d.resolve_unchecked(s);
            self.cache.insert(s.clone(), cs);
        }
        &self.cache[s]
    }
}

fn set_bits(s: &Smoothing, bits: &[(usize, bool)]) -> Smoothing {
    let mut out = s.clone();
    for &(i, b) in bits {
        out.set(i, b);
    }
    out
}

/// Moves a generator between resolutions of two diagrams, identifying circles
/// through `pairs` (source edge, target edge).
fn transfer(
    src: &mut Resolver,
    g: &LabeledSmoothing,
    dst: &mut Resolver,
    target: Smoothing,
    pairs: &[(EdgeId, EdgeId)],
) -> Vec<LabeledSmoothing> {
    let from = src.get(&g.smoothing).clone();
    let to = dst.get(&target);
    local_transfer(&from, &g.labels, to, pairs.iter().copied())
        .into_iter()
        .map(|l| LabeledSmoothing::new(target.clone(), l))
        .collect()
}

/// Component of the differential that flips crossing `i` from 0 to 1.
fn flip(r: &mut Resolver, g: &LabeledSmoothing, i: usize) -> Vec<LabeledSmoothing> {
    debug_assert!(!g.smoothing.get(i));
    let target = set_bits(&g.smoothing, &[(i, true)]);
    let pairs: Vec<(EdgeId, EdgeId)> = r.d.edge_ids().iter().map(|&e| (e, e)).collect();
    transfer_same(r, g, target, &pairs)
}

fn transfer_same(
    r: &mut Resolver,
    g: &LabeledSmoothing,
    target: Smoothing,
    pairs: &[(EdgeId, EdgeId)],
) -> Vec<LabeledSmoothing> {
    let from = r.get(&g.smoothing).clone();
    let to = r.get(&target);
    local_transfer(&from, &g.labels, to, pairs.iter().copied())
        .into_iter()
        .map(|l| LabeledSmoothing::new(target.clone(), l))
        .collect()
}

/// Resolution bit at crossing `c` that joins the slots holding edges `a`
/// and `b`.
fn joining_bit(d: &Diagram, c: usize, a: EdgeId, b: EdgeId) -> bool {
    let x: &Crossing = d.crossing(c);
    for bit in [false, true] {
        for (s, t) in Crossing::resolution_pairs(bit) {
            let (es, et) = (x.edges[s], x.edges[t]);
            if (es == a && et == b) || (es == b && et == a) {
                return bit;
            }
        }
    }
    panic!("edges {a} and {b} are not adjacent at crossing {c}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BigonState {
    /// Neither crossing joins the bigon sides: the through state.
    Id,
    /// Both crossings join the bigon sides: contains the small circle.
    Circ,
    /// Both crossings 0-resolved.
    Bot,
    /// Both crossings 1-resolved.
    Top,
}

/// An R2-cancelable bigon in a diagram, with the Gaussian-elimination data
/// that contracts it: `g` onto the through state, `f` back, and the homotopy
/// `h` with `f g = 1 + d h + h d`.
struct Bigon {
    p: [usize; 2],
    /// Resolution bit at each crossing joining the bigon sides.
    join: [bool; 2],
    /// Edges of the small circle in the state joining both sides.
    small: Vec<EdgeId>,
}

impl Bigon {
    /// `sides[j]` are the two bigon edges as they meet crossing `p[j]`.
    fn new(d: &Diagram, p: [usize; 2], sides: [[EdgeId; 2]; 2], small: Vec<EdgeId>) -> Self {
        let join = [
            joining_bit(d, p[0], sides[0][0], sides[0][1]),
            joining_bit(d, p[1], sides[1][0], sides[1][1]),
        ];
        assert_ne!(join[0], join[1], "bigon crossings must have opposite signs");
        Bigon { p, join, small }
    }

    fn state(&self, s: &Smoothing) -> BigonState {
        let b = [s.get(self.p[0]), s.get(self.p[1])];
        if b[0] != self.join[0] && b[1] != self.join[1] {
            BigonState::Id
        } else if b == self.join {
            BigonState::Circ
        } else if !b[0] && !b[1] {
            BigonState::Bot
        } else {
            BigonState::Top
        }
    }

    fn with(&self, s: &Smoothing, st: BigonState) -> Smoothing {
        let bits = match st {
            BigonState::Id => [!self.join[0], !self.join[1]],
            BigonState::Circ => self.join,
            BigonState::Bot => [false, false],
            BigonState::Top => [true, true],
        };
        set_bits(s, &[(self.p[0], bits[0]), (self.p[1], bits[1])])
    }

    fn id_bits(&self) -> [bool; 2] {
        [!self.join[0], !self.join[1]]
    }

    /// The crossing that is 0-resolved in the through state.
    fn id_zero(&self) -> usize {
        if self.join[0] {
            self.p[0]
        } else {
            self.p[1]
        }
    }

    fn id_one(&self) -> usize {
        if self.join[0] {
            self.p[1]
        } else {
            self.p[0]
        }
    }

    /// Edge identifications between states that differ only at the bigon.
    /// The small circle's edges are left out so that it is born or dies.
    fn outside_pairs(&self, d: &Diagram) -> Vec<(EdgeId, EdgeId)> {
        d.edge_ids()
            .iter()
            .filter(|e| !self.small.contains(e))
            .map(|&e| (e, e))
            .collect()
    }

    /// Projection onto the through state.
    fn g(&self, r: &mut Resolver, x: &LabeledSmoothing) -> Vec<LabeledSmoothing> {
        match self.state(&x.smoothing) {
            BigonState::Id => vec![x.clone()],
            BigonState::Circ => {
                // The counit on the small circle keeps only its x-labeled part.
                let pairs = self.outside_pairs(r.d);
                let bot = self.with(&x.smoothing, BigonState::Bot);
                let mut out = Vec::new();
                for u in transfer_same(r, x, bot, &pairs) {
                    out.extend(flip(r, &u, self.id_one()));
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Inclusion of a through-state generator.
    fn f(&self, r: &mut Resolver, v: &LabeledSmoothing) -> Vec<LabeledSmoothing> {
        debug_assert_eq!(self.state(&v.smoothing), BigonState::Id);
        let mut out = vec![v.clone()];
        let pairs = self.outside_pairs(r.d);
        for t in flip(r, v, self.id_zero()) {
            let circ = self.with(&t.smoothing, BigonState::Circ);
            out.extend(transfer_same(r, &t, circ, &pairs));
        }
        out
    }

    fn h(&self, r: &mut Resolver, x: &LabeledSmoothing) -> Vec<LabeledSmoothing> {
        let pairs = self.outside_pairs(r.d);
        match self.state(&x.smoothing) {
            BigonState::Circ => {
                let bot = self.with(&x.smoothing, BigonState::Bot);
                transfer_same(r, x, bot, &pairs)
            }
            BigonState::Top => {
                let circ = self.with(&x.smoothing, BigonState::Circ);
                transfer_same(r, x, circ, &pairs)
            }
            _ => Vec::new(),
        }
    }
}

fn map_smoothing(rw: &Rewrite, s: &Smoothing, appended: &[bool]) -> Smoothing {
    let mut out = BitVec::zeros(rw.diagram.n_crossings());
    for (i, target) in rw.crossing_map.iter().enumerate() {
        if let Some(j) = target {
            out.set(*j, s.get(i));
        }
    }
    let base = rw.diagram.n_crossings() - appended.len();
    for (k, &b) in appended.iter().enumerate() {
        out.set(base + k, b);
    }
    out
}

fn untouched_pairs(rw: &Rewrite, src: &Diagram) -> Vec<(EdgeId, EdgeId)> {
    src.edge_ids()
        .iter()
        .filter(|&&e| rw.corr.is_untouched(e))
        .map(|&e| (e, e))
        .collect()
}

/// Image of `c` under the chain map of the event described by `rw`.
pub(crate) fn map_chain(src: &Diagram, rw: &Rewrite, c: &ChainVector) -> ChainVector {
    let dst = &rw.diagram;
    let mut rs = Resolver::new(src);
    let mut rd = Resolver::new(dst);
    let mut base = untouched_pairs(rw, src);
    let mut out = ChainVector::zero();
    let mut emit = |v: Vec<LabeledSmoothing>| {
        for g in v {
            out.add(g);
        }
    };
    match &rw.local {
        Local::Birth { .. } | Local::Death => {
            for g in c.terms() {
                let t = map_smoothing(rw, &g.smoothing, &[]);
                emit(transfer(&mut rs, g, &mut rd, t, &base));
            }
        }
        Local::Saddle { a, b, new } => {
            for x in [a, b] {
                for y in new {
                    base.push((*x, *y));
                }
            }
            for g in c.terms() {
                let t = map_smoothing(rw, &g.smoothing, &[]);
                emit(transfer(&mut rs, g, &mut rd, t, &base));
            }
        }
        Local::R1Add {
            sign,
            arc_in,
            loop_edge,
            arc_out,
            old,
            ..
        } => {
            base.push((*old, *arc_in));
            base.push((*old, *arc_out));
            // Positive kink: split off the small circle (0-resolution).
            // Negative kink: birth of the small circle (1-resolution).
            let bit = *sign == crate::diagram::Sign::Neg;
            if !bit {
                base.push((*old, *loop_edge));
            }
            for g in c.terms() {
                let t = map_smoothing(rw, &g.smoothing, &[bit]);
                emit(transfer(&mut rs, g, &mut rd, t, &base));
            }
        }
        Local::R1Remove {
            crossing,
            sign,
            arc_in,
            loop_edge,
            arc_out,
            new,
        } => {
            base.push((*arc_in, *new));
            base.push((*arc_out, *new));
            // Positive kink: counit on the small circle at the 0-resolution.
            // Negative kink: merge the small circle at the 1-resolution.
            let bit = *sign == crate::diagram::Sign::Neg;
            if bit {
                base.push((*loop_edge, *new));
            }
            for g in c.terms() {
                if g.smoothing.get(*crossing) != bit {
                    continue;
                }
                let t = map_smoothing(rw, &g.smoothing, &[]);
                emit(transfer(&mut rs, g, &mut rd, t, &base));
            }
        }
        Local::R2Add {
            crossings,
            bigon,
            outer,
        } => {
            base.extend(outer.iter().copied());
            let bg = bigon_of(dst, *crossings, *bigon);
            let id_bits = bg.id_bits();
            for g in c.terms() {
                let t = map_smoothing(rw, &g.smoothing, &id_bits);
                for v in transfer(&mut rs, g, &mut rd, t, &base) {
                    emit(bg.f(&mut rd, &v));
                }
            }
        }
        Local::R2Remove {
            crossings,
            bigon,
            outer,
        } => {
            base.extend(outer.iter().map(|&(new, old)| (old, new)));
            let bg = bigon_of(src, *crossings, *bigon);
            for g in c.terms() {
                for v in bg.g(&mut rs, g) {
                    let t = map_smoothing(rw, &v.smoothing, &[]);
                    emit(transfer(&mut rs, &v, &mut rd, t, &base));
                }
            }
        }
        Local::R3 {
            mb,
            tm,
            tb,
            before,
            after,
        } => {
            let (mb, tm, tb) = (*mb, *tm, *tb);
            let layer = joining_bit(src, mb, before[1], before[2]);
            debug_assert_eq!(layer, joining_bit(dst, mb, after[1], after[2]));
            let b_src = r3_bigon(src, tm, tb, *before);
            let b_dst = r3_bigon(dst, tm, tb, *after);
            // Off the bigon layer the two sides are isotopic, but the isotopy
            // carries the top strand's crossing with one resolved arc to its
            // crossing with the same arc on the other side, which swaps the
            // roles of `tm` and `tb`.
            let off = |rs: &mut Resolver, rd: &mut Resolver, x: &LabeledSmoothing| {
                let s = &x.smoothing;
                let t = set_bits(s, &[(tm, s.get(tb)), (tb, s.get(tm))]);
                transfer(rs, x, rd, t, &base)
            };
            // Through states on both sides are isotopic as they stand.
            let id_bits = b_dst.id_bits();
            let through = |rs: &mut Resolver, rd: &mut Resolver, x: &LabeledSmoothing| {
                let t = set_bits(&x.smoothing, &[(tm, id_bits[0]), (tb, id_bits[1])]);
                transfer(rs, x, rd, t, &base)
            };
            for g in c.terms() {
                let on_bigon_layer = g.smoothing.get(mb) == layer;
                if on_bigon_layer {
                    // f' o g through the common reduced complex.
                    for e in b_src.g(&mut rs, g) {
                        for e2 in through(&mut rs, &mut rd, &e) {
                            emit(b_dst.f(&mut rd, &e2));
                        }
                    }
                    if !layer {
                        // Correction d_c h on the source side.
                        for u in b_src.h(&mut rs, g) {
                            for w in flip(&mut rs, &u, mb) {
                                emit(off(&mut rs, &mut rd, &w));
                            }
                        }
                    }
                } else {
                    let images = off(&mut rs, &mut rd, g);
                    if layer {
                        // Correction h' d_c' on the target side.
                        for w in &images {
                            for u in flip(&mut rd, w, mb) {
                                emit(b_dst.h(&mut rd, &u));
                            }
                        }
                    }
                    emit(images);
                }
            }
        }
    }
    out
}

fn bigon_of(d: &Diagram, p: [usize; 2], bigon: [EdgeId; 2]) -> Bigon {
    Bigon::new(d, p, [bigon, bigon], bigon.to_vec())
}

/// The bigon that the top strand forms with the resolved middle-bottom arc.
fn r3_bigon(d: &Diagram, tm: usize, tb: usize, tri: [EdgeId; 3]) -> Bigon {
    let [t, m, b] = tri;
    Bigon::new(d, [tm, tb], [[t, m], [t, b]], tri.to_vec())
}
