//! Oriented planar link diagrams in PD form.
//!
//! A crossing lists its four edge ids counterclockwise, starting at the
//! incoming under-strand, so the under-strand runs slot 0 to slot 2. The
//! over-strand runs slot 3 to slot 1 at a positive crossing and slot 1 to
//! slot 3 at a negative one. The 0-resolution joins slots (0,1) and (2,3);
//! the 1-resolution joins (0,3) and (1,2).
//!
//! Crossingless components are free circles, each carrying one synthetic
//! edge id drawn from the same id space as crossing edges.

mod align;
mod moves;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::f2linalg::BitVec;

pub use align::{align, Alignment};
pub use moves::{apply_event, EdgeCorrespondence};
pub(crate) use moves::{rewrite, Local, Rewrite};

pub type EdgeId = u32;

/// A resolution choice per crossing; bit `i` is the resolution of crossing `i`.
pub type Smoothing = BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub edges: [EdgeId; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn new(edges: [EdgeId; 4], sign: Sign) -> Self {
        Crossing { edges, sign }
    }

    /// Whether the strand at `slot` points into the crossing.
    pub fn incoming(&self, slot: usize) -> bool {
        match slot {
            0 => true,
            2 => false,
            1 => self.sign == Sign::Neg,
            3 => self.sign == Sign::Pos,
            _ => unreachable!("slot out of range"),
        }
    }

    /// Whether `slot` lies on the over-strand.
    pub fn is_over(slot: usize) -> bool {
        slot % 2 == 1
    }

    /// Slot pairs joined by the given resolution.
    pub fn resolution_pairs(bit: bool) -> [(usize, usize); 2] {
        if bit {
            [(0, 3), (1, 2)]
        } else {
            [(0, 1), (2, 3)]
        }
    }
}

/// One end of an edge: crossing index and slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub crossing: usize,
    pub slot: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct EdgeEnds {
    /// Where the edge leaves a crossing.
    pub tail: Slot,
    /// Where the edge enters a crossing.
    pub head: Slot,
}

/// Side of an oriented edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A face of the diagram as the set of edge sides that bound it.
pub type Face = BTreeSet<(EdgeId, Side)>;

#[derive(Clone)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    free: Vec<EdgeId>,
    // Derived data.
    edge_ids: Vec<EdgeId>,
    ends: Vec<Option<EdgeEnds>>,
}

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings && self.free == other.free
    }
}

impl Eq for Diagram {}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PD[")?;
        for (i, c) in self.crossings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let s = if c.sign == Sign::Pos { '+' } else { '-' };
            write!(f, "X{s}{:?}", c.edges)?;
        }
        if !self.free.is_empty() {
            write!(f, "; free {:?}", self.free)?;
        }
        f.write_str("]")
    }
}

impl Diagram {
    pub fn empty() -> Self {
        Diagram::new(Vec::new(), Vec::new()).expect("empty diagram is valid")
    }

    pub fn unknot() -> Self {
        Diagram::new(Vec::new(), vec![0]).expect("unknot is valid")
    }

    /// Validates and builds a diagram. Free circle ids must be distinct from
    /// each other and from crossing edges.
    pub fn new(crossings: Vec<Crossing>, mut free: Vec<EdgeId>) -> Result<Self> {
        free.sort_unstable();
        let mut uses: BTreeMap<EdgeId, Vec<Slot>> = BTreeMap::new();
        for (ci, c) in crossings.iter().enumerate() {
            for (s, &e) in c.edges.iter().enumerate() {
                uses.entry(e).or_default().push(Slot {
                    crossing: ci,
                    slot: s,
                });
            }
        }
        for (&e, slots) in &uses {
            if slots.len() != 2 {
                return Err(Error::InvalidDiagram(format!(
                    "edge {e} is used {} times, expected 2",
                    slots.len()
                )));
            }
        }
        for w in free.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidDiagram(format!(
                    "free circle id {} repeated",
                    w[0]
                )));
            }
        }
        if let Some(e) = free.iter().find(|e| uses.contains_key(e)) {
            return Err(Error::InvalidDiagram(format!(
                "free circle id {e} is also a crossing edge"
            )));
        }
        let mut edge_ids: Vec<EdgeId> = uses.keys().copied().chain(free.iter().copied()).collect();
        edge_ids.sort_unstable();
        let mut ends = Vec::with_capacity(edge_ids.len());
        for &e in &edge_ids {
            let Some(slots) = uses.get(&e) else {
                ends.push(None);
                continue;
            };
            let inc: Vec<bool> = slots
                .iter()
                .map(|s| crossings[s.crossing].incoming(s.slot))
                .collect();
            let (tail, head) = match (inc[0], inc[1]) {
                (false, true) => (slots[0], slots[1]),
                (true, false) => (slots[1], slots[0]),
                _ => {
                    return Err(Error::InvalidDiagram(format!(
                        "sign/orientation mismatch: edge {e} has {} incoming ends",
                        inc.iter().filter(|&&b| b).count()
                    )))
                }
            };
            ends.push(Some(EdgeEnds { tail, head }));
        }
        let d = Diagram {
            crossings,
            free,
            edge_ids,
            ends,
        };
        d.check_planar()?;
        Ok(d)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing(&self, i: usize) -> &Crossing {
        &self.crossings[i]
    }

    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_circles(&self) -> &[EdgeId] {
        &self.free
    }

    /// All edge ids in increasing order, free circles included.
    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn n_edges(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edge_ids.binary_search(&e).is_ok()
    }

    pub(crate) fn dense(&self, e: EdgeId) -> Option<usize> {
        self.edge_ids.binary_search(&e).ok()
    }

    pub fn is_free(&self, e: EdgeId) -> bool {
        self.free.binary_search(&e).is_ok()
    }

    pub(crate) fn ends(&self, e: EdgeId) -> Option<EdgeEnds> {
        self.dense(e).and_then(|i| self.ends[i])
    }

    pub fn n_pos(&self) -> usize {
        self.crossings
            .iter()
            .filter(|c| c.sign == Sign::Pos)
            .count()
    }

    pub fn n_neg(&self) -> usize {
        self.crossings.len() - self.n_pos()
    }

    pub fn writhe(&self) -> i64 {
        self.n_pos() as i64 - self.n_neg() as i64
    }

    /// Smallest ids not currently used, in increasing order.
    pub(crate) fn fresh_ids(&self, count: usize, also_taken: &BTreeSet<EdgeId>) -> Vec<EdgeId> {
        let mut out = Vec::with_capacity(count);
        let mut cand: EdgeId = 0;
        while out.len() < count {
            if !self.has_edge(cand) && !also_taken.contains(&cand) {
                out.push(cand);
            }
            cand += 1;
        }
        out
    }

    /// Number of link components, free circles included.
    pub fn n_components(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = self.free.len();
        for &e in &self.edge_ids {
            if self.is_free(e) || seen.contains(&e) {
                continue;
            }
            count += 1;
            let mut cur = e;
            loop {
                seen.insert(cur);
                let head = self.ends(cur).expect("crossing edge").head;
                cur = self.crossings[head.crossing].edges[(head.slot + 2) % 4];
                if cur == e {
                    break;
                }
            }
        }
        count
    }

    /// Mirror image: every crossing changes over/under, so signs flip and the
    /// two resolutions trade places.
    pub fn mirror(&self) -> Diagram {
        let crossings = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.edges;
                match c.sign {
                    Sign::Pos => Crossing::new([d, a, b, cc], Sign::Neg),
                    Sign::Neg => Crossing::new([b, cc, d, a], Sign::Pos),
                }
            })
            .collect();
        Diagram::new(crossings, self.free.clone()).expect("mirror of a valid diagram is valid")
    }

    /// Resolves every crossing according to `s` and returns the circles.
    pub fn resolve(&self, s: &Smoothing) -> Result<CircleSet> {
        if s.len() != self.crossings.len() {
            return Err(Error::Dimension(format!(
                "smoothing of length {} on a diagram with {} crossings",
                s.len(),
                self.crossings.len()
            )));
        }
        Ok(self.resolve_unchecked(s))
    }

    pub(crate) fn resolve_unchecked(&self, s: &Smoothing) -> CircleSet {
        let n = self.edge_ids.len();
        let mut uf = UnionFind::new(n);
        for (i, c) in self.crossings.iter().enumerate() {
            for (a, b) in Crossing::resolution_pairs(s.get(i)) {
                let da = self.dense(c.edges[a]).expect("edge");
                let db = self.dense(c.edges[b]).expect("edge");
                uf.union(da, db);
            }
        }
        // Dense indices follow increasing edge id, so first appearance of a
        // root is at the circle's minimal edge.
        let mut root_to_circle = vec![usize::MAX; n];
        let mut circles: Vec<Vec<EdgeId>> = Vec::new();
        let mut circle_of = vec![0u32; n];
        for (i, &e) in self.edge_ids.iter().enumerate() {
            let r = uf.find(i);
            if root_to_circle[r] == usize::MAX {
                root_to_circle[r] = circles.len();
                circles.push(Vec::new());
            }
            let k = root_to_circle[r];
            circles[k].push(e);
            circle_of[i] = k as u32;
        }
        CircleSet {
            edge_ids: self.edge_ids.clone(),
            circles,
            circle_of,
        }
    }

    /// Traces faces from the rotation system. Each directed traversal of an
    /// edge keeps exactly one face on its right.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.crossings.len();
        let mut visited = vec![false; 4 * n];
        let mut faces = Vec::new();
        for start in 0..4 * n {
            if visited[start] {
                continue;
            }
            let mut face = Face::new();
            let mut h = start;
            while !visited[h] {
                visited[h] = true;
                let (c, s) = (h / 4, h % 4);
                let e = self.crossings[c].edges[s];
                let forward = !self.crossings[c].incoming(s);
                face.insert((e, if forward { Side::Right } else { Side::Left }));
                let other = self.other_end(Slot {
                    crossing: c,
                    slot: s,
                });
                h = 4 * other.crossing + (other.slot + 1) % 4;
            }
            faces.push(face);
        }
        for &e in &self.free {
            faces.push(Face::from([(e, Side::Left)]));
            faces.push(Face::from([(e, Side::Right)]));
        }
        faces
    }

    pub(crate) fn other_end(&self, at: Slot) -> Slot {
        let e = self.crossings[at.crossing].edges[at.slot];
        let ends = self.ends(e).expect("crossing edge");
        if ends.tail == at {
            ends.head
        } else {
            ends.tail
        }
    }

    /// Connected component index of every edge (free circles are their own
    /// components), as a map over edge ids.
    pub fn edge_components(&self) -> BTreeMap<EdgeId, usize> {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(n);
        for &e in &self.edge_ids {
            if let Some(ends) = self.ends(e) {
                uf.union(ends.tail.crossing, ends.head.crossing);
            }
        }
        let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out = BTreeMap::new();
        for &e in &self.edge_ids {
            let comp = match self.ends(e) {
                Some(ends) => {
                    let r = uf.find(ends.tail.crossing);
                    let next = roots.len();
                    *roots.entry(r).or_insert(next)
                }
                None => {
                    let next = roots.len();
                    roots.insert(usize::MAX - e as usize, next);
                    next
                }
            };
            out.insert(e, comp);
        }
        out
    }

    fn check_planar(&self) -> Result<()> {
        let n = self.crossings.len();
        if n == 0 {
            return Ok(());
        }
        let mut uf = UnionFind::new(n);
        for ends in self.ends.iter().flatten() {
            uf.union(ends.tail.crossing, ends.head.crossing);
        }
        let mut verts = vec![0i64; n];
        let mut face_count = vec![0i64; n];
        for c in 0..n {
            verts[uf.find(c)] += 1;
        }
        let mut visited = vec![false; 4 * n];
        for start in 0..4 * n {
            if visited[start] {
                continue;
            }
            face_count[uf.find(start / 4)] += 1;
            let mut h = start;
            while !visited[h] {
                visited[h] = true;
                let other = self.other_end(Slot {
                    crossing: h / 4,
                    slot: h % 4,
                });
                h = 4 * other.crossing + (other.slot + 1) % 4;
            }
        }
        for r in 0..n {
            if verts[r] == 0 {
                continue;
            }
            // V - E + F = 2 with E = 2V.
            if face_count[r] != verts[r] + 2 {
                return Err(Error::InvalidDiagram(format!(
                    "not planar: a component with {} crossings has {} faces",
                    verts[r], face_count[r]
                )));
            }
        }
        Ok(())
    }
}

/// Circles of a resolved diagram, ordered by their minimal edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleSet {
    edge_ids: Vec<EdgeId>,
    circles: Vec<Vec<EdgeId>>,
    circle_of: Vec<u32>,
}

impl CircleSet {
    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    /// Edge ids of circle `k`, increasing.
    pub fn circle(&self, k: usize) -> &[EdgeId] {
        &self.circles[k]
    }

    pub fn circles(&self) -> &[Vec<EdgeId>] {
        &self.circles
    }

    /// Index of the circle through edge `e`.
    pub fn circle_of(&self, e: EdgeId) -> usize {
        let i = self
            .edge_ids
            .binary_search(&e)
            .unwrap_or_else(|_| panic!("edge {e} not in diagram"));
        self.circle_of[i] as usize
    }

    pub fn try_circle_of(&self, e: EdgeId) -> Option<usize> {
        self.edge_ids
            .binary_search(&e)
            .ok()
            .map(|i| self.circle_of[i] as usize)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so results do not depend on call order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Small reference diagrams used across tests and bundled data.
pub mod examples {
    use super::*;

    pub fn positive_kink() -> Diagram {
        Diagram::new(vec![Crossing::new([1, 1, 2, 2], Sign::Pos)], vec![]).expect("positive kink")
    }

    pub fn negative_kink() -> Diagram {
        Diagram::new(vec![Crossing::new([1, 2, 2, 1], Sign::Neg)], vec![]).expect("negative kink")
    }

    /// Hopf link with two negative crossings.
    pub fn negative_hopf() -> Diagram {
        Diagram::new(
            vec![
                Crossing::new([4, 1, 3, 2], Sign::Neg),
                Crossing::new([2, 3, 1, 4], Sign::Neg),
            ],
            vec![],
        )
        .expect("negative Hopf link")
    }

    pub fn positive_hopf() -> Diagram {
        negative_hopf().mirror()
    }

    /// Trefoil with three negative crossings.
    pub fn left_trefoil() -> Diagram {
        Diagram::new(
            vec![
                Crossing::new([1, 4, 2, 5], Sign::Neg),
                Crossing::new([3, 6, 4, 1], Sign::Neg),
                Crossing::new([5, 2, 6, 3], Sign::Neg),
            ],
            vec![],
        )
        .expect("left trefoil")
    }

    pub fn right_trefoil() -> Diagram {
        left_trefoil().mirror()
    }
}
