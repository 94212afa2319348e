//! Isomorphisms between diagrams that differ only in edge ids and crossing
//! order. Rewrites hand out fresh ids, so a movie and its reverse end on
//! copies of the source rather than the source itself.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Diagram, EdgeId, Sign};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alignment {
    pub edges: BTreeMap<EdgeId, EdgeId>,
    /// Crossing index in the source diagram to index in the target.
    pub crossings: Vec<usize>,
}

impl Alignment {
    pub fn identity(d: &Diagram) -> Self {
        Alignment {
            edges: d.edge_ids().iter().map(|&e| (e, e)).collect(),
            crossings: (0..d.n_crossings()).collect(),
        }
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        self.edges[&e]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Alignment) -> Alignment {
        Alignment {
            edges: self
                .edges
                .iter()
                .map(|(&a, &b)| (a, next.edge(b)))
                .collect(),
            crossings: self.crossings.iter().map(|&i| next.crossings[i]).collect(),
        }
    }
}

fn mismatch(why: impl Into<String>) -> Error {
    Error::InvalidDiagram(format!("diagrams are not aligned: {}", why.into()))
}

/// Partial matching grown by propagation through crossings.
#[derive(Clone)]
struct Matching<'a> {
    from: &'a Diagram,
    to: &'a Diagram,
    edges: BTreeMap<EdgeId, EdgeId>,
    used: BTreeSet<EdgeId>,
    cross: Vec<Option<usize>>,
    taken: Vec<bool>,
}

impl<'a> Matching<'a> {
    fn bind(&mut self, a: EdgeId, b: EdgeId, queue: &mut VecDeque<EdgeId>) -> Result<()> {
        match self.edges.get(&a) {
            Some(&old) if old == b => Ok(()),
            Some(&old) => Err(mismatch(format!("edge {a} maps to both {old} and {b}"))),
            None => {
                if !self.to.has_edge(b) || !self.used.insert(b) {
                    return Err(mismatch(format!("edge {b} is hit twice or missing")));
                }
                self.edges.insert(a, b);
                queue.push_back(a);
                Ok(())
            }
        }
    }

    fn bind_crossing(&mut self, i: usize, j: usize, queue: &mut VecDeque<EdgeId>) -> Result<()> {
        let (c, d) = (self.from.crossing(i), self.to.crossing(j));
        if self.taken[j] || c.sign != d.sign {
            return Err(mismatch(format!("crossing {i} cannot map to {j}")));
        }
        self.taken[j] = true;
        self.cross[i] = Some(j);
        for t in 0..4 {
            self.bind(c.edges[t], d.edges[t], queue)?;
        }
        Ok(())
    }

    fn propagate(
        &mut self,
        index: &BTreeMap<(EdgeId, usize, bool), usize>,
        mut queue: VecDeque<EdgeId>,
    ) -> Result<()> {
        while let Some(a) = queue.pop_front() {
            for i in 0..self.from.n_crossings() {
                if self.cross[i].is_some() {
                    continue;
                }
                let c = self.from.crossing(i);
                let Some(s) = (0..4).find(|&s| c.edges[s] == a) else {
                    continue;
                };
                let Some(&j) = index.get(&(self.edges[&a], s, c.sign == Sign::Pos)) else {
                    return Err(mismatch(format!("no partner for crossing {i}")));
                };
                self.bind_crossing(i, j, &mut queue)?;
            }
        }
        Ok(())
    }
}

/// Extends `seed` to an isomorphism `from -> to`. Crossings are matched
/// through shared edges at equal slots and signs. Diagram components the
/// seed does not reach are matched by trying each candidate for their
/// first crossing; any automorphism of such a component is acceptable to
/// callers. Free circles left over are paired in id order.
pub fn align(from: &Diagram, to: &Diagram, seed: &BTreeMap<EdgeId, EdgeId>) -> Result<Alignment> {
    if from.n_crossings() != to.n_crossings()
        || from.n_edges() != to.n_edges()
        || from.free_circles().len() != to.free_circles().len()
    {
        return Err(mismatch("sizes differ"));
    }
    // (edge, slot, sign) determines a crossing: each edge is incoming at
    // exactly one crossing and outgoing at exactly one.
    let mut index: BTreeMap<(EdgeId, usize, bool), usize> = BTreeMap::new();
    for (i, c) in to.crossings().iter().enumerate() {
        for s in 0..4 {
            index.insert((c.edges[s], s, c.sign == Sign::Pos), i);
        }
    }
    let mut m = Matching {
        from,
        to,
        edges: BTreeMap::new(),
        used: BTreeSet::new(),
        cross: vec![None; from.n_crossings()],
        taken: vec![false; to.n_crossings()],
    };
    let mut queue = VecDeque::new();
    for (&a, &b) in seed {
        if from.has_edge(a) && !from.is_free(a) {
            m.bind(a, b, &mut queue)?;
        }
    }
    m.propagate(&index, queue)?;
    while let Some(i) = m.cross.iter().position(Option::is_none) {
        let mut found = None;
        for j in (0..to.n_crossings()).filter(|&j| !m.taken[j]) {
            let mut trial = m.clone();
            let mut queue = VecDeque::new();
            if trial.bind_crossing(i, j, &mut queue).is_ok()
                && trial.propagate(&index, queue).is_ok()
            {
                found = Some(trial);
                break;
            }
        }
        m = found.ok_or_else(|| mismatch(format!("no match for crossing {i}")))?;
    }
    let Matching {
        mut edges,
        used,
        cross,
        ..
    } = m;
    // Seeded free circles first, then the rest in id order.
    let mut rest_to: Vec<EdgeId> = to
        .free_circles()
        .iter()
        .copied()
        .filter(|e| !used.contains(e))
        .collect();
    let mut rest_from = Vec::new();
    for &a in from.free_circles() {
        match seed.get(&a) {
            Some(&b) if to.is_free(b) && rest_to.contains(&b) => {
                rest_to.retain(|&x| x != b);
                edges.insert(a, b);
            }
            _ => rest_from.push(a),
        }
    }
    if rest_from.len() != rest_to.len() {
        return Err(mismatch("free circles do not pair up"));
    }
    for (a, b) in rest_from.into_iter().zip(rest_to) {
        edges.insert(a, b);
    }
    if edges.len() != from.n_edges() {
        return Err(mismatch("some edges are unmatched"));
    }
    let crossings = cross.into_iter().map(|j| j.expect("all matched")).collect();
    Ok(Alignment { edges, crossings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::examples::*;
    use crate::diagram::Crossing;

    #[test]
    fn relabeled_trefoil_aligns() {
        let d = left_trefoil();
        let shift = |e: EdgeId| e + 10;
        let mut cs: Vec<Crossing> = d
            .crossings()
            .iter()
            .map(|c| Crossing::new(c.edges.map(shift), c.sign))
            .collect();
        cs.rotate_left(1);
        let e = Diagram::new(cs, vec![]).unwrap();
        let al = align(&d, &e, &[(1, 11)].into()).unwrap();
        assert_eq!(al.edge(4), 14);
        assert_eq!(al.crossings, vec![2, 0, 1]);
    }

    #[test]
    fn a_wrong_seed_is_rejected() {
        let d = left_trefoil();
        assert!(align(&d, &d, &[(1, 2)].into()).is_err());
        let h = negative_hopf();
        let m = h.mirror();
        assert!(align(&h, &m, &[(1, 1)].into()).is_err());
        assert!(align(&h, &m, &BTreeMap::new()).is_err());
    }

    #[test]
    fn unseeded_components_are_matched_by_search() {
        let d = left_trefoil();
        let al = align(&d, &d, &BTreeMap::new()).unwrap();
        assert_eq!(al.crossings.len(), 3);
        let two = Diagram::new(vec![], vec![3, 5]).unwrap();
        let other = Diagram::new(vec![], vec![0, 1]).unwrap();
        let al = align(&two, &other, &[(5, 0)].into()).unwrap();
        assert_eq!((al.edge(5), al.edge(3)), (0, 1));
    }
}
