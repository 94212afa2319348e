//! Frobenius-algebra maps between two resolutions that differ by elementary
//! pieces: identity cylinders, merges, splits, births and deaths.

use crate::diagram::{CircleSet, EdgeId, UnionFind};
use crate::f2linalg::BitVec;

/// A connected piece of a cobordism between two circle sets: the source and
/// target circles it touches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Piece {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
}

/// Groups circles into pieces using edge identifications between the two
/// circle sets. Circles with no identified edge form births or deaths.
pub(crate) fn pieces(
    from: &CircleSet,
    to: &CircleSet,
    pairs: impl IntoIterator<Item = (EdgeId, EdgeId)>,
) -> Vec<Piece> {
    let nf = from.len();
    let nt = to.len();
    let mut uf = UnionFind::new(nf + nt);
    for (a, b) in pairs {
        uf.union(from.circle_of(a), nf + to.circle_of(b));
    }
    let mut by_root: Vec<Option<usize>> = vec![None; nf + nt];
    let mut out: Vec<Piece> = Vec::new();
    for i in 0..nf + nt {
        let r = uf.find(i);
        let k = *by_root[r].get_or_insert_with(|| {
            out.push(Piece::default());
            out.len() - 1
        });
        if i < nf {
            out[k].from.push(i);
        } else {
            out[k].to.push(i - nf);
        }
    }
    out
}

/// Applies the cobordism described by `pieces` to one labeling. Returns the
/// target labelings with coefficient 1.
pub(crate) fn combine_cobordism(pieces: &[Piece], labels: &BitVec, n_to: usize) -> Vec<BitVec> {
    let mut out = vec![BitVec::zeros(n_to)];
    for p in pieces {
        match (p.from.as_slice(), p.to.as_slice()) {
            ([a], [b]) => {
                if labels.get(*a) {
                    out.iter_mut().for_each(|v| v.set(*b, true));
                }
            }
            ([a1, a2], [b]) => {
                let (x1, x2) = (labels.get(*a1), labels.get(*a2));
                if x1 && x2 {
                    return Vec::new();
                }
                if x1 || x2 {
                    out.iter_mut().for_each(|v| v.set(*b, true));
                }
            }
            ([a], [b1, b2]) => {
                if labels.get(*a) {
                    out.iter_mut().for_each(|v| {
                        v.set(*b1, true);
                        v.set(*b2, true);
                    });
                } else {
                    let mut doubled = Vec::with_capacity(out.len() * 2);
                    for v in out {
                        let mut w = v.clone();
                        w.set(*b1, true);
                        doubled.push(w);
                        let mut w = v;
                        w.set(*b2, true);
                        doubled.push(w);
                    }
                    out = doubled;
                }
            }
            ([], [_]) => {}
            ([a], []) => {
                if !labels.get(*a) {
                    return Vec::new();
                }
            }
            _ => panic!("cobordism piece is not elementary: {p:?}"),
        }
    }
    out
}

/// The saddle map between two resolutions of the same diagram that differ at
/// one crossing.
pub(crate) fn saddle_between(from: &CircleSet, labels: &BitVec, to: &CircleSet) -> Vec<BitVec> {
    let ps = pieces(from, to, from.circles().iter().flatten().map(|&e| (e, e)));
    combine_cobordism(&ps, labels, to.len())
}

/// Transfers labels between resolutions of two diagrams using edge
/// identifications.
pub(crate) fn local_transfer(
    from: &CircleSet,
    labels: &BitVec,
    to: &CircleSet,
    pairs: impl IntoIterator<Item = (EdgeId, EdgeId)>,
) -> Vec<BitVec> {
    let ps = pieces(from, to, pairs);
    combine_cobordism(&ps, labels, to.len())
}
