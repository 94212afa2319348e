//! A deliberately naive Khovanov complex over GF(2): every generator of the
//! full cube, Frobenius multiplication and comultiplication spelled out, and
//! dense elimination on `u64` words. Shares nothing with the library except
//! the PD input and the convention that circles are numbered by their
//! smallest edge id.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use endkh::{Bigrading, ChainVector, Diagram, LabeledSmoothing};

/// `(smoothing bits, circle labels)`; label `true` is `x`.
pub type Gen = (Vec<bool>, Vec<bool>);

pub struct Oracle {
    crossings: Vec<([usize; 4], i64)>,
    edges: Vec<usize>,
    n_neg: i64,
    n_pos: i64,
}

impl Oracle {
    pub fn new(d: &Diagram) -> Self {
        let crossings: Vec<([usize; 4], i64)> = d
            .crossings()
            .iter()
            .map(|c| (c.edges.map(|e| e as usize), c.sign.as_i64()))
            .collect();
        let mut edges: BTreeSet<usize> = crossings.iter().flat_map(|c| c.0).collect();
        edges.extend(d.free_circles().iter().map(|&e| e as usize));
        let n_neg = crossings.iter().filter(|c| c.1 < 0).count() as i64;
        Oracle {
            n_pos: crossings.len() as i64 - n_neg,
            crossings,
            edges: edges.into_iter().collect(),
            n_neg,
        }
    }

    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    /// Circle index of every edge, circles numbered by smallest edge.
    pub fn circles(&self, s: &[bool]) -> (HashMap<usize, usize>, usize) {
        let mut parent: HashMap<usize, usize> = self.edges.iter().map(|&e| (e, e)).collect();
        fn root(p: &mut HashMap<usize, usize>, mut x: usize) -> usize {
            while p[&x] != x {
                x = p[&x];
            }
            x
        }
        for (i, (e, _)) in self.crossings.iter().enumerate() {
            // 0-smoothing joins slots (0,1),(2,3); 1-smoothing joins (0,3),(1,2).
            let pairs = if s[i] {
                [(0, 3), (1, 2)]
            } else {
                [(0, 1), (2, 3)]
            };
            for (a, b) in pairs {
                let (ra, rb) = (root(&mut parent, e[a]), root(&mut parent, e[b]));
                if ra != rb {
                    parent.insert(ra.max(rb), ra.min(rb));
                }
            }
        }
        let mut index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut of = HashMap::new();
        for &e in &self.edges {
            let r = root(&mut parent, e);
            let next = index.len();
            let k = *index.entry(r).or_insert(next);
            of.insert(e, k);
        }
        (of, index.len())
    }

    pub fn grading(&self, g: &Gen) -> (i64, i64) {
        let h = g.0.iter().filter(|&&b| b).count() as i64 - self.n_neg;
        let xs = g.1.iter().filter(|&&b| b).count() as i64;
        let ones = g.1.len() as i64 - xs;
        (h, ones - xs + h + self.n_pos - self.n_neg)
    }

    /// Differential of one generator, as a set (GF(2) sum).
    pub fn d(&self, g: &Gen) -> BTreeSet<Gen> {
        let (src, _) = self.circles(&g.0);
        let mut out: BTreeSet<Gen> = BTreeSet::new();
        let mut toggle = |t: Gen| {
            if !out.remove(&t) {
                out.insert(t);
            }
        };
        for i in 0..self.n() {
            if g.0[i] {
                continue;
            }
            let mut s = g.0.clone();
            s[i] = true;
            let (dst, m) = self.circles(&s);
            let e = self.crossings[i].0;
            // The two arcs through crossing i in the 0-smoothing.
            let (ca, cb) = (src[&e[0]], src[&e[2]]);
            // Carry labels of circles away from the crossing.
            let base = |fixed: &[(usize, bool)]| -> Vec<bool> {
                let mut l = vec![false; m];
                for (&edge, &k) in &src {
                    if k != ca && k != cb {
                        l[dst[&edge]] = g.1[k];
                    }
                }
                for &(k, v) in fixed {
                    l[k] = v;
                }
                l
            };
            if ca != cb {
                // Merge: 1*1 = 1, 1*x = x, x*x = 0.
                let (la, lb) = (g.1[ca], g.1[cb]);
                if la && lb {
                    continue;
                }
                let k = dst[&e[0]];
                toggle((s.clone(), base(&[(k, la || lb)])));
            } else {
                // Split: D(1) = 1(x)x + x(x)1, D(x) = x(x)x.
                let (k1, k2) = (dst[&e[0]], dst[&e[2]]);
                if g.1[ca] {
                    toggle((s.clone(), base(&[(k1, true), (k2, true)])));
                } else {
                    toggle((s.clone(), base(&[(k1, true), (k2, false)])));
                    toggle((s.clone(), base(&[(k1, false), (k2, true)])));
                }
            }
        }
        out
    }

    pub fn generators(&self) -> Vec<Gen> {
        let n = self.n();
        let mut out = Vec::new();
        for mask in 0u64..(1 << n) {
            let s: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let (_, m) = self.circles(&s);
            for lm in 0u64..(1 << m) {
                out.push((s.clone(), (0..m).map(|k| lm >> k & 1 == 1).collect()));
            }
        }
        out
    }

    /// Poincare table of the homology, by dense elimination of every
    /// differential `C^{h,q} -> C^{h+1,q}`.
    pub fn homology(&self) -> BTreeMap<(i64, i64), usize> {
        let mut by: BTreeMap<(i64, i64), Vec<Gen>> = BTreeMap::new();
        for g in self.generators() {
            by.entry(self.grading(&g)).or_default().push(g);
        }
        let mut ranks: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for (&(h, q), src) in &by {
            let Some(dst) = by.get(&(h + 1, q)) else {
                continue;
            };
            let index: HashMap<&Gen, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
            let words = dst.len().div_ceil(64);
            let rows: Vec<Vec<u64>> = src
                .iter()
                .map(|g| {
                    let mut row = vec![0u64; words];
                    for t in self.d(g) {
                        let j = index[&t];
                        row[j / 64] ^= 1 << (j % 64);
                    }
                    row
                })
                .collect();
            ranks.insert((h, q), dense_rank(rows, dst.len()));
        }
        let mut out = BTreeMap::new();
        for (&(h, q), gens) in &by {
            let out_rank = ranks.get(&(h, q)).copied().unwrap_or(0);
            let in_rank = ranks.get(&(h - 1, q)).copied().unwrap_or(0);
            let dim = gens.len() - out_rank - in_rank;
            if dim > 0 {
                out.insert((h, q), dim);
            }
        }
        out
    }

    pub fn d_chain(&self, c: &ChainVector) -> ChainVector {
        let mut acc: BTreeSet<Gen> = BTreeSet::new();
        for g in c.terms() {
            for t in self.d(&to_gen(g)) {
                if !acc.remove(&t) {
                    acc.insert(t);
                }
            }
        }
        acc.iter().map(from_gen).collect()
    }
}

fn dense_rank(mut rows: Vec<Vec<u64>>, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] & bit != 0 {
                for (a, b) in row.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn to_gen(g: &LabeledSmoothing) -> Gen {
    (g.smoothing.to_bools(), g.labels.to_bools())
}

pub fn from_gen(g: &Gen) -> LabeledSmoothing {
    LabeledSmoothing::new(
        endkh::BitVec::from_bools(&g.0),
        endkh::BitVec::from_bools(&g.1),
    )
}

pub fn as_table(t: &BTreeMap<(i64, i64), usize>) -> endkh::BigradedDims {
    endkh::BigradedDims(
        t.iter()
            .map(|(&(h, q), &v)| (Bigrading::new(h, q), v))
            .collect(),
    )
}
