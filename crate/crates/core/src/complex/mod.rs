//! The Khovanov chain complex over GF(2) on the cube of resolutions.
//!
//! Generators are labeled smoothings. Label bit `k` refers to circle `k` in
//! the canonical order of [`Diagram::resolve`]; a set bit means the circle is
//! labeled `x`, a clear bit means it is labeled `1`.

mod homology;
mod maps;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagram::{Alignment, CircleSet, Diagram, Smoothing};
use crate::error::{Error, Result};
use crate::f2linalg::BitVec;

pub use homology::{
    block_basis, homology_dims, homology_dims_with, is_boundary, is_boundary_with, Block,
    HomologyBasis, HomologyOptions, DEFAULT_BOUND,
};
pub(crate) use maps::{local_transfer, Piece};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledSmoothing {
    pub smoothing: Smoothing,
    pub labels: BitVec,
}

impl LabeledSmoothing {
    pub fn new(smoothing: Smoothing, labels: BitVec) -> Self {
        LabeledSmoothing { smoothing, labels }
    }

    /// Builds from 0/1 slices.
    pub fn from_bits(smoothing: &[u8], labels: &[u8]) -> Self {
        LabeledSmoothing {
            smoothing: BitVec::from_bits(smoothing),
            labels: BitVec::from_bits(labels),
        }
    }

    pub fn height(&self) -> usize {
        self.smoothing.count_ones()
    }

    /// Number of circles labeled `x`.
    pub fn n_x(&self) -> usize {
        self.labels.count_ones()
    }

    fn check(&self, d: &Diagram) -> Result<CircleSet> {
        let cs = d.resolve(&self.smoothing)?;
        if cs.len() != self.labels.len() {
            return Err(Error::ForeignGenerator(format!(
                "{} labels for {} circles",
                self.labels.len(),
                cs.len()
            )));
        }
        Ok(cs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bigrading {
    pub h: i64,
    pub q: i64,
}

impl Bigrading {
    pub fn new(h: i64, q: i64) -> Self {
        Bigrading { h, q }
    }

    pub fn shift_q(self, by: i64) -> Self {
        Bigrading::new(self.h, self.q + by)
    }
}

impl std::fmt::Display for Bigrading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.h, self.q)
    }
}

/// A chain with GF(2) coefficients: a finite set of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChainVector {
    terms: BTreeSet<LabeledSmoothing>,
}

impl ChainVector {
    pub fn zero() -> Self {
        ChainVector::default()
    }

    pub fn single(g: LabeledSmoothing) -> Self {
        let mut c = ChainVector::zero();
        c.add(g);
        c
    }

    /// Adds a generator; adding one already present cancels it.
    pub fn add(&mut self, g: LabeledSmoothing) {
        if !self.terms.remove(&g) {
            self.terms.insert(g);
        }
    }

    pub fn add_chain(&mut self, other: &ChainVector) {
        for g in &other.terms {
            self.add(g.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &LabeledSmoothing> {
        self.terms.iter()
    }

    pub fn contains(&self, g: &LabeledSmoothing) -> bool {
        self.terms.contains(g)
    }

    /// The common bigrading of all terms, `None` for the zero chain.
    pub fn bigrading(&self, d: &Diagram) -> Result<Option<Bigrading>> {
        let mut out: Option<Bigrading> = None;
        for g in &self.terms {
            let b = bigrading(d, g)?;
            match out {
                None => out = Some(b),
                Some(prev) if prev != b => {
                    return Err(Error::NotHomogeneous(format!("terms at {prev} and {b}")))
                }
                _ => {}
            }
        }
        Ok(out)
    }
}

impl FromIterator<LabeledSmoothing> for ChainVector {
    fn from_iter<I: IntoIterator<Item = LabeledSmoothing>>(iter: I) -> Self {
        let mut c = ChainVector::zero();
        for g in iter {
            c.add(g);
        }
        c
    }
}

/// Dimensions per bigrading; absent keys are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedDims(pub std::collections::BTreeMap<Bigrading, usize>);

impl BigradedDims {
    pub fn get(&self, b: Bigrading) -> usize {
        self.0.get(&b).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    /// Sorted `(h, q, dim)` triples with nonzero dim.
    pub fn triples(&self) -> Vec<(i64, i64, usize)> {
        self.0
            .iter()
            .filter(|(_, &v)| v > 0)
            .map(|(b, &v)| (b.h, b.q, v))
            .collect()
    }

    pub fn from_triples(t: &[(i64, i64, usize)]) -> Self {
        BigradedDims(
            t.iter()
                .filter(|x| x.2 > 0)
                .map(|&(h, q, v)| (Bigrading::new(h, q), v))
                .collect(),
        )
    }
}

/// Gradings from the raw counts; shared by every code path that grades.
pub(crate) fn grading_of(d: &Diagram, height: usize, n_circles: usize, n_x: usize) -> Bigrading {
    let h = height as i64 - d.n_neg() as i64;
    let v_plus = (n_circles - n_x) as i64;
    let v_minus = n_x as i64;
    Bigrading::new(h, v_plus - v_minus + h + d.writhe())
}

pub fn bigrading(d: &Diagram, g: &LabeledSmoothing) -> Result<Bigrading> {
    let cs = g.check(d)?;
    Ok(grading_of(d, g.height(), cs.len(), g.n_x()))
}

/// Calls `f` on every smoothing with exactly `k` ones among `n` bits, in
/// lexicographic order of the set positions.
pub(crate) fn for_each_smoothing_at_height(n: usize, k: usize, mut f: impl FnMut(Smoothing)) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut s = BitVec::zeros(n);
        for &i in &idx {
            s.set(i, true);
        }
        f(s);
        // Advance to the next k-subset.
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Calls `f` on every `k`-subset of `0..n` as a bit vector.
pub(crate) fn for_each_label_set(n: usize, k: usize, f: impl FnMut(Smoothing)) {
    for_each_smoothing_at_height(n, k, f)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All generators, or those at one bigrading. Ordered by height, then
/// smoothing, then labels.
pub fn enumerate_generators(d: &Diagram, filter: Option<Bigrading>) -> Vec<LabeledSmoothing> {
    let n = d.n_crossings();
    let heights: Vec<usize> = match filter {
        Some(b) => {
            let k = b.h + d.n_neg() as i64;
            if k < 0 || k > n as i64 {
                return Vec::new();
            }
            vec![k as usize]
        }
        None => (0..=n).collect(),
    };
    let mut out = Vec::new();
    for k in heights {
        for_each_smoothing_at_height(n, k, |s| {
            let cs = d.resolve_unchecked(&s);
            let m = cs.len();
            let xs: Vec<usize> = match filter {
                Some(b) => {
                    // q = m - 2 v_- + h + w  =>  v_- = (m + h + w - q) / 2
                    let twice = m as i64 + b.h + d.writhe() - b.q;
                    if twice < 0 || twice % 2 != 0 || twice / 2 > m as i64 {
                        return;
                    }
                    vec![(twice / 2) as usize]
                }
                None => (0..=m).collect(),
            };
            for nx in xs {
                for_each_label_set(m, nx, |labels| {
                    out.push(LabeledSmoothing::new(s.clone(), labels));
                });
            }
        });
    }
    out
}

/// The differential on one generator.
pub fn differential_of(d: &Diagram, g: &LabeledSmoothing) -> Result<ChainVector> {
    let from = g.check(d)?;
    let mut out = ChainVector::zero();
    for i in 0..d.n_crossings() {
        if g.smoothing.get(i) {
            continue;
        }
        let mut s = g.smoothing.clone();
        s.set(i, true);
        let to = d.resolve_unchecked(&s);
        for labels in maps::saddle_between(&from, &g.labels, &to) {
            out.add(LabeledSmoothing::new(s.clone(), labels));
        }
    }
    Ok(out)
}

pub fn apply_differential(d: &Diagram, c: &ChainVector) -> Result<ChainVector> {
    let mut out = ChainVector::zero();
    for g in c.terms() {
        out.add_chain(&differential_of(d, g)?);
    }
    Ok(out)
}

/// Local cycle criterion: every 0-resolved crossing, when flipped, merges two
/// distinct circles that are both labeled `x`.
pub fn is_cycle_local(d: &Diagram, g: &LabeledSmoothing) -> Result<bool> {
    let cs = g.check(d)?;
    for (i, c) in d.crossings().iter().enumerate() {
        if g.smoothing.get(i) {
            continue;
        }
        let a = cs.circle_of(c.edges[0]);
        let b = cs.circle_of(c.edges[2]);
        if a == b || !g.labels.get(a) || !g.labels.get(b) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_cycle(d: &Diagram, c: &ChainVector) -> Result<bool> {
    Ok(apply_differential(d, c)?.is_zero())
}

/// Carries a chain on `from` across an isomorphism onto `to`.
pub fn relabel_chain(
    from: &Diagram,
    to: &Diagram,
    al: &Alignment,
    c: &ChainVector,
) -> Result<ChainVector> {
    let mut out = ChainVector::zero();
    for g in c.terms() {
        let mut s = Smoothing::zeros(to.n_crossings());
        for (i, &j) in al.crossings.iter().enumerate() {
            s.set(j, g.smoothing.get(i));
        }
        let src = from.resolve(&g.smoothing)?;
        let dst = to.resolve(&s)?;
        let mut labels = BitVec::zeros(dst.len());
        for k in 0..src.len() {
            let e = src.circle(k)[0];
            labels.set(dst.circle_of(al.edge(e)), g.labels.get(k));
        }
        out.add(LabeledSmoothing::new(s, labels));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::examples::*;

    #[test]
    fn generator_counts() {
        assert_eq!(enumerate_generators(&Diagram::unknot(), None).len(), 2);
        assert_eq!(enumerate_generators(&positive_kink(), None).len(), 6);
        assert_eq!(enumerate_generators(&positive_hopf(), None).len(), 12);
    }

    #[test]
    fn filtered_enumeration_partitions_the_full_list() {
        let d = left_trefoil();
        let all = enumerate_generators(&d, None);
        let mut grades: BTreeSet<Bigrading> = BTreeSet::new();
        for g in &all {
            grades.insert(bigrading(&d, g).unwrap());
        }
        let mut total = 0;
        for b in grades {
            let part = enumerate_generators(&d, Some(b));
            assert!(part.iter().all(|g| bigrading(&d, g).unwrap() == b));
            total += part.len();
        }
        assert_eq!(total, all.len());
    }

    #[test]
    fn unknot_and_hopf_gradings() {
        let u = Diagram::unknot();
        let one = LabeledSmoothing::from_bits(&[], &[0]);
        let x = LabeledSmoothing::from_bits(&[], &[1]);
        assert_eq!(bigrading(&u, &one).unwrap(), Bigrading::new(0, 1));
        assert_eq!(bigrading(&u, &x).unwrap(), Bigrading::new(0, -1));
        let h = positive_hopf();
        let g = LabeledSmoothing::from_bits(&[1, 1], &[0, 0]);
        assert_eq!(bigrading(&h, &g).unwrap(), Bigrading::new(2, 6));
    }

    #[test]
    fn kink_differential() {
        let k = positive_kink();
        let xx = LabeledSmoothing::from_bits(&[0], &[1, 1]);
        assert!(differential_of(&k, &xx).unwrap().is_zero());
        assert!(is_cycle_local(&k, &xx).unwrap());
        let one_x = LabeledSmoothing::from_bits(&[0], &[0, 1]);
        let d = differential_of(&k, &one_x).unwrap();
        assert_eq!(
            d,
            ChainVector::single(LabeledSmoothing::from_bits(&[1], &[1]))
        );
        assert!(!is_cycle_local(&k, &one_x).unwrap());
    }

    #[test]
    fn label_length_mismatch_is_an_error() {
        let g = LabeledSmoothing::from_bits(&[0], &[1]);
        assert!(bigrading(&positive_kink(), &g).is_err());
    }

    #[test]
    fn subsets_enumerate_binomially() {
        for n in 0..7 {
            for k in 0..=n {
                let mut count = 0;
                for_each_smoothing_at_height(n, k, |s| {
                    assert_eq!(s.count_ones(), k);
                    count += 1;
                });
                assert_eq!(count as u128, binomial(n, k), "n={n} k={k}");
            }
        }
    }
}
