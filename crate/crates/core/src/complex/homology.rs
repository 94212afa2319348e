//! Homology per (h,q) block.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::maps::{combine_cobordism, pieces};
use super::{
    apply_differential, binomial, differential_of, enumerate_generators, for_each_label_set,
    grading_of, BigradedDims, Bigrading, ChainVector, LabeledSmoothing,
};
use crate::diagram::{CircleSet, Diagram};
use crate::error::{Error, Result};
use crate::f2linalg::{kernel_basis, rank, solve, BitVec, F2Matrix, SpanBasis};

/// Default crossing bound for full homology, and log2 of the smoothing-count
/// bound for single blocks.
pub const DEFAULT_BOUND: usize = 14;

/// Target smoothing of one cube edge and the pieces of its map.
type EdgePieces = (u32, Vec<super::Piece>);

#[derive(Clone, Copy, Debug)]
pub struct HomologyOptions {
    pub bound: usize,
    pub parallel: bool,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            bound: DEFAULT_BOUND,
            parallel: true,
        }
    }
}

pub fn homology_dims(d: &Diagram) -> Result<BigradedDims> {
    homology_dims_with(d, &HomologyOptions::default())
}

/// Full bigraded homology. Each block's rank is computed independently.
pub fn homology_dims_with(d: &Diagram, opts: &HomologyOptions) -> Result<BigradedDims> {
    let n = d.n_crossings();
    if n > opts.bound || n > 30 {
        return Err(Error::Infeasible(format!(
            "{n} crossings exceeds the bound of {}",
            opts.bound.min(30)
        )));
    }
    let cube = Cube::new(d);
    // Generators per bigrading as (smoothing mask, label mask).
    let mut blocks: HashMap<Bigrading, Vec<(u32, BitVec)>> = HashMap::new();
    for (mask, cs) in cube.circles.iter().enumerate() {
        let k = (mask as u32).count_ones() as usize;
        let m = cs.len();
        for nx in 0..=m {
            let b = grading_of(d, k, m, nx);
            let entry = blocks.entry(b).or_default();
            for_each_label_set(m, nx, |l| entry.push((mask as u32, l)));
        }
    }
    let gradings: Vec<Bigrading> = {
        let mut v: Vec<Bigrading> = blocks.keys().copied().collect();
        v.sort();
        v
    };
    let rank_of = |b: &Bigrading| -> (Bigrading, usize) {
        let target = Bigrading::new(b.h + 1, b.q);
        let (Some(src), Some(dst)) = (blocks.get(b), blocks.get(&target)) else {
            return (*b, 0);
        };
        (*b, rank(&cube.block_matrix(src, dst)))
    };
    let ranks: HashMap<Bigrading, usize> = if opts.parallel {
        gradings.par_iter().map(rank_of).collect()
    } else {
        gradings.iter().map(rank_of).collect()
    };
    let mut out = BigradedDims::default();
    for b in gradings {
        let dim = blocks[&b].len()
            - ranks.get(&b).copied().unwrap_or(0)
            - ranks
                .get(&Bigrading::new(b.h - 1, b.q))
                .copied()
                .unwrap_or(0);
        if dim > 0 {
            out.0.insert(b, dim);
        }
    }
    Ok(out)
}

/// Resolutions of every smoothing, indexed by bit mask.
struct Cube {
    n: usize,
    circles: Vec<CircleSet>,
}

impl Cube {
    fn new(d: &Diagram) -> Self {
        let n = d.n_crossings();
        let circles = (0..1usize << n)
            .into_par_iter()
            .map(|mask| d.resolve_unchecked(&mask_bits(n, mask as u32)))
            .collect();
        Cube { n, circles }
    }

    fn block_matrix(&self, src: &[(u32, BitVec)], dst: &[(u32, BitVec)]) -> F2Matrix {
        let index: HashMap<(u32, &BitVec), usize> = dst
            .iter()
            .enumerate()
            .map(|(i, (s, l))| ((*s, l), i))
            .collect();
        let mut m = F2Matrix::zeros(dst.len(), src.len());
        let mut cached: Option<(u32, Vec<EdgePieces>)> = None;
        for (j, (s, l)) in src.iter().enumerate() {
            if cached.as_ref().is_none_or(|c| c.0 != *s) {
                let from = &self.circles[*s as usize];
                let edges: Vec<EdgePieces> = (0..self.n)
                    .filter(|i| s & (1 << i) == 0)
                    .map(|i| {
                        let t = s | (1 << i);
                        let to = &self.circles[t as usize];
                        let ps = pieces(from, to, from.circles().iter().flatten().map(|&e| (e, e)));
                        (t, ps)
                    })
                    .collect();
                cached = Some((*s, edges));
            }
            for (t, ps) in &cached.as_ref().unwrap().1 {
                let n_to = self.circles[*t as usize].len();
                for labels in combine_cobordism(ps, l, n_to) {
                    let i = index[&(*t, &labels)];
                    m.flip(i, j);
                }
            }
        }
        m
    }
}

fn mask_bits(n: usize, mask: u32) -> BitVec {
    let mut s = BitVec::zeros(n);
    for i in 0..n {
        if mask & (1 << i) != 0 {
            s.set(i, true);
        }
    }
    s
}

/// Generators of one bigrading with an index.
#[derive(Clone, Debug)]
pub struct Block {
    pub grading: Bigrading,
    pub gens: Vec<LabeledSmoothing>,
    index: HashMap<LabeledSmoothing, usize>,
}

impl Block {
    /// Enumerates the block, failing if it spans more than `2^bound`
    /// smoothings.
    pub fn new(d: &Diagram, grading: Bigrading, bound: usize) -> Result<Self> {
        let n = d.n_crossings();
        let k = grading.h + d.n_neg() as i64;
        if k >= 0 && k <= n as i64 {
            let count = binomial(n, k as usize);
            if count > 1u128 << bound.min(100) {
                return Err(Error::Infeasible(format!(
                    "block {grading} spans {count} smoothings, bound is 2^{bound}"
                )));
            }
        }
        let gens = enumerate_generators(d, Some(grading));
        let index = gens
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        Ok(Block {
            grading,
            gens,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, g: &LabeledSmoothing) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Coordinates of a chain supported in this block.
    pub fn coords(&self, c: &ChainVector) -> Result<BitVec> {
        let mut v = BitVec::zeros(self.len());
        for g in c.terms() {
            let i = self.index_of(g).ok_or_else(|| {
                Error::NotHomogeneous(format!("term outside block {}", self.grading))
            })?;
            v.flip(i);
        }
        Ok(v)
    }

    pub fn chain(&self, v: &BitVec) -> ChainVector {
        v.ones().map(|i| self.gens[i].clone()).collect()
    }
}

/// A basis of homology at one bigrading: cycle representatives that are
/// independent modulo boundaries.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub block: Block,
    pub reps: Vec<BitVec>,
    n_boundary: usize,
    span: SpanBasis,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn rep_chain(&self, k: usize) -> ChainVector {
        self.block.chain(&self.reps[k])
    }

    /// Class of a cycle in the representative basis.
    pub fn class_of(&self, c: &ChainVector) -> Result<BitVec> {
        let v = self.block.coords(c)?;
        let comb = self.span.coordinates(&v).ok_or(Error::NotACycle)?;
        let mut out = BitVec::zeros(self.reps.len());
        for i in comb.ones().filter(|&i| i >= self.n_boundary) {
            out.set(i - self.n_boundary, true);
        }
        Ok(out)
    }
}

/// Computes a homology basis at `b`.
pub fn block_basis(d: &Diagram, b: Bigrading, bound: usize) -> Result<HomologyBasis> {
    let block = Block::new(d, b, bound)?;
    let next = Block::new(d, Bigrading::new(b.h + 1, b.q), bound)?;
    let prev = Block::new(d, Bigrading::new(b.h - 1, b.q), bound)?;
    let mut d_out = F2Matrix::zeros(next.len(), block.len());
    for (j, g) in block.gens.iter().enumerate() {
        for t in differential_of(d, g)?.terms() {
            let i = next.index_of(t).expect("differential preserves q");
            d_out.flip(i, j);
        }
    }
    let cycles = kernel_basis(&d_out);
    let mut span = SpanBasis::new(block.len());
    for g in &prev.gens {
        let v = block.coords(&differential_of(d, g)?)?;
        span.insert(&v);
    }
    let n_boundary = span.dim();
    let mut reps = Vec::new();
    for z in cycles {
        if span.insert(&z) {
            reps.push(z);
        }
    }
    Ok(HomologyBasis {
        block,
        reps,
        n_boundary,
        span,
    })
}

pub fn is_boundary(d: &Diagram, c: &ChainVector) -> Result<bool> {
    is_boundary_with(d, c, DEFAULT_BOUND)
}

/// Decides whether a cycle is a boundary by solving `d x = c` on the block
/// below it.
pub fn is_boundary_with(d: &Diagram, c: &ChainVector, bound: usize) -> Result<bool> {
    if !apply_differential(d, c)?.is_zero() {
        return Err(Error::NotACycle);
    }
    let Some(b) = c.bigrading(d)? else {
        return Ok(true);
    };
    let prev = Block::new(d, Bigrading::new(b.h - 1, b.q), bound)?;
    let mut rows: Vec<LabeledSmoothing> = Vec::new();
    let mut row_of: HashMap<LabeledSmoothing, usize> = HashMap::new();
    let mut cols: Vec<BTreeSet<usize>> = Vec::with_capacity(prev.len());
    let mut intern = |g: &LabeledSmoothing, rows: &mut Vec<LabeledSmoothing>| -> usize {
        *row_of.entry(g.clone()).or_insert_with(|| {
            rows.push(g.clone());
            rows.len() - 1
        })
    };
    for g in &prev.gens {
        let img = differential_of(d, g)?;
        cols.push(img.terms().map(|t| intern(t, &mut rows)).collect());
    }
    let target: Vec<usize> = c.terms().map(|t| intern(t, &mut rows)).collect();
    let mut a = F2Matrix::zeros(rows.len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        for &i in col {
            a.set(i, j, true);
        }
    }
    let mut rhs = BitVec::zeros(rows.len());
    for i in target {
        rhs.set(i, true);
    }
    Ok(solve(&a, &rhs)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::examples::*;

    fn dims(d: &Diagram) -> Vec<(i64, i64, usize)> {
        homology_dims(d).unwrap().triples()
    }

    #[test]
    fn unknot_and_kinks() {
        let expect = vec![(0, -1, 1), (0, 1, 1)];
        assert_eq!(dims(&Diagram::unknot()), expect);
        assert_eq!(dims(&positive_kink()), expect);
        assert_eq!(dims(&negative_kink()), expect);
    }

    #[test]
    fn hopf_links() {
        assert_eq!(
            dims(&positive_hopf()),
            vec![(0, 0, 1), (0, 2, 1), (2, 4, 1), (2, 6, 1)]
        );
        assert_eq!(
            dims(&negative_hopf()),
            vec![(-2, -6, 1), (-2, -4, 1), (0, -2, 1), (0, 0, 1)]
        );
    }

    #[test]
    fn left_trefoil_dims() {
        // Integral 2-torsion at (-2,-7) shows up twice over GF(2).
        assert_eq!(
            dims(&left_trefoil()),
            vec![
                (-3, -9, 1),
                (-3, -7, 1),
                (-2, -7, 1),
                (-2, -5, 1),
                (0, -3, 1),
                (0, -1, 1)
            ]
        );
    }

    #[test]
    fn bound_is_enforced() {
        let opts = HomologyOptions {
            bound: 1,
            parallel: false,
        };
        assert!(homology_dims_with(&positive_hopf(), &opts)
            .unwrap_err()
            .is_infeasible());
    }

    #[test]
    fn basis_matches_dims() {
        let d = left_trefoil();
        let all = homology_dims(&d).unwrap();
        for (b, &dim) in &all.0 {
            assert_eq!(block_basis(&d, *b, DEFAULT_BOUND).unwrap().dim(), dim);
        }
    }

    #[test]
    fn boundaries_and_minimal_height_cycles() {
        let d = positive_hopf();
        assert!(is_boundary(&d, &ChainVector::zero()).unwrap());
        let g = LabeledSmoothing::from_bits(&[0, 0], &[0, 1]);
        let dg = differential_of(&d, &g).unwrap();
        assert!(!dg.is_zero());
        assert!(is_boundary(&d, &dg).unwrap());
        // All-0 cycle: both circles labeled x.
        let z = ChainVector::single(LabeledSmoothing::from_bits(&[0, 0], &[1, 1]));
        assert!(!is_boundary(&d, &z).unwrap());
        let not_cycle = ChainVector::single(g);
        assert!(matches!(is_boundary(&d, &not_cycle), Err(Error::NotACycle)));
    }
}
