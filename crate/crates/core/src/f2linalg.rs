//! Dense linear algebra over GF(2) on bit-packed rows.
//!
//! Elimination always pivots on the leftmost available column and, within
//! that column, the topmost unused row. Results are therefore deterministic
//! for a given matrix.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Fixed-length bit vector. Bits past `len` are kept zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds from 0/1 integers; any nonzero value counts as 1.
    pub fn from_bits<T: Copy + Into<u64>>(bits: &[T]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b.into() != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % WORD);
        if b {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, b);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ^= other`. Lengths must agree.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Index of the lowest set bit at or after `from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / WORD;
        let mut w = self.words[wi] & (!0u64 << (from % WORD));
        loop {
            if w != 0 {
                let i = wi * WORD + w.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        let mut next = self.next_one(0);
        std::iter::from_fn(move || {
            let cur = next?;
            next = self.next_one(cur + 1);
            Some(cur)
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from explicit rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row of length {} in a matrix with {} columns",
                r.len(),
                cols
            )));
        }
        Ok(F2Matrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        F2Matrix::from_rows(cols, rows.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[BitVec]) -> Result<Self> {
        let mut m = F2Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Dimension(format!(
                    "column of length {} in a matrix with {} rows",
                    c.len(),
                    rows
                )));
            }
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.data[i].set(j, b)
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i].flip(j)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut c = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for k in r.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    /// Reduces in place to reduced row echelon form and returns pivot columns
    /// in row order.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.data[i].get(c)) else {
                continue;
            };
            self.data.swap(r, p);
            let pivot = self.data[r].clone();
            for i in 0..self.rows {
                if i != r && self.data[i].get(c) {
                    self.data[i].xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

pub fn rank(a: &F2Matrix) -> usize {
    // Forward elimination only; cheaper than a full rref.
    let mut rows: Vec<BitVec> = a.data.clone();
    let mut r = 0;
    for c in 0..a.cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot = &head[r];
        for row in tail.iter_mut() {
            if row.get(c) {
                row.xor_assign(pivot);
            }
        }
        r += 1;
    }
    r
}

/// Returns some `x` with `a x = b`, or `None` when `b` is outside the column
/// space. Free variables are set to zero.
pub fn solve(a: &F2Matrix, b: &BitVec) -> Result<Option<BitVec>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} against {} rows",
            b.len(),
            a.rows
        )));
    }
    let mut aug = F2Matrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in a.data[i].ones() {
            aug.set(i, j, true);
        }
        if b.get(i) {
            aug.set(i, a.cols, true);
        }
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(a.cols);
    for (r, &c) in pivots.iter().enumerate() {
        if aug.get(r, a.cols) {
            x.set(c, true);
        }
    }
    Ok(Some(x))
}

/// Basis of the null space, one vector per free column in increasing order.
pub fn kernel_basis(a: &F2Matrix) -> Vec<BitVec> {
    let mut m = a.clone();
    let pivots = m.rref();
    let mut is_pivot = vec![false; a.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..a.cols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVec::zeros(a.cols);
        v.set(free, true);
        for (r, &c) in pivots.iter().enumerate() {
            if m.get(r, free) {
                v.set(c, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Rank of `t^m` once the rank sequence of powers has stabilized. This is the
/// dimension of the stable image, which for a constant direct or inverse
/// system of finite-dimensional spaces is the dimension of its limit.
pub fn eventual_rank(t: &F2Matrix) -> Result<usize> {
    if !t.is_square() {
        return Err(Error::Dimension(format!(
            "eventual rank of a non-square {}x{} matrix",
            t.rows, t.cols
        )));
    }
    let mut power = t.clone();
    let mut prev = rank(&power);
    // Ranks strictly decrease until stable, so at most n steps.
    for _ in 0..t.rows {
        power = power.mul(t)?;
        let r = rank(&power);
        if r == prev {
            return Ok(r);
        }
        prev = r;
    }
    Ok(prev)
}

/// Incremental echelon basis for span membership and coordinates.
///
/// Vectors are inserted in order; each inserted vector that is independent of
/// its predecessors becomes a basis element. Coordinates are reported with
/// respect to the accepted vectors in insertion order.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    // Reduced rows, each tagged with its pivot and the combination of
    // accepted vectors it represents.
    rows: Vec<(usize, BitVec, BitVec)>,
    accepted: usize,
}

impl SpanBasis {
    pub fn new(len: usize) -> Self {
        SpanBasis {
            len,
            rows: Vec::new(),
            accepted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.accepted
    }

    /// Reduces `v` against the basis, returning the remainder and the
    /// combination (over accepted vectors) that was subtracted.
    fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut rem = v.clone();
        let mut comb = BitVec::zeros(self.accepted);
        for (p, row, c) in &self.rows {
            if rem.get(*p) {
                rem.xor_assign(row);
                for k in c.ones() {
                    comb.flip(k);
                }
            }
        }
        (rem, comb)
    }

    /// Inserts `v`; returns `true` if it was independent and accepted.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let (rem, comb) = self.reduce(v);
        let Some(p) = rem.next_one(0) else {
            return false;
        };
        let k = self.accepted;
        self.accepted += 1;
        for (_, _, c) in self.rows.iter_mut() {
            c.push(false);
        }
        let mut c = comb;
        c.push(true);
        // Keep rows fully reduced so reduction order is irrelevant.
        for (_, row, rc) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&rem);
                rc.xor_assign(&c);
            }
        }
        self.rows.push((p, rem, c));
        debug_assert_eq!(k + 1, self.accepted);
        true
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coordinates of `v` over the accepted vectors, if `v` is in the span.
    pub fn coordinates(&self, v: &BitVec) -> Option<BitVec> {
        let (rem, comb) = self.reduce(v);
        rem.is_zero().then_some(comb)
    }
}
