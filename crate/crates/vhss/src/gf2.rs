//! Dense linear algebra over GF(2).
//!
//! Bit-packed row-major storage: each row occupies `words_per_row` machine
//! words, trailing bits are kept zero so that equality and serialization are
//! bit-exact.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A vector over GF(2), bit-packed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    /// Basis vector e_i of the given length.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVector::zeros(len);
        v.set(i, true);
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
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Index of the first set bit, if any.
    pub fn leading_bit(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter_bits().map(u8::from).collect()
    }

    /// Grow the vector with zero bits at the end.
    pub fn extend_zeros(&mut self, extra: usize) {
        self.len += extra;
        self.words.resize(words_for(self.len), 0);
    }

    /// Remove bit `i`, shifting the later bits down.
    pub fn remove_bit(&mut self, i: usize) {
        debug_assert!(i < self.len);
        let wi = i / WORD_BITS;
        let b = i % WORD_BITS;
        let word = self.words[wi];
        let low = word & ((1u64 << b) - 1);
        let high = if b == WORD_BITS - 1 {
            0
        } else {
            (word >> (b + 1)) << b
        };
        self.words[wi] = low | high;
        for k in wi + 1..self.words.len() {
            self.words[k - 1] |= (self.words[k] & 1) << (WORD_BITS - 1);
            self.words[k] >>= 1;
        }
        self.len -= 1;
        self.words.truncate(words_for(self.len));
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2), row-major and bit-packed.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Self {
        let cols = rows.first().map_or(0, BitVector::len);
        assert!(rows.iter().all(|r| r.len() == cols));
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_bit_rows(rows: &[&[u8]]) -> Self {
        BitMatrix::from_rows(rows.iter().map(|r| BitVector::from_bits(r)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.data.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v);
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols);
        self.data.push(row);
        self.rows += 1;
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix-vector product over GF(2).
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(v) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form. Returns (rref, pivot columns, rank).
    pub fn rref(&self) -> (BitMatrix, Vec<usize>, usize) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row >= m.rows {
                break;
            }
            let found = (pivot_row..m.rows).find(|&r| m.get(r, col));
            let Some(r) = found else { continue };
            m.data.swap(pivot_row, r);
            let pivot = m.data[pivot_row].clone();
            for (i, row) in m.data.iter_mut().enumerate() {
                if i != pivot_row && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        let rank = pivots.len();
        (m, pivots, rank)
    }

    pub fn rank(&self) -> usize {
        self.rref().2
    }

    /// Basis for {x : m x = 0}, one basis vector per row of the result.
    pub fn null_space(&self) -> BitMatrix {
        let (rref, pivots, rank) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(self.cols - rank);
        for &f in &free {
            let mut x = BitVector::zeros(self.cols);
            x.set(f, true);
            for (pr, &pc) in pivots.iter().enumerate() {
                if rref.get(pr, f) {
                    x.set(pc, true);
                }
            }
            basis.push(x);
        }
        let mut m = BitMatrix::from_rows(basis);
        m.cols = self.cols;
        m
    }

    /// True iff `v` is a GF(2) combination of the rows.
    pub fn in_row_space(&self, v: &BitVector) -> Result<bool, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let (rref, pivots, _) = self.rref();
        let mut rem = v.clone();
        for (r, &c) in pivots.iter().enumerate() {
            if rem.get(c) {
                rem.xor_assign(rref.row(r));
            }
        }
        Ok(rem.is_zero())
    }

    /// Reduce `v` against the rows (in rref), returning the coset remainder.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let (rref, pivots, _) = self.rref();
        let mut rem = v.clone();
        for (r, &c) in pivots.iter().enumerate() {
            if rem.get(c) {
                rem.xor_assign(rref.row(r));
            }
        }
        rem
    }

    /// Solve `xᵀ·self = target` for a row-combination `x` of `self`'s rows
    /// restricted to the given columns; i.e. find a row-space element agreeing
    /// with `target` on `cols`. Returns the full-length row-space element.
    pub fn row_space_element_matching(
        &self,
        target: &BitVector,
        cols: &[usize],
    ) -> Option<BitVector> {
        // Build the system over the selected columns: A x = b where A's
        // columns are self's rows restricted to `cols`.
        let k = self.rows;
        let mut aug = BitMatrix::zeros(cols.len(), k + 1);
        for (ri, &c) in cols.iter().enumerate() {
            for j in 0..k {
                aug.set(ri, j, self.get(j, c));
            }
            aug.set(ri, k, target.get(c));
        }
        let (rref, pivots, _) = aug.rref();
        if pivots.contains(&k) {
            return None; // inconsistent
        }
        let mut x = BitVector::zeros(k);
        for (r, &c) in pivots.iter().enumerate() {
            if rref.get(r, k) {
                x.set(c, true);
            }
        }
        let mut out = BitVector::zeros(self.cols);
        for j in 0..k {
            if x.get(j) {
                out.xor_assign(self.row(j));
            }
        }
        Some(out)
    }

    /// Solve `self · x = b`. Returns any solution, or None if inconsistent.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert_eq!(b.len(), self.rows);
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, self.cols, b.get(r));
        }
        let (rref, pivots, _) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            if rref.get(r, self.cols) {
                x.set(c, true);
            }
        }
        Some(x)
    }

    /// Fixture text format: first line "rows cols", then rows of '0'/'1'.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for row in &self.data {
            for b in row.iter_bits() {
                s.push(if b { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<BitMatrix, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Gf2Error::Parse("bad header".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Gf2Error::Parse("bad header".into()))?;
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::Parse(format!("missing row {r}")))?;
            let line = line.trim();
            if line.len() != cols {
                return Err(Gf2Error::Parse(format!(
                    "row {r} has {} entries, expected {cols}",
                    line.len()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => return Err(Gf2Error::Parse(format!("bad character {ch:?}"))),
                }
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rref_identity() {
        let m = BitMatrix::identity(3);
        let (r, pivots, rank) = m.rref();
        assert_eq!(r, m);
        assert_eq!(pivots, vec![0, 1, 2]);
        assert_eq!(rank, 3);
    }

    #[test]
    fn rref_zero() {
        let m = BitMatrix::zeros(2, 4);
        let (r, pivots, rank) = m.rref();
        assert_eq!(r, m);
        assert!(pivots.is_empty());
        assert_eq!(rank, 0);
    }

    #[test]
    fn rref_dependent_rows() {
        let m = BitMatrix::from_bit_rows(&[&[1, 1], &[1, 1]]);
        let (r, _, rank) = m.rref();
        assert_eq!(r, BitMatrix::from_bit_rows(&[&[1, 1], &[0, 0]]));
        assert_eq!(rank, 1);
    }

    #[test]
    fn null_space_identity_empty() {
        assert_eq!(BitMatrix::identity(3).null_space().rows(), 0);
    }

    #[test]
    fn null_space_zero_full() {
        let ns = BitMatrix::zeros(2, 3).null_space();
        assert_eq!(ns.rows(), 3);
        assert_eq!(ns.rank(), 3);
    }

    fn hamming_check() -> BitMatrix {
        // Columns are binary representations of 1..7.
        let mut h = BitMatrix::zeros(3, 7);
        for c in 0..7usize {
            let val = c + 1;
            for b in 0..3 {
                if val >> b & 1 == 1 {
                    h.set(b, c, true);
                }
            }
        }
        h
    }

    #[test]
    fn null_space_hamming() {
        let h = hamming_check();
        let ns = h.null_space();
        assert_eq!(ns.rows(), 4);
        for row in ns.row_iter() {
            assert!(h.mat_vec(row).unwrap().is_zero());
        }
    }

    #[test]
    fn in_row_space_basics() {
        let m = BitMatrix::identity(2);
        assert!(m.in_row_space(&BitVector::from_bits(&[1, 0])).unwrap());
        assert!(m.in_row_space(&BitVector::zeros(2)).unwrap());
        assert!(m.in_row_space(&BitVector::zeros(3)).is_err());
    }

    #[test]
    fn weight_one_not_in_hamming() {
        let g = hamming_check().null_space();
        for i in 0..7 {
            assert!(!g.in_row_space(&BitVector::unit(7, i)).unwrap());
        }
    }

    #[test]
    fn mat_vec_examples() {
        let z = BitMatrix::zeros(2, 3);
        assert!(z.mat_vec(&BitVector::from_bits(&[1, 1, 1])).unwrap().is_zero());
        let id = BitMatrix::identity(4);
        let v = BitVector::from_bits(&[1, 0, 1, 1]);
        assert_eq!(id.mat_vec(&v).unwrap(), v);
        // Hamming check, weight-1 error at position j reads off column j.
        let h = hamming_check();
        for j in 0..7 {
            let s = h.mat_vec(&BitVector::unit(7, j)).unwrap();
            let col: Vec<u8> = (0..3).map(|b| u8::from(h.get(b, j))).collect();
            assert_eq!(s.to_bits(), col);
        }
    }

    #[test]
    fn text_round_trip() {
        let h = hamming_check();
        let t = h.to_text();
        assert_eq!(BitMatrix::from_text(&t).unwrap(), h);
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..=16, 1usize..=16).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
                .prop_map(|rows| {
                    BitMatrix::from_rows(rows.iter().map(|r| BitVector::from_bits(r)).collect())
                })
        })
    }

    proptest! {
        #[test]
        fn rref_preserves_row_space(m in arb_matrix()) {
            let (r, _, rank) = m.rref();
            prop_assert_eq!(r.rank(), rank);
            prop_assert_eq!(m.rank(), rank);
            for row in r.row_iter() {
                prop_assert!(m.in_row_space(row).unwrap());
            }
            for row in m.row_iter() {
                prop_assert!(r.in_row_space(row).unwrap());
            }
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + m.null_space().rows(), m.cols());
            for row in m.null_space().row_iter() {
                prop_assert!(m.mat_vec(row).unwrap().is_zero());
            }
        }

        #[test]
        fn row_space_closed_under_xor(m in arb_matrix(), a in proptest::collection::vec(0u8..2, 1..=16), b in proptest::collection::vec(0u8..2, 1..=16)) {
            // Build two members of the row space from random combinations.
            let mut va = BitVector::zeros(m.cols());
            let mut vb = BitVector::zeros(m.cols());
            for (i, row) in m.row_iter().enumerate() {
                if a.get(i).copied().unwrap_or(0) == 1 { va.xor_assign(row); }
                if b.get(i).copied().unwrap_or(0) == 1 { vb.xor_assign(row); }
            }
            prop_assert!(m.in_row_space(&va).unwrap());
            prop_assert!(m.in_row_space(&vb).unwrap());
            prop_assert!(m.in_row_space(&va.xor(&vb)).unwrap());
        }
    }
}
