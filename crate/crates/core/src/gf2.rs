//! Word-packed linear algebra over GF(2).

use std::fmt;

use crate::error::{domain, Result};

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Fixed-length bit string. Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and_parity(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        BitVec::from_indices(self.len + other.len, self.ones().chain(other.ones().map(|i| i + self.len)))
    }

    /// Copy of `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        BitVec::from_indices(len, self.ones().filter(|&i| i >= start && i < start + len).map(|i| i - start))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    /// Stacks `rows`, each of length `cols`.
    pub fn from_rows<'a>(cols: usize, rows: impl IntoIterator<Item = &'a BitVec>) -> Self {
        let stride = words_for(cols);
        let mut data = Vec::new();
        let mut n = 0;
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend_from_slice(&r.words);
            n += 1;
        }
        BitMatrix { rows: n, cols, stride, data }
    }

    /// Parses rows of '0'/'1' characters; convenient for small fixtures.
    pub fn from_strs(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let vecs: Vec<BitVec> =
            rows.iter().map(|r| BitVec::from_bools(&r.chars().map(|c| c == '1').collect::<Vec<_>>())).collect();
        Self::from_rows(cols, &vecs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec { len: self.cols, words: self.row_words(i).to_vec() }
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.row_words(r)[c / WORD] >> (c % WORD)) & 1 == 1
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn bit(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// row[dst] ^= row[src]
    fn add_row(&mut self, dst: usize, src: usize) {
        let (s, st) = (self.stride, src * self.stride);
        for w in 0..s {
            let v = self.data[st + w];
            self.data[dst * s + w] ^= v;
        }
    }

    /// Reduced row-echelon form with zero rows dropped. Pivots are taken at the
    /// first nonzero column, from the first available row.
    pub fn rref(&self) -> BitMatrix {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m.bit(r, col)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in 0..m.rows {
                if r != rank && m.bit(r, col) {
                    m.add_row(r, rank);
                }
            }
            rank += 1;
        }
        m.rows = rank;
        m.data.truncate(rank * m.stride);
        m
    }

    pub fn rank(&self) -> usize {
        self.rref().rows
    }

    /// Pivot column of each row of a matrix already in rref.
    fn pivots(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| {
                BitVec { len: self.cols, words: self.row_words(r).to_vec() }.first_one().expect("zero row in rref")
            })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

pub fn rref(m: &BitMatrix) -> BitMatrix {
    m.rref()
}

pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// True iff the two matrices span the same row space.
pub fn row_space_equal(a: &BitMatrix, b: &BitMatrix) -> Result<bool> {
    if a.cols != b.cols {
        return domain(format!("column mismatch: {} vs {}", a.cols, b.cols));
    }
    Ok(a.rref() == b.rref())
}

/// True iff `v` lies in the row space of `m`.
pub fn in_row_space(v: &BitVec, m: &BitMatrix) -> Result<bool> {
    if v.len() != m.cols {
        return domain(format!("vector length {} does not match {} columns", v.len(), m.cols));
    }
    let r = m.rref();
    Ok(reduce_against(v, &r).is_zero())
}

/// Reduces `v` by a matrix in rref; the remainder is zero iff `v` is in its span.
pub fn reduce_against(v: &BitVec, reduced: &BitMatrix) -> BitVec {
    let mut out = v.clone();
    for (r, p) in reduced.pivots().into_iter().enumerate() {
        if out.get(p) {
            out.xor_assign(&reduced.row(r));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let id = BitMatrix::from_strs(&["100", "010", "001"]);
        assert_eq!(id.rref(), id);
        let m = BitMatrix::from_strs(&["110", "011", "101"]);
        assert_eq!(m.rref(), BitMatrix::from_strs(&["101", "011"]));
        assert_eq!(m.rank(), 2);
        let z = BitMatrix::from_strs(&["000", "000"]);
        assert_eq!(z.rref().rows(), 0);
        assert_eq!(BitMatrix::from_strs(&["000"]).rank(), 0);
    }

    #[test]
    fn rref_is_idempotent_with_increasing_pivots() {
        let m = BitMatrix::from_strs(&["0110", "1100", "1010", "0001"]);
        let r = m.rref();
        assert_eq!(r.rref(), r);
        let p = r.pivots();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn row_space_examples() {
        let m = BitMatrix::from_strs(&["1100", "0110", "0011"]);
        let perm = BitMatrix::from_strs(&["0011", "1100", "0110"]);
        assert!(row_space_equal(&m, &perm).unwrap());
        let summed = BitMatrix::from_strs(&["1100", "1010", "0011"]);
        assert!(row_space_equal(&m, &summed).unwrap());
        assert!(!row_space_equal(&BitMatrix::from_strs(&["10"]), &BitMatrix::from_strs(&["01"])).unwrap());
        assert!(row_space_equal(&BitMatrix::from_strs(&["10"]), &BitMatrix::from_strs(&["100"])).is_err());
    }

    #[test]
    fn membership_examples() {
        let m = BitMatrix::from_strs(&["110", "011"]);
        assert!(in_row_space(&BitVec::zeros(3), &m).unwrap());
        assert!(in_row_space(&m.row(1), &m).unwrap());
        assert!(in_row_space(&BitVec::from_indices(3, [0, 2]), &m).unwrap());
        let e = BitMatrix::from_strs(&["010"]);
        assert!(!in_row_space(&BitVec::from_indices(3, [0]), &e).unwrap());
        assert!(in_row_space(&BitVec::zeros(2), &e).is_err());
    }

    #[test]
    fn bits_across_word_boundary() {
        let mut v = BitVec::zeros(130);
        v.flip(0);
        v.flip(64);
        v.flip(129);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.count_ones(), 3);
        let w = v.concat(&BitVec::from_indices(3, [1]));
        assert_eq!(w.ones().collect::<Vec<_>>(), vec![0, 64, 129, 131]);
        assert_eq!(w.slice(129, 3).ones().collect::<Vec<_>>(), vec![0, 2]);
    }
}
