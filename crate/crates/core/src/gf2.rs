//! Dense linear algebra over the two-element field.
//!
//! Vectors are bit-packed into `u64` words and rows are eliminated with
//! word-wide XOR. Pivoting always takes the leftmost nonzero column and the
//! topmost available row, so every result is a deterministic function of the
//! input.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over F₂ of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Parse(format!("bad bit {other:?} in {s:?}"))),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    /// `self += other`. Panics on a length mismatch.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Copies bits `range` into a new vector.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(start <= end && end <= self.len);
        BitVector::from_indices(
            end - start,
            self.ones()
                .filter(|&i| i >= start && i < end)
                .map(|i| i - start),
        )
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl std::ops::Add for &BitVector {
    type Output = BitVector;

    fn add(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl std::ops::AddAssign<&BitVector> for BitVector {
    fn add_assign(&mut self, rhs: &BitVector) {
        self.xor_assign(rhs);
    }
}

/// Dense row-major matrix over F₂.
#[derive(Clone, PartialEq, Eq, Hash)]
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
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds a `rows × columns.len()` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: col.len(),
                });
            }
            for i in col.ones() {
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

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok(BitVector::from_indices(
            self.rows,
            (0..self.rows).filter(|&r| self.data[r].dot(v)),
        ))
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if other.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    /// Reduced row echelon form restricted to the first `pivot_cols` columns.
    fn rref(mut self, pivot_cols: usize) -> (BitMatrix, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for c in 0..pivot_cols {
            if next_row == self.rows {
                break;
            }
            let Some(p) = (next_row..self.rows).find(|&r| self.data[r].get(c)) else {
                continue;
            };
            self.data.swap(next_row, p);
            let pivot_row = self.data[next_row].clone();
            for r in 0..self.rows {
                if r != next_row && self.data[r].get(c) {
                    self.data[r].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            next_row += 1;
        }
        (self, pivots)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    let cols = m.cols;
    m.clone().rref(cols).1.len()
}

/// Basis of the null space `{v : Mv = 0}`, one vector per free column in
/// increasing column order.
pub fn kernel_basis(m: &BitMatrix) -> Vec<BitVector> {
    let cols = m.cols;
    let (reduced, pivots) = m.clone().rref(cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitVector::unit(cols, free);
            for (row, &p) in pivots.iter().enumerate() {
                if reduced.get(row, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Some `x` with `Mx = v`, or `None` when `v` is outside the column span.
pub fn solve(m: &BitMatrix, v: &BitVector) -> Result<Option<BitVector>> {
    if v.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            got: v.len(),
        });
    }
    let aug_rows = m
        .data
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut extended = row.concat(&BitVector::zeros(1));
            extended.set(m.cols, v.get(r));
            extended
        })
        .collect();
    let augmented = BitMatrix::from_rows(m.cols + 1, aug_rows)?;
    let (reduced, pivots) = augmented.rref(m.cols);
    if (pivots.len()..m.rows).any(|r| reduced.get(r, m.cols)) {
        return Ok(None);
    }
    let mut x = BitVector::zeros(m.cols);
    for (row, &p) in pivots.iter().enumerate() {
        if reduced.get(row, m.cols) {
            x.set(p, true);
        }
    }
    Ok(Some(x))
}

pub fn in_span(vectors: &[BitVector], v: &BitVector) -> Result<bool> {
    let mut basis = SpanBasis::new(v.len(), vectors.len());
    for w in vectors {
        basis.insert(w)?;
    }
    basis.contains(v)
}

/// Incrementally built echelon basis that remembers how each stored vector
/// is expressed through the accepted generators.
///
/// Accepted generators are numbered in insertion order; [`SpanBasis::reduce`]
/// returns a combination of them together with the residual.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    len: usize,
    capacity: usize,
    echelon: Vec<(usize, BitVector, BitVector)>,
    accepted: usize,
}

impl SpanBasis {
    /// `len` is the ambient dimension, `capacity` an upper bound on the number
    /// of generators that will be accepted.
    pub fn new(len: usize, capacity: usize) -> Self {
        SpanBasis {
            len,
            capacity,
            echelon: Vec::new(),
            accepted: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.accepted
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    /// Returns `(residual, combination)` with `v = residual + Σ combination_g · generator_g`.
    pub fn reduce(&self, v: &BitVector) -> Result<(BitVector, BitVector)> {
        if v.len() != self.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: v.len(),
            });
        }
        let mut residual = v.clone();
        let mut combination = BitVector::zeros(self.capacity);
        for (pivot, vector, combo) in &self.echelon {
            if residual.get(*pivot) {
                residual.xor_assign(vector);
                combination.xor_assign(combo);
            }
        }
        Ok((residual, combination))
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        Ok(self.reduce(v)?.0.is_zero())
    }

    /// Inserts `v`; returns `true` if it was independent (and is now generator
    /// number `dim() - 1`).
    pub fn insert(&mut self, v: &BitVector) -> Result<bool> {
        let (residual, mut combination) = self.reduce(v)?;
        let Some(pivot) = residual.first_one() else {
            return Ok(false);
        };
        assert!(
            self.accepted < self.capacity,
            "span basis capacity exceeded"
        );
        combination.flip(self.accepted);
        self.accepted += 1;
        self.echelon.push((pivot, residual, combination));
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BitMatrix {
        let rows: Vec<_> = rows.iter().map(|r| BitVector::parse(r).unwrap()).collect();
        BitMatrix::from_rows(rows[0].len(), rows).unwrap()
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(rank(&BitMatrix::identity(5)), 5);
        assert_eq!(rank(&BitMatrix::zeros(3, 7)), 0);
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(kernel_basis(&BitMatrix::identity(4)).is_empty());
        let k = kernel_basis(&BitMatrix::zeros(1, 3));
        assert_eq!(k.len(), 3);
        assert_eq!(k[0].to_bit_string(), "100");
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&["1101", "0111", "1010"]);
        for v in kernel_basis(&a) {
            assert!(a.mul_vec(&v).unwrap().is_zero());
        }
        assert_eq!(kernel_basis(&a).len(), 4 - rank(&a));
    }

    #[test]
    fn solve_identity_and_zero() {
        let v = BitVector::parse("1011").unwrap();
        assert_eq!(solve(&BitMatrix::identity(4), &v).unwrap(), Some(v.clone()));
        assert_eq!(solve(&BitMatrix::zeros(4, 2), &v).unwrap(), None);
        assert!(matches!(
            solve(&BitMatrix::identity(3), &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn span_membership() {
        assert!(in_span(&[], &BitVector::zeros(3)).unwrap());
        let e1 = BitVector::unit(3, 0);
        let e2 = BitVector::unit(3, 1);
        assert!(!in_span(std::slice::from_ref(&e1), &e2).unwrap());
        assert!(in_span(&[e1.clone(), e2.clone()], &(&e1 + &e2)).unwrap());
        assert!(in_span(&[e1], &BitVector::zeros(2)).is_err());
    }

    #[test]
    fn span_basis_tracks_combinations() {
        let gens = ["1100", "0110", "1010", "0001"].map(|s| BitVector::parse(s).unwrap());
        let mut sb = SpanBasis::new(4, 4);
        let accepted: Vec<bool> = gens.iter().map(|g| sb.insert(g).unwrap()).collect();
        assert_eq!(accepted, vec![true, true, false, true]);
        let target = BitVector::parse("1011").unwrap();
        let (res, combo) = sb.reduce(&target).unwrap();
        assert!(res.is_zero());
        let kept = [&gens[0], &gens[1], &gens[3]];
        let mut rebuilt = BitVector::zeros(4);
        for g in combo.ones() {
            rebuilt += kept[g];
        }
        assert_eq!(rebuilt, target);
    }
}
