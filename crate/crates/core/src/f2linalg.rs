//! Dense linear algebra over GF(2).
//!
//! Rows are packed into `u64` words, least significant bit first, so that
//! elimination is a sequence of word-wise XORs. Bits past `cols` in the last
//! word of every row are kept at zero; every routine here relies on that.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("malformed bilinear form: {0}")]
    MalformedForm(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if !len.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % WORD)) - 1;
            }
        }
        Self { len, words }
    }

    /// Parses a string of `'0'`/`'1'` characters, index 0 first.
    pub fn parse(s: &str) -> Result<Self, LinAlgError> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => return Err(LinAlgError::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(Self::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Euclidean inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        parity_and(&self.words, &other.words)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Sub-vector `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        BitVector::from_bits((start..start + len).map(|i| self.get(i)))
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        BitVector::from_bits(self.iter().chain(other.iter()))
    }

    /// Lexicographic order on the bit sequence read from index 0, with 0 < 1.
    pub fn lex_cmp(&self, other: &BitVector) -> Ordering {
        lex_cmp_words(&self.words, &other.words).then(self.len.cmp(&other.len))
    }
}

pub(crate) fn lex_cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let diff = x ^ y;
        if diff != 0 {
            let low = diff & diff.wrapping_neg();
            return if x & low == 0 { Ordering::Less } else { Ordering::Greater };
        }
    }
    Ordering::Equal
}

#[inline]
fn parity_and(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones()) & 1 == 1
}

#[inline]
fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equally long row vectors. An empty list yields a
    /// `0 × cols` matrix.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self, LinAlgError> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(LinAlgError::ShapeMismatch(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Parses the text format: one line of `'0'`/`'1'` per row.
    pub fn parse_rows<S: AsRef<str>>(lines: &[S]) -> Result<Self, LinAlgError> {
        let rows = lines
            .iter()
            .map(|l| BitVector::parse(l.as_ref().trim()))
            .collect::<Result<Vec<_>, _>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        Self::from_rows(cols, &rows)
    }

    pub fn parse_text(text: &str) -> Result<Self, LinAlgError> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        Self::parse_rows(&lines)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            s.push_str(&self.row(i).to_string());
            s.push('\n');
        }
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of range");
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bits((0..self.rows).map(|r| self.get(r, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `rows[dst] ^= rows[src]`.
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let (s, d) = (src * self.stride, dst * self.stride);
        for w in 0..self.stride {
            let v = self.data[s + w];
            self.data[d + w] ^= v;
        }
    }

    pub fn transpose(&self) -> MatF2 {
        let mut t = MatF2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &MatF2) -> Result<MatF2, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = MatF2::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (src, dst) = (other.row_words(k), r * out.stride);
                    for (w, s) in src.iter().enumerate() {
                        out.data[dst + w] ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MatF2) -> Result<MatF2, LinAlgError> {
        if self.shape() != other.shape() {
            return Err(LinAlgError::ShapeMismatch(format!("cannot add {:?} and {:?}", self.shape(), other.shape())));
        }
        let mut out = self.clone();
        xor_words(&mut out.data, &other.data);
        Ok(out)
    }

    /// Row vector times matrix: `v · M`.
    pub fn left_mul_vec(&self, v: &BitVector) -> Result<BitVector, LinAlgError> {
        if v.len() != self.rows {
            return Err(LinAlgError::ShapeMismatch(format!("vector of length {} times {}x{}", v.len(), self.rows, self.cols)));
        }
        let mut acc = vec![0u64; self.stride];
        for r in 0..self.rows {
            if v.get(r) {
                xor_words(&mut acc, self.row_words(r));
            }
        }
        Ok(BitVector::from_words(self.cols, acc))
    }

    /// Bilinear form `u · M · vᵀ`.
    pub fn bilinear(&self, u: &BitVector, v: &BitVector) -> Result<bool, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::ShapeMismatch("right vector length".into()));
        }
        Ok(self.left_mul_vec(u)?.dot(v))
    }

    pub fn vstack(&self, other: &MatF2) -> Result<MatF2, LinAlgError> {
        if self.cols != other.cols {
            return Err(LinAlgError::ShapeMismatch(format!("cannot stack {} and {} columns", self.cols, other.cols)));
        }
        let mut out = self.clone();
        out.rows += other.rows;
        out.data.extend_from_slice(&other.data);
        Ok(out)
    }

    /// Row-reduces in place and returns the pivot column of each nonzero row.
    fn reduce_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (w, mask) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + w] & mask != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + w] & mask != 0 {
                    self.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Canonical reduced row echelon form, same shape, zero rows last.
    pub fn rref(&self) -> MatF2 {
        let mut m = self.clone();
        m.reduce_in_place();
        m
    }

    /// The nonzero rows of the reduced row echelon form: the canonical basis
    /// of the row space.
    pub fn row_basis(&self) -> MatF2 {
        let mut m = self.clone();
        let rank = m.reduce_in_place().len();
        m.rows = rank;
        m.data.truncate(rank * m.stride);
        m
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce_in_place().len()
    }

    /// Basis (as rows) of the right kernel `{x : M xᵀ = 0}`.
    pub fn kernel(&self) -> MatF2 {
        let mut m = self.clone();
        let pivots = m.reduce_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = MatF2::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, f) {
                    out.set(k, p, true);
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<MatF2, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::ShapeMismatch(format!("inverse of non-square {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = MatF2::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.reduce_in_place();
        // The augmented matrix always has rank n; M is invertible iff every
        // pivot falls in the left block.
        if n > 0 && pivots[n - 1] >= n {
            return Err(LinAlgError::Singular);
        }
        let mut inv = MatF2::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Symmetric with zero diagonal.
    pub fn is_alternating(&self) -> bool {
        self.is_symmetric() && (0..self.rows).all(|i| !self.get(i, i))
    }

    /// Swaps the left and right halves of every row: right multiplication by
    /// the pairing matrix `[[0, I], [I, 0]]`.
    pub fn swap_halves(&self) -> Result<MatF2, LinAlgError> {
        if !self.cols.is_multiple_of(2) {
            return Err(LinAlgError::ShapeMismatch(format!("{} columns cannot be split in halves", self.cols)));
        }
        let h = self.cols / 2;
        let mut out = MatF2::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(r, (c + h) % self.cols, true);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF2 {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatF2Json {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl Serialize for MatF2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatF2Json { rows: self.rows, cols: self.cols, data: (0..self.rows).map(|r| self.row(r).to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatF2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = MatF2Json::deserialize(d)?;
        if j.data.len() != j.rows {
            return Err(D::Error::custom(format!("expected {} rows, found {}", j.rows, j.data.len())));
        }
        let rows = j.data.iter().map(|s| BitVector::parse(s)).collect::<Result<Vec<_>, _>>().map_err(D::Error::custom)?;
        MatF2::from_rows(j.cols, &rows).map_err(D::Error::custom)
    }
}

/// The standard symplectic Gram matrix `S = [[0, I_n], [I_n, 0]]` (over GF(2)
/// `-I_n = I_n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticGram {
    n: usize,
    matrix: MatF2,
}

impl SymplecticGram {
    pub fn new(n: usize) -> Self {
        let mut matrix = MatF2::zeros(2 * n, 2 * n);
        for i in 0..n {
            matrix.set(i, n + i, true);
            matrix.set(n + i, i, true);
        }
        Self { n, matrix }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &MatF2 {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatF2 {
        self.matrix
    }
}

/// Solves `D · T · Dᵀ = S` for an invertible alternating `T`.
///
/// Symplectic Gram–Schmidt on the standard basis: take the lowest-index
/// unprocessed vector `u`, pair it with the lowest-index remaining `v` having
/// `T(u, v) = 1`, clear the `(u, v)` components of every remaining vector, and
/// emit `u` as row `i` and `v` as row `n + i` of `D`.
pub fn alternating_congruence(t: &MatF2) -> Result<MatF2, LinAlgError> {
    let (rows, cols) = t.shape();
    if rows != cols || rows % 2 != 0 {
        return Err(LinAlgError::MalformedForm(format!("expected an even square matrix, got {rows}x{cols}")));
    }
    if !t.is_symmetric() {
        return Err(LinAlgError::MalformedForm("form is not symmetric".into()));
    }
    if (0..rows).any(|i| t.get(i, i)) {
        return Err(LinAlgError::MalformedForm("form has a nonzero diagonal entry".into()));
    }
    if !t.is_invertible() {
        return Err(LinAlgError::MalformedForm("form is degenerate".into()));
    }
    let n = rows / 2;
    let form = |u: &BitVector, v: &BitVector| t.left_mul_vec(u).expect("shape checked").dot(v);

    let mut remaining: Vec<BitVector> = (0..rows).map(|i| BitVector::unit(rows, i)).collect();
    let mut d = MatF2::zeros(rows, rows);
    for pair in 0..n {
        let u = remaining.remove(0);
        let tu = t.left_mul_vec(&u)?;
        let j = remaining
            .iter()
            .position(|v| tu.dot(v))
            .ok_or_else(|| LinAlgError::MalformedForm("no hyperbolic partner found".into()))?;
        let v = remaining.remove(j);
        let tv = t.left_mul_vec(&v)?;
        for w in remaining.iter_mut() {
            let (wu, wv) = (tu.dot(w), tv.dot(w));
            if wv {
                w.xor_assign(&u);
            }
            if wu {
                w.xor_assign(&v);
            }
        }
        debug_assert!(form(&u, &v));
        d.row_words_mut(pair).copy_from_slice(u.words());
        d.row_words_mut(n + pair).copy_from_slice(v.words());
    }
    Ok(d)
}

/// Finds an invertible `P` with `P · G · Pᵀ = I` for a symmetric invertible
/// `G` that is not alternating.
///
/// Orthonormal vectors are peeled off one at a time. When the remaining
/// subspace carries an alternating form, the last orthonormal vector `u` and a
/// hyperbolic pair `(w1, w2)` are replaced by `u+w1`, `u+w2`, `u+w1+w2`, which
/// are mutually orthogonal with unit norm.
pub fn orthonormal_congruence(g: &MatF2) -> Result<MatF2, LinAlgError> {
    let n = g.rows();
    if !g.is_symmetric() {
        return Err(LinAlgError::MalformedForm("form is not symmetric".into()));
    }
    if !g.is_invertible() {
        return Err(LinAlgError::MalformedForm("form is degenerate".into()));
    }
    if n > 0 && (0..n).all(|i| !g.get(i, i)) {
        return Err(LinAlgError::MalformedForm("alternating form has no orthonormal basis".into()));
    }
    let form = |u: &BitVector, v: &BitVector| g.left_mul_vec(u).expect("shape checked").dot(v);

    let mut remaining: Vec<BitVector> = (0..n).map(|i| BitVector::unit(n, i)).collect();
    let mut done: Vec<BitVector> = Vec::with_capacity(n);
    while !remaining.is_empty() {
        if let Some(j) = remaining.iter().position(|v| form(v, v)) {
            let u = remaining.remove(j);
            let gu = g.left_mul_vec(&u)?;
            for w in remaining.iter_mut() {
                if gu.dot(w) {
                    w.xor_assign(&u);
                }
            }
            done.push(u);
            continue;
        }
        // Remaining subspace is alternating and nondegenerate.
        let w1 = remaining.remove(0);
        let gw1 = g.left_mul_vec(&w1)?;
        let j = remaining
            .iter()
            .position(|v| gw1.dot(v))
            .ok_or_else(|| LinAlgError::MalformedForm("degenerate alternating block".into()))?;
        let w2 = remaining.remove(j);
        let gw2 = g.left_mul_vec(&w2)?;
        for w in remaining.iter_mut() {
            let (a, b) = (gw1.dot(w), gw2.dot(w));
            if b {
                w.xor_assign(&w1);
            }
            if a {
                w.xor_assign(&w2);
            }
        }
        let u = done
            .pop()
            .ok_or_else(|| LinAlgError::MalformedForm("alternating form has no orthonormal basis".into()))?;
        let a = u.xor(&w1);
        let b = u.xor(&w2);
        let c = a.xor(&w2);
        done.extend([a, b, c]);
    }
    MatF2::from_rows(n, &done)
}

/// Precomputed reduced basis of a row space, for fast membership tests.
#[derive(Debug, Clone)]
pub struct RowSpace {
    basis: MatF2,
    pivots: Vec<usize>,
}

impl RowSpace {
    pub fn new(m: &MatF2) -> Self {
        let mut basis = m.clone();
        let pivots = basis.reduce_in_place();
        basis.rows = pivots.len();
        basis.data.truncate(pivots.len() * basis.stride);
        Self { basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &MatF2 {
        &self.basis
    }

    /// Reduces `words` against the basis in place; the residue is zero iff the
    /// vector lies in the row space.
    #[inline]
    pub(crate) fn reduce_words(&self, words: &mut [u64]) {
        for (r, &p) in self.pivots.iter().enumerate() {
            if (words[p / WORD] >> (p % WORD)) & 1 == 1 {
                xor_words(words, self.basis.row_words(r));
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.basis.cols(), "length mismatch in membership test");
        let mut w = v.words().to_vec();
        self.reduce_words(&mut w);
        w.iter().all(|&x| x == 0)
    }
}

pub fn subspace_equal(a: &MatF2, b: &MatF2) -> Result<bool, LinAlgError> {
    if a.cols() != b.cols() {
        return Err(LinAlgError::ShapeMismatch(format!("{} vs {} columns", a.cols(), b.cols())));
    }
    Ok(a.row_basis() == b.row_basis())
}

/// True iff the row space of `b` is contained in the row space of `a`.
pub fn subspace_contains(a: &MatF2, b: &MatF2) -> Result<bool, LinAlgError> {
    if a.cols() != b.cols() {
        return Err(LinAlgError::ShapeMismatch(format!("{} vs {} columns", a.cols(), b.cols())));
    }
    let space = RowSpace::new(a);
    Ok((0..b.rows()).all(|r| space.contains(&b.row(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> MatF2 {
        let mut m = MatF2::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.gen());
            }
        }
        m
    }

    fn random_invertible(rng: &mut impl Rng, n: usize) -> MatF2 {
        loop {
            let m = random_matrix(rng, n, n);
            if m.rank() == n {
                return m;
            }
        }
    }

    fn paper_t() -> MatF2 {
        MatF2::parse_rows(&["0100", "1001", "0001", "0110"]).unwrap()
    }

    #[test]
    fn rank_of_trivial_matrices() {
        assert_eq!(MatF2::zeros(3, 5).rank(), 0);
        assert_eq!(MatF2::identity(7).rank(), 7);
        assert_eq!(paper_t().rank(), 4);
    }

    #[test]
    fn multiword_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&mut rng, 70, 150);
        let t = m.transpose();
        assert_eq!(t.transpose(), m);
        assert_eq!(m.rank(), t.rank());
        let k = m.kernel();
        assert_eq!(k.rows() + m.rank(), 150);
        assert!(m.mul(&k.transpose()).unwrap().is_zero());
    }

    #[test]
    fn rref_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (r, c) = (rng.gen_range(1..12), rng.gen_range(1..80));
            let m = random_matrix(&mut rng, r, c);
            let r = m.rref();
            assert_eq!(r.rref(), r);
        }
    }

    #[test]
    fn rank_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (a_rows, inner, b_cols) = (rng.gen_range(1..10), rng.gen_range(1..10), rng.gen_range(1..10));
            let a = random_matrix(&mut rng, a_rows, inner);
            let b = random_matrix(&mut rng, inner, b_cols);
            assert!(a.mul(&b).unwrap().rank() <= a.rank().min(b.rank()));
            let c = random_matrix(&mut rng, a_rows, inner);
            assert!(a.add(&c).unwrap().rank() <= a.rank() + c.rank());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=24);
            let m = random_invertible(&mut rng, n);
            let inv = m.inverse().unwrap();
            assert_eq!(m.mul(&inv).unwrap(), MatF2::identity(n));
            assert_eq!(inv.mul(&m).unwrap(), MatF2::identity(n));
        }
    }

    #[test]
    fn inverse_errors() {
        assert_eq!(MatF2::zeros(3, 3).inverse(), Err(LinAlgError::Singular));
        assert!(matches!(MatF2::zeros(2, 3).inverse(), Err(LinAlgError::ShapeMismatch(_))));
        assert!(matches!(MatF2::zeros(2, 3).mul(&MatF2::zeros(2, 3)), Err(LinAlgError::ShapeMismatch(_))));
    }

    #[test]
    fn invertible_multiplication_preserves_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (r, c) = (rng.gen_range(1..10), rng.gen_range(1..12));
            let e = random_matrix(&mut rng, r, c);
            let a = random_invertible(&mut rng, c);
            let p = random_invertible(&mut rng, r);
            assert_eq!(e.mul(&a).unwrap().rank(), e.rank());
            assert_eq!(p.mul(&e).unwrap().rank(), e.rank());
        }
    }

    #[test]
    fn congruence_trivial_cases() {
        let s = SymplecticGram::new(3).into_matrix();
        assert_eq!(alternating_congruence(&s).unwrap(), MatF2::identity(6));
        let swap = MatF2::parse_rows(&["01", "10"]).unwrap();
        assert_eq!(alternating_congruence(&swap).unwrap(), MatF2::identity(2));
    }

    #[test]
    fn congruence_on_worked_example_t() {
        let t = paper_t();
        let d = alternating_congruence(&t).unwrap();
        let s = SymplecticGram::new(2).into_matrix();
        assert_eq!(d.mul(&t).unwrap().mul(&d.transpose()).unwrap(), s);
        // The printed D from the worked example also satisfies the identity.
        let paper_d = MatF2::parse_rows(&["1000", "0010", "0100", "1001"]).unwrap();
        assert_eq!(paper_d.mul(&t).unwrap().mul(&paper_d.transpose()).unwrap(), s);
    }

    #[test]
    fn congruence_rejects_malformed_forms() {
        let sym_diag = MatF2::parse_rows(&["11", "10"]).unwrap();
        assert!(matches!(alternating_congruence(&sym_diag), Err(LinAlgError::MalformedForm(_))));
        let nonsym = MatF2::parse_rows(&["01", "00"]).unwrap();
        assert!(matches!(alternating_congruence(&nonsym), Err(LinAlgError::MalformedForm(_))));
        let singular = MatF2::zeros(4, 4);
        assert!(matches!(alternating_congruence(&singular), Err(LinAlgError::MalformedForm(_))));
        assert!(matches!(alternating_congruence(&MatF2::zeros(3, 3)), Err(LinAlgError::MalformedForm(_))));
    }

    fn random_alternating_invertible(rng: &mut impl Rng, n: usize) -> MatF2 {
        // A random congruent image of S is alternating and invertible.
        let p = random_invertible(rng, 2 * n);
        let s = SymplecticGram::new(n).into_matrix();
        p.mul(&s).unwrap().mul(&p.transpose()).unwrap()
    }

    #[test]
    fn congruence_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=10);
            let t = random_alternating_invertible(&mut rng, n);
            let d = alternating_congruence(&t).unwrap();
            assert!(d.is_invertible());
            assert_eq!(d.mul(&t).unwrap().mul(&d.transpose()).unwrap(), SymplecticGram::new(n).into_matrix());
        }
    }

    #[test]
    fn orthonormal_congruence_on_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut tried = 0;
        while tried < 100 {
            let n = rng.gen_range(1..=12);
            let p = random_invertible(&mut rng, n);
            // P Pᵀ is symmetric invertible; it is non-alternating unless some
            // diagonal happens to vanish everywhere.
            let g = p.mul(&p.transpose()).unwrap();
            if (0..n).all(|i| !g.get(i, i)) {
                continue;
            }
            tried += 1;
            let q = orthonormal_congruence(&g).unwrap();
            assert_eq!(q.mul(&g).unwrap().mul(&q.transpose()).unwrap(), MatF2::identity(n));
        }
        assert!(orthonormal_congruence(&SymplecticGram::new(2).into_matrix()).is_err());
    }

    #[test]
    fn subspace_comparisons() {
        let a = MatF2::parse_rows(&["10", "01"]).unwrap();
        let b = MatF2::parse_rows(&["11", "01"]).unwrap();
        assert!(subspace_equal(&a, &b).unwrap());
        let perm = MatF2::parse_rows(&["01", "10"]).unwrap();
        assert!(subspace_equal(&a, &perm).unwrap());
        let zero = MatF2::zeros(0, 2);
        assert!(subspace_contains(&a, &zero).unwrap());
        assert!(!subspace_contains(&MatF2::parse_rows(&["10"]).unwrap(), &b).unwrap());
        assert!(subspace_equal(&a, &MatF2::zeros(1, 3)).is_err());
    }

    #[test]
    fn lexicographic_order() {
        let a = BitVector::parse("0110").unwrap();
        let b = BitVector::parse("0101").unwrap();
        assert_eq!(a.lex_cmp(&b), Ordering::Greater);
        assert_eq!(b.lex_cmp(&a), Ordering::Less);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    #[test]
    fn json_and_text_forms() {
        let t = paper_t();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"{"rows":4,"cols":4,"data":["0100","1001","0001","0110"]}"#);
        assert_eq!(serde_json::from_str::<MatF2>(&json).unwrap(), t);
        assert_eq!(MatF2::parse_text(&t.to_text()).unwrap(), t);
        assert!(serde_json::from_str::<MatF2>(r#"{"rows":2,"cols":2,"data":["01"]}"#).is_err());
    }
}
