//! Classical Gabidulin codes over GF(2^n).
//!
//! `Gab(α, k)` is the image of the evaluation map
//! `f ↦ (f(α_1), …, f(α_m))` on linearized polynomials
//! `f(X) = b_0 X + b_1 X^2 + … + b_{k-1} X^(2^(k-1))`, so its generator row
//! `i` is the componentwise Frobenius power `α^(2^i)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::f2linalg::{BitVector, LinAlgError, MatF2};
use crate::gf2field::{BasisF2n, Fe, FieldError, FieldSpec};
use crate::parallel::{chunk_ranges, with_threads};

/// Default cap on the number of codewords a brute-force certificate may
/// enumerate.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GabidulinError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("evaluation points are linearly dependent over GF(2)")]
    DependentAlpha,
    #[error("dimension k = {k} outside 1..={m}")]
    DimensionOutOfRange { k: usize, m: usize },
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("enumeration needs 2^{log2_required} codewords, budget is {budget}; use the sampling variant")]
    BudgetExceeded { log2_required: u32, budget: u64 },
    #[error("evaluation points are not the Frobenius orbit of a self-dual normal basis generator")]
    NotSelfDualNormalOrbit,
    #[error("shift r = {r} outside 1..{n}")]
    ShiftOutOfRange { r: usize, n: usize },
}

/// A vector over an extension field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtVector {
    field: FieldSpec,
    entries: Vec<Fe>,
}

impl ExtVector {
    pub fn new(field: FieldSpec, entries: Vec<Fe>) -> Result<Self, GabidulinError> {
        if entries.iter().any(|e| e.field() != field) {
            return Err(FieldError::FieldMismatch.into());
        }
        Ok(Self { field, entries })
    }

    pub fn zeros(field: FieldSpec, len: usize) -> Self {
        Self { field, entries: vec![field.zero(); len] }
    }

    pub(crate) fn from_raw(field: FieldSpec, bits: &[u32]) -> Self {
        Self { field, entries: bits.iter().map(|&b| field.fe(b)).collect() }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn entries(&self) -> &[Fe] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Fe::is_zero)
    }

    pub(crate) fn raw(&self) -> Vec<u32> {
        self.entries.iter().map(Fe::bits).collect()
    }

    fn check_compatible(&self, other: &ExtVector) -> Result<(), GabidulinError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch.into());
        }
        if self.len() != other.len() {
            return Err(GabidulinError::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ExtVector) -> Result<ExtVector, GabidulinError> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| *a + *b).collect();
        Ok(ExtVector { field: self.field, entries })
    }

    pub fn scale(&self, lambda: Fe) -> Result<ExtVector, GabidulinError> {
        if lambda.field() != self.field {
            return Err(FieldError::FieldMismatch.into());
        }
        Ok(ExtVector { field: self.field, entries: self.entries.iter().map(|&a| lambda * a).collect() })
    }

    /// Componentwise `x ↦ x^(2^r)`.
    pub fn frobenius(&self, r: u32) -> ExtVector {
        ExtVector { field: self.field, entries: self.entries.iter().map(|a| a.frobenius(r)).collect() }
    }

    /// Polynomial-basis bits, entry `j` occupying positions `j·n .. (j+1)·n`.
    pub fn to_bits(&self) -> BitVector {
        let n = self.field.degree() as usize;
        BitVector::from_bits(self.entries.iter().flat_map(|e| (0..n).map(move |b| (e.bits() >> b) & 1 == 1)))
    }

    pub fn to_hex(&self) -> Vec<String> {
        self.entries.iter().map(Fe::to_hex).collect()
    }
}

/// Dimension of the GF(2)-span of packed field elements.
pub(crate) fn span_rank(values: &[u32]) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for &v in values {
        let mut v = v;
        while v != 0 {
            let top = 31 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

/// Rank of the `n × m` bit matrix whose column `j` holds the coordinates of
/// `v_j` in `basis`.
pub fn rank_weight(v: &ExtVector, basis: &BasisF2n) -> Result<usize, GabidulinError> {
    if basis.field() != v.field() {
        return Err(FieldError::FieldMismatch.into());
    }
    let n = basis.len();
    let mut m = MatF2::zeros(n, v.len());
    for (j, e) in v.entries().iter().enumerate() {
        let coords = basis.expand(*e)?;
        for i in 0..n {
            if coords.get(i) {
                m.set(i, j, true);
            }
        }
    }
    Ok(m.rank())
}

/// `Σ Tr(x_i y_i)`.
pub fn trace_inner_product(x: &ExtVector, y: &ExtVector) -> Result<bool, GabidulinError> {
    x.check_compatible(y)?;
    Ok(x.entries.iter().zip(&y.entries).fold(false, |acc, (a, b)| acc ^ (*a * *b).trace()))
}

/// `Σ x_i · y_i^(2^(n/2))` on an even-degree field.
pub fn hermitian_inner_product(x: &ExtVector, y: &ExtVector) -> Result<Fe, GabidulinError> {
    x.check_compatible(y)?;
    let mut acc = x.field.zero();
    for (a, b) in x.entries.iter().zip(&y.entries) {
        acc = acc + *a * b.hermitian_conjugate()?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GabidulinCode {
    field: FieldSpec,
    alpha: ExtVector,
    k: usize,
    generator: Vec<ExtVector>,
}

impl GabidulinCode {
    /// `Gab(alpha, k)`. The evaluation points must be GF(2)-independent.
    pub fn new(alpha: ExtVector, k: usize) -> Result<Self, GabidulinError> {
        let m = alpha.len();
        if k < 1 || k > m {
            return Err(GabidulinError::DimensionOutOfRange { k, m });
        }
        if span_rank(&alpha.raw()) != m {
            return Err(GabidulinError::DependentAlpha);
        }
        let generator = (0..k as u32).map(|i| alpha.frobenius(i)).collect();
        Ok(Self { field: alpha.field, alpha, k, generator })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn alpha(&self) -> &ExtVector {
        &self.alpha
    }

    pub fn length(&self) -> usize {
        self.alpha.len()
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &[ExtVector] {
        &self.generator
    }

    /// `m − k + 1`.
    pub fn designed_distance(&self) -> usize {
        self.length() - self.k + 1
    }

    /// `b · G` for a message of `k` extension-field symbols.
    pub fn encode(&self, message: &[Fe]) -> Result<ExtVector, GabidulinError> {
        if message.len() != self.k {
            return Err(GabidulinError::LengthMismatch(message.len(), self.k));
        }
        let mut acc = ExtVector::zeros(self.field, self.length());
        for (b, row) in message.iter().zip(&self.generator) {
            acc = acc.add(&row.scale(*b)?)?;
        }
        Ok(acc)
    }

    /// GF(2) generator matrix of the code viewed as a binary code of length
    /// `m·n`: rows `x^j · g_i` for `i < k`, `j < n`.
    pub fn expanded_generator(&self) -> MatF2 {
        expand_row_space(&self.generator, self.length())
    }

    /// Message of `k` symbols from its index, little-endian digits base `2^n`.
    pub fn message_from_index(&self, index: u64) -> Vec<Fe> {
        let n = self.field.degree();
        let mask = (1u64 << n) - 1;
        (0..self.k).map(|i| self.field.fe(((index >> (n as usize * i)) & mask) as u32)).collect()
    }
}

/// GF(2)-expansion of the extension-field row space spanned by `rows`.
pub fn expand_row_space(rows: &[ExtVector], len: usize) -> MatF2 {
    let expanded: Vec<BitVector> = rows
        .iter()
        .flat_map(|r| {
            let field = r.field();
            (0..field.degree()).map(move |j| r.scale(field.fe(1 << j)).expect("same field").to_bits())
        })
        .collect();
    let cols = rows.first().map_or(len, |r| r.len() * r.field().degree() as usize);
    MatF2::from_rows(cols, &expanded).expect("rows share a length")
}

/// Reduced row echelon form over the extension field; returns pivot columns.
fn ext_rref(field: FieldSpec, rows: &mut [Vec<u32>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = field.fe(rows[r][c]).inv().expect("pivot is nonzero").bits();
        for x in rows[r].iter_mut() {
            *x = field.mul_bits(*x, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= field.mul_bits(f, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{y : ⟨c, y⟩_H = 0 for every row c}`.
///
/// Writing `z = conj(y)`, the conditions read `G zᵀ = 0`, an ordinary linear
/// system over the extension field; the solution is conjugated back.
pub fn hermitian_dual_rows(field: FieldSpec, rows: &[ExtVector], len: usize) -> Result<Vec<ExtVector>, GabidulinError> {
    if !field.degree().is_multiple_of(2) {
        return Err(FieldError::OddDegree(field.degree()).into());
    }
    for r in rows {
        if r.field() != field {
            return Err(FieldError::FieldMismatch.into());
        }
        if r.len() != len {
            return Err(GabidulinError::LengthMismatch(r.len(), len));
        }
    }
    let mut g: Vec<Vec<u32>> = rows.iter().map(ExtVector::raw).collect();
    let pivots = ext_rref(field, &mut g, len);
    let mut is_pivot = vec![false; len];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let half = field.degree() / 2;
    let mut out = Vec::new();
    for f in (0..len).filter(|&c| !is_pivot[c]) {
        let mut z = vec![0u32; len];
        z[f] = 1;
        for (r, &p) in pivots.iter().enumerate() {
            // char 2: z_p = -g[r][f] = g[r][f]
            z[p] = g[r][f];
        }
        let y: Vec<u32> = z.iter().map(|&b| field.frobenius_bits(b, half)).collect();
        out.push(ExtVector::from_raw(field, &y));
    }
    Ok(out)
}

pub fn hermitian_dual(code: &GabidulinCode) -> Result<Vec<ExtVector>, GabidulinError> {
    hermitian_dual_rows(code.field, &code.generator, code.length())
}

/// `⟨g_i, g_j⟩_H = 0` for every pair of generator rows, including `i = j`.
pub fn is_hermitian_self_orthogonal(code: &GabidulinCode) -> Result<bool, GabidulinError> {
    for gi in &code.generator {
        for gj in &code.generator {
            if !hermitian_inner_product(gi, gj)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Gab(α^(2^r), n − r)`, the trace dual of `Gab(α, r)` when `α` is the
/// Frobenius orbit of a self-dual normal basis generator.
pub fn trace_dual_gabidulin(alpha: &ExtVector, r: usize) -> Result<GabidulinCode, GabidulinError> {
    let field = alpha.field();
    let n = field.degree() as usize;
    if alpha.len() != n {
        return Err(GabidulinError::LengthMismatch(alpha.len(), n));
    }
    if r < 1 || r >= n {
        return Err(GabidulinError::ShiftOutOfRange { r, n });
    }
    let theta = alpha.entries()[0];
    let orbit_ok = alpha.entries().iter().enumerate().all(|(i, a)| *a == theta.frobenius(i as u32));
    if !orbit_ok || !crate::gf2field::is_self_dual_basis(alpha.entries()) {
        return Err(GabidulinError::NotSelfDualNormalOrbit);
    }
    GabidulinCode::new(alpha.frobenius(r as u32), n - r)
}

/// Exact minimum rank distance with the lowest-index minimizing message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceCertificate {
    pub d: usize,
    pub witness_message: Vec<Fe>,
    pub witness_rank: usize,
    pub enumerated: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub budget: u64,
    pub threads: Option<usize>,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, threads: None }
    }
}

fn log2_count(code: &GabidulinCode) -> u32 {
    code.field.degree() * code.k as u32
}

/// Enumerates every nonzero codeword and returns the minimum rank weight.
///
/// The code is GF(2)-linear in the message bits, so messages are visited in
/// Gray-code order with one vector XOR per step. Message bit `n·i + j` is the
/// `x^j` coefficient of symbol `b_i`, which makes the Gray value the message
/// index in little-endian digit order. Ties are broken by lowest index, so
/// the certificate does not depend on how the range is split across workers.
pub fn min_rank_distance_bruteforce(code: &GabidulinCode, opts: EnumerationOptions) -> Result<DistanceCertificate, GabidulinError> {
    let bits = log2_count(code);
    if bits >= 64 || (1u64 << bits) > opts.budget {
        return Err(GabidulinError::BudgetExceeded { log2_required: bits, budget: opts.budget });
    }
    let total = 1u64 << bits;
    let n = code.field.degree();
    let m = code.length();
    let field = code.field;
    let units: Vec<Vec<u32>> = (0..code.k)
        .flat_map(|i| {
            let row = code.generator[i].raw();
            (0..n).map(move |j| row.iter().map(|&g| field.mul_bits(g, 1 << j)).collect())
        })
        .collect();

    let scan = |(start, end): (u64, u64)| -> (usize, u64) {
        let mut word = vec![0u32; m];
        let g0 = start ^ (start >> 1);
        for (p, u) in units.iter().enumerate() {
            if (g0 >> p) & 1 == 1 {
                for (w, x) in word.iter_mut().zip(u) {
                    *w ^= x;
                }
            }
        }
        let mut best = (usize::MAX, u64::MAX);
        for s in start..end {
            if s != start {
                let u = &units[s.trailing_zeros() as usize];
                for (w, x) in word.iter_mut().zip(u) {
                    *w ^= x;
                }
            }
            let rank = span_rank(&word);
            let index = s ^ (s >> 1);
            if (rank, index) < best {
                best = (rank, index);
            }
        }
        best
    };

    let (d, index) = with_threads(opts.threads, || {
        let chunks = (rayon::current_num_threads() as u64 * 8).max(1);
        chunk_ranges(1, total, chunks).into_par_iter().map(scan).min().unwrap_or((usize::MAX, u64::MAX))
    });
    if d == usize::MAX {
        // k ≥ 1 and n ≥ 1 always leave a nonzero codeword.
        unreachable!("no nonzero codeword enumerated");
    }
    Ok(DistanceCertificate { d, witness_message: code.message_from_index(index), witness_rank: d, enumerated: total - 1 })
}

/// Non-certifying estimate of the minimum rank distance from random messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampledDistance {
    pub estimate: usize,
    pub samples: u64,
    pub certified: bool,
}

pub fn sample_min_rank_distance(code: &GabidulinCode, samples: u64, seed: u64) -> Result<SampledDistance, GabidulinError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = usize::MAX;
    let mut drawn = 0;
    while drawn < samples {
        let msg: Vec<Fe> = (0..code.k).map(|_| code.field.fe(rng.gen_range(0..code.field.order()) as u32)).collect();
        if msg.iter().all(Fe::is_zero) {
            continue;
        }
        drawn += 1;
        let word = code.encode(&msg)?;
        best = best.min(span_rank(&word.raw()));
    }
    Ok(SampledDistance { estimate: best, samples, certified: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2field::{find_normal_basis, find_self_dual_basis, find_self_dual_normal_basis, BasisKind};

    fn gf16() -> FieldSpec {
        FieldSpec::new(4, 0b10011).unwrap()
    }

    fn worked_alpha() -> ExtVector {
        let f = gf16();
        ExtVector::new(f, [3, 7, 12, 13].iter().map(|&e| f.root().pow(e)).collect()).unwrap()
    }

    fn poly_alpha(f: FieldSpec) -> ExtVector {
        ExtVector::new(f, (0..f.degree()).map(|j| f.fe(1 << j)).collect()).unwrap()
    }

    /// Rank weight by enumerating every GF(2) combination of the entries.
    fn rank_oracle(v: &ExtVector) -> usize {
        let raw = v.raw();
        let distinct: std::collections::HashSet<u32> = (0u64..1 << raw.len())
            .map(|mask| raw.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).fold(0, |a, (_, &x)| a ^ x))
            .collect();
        distinct.len().trailing_zeros() as usize
    }

    #[test]
    fn worked_example_code() {
        let code = GabidulinCode::new(worked_alpha(), 1).unwrap();
        assert_eq!(code.generator().len(), 1);
        assert_eq!(code.generator()[0], worked_alpha());
        assert!(is_hermitian_self_orthogonal(&code).unwrap());
        assert_eq!(hermitian_dual(&code).unwrap().len(), 3);
    }

    #[test]
    fn construction_errors() {
        let f = gf16();
        let w = f.root();
        let dep = ExtVector::new(f, vec![w, w, w * w, w.pow(3)]).unwrap();
        assert_eq!(GabidulinCode::new(dep, 1).unwrap_err(), GabidulinError::DependentAlpha);
        assert!(matches!(GabidulinCode::new(worked_alpha(), 0), Err(GabidulinError::DimensionOutOfRange { .. })));
        assert!(matches!(GabidulinCode::new(worked_alpha(), 5), Err(GabidulinError::DimensionOutOfRange { .. })));
    }

    #[test]
    fn generator_rows_are_frobenius_powers() {
        let code = GabidulinCode::new(worked_alpha(), 2).unwrap();
        let row0 = &code.generator()[0];
        let squared: Vec<Fe> = row0.entries().iter().map(|&a| a * a).collect();
        assert_eq!(code.generator()[1].entries(), &squared[..]);
    }

    #[test]
    fn rank_weight_examples() {
        let f = gf16();
        let w = f.root();
        let basis = BasisF2n::polynomial(f);
        assert_eq!(rank_weight(&ExtVector::zeros(f, 4), &basis).unwrap(), 0);
        assert_eq!(rank_weight(&worked_alpha(), &basis).unwrap(), 4);
        let v = ExtVector::new(f, vec![w, w * w, w, w * w]).unwrap();
        assert_eq!(rank_weight(&v, &basis).unwrap(), rank_oracle(&v));
        assert_eq!(rank_weight(&v, &basis).unwrap(), 2);
    }

    #[test]
    fn rank_weight_is_basis_independent() {
        let f = gf16();
        let code = GabidulinCode::new(worked_alpha(), 1).unwrap();
        let sd = BasisF2n::new(f, worked_alpha().entries().to_vec(), BasisKind::SelfDual, None).unwrap();
        let bases = [BasisF2n::polynomial(f), find_normal_basis(f).unwrap(), sd];
        for idx in 0..16 {
            let word = code.encode(&code.message_from_index(idx)).unwrap();
            let ranks: Vec<usize> = bases.iter().map(|b| rank_weight(&word, b).unwrap()).collect();
            assert!(ranks.iter().all(|&r| r == ranks[0]));
            assert_eq!(ranks[0], rank_oracle(&word));
        }
    }

    #[test]
    fn brute_force_distances() {
        let f = gf16();
        let opts = EnumerationOptions::default();
        let c1 = GabidulinCode::new(worked_alpha(), 1).unwrap();
        let cert = min_rank_distance_bruteforce(&c1, opts).unwrap();
        assert_eq!((cert.d, cert.enumerated), (4, 15));
        let c3 = GabidulinCode::new(poly_alpha(f), 3).unwrap();
        let cert3 = min_rank_distance_bruteforce(&c3, opts).unwrap();
        assert_eq!((cert3.d, cert3.enumerated), (2, 4095));
        assert_eq!(span_rank(&c3.encode(&cert3.witness_message).unwrap().raw()), 2);
        let c4 = GabidulinCode::new(poly_alpha(f), 4).unwrap();
        assert_eq!(min_rank_distance_bruteforce(&c4, opts).unwrap().d, 1);
    }

    #[test]
    fn brute_force_matches_direct_encoding() {
        // The Gray-code scan must agree with encoding every message directly.
        let f = FieldSpec::find_irreducible(3).unwrap();
        let code = GabidulinCode::new(poly_alpha(f), 2).unwrap();
        let mut best = (usize::MAX, u64::MAX);
        for idx in 1..64u64 {
            let r = rank_oracle(&code.encode(&code.message_from_index(idx)).unwrap());
            best = best.min((r, idx));
        }
        let cert = min_rank_distance_bruteforce(&code, EnumerationOptions::default()).unwrap();
        assert_eq!(cert.d, best.0);
        assert_eq!(cert.witness_message, code.message_from_index(best.1));
    }

    #[test]
    fn brute_force_is_thread_independent() {
        let f = FieldSpec::find_irreducible(5).unwrap();
        let code = GabidulinCode::new(poly_alpha(f), 3).unwrap();
        let one = min_rank_distance_bruteforce(&code, EnumerationOptions { threads: Some(1), ..Default::default() }).unwrap();
        let many = min_rank_distance_bruteforce(&code, EnumerationOptions { threads: Some(8), ..Default::default() }).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn budget_is_enforced() {
        let f = FieldSpec::find_irreducible(8).unwrap();
        let code = GabidulinCode::new(poly_alpha(f), 4).unwrap();
        let err = min_rank_distance_bruteforce(&code, EnumerationOptions::default()).unwrap_err();
        assert_eq!(err, GabidulinError::BudgetExceeded { log2_required: 32, budget: DEFAULT_BUDGET });
        let sampled = sample_min_rank_distance(&code, 2000, 1).unwrap();
        assert!(!sampled.certified);
        assert!(sampled.estimate >= code.designed_distance());
    }

    #[test]
    fn inner_product_identities() {
        let f = gf16();
        let alpha = worked_alpha();
        assert!(!trace_inner_product(&alpha, &ExtVector::zeros(f, 4)).unwrap());
        // Gram diagonal of a self-dual basis: Σ Tr(α_i²) = n mod 2.
        assert!(!trace_inner_product(&alpha, &alpha).unwrap());
        assert!(hermitian_inner_product(&ExtVector::zeros(f, 4), &alpha).unwrap().is_zero());
        let a = f.root().pow(5);
        let mut e = ExtVector::zeros(f, 4);
        e.entries[0] = a;
        assert_eq!(hermitian_inner_product(&e, &e).unwrap(), a.pow(1 + 4));
        let odd = FieldSpec::find_irreducible(3).unwrap();
        let v = poly_alpha(odd);
        assert!(matches!(hermitian_inner_product(&v, &v), Err(GabidulinError::Field(FieldError::OddDegree(3)))));
        assert!(trace_inner_product(&alpha, &ExtVector::zeros(f, 3)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rand_vec = |rng: &mut ChaCha8Rng| ExtVector::from_raw(f, &(0..4).map(|_| rng.gen_range(0..16)).collect::<Vec<_>>());
        for _ in 0..100 {
            let (x, y, z) = (rand_vec(&mut rng), rand_vec(&mut rng), rand_vec(&mut rng));
            let xy = x.add(&y).unwrap();
            assert_eq!(trace_inner_product(&xy, &z).unwrap(), trace_inner_product(&x, &z).unwrap() ^ trace_inner_product(&y, &z).unwrap());
            assert_eq!(trace_inner_product(&x, &y).unwrap(), trace_inner_product(&y, &x).unwrap());
            let lambda = f.fe(rng.gen_range(0..16));
            assert_eq!(
                hermitian_inner_product(&x.scale(lambda).unwrap(), &y).unwrap(),
                lambda * hermitian_inner_product(&x, &y).unwrap()
            );
        }
    }

    #[test]
    fn hermitian_duals() {
        let f = gf16();
        let full = GabidulinCode::new(poly_alpha(f), 4).unwrap();
        assert!(hermitian_dual(&full).unwrap().is_empty());
        let code = GabidulinCode::new(worked_alpha(), 1).unwrap();
        let dual = hermitian_dual(&code).unwrap();
        for y in &dual {
            for g in code.generator() {
                assert!(hermitian_inner_product(g, y).unwrap().is_zero());
            }
        }
        let double = hermitian_dual_rows(f, &dual, 4).unwrap();
        let a = expand_row_space(code.generator(), 4);
        let b = expand_row_space(&double, 4);
        assert!(crate::f2linalg::subspace_equal(&a, &b).unwrap());
        let odd = GabidulinCode::new(poly_alpha(FieldSpec::find_irreducible(3).unwrap()), 1).unwrap();
        assert!(hermitian_dual(&odd).is_err());
    }

    #[test]
    fn self_orthogonality_for_self_dual_alpha() {
        for half in 1..=4u32 {
            let f = FieldSpec::find_irreducible(2 * half).unwrap();
            let alpha = ExtVector::new(f, find_self_dual_basis(f).unwrap().elements().to_vec()).unwrap();
            for k in 1..=half as usize {
                assert!(is_hermitian_self_orthogonal(&GabidulinCode::new(alpha.clone(), k).unwrap()).unwrap());
            }
            // One past the bound pairs row m with row 0.
            if (half as usize) < alpha.len() {
                let over = GabidulinCode::new(alpha.clone(), half as usize + 1).unwrap();
                assert!(!is_hermitian_self_orthogonal(&over).unwrap());
            }
        }
        // The polynomial basis is not self-dual and breaks self-orthogonality.
        let f = gf16();
        assert!(!is_hermitian_self_orthogonal(&GabidulinCode::new(poly_alpha(f), 1).unwrap()).unwrap());
    }

    #[test]
    fn trace_dual_shift() {
        let f = FieldSpec::find_irreducible(3).unwrap();
        let basis = find_self_dual_normal_basis(f).unwrap();
        let alpha = ExtVector::new(f, basis.elements().to_vec()).unwrap();
        let dual = trace_dual_gabidulin(&alpha, 1).unwrap();
        assert_eq!(dual.dimension(), 2);
        let rotated: Vec<Fe> = (0..3).map(|i| alpha.entries()[(i + 1) % 3]).collect();
        assert_eq!(dual.alpha().entries(), &rotated[..]);
        let code = GabidulinCode::new(alpha.clone(), 1).unwrap();
        for c in code.generator() {
            for d in dual.generator() {
                for j in 0..3 {
                    for l in 0..3 {
                        let cs = c.scale(f.fe(1 << j)).unwrap();
                        let ds = d.scale(f.fe(1 << l)).unwrap();
                        assert!(!trace_inner_product(&cs, &ds).unwrap());
                    }
                }
            }
        }
        assert_eq!(alpha.frobenius(3), alpha);
        assert!(matches!(trace_dual_gabidulin(&alpha, 3), Err(GabidulinError::ShiftOutOfRange { .. })));
        assert_eq!(trace_dual_gabidulin(&poly_alpha(f), 1).unwrap_err(), GabidulinError::NotSelfDualNormalOrbit);
    }
}
