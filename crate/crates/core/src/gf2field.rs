//! Arithmetic in GF(2^n) for 1 ≤ n ≤ 32, trace and Frobenius maps, and
//! construction of self-dual, normal and self-dual normal bases.
//!
//! Elements are polynomial residues stored little-endian: bit `i` of the
//! backing `u32` is the coefficient of `x^i`. The same convention is used
//! for moduli (`x^4 + x + 1` is `0b10011`) and in every hex encoding, which
//! prints the backing integer most significant nibble first.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2linalg::{orthonormal_congruence, BitVector, LinAlgError, MatF2};

pub const MAX_DEGREE: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field degree {0} outside 1..=32")]
    DegreeOutOfRange(u32),
    #[error("modulus {0:#x} is not an irreducible polynomial of degree {1}")]
    NotIrreducible(u64, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("value {0:#x} does not fit in GF(2^{1})")]
    ElementOutOfRange(u64, u32),
    #[error("operation requires an even field degree, got {0}")]
    OddDegree(u32),
    #[error("operation requires an odd field degree, got {0}")]
    EvenDegree(u32),
    #[error("basis needs {expected} elements, got {got}")]
    BasisSize { expected: usize, got: usize },
    #[error("basis elements are linearly dependent over GF(2)")]
    DependentBasis,
    #[error("basis is not self-dual")]
    NotSelfDual,
    #[error("element {0} does not generate a normal basis")]
    NotNormal(String),
    #[error("search exhausted without finding a {0}")]
    SearchExhausted(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

fn clmul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test: a degree-n polynomial over GF(2) is
/// irreducible iff `gcd(x^(2^i) - x, f) = 1` for every `1 ≤ i ≤ n/2`.
pub fn is_irreducible(f: u64) -> bool {
    let n = poly_degree(f);
    if n < 1 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = 0b10u64;
    let mut h = x;
    for _ in 1..=n / 2 {
        h = poly_rem(clmul(h, h), f);
        if poly_gcd(h ^ x, f) != 1 {
            return false;
        }
    }
    true
}

/// The extension field GF(2^degree) = GF(2)[x] / (modulus).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    degree: u32,
    modulus: u64,
    trace_mask: u32,
}

impl FieldSpec {
    pub fn new(degree: u32, modulus: u64) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(FieldError::DegreeOutOfRange(degree));
        }
        if poly_degree(modulus) != degree as i32 || !is_irreducible(modulus) {
            return Err(FieldError::NotIrreducible(modulus, degree));
        }
        let mut f = Self { degree, modulus, trace_mask: 0 };
        let mut mask = 0u32;
        for i in 0..degree {
            if f.trace_slow(1 << i) {
                mask |= 1 << i;
            }
        }
        f.trace_mask = mask;
        Ok(f)
    }

    /// Lexicographically smallest irreducible monic polynomial of degree `n`.
    pub fn find_irreducible(n: u32) -> Result<Self, FieldError> {
        if !(1..=MAX_DEGREE).contains(&n) {
            return Err(FieldError::DegreeOutOfRange(n));
        }
        let lo = 1u64 << n;
        let modulus = (lo..lo << 1).find(|&f| is_irreducible(f)).ok_or(FieldError::SearchExhausted("irreducible polynomial"))?;
        Self::new(n, modulus)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        1u64 << self.degree
    }

    fn mask(&self) -> u32 {
        if self.degree == 32 {
            u32::MAX
        } else {
            (1u32 << self.degree) - 1
        }
    }

    pub fn element(&self, bits: u64) -> Result<Fe, FieldError> {
        if bits >= self.order() {
            return Err(FieldError::ElementOutOfRange(bits, self.degree));
        }
        Ok(Fe { field: *self, bits: bits as u32 })
    }

    pub(crate) fn fe(&self, bits: u32) -> Fe {
        debug_assert_eq!(bits & !self.mask(), 0);
        Fe { field: *self, bits }
    }

    pub fn zero(&self) -> Fe {
        self.fe(0)
    }

    pub fn one(&self) -> Fe {
        self.fe(1)
    }

    /// The class of `x`, i.e. a root of the modulus (the ω of a worked example).
    pub fn root(&self) -> Fe {
        self.fe(poly_rem(0b10, self.modulus) as u32)
    }

    /// All elements in ascending bit order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.order()).map(move |b| self.fe(b as u32))
    }

    #[inline]
    pub(crate) fn mul_bits(&self, a: u32, b: u32) -> u32 {
        let mut p = clmul(a as u64, b as u64);
        let n = self.degree as i32;
        let mut top = poly_degree(p);
        while top >= n {
            p ^= self.modulus << (top - n);
            top = poly_degree(p);
        }
        p as u32
    }

    #[inline]
    pub(crate) fn square_bits(&self, a: u32) -> u32 {
        self.mul_bits(a, a)
    }

    pub(crate) fn pow_bits(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_bits(acc, base);
            }
            base = self.square_bits(base);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn frobenius_bits(&self, a: u32, r: u32) -> u32 {
        let mut x = a;
        for _ in 0..r % self.degree {
            x = self.square_bits(x);
        }
        x
    }

    fn trace_slow(&self, a: u32) -> bool {
        let (mut x, mut acc) = (a, 0u32);
        for _ in 0..self.degree {
            acc ^= x;
            x = self.square_bits(x);
        }
        debug_assert!(acc <= 1);
        acc == 1
    }

    #[inline]
    pub(crate) fn trace_bits(&self, a: u32) -> bool {
        (a & self.trace_mask).count_ones() & 1 == 1
    }

    pub fn modulus_hex(&self) -> String {
        let width = (self.degree as usize + 1).div_ceil(4);
        format!("{:0width$x}", self.modulus)
    }

    pub fn parse_element(&self, hex: &str) -> Result<Fe, FieldError> {
        let bits = u64::from_str_radix(hex.trim().trim_start_matches("0x"), 16)
            .map_err(|e| FieldError::Parse(format!("bad hex element {hex:?}: {e}")))?;
        self.element(bits)
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.degree, self.modulus)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    degree: u32,
    modulus: String,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FieldSpecJson { degree: self.degree, modulus: self.modulus_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = FieldSpecJson::deserialize(d)?;
        let modulus = u64::from_str_radix(&j.modulus, 16).map_err(D::Error::custom)?;
        FieldSpec::new(j.degree, modulus).map_err(D::Error::custom)
    }
}

/// An element of a [`FieldSpec`].
///
/// The operator impls panic on mixed fields; the `try_*` methods report
/// [`FieldError::FieldMismatch`] instead.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fe {
    field: FieldSpec,
    bits: u32,
}

impl Fe {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn same_field(&self, other: &Fe) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn try_add(self, other: Fe) -> Result<Fe, FieldError> {
        self.same_field(&other)?;
        Ok(self.field.fe(self.bits ^ other.bits))
    }

    pub fn try_mul(self, other: Fe) -> Result<Fe, FieldError> {
        self.same_field(&other)?;
        Ok(self.field.fe(self.field.mul_bits(self.bits, other.bits)))
    }

    /// Square-and-multiply.
    pub fn pow(self, e: u64) -> Fe {
        self.field.fe(self.field.pow_bits(self.bits, e))
    }

    /// `a^(2^n - 2)`.
    pub fn inv(self) -> Result<Fe, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(self.field.order() - 2))
    }

    /// `a^(2^r)`.
    pub fn frobenius(self, r: u32) -> Fe {
        self.field.fe(self.field.frobenius_bits(self.bits, r))
    }

    /// Absolute trace to GF(2).
    pub fn trace(self) -> bool {
        self.field.trace_bits(self.bits)
    }

    /// `a^(2^(n/2))`, defined for even degree only.
    pub fn hermitian_conjugate(self) -> Result<Fe, FieldError> {
        if !self.field.degree.is_multiple_of(2) {
            return Err(FieldError::OddDegree(self.field.degree));
        }
        Ok(self.frobenius(self.field.degree / 2))
    }

    pub fn to_hex(&self) -> String {
        let width = (self.field.degree as usize).div_ceil(4);
        format!("{:0width$x}", self.bits)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.to_hex())
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Fe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        self.try_add(rhs).expect("field mismatch in addition")
    }
}

impl Sub for Fe {
    type Output = Fe;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Fe) -> Fe {
        self + rhs
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, rhs: Fe) -> Fe {
        self.try_mul(rhs).expect("field mismatch in multiplication")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    General,
    SelfDual,
    Normal,
    SelfDualNormal,
}

/// An ordered basis of GF(2^n) over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BasisF2n {
    field: FieldSpec,
    elements: Vec<Fe>,
    kind: BasisKind,
    generator: Option<Fe>,
    // monomial_coords[i] = coordinates of x^i in this basis, packed.
    monomial_coords: Vec<u32>,
}

fn coordinate_matrix(field: FieldSpec, elements: &[Fe]) -> MatF2 {
    let n = field.degree as usize;
    let mut m = MatF2::zeros(elements.len(), n);
    for (i, e) in elements.iter().enumerate() {
        for j in 0..n {
            if (e.bits >> j) & 1 == 1 {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Trace Gram matrix `G[i][j] = Tr(b_i · b_j)`.
pub fn trace_gram(elements: &[Fe]) -> MatF2 {
    let mut g = MatF2::zeros(elements.len(), elements.len());
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            if (*a * *b).trace() {
                g.set(i, j, true);
            }
        }
    }
    g
}

/// True iff the list is a GF(2)-basis whose trace Gram matrix is the identity.
pub fn is_self_dual_basis(elements: &[Fe]) -> bool {
    let Some(first) = elements.first() else {
        return false;
    };
    let field = first.field();
    if elements.len() != field.degree as usize || elements.iter().any(|e| e.field() != field) {
        return false;
    }
    coordinate_matrix(field, elements).rank() == elements.len() && trace_gram(elements) == MatF2::identity(elements.len())
}

fn frobenius_orbit(theta: Fe) -> Vec<Fe> {
    (0..theta.field().degree).map(|i| theta.frobenius(i)).collect()
}

impl BasisF2n {
    /// Validates the invariants implied by `kind` and builds the basis.
    pub fn new(field: FieldSpec, elements: Vec<Fe>, kind: BasisKind, generator: Option<Fe>) -> Result<Self, FieldError> {
        let n = field.degree as usize;
        if elements.len() != n {
            return Err(FieldError::BasisSize { expected: n, got: elements.len() });
        }
        if elements.iter().any(|e| e.field() != field) || generator.is_some_and(|g| g.field() != field) {
            return Err(FieldError::FieldMismatch);
        }
        let inverse = coordinate_matrix(field, &elements).inverse().map_err(|_| FieldError::DependentBasis)?;
        if matches!(kind, BasisKind::SelfDual | BasisKind::SelfDualNormal) && trace_gram(&elements) != MatF2::identity(n) {
            return Err(FieldError::NotSelfDual);
        }
        if matches!(kind, BasisKind::Normal | BasisKind::SelfDualNormal) {
            let g = generator.ok_or_else(|| FieldError::NotNormal("<missing generator>".into()))?;
            if frobenius_orbit(g) != elements {
                return Err(FieldError::NotNormal(g.to_hex()));
            }
        }
        let monomial_coords = (0..n)
            .map(|i| (0..n).filter(|&j| inverse.get(i, j)).fold(0u32, |acc, j| acc | 1 << j))
            .collect();
        Ok(Self { field, elements, kind, generator, monomial_coords })
    }

    /// The polynomial basis `{1, x, …, x^(n-1)}`.
    pub fn polynomial(field: FieldSpec) -> Self {
        let elements = (0..field.degree).map(|i| field.fe(1 << i)).collect();
        Self::new(field, elements, BasisKind::General, None).expect("polynomial basis is a basis")
    }

    /// The normal basis generated by `theta`, tagged self-dual normal when the
    /// orbit also happens to be self-dual.
    pub fn normal(field: FieldSpec, theta: Fe) -> Result<Self, FieldError> {
        if theta.field() != field {
            return Err(FieldError::FieldMismatch);
        }
        let orbit = frobenius_orbit(theta);
        if coordinate_matrix(field, &orbit).rank() != field.degree as usize {
            return Err(FieldError::NotNormal(theta.to_hex()));
        }
        Self::new(field, orbit, BasisKind::Normal, Some(theta))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn elements(&self) -> &[Fe] {
        &self.elements
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn generator(&self) -> Option<Fe> {
        self.generator
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn gram(&self) -> MatF2 {
        trace_gram(&self.elements)
    }

    /// Packed coordinates of `bits` (bit `j` of the result is the coefficient
    /// of `elements[j]`).
    #[inline]
    pub(crate) fn coords_bits(&self, bits: u32) -> u32 {
        let mut acc = 0u32;
        let mut b = bits;
        while b != 0 {
            let i = b.trailing_zeros();
            acc ^= self.monomial_coords[i as usize];
            b &= b - 1;
        }
        acc
    }

    #[inline]
    pub(crate) fn combine_bits(&self, coords: u32) -> u32 {
        let mut acc = 0u32;
        let mut c = coords;
        while c != 0 {
            let j = c.trailing_zeros();
            acc ^= self.elements[j as usize].bits;
            c &= c - 1;
        }
        acc
    }

    pub fn expand(&self, a: Fe) -> Result<BitVector, FieldError> {
        if a.field() != self.field {
            return Err(FieldError::FieldMismatch);
        }
        let c = self.coords_bits(a.bits);
        Ok(BitVector::from_bits((0..self.len()).map(|j| (c >> j) & 1 == 1)))
    }

    pub fn combine(&self, coords: &BitVector) -> Result<Fe, FieldError> {
        if coords.len() != self.len() {
            return Err(FieldError::BasisSize { expected: self.len(), got: coords.len() });
        }
        let packed = coords.iter().enumerate().fold(0u32, |acc, (j, b)| acc | (b as u32) << j);
        Ok(self.field.fe(self.combine_bits(packed)))
    }

    pub fn to_record(&self) -> BasisRecord {
        BasisRecord {
            kind: self.kind,
            elements: self.elements.iter().map(Fe::to_hex).collect(),
            generator: self.generator.map(|g| g.to_hex()),
        }
    }

    pub fn from_record(field: FieldSpec, rec: &BasisRecord) -> Result<Self, FieldError> {
        let elements = rec.elements.iter().map(|h| field.parse_element(h)).collect::<Result<Vec<_>, _>>()?;
        let generator = rec.generator.as_deref().map(|h| field.parse_element(h)).transpose()?;
        Self::new(field, elements, rec.kind, generator)
    }
}

impl fmt::Debug for BasisF2n {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasisF2n")
            .field("field", &self.field)
            .field("kind", &self.kind)
            .field("elements", &self.elements)
            .field("generator", &self.generator)
            .finish()
    }
}

/// JSON form of a basis: `{"kind": ..., "elements": [hex...], "generator": hex|null}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub kind: BasisKind,
    pub elements: Vec<String>,
    pub generator: Option<String>,
}

impl Serialize for BasisF2n {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

/// Self-dual basis obtained by orthonormalizing the trace form on the
/// polynomial basis.
///
/// Over GF(2) the trace form is symmetric, nondegenerate and never
/// alternating (`Tr(b²) = Tr(b)` is nonzero on some basis vector), so the
/// congruence always exists and the search is deterministic.
pub fn find_self_dual_basis(field: FieldSpec) -> Result<BasisF2n, FieldError> {
    let poly = BasisF2n::polynomial(field);
    let p = orthonormal_congruence(&poly.gram())?;
    let n = field.degree as usize;
    let elements: Vec<Fe> = (0..n)
        .map(|i| {
            let bits = (0..n).filter(|&j| p.get(i, j)).fold(0u32, |acc, j| acc ^ poly.elements[j].bits);
            field.fe(bits)
        })
        .collect();
    BasisF2n::new(field, elements, BasisKind::SelfDual, None)
}

/// First element in ascending bit order whose Frobenius orbit is a basis.
pub fn find_normal_basis(field: FieldSpec) -> Result<BasisF2n, FieldError> {
    field
        .elements()
        .skip(1)
        .find_map(|theta| BasisF2n::normal(field, theta).ok())
        .ok_or(FieldError::SearchExhausted("normal basis"))
}

/// First element in ascending bit order generating a self-dual normal basis.
/// Such a basis exists exactly when the degree is odd.
pub fn find_self_dual_normal_basis(field: FieldSpec) -> Result<BasisF2n, FieldError> {
    let n = field.degree;
    if n.is_multiple_of(2) {
        return Err(FieldError::EvenDegree(n));
    }
    // Tr(θ^(2^i) θ^(2^j)) = Tr(θ · θ^(2^(j-i))), so the Gram matrix is the
    // identity iff Tr(θ) = 1 and Tr(θ^(1 + 2^s)) = 0 for 0 < s < n.
    let candidate = field.elements().skip(1).find(|&theta| {
        theta.trace() && (1..n).all(|s| !(theta * theta.frobenius(s)).trace())
    });
    let theta = candidate.ok_or(FieldError::SearchExhausted("self-dual normal basis"))?;
    BasisF2n::new(field, frobenius_orbit(theta), BasisKind::SelfDualNormal, Some(theta))
}
