//! Quantum lifts of classical codes: binary symplectic codes on a stacked
//! memory of `m` layers by `n` cells, the Hermitian-to-symplectic expansion
//! `Φ`, the proposed Hermitian Gabidulin construction, the CSS Gabidulin
//! construction, and exact minimum-rank-distance certification.
//!
//! Bit layout of a length-`2mn` vector:
//! `(a_{1,1} … a_{1,n}, a_{2,1} … a_{m,n} | b_{1,1} … b_{m,n})`, so layer `i`
//! owns bits `i·n .. (i+1)·n` of each half.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::f2linalg::{alternating_congruence, lex_cmp_words, BitVector, LinAlgError, MatF2, RowSpace, SymplecticGram};
use crate::gabidulin::{hermitian_dual, is_hermitian_self_orthogonal, ExtVector, GabidulinCode, GabidulinError};
use crate::gf2field::{find_normal_basis, find_self_dual_basis, find_self_dual_normal_basis, is_self_dual_basis, BasisF2n, Fe, FieldError, FieldSpec};
use crate::parallel::{chunk_ranges, with_threads};

pub use crate::gabidulin::DEFAULT_BUDGET;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QConstructError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Gabidulin(#[from] GabidulinError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("enumeration needs 2^{log2_required} vectors, budget is {budget}; enable sampling to get an upper bound")]
    BudgetExceeded { log2_required: u32, budget: u64 },
    #[error("minimum rank distance undefined: the code equals its symplectic dual, so there is nothing to minimize over")]
    DistanceUndefined,
}

type Result<T> = std::result::Result<T, QConstructError>;

fn invalid(msg: impl Into<String>) -> QConstructError {
    QConstructError::InvalidParameters(msg.into())
}

/// `⟨(a|b), (a'|b')⟩_S = a·b' + a'·b`.
pub fn symplectic_inner_product(u: &BitVector, v: &BitVector) -> Result<bool> {
    if u.len() != v.len() || !u.len().is_multiple_of(2) {
        return Err(LinAlgError::ShapeMismatch(format!("symplectic pairing of lengths {} and {}", u.len(), v.len())).into());
    }
    let h = u.len() / 2;
    Ok(u.slice(0, h).dot(&v.slice(h, h)) ^ v.slice(0, h).dot(&u.slice(h, h)))
}

/// Reshapes a length-`2mn` vector into the `m × 2n` matrix whose row `i` is
/// `(a_i | b_i)`.
pub fn m_map(v: &BitVector, m: usize, n: usize) -> Result<MatF2> {
    if v.len() != 2 * m * n {
        return Err(LinAlgError::ShapeMismatch(format!("expected length {}, got {}", 2 * m * n, v.len())).into());
    }
    let mut out = MatF2::zeros(m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            out.set(i, j, v.get(i * n + j));
            out.set(i, n + j, v.get(m * n + i * n + j));
        }
    }
    Ok(out)
}

pub fn m_unmap(mat: &MatF2) -> Result<BitVector> {
    let (m, w) = mat.shape();
    if w % 2 != 0 {
        return Err(LinAlgError::ShapeMismatch(format!("row width {w} is odd")).into());
    }
    let n = w / 2;
    let mut v = BitVector::zeros(2 * m * n);
    for i in 0..m {
        for j in 0..n {
            v.set(i * n + j, mat.get(i, j));
            v.set(m * n + i * n + j, mat.get(i, n + j));
        }
    }
    Ok(v)
}

/// Data for the Hermitian-to-symplectic expansion over GF(2^(2n)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuContext {
    field: FieldSpec,
    theta_basis: BasisF2n,
    t: MatF2,
    d: MatF2,
    d_inv: MatF2,
}

impl MuContext {
    /// Assembles `T` from the normal basis generated by `theta` (default: the
    /// first normal element) and solves `D T Dᵀ = S`.
    pub fn build(field: FieldSpec, theta: Option<Fe>) -> Result<Self> {
        let (theta_basis, t) = Self::assemble(field, theta)?;
        let d = alternating_congruence(&t)?;
        Self::finish(field, theta_basis, t, d)
    }

    /// As [`MuContext::build`] but with a caller-supplied `D`, which must
    /// satisfy `D T Dᵀ = S`.
    pub fn with_congruence(field: FieldSpec, theta: Option<Fe>, d: MatF2) -> Result<Self> {
        let (theta_basis, t) = Self::assemble(field, theta)?;
        Self::finish(field, theta_basis, t, d)
    }

    fn assemble(field: FieldSpec, theta: Option<Fe>) -> Result<(BasisF2n, MatF2)> {
        if !field.degree().is_multiple_of(2) {
            return Err(FieldError::OddDegree(field.degree()).into());
        }
        let basis = match theta {
            Some(th) => BasisF2n::normal(field, th)?,
            None => find_normal_basis(field)?,
        };
        let w = field.degree() as usize;
        let mut t = MatF2::zeros(w, w);
        for i in 0..w {
            for j in 0..w {
                t.set(i, j, t_form_bits(field, &basis, 1 << i, 1 << j));
            }
        }
        Ok((basis, t))
    }

    fn finish(field: FieldSpec, theta_basis: BasisF2n, t: MatF2, d: MatF2) -> Result<Self> {
        let w = t.rows();
        if d.shape() != (w, w) {
            return Err(LinAlgError::ShapeMismatch(format!("D must be {w}x{w}")).into());
        }
        let s = SymplecticGram::new(w / 2).into_matrix();
        if d.mul(&t)?.mul(&d.transpose())? != s {
            return Err(QConstructError::Verification("D T D^T differs from the standard symplectic form".into()));
        }
        let d_inv = d.inverse()?;
        Ok(Self { field, theta_basis, t, d, d_inv })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `n`, half the extension degree.
    pub fn half(&self) -> usize {
        self.field.degree() as usize / 2
    }

    pub fn theta_basis(&self) -> &BasisF2n {
        &self.theta_basis
    }

    pub fn theta(&self) -> Fe {
        self.theta_basis.elements()[0]
    }

    pub fn t(&self) -> &MatF2 {
        &self.t
    }

    pub fn d(&self) -> &MatF2 {
        &self.d
    }

    pub fn d_inv(&self) -> &MatF2 {
        &self.d_inv
    }

    /// `φ(v) = Σ v_j θ^(2^j)`.
    pub fn phi(&self, v: &BitVector) -> Result<Fe> {
        Ok(self.theta_basis.combine(v)?)
    }

    pub fn phi_inv(&self, x: Fe) -> Result<BitVector> {
        Ok(self.theta_basis.expand(x)?)
    }

    /// `c_1 + c_{n+1}` where `φ(x) φ(y)^(2^n) = Σ c_i θ^(2^(i-1))`.
    pub fn t_form(&self, x: &BitVector, y: &BitVector) -> Result<bool> {
        let px = self.phi(x)?;
        let py = self.phi(y)?;
        let coords = self.theta_basis.coords_bits((px * py.frobenius(self.half() as u32)).bits());
        Ok(((coords ^ (coords >> self.half())) & 1) == 1)
    }

    /// `e = φ⁻¹(x) D⁻¹`, a row `(a | b)` of width `2n`.
    pub fn expand_entry(&self, x: Fe) -> Result<BitVector> {
        Ok(self.d_inv.left_mul_vec(&self.phi_inv(x)?)?)
    }

    /// `Φ(c)`: each entry expanded by [`MuContext::expand_entry`] and
    /// interleaved into the global `(a … | b …)` layout.
    pub fn expand_vector(&self, c: &ExtVector) -> Result<BitVector> {
        if c.field() != self.field {
            return Err(FieldError::FieldMismatch.into());
        }
        let (layers, n) = (c.len(), self.half());
        let mut out = BitVector::zeros(2 * layers * n);
        for (i, x) in c.entries().iter().enumerate() {
            let e = self.expand_entry(*x)?;
            for j in 0..n {
                out.set(i * n + j, e.get(j));
                out.set(layers * n + i * n + j, e.get(n + j));
            }
        }
        Ok(out)
    }

    /// GF(2) generator matrix of `Φ` applied to the extension-field span of
    /// `rows`.
    pub fn expand_rows(&self, rows: &[ExtVector], layers: usize) -> Result<MatF2> {
        let w = self.field.degree();
        let mut out = Vec::with_capacity(rows.len() * w as usize);
        for r in rows {
            for j in 0..w {
                out.push(self.expand_vector(&r.scale(self.field.fe(1 << j))?)?);
            }
        }
        Ok(MatF2::from_rows(2 * layers * self.half(), &out)?)
    }
}

fn t_form_bits(field: FieldSpec, basis: &BasisF2n, x: u32, y: u32) -> bool {
    let half = field.degree() / 2;
    let px = basis.combine_bits(x);
    let py = basis.combine_bits(y);
    let coords = basis.coords_bits(field.mul_bits(px, field.frobenius_bits(py, half)));
    ((coords ^ (coords >> half)) & 1) == 1
}

/// A symplectically self-orthogonal subspace `C ⊂ GF(2)^(2mn)` given by
/// independent generator rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySymplecticCode {
    layers: usize,
    cells: usize,
    generators: MatF2,
}

impl BinarySymplecticCode {
    pub fn new(layers: usize, cells: usize, generators: MatF2) -> Result<Self> {
        if layers == 0 || cells == 0 {
            return Err(invalid("layers and cells must be positive"));
        }
        if generators.cols() != 2 * layers * cells {
            return Err(LinAlgError::ShapeMismatch(format!(
                "generators have {} columns, expected {}",
                generators.cols(),
                2 * layers * cells
            ))
            .into());
        }
        if generators.rank() != generators.rows() {
            return Err(QConstructError::Verification("generator rows are linearly dependent".into()));
        }
        let code = Self { layers, cells, generators };
        if let Some((i, j)) = code.first_non_orthogonal_pair() {
            return Err(QConstructError::Verification(format!("generators {i} and {j} have nonzero symplectic inner product")));
        }
        Ok(code)
    }

    /// Uses the canonical basis of the row space of `spanning`.
    pub fn from_span(layers: usize, cells: usize, spanning: &MatF2) -> Result<Self> {
        Self::new(layers, cells, spanning.row_basis())
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn generators(&self) -> &MatF2 {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.layers * self.cells
    }

    /// `mn − dim C`.
    pub fn logical_qubits(&self) -> usize {
        self.n_qubits() - self.dim()
    }

    /// `k` with `dim C = 2mk`, when the dimension has that form.
    pub fn template_k(&self) -> Option<usize> {
        self.dim().is_multiple_of(2 * self.layers).then(|| self.dim() / (2 * self.layers))
    }

    fn first_non_orthogonal_pair(&self) -> Option<(usize, usize)> {
        let swapped = self.generators.swap_halves().expect("even width");
        let rows = self.generators.rows();
        (0..rows).flat_map(|i| (i..rows).map(move |j| (i, j))).find(|&(i, j)| swapped.row(i).dot(&self.generators.row(j)))
    }

    pub fn is_self_orthogonal(&self) -> bool {
        self.first_non_orthogonal_pair().is_none()
    }

    /// Parameters with the distance not yet certified.
    pub fn params(&self) -> QuantumCodeParams {
        QuantumCodeParams { n: self.n_qubits(), k: self.logical_qubits(), d_r: None, certified: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumCodeParams {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "D_R")]
    pub d_r: Option<usize>,
    pub certified: bool,
}

impl QuantumCodeParams {
    pub fn with_certificate(&self, cert: &RankCertificate) -> Self {
        Self { d_r: Some(cert.d), certified: cert.certified, ..self.clone() }
    }
}

impl fmt::Display for QuantumCodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d_r {
            Some(d) => write!(f, "[[{}, {}, {}]]", self.n, self.k, d),
            None => write!(f, "[[{}, {}, ?]]", self.n, self.k),
        }
    }
}

/// `C^⊥S`: the kernel of the generator matrix with its halves swapped.
pub fn symplectic_dual(code: &BinarySymplecticCode) -> MatF2 {
    code.generators.swap_halves().expect("even width").kernel()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Proposed,
    Css,
}

/// Inputs recorded alongside a constructed code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: ConstructionKind,
    pub field: FieldSpec,
    pub alpha: Vec<String>,
    pub theta: Option<String>,
    #[serde(rename = "T")]
    pub t: Option<MatF2>,
    #[serde(rename = "D")]
    pub d: Option<MatF2>,
}

/// JSON exchange format for a constructed code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeBundle {
    pub m: usize,
    pub n: usize,
    pub generators: MatF2,
    pub params: QuantumCodeParams,
    pub provenance: Provenance,
}

impl CodeBundle {
    /// Re-validates the generators as a symplectic code.
    pub fn code(&self) -> Result<BinarySymplecticCode> {
        BinarySymplecticCode::new(self.m, self.n, self.generators.clone())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProposedOptions {
    /// GF(2^(2m)); defaults to the smallest irreducible modulus.
    pub field: Option<FieldSpec>,
    /// Self-dual basis used as evaluation points.
    pub alpha: Option<Vec<Fe>>,
    /// Normal-basis generator for `Φ`.
    pub theta: Option<Fe>,
    /// Replacement for the computed `D`.
    pub congruence: Option<MatF2>,
}

#[derive(Debug, Clone)]
pub struct ProposedCode {
    pub code: BinarySymplecticCode,
    pub params: QuantumCodeParams,
    pub classical: GabidulinCode,
    pub context: MuContext,
}

impl ProposedCode {
    pub fn bundle(&self) -> CodeBundle {
        CodeBundle {
            m: self.code.layers(),
            n: self.code.cells(),
            generators: self.code.generators().clone(),
            params: self.params.clone(),
            provenance: Provenance {
                construction: ConstructionKind::Proposed,
                field: self.context.field(),
                alpha: self.classical.alpha().to_hex(),
                theta: Some(self.context.theta().to_hex()),
                t: Some(self.context.t().clone()),
                d: Some(self.context.d().clone()),
            },
        }
    }

    /// `Φ(C^⊥H)` as a GF(2) matrix.
    pub fn expanded_hermitian_dual(&self) -> Result<MatF2> {
        let dual = hermitian_dual(&self.classical)?;
        self.context.expand_rows(&dual, self.code.layers())
    }
}

/// `Φ(Gab(α, k))` on `2m` layers of `m` cells.
///
/// Every hypothesis is checked at runtime: `α` self-dual, `Gab(α, k)`
/// Hermitian self-orthogonal, `Φ(C)` symplectically self-orthogonal.
pub fn build_proposed_code(m: usize, k: usize, opts: ProposedOptions) -> Result<ProposedCode> {
    if m < 1 || 2 * m > crate::gf2field::MAX_DEGREE as usize {
        return Err(invalid(format!("m = {m} outside 1..=16")));
    }
    if k < 1 || k >= m {
        return Err(invalid(format!("k = {k} must satisfy 1 <= k < m = {m}")));
    }
    let degree = 2 * m as u32;
    let field = match opts.field {
        Some(f) if f.degree() != degree => return Err(invalid(format!("field degree {} differs from 2m = {degree}", f.degree()))),
        Some(f) => f,
        None => FieldSpec::find_irreducible(degree)?,
    };
    let alpha = match opts.alpha {
        Some(a) => {
            if a.len() != 2 * m {
                return Err(invalid(format!("alpha has {} entries, expected {}", a.len(), 2 * m)));
            }
            if a.iter().any(|x| x.field() != field) {
                return Err(FieldError::FieldMismatch.into());
            }
            if !is_self_dual_basis(&a) {
                return Err(QConstructError::Verification("alpha is not a self-dual basis".into()));
            }
            a
        }
        None => find_self_dual_basis(field)?.elements().to_vec(),
    };
    let classical = GabidulinCode::new(ExtVector::new(field, alpha)?, k)?;
    if !is_hermitian_self_orthogonal(&classical)? {
        return Err(QConstructError::Verification("Gab(alpha, k) is not Hermitian self-orthogonal".into()));
    }
    let context = match opts.congruence {
        Some(d) => MuContext::with_congruence(field, opts.theta, d)?,
        None => MuContext::build(field, opts.theta)?,
    };
    let layers = 2 * m;
    let spanning = context.expand_rows(classical.generator(), layers)?;
    let code = BinarySymplecticCode::new(layers, m, spanning)?;
    let params = code.params();
    if params.k != 2 * m * (m - k) {
        return Err(QConstructError::Verification(format!("K = {} differs from 2m(m-k) = {}", params.k, 2 * m * (m - k))));
    }
    Ok(ProposedCode { code, params, classical, context })
}

#[derive(Debug, Clone)]
pub struct CssCode {
    pub code: BinarySymplecticCode,
    pub params: QuantumCodeParams,
    pub basis: BasisF2n,
    pub c_x: GabidulinCode,
    pub c_z: GabidulinCode,
}

impl CssCode {
    pub fn bundle(&self) -> CodeBundle {
        CodeBundle {
            m: self.code.layers(),
            n: self.code.cells(),
            generators: self.code.generators().clone(),
            params: self.params.clone(),
            provenance: Provenance {
                construction: ConstructionKind::Css,
                field: self.basis.field(),
                alpha: self.c_x.alpha().to_hex(),
                theta: self.basis.generator().map(|g| g.to_hex()),
                t: None,
                d: None,
            },
        }
    }
}

/// Component-major expansion of an extension-field vector in `basis`.
pub fn psi(v: &ExtVector, basis: &BasisF2n) -> Result<BitVector> {
    let mut bits = Vec::with_capacity(v.len() * basis.len());
    for x in v.entries() {
        bits.extend(basis.expand(*x)?.iter());
    }
    Ok(BitVector::from_bits(bits))
}

/// CSS code with X part `ψ(Gab(α, r))` and Z part `ψ(Gab(α^(2^r), s))` for a
/// self-dual normal `α` of GF(2^n), `n` odd.
pub fn build_css_code(n: usize, r: usize, s: usize) -> Result<CssCode> {
    if n.is_multiple_of(2) || n < 3 || n > crate::gf2field::MAX_DEGREE as usize {
        return Err(invalid(format!("n = {n} must be odd, between 3 and 31")));
    }
    if r < 1 || s < 1 || r + s >= n {
        return Err(invalid(format!("need r, s >= 1 and r + s < n; got r = {r}, s = {s}, n = {n}")));
    }
    let field = FieldSpec::find_irreducible(n as u32)?;
    let basis = find_self_dual_normal_basis(field)?;
    let alpha = ExtVector::new(field, basis.elements().to_vec())?;
    let c_x = GabidulinCode::new(alpha.clone(), r)?;
    let c_z = GabidulinCode::new(alpha.frobenius(r as u32), s)?;
    let half = n * n;
    let mut rows = Vec::new();
    for (code, x_side) in [(&c_x, true), (&c_z, false)] {
        for g in code.generator() {
            for j in 0..n {
                let p = psi(&g.scale(field.fe(1 << j))?, &basis)?;
                let zeros = BitVector::zeros(half);
                rows.push(if x_side { p.concat(&zeros) } else { zeros.concat(&p) });
            }
        }
    }
    let code = BinarySymplecticCode::new(n, n, MatF2::from_rows(2 * half, &rows)?)?;
    let params = code.params();
    if params.k != n * (n - r - s) {
        return Err(QConstructError::Verification(format!("K = {} differs from n(n-r-s) = {}", params.k, n * (n - r - s))));
    }
    Ok(CssCode { code, params, basis, c_x, c_z })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleOptions {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    pub budget: u64,
    pub threads: Option<usize>,
    /// Fallback when the dual is too large to enumerate.
    pub sample: Option<SampleOptions>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, threads: None, sample: None }
    }
}

/// Minimum of `rank M(v)` over `C^⊥S ∖ C`, attained by `witness`, the
/// lexicographically smallest minimizer among the vectors examined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCertificate {
    #[serde(rename = "D_R")]
    pub d: usize,
    pub witness: BitVector,
    pub witness_rank: usize,
    pub enumerated: u64,
    pub certified: bool,
}

fn extract_bits(words: &[u64], start: usize, len: usize) -> u64 {
    let (w, off) = (start / 64, start % 64);
    let mut v = words[w] >> off;
    if off != 0 && off + len > 64 {
        v |= words[w + 1] << (64 - off);
    }
    if len < 64 {
        v & ((1u64 << len) - 1)
    } else {
        v
    }
}

/// Rank of `M(v)` from packed words.
fn layer_rank(words: &[u64], layers: usize, cells: usize) -> usize {
    if 2 * cells > 64 {
        let v = BitVector::from_bits((0..2 * layers * cells).map(|i| (words[i / 64] >> (i % 64)) & 1 == 1));
        return m_map(&v, layers, cells).expect("length matches").rank();
    }
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for i in 0..layers {
        let a = extract_bits(words, i * cells, cells);
        let b = extract_bits(words, layers * cells + i * cells, cells);
        let mut v = a | (b << cells);
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
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

struct Best {
    rank: usize,
    words: Vec<u64>,
}

impl Best {
    fn none() -> Self {
        Self { rank: usize::MAX, words: Vec::new() }
    }

    fn offer(&mut self, rank: usize, words: &[u64]) -> bool {
        if rank < self.rank || (rank == self.rank && lex_cmp_words(words, &self.words) == Ordering::Less) {
            self.rank = rank;
            self.words = words.to_vec();
            return true;
        }
        false
    }

    fn merge(mut self, other: Best) -> Best {
        if other.rank != usize::MAX {
            self.offer(other.rank, &other.words);
        }
        self
    }
}

/// Candidate test shared by the exact and sampling paths: rank first, then
/// membership in `C` only when the vector could improve the running best.
fn consider(best: &mut Best, words: &[u64], scratch: &mut [u64], c_space: &RowSpace, layers: usize, cells: usize) {
    let rank = layer_rank(words, layers, cells);
    if rank == 0 || rank > best.rank {
        return;
    }
    if rank == best.rank && lex_cmp_words(words, &best.words) != Ordering::Less {
        return;
    }
    scratch.copy_from_slice(words);
    c_space.reduce_words(scratch);
    if scratch.iter().any(|&w| w != 0) {
        best.offer(rank, words);
    }
}

/// Minimum rank distance of `code` over `C^⊥S ∖ C`.
///
/// Exact mode enumerates the whole dual in Gray-code order, split into
/// contiguous ranges across workers. The result, witness included, does not
/// depend on the worker count.
pub fn certify_distance(code: &BinarySymplecticCode, opts: CertifyOptions) -> Result<RankCertificate> {
    let dual = symplectic_dual(code);
    if dual.rows() == code.dim() {
        return Err(QConstructError::DistanceUndefined);
    }
    let (layers, cells) = (code.layers(), code.cells());
    let c_space = RowSpace::new(code.generators());
    let basis: Vec<Vec<u64>> = (0..dual.rows()).map(|r| dual.row(r).words().to_vec()).collect();
    let stride = basis[0].len();
    let len = code.generators().cols();
    let bits = dual.rows() as u32;

    if bits >= 64 || (1u64 << bits) > opts.budget {
        let Some(sample) = opts.sample else {
            return Err(QConstructError::BudgetExceeded { log2_required: bits, budget: opts.budget });
        };
        let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
        let mut best = Best::none();
        let mut words = vec![0u64; stride];
        let mut scratch = vec![0u64; stride];
        for _ in 0..sample.samples {
            words.iter_mut().for_each(|w| *w = 0);
            for row in &basis {
                if rng.gen::<bool>() {
                    words.iter_mut().zip(row).for_each(|(w, x)| *w ^= x);
                }
            }
            consider(&mut best, &words, &mut scratch, &c_space, layers, cells);
        }
        if best.rank == usize::MAX {
            return Err(QConstructError::Verification("no sampled vector fell outside C".into()));
        }
        return Ok(RankCertificate {
            d: best.rank,
            witness: BitVector::from_words(len, best.words),
            witness_rank: best.rank,
            enumerated: sample.samples,
            certified: false,
        });
    }

    let total = 1u64 << bits;
    let scan = |(start, end): (u64, u64)| -> Best {
        let mut best = Best::none();
        let mut words = vec![0u64; stride];
        let mut scratch = vec![0u64; stride];
        let g0 = start ^ (start >> 1);
        for (p, row) in basis.iter().enumerate() {
            if (g0 >> p) & 1 == 1 {
                words.iter_mut().zip(row).for_each(|(w, x)| *w ^= x);
            }
        }
        for s in start..end {
            if s != start {
                let row = &basis[s.trailing_zeros() as usize];
                words.iter_mut().zip(row).for_each(|(w, x)| *w ^= x);
            }
            consider(&mut best, &words, &mut scratch, &c_space, layers, cells);
        }
        best
    };
    let best = with_threads(opts.threads, || {
        let chunks = rayon::current_num_threads() as u64 * 8;
        chunk_ranges(0, total, chunks).into_par_iter().map(scan).reduce(Best::none, Best::merge)
    });
    Ok(RankCertificate {
        d: best.rank,
        witness: BitVector::from_words(len, best.words),
        witness_rank: best.rank,
        enumerated: total,
        certified: true,
    })
}

/// An exact rational printed as `p/q (~0.xxxx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational(pub Ratio<u64>);

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        Self(Ratio::new(num, den))
    }

    pub fn approx(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} (~{:.4})", self.0.numer(), self.0.denom(), self.approx())
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", self.0.numer(), self.0.denom()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutColumn {
    pub label: String,
    pub layers: u64,
    pub cells: u64,
    #[serde(rename = "N")]
    pub n_qubits: u64,
    #[serde(rename = "K")]
    pub k_logical: u64,
    #[serde(rename = "D")]
    pub distance: u64,
    #[serde(rename = "R")]
    pub rate: Rational,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonTable {
    pub n: u64,
    pub k: u64,
    pub columns: Vec<LayoutColumn>,
    /// `δ_proposed / δ` for the `2n−1` and `2n+1` square layouts.
    pub delta_ratio_minus: Rational,
    pub delta_ratio_plus: Rational,
}

/// Closed-form parameters of the square CSS layouts of side `2n ± 1` against
/// the proposed `2n × n` layout at equal distance `k + 1`.
pub fn compare_table(n: u64, k: u64) -> Result<ComparisonTable> {
    if k < 1 || n <= k {
        return Err(invalid(format!("need n > k >= 1, got n = {n}, k = {k}")));
    }
    let d = k + 1;
    let square = |side: u64| {
        let inner = side - 2 * k;
        LayoutColumn {
            label: format!("{side}x{side}"),
            layers: side,
            cells: side,
            n_qubits: side * side,
            k_logical: side * inner,
            distance: d,
            rate: Rational::new(inner, side),
            delta: Rational::new(d, side * side),
        }
    };
    let minus = square(2 * n - 1);
    let plus = square(2 * n + 1);
    let proposed = LayoutColumn {
        label: format!("{}x{}", 2 * n, n),
        layers: 2 * n,
        cells: n,
        n_qubits: 2 * n * n,
        k_logical: 2 * n * (n - k),
        distance: d,
        rate: Rational::new(n - k, n),
        delta: Rational::new(d, 2 * n * n),
    };
    let delta_ratio_minus = Rational(proposed.delta.0 / minus.delta.0);
    let delta_ratio_plus = Rational(proposed.delta.0 / plus.delta.0);
    Ok(ComparisonTable { n, k, columns: vec![minus, plus, proposed], delta_ratio_minus, delta_ratio_plus })
}
