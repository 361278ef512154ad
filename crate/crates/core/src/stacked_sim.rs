//! Stacked Pauli errors on an `m`-layer, `n`-cell memory and their
//! propagation through transversal Clifford gates.
//!
//! A gate `U^{⊗m}` acts on every layer's `(x | z)` row by the same `2n × 2n`
//! symplectic matrix `A`, so a stacked error `E` (an `m × 2n` bit matrix)
//! propagates to `E·A`. Faults touch at most two cells, which limits their
//! error to four columns and their rank to four.

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::f2linalg::{BitVector, LinAlgError, MatF2, SymplecticGram};
use crate::parallel::with_threads;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
    #[error("fault cells ({0}, {1}) must be distinct and below {2}")]
    BadCells(usize, usize, usize),
    #[error("fault position {0} is repeated or not below the gate count {1}")]
    BadFaultPosition(usize, usize),
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("invalid simulation parameters: {0}")]
    InvalidParameters(String),
}

type Result<T> = std::result::Result<T, SimError>;

/// SplitMix64 finalizer applied to `seed + (index + 1)·γ`; gives independent
/// per-trial seeds from one user seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `i^phase_exp · ⊗_{i,j} X^{x_ij} Z^{z_ij}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    phase_exp: u8,
    x: MatF2,
    z: MatF2,
}

impl PauliString {
    pub fn identity(layers: usize, cells: usize) -> Self {
        Self { phase_exp: 0, x: MatF2::zeros(layers, cells), z: MatF2::zeros(layers, cells) }
    }

    pub fn new(phase_exp: u8, x: MatF2, z: MatF2) -> Result<Self> {
        if x.shape() != z.shape() {
            return Err(SimError::Shape(format!("x is {:?}, z is {:?}", x.shape(), z.shape())));
        }
        Ok(Self { phase_exp: phase_exp % 4, x, z })
    }

    /// Phase-free operator for a row `(a_{1,1} … a_{m,n} | b_{1,1} … b_{m,n})`.
    pub fn from_symplectic(v: &BitVector, layers: usize, cells: usize) -> Result<Self> {
        if v.len() != 2 * layers * cells {
            return Err(SimError::Shape(format!("vector of length {} for {layers}x{cells}", v.len())));
        }
        let mut p = Self::identity(layers, cells);
        for i in 0..layers {
            for j in 0..cells {
                p.x.set(i, j, v.get(i * cells + j));
                p.z.set(i, j, v.get(layers * cells + i * cells + j));
            }
        }
        Ok(p)
    }

    /// Parses `[phase] L1 | L2 | …` where each layer is a word over `IXYZ`
    /// and the optional phase is one of `+1`, `+i`, `-1`, `-i`. Layers may
    /// also be separated by newlines. `Y` is read as `iXZ`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut body = text.trim();
        let mut phase = 0u8;
        for (prefix, p) in [("+1", 0u8), ("+i", 1), ("-1", 2), ("-i", 3), ("−1", 2), ("−i", 3)] {
            if let Some(rest) = body.strip_prefix(prefix) {
                phase = p;
                body = rest;
                break;
            }
        }
        let layers: Vec<&str> = body.split(['|', '\n']).map(str::trim).filter(|s| !s.is_empty()).collect();
        let cells = layers.first().map_or(0, |l| l.chars().count());
        if layers.is_empty() || cells == 0 {
            return Err(SimError::Parse(format!("no layers in {text:?}")));
        }
        let mut p = Self::identity(layers.len(), cells);
        p.phase_exp = phase;
        for (i, layer) in layers.iter().enumerate() {
            if layer.chars().count() != cells {
                return Err(SimError::Parse(format!("layer {i} has a different width")));
            }
            for (j, ch) in layer.chars().enumerate() {
                let (x, z) = match ch {
                    'I' => (false, false),
                    'X' => (true, false),
                    'Z' => (false, true),
                    'Y' => {
                        p.phase_exp = (p.phase_exp + 1) % 4;
                        (true, true)
                    }
                    other => return Err(SimError::Parse(format!("unexpected letter {other:?}"))),
                };
                p.x.set(i, j, x);
                p.z.set(i, j, z);
            }
        }
        Ok(p)
    }

    pub fn layers(&self) -> usize {
        self.x.rows()
    }

    pub fn cells(&self) -> usize {
        self.x.cols()
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn x_bits(&self) -> &MatF2 {
        &self.x
    }

    pub fn z_bits(&self) -> &MatF2 {
        &self.z
    }

    fn y_count(&self) -> usize {
        let mut n = 0;
        for i in 0..self.layers() {
            for j in 0..self.cells() {
                n += (self.x.get(i, j) && self.z.get(i, j)) as usize;
            }
        }
        n
    }

    /// Layers as letter words, phase dropped.
    pub fn letters(&self) -> Vec<String> {
        (0..self.layers())
            .map(|i| {
                (0..self.cells())
                    .map(|j| match (self.x.get(i, j), self.z.get(i, j)) {
                        (false, false) => 'I',
                        (true, false) => 'X',
                        (false, true) => 'Z',
                        (true, true) => 'Y',
                    })
                    .collect()
            })
            .collect()
    }

    fn check_shape(&self, other: &PauliString) -> Result<()> {
        if self.x.shape() != other.x.shape() {
            return Err(SimError::Shape(format!("{:?} vs {:?}", self.x.shape(), other.x.shape())));
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    /// Each `XZ` site is shown as `Y`, which costs a factor `-i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = (self.phase_exp as usize + 4 - self.y_count() % 4) % 4;
        let prefix = ["+1", "+i", "-1", "-i"][shown];
        write!(f, "{prefix} {}", self.letters().join(" | "))
    }
}

/// Phase-free `m × 2n` image of a Pauli string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StackedError(MatF2);

impl StackedError {
    pub fn new(matrix: MatF2) -> Result<Self> {
        if !matrix.cols().is_multiple_of(2) {
            return Err(SimError::Shape(format!("{} columns is odd", matrix.cols())));
        }
        Ok(Self(matrix))
    }

    pub fn zeros(layers: usize, cells: usize) -> Self {
        Self(MatF2::zeros(layers, 2 * cells))
    }

    pub fn matrix(&self) -> &MatF2 {
        &self.0
    }

    pub fn layers(&self) -> usize {
        self.0.rows()
    }

    pub fn cells(&self) -> usize {
        self.0.cols() / 2
    }

    pub fn xor(&self, other: &StackedError) -> Result<StackedError> {
        Ok(Self(self.0.add(&other.0)?))
    }
}

/// `(x_{i,1} … x_{i,n} | z_{i,1} … z_{i,n})`.
pub fn mu_layer(p: &PauliString, layer: usize) -> BitVector {
    p.x.row(layer).concat(&p.z.row(layer))
}

pub fn mu_map(p: &PauliString) -> StackedError {
    let rows: Vec<BitVector> = (0..p.layers()).map(|i| mu_layer(p, i)).collect();
    StackedError(MatF2::from_rows(2 * p.cells(), &rows).expect("rows share a width"))
}

pub fn error_rank(e: &StackedError) -> usize {
    e.0.rank()
}

/// Sitewise `X^a Z^b · X^c Z^d = (−1)^{bc} X^{a+c} Z^{b+d}`.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.check_shape(q)?;
    let mut sign = 0usize;
    for i in 0..p.layers() {
        sign += (p.z.row(i).dot(&q.x.row(i))) as usize;
    }
    Ok(PauliString {
        phase_exp: ((p.phase_exp as usize + q.phase_exp as usize + 2 * sign) % 4) as u8,
        x: p.x.add(&q.x)?,
        z: p.z.add(&q.z)?,
    })
}

/// Symplectic pairing of the flattened images.
fn symplectic_pairing(p: &PauliString, q: &PauliString) -> bool {
    (0..p.layers()).fold(false, |acc, i| acc ^ p.x.row(i).dot(&q.z.row(i)) ^ q.x.row(i).dot(&p.z.row(i)))
}

/// Power of `i` relating `PQ` and `QP`: 0 when they commute, 2 when they
/// anticommute.
pub fn commutation_phase(p: &PauliString, q: &PauliString) -> Result<u8> {
    let pq = pauli_mul(p, q)?;
    let qp = pauli_mul(q, p)?;
    Ok((pq.phase_exp + 4 - qp.phase_exp) % 4)
}

pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.check_shape(q)?;
    let by_form = !symplectic_pairing(p, q);
    debug_assert_eq!(by_form, commutation_phase(p, q)? == 0);
    Ok(by_form)
}

/// The symplectic action `A` of a single-layer Clifford on `(x | z)` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliffordSymplectic {
    cells: usize,
    a: MatF2,
}

impl CliffordSymplectic {
    /// Checks `A Λ Aᵀ = Λ`, which also makes `A` invertible.
    pub fn new(a: MatF2) -> Result<Self> {
        let (r, c) = a.shape();
        if r != c || r % 2 != 0 {
            return Err(SimError::Shape(format!("expected an even square matrix, got {r}x{c}")));
        }
        let lambda = SymplecticGram::new(r / 2).into_matrix();
        if a.mul(&lambda)?.mul(&a.transpose())? != lambda {
            return Err(SimError::NotSymplectic);
        }
        Ok(Self { cells: r / 2, a })
    }

    pub fn identity(cells: usize) -> Self {
        Self { cells, a: MatF2::identity(2 * cells) }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn matrix(&self) -> &MatF2 {
        &self.a
    }
}

/// Right-multiplies every row of `a` by the transvection
/// `v ↦ v + ⟨v, h⟩_S h`.
fn apply_transvection(a: &mut MatF2, h: &BitVector) {
    let n = h.len() / 2;
    let h_swapped = h.slice(n, n).concat(&h.slice(0, n));
    for r in 0..a.rows() {
        let row = a.row(r);
        if row.dot(&h_swapped) {
            for c in 0..h.len() {
                if h.get(c) {
                    a.set(r, c, !a.get(r, c));
                }
            }
        }
    }
}

/// Swaps cells `i` and `j` in both halves of every row.
fn apply_cell_swap(a: &mut MatF2, n: usize, i: usize, j: usize) {
    for r in 0..a.rows() {
        for off in [0, n] {
            let (u, v) = (a.get(r, off + i), a.get(r, off + j));
            a.set(r, off + i, v);
            a.set(r, off + j, u);
        }
    }
}

/// Product of `count` random transvections, each followed by a random cell
/// swap, starting from the identity.
pub fn random_clifford_symplectic_with(cells: usize, count: usize, rng: &mut impl Rng) -> Result<CliffordSymplectic> {
    let w = 2 * cells;
    let mut a = MatF2::identity(w);
    for _ in 0..count {
        let h = loop {
            let h = BitVector::from_bits((0..w).map(|_| rng.gen::<bool>()));
            if !h.is_zero() {
                break h;
            }
        };
        apply_transvection(&mut a, &h);
        if cells > 1 {
            let i = rng.gen_range(0..cells);
            let j = rng.gen_range(0..cells);
            apply_cell_swap(&mut a, cells, i, j);
        }
    }
    CliffordSymplectic::new(a)
}

/// Random symplectic matrix from `2n + 2` transvections, deterministic in
/// `seed`.
pub fn random_clifford_symplectic(cells: usize, seed: u64) -> CliffordSymplectic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_clifford_symplectic_with(cells, 2 * cells + 2, &mut rng).expect("transvections and swaps are symplectic")
}

/// `E · A`.
pub fn propagate(e: &StackedError, u: &CliffordSymplectic) -> Result<StackedError> {
    if e.cells() != u.cells {
        return Err(SimError::Shape(format!("error has {} cells, gate acts on {}", e.cells(), u.cells)));
    }
    Ok(StackedError(e.0.mul(&u.a)?))
}

/// Uniform error on columns `{c1, c2, n+c1, n+c2}` of every layer.
pub fn random_two_cell_fault_with(layers: usize, cells: usize, pair: (usize, usize), rng: &mut impl Rng) -> Result<StackedError> {
    let (c1, c2) = pair;
    if c1 == c2 || c1 >= cells || c2 >= cells {
        return Err(SimError::BadCells(c1, c2, cells));
    }
    let mut e = MatF2::zeros(layers, 2 * cells);
    for i in 0..layers {
        for c in [c1, c2, cells + c1, cells + c2] {
            e.set(i, c, rng.gen::<bool>());
        }
    }
    Ok(StackedError(e))
}

pub fn random_two_cell_fault(layers: usize, cells: usize, pair: (usize, usize), seed: u64) -> Result<StackedError> {
    random_two_cell_fault_with(layers, cells, pair, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitOutcome {
    /// Accumulated error at the circuit output.
    pub q: StackedError,
    pub t: usize,
    pub rank_q: usize,
    pub bound_ok: bool,
    /// `Σ rank(P^(t))` over the drawn faults.
    pub fault_rank_sum: usize,
    /// Propagation steps whose rank was compared before and after.
    pub invariance_checks: usize,
    pub invariance_violations: usize,
}

/// Runs `gates` in order; after each gate listed in `fault_positions` a
/// two-cell fault is drawn and pushed through the remaining gates. Returns
/// the XOR of all propagated faults and the `rank(Q) ≤ 4t` verdict.
pub fn simulate_faulty_circuit(
    layers: usize,
    cells: usize,
    gates: &[CliffordSymplectic],
    fault_positions: &[usize],
    seed: u64,
) -> Result<CircuitOutcome> {
    if cells < 2 {
        return Err(SimError::InvalidParameters("two-cell faults need at least two cells".into()));
    }
    if let Some(g) = gates.iter().find(|g| g.cells != cells) {
        return Err(SimError::Shape(format!("gate acts on {} cells, memory has {cells}", g.cells)));
    }
    let mut faulty = vec![false; gates.len()];
    for &p in fault_positions {
        if p >= gates.len() || faulty[p] {
            return Err(SimError::BadFaultPosition(p, gates.len()));
        }
        faulty[p] = true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = StackedError::zeros(layers, cells);
    let (mut fault_rank_sum, mut invariance_checks, mut invariance_violations) = (0, 0, 0);
    for (step, gate) in gates.iter().enumerate() {
        // Faults already in Q travel through this gate along with it.
        let before = error_rank(&q);
        q = propagate(&q, gate)?;
        invariance_checks += 1;
        invariance_violations += (error_rank(&q) != before) as usize;
        if faulty[step] {
            let picked = sample(&mut rng, cells, 2);
            let fault = random_two_cell_fault_with(layers, cells, (picked.index(0), picked.index(1)), &mut rng)?;
            fault_rank_sum += error_rank(&fault);
            q = q.xor(&fault)?;
        }
    }
    let t = fault_positions.len();
    let rank_q = error_rank(&q);
    Ok(CircuitOutcome { q, t, rank_q, bound_ok: rank_q <= 4 * t, fault_rank_sum, invariance_checks, invariance_violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialConfig {
    pub layers: usize,
    pub cells: usize,
    pub gates: usize,
    /// Each trial draws `t` uniformly from `0..=max_faults`.
    pub max_faults: usize,
    pub trials: u64,
    pub seed: u64,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub trial: u64,
    pub t: usize,
    pub rank_q: usize,
    pub bound_ok: bool,
    #[serde(skip)]
    pub fault_rank_sum: usize,
    #[serde(skip)]
    pub invariance_checks: usize,
    #[serde(skip)]
    pub invariance_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: u64,
    pub violations: u64,
    pub invariance_checks: u64,
    pub invariance_violations: u64,
    pub subadditivity_violations: u64,
    /// Largest `rank(Q) / 4t` over trials with at least one fault.
    pub max_ratio: f64,
}

fn run_trial(cfg: &TrialConfig, trial: u64) -> Result<TrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, trial));
    let gates: Vec<CliffordSymplectic> = (0..cfg.gates)
        .map(|_| random_clifford_symplectic_with(cfg.cells, 2 * cfg.cells + 2, &mut rng))
        .collect::<Result<_>>()?;
    let t = rng.gen_range(0..=cfg.max_faults.min(cfg.gates));
    let mut positions = sample(&mut rng, cfg.gates, t).into_vec();
    positions.sort_unstable();
    let outcome = simulate_faulty_circuit(cfg.layers, cfg.cells, &gates, &positions, rng.gen())?;
    Ok(TrialReport {
        trial,
        t: outcome.t,
        rank_q: outcome.rank_q,
        bound_ok: outcome.bound_ok,
        fault_rank_sum: outcome.fault_rank_sum,
        invariance_checks: outcome.invariance_checks,
        invariance_violations: outcome.invariance_violations,
    })
}

/// Independent random circuits, seeded per trial with [`derive_seed`], so
/// the reports do not depend on the thread count.
pub fn run_trials(cfg: &TrialConfig) -> Result<(Vec<TrialReport>, TrialSummary)> {
    if cfg.trials == 0 || cfg.gates == 0 {
        return Err(SimError::InvalidParameters("trials and gates must be positive".into()));
    }
    let reports: Vec<TrialReport> = with_threads(cfg.threads, || (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect::<Result<_>>())?;
    let summary = TrialSummary {
        trials: cfg.trials,
        violations: reports.iter().filter(|r| !r.bound_ok).count() as u64,
        invariance_checks: reports.iter().map(|r| r.invariance_checks as u64).sum(),
        invariance_violations: reports.iter().map(|r| r.invariance_violations as u64).sum(),
        subadditivity_violations: reports.iter().filter(|r| r.rank_q > r.fault_rank_sum).count() as u64,
        max_ratio: reports.iter().filter(|r| r.t > 0).map(|r| r.rank_q as f64 / (4 * r.t) as f64).fold(0.0, f64::max),
    };
    Ok((reports, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_pauli(rng: &mut ChaCha8Rng, m: usize, n: usize) -> PauliString {
        let mut p = PauliString::identity(m, n);
        p.phase_exp = rng.gen_range(0..4);
        for i in 0..m {
            for j in 0..n {
                p.x.set(i, j, rng.gen());
                p.z.set(i, j, rng.gen());
            }
        }
        p
    }

    #[test]
    fn mu_of_simple_strings() {
        assert!(mu_map(&PauliString::identity(3, 2)).matrix().is_zero());
        let x = PauliString::parse("X").unwrap();
        assert_eq!(mu_map(&x).matrix(), &MatF2::parse_rows(&["10"]).unwrap());
        assert_eq!(error_rank(&mu_map(&x)), 1);
        let y = PauliString::parse("Y").unwrap();
        assert_eq!(mu_map(&y).matrix(), &MatF2::parse_rows(&["11"]).unwrap());
        assert_eq!(y.phase_exp(), 1);
        assert_eq!(y.to_string(), "+1 Y");
        assert_eq!(error_rank(&StackedError::zeros(4, 4)), 0);
    }

    #[test]
    fn parse_and_render() {
        let p = PauliString::parse("-i XI | YX | IX | IY").unwrap();
        assert_eq!((p.layers(), p.cells()), (4, 2));
        assert_eq!(p.phase_exp(), (3 + 2) % 4);
        assert_eq!(p.to_string(), "-i XI | YX | IX | IY");
        assert_eq!(PauliString::parse(&p.to_string()).unwrap(), p);
        assert_eq!(PauliString::parse("XZ\nZX").unwrap(), PauliString::parse("+1 XZ | ZX").unwrap());
        // XZ with no phase is -iY.
        let v = BitVector::parse("11").unwrap();
        assert_eq!(PauliString::from_symplectic(&v, 1, 1).unwrap().to_string(), "-i Y");
        for bad in ["", "XQ", "XI | X", "+1"] {
            assert!(PauliString::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn multiplication_rules() {
        let x = PauliString::parse("X").unwrap();
        let z = PauliString::parse("Z").unwrap();
        let xz = pauli_mul(&x, &z).unwrap();
        let zx = pauli_mul(&z, &x).unwrap();
        assert_eq!((zx.phase_exp + 4 - xz.phase_exp) % 4, 2);
        // XZ = -iY, so i·XZ = Y.
        assert_eq!(xz.phase_exp(), 0);
        assert_eq!(pauli_mul(&PauliString::parse("+i I").unwrap(), &xz).unwrap(), PauliString::parse("Y").unwrap());
        let y = PauliString::parse("Y").unwrap();
        assert_eq!(pauli_mul(&y, &y).unwrap(), PauliString::identity(1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let p = random_pauli(&mut rng, 3, 4);
            let q = random_pauli(&mut rng, 3, 4);
            assert_eq!(pauli_mul(&p, &PauliString::identity(3, 4)).unwrap(), p);
            assert_eq!(mu_map(&pauli_mul(&p, &q).unwrap()), mu_map(&p).xor(&mu_map(&q)).unwrap());
        }
        assert!(pauli_mul(&x, &PauliString::identity(1, 2)).is_err());
    }

    #[test]
    fn commutation_three_ways() {
        let x = PauliString::parse("X").unwrap();
        let z = PauliString::parse("Z").unwrap();
        assert!(commutes(&x, &x).unwrap());
        assert!(!commutes(&x, &z).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let p = random_pauli(&mut rng, 2, 3);
            let q = random_pauli(&mut rng, 2, 3);
            let flat_p = p.x.row_vectors().iter().chain(&p.z.row_vectors()).fold(BitVector::zeros(0), |a, r| a.concat(r));
            let flat_q = q.x.row_vectors().iter().chain(&q.z.row_vectors()).fold(BitVector::zeros(0), |a, r| a.concat(r));
            let form = SymplecticGram::new(6).into_matrix().bilinear(&flat_p, &flat_q).unwrap();
            let by_phase = commutation_phase(&p, &q).unwrap();
            assert!(by_phase == 0 || by_phase == 2);
            assert_eq!(commutes(&p, &q).unwrap(), !form);
            assert_eq!(commutes(&p, &q).unwrap(), by_phase == 0);
        }
    }

    #[test]
    fn random_cliffords_are_symplectic() {
        for n in [1, 2, 4, 8] {
            let lambda = SymplecticGram::new(n).into_matrix();
            for seed in 0..100 {
                let u = random_clifford_symplectic(n, seed);
                let a = u.matrix();
                assert_eq!(a.mul(&lambda).unwrap().mul(&a.transpose()).unwrap(), lambda);
                assert!(a.is_invertible());
            }
        }
        assert_eq!(random_clifford_symplectic(4, 7), random_clifford_symplectic(4, 7));
        assert_ne!(random_clifford_symplectic(4, 7), random_clifford_symplectic(4, 8));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_clifford_symplectic_with(3, 0, &mut rng).unwrap(), CliffordSymplectic::identity(3));
        assert_eq!(CliffordSymplectic::new(MatF2::parse_rows(&["11", "01"]).unwrap()), Ok(CliffordSymplectic { cells: 1, a: MatF2::parse_rows(&["11", "01"]).unwrap() }));
        assert_eq!(CliffordSymplectic::new(MatF2::parse_rows(&["1100", "0100", "0010", "0001"]).unwrap()), Err(SimError::NotSymplectic));
    }

    #[test]
    fn propagation_preserves_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let e = StackedError(MatF2::from_rows(8, &(0..5).map(|_| BitVector::from_bits((0..8).map(|_| rng.gen::<bool>()))).collect::<Vec<_>>()).unwrap());
            let u = random_clifford_symplectic(4, rng.gen());
            assert_eq!(error_rank(&propagate(&e, &u).unwrap()), error_rank(&e));
        }
        // Rank invariance needs only invertibility, not the symplectic property.
        let mut checked = 0;
        while checked < 200 {
            let a = MatF2::from_rows(8, &(0..8).map(|_| BitVector::from_bits((0..8).map(|_| rng.gen::<bool>()))).collect::<Vec<_>>()).unwrap();
            if !a.is_invertible() {
                continue;
            }
            let e = MatF2::from_rows(8, &(0..6).map(|_| BitVector::from_bits((0..8).map(|_| rng.gen::<bool>()))).collect::<Vec<_>>()).unwrap();
            assert_eq!(e.mul(&a).unwrap().rank(), e.rank());
            checked += 1;
        }
        let e = StackedError(MatF2::parse_rows(&["1011", "0110"]).unwrap());
        assert_eq!(propagate(&e, &CliffordSymplectic::identity(2)).unwrap(), e);
        assert!(propagate(&StackedError::zeros(3, 2), &random_clifford_symplectic(2, 1)).unwrap().matrix().is_zero());
        assert!(propagate(&e, &CliffordSymplectic::identity(3)).is_err());
    }

    #[test]
    fn two_cell_faults() {
        for seed in 0..300 {
            let e = random_two_cell_fault(6, 5, (1, 3), seed).unwrap();
            assert!(error_rank(&e) <= 4);
            for r in 0..6 {
                for c in 0..10 {
                    if ![1, 3, 6, 8].contains(&c) {
                        assert!(!e.matrix().get(r, c));
                    }
                }
            }
        }
        assert_eq!(random_two_cell_fault(2, 3, (1, 1), 0), Err(SimError::BadCells(1, 1, 3)));
        assert!(random_two_cell_fault(2, 3, (0, 3), 0).is_err());
    }

    #[test]
    fn circuit_simulation() {
        let gates: Vec<_> = (0..6).map(|s| random_clifford_symplectic(4, s)).collect();
        let none = simulate_faulty_circuit(5, 4, &gates, &[], 1).unwrap();
        assert!(none.q.matrix().is_zero() && none.bound_ok);
        let identity = vec![CliffordSymplectic::identity(4); 3];
        let one = simulate_faulty_circuit(5, 4, &identity, &[1], 2).unwrap();
        assert!(one.rank_q <= 4 && one.bound_ok);
        for seed in 0..50 {
            let out = simulate_faulty_circuit(6, 4, &gates, &[0, 2, 5], seed).unwrap();
            assert!(out.bound_ok);
            assert!(out.rank_q <= out.fault_rank_sum);
            assert_eq!(out.invariance_violations, 0);
        }
        assert_eq!(simulate_faulty_circuit(2, 4, &gates, &[6], 0).unwrap_err(), SimError::BadFaultPosition(6, 6));
        assert_eq!(simulate_faulty_circuit(2, 4, &gates, &[1, 1], 0).unwrap_err(), SimError::BadFaultPosition(1, 6));
    }

    #[test]
    fn trials_are_thread_independent() {
        let cfg = TrialConfig { layers: 4, cells: 4, gates: 8, max_faults: 3, trials: 200, seed: 7, threads: Some(1) };
        let (a, sa) = run_trials(&cfg).unwrap();
        let (b, sb) = run_trials(&TrialConfig { threads: Some(8), ..cfg }).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert_eq!((sa.violations, sa.invariance_violations, sa.subadditivity_violations), (0, 0, 0));
    }

    #[test]
    fn seed_derivation_spreads() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
