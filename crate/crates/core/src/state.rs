//! Register states: n-qubit amplitude vectors, Born-rule measurement,
//! reduced density matrices and Schmidt-rank entanglement diagnostics.
//!
//! Conventions, used everywhere in this crate:
//! * qubits are numbered 1..=n;
//! * qubit 1 is the *most significant* bit of the basis index, so the basis
//!   state |i1 i2 ... in> sits at index i1*2^(n-1) + ... + in;
//! * algebraic identities hold to 1e-10, validity guards trip at 1e-8.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError, MAX_QUBITS};
use crate::linalg;
use crate::rng::{rng_from_seed, SimRng};

/// Tolerance for algebraic identities (normalization, Hermiticity, ...).
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Looser tolerance used when rejecting invalid inputs.
pub const GUARD_TOL: f64 = 1e-8;

/// An ordered string over {0, 1}. Bit 0 of the sequence is qubit 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitstring(Vec<u8>);

impl Bitstring {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(SimError::invalid_argument("bitstring entries must be 0 or 1"));
        }
        Ok(Bitstring(bits))
    }

    /// The n low-order bits of `index`, most significant first.
    pub fn from_index(n: usize, index: usize) -> Self {
        Bitstring((0..n).map(|k| ((index >> (n - 1 - k)) & 1) as u8).collect())
    }

    /// Basis index under the qubit-1-most-significant convention.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

impl From<&[u8]> for Bitstring {
    fn from(bits: &[u8]) -> Self {
        Bitstring::new(bits.to_vec()).expect("bits must be 0/1")
    }
}

/// The register of the simulated machine: 2^n complex amplitudes, unit norm.
/// Immutable once built; operations return fresh states.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// |0...0> on n qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_capacity(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { num_qubits, amplitudes })
    }

    /// Build a state from raw amplitudes; the norm must already be 1.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_capacity(num_qubits)?;
        if amplitudes.len() != 1 << num_qubits {
            return Err(SimError::invalid_argument(format!(
                "expected {} amplitudes for {} qubits, got {}",
                1usize << num_qubits,
                num_qubits,
                amplitudes.len()
            )));
        }
        let state = QuantumState { num_qubits, amplitudes };
        if (state.norm() - 1.0).abs() > GUARD_TOL {
            return Err(SimError::invalid_state(format!(
                "state norm {} is not 1",
                state.norm()
            )));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Bit mask selecting `qubit` in this register (qubit 1 = MSB).
    pub fn mask_of(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(SimError::invalid_argument(format!(
                "qubit {} out of range 1..={}",
                qubit, self.num_qubits
            )));
        }
        Ok(1usize << (self.num_qubits - qubit))
    }

    /// Tensor product self (x) other; self supplies the high-order qubits.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let n = self.num_qubits + other.num_qubits;
        check_capacity(n)?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(QuantumState { num_qubits: n, amplitudes })
    }

    /// Crate-internal: take ownership of the amplitude buffer for in-place
    /// pipelines. Callers are responsible for restoring the invariants.
    pub(crate) fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub(crate) fn from_parts_unchecked(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        QuantumState { num_qubits, amplitudes }
    }
}

/// A dim x dim density matrix (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.dim, &self.entries)
    }

    /// Largest entrywise deviation from another matrix of the same dim.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if (self.entry(i, j) - self.entry(j, i).conj()).norm() > ALGEBRA_TOL {
                    return Err(SimError::invalid_state("density matrix not Hermitian"));
                }
            }
        }
        if (self.trace() - Complex64::new(1.0, 0.0)).norm() > ALGEBRA_TOL {
            return Err(SimError::invalid_state("density matrix trace is not 1"));
        }
        if self.eigenvalues().iter().any(|&e| e < -ALGEBRA_TOL) {
            return Err(SimError::invalid_state("density matrix has a negative eigenvalue"));
        }
        Ok(())
    }
}

/// Result of a measurement: the observed bits, their Born probability, and
/// the collapsed register.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub bits: Bitstring,
    pub probability: f64,
    pub post_state: QuantumState,
}

fn check_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(SimError::invalid_argument("register needs at least 1 qubit"));
    }
    if num_qubits > MAX_QUBITS {
        return Err(SimError::capacity(num_qubits));
    }
    Ok(())
}

/// The basis state |bits> on n qubits.
pub fn basis_state(n: usize, bits: &Bitstring) -> Result<QuantumState> {
    check_capacity(n)?;
    if bits.len() != n {
        return Err(SimError::invalid_argument(format!(
            "bitstring length {} does not match {} qubits",
            bits.len(),
            n
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    amplitudes[bits.to_index()] = Complex64::new(1.0, 0.0);
    Ok(QuantumState { num_qubits: n, amplitudes })
}

fn check_normalized(state: &QuantumState) -> Result<()> {
    if (state.norm() - 1.0).abs() > GUARD_TOL {
        return Err(SimError::invalid_state(format!(
            "state norm {} deviates from 1 by more than {}",
            state.norm(),
            GUARD_TOL
        )));
    }
    Ok(())
}

/// Measure every qubit. Deterministic for a given seed.
pub fn measure_all(state: &QuantumState, seed: u64) -> Result<MeasurementOutcome> {
    check_normalized(state)?;
    let mut rng = rng_from_seed(seed);
    measure_all_with_rng(state, &mut rng)
}

/// Measurement core used by multi-step protocols that thread one rng.
pub fn measure_all_with_rng(state: &QuantumState, rng: &mut SimRng) -> Result<MeasurementOutcome> {
    let index = sample_index(&state.amplitudes, rng);
    let bits = Bitstring::from_index(state.num_qubits, index);
    let probability = state.amplitudes[index].norm_sqr();
    let post_state = basis_state(state.num_qubits, &bits)?;
    Ok(MeasurementOutcome { bits, probability, post_state })
}

/// Measure a subset of qubits; the rest stay coherent. The post state keeps
/// the full register width, renormalized on the observed branch.
pub fn measure_subset(
    state: &QuantumState,
    qubits: &[usize],
    rng: &mut SimRng,
) -> Result<MeasurementOutcome> {
    check_normalized(state)?;
    let probs = outcome_probabilities(state, qubits)?;
    let outcome = sample_from_probabilities(&probs, rng);
    let (probability, post_state) = collapse(state, qubits, outcome)?;
    Ok(MeasurementOutcome {
        bits: Bitstring::from_index(qubits.len(), outcome),
        probability,
        post_state,
    })
}

/// Born-rule marginal distribution over the listed qubits (in list order).
pub fn outcome_probabilities(state: &QuantumState, qubits: &[usize]) -> Result<Vec<f64>> {
    validate_qubit_list(state, qubits)?;
    let masks: Vec<usize> = qubits.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let mut probs = vec![0.0; 1 << qubits.len()];
    for (index, amp) in state.amplitudes.iter().enumerate() {
        let mut key = 0usize;
        for m in &masks {
            key = (key << 1) | usize::from(index & m != 0);
        }
        probs[key] += amp.norm_sqr();
    }
    Ok(probs)
}

/// Project the listed qubits onto `outcome` (bits in list order, first listed
/// qubit most significant) and renormalize. Returns the branch probability.
pub fn collapse(
    state: &QuantumState,
    qubits: &[usize],
    outcome: usize,
) -> Result<(f64, QuantumState)> {
    validate_qubit_list(state, qubits)?;
    if outcome >= 1 << qubits.len() {
        return Err(SimError::invalid_argument("outcome out of range"));
    }
    let masks: Vec<usize> = qubits.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let mut target = 0usize;
    let mut selector = 0usize;
    for (k, m) in masks.iter().enumerate() {
        selector |= m;
        if (outcome >> (masks.len() - 1 - k)) & 1 == 1 {
            target |= m;
        }
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); state.dim()];
    let mut weight = 0.0;
    for (index, amp) in state.amplitudes.iter().enumerate() {
        if index & selector == target {
            amplitudes[index] = *amp;
            weight += amp.norm_sqr();
        }
    }
    if weight <= 0.0 {
        return Err(SimError::invalid_argument(
            "cannot collapse onto a zero-probability outcome",
        ));
    }
    let scale = 1.0 / weight.sqrt();
    for a in &mut amplitudes {
        *a *= scale;
    }
    Ok((weight, QuantumState::from_parts_unchecked(state.num_qubits, amplitudes)))
}

/// Drop qubits that are pinned to definite values, keeping the rest.
/// `qubits` must already be collapsed to `bits` (e.g. right after a
/// measurement); amplitudes elsewhere must be zero.
pub fn extract_complement(
    state: &QuantumState,
    qubits: &[usize],
    bits: &Bitstring,
) -> Result<QuantumState> {
    validate_qubit_list(state, qubits)?;
    if bits.len() != qubits.len() {
        return Err(SimError::invalid_argument("bit count must match qubit count"));
    }
    let n = state.num_qubits;
    let remaining: Vec<usize> = (1..=n).filter(|q| !qubits.contains(q)).collect();
    if remaining.is_empty() {
        return Err(SimError::invalid_argument("cannot extract an empty register"));
    }
    let mut fixed = 0usize;
    for (k, &q) in qubits.iter().enumerate() {
        if bits.bits()[k] == 1 {
            fixed |= state.mask_of(q)?;
        }
    }
    let rem_masks: Vec<usize> = remaining.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let mut amplitudes = Vec::with_capacity(1 << remaining.len());
    for r in 0..(1usize << remaining.len()) {
        let mut index = fixed;
        for (k, m) in rem_masks.iter().enumerate() {
            if (r >> (rem_masks.len() - 1 - k)) & 1 == 1 {
                index |= m;
            }
        }
        amplitudes.push(state.amplitudes[index]);
    }
    QuantumState::from_amplitudes(remaining.len(), amplitudes)
}

fn validate_qubit_list(state: &QuantumState, qubits: &[usize]) -> Result<()> {
    if qubits.is_empty() {
        return Err(SimError::invalid_argument("qubit list must be nonempty"));
    }
    for &q in qubits {
        state.mask_of(q)?;
    }
    for (i, &q) in qubits.iter().enumerate() {
        if qubits[i + 1..].contains(&q) {
            return Err(SimError::invalid_argument("qubit list has duplicates"));
        }
    }
    Ok(())
}

/// Draw an index from an (almost exactly) normalized distribution; rounding
/// shortfall falls back to the last index carrying any weight.
pub(crate) fn sample_from_probabilities(probs: &[f64], rng: &mut SimRng) -> usize {
    let draw: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_nonzero = 0;
    for (index, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = index;
        }
        cumulative += p;
        if draw < cumulative {
            return index;
        }
    }
    last_nonzero
}

fn sample_index(amplitudes: &[Complex64], rng: &mut SimRng) -> usize {
    let draw: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_nonzero = 0;
    for (index, amp) in amplitudes.iter().enumerate() {
        let p = amp.norm_sqr();
        if p > 0.0 {
            last_nonzero = index;
        }
        cumulative += p;
        if draw < cumulative {
            return index;
        }
    }
    // rounding left the cumulative sum a hair under 1.0
    last_nonzero
}

/// Partial trace onto the `keep` qubits (ascending qubit order fixes the
/// row/column basis).
pub fn reduced_density(state: &QuantumState, keep: &[usize]) -> Result<DensityMatrix> {
    validate_qubit_list(state, keep)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();

    let n = state.num_qubits;
    let env: Vec<usize> = (1..=n).filter(|q| !keep_sorted.contains(q)).collect();
    let keep_masks: Vec<usize> = keep_sorted.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let env_masks: Vec<usize> = env.iter().map(|&q| state.mask_of(q).unwrap()).collect();

    let scatter = |bits: usize, masks: &[usize]| -> usize {
        let mut index = 0usize;
        for (k, m) in masks.iter().enumerate() {
            if (bits >> (masks.len() - 1 - k)) & 1 == 1 {
                index |= m;
            }
        }
        index
    };

    let kdim = 1usize << keep_sorted.len();
    let edim = 1usize << env.len();
    let keep_idx: Vec<usize> = (0..kdim).map(|a| scatter(a, &keep_masks)).collect();
    let env_idx: Vec<usize> = (0..edim).map(|e| scatter(e, &env_masks)).collect();

    let mut entries = vec![Complex64::new(0.0, 0.0); kdim * kdim];
    for e in &env_idx {
        for (a, ka) in keep_idx.iter().enumerate() {
            let amp_a = state.amplitudes[ka | e];
            if amp_a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, kb) in keep_idx.iter().enumerate() {
                entries[a * kdim + b] += amp_a * state.amplitudes[kb | e].conj();
            }
        }
    }
    Ok(DensityMatrix { dim: kdim, entries })
}

/// Amplitudes reshaped along a bipartition: rows indexed by the `side_a`
/// qubits (ascending), columns by the complement.
pub fn reshape_along_cut(state: &QuantumState, side_a: &[usize]) -> Result<(usize, usize, Vec<Complex64>)> {
    validate_qubit_list(state, side_a)?;
    let n = state.num_qubits;
    if side_a.len() == n {
        return Err(SimError::invalid_argument(
            "cut must leave both sides of the bipartition nonempty",
        ));
    }
    let mut a_sorted = side_a.to_vec();
    a_sorted.sort_unstable();
    let b_side: Vec<usize> = (1..=n).filter(|q| !a_sorted.contains(q)).collect();

    let a_masks: Vec<usize> = a_sorted.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let b_masks: Vec<usize> = b_side.iter().map(|&q| state.mask_of(q).unwrap()).collect();
    let rows = 1usize << a_sorted.len();
    let cols = 1usize << b_side.len();

    let scatter = |bits: usize, masks: &[usize]| -> usize {
        let mut index = 0usize;
        for (k, m) in masks.iter().enumerate() {
            if (bits >> (masks.len() - 1 - k)) & 1 == 1 {
                index |= m;
            }
        }
        index
    };

    let mut entries = Vec::with_capacity(rows * cols);
    for a in 0..rows {
        let ia = scatter(a, &a_masks);
        for b in 0..cols {
            entries.push(state.amplitudes[ia | scatter(b, &b_masks)]);
        }
    }
    Ok((rows, cols, entries))
}

/// Number of singular values above `tol` of the amplitude matrix reshaped
/// along the cut. 1 means the state is a product across the cut.
pub fn schmidt_rank(state: &QuantumState, side_a: &[usize], tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(SimError::invalid_argument("tolerance must be positive"));
    }
    let (rows, cols, entries) = reshape_along_cut(state, side_a)?;
    let sigma = linalg::singular_values(rows, cols, &entries);
    Ok(sigma.iter().filter(|&&s| s > tol).count())
}

/// Schmidt coefficients (singular values) across a cut, descending.
pub fn schmidt_coefficients(state: &QuantumState, side_a: &[usize]) -> Result<Vec<f64>> {
    let (rows, cols, entries) = reshape_along_cut(state, side_a)?;
    Ok(linalg::singular_values(rows, cols, &entries))
}

/// Seeded random unit vector, for property tests.
#[cfg(test)]
pub(crate) fn random_state(n: usize, rng: &mut SimRng) -> QuantumState {
    let dim = 1usize << n;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::from_amplitudes(n, amps).unwrap()
}

/// <a|b>: conjugate-linear in `a`, linear in `b`.
pub fn inner_product(a: &QuantumState, b: &QuantumState) -> Result<Complex64> {
    if a.num_qubits != b.num_qubits {
        return Err(SimError::invalid_argument(format!(
            "dimension mismatch: {} vs {} qubits",
            a.num_qubits, b.num_qubits
        )));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}
