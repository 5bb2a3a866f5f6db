//! Unitary application engines in three structural forms, each crediting the
//! ledger with its exact arithmetic cost:
//!
//! * [`apply_single`]: one 2x2 gate swept over amplitude pairs: 2^(n-1)
//!   two-by-two applications, one gate;
//! * [`apply_factored`]: a full tensor product of n 2x2 factors applied as n
//!   successive sweeps: 2n * 2^n multiply-adds, n gates;
//! * [`apply_dense`]: direct 2^n x 2^n matrix-vector multiplication:
//!   2^(2n) multiply-adds.
//!
//! The ratio dense/factored = 2^n / (2n) is the whole point; [`kron_expand`]
//! provides the brute-force bridge for equivalence tests.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Result, SimError, MAX_KRON_QUBITS};
use crate::ledger::CostLedger;
use crate::state::QuantumState;

const UNITARY_TOL_2X2: f64 = 1e-10;
const UNITARY_TOL_DENSE: f64 = 1e-9;

/// A unitary 2x2 matrix, row-major: [m00, m01, m10, m11].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneQubitGate {
    entries: [Complex64; 4],
}

impl OneQubitGate {
    /// Build a gate, verifying unitarity to 1e-10.
    pub fn new(entries: [Complex64; 4]) -> Result<Self> {
        let [a, b, c, d] = entries;
        // U U^dagger entrywise
        let rows = [
            a * a.conj() + b * b.conj(),
            a * c.conj() + b * d.conj(),
            c * a.conj() + d * b.conj(),
            c * c.conj() + d * d.conj(),
        ];
        let identity = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        for (got, want) in rows.iter().zip(identity.iter()) {
            if (got - want).norm() > UNITARY_TOL_2X2 {
                return Err(SimError::invalid_argument("2x2 matrix is not unitary"));
            }
        }
        Ok(OneQubitGate { entries })
    }

    pub fn entries(&self) -> &[Complex64; 4] {
        &self.entries
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        OneQubitGate { entries: [h, h, h, -h] }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        OneQubitGate { entries: [one, zero, zero, one] }
    }

    pub fn pauli_x() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        OneQubitGate { entries: [zero, one, one, zero] }
    }

    pub fn pauli_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        OneQubitGate { entries: [one, zero, zero, -one] }
    }

    /// diag(1, e^{i angle}).
    pub fn phase(angle: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        OneQubitGate {
            entries: [
                Complex64::new(1.0, 0.0),
                zero,
                zero,
                Complex64::from_polar(1.0, angle),
            ],
        }
    }

    /// Conjugate of every entry (the inverse for our symmetric phase gates,
    /// the transpose-inverse in general).
    pub fn conjugated(&self) -> Self {
        let [a, b, c, d] = self.entries;
        OneQubitGate { entries: [a.conj(), b.conj(), c.conj(), d.conj()] }
    }

    /// A Haar-ish random unitary: Gram-Schmidt on Gaussian-free random
    /// columns. Good enough for property tests.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        loop {
            let raw: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let n0 = (raw[0].norm_sqr() + raw[2].norm_sqr()).sqrt();
            if n0 < 1e-3 {
                continue;
            }
            let c0 = [raw[0] / n0, raw[2] / n0];
            let overlap = c0[0].conj() * raw[1] + c0[1].conj() * raw[3];
            let mut c1 = [raw[1] - overlap * c0[0], raw[3] - overlap * c0[1]];
            let n1 = (c1[0].norm_sqr() + c1[1].norm_sqr()).sqrt();
            if n1 < 1e-3 {
                continue;
            }
            c1 = [c1[0] / n1, c1[1] / n1];
            return OneQubitGate { entries: [c0[0], c1[0], c0[1], c1[1]] };
        }
    }
}

/// A 2x2 gate on `target` conditioned on `control` being |1>.
#[derive(Debug, Clone, Copy)]
pub struct ControlledGate {
    pub control: usize,
    pub target: usize,
    pub gate: OneQubitGate,
}

impl ControlledGate {
    pub fn new(control: usize, target: usize, gate: OneQubitGate) -> Result<Self> {
        if control == target {
            return Err(SimError::invalid_argument("control and target must differ"));
        }
        Ok(ControlledGate { control, target, gate })
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        ControlledGate::new(control, target, OneQubitGate::pauli_x())
    }
}

/// An n-fold tensor product of 2x2 factors, position i acting on qubit i.
#[derive(Debug, Clone)]
pub struct FactoredOperator {
    factors: Vec<OneQubitGate>,
}

impl FactoredOperator {
    pub fn new(factors: Vec<OneQubitGate>) -> Result<Self> {
        if factors.is_empty() {
            return Err(SimError::invalid_argument("factored operator needs at least one factor"));
        }
        Ok(FactoredOperator { factors })
    }

    /// H (x) H (x) ... (x) H on n qubits.
    pub fn hadamard_all(n: usize) -> Result<Self> {
        FactoredOperator::new(vec![OneQubitGate::hadamard(); n])
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[OneQubitGate] {
        &self.factors
    }
}

/// An explicit 2^n x 2^n matrix, row-major. `unitary` constructors verify
/// U U^dagger = I; `arbitrary` skips the check so cost experiments can use
/// any matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn unitary(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let op = DenseOperator::arbitrary(dim, entries)?;
        for i in 0..dim {
            for j in 0..dim {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    dot += op.entries[i * dim + k] * op.entries[j * dim + k].conj();
                }
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - Complex64::new(want, 0.0)).norm() > UNITARY_TOL_DENSE {
                    return Err(SimError::invalid_argument("dense matrix is not unitary"));
                }
            }
        }
        Ok(op)
    }

    pub fn arbitrary(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(SimError::invalid_argument("dense operator dim must be a power of 2"));
        }
        if entries.len() != dim * dim {
            return Err(SimError::invalid_argument(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(DenseOperator { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseOperator::arbitrary(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }
}

/// Apply a 2x2 gate to one qubit: a single sweep over the 2^(n-1) amplitude
/// pairs that differ in the target bit. Ledger: 4 * 2^(n-1) multiply-adds,
/// 1 gate.
pub fn apply_single(
    state: &QuantumState,
    gate: &OneQubitGate,
    target: usize,
    ledger: &mut CostLedger,
) -> Result<QuantumState> {
    let n = state.num_qubits();
    state.mask_of(target)?;
    let mut amps = state.amplitudes().to_vec();
    apply_single_in_place(&mut amps, n, gate, target, ledger);
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

pub(crate) fn apply_single_in_place(
    amps: &mut [Complex64],
    n: usize,
    gate: &OneQubitGate,
    target: usize,
    ledger: &mut CostLedger,
) {
    let mask = 1usize << (n - target);
    let [g00, g01, g10, g11] = *gate.entries();
    let low = mask - 1;
    let high = !low;
    for pair in 0..(amps.len() >> 1) {
        let i0 = ((pair & high) << 1) | (pair & low);
        let i1 = i0 | mask;
        let a = amps[i0];
        let b = amps[i1];
        amps[i0] = g00 * a + g01 * b;
        amps[i1] = g10 * a + g11 * b;
    }
    ledger.record("apply_single", 4 * (1u64 << (n - 1)), 1, 0);
}

/// Apply a controlled 2x2 gate: the sweep touches the 2^(n-2) pairs inside
/// the control=1 subspace. Ledger: 4 * 2^(n-2) multiply-adds, 1 gate.
pub fn apply_controlled(
    state: &QuantumState,
    cg: &ControlledGate,
    ledger: &mut CostLedger,
) -> Result<QuantumState> {
    let n = state.num_qubits();
    let mut amps = state.amplitudes().to_vec();
    apply_controlled_in_place(&mut amps, n, cg, ledger)?;
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

pub(crate) fn apply_controlled_in_place(
    amps: &mut [Complex64],
    n: usize,
    cg: &ControlledGate,
    ledger: &mut CostLedger,
) -> Result<()> {
    if cg.control == cg.target {
        return Err(SimError::invalid_argument("control and target must differ"));
    }
    if cg.control == 0 || cg.control > n || cg.target == 0 || cg.target > n {
        return Err(SimError::invalid_argument("controlled gate index out of range"));
    }
    let cmask = 1usize << (n - cg.control);
    let tmask = 1usize << (n - cg.target);
    let [g00, g01, g10, g11] = *cg.gate.entries();
    for i0 in 0..amps.len() {
        if (i0 & cmask) == 0 || (i0 & tmask) != 0 {
            continue;
        }
        let i1 = i0 | tmask;
        let a = amps[i0];
        let b = amps[i1];
        amps[i0] = g00 * a + g01 * b;
        amps[i1] = g10 * a + g11 * b;
    }
    ledger.record("apply_controlled", 4 * (1u64 << (n - 2)), 1, 0);
    Ok(())
}

/// Apply S1 (x) ... (x) Sn by chaining single-qubit sweeps: each factor is
/// applied once to its own qubit. Ledger: 2n * 2^n multiply-adds, n gates.
pub fn apply_factored(
    state: &QuantumState,
    op: &FactoredOperator,
    ledger: &mut CostLedger,
) -> Result<QuantumState> {
    let n = state.num_qubits();
    if op.len() != n {
        return Err(SimError::invalid_argument(format!(
            "factored operator has {} factors for {} qubits",
            op.len(),
            n
        )));
    }
    let mut amps = state.amplitudes().to_vec();
    for (k, factor) in op.factors.iter().enumerate() {
        apply_single_in_place(&mut amps, n, factor, k + 1, ledger);
    }
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

/// w = M v by direct matrix multiplication. Ledger: 2^(2n) multiply-adds.
pub fn apply_dense(
    state: &QuantumState,
    op: &DenseOperator,
    ledger: &mut CostLedger,
) -> Result<QuantumState> {
    let dim = state.dim();
    if op.dim != dim {
        return Err(SimError::invalid_argument(format!(
            "operator dim {} does not match state dim {}",
            op.dim, dim
        )));
    }
    let v = state.amplitudes();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for (row, out) in w.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        let base = row * dim;
        for (col, amp) in v.iter().enumerate() {
            acc += op.entries[base + col] * amp;
        }
        *out = acc;
    }
    ledger.record("apply_dense", (dim as u64) * (dim as u64), 0, 0);
    Ok(QuantumState::from_parts_unchecked(state.num_qubits(), w))
}

/// Expand a factored operator into its explicit Kronecker product, qubit 1
/// indexing the most significant block.
pub fn kron_expand(op: &FactoredOperator) -> Result<DenseOperator> {
    let n = op.len();
    if n > MAX_KRON_QUBITS {
        return Err(SimError::Capacity { requested: n, max: MAX_KRON_QUBITS });
    }
    let mut dim = 1usize;
    let mut entries = vec![Complex64::new(1.0, 0.0)];
    for factor in &op.factors {
        let f = factor.entries();
        let newdim = dim * 2;
        let mut next = vec![Complex64::new(0.0, 0.0); newdim * newdim];
        for i in 0..dim {
            for j in 0..dim {
                let a = entries[i * dim + j];
                for bi in 0..2 {
                    for bj in 0..2 {
                        next[(i * 2 + bi) * newdim + (j * 2 + bj)] = a * f[bi * 2 + bj];
                    }
                }
            }
        }
        dim = newdim;
        entries = next;
    }
    // product of unitary factors, so no re-validation pass
    DenseOperator::arbitrary(dim, entries)
}
