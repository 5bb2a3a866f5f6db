//! Three routes to the same transform, with their exact costs:
//!
//! * [`dft_direct`]: the N x N matrix applied literally: N^2 multiply-adds;
//! * [`fft`]: iterative radix-2 decimation-in-time: exactly
//!   N*log2(N) + N multiply-adds (2 per butterfly, N for the 1/sqrt(N)
//!   normalization pass);
//! * [`qft_apply`]: the gate-level circuit: n Hadamards plus n(n-1)/2
//!   controlled phases, n(n+1)/2 gates in total.
//!
//! Convention, fixed once and recorded in every run record: root of unity
//! omega = e^{+2 pi i / N}, normalization 1/sqrt(N). Under it the N = 2
//! transform matrix is exactly the Hadamard gate. The qubit-order reversal
//! at the end of the circuit is an index relabeling, not a layer of swap
//! gates, so the quadratic gate count stays clean.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Result, SimError, MAX_QUBITS};
use crate::gates::{
    apply_controlled_in_place, apply_single_in_place, ControlledGate, OneQubitGate,
};
use crate::ledger::CostLedger;
use crate::state::QuantumState;

/// The pinned transform convention, serialized into every run record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierConvention {
    /// Sign of the exponent in the root of unity.
    pub root_sign: i8,
    /// Normalization applied to every output component.
    pub normalization: String,
    /// How the circuit's final qubit-order reversal is realized.
    pub bit_reversal: String,
}

impl FourierConvention {
    pub fn standard() -> Self {
        FourierConvention {
            root_sign: 1,
            normalization: "1/sqrt(N)".to_string(),
            bit_reversal: "relabel".to_string(),
        }
    }
}

/// Exact multiply-add count of [`fft`] on a length-N input.
pub fn fft_cost(len: u64) -> u64 {
    len * len.trailing_zeros() as u64 + len
}

fn check_power_of_two(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(SimError::invalid_argument(format!(
            "vector length {} is not a power of 2",
            len
        )));
    }
    Ok(len.trailing_zeros())
}

/// w_j = (1/sqrt(N)) sum_i omega^(ij) v_i by direct evaluation.
/// Ledger: N^2 multiply-adds (the normalization is folded into the table).
pub fn dft_direct(v: &[Complex64], ledger: &mut CostLedger) -> Result<Vec<Complex64>> {
    check_power_of_two(v.len())?;
    let n = v.len();
    let scale = 1.0 / (n as f64).sqrt();
    let table: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(scale, 2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, amp) in v.iter().enumerate() {
            acc += table[(i * j) % n] * amp;
        }
        w.push(acc);
    }
    ledger.record("dft_direct", (n as u64) * (n as u64), 0, 0);
    Ok(w)
}

/// Radix-2 decimation-in-time FFT of the same transform. Ledger: exactly
/// [`fft_cost`] multiply-adds.
pub fn fft(v: &[Complex64], ledger: &mut CostLedger) -> Result<Vec<Complex64>> {
    let bits = check_power_of_two(v.len())?;
    let n = v.len();

    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for (i, amp) in v.iter().enumerate() {
        a[bit_reverse(i, bits)] = *amp;
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = Complex64::from_polar(1.0, 2.0 * PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for j in start..start + half {
                let t = w * a[j + half];
                a[j + half] = a[j] - t;
                a[j] += t;
                w *= step;
            }
        }
        len <<= 1;
    }

    let scale = 1.0 / (n as f64).sqrt();
    for amp in &mut a {
        *amp *= scale;
    }

    ledger.record("fft", fft_cost(n as u64), 0, 0);
    Ok(a)
}

/// Reverse the low `bits` bits of `index`.
pub fn bit_reverse(index: usize, bits: u32) -> usize {
    let mut out = 0usize;
    for k in 0..bits {
        out |= ((index >> k) & 1) << (bits - 1 - k);
    }
    out
}

/// One gate of the transform circuit. Controlled phases rotate by
/// 2 pi / 2^k on the |11> component of (control, target).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateInstruction {
    Hadamard { target: usize },
    ControlledPhase { control: usize, target: usize, k: u32 },
}

/// The circuit for n qubits: gate list plus the final order reversal, which
/// is recorded as an index relabeling rather than swap gates.
#[derive(Debug, Clone)]
pub struct QftCircuit {
    pub gates: Vec<GateInstruction>,
    /// Always true: outputs are read in bit-reversed index order.
    pub relabel_reversal: bool,
}

impl QftCircuit {
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// Standard decomposition: qubit j gets one Hadamard and then collects a
/// controlled phase 2 pi / 2^m from each lower qubit j + m - 1. Total gate
/// count n(n+1)/2.
pub fn qft_circuit(n: usize) -> Result<QftCircuit> {
    if n == 0 {
        return Err(SimError::invalid_argument("circuit needs at least 1 qubit"));
    }
    if n > MAX_QUBITS {
        return Err(SimError::capacity(n));
    }
    let mut gates = Vec::with_capacity(n * (n + 1) / 2);
    for j in 1..=n {
        gates.push(GateInstruction::Hadamard { target: j });
        for m in 2..=(n - j + 1) {
            gates.push(GateInstruction::ControlledPhase {
                control: j + m - 1,
                target: j,
                k: m as u32,
            });
        }
    }
    Ok(QftCircuit { gates, relabel_reversal: true })
}

fn run_gate(
    amps: &mut [Complex64],
    n: usize,
    instruction: &GateInstruction,
    conjugate: bool,
    ledger: &mut CostLedger,
) -> Result<()> {
    match *instruction {
        GateInstruction::Hadamard { target } => {
            apply_single_in_place(amps, n, &OneQubitGate::hadamard(), target, ledger);
        }
        GateInstruction::ControlledPhase { control, target, k } => {
            let sign = if conjugate { -1.0 } else { 1.0 };
            let angle = sign * 2.0 * PI / f64::from(1u32 << k);
            let cg = ControlledGate::new(control, target, OneQubitGate::phase(angle))?;
            apply_controlled_in_place(amps, n, &cg, ledger)?;
        }
    }
    Ok(())
}

fn relabel_bit_reversed(amps: &mut [Complex64], bits: u32) {
    for i in 0..amps.len() {
        let j = bit_reverse(i, bits);
        if i < j {
            amps.swap(i, j);
        }
    }
}

/// Run the circuit on a register. The output amplitude vector equals
/// [`dft_direct`] of the input amplitudes. Ledger gate count: n(n+1)/2.
pub fn qft_apply(state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
    let n = state.num_qubits();
    let circuit = qft_circuit(n)?;
    let mut amps = state.amplitudes().to_vec();
    for gate in &circuit.gates {
        run_gate(&mut amps, n, gate, false, ledger)?;
    }
    relabel_bit_reversed(&mut amps, n as u32);
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

/// Inverse transform: undo the relabeling, then the conjugated gates in
/// reverse order. qft_apply followed by iqft_apply is the identity.
pub fn iqft_apply(state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
    let n = state.num_qubits();
    let circuit = qft_circuit(n)?;
    let mut amps = state.amplitudes().to_vec();
    relabel_bit_reversed(&mut amps, n as u32);
    for gate in circuit.gates.iter().rev() {
        run_gate(&mut amps, n, gate, true, ledger)?;
    }
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::scaling_fit;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_vector(len: usize, rng: &mut crate::rng::SimRng) -> Vec<Complex64> {
        (0..len)
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dft_of_e0_is_uniform() {
        let mut ledger = CostLedger::new();
        let e0 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let w = dft_direct(&e0, &mut ledger).unwrap();
        for x in &w {
            assert!((x - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(ledger.multiply_adds, 16);
    }

    #[test]
    fn dft_of_e1_walks_the_unit_circle() {
        // omega = i at N = 4: (1/2)(1, i, -1, -i)
        let mut ledger = CostLedger::new();
        let e1 = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let w = dft_direct(&e1, &mut ledger).unwrap();
        let expect = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        assert!(max_diff(&w, &expect) < 1e-15);
    }

    #[test]
    fn dft_at_n2_is_the_hadamard_matrix() {
        let mut ledger = CostLedger::new();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let col0 = dft_direct(&[c(1.0, 0.0), c(0.0, 0.0)], &mut ledger).unwrap();
        let col1 = dft_direct(&[c(0.0, 0.0), c(1.0, 0.0)], &mut ledger).unwrap();
        assert!(max_diff(&col0, &[c(h, 0.0), c(h, 0.0)]) < 1e-15);
        assert!(max_diff(&col1, &[c(h, 0.0), c(-h, 0.0)]) < 1e-15);
    }

    #[test]
    fn dft_rejects_non_power_of_two() {
        let mut ledger = CostLedger::new();
        assert!(dft_direct(&[c(1.0, 0.0); 3], &mut ledger).is_err());
        assert!(dft_direct(&[], &mut ledger).is_err());
    }

    #[test]
    fn dft_is_unitary() {
        let mut rng = rng_from_seed(8);
        let mut ledger = CostLedger::new();
        for bits in 1..=8 {
            let v = random_vector(1 << bits, &mut rng);
            let w = dft_direct(&v, &mut ledger).unwrap();
            let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let nw: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            assert!((nv - nw).abs() < 1e-9);
        }
    }

    #[test]
    fn fft_matches_dft_on_random_vectors() {
        let mut rng = rng_from_seed(12);
        for trial in 0..100 {
            let bits = (trial % 10) + 1; // N up to 1024
            let v = random_vector(1 << bits, &mut rng);
            let mut la = CostLedger::new();
            let mut lb = CostLedger::new();
            let direct = dft_direct(&v, &mut la).unwrap();
            let fast = fft(&v, &mut lb).unwrap();
            assert!(
                max_diff(&direct, &fast) < 1e-9,
                "mismatch at N = {} trial {}",
                1 << bits,
                trial
            );
            assert_eq!(lb.multiply_adds, fft_cost(1u64 << bits));
        }
    }

    #[test]
    fn fft_length_one_is_identity() {
        let mut ledger = CostLedger::new();
        let v = [c(0.3, -0.4)];
        let w = fft(&v, &mut ledger).unwrap();
        assert!(max_diff(&w, &v) < 1e-15);
    }

    #[test]
    fn fft_count_ratio_between_sizes() {
        // ledger(N = 2^10) / ledger(N = 2^9) should sit within 5% of 2 * 10/9
        let a = fft_cost(1 << 10) as f64;
        let b = fft_cost(1 << 9) as f64;
        let ratio = a / b;
        let ideal = 2.0 * 10.0 / 9.0;
        assert!((ratio / ideal - 1.0).abs() < 0.05, "ratio {}", ratio);
    }

    #[test]
    fn qft_circuit_gate_counts() {
        assert_eq!(qft_circuit(1).unwrap().gate_count(), 1);
        assert_eq!(qft_circuit(3).unwrap().gate_count(), 6);
        assert_eq!(qft_circuit(5).unwrap().gate_count(), 15);
        // n = 1 is a single Hadamard
        assert_eq!(
            qft_circuit(1).unwrap().gates,
            vec![GateInstruction::Hadamard { target: 1 }]
        );
        assert!(matches!(qft_circuit(0), Err(SimError::InvalidArgument(_))));
        assert!(matches!(qft_circuit(MAX_QUBITS + 1), Err(SimError::Capacity { .. })));
    }

    #[test]
    fn qft_of_zero_state_is_uniform() {
        let mut ledger = CostLedger::new();
        let s = QuantumState::zero(4).unwrap();
        let out = qft_apply(&s, &mut ledger).unwrap();
        let expect = 0.25;
        for k in 0..16 {
            assert!((out.amplitude(k) - c(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_matches_dft_on_random_states() {
        let mut rng = rng_from_seed(21);
        for trial in 0..100 {
            let n = (trial % 10) + 1;
            let state = crate::state::random_state(n, &mut rng);
            let mut la = CostLedger::new();
            let mut lb = CostLedger::new();
            let expect = dft_direct(state.amplitudes(), &mut la).unwrap();
            let got = qft_apply(&state, &mut lb).unwrap();
            assert!(
                max_diff(got.amplitudes(), &expect) < 1e-9,
                "mismatch at n = {} trial {}",
                n,
                trial
            );
            assert_eq!(lb.gate_count, (n * (n + 1) / 2) as u64);
        }
    }

    #[test]
    fn qft_gate_count_vs_dense_multiply_adds_at_n8() {
        let mut lq = CostLedger::new();
        let mut ld = CostLedger::new();
        let s = QuantumState::zero(8).unwrap();
        qft_apply(&s, &mut lq).unwrap();
        dft_direct(s.amplitudes(), &mut ld).unwrap();
        assert_eq!(lq.gate_count, 36);
        assert_eq!(ld.multiply_adds, 65536);
    }

    #[test]
    fn qft_then_inverse_is_identity() {
        let mut rng = rng_from_seed(33);
        for n in 1..=8 {
            let state = crate::state::random_state(n, &mut rng);
            let mut ledger = CostLedger::new();
            let there = qft_apply(&state, &mut ledger).unwrap();
            let back = iqft_apply(&there, &mut ledger).unwrap();
            assert!(max_diff(back.amplitudes(), state.amplitudes()) < 1e-9);
        }
    }

    #[test]
    fn cost_hierarchy_is_strict() {
        for n in 4u32..=10 {
            let dense = 1u64 << (2 * n);
            let fast = fft_cost(1u64 << n);
            let gates = u64::from(n * (n + 1) / 2);
            assert!(dense > fast, "n = {}", n);
            assert!(fast > gates, "n = {}", n);
        }
    }

    #[test]
    fn dft_count_regression_slope_is_two() {
        let mut points = Vec::new();
        for n in 6u32..=12 {
            let mut ledger = CostLedger::new();
            let v = vec![c(0.0, 0.0); 1 << n];
            // count is definitional, content irrelevant
            dft_direct(&v, &mut ledger).unwrap();
            points.push((n, ledger.multiply_adds));
        }
        let report = scaling_fit(&points).unwrap();
        assert!((report.exponential.exponent - 2.0).abs() < 0.04); // within 2%
        // and the fft closed form holds at every point
        for n in 6u32..=12 {
            let mut ledger = CostLedger::new();
            let v = vec![c(0.0, 0.0); 1 << n];
            fft(&v, &mut ledger).unwrap();
            assert_eq!(ledger.multiply_adds, fft_cost(1u64 << n));
        }
    }

    #[test]
    fn bit_reverse_involution() {
        for bits in 1..=12u32 {
            for i in 0..(1usize << bits.min(8)) {
                assert_eq!(bit_reverse(bit_reverse(i, bits), bits), i);
            }
        }
    }
}
