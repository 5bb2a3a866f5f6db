//! Reversible oracles for classical Boolean functions, and evaluation of all
//! 2^n function values in one application.
//!
//! A truth table f: {0,1}^n -> {0,1} becomes a permutation U_f of the n+1
//! qubit basis, |i>|b> -> |i>|b xor f(i)>. Applying U_f to the uniform
//! superposition (n Hadamards on |0...0>, one gate per qubit) evaluates f on
//! every input at the cost of n gates plus a single oracle call, while the
//! number of evaluated values grows as 2^n.

use num_complex::Complex64;

use crate::error::{Result, SimError, MAX_QUBITS};
use crate::gates::{apply_single_in_place, OneQubitGate};
use crate::ledger::CostLedger;
use crate::state::QuantumState;

/// A dense truth table: entry x is f(x), inputs indexed in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    values: Vec<u8>,
}

impl TruthTable {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        let len = values.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::invalid_argument(
                "truth table length must be a power of 2 (and at least 2)",
            ));
        }
        if values.iter().any(|&v| v > 1) {
            return Err(SimError::invalid_argument("truth table entries must be 0 or 1"));
        }
        Ok(TruthTable { arity: len.trailing_zeros() as usize, values })
    }

    /// Parse the on-disk format: a single line of 2^n characters from {0,1}.
    pub fn parse(text: &str) -> Result<Self> {
        let line = text.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            return Err(SimError::invalid_argument("truth table file is empty"));
        }
        let values = line
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(SimError::invalid_argument(format!(
                    "truth table contains '{}', expected only 0 or 1",
                    other
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        TruthTable::new(values)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn value(&self, input: usize) -> u8 {
        self.values[input]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }
}

/// U_f on arity + 1 qubits; the output bit is the last qubit.
#[derive(Debug, Clone)]
pub struct Oracle {
    table: TruthTable,
}

impl Oracle {
    pub fn width(&self) -> usize {
        self.table.arity + 1
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    /// The induced map on basis indices. Always a permutation (an involution,
    /// in fact), which is what makes U_f unitary.
    pub fn permutation(&self) -> Vec<usize> {
        let width = self.width();
        (0..1usize << width)
            .map(|index| index ^ usize::from(self.table.value(index >> 1)))
            .collect()
    }

    /// Apply U_f to a state of exactly `width` qubits: a basis-permutation
    /// sweep, no arithmetic. Ledger: 1 oracle call.
    pub fn apply(&self, state: &QuantumState, ledger: &mut CostLedger) -> Result<QuantumState> {
        if state.num_qubits() != self.width() {
            return Err(SimError::invalid_argument(format!(
                "oracle acts on {} qubits, state has {}",
                self.width(),
                state.num_qubits()
            )));
        }
        let mut amps = state.amplitudes().to_vec();
        self.apply_in_place(&mut amps, ledger);
        Ok(QuantumState::from_parts_unchecked(state.num_qubits(), amps))
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [Complex64], ledger: &mut CostLedger) {
        // output bit is the least significant; swap each |i>|0> with |i>|1>
        // whenever f(i) = 1
        for input in 0..(amps.len() >> 1) {
            if self.table.value(input) == 1 {
                amps.swap(input << 1, (input << 1) | 1);
            }
        }
        ledger.record("oracle", 0, 0, 1);
    }
}

/// Wrap a truth table as a reversible oracle.
pub fn build_oracle(table: TruthTable) -> Result<Oracle> {
    if table.arity + 1 > MAX_QUBITS {
        return Err(SimError::capacity(table.arity + 1));
    }
    Ok(Oracle { table })
}

/// The equal superposition of all 2^n basis states: n Hadamard sweeps on
/// |0...0>. Ledger: exactly n gates.
pub fn uniform_superposition(n: usize, ledger: &mut CostLedger) -> Result<QuantumState> {
    let state = QuantumState::zero(n)?;
    let mut amps = state.into_amplitudes();
    let h = OneQubitGate::hadamard();
    for qubit in 1..=n {
        apply_single_in_place(&mut amps, n, &h, qubit, ledger);
    }
    Ok(QuantumState::from_parts_unchecked(n, amps))
}

/// Evaluate f on every input in superposition: prepare the uniform input
/// register next to a |0> output qubit and apply the oracle once. The result
/// is 2^(-n/2) * sum_i |i>|f(i)>, at a ledger cost of n gates + 1 oracle
/// call.
pub fn parallel_evaluate(oracle: &Oracle, ledger: &mut CostLedger) -> Result<QuantumState> {
    let width = oracle.width();
    let n = width - 1;
    let state = QuantumState::zero(width)?;
    let mut amps = state.into_amplitudes();
    let h = OneQubitGate::hadamard();
    for qubit in 1..=n {
        apply_single_in_place(&mut amps, width, &h, qubit, ledger);
    }
    oracle.apply_in_place(&mut amps, ledger);
    Ok(QuantumState::from_parts_unchecked(width, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{basis_state, schmidt_rank, Bitstring};

    fn and_table() -> TruthTable {
        TruthTable::new(vec![0, 0, 0, 1]).unwrap()
    }

    #[test]
    fn oracle_and_flips_output_on_11() {
        let oracle = build_oracle(and_table()).unwrap();
        let mut ledger = CostLedger::new();
        // |11>|0> -> |11>|1>
        let s = basis_state(3, &Bitstring::from(&[1u8, 1, 0][..])).unwrap();
        let out = oracle.apply(&s, &mut ledger).unwrap();
        assert_eq!(out, basis_state(3, &Bitstring::from(&[1u8, 1, 1][..])).unwrap());
        assert_eq!(ledger.oracle_calls, 1);
        assert_eq!(ledger.multiply_adds, 0);
    }

    #[test]
    fn oracle_and_leaves_output_when_f_zero() {
        let oracle = build_oracle(and_table()).unwrap();
        let mut ledger = CostLedger::new();
        // f(10) = 0, so |10>|1> is untouched
        let s = basis_state(3, &Bitstring::from(&[1u8, 0, 1][..])).unwrap();
        let out = oracle.apply(&s, &mut ledger).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn constant_zero_oracle_is_identity_permutation() {
        let oracle = build_oracle(TruthTable::new(vec![0, 0, 0, 0]).unwrap()).unwrap();
        let perm = oracle.permutation();
        assert!(perm.iter().enumerate().all(|(i, &p)| i == p));
    }

    #[test]
    fn oracle_permutation_is_bijective() {
        // exhaustive over seeded random tables at widths up to 10 qubits
        let mut rng = crate::rng::rng_from_seed(17);
        use rand::Rng;
        for arity in 1..=9 {
            let values: Vec<u8> = (0..1usize << arity).map(|_| rng.gen_range(0..=1)).collect();
            let oracle = build_oracle(TruthTable::new(values).unwrap()).unwrap();
            let perm = oracle.permutation();
            let mut seen = vec![false; perm.len()];
            for &p in &perm {
                assert!(!seen[p], "index {} hit twice", p);
                seen[p] = true;
            }
        }
    }

    #[test]
    fn oracle_applied_twice_is_identity() {
        let mut rng = crate::rng::rng_from_seed(29);
        use rand::Rng;
        for _ in 0..20 {
            let arity = rng.gen_range(1..=4);
            let values: Vec<u8> = (0..1usize << arity).map(|_| rng.gen_range(0..=1)).collect();
            let oracle = build_oracle(TruthTable::new(values).unwrap()).unwrap();
            let state = crate::state::random_state(arity + 1, &mut rng);
            let mut ledger = CostLedger::new();
            let once = oracle.apply(&state, &mut ledger).unwrap();
            let twice = oracle.apply(&once, &mut ledger).unwrap();
            let diff = twice
                .amplitudes()
                .iter()
                .zip(state.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn uniform_superposition_small_cases() {
        let mut ledger = CostLedger::new();
        let s = uniform_superposition(1, &mut ledger).unwrap();
        assert!((s.amplitude(0).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitude(1).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let mut ledger = CostLedger::new();
        let s = uniform_superposition(3, &mut ledger).unwrap();
        let expect = 2.0_f64.powf(-1.5);
        for k in 0..8 {
            assert!((s.amplitude(k).re - expect).abs() < 1e-15);
            assert!(s.amplitude(k).im.abs() < 1e-15);
        }
        // linear gate count
        assert_eq!(ledger.gate_count, 3);
    }

    #[test]
    fn uniform_superposition_capacity() {
        let mut ledger = CostLedger::new();
        assert!(matches!(
            uniform_superposition(MAX_QUBITS + 1, &mut ledger),
            Err(SimError::Capacity { .. })
        ));
    }

    #[test]
    fn parallel_evaluate_and_function() {
        let oracle = build_oracle(and_table()).unwrap();
        let mut ledger = CostLedger::new();
        let out = parallel_evaluate(&oracle, &mut ledger).unwrap();
        // (|00,0> + |01,0> + |10,0> + |11,1>)/2 at indices 0, 2, 4, 7
        for (index, expect) in [(0usize, 0.5), (2, 0.5), (4, 0.5), (7, 0.5)] {
            assert!((out.amplitude(index).re - expect).abs() < 1e-15);
        }
        for index in [1usize, 3, 5, 6] {
            assert!(out.amplitude(index).norm() < 1e-15);
        }
        assert_eq!(ledger.gate_count, 2);
        assert_eq!(ledger.oracle_calls, 1);
    }

    #[test]
    fn parallel_evaluate_constant_is_product() {
        let oracle = build_oracle(TruthTable::new(vec![0, 0, 0, 0]).unwrap()).unwrap();
        let mut ledger = CostLedger::new();
        let out = parallel_evaluate(&oracle, &mut ledger).unwrap();
        assert_eq!(schmidt_rank(&out, &[1, 2], 1e-10).unwrap(), 1);
    }

    #[test]
    fn parallel_evaluate_xor_is_entangled() {
        // brute-force check: the xor state reshapes to a 4x2 matrix with
        // orthogonal columns of norm 1/sqrt(2) each, so both singular values
        // are 1/sqrt(2)
        let oracle = build_oracle(TruthTable::new(vec![0, 1, 1, 0]).unwrap()).unwrap();
        let mut ledger = CostLedger::new();
        let out = parallel_evaluate(&oracle, &mut ledger).unwrap();
        let sigma = crate::state::schmidt_coefficients(&out, &[1, 2]).unwrap();
        assert!((sigma[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((sigma[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(schmidt_rank(&out, &[1, 2], 1e-10).unwrap(), 2);
    }

    #[test]
    fn nonconstant_tables_entangle_constant_tables_do_not() {
        // exhaustive at arity <= 3; seeded samples at arity 4..6
        use rand::Rng;
        for arity in 1..=3usize {
            for bits in 0..(1usize << (1 << arity)) {
                let values: Vec<u8> = (0..1usize << arity).map(|x| ((bits >> x) & 1) as u8).collect();
                check_rank_dichotomy(values, arity);
            }
        }
        let mut rng = crate::rng::rng_from_seed(31);
        for arity in 4..=6usize {
            for _ in 0..40 {
                let values: Vec<u8> = (0..1usize << arity).map(|_| rng.gen_range(0..=1)).collect();
                check_rank_dichotomy(values, arity);
            }
        }
    }

    fn check_rank_dichotomy(values: Vec<u8>, arity: usize) {
        let table = TruthTable::new(values).unwrap();
        let constant = table.is_constant();
        let oracle = build_oracle(table).unwrap();
        let mut ledger = CostLedger::new();
        let out = parallel_evaluate(&oracle, &mut ledger).unwrap();
        let cut: Vec<usize> = (1..=arity).collect();
        let rank = schmidt_rank(&out, &cut, 1e-10).unwrap();
        if constant {
            assert_eq!(rank, 1, "constant table must give a product state");
        } else {
            assert!(rank >= 2, "non-constant table must entangle, got rank {}", rank);
        }
        // ledger grows linearly while 2^n values were evaluated
        assert_eq!(ledger.gate_count, arity as u64);
        assert_eq!(ledger.oracle_calls, 1);
    }

    #[test]
    fn parse_truth_table_file_format() {
        let t = TruthTable::parse("0001\n").unwrap();
        assert_eq!(t, and_table());
        assert!(TruthTable::parse("").is_err());
        assert!(TruthTable::parse("012").is_err());
        assert!(TruthTable::parse("010").is_err()); // not a power of 2
        assert!(TruthTable::parse("1").is_err()); // arity 0
    }
}
