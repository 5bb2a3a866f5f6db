//! Teleportation of an unknown one-qubit state through a shared EPR pair
//! plus exactly two classical bits.
//!
//! The register layout is qubit 1 = the state to send, qubit 2 = Alice's
//! half of the pair, qubit 3 = Bob's half. Alice entangles her two qubits
//! (CNOT then Hadamard), measures them, and sends the outcome to Bob as a
//! [`TwoBits`] message, the only value that crosses the interface, so the
//! two-bit claim is a property of the types, not of discipline. Bob applies
//! X^b2 then Z^b1 and owns the state exactly.

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::gates::{apply_controlled, apply_single, ControlledGate, OneQubitGate};
use crate::ledger::CostLedger;
use crate::rng::{rng_from_seed, SimRng};
use crate::state::{
    collapse, extract_complement, inner_product, measure_subset, Bitstring, QuantumState,
    GUARD_TOL,
};

/// The classical channel: two bits, nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoBits {
    pub first: u8,
    pub second: u8,
}

impl TwoBits {
    fn to_bitstring(self) -> Bitstring {
        Bitstring::new(vec![self.first, self.second]).expect("bits are 0/1")
    }
}

/// What one protocol run looked like from the outside.
#[derive(Debug, Clone)]
pub struct TeleportTranscript {
    pub input_state: QuantumState,
    pub classical_bits: Bitstring,
    pub output_state: QuantumState,
    /// |<input|output>|^2; global phase is unobservable and ignored.
    pub fidelity: f64,
}

/// A transcript plus the intermediate register states, for entanglement
/// accounting.
#[derive(Debug, Clone)]
pub struct TeleportRun {
    pub transcript: TeleportTranscript,
    /// The 3-qubit state just before Alice's measurement.
    pub pre_measurement: QuantumState,
    /// The 3-qubit state just after it (a product across Alice|Bob).
    pub post_measurement: QuantumState,
}

/// Schmidt ranks across the Alice|Bob cut before and after the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntanglementReport {
    pub rank_before: usize,
    pub rank_after: usize,
}

/// The shared resource: (|00> + |11>)/sqrt(2), built by H then CNOT.
pub fn make_epr() -> QuantumState {
    let mut scratch = CostLedger::new();
    let s = QuantumState::zero(2).expect("2 qubits fit");
    let s = apply_single(&s, &OneQubitGate::hadamard(), 1, &mut scratch).expect("valid target");
    apply_controlled(&s, &ControlledGate::cnot(1, 2).expect("distinct"), &mut scratch)
        .expect("valid gate")
}

/// Teleport `psi` over a fresh EPR pair. Seed-deterministic.
pub fn teleport(psi: &QuantumState, seed: u64) -> Result<TeleportTranscript> {
    teleport_run(psi, &make_epr(), seed).map(|run| run.transcript)
}

/// Teleport over an arbitrary 2-qubit resource state (the protocol only
/// works when it is the EPR pair; substituting anything else degrades the
/// fidelity, which is the point of allowing it).
pub fn teleport_run(
    psi: &QuantumState,
    resource: &QuantumState,
    seed: u64,
) -> Result<TeleportRun> {
    let mut rng = rng_from_seed(seed);
    teleport_run_with_rng(psi, resource, &mut rng)
}

fn teleport_run_with_rng(
    psi: &QuantumState,
    resource: &QuantumState,
    rng: &mut SimRng,
) -> Result<TeleportRun> {
    let pre_measurement = entangle_for_measurement(psi, resource)?;

    // Alice measures her two qubits; the outcome is the entire message.
    let outcome = measure_subset(&pre_measurement, &[1, 2], rng)?;
    let bits = outcome.bits.bits();
    let message = TwoBits { first: bits[0], second: bits[1] };
    let post_measurement = outcome.post_state.clone();

    let output_state = bob_receive(&post_measurement, message)?;
    let fidelity = inner_product(psi, &output_state)?.norm_sqr();
    Ok(TeleportRun {
        transcript: TeleportTranscript {
            input_state: psi.clone(),
            classical_bits: message.to_bitstring(),
            output_state,
            fidelity,
        },
        pre_measurement,
        post_measurement,
    })
}

/// One teleportation branch, conditioned on Alice's outcome instead of
/// sampled: lets tests sweep all four outcomes analytically.
#[derive(Debug, Clone)]
pub struct TeleportBranch {
    pub message: TwoBits,
    pub probability: f64,
    pub output_state: QuantumState,
    pub fidelity: f64,
}

/// Evaluate all four measurement branches of the protocol exactly.
pub fn teleport_branches(psi: &QuantumState) -> Result<Vec<TeleportBranch>> {
    teleport_branches_with_resource(psi, &make_epr())
}

pub fn teleport_branches_with_resource(
    psi: &QuantumState,
    resource: &QuantumState,
) -> Result<Vec<TeleportBranch>> {
    let pre = entangle_for_measurement(psi, resource)?;
    let mut branches = Vec::with_capacity(4);
    for outcome in 0..4usize {
        let (probability, collapsed) = collapse(&pre, &[1, 2], outcome)?;
        let message = TwoBits { first: (outcome >> 1) as u8, second: (outcome & 1) as u8 };
        let output_state = bob_receive(&collapsed, message)?;
        let fidelity = inner_product(psi, &output_state)?.norm_sqr();
        branches.push(TeleportBranch { message, probability, output_state, fidelity });
    }
    Ok(branches)
}

/// Alice's coherent half of the protocol: adjoin the resource, CNOT from
/// the unknown qubit onto her half of the pair, then Hadamard.
fn entangle_for_measurement(
    psi: &QuantumState,
    resource: &QuantumState,
) -> Result<QuantumState> {
    if psi.num_qubits() != 1 {
        return Err(SimError::invalid_argument("teleport sends exactly one qubit"));
    }
    if resource.num_qubits() != 2 {
        return Err(SimError::invalid_argument("resource must be a 2-qubit state"));
    }
    if (psi.norm() - 1.0).abs() > GUARD_TOL {
        return Err(SimError::invalid_state("input state is not normalized"));
    }
    let mut scratch = CostLedger::new();
    let joint = psi.tensor(resource)?;
    let joint = apply_controlled(&joint, &ControlledGate::cnot(1, 2)?, &mut scratch)?;
    apply_single(&joint, &OneQubitGate::hadamard(), 1, &mut scratch)
}

/// Bob's side: take ownership of qubit 3 and apply the Pauli correction
/// selected by the two classical bits.
fn bob_receive(post_measurement: &QuantumState, message: TwoBits) -> Result<QuantumState> {
    let pinned = Bitstring::new(vec![message.first, message.second])?;
    let mut qubit = extract_complement(post_measurement, &[1, 2], &pinned)?;
    let mut scratch = CostLedger::new();
    if message.second == 1 {
        qubit = apply_single(&qubit, &OneQubitGate::pauli_x(), 1, &mut scratch)?;
    }
    if message.first == 1 {
        qubit = apply_single(&qubit, &OneQubitGate::pauli_z(), 1, &mut scratch)?;
    }
    Ok(qubit)
}

/// Schmidt ranks across the Alice|Bob cut (qubits {1,2} vs {3}) before and
/// after the measurement: 2 then 1; the pair's entanglement is spent.
pub fn entanglement_consumed(run: &TeleportRun) -> Result<EntanglementReport> {
    let rank_before = crate::state::schmidt_rank(&run.pre_measurement, &[1, 2], 1e-10)?;
    let rank_after = crate::state::schmidt_rank(&run.post_measurement, &[1, 2], 1e-10)?;
    Ok(EntanglementReport { rank_before, rank_after })
}

/// A Haar-random one-qubit state drawn from `rng`.
pub fn random_qubit(rng: &mut SimRng) -> QuantumState {
    use rand::Rng;
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let alpha = Complex64::new((theta / 2.0).cos(), 0.0);
    let beta = Complex64::from_polar((theta / 2.0).sin(), phi);
    QuantumState::from_amplitudes(1, vec![alpha, beta]).expect("unit norm by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{reduced_density, schmidt_rank};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn epr_pair_amplitudes() {
        let epr = make_epr();
        let amps = epr.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amps[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(amps[1].norm() < 1e-15);
        assert!(amps[2].norm() < 1e-15);
    }

    #[test]
    fn epr_pair_is_maximally_entangled() {
        let epr = make_epr();
        assert_eq!(schmidt_rank(&epr, &[1], 1e-10).unwrap(), 2);
        for q in [1usize, 2] {
            let rho = reduced_density(&epr, &[q]).unwrap();
            assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
            assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-12);
            assert!(rho.entry(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn teleport_zero_state() {
        let zero = QuantumState::zero(1).unwrap();
        for seed in 0..8 {
            let t = teleport(&zero, seed).unwrap();
            assert!((t.fidelity - 1.0).abs() < 1e-12);
            assert_eq!(t.classical_bits.len(), 2);
        }
    }

    #[test]
    fn teleport_plus_state_all_branches() {
        let plus = QuantumState::from_amplitudes(
            1,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        let branches = teleport_branches(&plus).unwrap();
        assert_eq!(branches.len(), 4);
        for b in &branches {
            assert!((b.fidelity - 1.0).abs() < 1e-12);
            assert!((b.probability - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn teleport_random_states_exactly() {
        let mut rng = crate::rng::rng_from_seed(77);
        for _ in 0..200 {
            let psi = random_qubit(&mut rng);
            for branch in teleport_branches(&psi).unwrap() {
                assert!(
                    (branch.fidelity - 1.0).abs() < 1e-12,
                    "branch {:?} fidelity {}",
                    branch.message,
                    branch.fidelity
                );
            }
        }
    }

    #[test]
    fn classical_bits_are_uniform_ish() {
        let mut counts = [0u64; 4];
        let plus = QuantumState::from_amplitudes(
            1,
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        for seed in 0..400 {
            let t = teleport(&plus, seed).unwrap();
            counts[t.classical_bits.to_index()] += 1;
        }
        let stat = crate::stats::chi_square_statistic(&counts, &[0.25; 4]);
        assert!(crate::stats::chi_square_pvalue(stat, 3) > 0.001);
    }

    #[test]
    fn bob_sees_nothing_before_the_message() {
        let mut rng = crate::rng::rng_from_seed(13);
        for _ in 0..25 {
            let psi = random_qubit(&mut rng);
            let run = teleport_run(&psi, &make_epr(), 0).unwrap();
            let rho = reduced_density(&run.pre_measurement, &[3]).unwrap();
            assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-10);
            assert!((rho.entry(1, 1).re - 0.5).abs() < 1e-10);
            assert!(rho.entry(0, 1).norm() < 1e-10);
        }
    }

    #[test]
    fn entanglement_is_spent() {
        let mut rng = crate::rng::rng_from_seed(19);
        let psi = random_qubit(&mut rng);
        let run = teleport_run(&psi, &make_epr(), 5).unwrap();
        let report = entanglement_consumed(&run).unwrap();
        assert_eq!(report.rank_before, 2);
        assert_eq!(report.rank_after, 1);
    }

    #[test]
    fn product_resource_breaks_the_protocol() {
        // substitute |00> for the EPR pair: a generic state no longer
        // survives the trip on any branch
        let psi = QuantumState::from_amplitudes(
            1,
            vec![
                Complex64::new((0.55f64).cos(), 0.0),
                Complex64::from_polar((0.55f64).sin(), 0.7),
            ],
        )
        .unwrap();
        let product = QuantumState::zero(2).unwrap();
        let branches = teleport_branches_with_resource(&psi, &product).unwrap();
        for b in branches {
            assert!(b.fidelity < 0.99, "branch {:?} fidelity {}", b.message, b.fidelity);
        }
    }

    #[test]
    fn teleport_rejects_bad_inputs() {
        let two = QuantumState::zero(2).unwrap();
        assert!(teleport(&two, 0).is_err());
        let unnormalized = QuantumState::from_parts_unchecked(
            1,
            vec![Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)],
        );
        assert!(matches!(teleport(&unnormalized, 0), Err(SimError::InvalidState(_))));
    }
}
