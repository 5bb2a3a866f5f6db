//! Serializable experiment records. One CLI invocation produces one
//! [`RunRecord`]; identical seeded invocations produce byte-identical JSON
//! (field order is fixed by the struct declarations and the parameter map is
//! ordered, and nothing time- or host-dependent is recorded).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fourier::FourierConvention;
use crate::ledger::{CostLedger, ScalingReport};
use crate::period::TrialRecord;

/// Complex matrix entries flattened row-major as [re, im] pairs.
pub type MatrixEntries = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunOutputs {
    Superpose {
        qubits: usize,
        gate_count: u64,
        /// Largest |amplitude - 2^(-n/2)| over the register.
        max_amplitude_deviation: f64,
    },
    Scaling {
        engine: String,
        report: ScalingReport,
    },
    Period {
        period: u64,
        confidence: f64,
        trials: usize,
        trial_log: Vec<TrialRecord>,
    },
    Teleport {
        trials: usize,
        min_fidelity: f64,
        /// Frequencies of the classical bit pairs 00, 01, 10, 11.
        bit_pair_frequencies: [f64; 4],
        chi_square_pvalue: f64,
    },
    Entangle {
        /// Reduced density matrix of qubit 1 of (|00> + |11>)/sqrt(2).
        reduced_phi: MatrixEntries,
        /// Same for (|01> + |10>)/sqrt(2).
        reduced_psi: MatrixEntries,
        max_local_difference: f64,
        global_inner_product: [f64; 2],
        schmidt_rank_phi: usize,
        schmidt_rank_psi: usize,
    },
    Parallel {
        arity: usize,
        gate_count: u64,
        oracle_calls: u64,
        input_output_schmidt_rank: usize,
        constant_function: bool,
    },
}

/// Everything needed to archive or replay one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub ledger: CostLedger,
    pub outputs: RunOutputs,
    pub convention: FourierConvention,
    pub version: String,
}

impl RunRecord {
    pub fn new(
        command: &str,
        parameters: BTreeMap<String, String>,
        seed: u64,
        ledger: CostLedger,
        outputs: RunOutputs,
    ) -> Self {
        RunRecord {
            command: command.to_string(),
            parameters,
            seed,
            ledger,
            outputs,
            convention: FourierConvention::standard(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("record serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record() -> RunRecord {
        let mut ledger = CostLedger::new();
        ledger.record("apply_single", 4, 1, 0);
        let mut params = BTreeMap::new();
        params.insert("qubits".to_string(), "1".to_string());
        RunRecord::new(
            "superpose",
            params,
            42,
            ledger,
            RunOutputs::Superpose {
                qubits: 1,
                gate_count: 1,
                max_amplitude_deviation: 1.1102230246251565e-16,
            },
        )
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let record = sample_record();
        let json = record.to_json();
        let back = RunRecord::from_json(&json).unwrap();
        assert_eq!(record, back);
        // and re-serialization is byte-identical
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn serialization_is_deterministic() {
        assert_eq!(sample_record().to_json(), sample_record().to_json());
    }

    #[test]
    fn outputs_variants_round_trip() {
        let outputs = RunOutputs::Period {
            period: 4,
            confidence: 0.75,
            trials: 4,
            trial_log: vec![TrialRecord { trial: 0, sample: 192, candidate: Some(4) }],
        };
        let json = serde_json::to_string(&outputs).unwrap();
        let back: RunOutputs = serde_json::from_str(&json).unwrap();
        assert_eq!(outputs, back);
    }
}
