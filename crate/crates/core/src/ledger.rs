//! Exact operation accounting. Engines record their work analytically (one
//! closed-form increment per sweep), so ledger totals are definitions rather
//! than measurements: tests assert them as integer equalities.
//!
//! Units: one complex multiply-add is the unit of classical arithmetic; a
//! 2x2 matrix-vector application costs 4 units. Gate applications and oracle
//! calls are tallied separately and never converted into multiply-adds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Per-phase share of a ledger.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTally {
    pub multiply_adds: u64,
    pub gate_count: u64,
    pub oracle_calls: u64,
}

/// Tally of elementary operations for one run. Counters only ever grow;
/// phase sub-tallies always sum to the totals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    pub multiply_adds: u64,
    pub gate_count: u64,
    pub oracle_calls: u64,
    pub phases: BTreeMap<String, PhaseTally>,
}

impl CostLedger {
    pub fn new() -> Self {
        CostLedger::default()
    }

    /// Credit `phase` with the given counts.
    pub fn record(&mut self, phase: &str, multiply_adds: u64, gates: u64, oracles: u64) {
        self.multiply_adds += multiply_adds;
        self.gate_count += gates;
        self.oracle_calls += oracles;
        let tally = self.phases.entry(phase.to_string()).or_default();
        tally.multiply_adds += multiply_adds;
        tally.gate_count += gates;
        tally.oracle_calls += oracles;
    }

    /// Fold another ledger into this one (associative, phase-wise).
    pub fn merge(&mut self, other: &CostLedger) {
        self.multiply_adds += other.multiply_adds;
        self.gate_count += other.gate_count;
        self.oracle_calls += other.oracle_calls;
        for (phase, tally) in &other.phases {
            let mine = self.phases.entry(phase.clone()).or_default();
            mine.multiply_adds += tally.multiply_adds;
            mine.gate_count += tally.gate_count;
            mine.oracle_calls += tally.oracle_calls;
        }
    }

    pub fn phase(&self, name: &str) -> PhaseTally {
        self.phases.get(name).copied().unwrap_or_default()
    }
}

/// One fitted power law: `log2(count)` regressed against a predictor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    /// Least-squares slope.
    pub exponent: f64,
    /// Root-mean-square residual of the fit, in log2 units.
    pub residual: f64,
}

/// Scaling analysis of (n, count) ledger points under both models the
/// polynomial/exponential dichotomy cares about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<(u32, u64)>,
    /// count ~ 2^(exponent * n): slope of log2(count) vs n.
    pub exponential: ModelFit,
    /// count ~ n^exponent: slope of log2(count) vs log2(n).
    pub polynomial: ModelFit,
}

/// Fit both scaling models to a series of exact counts.
pub fn scaling_fit(points: &[(u32, u64)]) -> Result<ScalingReport> {
    if points.len() < 3 {
        return Err(SimError::invalid_argument("scaling fit needs at least 3 points"));
    }
    if points.iter().any(|&(n, count)| n == 0 || count == 0) {
        return Err(SimError::invalid_argument("scaling fit needs positive n and counts"));
    }

    let logs: Vec<f64> = points.iter().map(|&(_, c)| (c as f64).log2()).collect();
    let ns: Vec<f64> = points.iter().map(|&(n, _)| n as f64).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.log2()).collect();

    Ok(ScalingReport {
        points: points.to_vec(),
        exponential: least_squares(&ns, &logs),
        polynomial: least_squares(&log_ns, &logs),
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> ModelFit {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    ModelFit {
        exponent: slope,
        residual: (ss / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_accumulates_totals_and_phases() {
        let mut ledger = CostLedger::new();
        ledger.record("sweep", 4, 1, 0);
        assert_eq!(ledger.multiply_adds, 4);
        ledger.record("sweep", 4, 0, 0);
        ledger.record("oracle", 0, 0, 1);
        assert_eq!(ledger.multiply_adds, 8);
        assert_eq!(ledger.gate_count, 1);
        assert_eq!(ledger.oracle_calls, 1);
        assert_eq!(ledger.phase("sweep").multiply_adds, 8);
        assert_eq!(ledger.phase("oracle").oracle_calls, 1);

        // sub-tallies sum to totals
        let sums = ledger.phases.values().fold((0, 0, 0), |acc, t| {
            (acc.0 + t.multiply_adds, acc.1 + t.gate_count, acc.2 + t.oracle_calls)
        });
        assert_eq!(sums, (ledger.multiply_adds, ledger.gate_count, ledger.oracle_calls));
    }

    #[test]
    fn empty_ledger_is_zero() {
        let ledger = CostLedger::new();
        assert_eq!(ledger.multiply_adds, 0);
        assert_eq!(ledger.gate_count, 0);
        assert_eq!(ledger.oracle_calls, 0);
    }

    #[test]
    fn merge_is_associative() {
        let mut a = CostLedger::new();
        a.record("x", 1, 2, 3);
        let mut b = CostLedger::new();
        b.record("y", 10, 0, 0);
        let mut c = CostLedger::new();
        c.record("x", 5, 5, 5);

        let mut ab_c = a.clone();
        ab_c.merge(&b);
        ab_c.merge(&c);

        let mut bc = b.clone();
        bc.merge(&c);
        let mut a_bc = a.clone();
        a_bc.merge(&bc);

        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn scaling_fit_exact_exponential() {
        // dense-apply counts 2^(2n): slope must be exactly 2
        let points = [(4u32, 256u64), (6, 4096), (8, 65536)];
        let report = scaling_fit(&points).unwrap();
        assert!((report.exponential.exponent - 2.0).abs() < 1e-12);
        assert!(report.exponential.residual < 1e-12);
    }

    #[test]
    fn scaling_fit_quadratic_gate_counts() {
        // n(n+1)/2 at n = 4, 6, 8: log-log slope lands within 15% of 2
        let points = [(4u32, 10u64), (6, 21), (8, 36)];
        let report = scaling_fit(&points).unwrap();
        assert!(
            (report.polynomial.exponent - 2.0).abs() < 0.3,
            "polynomial exponent {}",
            report.polynomial.exponent
        );
        // and the exponential model fits worse than it does for true powers
        assert!(report.polynomial.residual < report.exponential.residual);
    }

    #[test]
    fn scaling_fit_constant_counts() {
        let points = [(2u32, 7u64), (4, 7), (8, 7)];
        let report = scaling_fit(&points).unwrap();
        assert!(report.exponential.exponent.abs() < 1e-12);
        assert!(report.polynomial.exponent.abs() < 1e-12);
    }

    #[test]
    fn scaling_fit_rejects_insufficient_points() {
        assert!(scaling_fit(&[(1, 1), (2, 2)]).is_err());
        assert!(scaling_fit(&[(1, 0), (2, 2), (3, 3)]).is_err());
    }
}
