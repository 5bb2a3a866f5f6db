//! Desk-scale period finding for f(x) = a^x mod N, and the factoring demo
//! built on it.
//!
//! One trial runs the full pipeline: put the n-qubit input register into the
//! uniform superposition (n Hadamards), evaluate f into an m-bit output
//! register with one oracle call, measure the output register (collapsing
//! the inputs to a periodic comb), Fourier-transform the input register with
//! the n(n+1)/2-gate circuit, and measure it. Sampled indices cluster near
//! multiples of 2^n / r; continued-fraction convergents recover divisors of
//! the period r, and the least common multiple across trials recovers r
//! itself, certified by a^r = 1 mod N.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SimError, MAX_QUBITS};
use crate::fourier::qft_apply;
use crate::gates::{apply_single_in_place, OneQubitGate};
use crate::ledger::CostLedger;
use crate::rng::{derive_seed, rng_from_seed, SimRng};
use crate::state::{measure_all_with_rng, QuantumState};

/// The function under study: f(x) = base^x mod modulus on an input register
/// wide enough that 2^n >= modulus^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicFunctionSpec {
    modulus: u64,
    base: u64,
    input_bits: usize,
}

impl PeriodicFunctionSpec {
    pub fn new(modulus: u64, base: u64, input_bits: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(SimError::invalid_argument("modulus must be at least 2"));
        }
        if base == 0 {
            return Err(SimError::invalid_argument("base must be positive"));
        }
        if gcd(base, modulus) != 1 {
            return Err(SimError::invalid_argument(format!(
                "base {} and modulus {} must be coprime",
                base, modulus
            )));
        }
        if input_bits >= 64 || (1u128 << input_bits) < (modulus as u128) * (modulus as u128) {
            if input_bits >= 64 {
                return Err(SimError::invalid_argument("input register too wide"));
            }
            return Err(SimError::invalid_argument(format!(
                "input register of {} bits is too narrow: need 2^n >= {}",
                input_bits,
                modulus * modulus
            )));
        }
        let spec = PeriodicFunctionSpec { modulus, base, input_bits };
        if spec.width() > MAX_QUBITS {
            return Err(SimError::capacity(spec.width()));
        }
        Ok(spec)
    }

    /// Smallest input register satisfying 2^n >= modulus^2.
    pub fn with_auto_width(modulus: u64, base: u64) -> Result<Self> {
        let square = (modulus as u128) * (modulus as u128);
        let mut n = 1usize;
        while (1u128 << n) < square {
            n += 1;
        }
        PeriodicFunctionSpec::new(modulus, base, n)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    /// Output register width: enough bits for residues 0..modulus-1.
    pub fn output_bits(&self) -> usize {
        (64 - (self.modulus - 1).leading_zeros()) as usize
    }

    pub fn width(&self) -> usize {
        self.input_bits + self.output_bits()
    }
}

/// table[x] = base^x mod modulus for x < 2^input_bits, by iterated
/// multiplication.
pub fn modexp_table(spec: &PeriodicFunctionSpec) -> Vec<u64> {
    let len = 1usize << spec.input_bits;
    let mut table = Vec::with_capacity(len);
    let mut value = 1u64;
    for _ in 0..len {
        table.push(value);
        value = value * spec.base % spec.modulus;
    }
    table
}

/// The state after quantum parallelism: 2^(-n/2) sum_x |x>|f(x)>.
/// Ledger: n gates + 1 oracle call.
pub fn prepare_parallel_state(
    spec: &PeriodicFunctionSpec,
    ledger: &mut CostLedger,
) -> Result<QuantumState> {
    let n = spec.input_bits;
    let m = spec.output_bits();
    let width = spec.width();
    let table = modexp_table(spec);

    let mut amps = QuantumState::zero(width)?.into_amplitudes();
    let h = OneQubitGate::hadamard();
    for qubit in 1..=n {
        apply_single_in_place(&mut amps, width, &h, qubit, ledger);
    }
    // reversible evaluation |x>|b> -> |x>|b xor f(x)>, a permutation sweep
    for (x, &fx) in table.iter().enumerate() {
        if fx == 0 {
            continue;
        }
        let fx = fx as usize;
        let base_index = x << m;
        for b in 0..(1usize << m) {
            let partner = b ^ fx;
            if b < partner {
                amps.swap(base_index | b, base_index | partner);
            }
        }
    }
    ledger.record("oracle", 0, 0, 1);
    Ok(QuantumState::from_parts_unchecked(width, amps))
}

/// One pipeline run: returns the measured residue and the index sampled from
/// the transformed input register. Fully determined by `rng`.
fn trial_with_rng(
    spec: &PeriodicFunctionSpec,
    rng: &mut SimRng,
    ledger: &mut CostLedger,
) -> Result<(u64, u64)> {
    let n = spec.input_bits;
    let m = spec.output_bits();
    let joint = prepare_parallel_state(spec, ledger)?;
    let amps = joint.amplitudes();

    // measure the output register: marginal over the low m bits
    let mut probs = vec![0.0f64; 1 << m];
    for (index, amp) in amps.iter().enumerate() {
        probs[index & ((1 << m) - 1)] += amp.norm_sqr();
    }
    let residue = crate::state::sample_from_probabilities(&probs, rng);

    // the inputs collapse to a uniform comb over {x : f(x) = residue}
    let scale = 1.0 / probs[residue].sqrt();
    let comb: Vec<Complex64> = (0..(1usize << n))
        .map(|x| amps[(x << m) | residue] * scale)
        .collect();
    let input_state = QuantumState::from_parts_unchecked(n, comb);

    let transformed = qft_apply(&input_state, ledger)?;
    let outcome = measure_all_with_rng(&transformed, rng)?;
    Ok((residue as u64, outcome.bits.to_index() as u64))
}

/// Run one seeded trial and return the sampled index.
pub fn run_period_trial(
    spec: &PeriodicFunctionSpec,
    seed: u64,
    ledger: &mut CostLedger,
) -> Result<u64> {
    let mut rng = rng_from_seed(seed);
    trial_with_rng(spec, &mut rng, ledger).map(|(_, sample)| sample)
}

/// Exact post-transform distribution of the input register given that the
/// output register was measured as `residue`. This is the comb state pushed
/// through the transform analytically; no sampling is involved.
pub fn post_qft_input_distribution(
    spec: &PeriodicFunctionSpec,
    residue: u64,
) -> Result<Vec<f64>> {
    let n = spec.input_bits;
    let table = modexp_table(spec);
    let hits: Vec<usize> = (0..(1usize << n)).filter(|&x| table[x] == residue).collect();
    if hits.is_empty() {
        return Err(SimError::invalid_argument(format!(
            "residue {} is not attained by the function",
            residue
        )));
    }
    let amp = Complex64::new(1.0 / (hits.len() as f64).sqrt(), 0.0);
    let mut comb = vec![Complex64::new(0.0, 0.0); 1 << n];
    for x in hits {
        comb[x] = amp;
    }
    let mut scratch = CostLedger::new();
    let out = qft_apply(&QuantumState::from_parts_unchecked(n, comb), &mut scratch)?;
    Ok(out.amplitudes().iter().map(|a| a.norm_sqr()).collect())
}

/// Smallest convergent denominator d <= r_max of sample/q within 1/(2q), or
/// None. Integer-exact: |sample/q - c/d| <= 1/(2q) iff 2|sample*d - c*q| <= d.
pub fn continued_fraction_period(sample: u64, q: u64, r_max: u64) -> Option<u64> {
    assert!(sample < q, "sample must lie below q");
    if sample == 0 {
        return None;
    }
    let (mut num, mut den) = (sample, q);
    // convergent recurrence seeds: h_{-2}/k_{-2} = 0/1, h_{-1}/k_{-1} = 1/0
    let (mut h_prev, mut h) = (0u64, 1u64);
    let (mut k_prev, mut k) = (1u64, 0u64);
    loop {
        let a = num / den;
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;

        if k > r_max {
            return None;
        }
        if k >= 1 {
            let delta = (sample * k).abs_diff(h * q);
            if 2 * delta <= k {
                return Some(k);
            }
        }
        let rem = num % den;
        if rem == 0 {
            return None;
        }
        num = den;
        den = rem;
    }
}

/// Per-trial evidence kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub sample: u64,
    pub candidate: Option<u64>,
}

/// The extracted period with its supporting evidence.
#[derive(Debug, Clone)]
pub struct PeriodEstimate {
    /// The period r, certified by base^r = 1 mod modulus.
    pub period: u64,
    /// Fraction of executed trials whose candidate divides the period.
    pub confidence: f64,
    /// Trials actually executed (stops early once the period is certified).
    pub trials: usize,
    pub trial_log: Vec<TrialRecord>,
}

/// Find the multiplicative order of the spec's base by repeated seeded
/// trials: candidates merge by least common multiple until base^L = 1 mod N
/// certifies L, which is then reduced to its smallest annihilating divisor
/// (the order itself). Fails only if no certified period emerges within
/// `max_trials` trials.
pub fn estimate_period(
    spec: &PeriodicFunctionSpec,
    max_trials: usize,
    seed: u64,
    ledger: &mut CostLedger,
) -> Result<PeriodEstimate> {
    if max_trials == 0 {
        return Err(SimError::invalid_argument("need at least one trial"));
    }
    let q = 1u64 << spec.input_bits;
    let r_max = spec.modulus;
    let mut acc = 1u64;
    let mut log = Vec::new();

    for trial in 0..max_trials {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        let (_, sample) = trial_with_rng(spec, &mut rng, ledger)?;
        let candidate = continued_fraction_period(sample, q, r_max);
        log.push(TrialRecord { trial, sample, candidate });

        if let Some(d) = candidate {
            if let Some(merged) = lcm_checked(acc, d) {
                acc = merged;
            }
        }
        if modpow(spec.base, acc, spec.modulus) == 1 {
            let period = minimal_annihilating_divisor(spec.base, spec.modulus, acc);
            let agreeing = log
                .iter()
                .filter(|t| t.candidate.is_some_and(|d| period.is_multiple_of(d)))
                .count();
            return Ok(PeriodEstimate {
                period,
                confidence: agreeing as f64 / log.len() as f64,
                trials: log.len(),
                trial_log: log,
            });
        }
    }
    Err(SimError::ExtractionFailure { trials: max_trials })
}

/// base^L = 1 mod N implies ord | L; the order is the smallest divisor of L
/// that still annihilates.
fn minimal_annihilating_divisor(base: u64, modulus: u64, annihilator: u64) -> u64 {
    for d in 1..=annihilator.min(modulus) {
        if annihilator.is_multiple_of(d) && modpow(base, d, modulus) == 1 {
            return d;
        }
    }
    annihilator
}

/// Brute-force multiplicative order: iterate base^k mod modulus. None when
/// base and modulus share a factor.
pub fn multiplicative_order(base: u64, modulus: u64) -> Option<u64> {
    if modulus < 2 || gcd(base, modulus) != 1 {
        return None;
    }
    let mut value = base % modulus;
    for k in 1..=modulus {
        if value == 1 {
            return Some(k);
        }
        value = value * base % modulus;
    }
    None
}

/// Outcome of the factoring demonstration. `factors` is None when the retry
/// cap ran out: reported, not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorOutcome {
    pub factors: Option<(u64, u64)>,
    pub attempts: usize,
}

const FACTOR_ATTEMPT_CAP: usize = 16;
const FACTOR_TRIALS_PER_ESTIMATE: usize = 20;

/// Split an odd composite N <= 64 (not a prime power) into two nontrivial
/// factors: pick a random base, extract its period, and read factors off
/// gcd(a^(r/2) +- 1, N) when the period is even.
pub fn factor_demo(n: u64, seed: u64) -> Result<FactorOutcome> {
    if n > 64 {
        return Err(SimError::invalid_argument("factoring demo is capped at N <= 64"));
    }
    if n < 4 || n.is_multiple_of(2) {
        return Err(SimError::invalid_argument("N must be an odd composite"));
    }
    if is_prime(n) {
        return Err(SimError::invalid_argument("N must be composite"));
    }
    if let Some(p) = prime_power_root(n) {
        return Err(SimError::invalid_argument(format!(
            "N = {}^k is a prime power; the gcd trick cannot split it",
            p
        )));
    }

    let mut rng = rng_from_seed(seed);
    for attempt in 1..=FACTOR_ATTEMPT_CAP {
        let a = rng.gen_range(2..n);
        let g = gcd(a, n);
        if g != 1 {
            // the guess already shares a factor
            return Ok(FactorOutcome {
                factors: Some(ordered_pair(g, n / g)),
                attempts: attempt,
            });
        }
        let spec = PeriodicFunctionSpec::with_auto_width(n, a)?;
        let mut scratch = CostLedger::new();
        let estimate_seed = derive_seed(seed, attempt as u64);
        let estimate = match estimate_period(
            &spec,
            FACTOR_TRIALS_PER_ESTIMATE,
            estimate_seed,
            &mut scratch,
        ) {
            Ok(e) => e,
            Err(SimError::ExtractionFailure { .. }) => continue,
            Err(other) => return Err(other),
        };
        let r = estimate.period;
        if r % 2 != 0 {
            continue;
        }
        let x = modpow(a, r / 2, n);
        if x == n - 1 {
            continue;
        }
        for candidate in [gcd(x + 1, n), gcd(x.abs_diff(1), n)] {
            if candidate > 1 && candidate < n {
                return Ok(FactorOutcome {
                    factors: Some(ordered_pair(candidate, n / candidate)),
                    attempts: attempt,
                });
            }
        }
    }
    Ok(FactorOutcome { factors: None, attempts: FACTOR_ATTEMPT_CAP })
}

fn ordered_pair(a: u64, b: u64) -> (u64, u64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_checked(a: u64, b: u64) -> Option<u64> {
    let g = gcd(a, b);
    let scaled = (a / g) as u128 * b as u128;
    u64::try_from(scaled).ok()
}

pub(crate) fn modpow(base: u64, mut exponent: u64, modulus: u64) -> u64 {
    let mut result = 1u64;
    let mut factor = base % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = result * factor % modulus;
        }
        factor = factor * factor % modulus;
        exponent >>= 1;
    }
    result
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Some(p) when n = p^k for a prime p and k >= 2.
fn prime_power_root(n: u64) -> Option<u64> {
    for k in 2..=n.ilog2() {
        let c = (n as f64).powf(1.0 / k as f64).round() as u64;
        for candidate in c.saturating_sub(1)..=c + 1 {
            if candidate >= 2 && candidate.pow(k) == n {
                return Some(candidate);
            }
        }
    }
    None
}
