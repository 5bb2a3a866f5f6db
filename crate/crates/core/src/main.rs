//! Command-line driver: each subcommand runs one experiment, writes a
//! deterministic RunRecord (JSON) or a tabular series (CSV), and exits 0 on
//! success, 2 on invalid input or I/O trouble, 3 on algorithmic failure.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use num_complex::Complex64;

use qtally::error::{SimError, MAX_KRON_QUBITS, MAX_QUBITS};
use qtally::fourier::{fft, qft_apply};
use qtally::gates::{apply_dense, apply_factored, DenseOperator, FactoredOperator};
use qtally::ledger::{scaling_fit, CostLedger};
use qtally::oracle::{build_oracle, parallel_evaluate, uniform_superposition, TruthTable};
use qtally::period::{estimate_period, PeriodicFunctionSpec};
use qtally::record::{RunOutputs, RunRecord};
use qtally::rng::{derive_seed, rng_from_seed};
use qtally::state::{inner_product, reduced_density, schmidt_rank, QuantumState};
use qtally::stats::{chi_square_pvalue, chi_square_statistic};
use qtally::teleport::{make_epr, random_qubit, teleport};

const USAGE: &str = "\
qtally: state-vector quantum circuit simulator with an exact cost ledger

USAGE:
  qtally <COMMAND> [FLAGS]

COMMANDS:
  superpose       prepare the uniform superposition on n qubits
  scaling         sweep an engine over a qubit range and fit scaling laws
  period          extract the period of a^x mod N through the full pipeline
  teleport        teleport random qubit states and tally fidelities
  entangle-demo   contrast the two Bell states locally and globally
  parallel        evaluate a truth-table function on all inputs at once

FLAGS:
  -n, --qubits N     register width (superpose)
      --engine E     dense | factored | fft | qft (scaling)
      --range A..B   inclusive qubit range, at least 3 points (scaling)
      --base A       base of a^x mod N (period)
      --modulus N    modulus of a^x mod N (period)
      --input-bits K input register width; default: smallest with 2^K >= N^2
      --trials T     repetitions (period: default 20; teleport: default 1000)
      --table PATH   truth-table file: one line of 2^n characters from {0,1}
      --seed S       RNG seed (default 0)
      --out PATH     write the record here instead of stdout
      --format F     json (default) or csv (scaling, period, teleport only)
  -h, --help         this text

CSV COLUMNS:
  scaling   n,count,engine
  period    trial,sample,candidate
  teleport  trial,b1,b2,fidelity

EXIT CODES:
  0 success, 2 invalid input or I/O error, 3 algorithmic failure
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Default)]
struct Flags {
    qubits: Option<usize>,
    seed: u64,
    trials: Option<usize>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    engine: Option<String>,
    range: Option<(u32, u32)>,
    base: Option<u64>,
    modulus: Option<u64>,
    input_bits: Option<usize>,
    table: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Sim(SimError),
    Io(std::io::Error),
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Sim(SimError::ExtractionFailure { .. }) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(msg) => msg.clone(),
            CliError::Sim(e) => e.to_string(),
            CliError::Io(e) => format!("i/o error: {}", e),
        }
    }
}

fn usage_err(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

struct CsvTable {
    header: &'static str,
    rows: Vec<String>,
}

struct CommandResult {
    record: RunRecord,
    csv: Option<CsvTable>,
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{}", USAGE);
        return if args.is_empty() { ExitCode::from(2) } else { ExitCode::SUCCESS };
    }
    let command = args[0].clone();
    let flags = match parse_flags(&args[1..]) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };

    let result = match command.as_str() {
        "superpose" => cmd_superpose(&flags),
        "scaling" => cmd_scaling(&flags),
        "period" => cmd_period(&flags),
        "teleport" => cmd_teleport(&flags),
        "entangle-demo" => cmd_entangle_demo(&flags),
        "parallel" => cmd_parallel(&flags),
        other => Err(usage_err(format!("unknown command '{}'; try --help", other))),
    };

    match result.and_then(|r| emit(&flags, r)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn parse_flags(args: &[String]) -> Result<Flags, CliError> {
    let mut flags = Flags::default();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let (name, inline) = match arg.split_once('=') {
            Some((n, v)) => (n, Some(v.to_string())),
            None => (arg.as_str(), None),
        };
        let mut value = |flag: &str| -> Result<String, CliError> {
            if let Some(v) = inline.clone() {
                return Ok(v);
            }
            it.next()
                .cloned()
                .ok_or_else(|| usage_err(format!("missing value for {}", flag)))
        };
        match name {
            "-n" | "--qubits" => {
                flags.qubits = Some(parse_num(&value(name)?, "--qubits")?);
            }
            "--seed" => flags.seed = parse_num(&value(name)?, "--seed")?,
            "--trials" => flags.trials = Some(parse_num(&value(name)?, "--trials")?),
            "--out" => flags.out = Some(PathBuf::from(value(name)?)),
            "--format" => {
                flags.format = Some(match value(name)?.as_str() {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    other => {
                        return Err(usage_err(format!(
                            "invalid --format '{}': expected json or csv",
                            other
                        )))
                    }
                });
            }
            "--engine" => flags.engine = Some(value(name)?),
            "--range" => {
                let v = value(name)?;
                let (a, b) = v
                    .split_once("..")
                    .ok_or_else(|| usage_err("invalid --range: expected A..B"))?;
                let lo = parse_num(a, "--range")?;
                let hi = parse_num(b, "--range")?;
                if lo > hi {
                    return Err(usage_err("invalid --range: A must not exceed B"));
                }
                flags.range = Some((lo, hi));
            }
            "--base" => flags.base = Some(parse_num(&value(name)?, "--base")?),
            "--modulus" => flags.modulus = Some(parse_num(&value(name)?, "--modulus")?),
            "--input-bits" => flags.input_bits = Some(parse_num(&value(name)?, "--input-bits")?),
            "--table" => flags.table = Some(PathBuf::from(value(name)?)),
            other => return Err(usage_err(format!("unknown flag '{}'", other))),
        }
    }
    Ok(flags)
}

fn parse_num<T: std::str::FromStr>(text: &str, flag: &str) -> Result<T, CliError> {
    text.parse()
        .map_err(|_| usage_err(format!("invalid value '{}' for {}", text, flag)))
}

fn emit(flags: &Flags, result: CommandResult) -> Result<(), CliError> {
    let format = flags.format.unwrap_or(OutputFormat::Json);
    let text = match format {
        OutputFormat::Json => result.record.to_json(),
        OutputFormat::Csv => {
            let table = result.csv.ok_or_else(|| {
                usage_err("csv output is only available for scaling, period and teleport")
            })?;
            let mut text = String::from(table.header);
            text.push('\n');
            for row in table.rows {
                text.push_str(&row);
                text.push('\n');
            }
            text
        }
    };
    match &flags.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_superpose(flags: &Flags) -> Result<CommandResult, CliError> {
    let n = flags.qubits.ok_or_else(|| usage_err("superpose needs --qubits"))?;
    let mut ledger = CostLedger::new();
    let state = uniform_superposition(n, &mut ledger)?;
    let target = Complex64::new(2f64.powf(-(n as f64) / 2.0), 0.0);
    let deviation = state
        .amplitudes()
        .iter()
        .map(|a| (a - target).norm())
        .fold(0.0, f64::max);

    let mut params = BTreeMap::new();
    params.insert("qubits".into(), n.to_string());
    let outputs = RunOutputs::Superpose {
        qubits: n,
        gate_count: ledger.gate_count,
        max_amplitude_deviation: deviation,
    };
    Ok(CommandResult {
        record: RunRecord::new("superpose", params, flags.seed, ledger, outputs),
        csv: None,
    })
}

fn cmd_scaling(flags: &Flags) -> Result<CommandResult, CliError> {
    let engine = flags
        .engine
        .clone()
        .ok_or_else(|| usage_err("scaling needs --engine"))?;
    let (lo, hi) = flags.range.ok_or_else(|| usage_err("scaling needs --range A..B"))?;
    if hi as usize > MAX_QUBITS {
        return Err(CliError::Sim(SimError::Capacity {
            requested: hi as usize,
            max: MAX_QUBITS,
        }));
    }
    if engine == "dense" && hi as usize > MAX_KRON_QUBITS {
        return Err(usage_err(format!(
            "dense engine materializes a 2^n x 2^n matrix; the range is capped at n = {}",
            MAX_KRON_QUBITS
        )));
    }

    let mut rng = rng_from_seed(flags.seed);
    let mut merged = CostLedger::new();
    let mut points = Vec::new();
    for n in lo..=hi {
        let mut ledger = CostLedger::new();
        let count = run_engine(&engine, n as usize, &mut ledger, &mut rng)?;
        points.push((n, count));
        merged.merge(&ledger);
    }
    let report = scaling_fit(&points)?;

    let csv_rows = points
        .iter()
        .map(|(n, count)| format!("{},{},{}", n, count, engine))
        .collect();
    let mut params = BTreeMap::new();
    params.insert("engine".into(), engine.clone());
    params.insert("range".into(), format!("{}..{}", lo, hi));
    let outputs = RunOutputs::Scaling { engine, report };
    Ok(CommandResult {
        record: RunRecord::new("scaling", params, flags.seed, merged, outputs),
        csv: Some(CsvTable { header: "n,count,engine", rows: csv_rows }),
    })
}

fn run_engine(
    engine: &str,
    n: usize,
    ledger: &mut CostLedger,
    rng: &mut qtally::rng::SimRng,
) -> Result<u64, CliError> {
    match engine {
        "dense" => {
            let state = QuantumState::zero(n)?;
            let op = DenseOperator::identity(1 << n)?;
            apply_dense(&state, &op, ledger)?;
            Ok(ledger.multiply_adds)
        }
        "factored" => {
            let state = QuantumState::zero(n)?;
            let op = FactoredOperator::hadamard_all(n)?;
            apply_factored(&state, &op, ledger)?;
            Ok(ledger.multiply_adds)
        }
        "fft" => {
            use rand::Rng;
            let dim = 1usize << n;
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut v {
                *z /= norm;
            }
            fft(&v, ledger)?;
            Ok(ledger.multiply_adds)
        }
        "qft" => {
            let state = QuantumState::zero(n)?;
            qft_apply(&state, ledger)?;
            Ok(ledger.gate_count)
        }
        other => Err(usage_err(format!(
            "unknown engine '{}': expected dense, factored, fft or qft",
            other
        ))),
    }
}

fn cmd_period(flags: &Flags) -> Result<CommandResult, CliError> {
    let base = flags.base.ok_or_else(|| usage_err("period needs --base"))?;
    let modulus = flags.modulus.ok_or_else(|| usage_err("period needs --modulus"))?;
    let trials = flags.trials.unwrap_or(20);
    let spec = match flags.input_bits {
        Some(bits) => PeriodicFunctionSpec::new(modulus, base, bits)?,
        None => PeriodicFunctionSpec::with_auto_width(modulus, base)?,
    };

    let mut ledger = CostLedger::new();
    let estimate = estimate_period(&spec, trials, flags.seed, &mut ledger)?;

    let csv_rows = estimate
        .trial_log
        .iter()
        .map(|t| {
            let candidate = t.candidate.map(|d| d.to_string()).unwrap_or_default();
            format!("{},{},{}", t.trial, t.sample, candidate)
        })
        .collect();
    let mut params = BTreeMap::new();
    params.insert("base".into(), base.to_string());
    params.insert("modulus".into(), modulus.to_string());
    params.insert("input_bits".into(), spec.input_bits().to_string());
    params.insert("trials".into(), trials.to_string());
    let outputs = RunOutputs::Period {
        period: estimate.period,
        confidence: estimate.confidence,
        trials: estimate.trials,
        trial_log: estimate.trial_log,
    };
    Ok(CommandResult {
        record: RunRecord::new("period", params, flags.seed, ledger, outputs),
        csv: Some(CsvTable { header: "trial,sample,candidate", rows: csv_rows }),
    })
}

fn cmd_teleport(flags: &Flags) -> Result<CommandResult, CliError> {
    let trials = flags.trials.unwrap_or(1000);
    if trials == 0 {
        return Err(CliError::Sim(SimError::invalid_argument(
            "teleport needs at least one trial",
        )));
    }
    let mut state_rng = rng_from_seed(derive_seed(flags.seed, u64::MAX));
    let mut counts = [0u64; 4];
    let mut min_fidelity = f64::INFINITY;
    let mut csv_rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let psi = random_qubit(&mut state_rng);
        let transcript = teleport(&psi, derive_seed(flags.seed, trial as u64))?;
        let bits = transcript.classical_bits.bits().to_vec();
        counts[transcript.classical_bits.to_index()] += 1;
        min_fidelity = min_fidelity.min(transcript.fidelity);
        csv_rows.push(format!(
            "{},{},{},{}",
            trial, bits[0], bits[1], transcript.fidelity
        ));
    }
    let frequencies =
        [0, 1, 2, 3].map(|k| counts[k] as f64 / trials as f64);
    let pvalue = chi_square_pvalue(chi_square_statistic(&counts, &[0.25; 4]), 3);

    let mut params = BTreeMap::new();
    params.insert("trials".into(), trials.to_string());
    let outputs = RunOutputs::Teleport {
        trials,
        min_fidelity,
        bit_pair_frequencies: frequencies,
        chi_square_pvalue: pvalue,
    };
    Ok(CommandResult {
        record: RunRecord::new("teleport", params, flags.seed, CostLedger::new(), outputs),
        csv: Some(CsvTable { header: "trial,b1,b2,fidelity", rows: csv_rows }),
    })
}

fn cmd_entangle_demo(flags: &Flags) -> Result<CommandResult, CliError> {
    let mut ledger = CostLedger::new();
    let phi = make_epr();
    // (|01> + |10>)/sqrt(2): flip qubit 2 of the first Bell state
    let psi = qtally::gates::apply_single(
        &phi,
        &qtally::gates::OneQubitGate::pauli_x(),
        2,
        &mut ledger,
    )?;

    let mut max_local_difference = 0.0f64;
    for side in [1usize, 2] {
        let a = reduced_density(&phi, &[side])?;
        let b = reduced_density(&psi, &[side])?;
        max_local_difference = max_local_difference.max(a.max_abs_diff(&b));
    }
    let rho_phi = reduced_density(&phi, &[1])?;
    let rho_psi = reduced_density(&psi, &[1])?;
    let flatten = |m: &qtally::state::DensityMatrix| {
        m.entries().iter().map(|z| [z.re, z.im]).collect::<Vec<[f64; 2]>>()
    };
    let global = inner_product(&phi, &psi)?;

    let outputs = RunOutputs::Entangle {
        reduced_phi: flatten(&rho_phi),
        reduced_psi: flatten(&rho_psi),
        max_local_difference,
        global_inner_product: [global.re, global.im],
        schmidt_rank_phi: schmidt_rank(&phi, &[1], 1e-10)?,
        schmidt_rank_psi: schmidt_rank(&psi, &[1], 1e-10)?,
    };
    Ok(CommandResult {
        record: RunRecord::new("entangle-demo", BTreeMap::new(), flags.seed, ledger, outputs),
        csv: None,
    })
}

fn cmd_parallel(flags: &Flags) -> Result<CommandResult, CliError> {
    let path = flags.table.clone().ok_or_else(|| usage_err("parallel needs --table"))?;
    let text = std::fs::read_to_string(&path)?;
    let table = TruthTable::parse(&text)?;
    let constant = table.is_constant();
    let arity = table.arity();
    let oracle = build_oracle(table)?;

    let mut ledger = CostLedger::new();
    let state = parallel_evaluate(&oracle, &mut ledger)?;
    let cut: Vec<usize> = (1..=arity).collect();
    let rank = schmidt_rank(&state, &cut, 1e-10)?;

    let mut params = BTreeMap::new();
    params.insert("table".into(), path.display().to_string());
    params.insert("arity".into(), arity.to_string());
    let outputs = RunOutputs::Parallel {
        arity,
        gate_count: ledger.gate_count,
        oracle_calls: ledger.oracle_calls,
        input_output_schmidt_rank: rank,
        constant_function: constant,
    };
    Ok(CommandResult {
        record: RunRecord::new("parallel", params, flags.seed, ledger, outputs),
        csv: None,
    })
}
