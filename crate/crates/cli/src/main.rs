//! Command-line front end: run circuits from files, execute each library
//! workflow by name, and render exact or sampled histograms.
//!
//! Exit codes: 0 on success, 2 on validation errors, 3 when a result
//! carries a resolution or iteration-cap warning.

mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CommandOutput, Sampling};
use render::Format;

#[derive(Parser)]
#[command(
    name = "qdict",
    version,
    about = "Statevector quantum-circuit simulator with phase estimation, Grover search, \
             quantum counting, and quantum dictionary workflows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Sample this many measurement shots instead of exact probabilities.
    #[arg(long, global = true)]
    shots: Option<u64>,

    /// Seed for every sampled draw (QDICT_SEED is the fallback).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report exact probabilities (the default; conflicts with --shots).
    #[arg(long, global = true)]
    exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit from a JSON file and report the outcome histogram.
    Simulate {
        /// Circuit file: {"num_qubits": n, "ops": [{"kind": "h", "target": 0}, ...]}.
        #[arg(long)]
        circuit: String,
        /// Show magnitudes and phase arrows instead of probabilities.
        #[arg(long)]
        amplitudes: bool,
    },
    /// Phase estimation of a hidden rotation parameter.
    Pe {
        /// The hidden parameter, in units of 2π/2^control.
        #[arg(long)]
        p: f64,
        /// Control register width in qubits.
        #[arg(long)]
        control: usize,
    },
    /// Grover search over a uniform superposition.
    Grover {
        /// Search register width in qubits.
        #[arg(long)]
        width: usize,
        /// Oracle kind: even, odd, sign, or set.
        #[arg(long, default_value = "set")]
        oracle: String,
        /// Binary labels the set oracle recognizes, comma separated.
        #[arg(long)]
        good: Option<String>,
        /// Oracle/diffusion rounds (default: floor of sqrt(2^width)).
        #[arg(long)]
        iterations: Option<usize>,
        /// Realize the oracle with the controlled Z,X,Z,X sequence.
        #[arg(long)]
        zxzx: bool,
    },
    /// Count how many basis states an oracle recognizes.
    Count {
        /// Target register width in qubits.
        #[arg(long)]
        width: usize,
        /// Oracle kind: even, odd, sign, or set.
        #[arg(long, default_value = "set")]
        oracle: String,
        /// Binary labels the set oracle recognizes, comma separated.
        #[arg(long)]
        good: Option<String>,
        /// Control register width in qubits.
        #[arg(long)]
        control: usize,
        /// Realize the oracle with the controlled Z,X,Z,X sequence.
        #[arg(long)]
        zxzx: bool,
    },
    /// Populate a dictionary and report the joint key/value histogram.
    QdictEncode {
        /// Dictionary file: {"key_width", "value_width", "source": {...}}.
        #[arg(long)]
        dict: String,
    },
    /// Amplify one key of a dictionary and report the histogram.
    QdictLookup {
        #[arg(long)]
        dict: String,
        /// Key to look up (decimal).
        #[arg(long)]
        key: u64,
        /// Amplification rounds (default: closest to certainty).
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Count the keys whose value equals a target.
    QdictCountEq {
        #[arg(long)]
        dict: String,
        /// Target value (signed decimal).
        #[arg(long, allow_negative_numbers = true)]
        value: i64,
        #[arg(long)]
        control: usize,
    },
    /// Count the keys whose value is strictly below a threshold.
    QdictCountLt {
        #[arg(long)]
        dict: String,
        /// Threshold (signed decimal).
        #[arg(long, allow_negative_numbers = true)]
        threshold: i64,
        #[arg(long)]
        control: usize,
    },
    /// Iteratively minimize a quadratic polynomial of binary variables.
    QuboMin {
        /// Polynomial JSON: {"constant"?, "linear": [...], "quadratic": [[i,j,q], ...]}.
        #[arg(long)]
        poly: String,
        /// Key register width (default: the number of linear coefficients).
        #[arg(long)]
        key_width: Option<usize>,
        /// Value register width in qubits.
        #[arg(long)]
        value_width: usize,
        #[arg(long)]
        control: usize,
    },
    /// Count subsets of the inputs by their sum.
    SubsetSum {
        /// Comma-separated integers, e.g. 1,0,2,-1.
        #[arg(long, allow_hyphen_values = true)]
        inputs: String,
        #[arg(long)]
        value_width: usize,
        #[arg(long)]
        control: usize,
        /// Count subsets summing exactly to this value (default 0).
        #[arg(long, allow_negative_numbers = true)]
        target: Option<i64>,
        /// Count subsets summing strictly below this value instead.
        #[arg(long, allow_negative_numbers = true)]
        less_than: Option<i64>,
    },
    /// Count bit strings without consecutive ones (a Fibonacci number).
    Fibonacci {
        /// String length in bits.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        control: usize,
    },
    /// Encode a probability distribution and report the value marginal.
    Dist {
        /// binomial, poisson, or table.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        key_width: usize,
        #[arg(long)]
        value_width: usize,
        /// Rate of the poisson distribution.
        #[arg(long)]
        lambda: Option<f64>,
        /// Masses for the table kind: value:probability pairs, comma separated.
        #[arg(long)]
        masses: Option<String>,
    },
}

fn run(cli: Cli) -> anyhow::Result<CommandOutput> {
    let sampling = Sampling::resolve(cli.shots, cli.seed, cli.exact)?;
    let format = cli.format;
    match &cli.command {
        Command::Simulate {
            circuit,
            amplitudes,
        } => commands::simulate(circuit, *amplitudes, format, &sampling),
        Command::Pe { p, control } => commands::phase_estimate(*p, *control, format, &sampling),
        Command::Grover {
            width,
            oracle,
            good,
            iterations,
            zxzx,
        } => commands::grover(*width, oracle, good, *iterations, *zxzx, format, &sampling),
        Command::Count {
            width,
            oracle,
            good,
            control,
            zxzx,
        } => commands::count(*width, oracle, good, *control, *zxzx, format, &sampling),
        Command::QdictEncode { dict } => commands::qdict_encode(dict, format, &sampling),
        Command::QdictLookup {
            dict,
            key,
            iterations,
        } => commands::qdict_lookup(dict, *key, *iterations, format, &sampling),
        Command::QdictCountEq {
            dict,
            value,
            control,
        } => commands::qdict_count_eq(dict, *value, *control, format, &sampling),
        Command::QdictCountLt {
            dict,
            threshold,
            control,
        } => commands::qdict_count_lt(dict, *threshold, *control, format, &sampling),
        Command::QuboMin {
            poly,
            key_width,
            value_width,
            control,
        } => commands::qubo_min(poly, *key_width, *value_width, *control, format, &sampling),
        Command::SubsetSum {
            inputs,
            value_width,
            control,
            target,
            less_than,
        } => commands::subset_sum(
            inputs,
            *value_width,
            *control,
            *target,
            *less_than,
            format,
            &sampling,
        ),
        Command::Fibonacci { n, control } => commands::fibonacci(*n, *control, format, &sampling),
        Command::Dist {
            kind,
            key_width,
            value_width,
            lambda,
            masses,
        } => commands::dist(
            kind,
            *key_width,
            *value_width,
            *lambda,
            masses,
            format,
            &sampling,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output_path = cli.output.clone();
    match run(cli) {
        Ok(CommandOutput { text, flagged }) => {
            let write_result = match output_path {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(Into::into),
            };
            if let Err(e) = write_result {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if flagged {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
