//! One handler per subcommand. Each returns the rendered output plus a flag
//! that maps to exit code 3 (counting resolution or iteration-cap warnings).

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use qdict::algorithms::{
    grover_search, phase_estimation, quantum_count_uniform, CountingResult, OracleConstruction,
    OracleSpec, PhaseEstimationConfig,
};
use qdict::circuit::Circuit;
use qdict::dict::{self, DictionaryFile, DictionarySpec, EncodingSource, QuadraticPolynomial};
use qdict::state::{basis_label, OutcomeHistogram};

use crate::render::{
    complex_svg, complex_text, histogram_csv, histogram_json_value, histogram_svg, histogram_text,
    Format, LabelStyle,
};

pub struct CommandOutput {
    pub text: String,
    pub flagged: bool,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        CommandOutput {
            text,
            flagged: false,
        }
    }
}

/// Shot settings resolved from `--shots`, `--seed`, `--exact`, and the
/// `QDICT_SEED` fallback.
#[derive(Clone, Copy)]
pub struct Sampling {
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

impl Sampling {
    pub fn resolve(shots: Option<u64>, seed: Option<u64>, exact: bool) -> Result<Self> {
        if exact && shots.is_some() {
            bail!("--exact conflicts with --shots");
        }
        let seed = match seed {
            Some(s) => Some(s),
            None => match std::env::var("QDICT_SEED") {
                Ok(text) => Some(
                    text.parse::<u64>()
                        .map_err(|_| anyhow!("QDICT_SEED must be an unsigned integer"))?,
                ),
                Err(_) => None,
            },
        };
        if shots.is_some() && seed.is_none() {
            bail!("--shots requires --seed (or the QDICT_SEED environment variable)");
        }
        Ok(Sampling { shots, seed })
    }

    pub fn seed_or(&self, what: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| anyhow!("{what} requires --seed (or QDICT_SEED)"))
    }

    fn apply(&self, hist: OutcomeHistogram) -> Result<OutcomeHistogram> {
        match self.shots {
            None => Ok(hist),
            Some(shots) => Ok(hist.sample(shots, self.seed.expect("validated"))?),
        }
    }
}

/// Render a histogram in the requested format with optional summary lines
/// (text) or fields (json).
fn render_histogram(
    hist: &OutcomeHistogram,
    format: Format,
    style: &LabelStyle,
    title: &str,
    summary_lines: &[String],
    summary_json: serde_json::Value,
) -> String {
    match format {
        Format::Text => {
            let mut out = histogram_text(hist, style);
            for line in summary_lines {
                out.push_str(line);
                out.push('\n');
            }
            out
        }
        Format::Csv => histogram_csv(hist, style),
        Format::Json => {
            let mut value = json!({
                "command": title,
                "histogram": histogram_json_value(hist, style),
            });
            if let serde_json::Value::Object(extra) = summary_json {
                for (k, v) in extra {
                    value[k] = v;
                }
            }
            format!("{:#}\n", value)
        }
        Format::Svg => histogram_svg(hist, style, title),
    }
}

fn counting_summary(result: &CountingResult) -> (Vec<String>, serde_json::Value, bool) {
    let lines = vec![
        format!(
            "top outcomes: {} and {}",
            result.top_outcomes.0, result.top_outcomes.1
        ),
        format!("estimated fraction: {:.6}", result.estimated_fraction),
        format!("estimated count: {}", result.estimated_count),
    ]
    .into_iter()
    .chain(result.ambiguous.then(|| {
        "resolution: ambiguous (top outcome on a counting boundary; \
         widen --control to separate none/all from unresolved)"
            .to_string()
    }))
    .collect();
    let json = json!({
        "top_outcomes": [result.top_outcomes.0, result.top_outcomes.1],
        "estimated_fraction": result.estimated_fraction,
        "estimated_count": result.estimated_count,
        "ambiguous": result.ambiguous,
    });
    (lines, json, result.ambiguous)
}

fn render_counting(
    result: &CountingResult,
    format: Format,
    title: &str,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let hist = sampling.apply(result.histogram.clone())?;
    let (lines, json, flagged) = counting_summary(result);
    Ok(CommandOutput {
        text: render_histogram(&hist, format, &LabelStyle::default(), title, &lines, json),
        flagged,
    })
}

pub fn parse_binary_label(text: &str) -> Result<u64> {
    u64::from_str_radix(text, 2).with_context(|| format!("{text} is not a binary label"))
}

pub fn parse_oracle(
    kind: &str,
    good: &Option<String>,
    register: &str,
    zxzx: bool,
) -> Result<OracleSpec> {
    let spec = match kind {
        "even" => OracleSpec::parity(true, register),
        "odd" => OracleSpec::parity(false, register),
        "sign" => OracleSpec::sign_bit(register),
        "set" => {
            let labels = good
                .as_ref()
                .ok_or_else(|| anyhow!("--oracle set requires --good <labels>"))?
                .split(',')
                .map(parse_binary_label)
                .collect::<Result<Vec<u64>>>()?;
            OracleSpec::explicit_set(labels, register)
        }
        other => bail!("unknown oracle kind {other} (use even, odd, sign, or set)"),
    };
    Ok(if zxzx {
        spec.with_construction(OracleConstruction::Zxzx)
    } else {
        spec
    })
}

pub fn simulate(
    circuit_path: &str,
    amplitudes: bool,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let text = std::fs::read_to_string(circuit_path)
        .with_context(|| format!("cannot read circuit file {circuit_path}"))?;
    let circuit = Circuit::from_json_str(&text)?;
    let state = circuit.run_from_default()?;
    if amplitudes {
        if sampling.shots.is_some() {
            bail!("--amplitudes shows the exact state and conflicts with --shots");
        }
        let out = match format {
            Format::Text => complex_text(&state)?,
            Format::Svg => complex_svg(&state)?,
            _ => bail!("--amplitudes supports only text or svg output"),
        };
        return Ok(CommandOutput::ok(out));
    }
    let hist = match sampling.shots {
        None => state.probabilities(),
        Some(shots) => state.sample(shots, sampling.seed.expect("validated"))?,
    };
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &LabelStyle::default(),
        "simulate",
        &[],
        json!({}),
    )))
}

pub fn phase_estimate(
    p: f64,
    control: usize,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let config = PhaseEstimationConfig::ry_demo(p, control);
    let estimate = phase_estimation(&config)?;
    let hist = sampling.apply(estimate.histogram)?;
    let lines = vec![format!("hidden parameter: {p}")];
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &LabelStyle::default(),
        "pe",
        &lines,
        json!({"parameter": p, "eigenstate_ok": estimate.eigenprep_valid}),
    )))
}

#[allow(clippy::too_many_arguments)]
pub fn grover(
    width: usize,
    oracle_kind: &str,
    good: &Option<String>,
    iterations: Option<usize>,
    zxzx: bool,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let oracle = parse_oracle(oracle_kind, good, "key", zxzx)?;
    // Default repeat count: floor of the square root of the search space.
    let iterations = iterations.unwrap_or_else(|| ((1u64 << width) as f64).sqrt().floor() as usize);
    let hist = sampling.apply(grover_search(&oracle, width, iterations)?)?;
    let lines = vec![format!("iterations: {iterations}")];
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &LabelStyle::default(),
        "grover",
        &lines,
        json!({"iterations": iterations}),
    )))
}

pub fn count(
    width: usize,
    oracle_kind: &str,
    good: &Option<String>,
    control: usize,
    zxzx: bool,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let oracle = parse_oracle(oracle_kind, good, "key", zxzx)?;
    let result = quantum_count_uniform(&oracle, width, control)?;
    render_counting(&result, format, "count", sampling)
}

fn load_dictionary(path: &str) -> Result<(DictionarySpec, EncodingSource)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read dictionary file {path}"))?;
    let file = DictionaryFile::parse(&text)?;
    Ok((file.spec()?, file.source))
}

fn dict_style(spec: &DictionarySpec, source: &EncodingSource) -> LabelStyle {
    LabelStyle {
        key_split: Some(spec.key_width()),
        signed_value_width: source
            .is_signed(spec.key_width())
            .then_some(spec.value_width()),
    }
}

pub fn qdict_encode(path: &str, format: Format, sampling: &Sampling) -> Result<CommandOutput> {
    let (spec, source) = load_dictionary(path)?;
    let circuit = dict::encode(&spec, &source)?;
    let state = circuit.run_from_default()?;
    let joint = state
        .probabilities()
        .marginal_bits(0, spec.key_width() + spec.value_width());
    let hist = sampling.apply(joint)?;
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &dict_style(&spec, &source),
        "qdict-encode",
        &[],
        json!({}),
    )))
}

pub fn qdict_lookup(
    path: &str,
    key: u64,
    iterations: Option<usize>,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let (spec, source) = load_dictionary(path)?;
    let hist = sampling.apply(dict::lookup(&spec, &source, key, iterations)?)?;
    let lines = vec![format!(
        "looked up key {}",
        basis_label(key, spec.key_width())
    )];
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &dict_style(&spec, &source),
        "qdict-lookup",
        &lines,
        json!({"key": key}),
    )))
}

pub fn qdict_count_eq(
    path: &str,
    value: i64,
    control: usize,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let (spec, source) = load_dictionary(path)?;
    let result = dict::count_value_eq(&spec, &source, value, control)?;
    render_counting(&result, format, "qdict-count-eq", sampling)
}

pub fn qdict_count_lt(
    path: &str,
    threshold: i64,
    control: usize,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let (spec, source) = load_dictionary(path)?;
    let result = dict::count_value_lt(&spec, &source, threshold, control)?;
    render_counting(&result, format, "qdict-count-lt", sampling)
}

pub fn qubo_min(
    poly_json: &str,
    key_width: Option<usize>,
    value_width: usize,
    control: usize,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let poly: QuadraticPolynomial =
        serde_json::from_str(poly_json).context("cannot parse --poly")?;
    let n = key_width.unwrap_or_else(|| poly.num_variables());
    let spec = DictionarySpec::new(n, value_width)?;
    let seed = sampling.seed_or("qubo-min")?;
    if sampling.shots.is_some() {
        bail!("qubo-min draws its own samples; --shots does not apply");
    }
    let result = dict::qubo_minimize(&spec, &poly, control, seed)?;

    let m = spec.value_width();
    let mut lines = Vec::new();
    let initial_raw = result.initial_value.rem_euclid(1 << m) as u64;
    lines.push(format!(
        "initial sample: key {} value {} (raw {})",
        basis_label(result.initial_key, n),
        result.initial_value,
        basis_label(initial_raw, m)
    ));
    for (i, step) in result.steps.iter().enumerate() {
        lines.push(format!(
            "step {}: best {} with {} below, {} amplification rounds, sampled key {} value {}{}",
            i + 1,
            step.best_value,
            step.count_below,
            step.amplify_iterations,
            basis_label(step.sampled_key, n),
            step.sampled_value,
            if step.improved { " (improved)" } else { "" }
        ));
    }
    lines.push(format!(
        "minimum: {} (raw {}) at key {}",
        result.value.signed,
        basis_label(result.value.raw, m),
        basis_label(result.key, n)
    ));
    lines.push(format!("queries: {}", result.queries));
    if result.cap_exceeded {
        lines.push("iteration cap exceeded: result is best-so-far, not certified".to_string());
    }

    let json_value = json!({
        "command": "qubo-min",
        "minimum": {
            "key": result.key,
            "key_label": basis_label(result.key, n),
            "value": result.value.signed,
            "raw": result.value.raw,
            "raw_label": basis_label(result.value.raw, m),
        },
        "initial": {"key": result.initial_key, "value": result.initial_value},
        "steps": result.steps.iter().map(|s| json!({
            "best_value": s.best_value,
            "count_below": s.count_below,
            "amplify_iterations": s.amplify_iterations,
            "sampled_key": s.sampled_key,
            "sampled_value": s.sampled_value,
            "improved": s.improved,
        })).collect::<Vec<_>>(),
        "queries": result.queries,
        "cap_exceeded": result.cap_exceeded,
        "seed": seed,
    });

    let text = match format {
        Format::Json => format!("{json_value:#}\n"),
        _ => {
            let mut out = String::new();
            for line in &lines {
                out.push_str(line);
                out.push('\n');
            }
            out
        }
    };
    Ok(CommandOutput {
        text,
        flagged: result.cap_exceeded,
    })
}

pub fn subset_sum(
    inputs: &str,
    value_width: usize,
    control: usize,
    target: Option<i64>,
    less_than: Option<i64>,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let inputs: Vec<i64> = inputs
        .split(',')
        .map(|s| s.trim().parse::<i64>().context("bad --inputs entry"))
        .collect::<Result<_>>()?;
    let spec = DictionarySpec::new(inputs.len(), value_width)?;
    let pairs: Vec<(u64, i64)> = inputs
        .iter()
        .enumerate()
        .map(|(t, &v)| (1u64 << t, v))
        .collect();
    let source = EncodingSource::PartialTable { pairs };
    let (result, title) = match (target, less_than) {
        (Some(_), Some(_)) => bail!("--target conflicts with --less-than"),
        (None, Some(threshold)) => (
            dict::count_value_lt(&spec, &source, threshold, control)?,
            "subset-sum (count below)",
        ),
        (t, None) => (
            dict::count_value_eq(&spec, &source, t.unwrap_or(0), control)?,
            "subset-sum (count equal)",
        ),
    };
    render_counting(&result, format, title, sampling)
}

pub fn fibonacci(
    n: usize,
    control: usize,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let result = dict::fibonacci_count(n, control)?;
    let mut output = render_counting(&result, format, "fibonacci", sampling)?;
    if format == Format::Text {
        output.text.push_str(&format!(
            "strings of length {n} without consecutive ones: {}\n",
            result.estimated_count
        ));
    }
    Ok(output)
}

pub fn dist(
    kind: &str,
    key_width: usize,
    value_width: usize,
    lambda: Option<f64>,
    masses: &Option<String>,
    format: Format,
    sampling: &Sampling,
) -> Result<CommandOutput> {
    let spec = DictionarySpec::new(key_width, value_width)?;
    let circuit = match kind {
        "binomial" => dict::encode_binomial(&spec)?,
        "poisson" => {
            let lambda = lambda.ok_or_else(|| anyhow!("--kind poisson requires --lambda"))?;
            if lambda <= 0.0 {
                bail!("--lambda must be positive");
            }
            // Truncate the mass function to the representable values and
            // renormalize before allocating keys.
            let mut masses = Vec::new();
            let mut fact = 1.0f64;
            for v in 0..spec.num_values() {
                if v > 1 {
                    fact *= v as f64;
                }
                masses.push((v, (-lambda).exp() * lambda.powi(v as i32) / fact));
            }
            let total: f64 = masses.iter().map(|(_, p)| p).sum();
            let masses: Vec<(u64, f64)> = masses.iter().map(|&(v, p)| (v, p / total)).collect();
            dict::encode_distribution(&spec, &masses)?
        }
        "table" => {
            let text = masses
                .as_ref()
                .ok_or_else(|| anyhow!("--kind table requires --masses value:prob,..."))?;
            let masses: Vec<(u64, f64)> = text
                .split(',')
                .map(|pair| {
                    let (v, p) = pair
                        .split_once(':')
                        .ok_or_else(|| anyhow!("--masses entries look like value:probability"))?;
                    Ok((
                        v.trim().parse::<u64>().context("bad mass value")?,
                        p.trim().parse::<f64>().context("bad mass probability")?,
                    ))
                })
                .collect::<Result<_>>()?;
            dict::encode_distribution(&spec, &masses)?
        }
        other => bail!("unknown distribution kind {other} (use binomial, poisson, or table)"),
    };
    let state = circuit.run_from_default()?;
    let value_marginal = state
        .probabilities()
        .marginal_bits(spec.key_width(), spec.value_width());
    let hist = sampling.apply(value_marginal)?;
    Ok(CommandOutput::ok(render_histogram(
        &hist,
        format,
        &LabelStyle::default(),
        "dist",
        &[],
        json!({"kind": kind}),
    )))
}
