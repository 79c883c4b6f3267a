//! The quantum dictionary: a key register entangled with a value register
//! so that measuring returns a `(key, f(key))` pair.
//!
//! Values are written as phases. Every source term with integer weight `c`
//! and key-control set `S` contributes controlled rotations on a prepared
//! helper qubit: for value qubit `j` the rotation `Ry(2·c·2^j·base)` with
//! controls `S ∪ {value qubit j}`, where `base = 2π/2^m`. After the key and
//! value registers are uniformized, key `k`'s branch carries the phase
//! sequence `exp(i·r·f(k)·base)` over value-register indices `r`, and the
//! inverse QFT turns that into the basis value `f(k) mod 2^m`. Negative
//! weights rotate the other way, which lands on the two's-complement
//! encoding with no extra gates.
//!
//! Complete tables control each term on the full key pattern (zeros matched
//! by X conjugation). Partial tables control only on the 1-bits of the
//! listed key, so every unlisted key picks up the sum of the listed entries
//! it covers; addition, multiplication tables, and binomial distributions
//! all fall out of that rule.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::algorithms::{
    amplitude_amplify, grover_iterations, quantum_count, CountingResult, OracleSpec,
};
use crate::circuit::{qft_circuit, Circuit, GateKind};
use crate::state::{OutcomeHistogram, RegisterLayout};
use crate::{Error, Result, MAX_QUBITS};

/// Register widths of a dictionary: `2^key_width` keys mapping into
/// `2^value_width` values, plus one helper qubit for the phase kickback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DictionarySpec {
    key_width: usize,
    value_width: usize,
}

impl DictionarySpec {
    pub fn new(key_width: usize, value_width: usize) -> Result<Self> {
        if key_width == 0 || value_width == 0 {
            return Err(Error::invalid(
                "key and value registers need at least 1 qubit",
            ));
        }
        if key_width + value_width + 1 > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "dictionary needs {} qubits, over the {MAX_QUBITS}-qubit cap",
                key_width + value_width + 1
            )));
        }
        Ok(DictionarySpec {
            key_width,
            value_width,
        })
    }

    pub fn key_width(&self) -> usize {
        self.key_width
    }

    pub fn value_width(&self) -> usize {
        self.value_width
    }

    pub fn num_keys(&self) -> u64 {
        1 << self.key_width
    }

    pub fn num_values(&self) -> u64 {
        1 << self.value_width
    }

    /// The rotation representing the integer 1: `2π/2^value_width`.
    pub fn base_angle(&self) -> f64 {
        std::f64::consts::TAU / self.num_values() as f64
    }

    pub fn total_qubits(&self) -> usize {
        self.key_width + self.value_width + 1
    }

    /// Key at the low bits, value above it, helper qubit on top.
    pub fn layout(&self) -> RegisterLayout {
        RegisterLayout::new(self.total_qubits())
            .with_register("key", 0, self.key_width)
            .and_then(|l| l.with_register("value", self.key_width, self.value_width))
            .and_then(|l| l.with_register("ancilla", self.key_width + self.value_width, 1))
            .expect("widths validated in the constructor")
    }

    fn signed_min(&self) -> i64 {
        -(1i64 << (self.value_width - 1))
    }

    fn signed_max(&self) -> i64 {
        (1i64 << (self.value_width - 1)) - 1
    }
}

/// A register value in both readings: the measured bits and the
/// two's-complement integer they stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedValue {
    pub raw: u64,
    pub signed: i64,
}

/// Interpret `raw` as a `value_width`-bit two's-complement integer: values
/// with the top bit set are `raw − 2^value_width`.
pub fn decode_value(raw: u64, value_width: usize) -> Result<SignedValue> {
    if value_width == 0 || value_width > 63 {
        return Err(Error::invalid("value width must be between 1 and 63"));
    }
    if raw >> value_width != 0 {
        return Err(Error::invalid(format!(
            "raw value {raw} does not fit {value_width} bits"
        )));
    }
    let signed = if raw >> (value_width - 1) & 1 == 1 {
        raw as i64 - (1i64 << value_width)
    } else {
        raw as i64
    };
    Ok(SignedValue { raw, signed })
}

fn encode_raw(value: i64, value_width: usize) -> u64 {
    value.rem_euclid(1i64 << value_width) as u64
}

/// A quadratic polynomial over binary variables:
/// `f(x) = constant + Σ lᵢxᵢ + Σ q_{ij}xᵢxⱼ` with `i < j`.
///
/// Variable `i` rides on the key bit of weight `2^(n−1−i)`, so `x₀` is the
/// most significant key bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPolynomial {
    #[serde(default)]
    pub constant: i64,
    pub linear: Vec<i64>,
    #[serde(default)]
    pub quadratic: Vec<(usize, usize, i64)>,
}

impl QuadraticPolynomial {
    pub fn new(constant: i64, linear: Vec<i64>, quadratic: Vec<(usize, usize, i64)>) -> Self {
        QuadraticPolynomial {
            constant,
            linear,
            quadratic,
        }
    }

    pub fn num_variables(&self) -> usize {
        self.linear.len()
    }

    fn validate(&self, key_width: usize) -> Result<()> {
        if self.linear.len() != key_width {
            return Err(Error::invalid(format!(
                "polynomial has {} linear coefficients but the key register has {key_width} qubits",
                self.linear.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j, _) in &self.quadratic {
            if i >= j {
                return Err(Error::invalid(format!(
                    "quadratic term ({i},{j}) must have i < j"
                )));
            }
            if j >= key_width {
                return Err(Error::invalid(format!(
                    "quadratic term ({i},{j}) out of range for {key_width} variables"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::invalid(format!(
                    "duplicate quadratic term ({i},{j})"
                )));
            }
        }
        Ok(())
    }

    fn variable_bit(&self, key: u64, i: usize) -> i64 {
        let n = self.linear.len();
        (key >> (n - 1 - i) & 1) as i64
    }

    pub fn evaluate(&self, key: u64) -> i64 {
        let mut acc = self.constant;
        for (i, &l) in self.linear.iter().enumerate() {
            acc += l * self.variable_bit(key, i);
        }
        for &(i, j, q) in &self.quadratic {
            acc += q * self.variable_bit(key, i) * self.variable_bit(key, j);
        }
        acc
    }

    /// The polynomial whose zeros are the length-`n` bit strings without
    /// consecutive ones: unit weights on every adjacent variable pair.
    pub fn consecutive_ones(n: usize) -> Self {
        QuadraticPolynomial {
            constant: 0,
            linear: vec![0; n],
            quadratic: (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1)).collect(),
        }
    }
}

/// Where a dictionary's key/value association comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EncodingSource {
    /// Every key listed: `values[k]` is the value of key `k`.
    #[serde(rename = "table")]
    CompleteTable { values: Vec<i64> },
    /// Only some keys listed; an unlisted key receives the sum of the listed
    /// entries whose key bits it covers.
    #[serde(rename = "partial")]
    PartialTable { pairs: Vec<(u64, i64)> },
    /// Values computed from a quadratic polynomial of the key bits.
    #[serde(rename = "polynomial")]
    Polynomial(QuadraticPolynomial),
}

/// One rotation group: an integer weight applied under a set of key-qubit
/// controls, with some of those qubits X-conjugated to match zeros.
struct EncodingTerm {
    controls: Vec<usize>,
    conjugate_zeros: Vec<usize>,
    weight: i64,
}

impl EncodingSource {
    /// The function the encoding realizes, evaluated classically.
    pub fn evaluate(&self, key: u64, key_width: usize) -> i64 {
        match self {
            EncodingSource::CompleteTable { values } => values[key as usize],
            EncodingSource::PartialTable { pairs } => pairs
                .iter()
                .filter(|(k, _)| k & key == *k)
                .map(|(_, c)| c)
                .sum(),
            EncodingSource::Polynomial(poly) => {
                debug_assert_eq!(poly.num_variables(), key_width);
                poly.evaluate(key)
            }
        }
    }

    fn validate_shape(&self, spec: &DictionarySpec) -> Result<()> {
        let n = spec.key_width;
        match self {
            EncodingSource::CompleteTable { values } => {
                if values.len() as u64 != spec.num_keys() {
                    return Err(Error::invalid(format!(
                        "complete table needs {} values, got {}",
                        spec.num_keys(),
                        values.len()
                    )));
                }
            }
            EncodingSource::PartialTable { pairs } => {
                let mut seen = std::collections::BTreeSet::new();
                for &(k, _) in pairs {
                    if k >= spec.num_keys() {
                        return Err(Error::invalid(format!(
                            "partial table key {k} out of range for {n} key qubits"
                        )));
                    }
                    if !seen.insert(k) {
                        return Err(Error::invalid(format!("duplicate partial table key {k}")));
                    }
                }
            }
            EncodingSource::Polynomial(poly) => poly.validate(n)?,
        }
        Ok(())
    }

    /// Bounds of the realized function over all keys: exact by enumeration
    /// at desk scale, conservative per-term sums for very wide keys.
    pub fn value_bounds(&self, key_width: usize) -> (i64, i64) {
        match self {
            EncodingSource::CompleteTable { values } => {
                let lo = *values.iter().min().expect("non-empty table");
                let hi = *values.iter().max().expect("non-empty table");
                (lo, hi)
            }
            _ if key_width <= 16 => {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for key in 0..(1u64 << key_width) {
                    let v = self.evaluate(key, key_width);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            }
            EncodingSource::PartialTable { pairs } => {
                let neg: i64 = pairs.iter().map(|(_, c)| c.min(&0)).sum();
                let pos: i64 = pairs.iter().map(|(_, c)| c.max(&0)).sum();
                (neg, pos)
            }
            EncodingSource::Polynomial(poly) => {
                let neg: i64 = poly.linear.iter().map(|c| c.min(&0)).sum::<i64>()
                    + poly
                        .quadratic
                        .iter()
                        .map(|(_, _, q)| q.min(&0))
                        .sum::<i64>();
                let pos: i64 = poly.linear.iter().map(|c| c.max(&0)).sum::<i64>()
                    + poly
                        .quadratic
                        .iter()
                        .map(|(_, _, q)| q.max(&0))
                        .sum::<i64>();
                (poly.constant + neg, poly.constant + pos)
            }
        }
    }

    /// Whether values must be read as two's complement.
    pub fn is_signed(&self, key_width: usize) -> bool {
        self.value_bounds(key_width).0 < 0
    }

    fn terms(&self, spec: &DictionarySpec) -> Vec<EncodingTerm> {
        let n = spec.key_width;
        let mut terms = Vec::new();
        match self {
            EncodingSource::CompleteTable { values } => {
                for (key, &value) in values.iter().enumerate() {
                    if value == 0 {
                        continue;
                    }
                    terms.push(EncodingTerm {
                        controls: (0..n).collect(),
                        conjugate_zeros: (0..n).filter(|b| key >> b & 1 == 0).collect(),
                        weight: value,
                    });
                }
            }
            EncodingSource::PartialTable { pairs } => {
                for &(key, value) in pairs {
                    if value == 0 {
                        continue;
                    }
                    terms.push(EncodingTerm {
                        controls: (0..n).filter(|b| key >> b & 1 == 1).collect(),
                        conjugate_zeros: Vec::new(),
                        weight: value,
                    });
                }
            }
            EncodingSource::Polynomial(poly) => {
                let qubit_of = |var: usize| n - 1 - var;
                if poly.constant != 0 {
                    terms.push(EncodingTerm {
                        controls: Vec::new(),
                        conjugate_zeros: Vec::new(),
                        weight: poly.constant,
                    });
                }
                for (i, &l) in poly.linear.iter().enumerate() {
                    if l != 0 {
                        terms.push(EncodingTerm {
                            controls: vec![qubit_of(i)],
                            conjugate_zeros: Vec::new(),
                            weight: l,
                        });
                    }
                }
                for &(i, j, q) in &poly.quadratic {
                    if q != 0 {
                        terms.push(EncodingTerm {
                            controls: vec![qubit_of(i), qubit_of(j)],
                            conjugate_zeros: Vec::new(),
                            weight: q,
                        });
                    }
                }
            }
        }
        terms
    }
}

/// A dictionary description as stored on disk:
/// `{key_width, value_width, source}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DictionaryFile {
    pub key_width: usize,
    pub value_width: usize,
    pub source: EncodingSource,
}

impl DictionaryFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: DictionaryFile = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("dictionary json: {e}")))?;
        Ok(file)
    }

    pub fn spec(&self) -> Result<DictionarySpec> {
        DictionarySpec::new(self.key_width, self.value_width)
    }
}

fn check_range(spec: &DictionarySpec, lo: i64, hi: i64, what: &str) -> Result<()> {
    if lo < 0 {
        if lo < spec.signed_min() || hi > spec.signed_max() {
            return Err(Error::invalid(format!(
                "{what} range [{lo}, {hi}] exceeds signed {}-bit values [{}, {}]",
                spec.value_width,
                spec.signed_min(),
                spec.signed_max()
            )));
        }
    } else if hi >= spec.num_values() as i64 {
        return Err(Error::invalid(format!(
            "{what} range [{lo}, {hi}] exceeds unsigned {}-bit values [0, {}]",
            spec.value_width,
            spec.num_values() - 1
        )));
    }
    Ok(())
}

/// Build the population circuit with every value shifted by `offset` (a
/// constant rotation controlled only by value qubits). The inequality
/// workflows use the shift to move a threshold onto the sign bit.
fn encode_with_offset(
    spec: &DictionarySpec,
    source: &EncodingSource,
    offset: i64,
) -> Result<Circuit> {
    source.validate_shape(spec)?;
    let (lo, hi) = source.value_bounds(spec.key_width);
    check_range(spec, lo + offset, hi + offset, "encoded value")?;

    let n = spec.key_width;
    let m = spec.value_width;
    let anc = n + m;
    let modulus = 1i64 << m;
    let mut c = Circuit::new(spec.total_qubits());
    for q in 0..n + m {
        c.h(q);
    }
    c.h(anc).phase(-PI / 2.0, anc);

    let mut terms = source.terms(spec);
    if offset != 0 {
        terms.push(EncodingTerm {
            controls: Vec::new(),
            conjugate_zeros: Vec::new(),
            weight: offset,
        });
    }
    for term in &terms {
        for &q in &term.conjugate_zeros {
            c.x(q);
        }
        for j in 0..m {
            // The phase of weight w on value bit j only matters mod 2^m.
            let reduced = (term.weight * (1i64 << j)).rem_euclid(modulus);
            if reduced == 0 {
                continue;
            }
            let angle = 2.0 * reduced as f64 * spec.base_angle();
            let mut controls = term.controls.clone();
            controls.push(n + j);
            c.controlled_gate(GateKind::Ry(angle), anc, &controls);
        }
        for &q in &term.conjugate_zeros {
            c.x(q);
        }
    }

    c.extend_with_offset(&qft_circuit(m, true)?, n)?;
    c.phase(PI / 2.0, anc).h(anc);
    Ok(c)
}

/// Build the circuit that populates the dictionary: measuring the key and
/// value registers afterwards returns `(k, f(k) mod 2^m)` with every key
/// equally likely.
pub fn encode(spec: &DictionarySpec, source: &EncodingSource) -> Result<Circuit> {
    encode_with_offset(spec, source, 0)
}

/// Encode `inputs[t]` at the key with only bit `t` set, so key `k` carries
/// the sum of the inputs selected by its bits and the all-ones key carries
/// the total.
pub fn encode_sum_inputs(spec: &DictionarySpec, inputs: &[i64]) -> Result<Circuit> {
    if inputs.len() != spec.key_width {
        return Err(Error::invalid(format!(
            "{} inputs need a {}-qubit key register, this one has {}",
            inputs.len(),
            inputs.len(),
            spec.key_width
        )));
    }
    let pairs: Vec<(u64, i64)> = inputs
        .iter()
        .enumerate()
        .map(|(t, &v)| (1u64 << t, v))
        .collect();
    encode(spec, &EncodingSource::PartialTable { pairs })
}

/// Multiplication table for `x0`: the inputs are `x0` times the powers of
/// two, so key `k` maps to `k·x0`.
pub fn encode_multiplication(spec: &DictionarySpec, x0: i64) -> Result<Circuit> {
    let inputs: Vec<i64> = (0..spec.key_width).map(|t| x0 << t).collect();
    encode_sum_inputs(spec, &inputs)
}

/// Value 1 at every power-of-two key: key `k` maps to its popcount and the
/// value marginal is Binomial(key_width, 1/2).
pub fn encode_binomial(spec: &DictionarySpec) -> Result<Circuit> {
    let max_value = spec.key_width as i64;
    if max_value >= spec.num_values() as i64 {
        return Err(Error::invalid(format!(
            "value register of {} qubits cannot hold counts up to {max_value}",
            spec.value_width
        )));
    }
    let inputs = vec![1i64; spec.key_width];
    encode_sum_inputs(spec, &inputs)
}

/// Distribute `2^key_width` keys over target masses by largest-remainder
/// rounding: every quota is floored and the leftover keys go to the largest
/// fractional remainders. Returns one key count per mass, summing exactly
/// to the number of keys.
pub fn allocate_keys(masses: &[(u64, f64)], num_keys: u64) -> Result<Vec<u64>> {
    if masses.is_empty() {
        return Err(Error::invalid("distribution needs at least one mass"));
    }
    if masses.len() as u64 > num_keys {
        return Err(Error::invalid(format!(
            "{} distinct values cannot share {num_keys} keys",
            masses.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &(v, p) in masses {
        if !seen.insert(v) {
            return Err(Error::invalid(format!("duplicate distribution value {v}")));
        }
        if !(0.0..=1.0 + 1e-6).contains(&p) {
            return Err(Error::invalid(format!("probability {p} for value {v}")));
        }
    }
    let total: f64 = masses.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    let quotas: Vec<f64> = masses
        .iter()
        .map(|(_, p)| p / total * num_keys as f64)
        .collect();
    let mut counts: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..masses.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take((num_keys - assigned) as usize) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Encode a probability distribution over values by giving value `v` a
/// number of keys proportional to its mass (largest-remainder rounding).
/// Masses that round to zero keys are dropped.
pub fn encode_distribution(spec: &DictionarySpec, masses: &[(u64, f64)]) -> Result<Circuit> {
    for &(v, _) in masses {
        if v >= spec.num_values() {
            return Err(Error::invalid(format!(
                "distribution value {v} does not fit {} value qubits",
                spec.value_width
            )));
        }
    }
    let counts = allocate_keys(masses, spec.num_keys())?;
    let mut values = Vec::with_capacity(spec.num_keys() as usize);
    for (&(v, _), &k) in masses.iter().zip(&counts) {
        values.extend(std::iter::repeat_n(v as i64, k as usize));
    }
    debug_assert_eq!(values.len() as u64, spec.num_keys());
    encode(spec, &EncodingSource::CompleteTable { values })
}

/// Amplify a single key and return the joint key/value histogram. With the
/// iteration count left to the library it uses the round count closest to
/// certainty for a `1/2^key_width` good fraction.
pub fn lookup(
    spec: &DictionarySpec,
    source: &EncodingSource,
    key: u64,
    iterations: Option<usize>,
) -> Result<OutcomeHistogram> {
    if key >= spec.num_keys() {
        return Err(Error::invalid(format!(
            "key {key} out of range for {} key qubits",
            spec.key_width
        )));
    }
    let prep = encode(spec, source)?;
    let layout = spec.layout();
    let oracle = OracleSpec::key_match(key, "key");
    let iterations = iterations.unwrap_or_else(|| grover_iterations(1.0 / spec.num_keys() as f64));
    let state = amplitude_amplify(&prep, &layout, &oracle, iterations)?;
    Ok(state
        .probabilities()
        .marginal_bits(0, spec.key_width + spec.value_width))
}

/// Count the keys whose value equals `target`, by quantum counting with the
/// populated dictionary as the preparation and a value-register oracle.
pub fn count_value_eq(
    spec: &DictionarySpec,
    source: &EncodingSource,
    target: i64,
    control_width: usize,
) -> Result<CountingResult> {
    let signed = source.is_signed(spec.key_width);
    let (lo, hi) = if signed {
        (spec.signed_min(), spec.signed_max())
    } else {
        (0, spec.num_values() as i64 - 1)
    };
    if target < lo || target > hi {
        return Err(Error::invalid(format!(
            "target {target} is outside the representable range [{lo}, {hi}]"
        )));
    }
    let prep = encode(spec, source)?;
    let oracle = OracleSpec::explicit_set(vec![encode_raw(target, spec.value_width)], "value");
    quantum_count(
        &prep,
        &spec.layout(),
        &oracle,
        control_width,
        spec.key_width,
    )
}

/// Count the keys whose value is strictly below `threshold`: the dictionary
/// is re-encoded with `−threshold` added to every value, which moves
/// "below threshold" onto the sign bit of the value register.
pub fn count_value_lt(
    spec: &DictionarySpec,
    source: &EncodingSource,
    threshold: i64,
    control_width: usize,
) -> Result<CountingResult> {
    let (lo, hi) = source.value_bounds(spec.key_width);
    if lo - threshold < spec.signed_min() || hi - threshold > spec.signed_max() {
        return Err(Error::invalid(format!(
            "shifted values [{}, {}] overflow the signed {}-bit range",
            lo - threshold,
            hi - threshold,
            spec.value_width
        )));
    }
    let prep = encode_with_offset(spec, source, -threshold)?;
    let oracle = OracleSpec::sign_bit("value");
    quantum_count(
        &prep,
        &spec.layout(),
        &oracle,
        control_width,
        spec.key_width,
    )
}

/// Raw encodings of every representable signed value strictly below
/// `threshold`; the window oracle used when a shift would overflow.
fn raw_values_below(spec: &DictionarySpec, threshold: i64) -> Vec<u64> {
    (spec.signed_min()..threshold.min(spec.signed_max() + 1))
        .map(|v| encode_raw(v, spec.value_width))
        .collect()
}

/// One improvement step of the minimization trace.
#[derive(Clone, Debug)]
pub struct QuboStep {
    /// Best value before the step.
    pub best_value: i64,
    /// Estimated number of keys strictly below it.
    pub count_below: u64,
    pub counting_ambiguous: bool,
    /// Grover rounds used for the better-sample draw.
    pub amplify_iterations: usize,
    pub sampled_key: u64,
    pub sampled_value: i64,
    pub improved: bool,
}

/// Result of the iterative minimization.
#[derive(Clone, Debug)]
pub struct QuboResult {
    pub key: u64,
    pub value: SignedValue,
    pub initial_key: u64,
    pub initial_value: i64,
    pub steps: Vec<QuboStep>,
    /// Set when the query cap was reached before the count-below certificate
    /// came back zero; `key`/`value` then hold the best sample so far.
    pub cap_exceeded: bool,
    pub queries: u64,
}

/// Minimize a quadratic polynomial with the dictionary: sample a starting
/// value, then repeatedly count how many values lie strictly below the best
/// one and, while that count is positive, amplify the below-threshold
/// branch and measure a strictly better sample. Terminates when the count
/// comes back zero or after `4·2^key_width` queries.
pub fn qubo_minimize(
    spec: &DictionarySpec,
    poly: &QuadraticPolynomial,
    control_width: usize,
    seed: u64,
) -> Result<QuboResult> {
    let source = EncodingSource::Polynomial(poly.clone());
    let (lo, hi) = source.value_bounds(spec.key_width);
    // Minimization reads sign bits, so the whole range must sit in the
    // signed window even when every value is positive.
    check_range(spec, lo.min(-1), hi, "polynomial value")?;

    let layout = spec.layout();
    let n = spec.key_width;
    let m = spec.value_width;
    let keys = spec.num_keys();
    let cap = 4 * keys;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries: u64 = 0;
    let mut cap_exceeded = false;

    let extract = |index: u64| -> (u64, u64) {
        let key = index & (keys - 1);
        let raw = (index >> n) & ((1u64 << m) - 1);
        (key, raw)
    };

    let prep = encode(spec, &source)?;
    let state = prep.run_from_default()?;
    let first = state.sample_indices(1, &mut rng)[0];
    queries += 1;
    let (initial_key, raw) = extract(first);
    let initial_value = decode_value(raw, m)?.signed;
    let mut best_key = initial_key;
    let mut best_value = initial_value;
    let mut steps = Vec::new();

    'outer: loop {
        if queries >= cap {
            cap_exceeded = true;
            break;
        }
        // Prefer the shifted sign-bit oracle; when the shift would overflow
        // the signed window, fall back to an explicit window of raw values
        // below the threshold on the unshifted dictionary.
        let shift_fits =
            lo - best_value >= spec.signed_min() && hi - best_value <= spec.signed_max();
        let (count_prep, oracle, shifted) = if shift_fits {
            (
                encode_with_offset(spec, &source, -best_value)?,
                OracleSpec::sign_bit("value"),
                true,
            )
        } else {
            (
                prep.clone(),
                OracleSpec::explicit_set(raw_values_below(spec, best_value), "value"),
                false,
            )
        };
        let counting = quantum_count(&count_prep, &layout, &oracle, control_width, n)?;
        queries += 1;
        if counting.estimated_count == 0 {
            break;
        }
        let fraction = counting.estimated_fraction.max(1.0 / keys as f64).min(1.0);
        let amplify_iterations = grover_iterations(fraction);
        let amplified = amplitude_amplify(&count_prep, &layout, &oracle, amplify_iterations)?;
        loop {
            if queries >= cap {
                cap_exceeded = true;
                break 'outer;
            }
            let index = amplified.sample_indices(1, &mut rng)[0];
            queries += 1;
            let (key, raw) = extract(index);
            let sampled_value = if shifted {
                decode_value(raw, m)?.signed + best_value
            } else {
                decode_value(raw, m)?.signed
            };
            let improved = sampled_value < best_value;
            steps.push(QuboStep {
                best_value,
                count_below: counting.estimated_count,
                counting_ambiguous: counting.ambiguous,
                amplify_iterations,
                sampled_key: key,
                sampled_value,
                improved,
            });
            if improved {
                best_key = key;
                best_value = sampled_value;
                break;
            }
        }
    }

    Ok(QuboResult {
        key: best_key,
        value: SignedValue {
            raw: encode_raw(best_value, m),
            signed: best_value,
        },
        initial_key,
        initial_value,
        steps,
        cap_exceeded,
        queries,
    })
}

/// Count the length-`n` bit strings without consecutive ones by zero-value
/// counting over the neighbor-product polynomial. The estimate equals the
/// `(n+2)`nd Fibonacci number.
pub fn fibonacci_count(n: usize, control_width: usize) -> Result<CountingResult> {
    if n == 0 {
        return Err(Error::invalid("need at least one key qubit"));
    }
    let max_value = n.saturating_sub(1) as u64;
    let value_width = if max_value == 0 {
        1
    } else {
        64 - max_value.leading_zeros() as usize
    };
    let spec = DictionarySpec::new(n, value_width)?;
    let poly = QuadraticPolynomial::consecutive_ones(n);
    count_value_eq(&spec, &EncodingSource::Polynomial(poly), 0, control_width)
}
