//! Phase estimation, phase oracles, the diffusion operator, Grover search,
//! amplitude amplification about a prepared state, and quantum counting.
//!
//! Sign conventions are pinned by the counting post-processing: the counting
//! iterate is `A · (I − 2|0..0⟩⟨0..0|) · A⁻¹ · O`, whose eigenphases are
//! `π ± 2θ₀` with `sin²θ₀` the good-state fraction, so a measured control
//! outcome `p` over `2^t` converts through `cos²(p·π/2^t)`. Amplitude
//! amplification uses the opposite reflection sign,
//! `A · (2|0..0⟩⟨0..0| − I) · A⁻¹ · O`, which rotates the good amplitude by
//! `2θ₀` per round and yields the usual `sin²((2k+1)θ₀)` law.

use std::f64::consts::PI;

use crate::circuit::{qft_circuit, Circuit, GateKind};
use crate::state::{OutcomeHistogram, QuantumState, RegisterLayout};
use crate::{Error, Result, ALGEBRAIC_TOL};

/// Which basis states an oracle recognizes, relative to one register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// All register values with the given parity of the least significant bit.
    Parity { even: bool },
    /// An explicit set of register values.
    ExplicitSet { labels: Vec<u64> },
    /// Register values with the most significant (sign) bit set.
    SignBit,
    /// Exactly one register value.
    KeyMatch { pattern: u64 },
}

/// How the phase flip is realized in gates. Both constructions multiply the
/// amplitudes of the recognized states by -1 and act as the identity
/// elsewhere; they differ only in gate shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleConstruction {
    /// Kick the phase back off a helper qubit prepared in the
    /// `(1/√2, -1/√2)` state with an X-then-H sequence.
    #[default]
    AncillaTrick,
    /// Apply the controlled Z,X,Z,X sequence (a controlled -identity) to a
    /// qubit outside the recognized pattern.
    Zxzx,
}

/// A declarative description of the "good states" predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub register: String,
    pub construction: OracleConstruction,
}

impl OracleSpec {
    pub fn parity(even: bool, register: &str) -> Self {
        OracleSpec {
            kind: OracleKind::Parity { even },
            register: register.to_string(),
            construction: OracleConstruction::default(),
        }
    }

    pub fn explicit_set(labels: Vec<u64>, register: &str) -> Self {
        OracleSpec {
            kind: OracleKind::ExplicitSet { labels },
            register: register.to_string(),
            construction: OracleConstruction::default(),
        }
    }

    pub fn sign_bit(register: &str) -> Self {
        OracleSpec {
            kind: OracleKind::SignBit,
            register: register.to_string(),
            construction: OracleConstruction::default(),
        }
    }

    pub fn key_match(pattern: u64, register: &str) -> Self {
        OracleSpec {
            kind: OracleKind::KeyMatch { pattern },
            register: register.to_string(),
            construction: OracleConstruction::default(),
        }
    }

    pub fn with_construction(mut self, construction: OracleConstruction) -> Self {
        self.construction = construction;
        self
    }

    /// The classical predicate the circuit realizes, on register values.
    pub fn is_good(&self, value: u64, register_width: usize) -> bool {
        match &self.kind {
            OracleKind::Parity { even } => (value & 1 == 0) == *even,
            OracleKind::ExplicitSet { labels } => labels.contains(&value),
            OracleKind::SignBit => value >> (register_width - 1) & 1 == 1,
            OracleKind::KeyMatch { pattern } => value == *pattern,
        }
    }

    /// Recognized patterns as (constrained-bit mask, required bits) pairs in
    /// register-local coordinates. The patterns are pairwise disjoint.
    fn patterns(&self, width: usize) -> Result<Vec<(u64, u64)>> {
        let full: u64 = ((1u128 << width) - 1) as u64;
        match &self.kind {
            OracleKind::Parity { even } => Ok(vec![(1, if *even { 0 } else { 1 })]),
            OracleKind::ExplicitSet { labels } => {
                if labels.is_empty() {
                    return Err(Error::invalid("oracle set must not be empty"));
                }
                let mut seen = std::collections::BTreeSet::new();
                for &l in labels {
                    if l > full {
                        return Err(Error::invalid(format!(
                            "oracle label {l} does not fit a {width}-bit register"
                        )));
                    }
                    if !seen.insert(l) {
                        return Err(Error::invalid(format!("duplicate oracle label {l}")));
                    }
                }
                Ok(labels.iter().map(|&l| (full, l)).collect())
            }
            OracleKind::SignBit => {
                let bit = 1u64 << (width - 1);
                Ok(vec![(bit, bit)])
            }
            OracleKind::KeyMatch { pattern } => {
                if *pattern > full {
                    return Err(Error::invalid(format!(
                        "key pattern {pattern} does not fit a {width}-bit register"
                    )));
                }
                Ok(vec![(full, *pattern)])
            }
        }
    }
}

/// Pick the qubit an oracle may use for its phase flip: the first qubit not
/// claimed by any register, or the first qubit of a register named
/// `ancilla` when everything is claimed.
fn scratch_qubit(spec_register: &str, layout: &RegisterLayout) -> Result<usize> {
    if let Some(q) = layout.first_free_qubit() {
        return Ok(q);
    }
    if spec_register != "ancilla" {
        if let Ok(anc) = layout.register("ancilla") {
            return Ok(anc.offset);
        }
    }
    Err(Error::invalid(
        "oracle needs one qubit outside its register (free qubit or an `ancilla` register)",
    ))
}

/// Build the circuit that multiplies the amplitudes of the oracle's good
/// states by -1 and leaves every other amplitude unchanged. Pattern bits
/// required to be 0 are matched by conjugating that qubit with X gates.
pub fn build_oracle(spec: &OracleSpec, layout: &RegisterLayout) -> Result<Circuit> {
    let reg = layout.register(&spec.register)?.clone();
    let patterns = spec.patterns(reg.width)?;
    let scratch = scratch_qubit(&spec.register, layout)?;
    let mut c = Circuit::new(layout.num_qubits());

    let conjugate = |c: &mut Circuit, mask: u64, value: u64| {
        for b in 0..reg.width {
            if mask >> b & 1 == 1 && value >> b & 1 == 0 {
                c.x(reg.offset + b);
            }
        }
    };
    let controls_of = |mask: u64| -> Vec<usize> {
        (0..reg.width)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| reg.offset + b)
            .collect()
    };

    match spec.construction {
        OracleConstruction::AncillaTrick => {
            c.x(scratch).h(scratch);
            for &(mask, value) in &patterns {
                conjugate(&mut c, mask, value);
                c.controlled_gate(GateKind::X, scratch, &controls_of(mask));
                conjugate(&mut c, mask, value);
            }
            c.h(scratch).x(scratch);
        }
        OracleConstruction::Zxzx => {
            for &(mask, value) in &patterns {
                conjugate(&mut c, mask, value);
                let controls = controls_of(mask);
                for kind in [GateKind::X, GateKind::Z, GateKind::X, GateKind::Z] {
                    c.controlled_gate(kind, scratch, &controls);
                }
                conjugate(&mut c, mask, value);
            }
        }
    }
    Ok(c)
}

/// Append the reflection about the all-zeros state of `qubits`.
///
/// With `positive` false this is `I − 2|0..0⟩⟨0..0|` (the all-zeros
/// amplitude is negated); with `positive` true the overall sign is flipped
/// with an explicit Z,X,Z,X sequence, giving `2|0..0⟩⟨0..0| − I`. The sign
/// matters once the reflection runs under controls, so it is always
/// materialized in gates.
fn append_zero_reflection(c: &mut Circuit, qubits: &[usize], positive: bool) {
    for &q in qubits {
        c.x(q);
    }
    if let [single] = qubits {
        c.z(*single);
    } else {
        let (&last, rest) = qubits.split_last().expect("non-empty register");
        c.controlled_gate(GateKind::Z, last, rest);
    }
    for &q in qubits {
        c.x(q);
    }
    if positive {
        let q = qubits[0];
        c.x(q).z(q).x(q).z(q);
    }
}

/// The diffusion operator on one register: every amplitude block over the
/// register is replaced by `2·mean − amplitude`. Real amplitudes stay real.
pub fn diffusion(register: &str, layout: &RegisterLayout) -> Result<Circuit> {
    let reg = layout.register(register)?.clone();
    let qubits: Vec<usize> = reg.qubits().collect();
    let mut c = Circuit::new(layout.num_qubits());
    for &q in &qubits {
        c.h(q);
    }
    append_zero_reflection(&mut c, &qubits, true);
    for &q in &qubits {
        c.h(q);
    }
    Ok(c)
}

/// Configuration for phase estimation: a control register width, the
/// operator whose eigenphase is being read, and the circuit preparing the
/// operator's eigenstate on the same qubits.
#[derive(Clone, Debug)]
pub struct PhaseEstimationConfig {
    pub control_width: usize,
    pub unitary: Circuit,
    pub eigenprep: Circuit,
}

impl PhaseEstimationConfig {
    /// The single-qubit demonstration operator: `U = Ry(2θ)` with
    /// `θ = p·2π/2^t`, whose prepared eigenstate carries eigenvalue
    /// `cos θ + i sin θ`, so phase estimation reads back `p`.
    pub fn ry_demo(p: f64, control_width: usize) -> Self {
        let theta = p * std::f64::consts::TAU / (1u64 << control_width) as f64;
        let mut unitary = Circuit::new(1);
        unitary.ry(2.0 * theta, 0);
        PhaseEstimationConfig {
            control_width,
            unitary,
            eigenprep: ry_eigenstate_prep(),
        }
    }
}

/// Prepare `(i/√2, 1/√2)` up to global phase (H then Phase(-π/2)), the
/// θ-independent eigenstate of every `Ry(2θ)`.
pub fn ry_eigenstate_prep() -> Circuit {
    let mut c = Circuit::new(1);
    c.h(0).phase(-PI / 2.0, 0);
    c
}

/// Result of one phase-estimation run.
#[derive(Clone, Debug)]
pub struct PhaseEstimate {
    /// Exact distribution over the control register.
    pub histogram: OutcomeHistogram,
    /// Whether the prepared target state really is an eigenvector of the
    /// unitary (amplitude ratio constant within tolerance). The histogram is
    /// returned either way; a mixed preparation yields a mixture of kernels.
    pub eigenprep_valid: bool,
}

/// The core estimation circuit: uniformize `t` control qubits, apply the
/// controlled `2^k`-th powers of `unitary` (one control qubit each), run the
/// inverse QFT on the controls, and return the control-register marginal.
fn estimation_histogram(
    control_width: usize,
    unitary: &Circuit,
    prep: &Circuit,
) -> Result<OutcomeHistogram> {
    if control_width == 0 {
        return Err(Error::invalid(
            "phase estimation needs at least 1 control qubit",
        ));
    }
    if unitary.num_qubits() != prep.num_qubits() {
        return Err(Error::invalid(format!(
            "unitary acts on {} qubits but the preparation on {}",
            unitary.num_qubits(),
            prep.num_qubits()
        )));
    }
    let t = control_width;
    let total = t + unitary.num_qubits();
    let mut circuit = Circuit::new(total);
    circuit.extend_with_offset(prep, t)?;
    for k in 0..t {
        circuit.h(k);
    }
    let embedded = unitary.embedded(total, t)?;
    for k in 0..t {
        // Powers materialize as repetition, exact at desk scale.
        let controlled = embedded.controlled(&[k])?;
        circuit.extend_with(&controlled.repeated(1usize << k))?;
    }
    circuit.extend_with_offset(&qft_circuit(t, true)?, 0)?;
    let state = circuit.run_from_default()?;
    Ok(state.probabilities().marginal_bits(0, t))
}

/// Check that `eigenprep` prepares an eigenvector of `unitary`: the evolved
/// amplitudes must all be the same unit-magnitude multiple of the originals.
fn eigenprep_is_eigenvector(unitary: &Circuit, eigenprep: &Circuit) -> Result<bool> {
    let prepared = eigenprep.run_from_default()?;
    let evolved = unitary.run(&prepared)?;
    let (pivot, _) = prepared
        .amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
        .expect("state is non-empty");
    let lambda = evolved.amplitude(pivot as u64) / prepared.amplitude(pivot as u64);
    if (lambda.norm() - 1.0).abs() > ALGEBRAIC_TOL {
        return Ok(false);
    }
    Ok(prepared
        .amplitudes()
        .iter()
        .zip(evolved.amplitudes())
        .all(|(a, b)| (b - lambda * a).norm() < ALGEBRAIC_TOL))
}

/// Run phase estimation. When the unitary has eigenphase `p·2π/2^t` on the
/// prepared eigenstate, the returned histogram is the normalized Fejer
/// kernel centered at `p`.
pub fn phase_estimation(config: &PhaseEstimationConfig) -> Result<PhaseEstimate> {
    let eigenprep_valid = eigenprep_is_eigenvector(&config.unitary, &config.eigenprep)?;
    let histogram = estimation_histogram(config.control_width, &config.unitary, &config.eigenprep)?;
    Ok(PhaseEstimate {
        histogram,
        eigenprep_valid,
    })
}

/// Number of amplification rounds that brings a good-state fraction closest
/// to certainty: the nearest integer to `π/(4·asin(√fraction)) − 1/2`.
pub fn grover_iterations(good_fraction: f64) -> usize {
    if good_fraction <= 0.0 {
        return 0;
    }
    let theta = good_fraction.min(1.0).sqrt().asin();
    let k = (PI / (4.0 * theta) - 0.5).round();
    if k.is_sign_negative() {
        0
    } else {
        k as usize
    }
}

/// Success probability of `iterations` Grover rounds starting from a
/// good-state fraction: `sin²((2k+1)·asin(√fraction))`.
pub fn grover_success_probability(good_fraction: f64, iterations: usize) -> f64 {
    let theta = good_fraction.clamp(0.0, 1.0).sqrt().asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

/// Grover search over a uniform superposition of `width`-bit states:
/// `iterations` rounds of oracle-then-diffusion, returning the exact
/// histogram over the search register.
pub fn grover_search(
    oracle: &OracleSpec,
    width: usize,
    iterations: usize,
) -> Result<OutcomeHistogram> {
    let layout = RegisterLayout::new(width + 1).with_register(&oracle.register, 0, width)?;
    let oracle_circuit = build_oracle(oracle, &layout)?;
    let diffusion_circuit = diffusion(&oracle.register, &layout)?;
    let mut circuit = Circuit::new(width + 1);
    for q in 0..width {
        circuit.h(q);
    }
    for _ in 0..iterations {
        circuit.extend_with(&oracle_circuit)?;
        circuit.extend_with(&diffusion_circuit)?;
    }
    let state = circuit.run_from_default()?;
    Ok(state.probabilities().marginal_bits(0, width))
}

/// One round of amplitude amplification about the state `prep` prepares:
/// oracle, un-prepare, reflection about all-zeros (positive sign), prepare.
fn amplification_round(prep: &Circuit, oracle_circuit: &Circuit) -> Result<Circuit> {
    let mut g = Circuit::new(prep.num_qubits());
    g.extend_with(oracle_circuit)?;
    g.extend_with(&prep.inverse())?;
    append_zero_reflection(&mut g, &(0..prep.num_qubits()).collect::<Vec<_>>(), true);
    g.extend_with(prep)?;
    Ok(g)
}

/// Amplitude amplification: the state after `iterations` rounds applied to
/// `prep|0..0⟩`. With `prep` a Hadamard layer this reduces to Grover search.
pub fn amplitude_amplify(
    prep: &Circuit,
    layout: &RegisterLayout,
    oracle: &OracleSpec,
    iterations: usize,
) -> Result<QuantumState> {
    if prep.num_qubits() != layout.num_qubits() {
        return Err(Error::invalid(format!(
            "preparation width {} does not match layout width {}",
            prep.num_qubits(),
            layout.num_qubits()
        )));
    }
    let oracle_circuit = build_oracle(oracle, layout)?;
    let round = amplification_round(prep, &oracle_circuit)?;
    let mut circuit = prep.clone();
    circuit.extend_with(&round.repeated(iterations))?;
    circuit.run_from_default()
}

/// Quantum counting result: the control-register histogram, the most
/// probable outcome together with its mirror `2^t − p`, and the fraction and
/// count they convert to.
#[derive(Clone, Debug)]
pub struct CountingResult {
    pub histogram: OutcomeHistogram,
    pub top_outcomes: (u64, u64),
    pub estimated_fraction: f64,
    pub estimated_count: u64,
    /// Set when the top outcome sits on the fraction-0 or fraction-1
    /// boundary, where the control resolution cannot separate "none"/"all"
    /// from "too few/many to resolve".
    pub ambiguous: bool,
}

fn counting_from_histogram(
    histogram: OutcomeHistogram,
    control_width: usize,
    key_width: usize,
) -> CountingResult {
    let outcomes = 1u64 << control_width;
    // The two mirror peaks are analytically equal; rounding noise must not
    // decide between them, so anything within 1e-12 of the maximum counts
    // as tied and the smallest tied outcome is reported.
    let entries = histogram.entries();
    let max = entries.iter().map(|(_, p)| *p).fold(0.0, f64::max);
    let (p_hat, _) = entries
        .iter()
        .find(|(_, p)| *p >= max - 1e-12)
        .expect("histogram is non-empty");
    let p_hat = *p_hat;
    let fraction = (p_hat as f64 * PI / outcomes as f64).cos().powi(2);
    let count = ((1u64 << key_width) as f64 * fraction).round() as u64;
    CountingResult {
        histogram,
        top_outcomes: (p_hat, (outcomes - p_hat) % outcomes),
        estimated_fraction: fraction,
        estimated_count: count,
        ambiguous: p_hat == 0 || p_hat == outcomes / 2,
    }
}

/// Quantum counting with an arbitrary preparation: plugs the iterate
/// `A · (I − 2|0..0⟩⟨0..0|) · A⁻¹ · O` into phase estimation with the target
/// prepared as `A|0..0⟩`, then converts the most probable control outcome
/// `p` to a count via `round(2^key_width · cos²(p·π/2^t))`. Both `p` and
/// `2^t − p` describe the same angle and are reported together; an exact tie
/// resolves to the smaller outcome.
pub fn quantum_count(
    prep: &Circuit,
    layout: &RegisterLayout,
    oracle: &OracleSpec,
    control_width: usize,
    key_width: usize,
) -> Result<CountingResult> {
    if control_width < 2 {
        return Err(Error::invalid("counting needs at least 2 control qubits"));
    }
    if prep.num_qubits() != layout.num_qubits() {
        return Err(Error::invalid(format!(
            "preparation width {} does not match layout width {}",
            prep.num_qubits(),
            layout.num_qubits()
        )));
    }
    let oracle_circuit = build_oracle(oracle, layout)?;
    let mut iterate = Circuit::new(prep.num_qubits());
    iterate.extend_with(&oracle_circuit)?;
    iterate.extend_with(&prep.inverse())?;
    append_zero_reflection(
        &mut iterate,
        &(0..prep.num_qubits()).collect::<Vec<_>>(),
        false,
    );
    iterate.extend_with(prep)?;
    let histogram = estimation_histogram(control_width, &iterate, prep)?;
    Ok(counting_from_histogram(histogram, control_width, key_width))
}

/// Quantum counting over the uniform superposition: how many of the
/// `2^width` basis states does the oracle recognize?
pub fn quantum_count_uniform(
    oracle: &OracleSpec,
    width: usize,
    control_width: usize,
) -> Result<CountingResult> {
    let layout = RegisterLayout::new(width + 1).with_register(&oracle.register, 0, width)?;
    let mut prep = Circuit::new(width + 1);
    for q in 0..width {
        prep.h(q);
    }
    quantum_count(&prep, &layout, oracle, control_width, width)
}

/// Amplitude estimation: the good-state probability of `prep|0..0⟩`, read
/// off the same counting circuit without the uniform-superposition
/// assumption.
#[derive(Clone, Debug)]
pub struct AmplitudeEstimate {
    pub histogram: OutcomeHistogram,
    pub top_outcomes: (u64, u64),
    pub fraction: f64,
    pub ambiguous: bool,
}

pub fn estimate_amplitude(
    prep: &Circuit,
    layout: &RegisterLayout,
    oracle: &OracleSpec,
    control_width: usize,
) -> Result<AmplitudeEstimate> {
    let result = quantum_count(prep, layout, oracle, control_width, 0)?;
    Ok(AmplitudeEstimate {
        histogram: result.histogram,
        top_outcomes: result.top_outcomes,
        fraction: result.estimated_fraction,
        ambiguous: result.ambiguous,
    })
}
