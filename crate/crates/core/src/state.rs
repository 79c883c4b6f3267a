//! The dense statevector and everything observable about it: the
//! amplitude-pair transform all single-qubit gates reduce to, register
//! layouts, exact probability histograms, and seeded measurement sampling.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::json;

use crate::math::Complex;
use crate::{Error, Result, ALGEBRAIC_TOL, MAX_QUBITS};

/// Name and version of the generator behind [`QuantumState::sample`]. The
/// stream is fixed: ChaCha8 seeded with `seed_from_u64`, one 53-bit uniform
/// draw per shot, inverse-CDF over the exact distribution.
pub const PRNG_NAME: &str = "chacha8-cdf53-v1";

/// A 2x2 coefficient table applied to amplitude pairs.
///
/// For a pair `(a0, a1)` the new amplitudes are
/// `b0 = c00*a0 + c01*a1` and `b1 = c10*a0 + c11*a1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTransform {
    pub c00: Complex,
    pub c01: Complex,
    pub c10: Complex,
    pub c11: Complex,
}

impl PairTransform {
    pub fn identity() -> Self {
        PairTransform {
            c00: Complex::new(1.0, 0.0),
            c01: Complex::new(0.0, 0.0),
            c10: Complex::new(0.0, 0.0),
            c11: Complex::new(1.0, 0.0),
        }
    }

    /// Columns orthonormal within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let col0 = self.c00.norm_sqr() + self.c10.norm_sqr();
        let col1 = self.c01.norm_sqr() + self.c11.norm_sqr();
        let cross = self.c00 * self.c01.conj() + self.c10 * self.c11.conj();
        (col0 - 1.0).abs() < tol && (col1 - 1.0).abs() < tol && cross.norm() < tol
    }
}

/// A named block of qubits. Qubit `j` of the whole system carries bit
/// weight `2^j`; a register occupies the contiguous range
/// `[offset, offset + width)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub width: usize,
}

impl Register {
    /// Bit mask of this register inside the full system index.
    pub fn mask(&self) -> u64 {
        (((1u128 << self.width) - 1) as u64) << self.offset
    }

    /// Qubit indices covered by the register.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.offset..self.offset + self.width
    }

    /// Value of this register inside a full basis-state index.
    pub fn extract(&self, index: u64) -> u64 {
        (index >> self.offset) & (((1u128 << self.width) - 1) as u64)
    }
}

/// Disjoint named registers over a system of `num_qubits` qubits.
#[derive(Clone, Debug, Default)]
pub struct RegisterLayout {
    num_qubits: usize,
    registers: Vec<Register>,
}

impl RegisterLayout {
    pub fn new(num_qubits: usize) -> Self {
        RegisterLayout {
            num_qubits,
            registers: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Add a register; fails if it overlaps an existing one or spills past
    /// the system width.
    pub fn with_register(mut self, name: &str, offset: usize, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::invalid(format!("register {name} has zero width")));
        }
        if offset + width > self.num_qubits {
            return Err(Error::invalid(format!(
                "register {name} ([{offset}, {})) exceeds system width {}",
                offset + width,
                self.num_qubits
            )));
        }
        let mask = (((1u128 << width) - 1) as u64) << offset;
        for r in &self.registers {
            if r.mask() & mask != 0 {
                return Err(Error::invalid(format!(
                    "register {name} overlaps register {}",
                    r.name
                )));
            }
            if r.name == name {
                return Err(Error::invalid(format!("duplicate register name {name}")));
            }
        }
        self.registers.push(Register {
            name: name.to_string(),
            offset,
            width,
        });
        Ok(self)
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::invalid(format!("unknown register {name}")))
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    /// Lowest qubit index not claimed by any register, if one exists.
    pub fn first_free_qubit(&self) -> Option<usize> {
        let used: u64 = self
            .registers
            .iter()
            .map(|r| r.mask())
            .fold(0, |a, b| a | b);
        (0..self.num_qubits).find(|&q| used & (1 << q) == 0)
    }
}

/// Format a basis-state index as a fixed-width binary label, most
/// significant bit on the left.
pub fn basis_label(index: u64, bits: usize) -> String {
    (0..bits)
        .rev()
        .map(|b| if index >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Measurement statistics over basis states: either the exact Born-rule
/// probabilities or counts from a finite number of seeded shots.
#[derive(Clone, Debug, PartialEq)]
pub enum OutcomeHistogram {
    Exact {
        bits: usize,
        probabilities: BTreeMap<u64, f64>,
    },
    Sampled {
        bits: usize,
        counts: BTreeMap<u64, u64>,
        shots: u64,
        seed: u64,
    },
}

impl OutcomeHistogram {
    pub fn bits(&self) -> usize {
        match self {
            OutcomeHistogram::Exact { bits, .. } => *bits,
            OutcomeHistogram::Sampled { bits, .. } => *bits,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, OutcomeHistogram::Exact { .. })
    }

    /// Probability of an outcome; in sampled mode the observed frequency.
    pub fn probability(&self, index: u64) -> f64 {
        match self {
            OutcomeHistogram::Exact { probabilities, .. } => {
                probabilities.get(&index).copied().unwrap_or(0.0)
            }
            OutcomeHistogram::Sampled { counts, shots, .. } => {
                counts.get(&index).copied().unwrap_or(0) as f64 / *shots as f64
            }
        }
    }

    pub fn count(&self, index: u64) -> Option<u64> {
        match self {
            OutcomeHistogram::Exact { .. } => None,
            OutcomeHistogram::Sampled { counts, .. } => {
                Some(counts.get(&index).copied().unwrap_or(0))
            }
        }
    }

    /// Outcomes with nonzero weight, ascending by index, with probabilities.
    pub fn entries(&self) -> Vec<(u64, f64)> {
        match self {
            OutcomeHistogram::Exact { probabilities, .. } => {
                probabilities.iter().map(|(&k, &p)| (k, p)).collect()
            }
            OutcomeHistogram::Sampled { counts, shots, .. } => counts
                .iter()
                .map(|(&k, &c)| (k, c as f64 / *shots as f64))
                .collect(),
        }
    }

    pub fn total_probability(&self) -> f64 {
        self.entries().iter().map(|(_, p)| p).sum()
    }

    /// Most probable outcome; ties resolve to the smaller index.
    pub fn top(&self) -> Option<(u64, f64)> {
        let mut best: Option<(u64, f64)> = None;
        for (k, p) in self.entries() {
            match best {
                Some((_, bp)) if p <= bp => {}
                _ => best = Some((k, p)),
            }
        }
        best
    }

    /// Collapse the histogram onto one register of a layout, summing weight
    /// over all bits outside it.
    pub fn marginal(&self, layout: &RegisterLayout, register: &str) -> Result<OutcomeHistogram> {
        let reg = layout.register(register)?;
        if layout.num_qubits() != self.bits() {
            return Err(Error::invalid(format!(
                "marginal: layout covers {} qubits but histogram has {}",
                layout.num_qubits(),
                self.bits()
            )));
        }
        Ok(self.marginal_bits(reg.offset, reg.width))
    }

    /// Collapse onto the contiguous bit range `[offset, offset + width)`.
    pub fn marginal_bits(&self, offset: usize, width: usize) -> OutcomeHistogram {
        let extract = |index: u64| (index >> offset) & (((1u128 << width) - 1) as u64);
        match self {
            OutcomeHistogram::Exact { probabilities, .. } => {
                let mut out: BTreeMap<u64, f64> = BTreeMap::new();
                for (&k, &p) in probabilities {
                    *out.entry(extract(k)).or_insert(0.0) += p;
                }
                OutcomeHistogram::Exact {
                    bits: width,
                    probabilities: out,
                }
            }
            OutcomeHistogram::Sampled {
                counts,
                shots,
                seed,
                ..
            } => {
                let mut out: BTreeMap<u64, u64> = BTreeMap::new();
                for (&k, &c) in counts {
                    *out.entry(extract(k)).or_insert(0) += c;
                }
                OutcomeHistogram::Sampled {
                    bits: width,
                    counts: out,
                    shots: *shots,
                    seed: *seed,
                }
            }
        }
    }

    /// Draw a sampled histogram from an exact one with the same seeded
    /// generator the statevector sampler uses.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<OutcomeHistogram> {
        let OutcomeHistogram::Exact {
            bits,
            probabilities,
        } = self
        else {
            return Err(Error::invalid("histogram is already sampled"));
        };
        if shots == 0 {
            return Err(Error::invalid("sample: shots must be at least 1"));
        }
        let labels: Vec<u64> = probabilities.keys().copied().collect();
        let mut cdf = Vec::with_capacity(labels.len());
        let mut acc = 0.0f64;
        for &p in probabilities.values() {
            acc += p;
            cdf.push(acc);
        }
        let scale = acc / (1u64 << 53) as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u = (rng.next_u64() >> 11) as f64 * scale;
            let i = cdf.partition_point(|&c| c <= u).min(labels.len() - 1);
            *counts.entry(labels[i]).or_insert(0) += 1;
        }
        Ok(OutcomeHistogram::Sampled {
            bits: *bits,
            counts,
            shots,
            seed,
        })
    }

    /// CSV with header `label,probability` (exact) or
    /// `label,probability,count` (sampled); labels are fixed-width binary,
    /// most significant bit first.
    pub fn to_csv(&self) -> String {
        let bits = self.bits();
        let mut out = String::new();
        match self {
            OutcomeHistogram::Exact { probabilities, .. } => {
                out.push_str("label,probability\n");
                for (&k, &p) in probabilities {
                    out.push_str(&format!("{},{:.12}\n", basis_label(k, bits), p));
                }
            }
            OutcomeHistogram::Sampled { counts, shots, .. } => {
                out.push_str("label,probability,count\n");
                for (&k, &c) in counts {
                    let p = c as f64 / *shots as f64;
                    out.push_str(&format!("{},{:.12},{}\n", basis_label(k, bits), p, c));
                }
            }
        }
        out
    }

    /// JSON document with the same fields as the CSV plus `shots`, `seed`,
    /// and `prng` metadata in sampled mode.
    pub fn to_json(&self) -> serde_json::Value {
        let bits = self.bits();
        match self {
            OutcomeHistogram::Exact { probabilities, .. } => json!({
                "mode": "exact",
                "bits": bits,
                "entries": probabilities.iter().map(|(&k, &p)| json!({
                    "label": basis_label(k, bits),
                    "index": k,
                    "probability": p,
                })).collect::<Vec<_>>(),
            }),
            OutcomeHistogram::Sampled {
                counts,
                shots,
                seed,
                ..
            } => json!({
                "mode": "sampled",
                "bits": bits,
                "shots": shots,
                "seed": seed,
                "prng": PRNG_NAME,
                "entries": counts.iter().map(|(&k, &c)| json!({
                    "label": basis_label(k, bits),
                    "index": k,
                    "probability": c as f64 / *shots as f64,
                    "count": c,
                })).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Dense statevector over `2^num_qubits` complex amplitudes.
///
/// Basis-state index `i` assigns qubit `j` the bit `(i >> j) & 1`; display
/// labels put the most significant bit on the left. The state is the only
/// mutable object in the crate; gates evolve it in place and measurement
/// never collapses it (sampling re-draws from the exact amplitudes).
#[derive(Clone, Debug)]
pub struct QuantumState {
    num_qubits: usize,
    amps: Vec<Complex>,
}

impl QuantumState {
    /// The all-zeros default state on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "state width must be between 1 and {MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let mut amps = vec![Complex::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex::new(1.0, 0.0);
        Ok(QuantumState { num_qubits, amps })
    }

    /// Build a state from explicit amplitudes; the length must be a power of
    /// two and the norm must be 1.
    pub fn from_amplitudes(amps: Vec<Complex>) -> Result<Self> {
        let n = amps.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(
                "amplitude count must be a power of two and at least 2",
            ));
        }
        let num_qubits = n.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("more than {MAX_QUBITS} qubits")));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(Error::invalid(format!(
                "amplitudes are not normalized (norm² = {norm})"
            )));
        }
        Ok(QuantumState { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn amplitude(&self, index: u64) -> Complex {
        self.amps[index as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability_of(&self, index: u64) -> f64 {
        self.amps[index as usize].norm_sqr()
    }

    fn check_targets(&self, targets: &[usize], controls: &[usize]) -> Result<u64> {
        for &t in targets {
            if t >= self.num_qubits {
                return Err(Error::invalid(format!(
                    "qubit {t} out of range for {}-qubit state",
                    self.num_qubits
                )));
            }
        }
        let mut cmask = 0u64;
        for &c in controls {
            if c >= self.num_qubits {
                return Err(Error::invalid(format!(
                    "control {c} out of range for {}-qubit state",
                    self.num_qubits
                )));
            }
            if targets.contains(&c) {
                return Err(Error::invalid(format!(
                    "qubit {c} is both target and control"
                )));
            }
            cmask |= 1 << c;
        }
        Ok(cmask)
    }

    /// Apply a 2x2 coefficient table to every amplitude pair that differs
    /// only in the target qubit and has 1 in all control qubits. Amplitudes
    /// failing the control mask are untouched.
    pub fn apply_pair_transform(
        &mut self,
        t: &PairTransform,
        target: usize,
        controls: &[usize],
    ) -> Result<()> {
        let cmask = self.check_targets(&[target], controls)?;
        let tbit = 1u64 << target;
        let fixed = cmask | tbit;
        let dim = self.amps.len() as u64;
        // Enumerate indices with all control bits 1 and the target bit 0;
        // the increment ripples carries through the free bits only.
        let mut i = cmask;
        while i < dim {
            let i0 = i as usize;
            let i1 = (i | tbit) as usize;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = t.c00 * a0 + t.c01 * a1;
            self.amps[i1] = t.c10 * a0 + t.c11 * a1;
            i = (((i | fixed) + 1) & !fixed) | cmask;
        }
        Ok(())
    }

    /// Swap the two qubits `a` and `b` (subject to controls): amplitudes of
    /// indices that differ exactly in those two bits are exchanged.
    pub fn apply_swap(&mut self, a: usize, b: usize, controls: &[usize]) -> Result<()> {
        if a == b {
            return Err(Error::invalid("swap targets must differ"));
        }
        let cmask = self.check_targets(&[a, b], controls)?;
        let abit = 1u64 << a;
        let bbit = 1u64 << b;
        let fixed = cmask | abit | bbit;
        let pattern = cmask | abit;
        let dim = self.amps.len() as u64;
        let mut i = pattern;
        while i < dim {
            let j = i ^ abit ^ bbit;
            self.amps.swap(i as usize, j as usize);
            i = (((i | fixed) + 1) & !fixed) | pattern;
        }
        Ok(())
    }

    /// Exact Born-rule histogram: entry `i` is `|amplitude_i|²`. Entries
    /// below 1e-15 are rounding dust from cancelled amplitudes and are
    /// dropped; absent outcomes read back as probability 0.
    pub fn probabilities(&self) -> OutcomeHistogram {
        let mut probabilities = BTreeMap::new();
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 1e-15 {
                probabilities.insert(i as u64, p);
            }
        }
        OutcomeHistogram::Exact {
            bits: self.num_qubits,
            probabilities,
        }
    }

    /// Draw `shots` independent outcomes from the exact distribution with a
    /// deterministic seeded generator. Identical (state, shots, seed) yield
    /// identical histograms; the state itself is untouched.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<OutcomeHistogram> {
        if shots == 0 {
            return Err(Error::invalid("sample: shots must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        for idx in self.sample_indices(shots, &mut rng) {
            *counts.entry(idx).or_insert(0u64) += 1;
        }
        Ok(OutcomeHistogram::Sampled {
            bits: self.num_qubits,
            counts,
            shots,
            seed,
        })
    }

    /// Inverse-CDF sampling against an explicit generator; used by the
    /// iterative workflows that interleave sampling with other draws.
    pub fn sample_indices<R: RngCore>(&self, shots: u64, rng: &mut R) -> Vec<u64> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0f64;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let scale = acc / (1u64 << 53) as f64;
        (0..shots)
            .map(|_| {
                let u = (rng.next_u64() >> 11) as f64 * scale;
                cdf.partition_point(|&c| c <= u).min(self.amps.len() - 1) as u64
            })
            .collect()
    }
}
