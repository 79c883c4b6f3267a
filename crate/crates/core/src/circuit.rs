//! The gate catalog and circuit construction: every gate is a 2x2
//! amplitude-pair transform (plus the swap permutation), and circuits are
//! ordered gate lists supporting inverse, controlled, and repeated
//! composition. The quantum Fourier transform circuit lives here too.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::math::Complex;
use crate::state::{PairTransform, QuantumState};
use crate::{Error, Result};

/// A gate from the catalog. Rotation kinds carry their angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "angle", rename_all = "lowercase")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Phase(f64),
    Swap,
}

impl GateKind {
    /// The gate with the reverse action. Rotations negate their angle; the
    /// rest of the catalog is self-inverse.
    pub fn inverted(self) -> GateKind {
        match self {
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::Phase(t) => GateKind::Phase(-t),
            other => other,
        }
    }
}

/// The 2x2 coefficient table of a single-qubit gate:
///
/// - `X` swaps the pair, `Z` negates the second amplitude, `Y` maps
///   `(a0, a1)` to `(-i·a1, i·a0)`;
/// - `H` produces the normalized sum and difference;
/// - `Rx(θ)`, `Ry(θ)`, `Rz(θ)` are the half-angle rotations;
/// - `Phase(θ)` multiplies the second amplitude by `exp(iθ)`.
///
/// `Swap` has no pair transform (it is a two-qubit permutation).
pub fn gate_transform(kind: GateKind) -> Result<PairTransform> {
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let t = match kind {
        GateKind::X => PairTransform {
            c00: zero,
            c01: one,
            c10: one,
            c11: zero,
        },
        GateKind::Y => PairTransform {
            c00: zero,
            c01: -i,
            c10: i,
            c11: zero,
        },
        GateKind::Z => PairTransform {
            c00: one,
            c01: zero,
            c10: zero,
            c11: -one,
        },
        GateKind::H => {
            let r = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            PairTransform {
                c00: r,
                c01: r,
                c10: r,
                c11: -r,
            }
        }
        GateKind::Rx(theta) => {
            let c = Complex::new((theta / 2.0).cos(), 0.0);
            let s = Complex::new(0.0, -(theta / 2.0).sin());
            PairTransform {
                c00: c,
                c01: s,
                c10: s,
                c11: c,
            }
        }
        GateKind::Ry(theta) => {
            let c = Complex::new((theta / 2.0).cos(), 0.0);
            let s = Complex::new((theta / 2.0).sin(), 0.0);
            PairTransform {
                c00: c,
                c01: -s,
                c10: s,
                c11: c,
            }
        }
        GateKind::Rz(theta) => {
            let e = Complex::from_polar(1.0, theta / 2.0);
            PairTransform {
                c00: e.conj(),
                c01: zero,
                c10: zero,
                c11: e,
            }
        }
        GateKind::Phase(theta) => PairTransform {
            c00: one,
            c01: zero,
            c10: zero,
            c11: Complex::from_polar(1.0, theta),
        },
        GateKind::Swap => return Err(Error::invalid("swap has no single-qubit pair transform")),
    };
    Ok(t)
}

/// One gate bound to its target qubit(s) and control set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateApplication {
    #[serde(flatten)]
    pub kind: GateKind,
    pub target: usize,
    /// Second qubit of a swap; absent for every other kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target2: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<usize>,
}

impl GateApplication {
    fn targets(&self) -> Vec<usize> {
        match self.target2 {
            Some(t2) => vec![self.target, t2],
            None => vec![self.target],
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        match (self.kind, self.target2) {
            (GateKind::Swap, None) => return Err(Error::invalid("swap needs two target qubits")),
            (GateKind::Swap, Some(t2)) if t2 == self.target => {
                return Err(Error::invalid("swap targets must differ"))
            }
            (GateKind::Swap, Some(_)) => {}
            (_, Some(_)) => return Err(Error::invalid("only swap takes a second target")),
            _ => {}
        }
        for &q in self.targets().iter().chain(&self.controls) {
            if q >= num_qubits {
                return Err(Error::invalid(format!(
                    "qubit {q} out of range for a {num_qubits}-qubit circuit"
                )));
            }
        }
        for c in &self.controls {
            if self.targets().contains(c) {
                return Err(Error::invalid(format!(
                    "qubit {c} is both target and control"
                )));
            }
        }
        Ok(())
    }
}

/// An ordered list of gate applications over a fixed number of qubits,
/// applied first to last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateApplication>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateApplication] {
        &self.ops
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }

    pub fn push(&mut self, op: GateApplication) -> Result<&mut Self> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    fn push_simple(&mut self, kind: GateKind, target: usize, controls: &[usize]) -> &mut Self {
        self.push(GateApplication {
            kind,
            target,
            target2: None,
            controls: controls.to_vec(),
        })
        .expect("gate indices checked by caller");
        self
    }

    pub fn x(&mut self, target: usize) -> &mut Self {
        self.push_simple(GateKind::X, target, &[])
    }

    pub fn y(&mut self, target: usize) -> &mut Self {
        self.push_simple(GateKind::Y, target, &[])
    }

    pub fn z(&mut self, target: usize) -> &mut Self {
        self.push_simple(GateKind::Z, target, &[])
    }

    pub fn h(&mut self, target: usize) -> &mut Self {
        self.push_simple(GateKind::H, target, &[])
    }

    pub fn rx(&mut self, theta: f64, target: usize) -> &mut Self {
        self.push_simple(GateKind::Rx(theta), target, &[])
    }

    pub fn ry(&mut self, theta: f64, target: usize) -> &mut Self {
        self.push_simple(GateKind::Ry(theta), target, &[])
    }

    pub fn rz(&mut self, theta: f64, target: usize) -> &mut Self {
        self.push_simple(GateKind::Rz(theta), target, &[])
    }

    pub fn phase(&mut self, theta: f64, target: usize) -> &mut Self {
        self.push_simple(GateKind::Phase(theta), target, &[])
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.push_simple(GateKind::X, target, &[control])
    }

    pub fn controlled_gate(
        &mut self,
        kind: GateKind,
        target: usize,
        controls: &[usize],
    ) -> &mut Self {
        self.push_simple(kind, target, controls)
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(GateApplication {
            kind: GateKind::Swap,
            target: a,
            target2: Some(b),
            controls: Vec::new(),
        })
        .expect("gate indices checked by caller");
        self
    }

    /// Apply the gates in order to `state`, in place.
    pub fn run_in_place(&self, state: &mut QuantumState) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::invalid(format!(
                "circuit width {} does not match state width {}",
                self.num_qubits,
                state.num_qubits()
            )));
        }
        for op in &self.ops {
            match op.kind {
                GateKind::Swap => state.apply_swap(op.target, op.target2.unwrap(), &op.controls)?,
                kind => {
                    let t = gate_transform(kind)?;
                    state.apply_pair_transform(&t, op.target, &op.controls)?
                }
            }
        }
        Ok(())
    }

    /// Apply the gates to a copy of `initial` and return the evolved state.
    pub fn run(&self, initial: &QuantumState) -> Result<QuantumState> {
        let mut s = initial.clone();
        self.run_in_place(&mut s)?;
        Ok(s)
    }

    /// Run starting from the all-zeros state.
    pub fn run_from_default(&self) -> Result<QuantumState> {
        let mut s = QuantumState::new(self.num_qubits)?;
        self.run_in_place(&mut s)?;
        Ok(s)
    }

    /// The circuit undoing this one: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| GateApplication {
                kind: op.kind.inverted(),
                ..op.clone()
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            ops,
        }
    }

    /// Add `extra` control qubits to every gate. The controls must lie
    /// outside the qubits the circuit touches.
    pub fn controlled(&self, extra: &[usize]) -> Result<Circuit> {
        let mut touched = 0u64;
        for op in &self.ops {
            for q in op.targets().iter().chain(&op.controls) {
                touched |= 1 << q;
            }
        }
        for &c in extra {
            if c >= self.num_qubits {
                return Err(Error::invalid(format!(
                    "control {c} out of range for a {}-qubit circuit",
                    self.num_qubits
                )));
            }
            if touched & (1 << c) != 0 {
                return Err(Error::invalid(format!(
                    "control {c} overlaps a qubit the circuit acts on"
                )));
            }
        }
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let mut controls = op.controls.clone();
                controls.extend_from_slice(extra);
                GateApplication {
                    controls,
                    ..op.clone()
                }
            })
            .collect();
        Ok(Circuit {
            num_qubits: self.num_qubits,
            ops,
        })
    }

    /// Concatenate `k` copies of the circuit.
    pub fn repeated(&self, k: usize) -> Circuit {
        let mut out = Circuit::new(self.num_qubits);
        for _ in 0..k {
            out.ops.extend(self.ops.iter().cloned());
        }
        out
    }

    /// Append another circuit of the same width.
    pub fn extend_with(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::invalid(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            )));
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(self)
    }

    /// Append another circuit with all its qubit indices shifted by
    /// `offset`; the shifted indices must fit this circuit's width.
    pub fn extend_with_offset(&mut self, other: &Circuit, offset: usize) -> Result<&mut Self> {
        if offset + other.num_qubits > self.num_qubits {
            return Err(Error::invalid(format!(
                "embedded circuit ([{offset}, {})) exceeds width {}",
                offset + other.num_qubits,
                self.num_qubits
            )));
        }
        for op in &other.ops {
            self.ops.push(GateApplication {
                kind: op.kind,
                target: op.target + offset,
                target2: op.target2.map(|t| t + offset),
                controls: op.controls.iter().map(|c| c + offset).collect(),
            });
        }
        Ok(self)
    }

    /// Widen the circuit to `num_qubits`, shifting every index by `offset`.
    pub fn embedded(&self, num_qubits: usize, offset: usize) -> Result<Circuit> {
        let mut out = Circuit::new(num_qubits);
        out.extend_with_offset(self, offset)?;
        Ok(out)
    }

    /// Serialize as `{num_qubits, ops: [{kind, angle?, target, target2?,
    /// controls?}, ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("circuit serialization is infallible")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Circuit> {
        let circuit: Circuit = serde_json::from_value(value.clone())
            .map_err(|e| Error::invalid(format!("circuit json: {e}")))?;
        for op in &circuit.ops {
            op.validate(circuit.num_qubits)?;
        }
        Ok(circuit)
    }

    pub fn from_json_str(text: &str) -> Result<Circuit> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("circuit json: {e}")))?;
        Circuit::from_json(&value)
    }
}

/// The quantum Fourier transform on `width` qubits.
///
/// With `inverse` false the circuit acts on a register exactly like the
/// unitary DFT with positive kernel sign; with `inverse` true like the
/// negative sign (the decode direction). Bit order is fixed with explicit
/// swaps, so the amplitudes match the classical transform elementwise. Gate
/// count is `width(width+1)/2 + width/2`, within the `width² + width` bound.
pub fn qft_circuit(width: usize, inverse: bool) -> Result<Circuit> {
    if width == 0 {
        return Err(Error::invalid("qft: width must be at least 1"));
    }
    let mut c = Circuit::new(width);
    for j in (0..width).rev() {
        c.h(j);
        for m in (0..j).rev() {
            let angle = PI / (1u64 << (j - m)) as f64;
            c.controlled_gate(GateKind::Phase(angle), j, &[m]);
        }
    }
    for j in 0..width / 2 {
        c.swap(j, width - 1 - j);
    }
    Ok(if inverse { c.inverse() } else { c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{dft, geometric_sequence, KernelSign};
    use crate::ALGEBRAIC_TOL;

    fn c64(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Column `v` of the circuit's unitary, by running the basis state.
    fn column(circuit: &Circuit, v: u64) -> Vec<Complex> {
        let mut amps = vec![c64(0.0, 0.0); 1 << circuit.num_qubits()];
        amps[v as usize] = c64(1.0, 0.0);
        let state = QuantumState::from_amplitudes(amps).unwrap();
        circuit.run(&state).unwrap().amplitudes().to_vec()
    }

    fn random_single_qubit_state(seed: u64) -> QuantumState {
        // Cheap deterministic pseudo-random amplitudes.
        let a = ((seed * 2654435761 % 1000) as f64) / 1000.0;
        let b = ((seed * 40503 % 997) as f64) / 997.0;
        let amp0 = c64(a, 1.0 - a);
        let amp1 = c64(b, -0.5 + b / 2.0);
        let norm = (amp0.norm_sqr() + amp1.norm_sqr()).sqrt();
        QuantumState::from_amplitudes(vec![amp0 / norm, amp1 / norm]).unwrap()
    }

    #[test]
    fn all_catalog_transforms_are_unitary() {
        let kinds = [
            GateKind::X,
            GateKind::Y,
            GateKind::Z,
            GateKind::H,
            GateKind::Rx(0.7),
            GateKind::Ry(-1.3),
            GateKind::Rz(2.9),
            GateKind::Phase(0.4),
        ];
        for kind in kinds {
            assert!(
                gate_transform(kind).unwrap().is_unitary(ALGEBRAIC_TOL),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn hadamard_splits_the_default_state() {
        let mut circuit = Circuit::new(1);
        circuit.h(0);
        let s = circuit.run_from_default().unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitude(0) - c64(r, 0.0)).norm() < 1e-12);
        assert!((s.amplitude(1) - c64(r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ry_prepares_the_half_angle_coin() {
        let theta = 0.9f64;
        let mut circuit = Circuit::new(1);
        circuit.ry(theta, 0);
        let s = circuit.run_from_default().unwrap();
        assert!((s.amplitude(0).re - (theta / 2.0).cos()).abs() < 1e-12);
        assert!((s.amplitude(1).re - (theta / 2.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn phase_pi_acts_like_z() {
        let state = random_single_qubit_state(3);
        let mut pz = Circuit::new(1);
        pz.phase(PI, 0);
        let mut z = Circuit::new(1);
        z.z(0);
        let a = pz.run(&state).unwrap();
        let b = z.run(&state).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn gate_identities_up_to_global_phase() {
        // X = i·Rx(π), Z = i·Rz(π), Y = i·Ry(π), Y = i·X·Z (matrix order),
        // H = (X + Z)/√2 at the coefficient level.
        let i = c64(0.0, 1.0);
        let x = gate_transform(GateKind::X).unwrap();
        let rx = gate_transform(GateKind::Rx(PI)).unwrap();
        assert!((x.c01 - i * rx.c01).norm() < 1e-12);
        assert!((x.c10 - i * rx.c10).norm() < 1e-12);
        assert!((x.c00 - i * rx.c00).norm() < 1e-12);

        let z = gate_transform(GateKind::Z).unwrap();
        let rz = gate_transform(GateKind::Rz(PI)).unwrap();
        assert!((z.c00 - i * rz.c00).norm() < 1e-12);
        assert!((z.c11 - i * rz.c11).norm() < 1e-12);

        let y = gate_transform(GateKind::Y).unwrap();
        let ry = gate_transform(GateKind::Ry(PI)).unwrap();
        assert!((y.c01 - i * ry.c01).norm() < 1e-12);
        assert!((y.c10 - i * ry.c10).norm() < 1e-12);

        // Y = i·X·Z: apply Z then X to a state and compare against Y with
        // the amplitudes scaled by i.
        let state = random_single_qubit_state(11);
        let mut zx = Circuit::new(1);
        zx.z(0).x(0);
        let via_xz = zx.run(&state).unwrap();
        let mut yc = Circuit::new(1);
        yc.y(0);
        let via_y = yc.run(&state).unwrap();
        for (a, b) in via_xz.amplitudes().iter().zip(via_y.amplitudes()) {
            assert!((i * a - b).norm() < 1e-12);
        }

        let h = gate_transform(GateKind::H).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((h.c00 - (x.c00 + z.c00) * r).norm() < 1e-12);
        assert!((h.c01 - (x.c01 + z.c01) * r).norm() < 1e-12);
        assert!((h.c10 - (x.c10 + z.c10) * r).norm() < 1e-12);
        assert!((h.c11 - (x.c11 + z.c11) * r).norm() < 1e-12);
    }

    #[test]
    fn zxzx_negates_and_xyz_multiplies_by_i() {
        // Gate words compose as matrix products, so the first gate applied
        // is the rightmost letter.
        for seed in 0..20 {
            let state = random_single_qubit_state(seed);
            let mut zxzx = Circuit::new(1);
            zxzx.x(0).z(0).x(0).z(0);
            let out = zxzx.run(&state).unwrap();
            for (a, b) in out.amplitudes().iter().zip(state.amplitudes()) {
                assert!((a + b).norm() < ALGEBRAIC_TOL);
            }

            let mut xyz = Circuit::new(1);
            xyz.z(0).y(0).x(0);
            let out = xyz.run(&state).unwrap();
            let i = c64(0.0, 1.0);
            for (a, b) in out.amplitudes().iter().zip(state.amplitudes()) {
                assert!((a - i * b).norm() < ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn hadamard_then_cx_makes_a_bell_pair() {
        let mut circuit = Circuit::new(2);
        circuit.h(0).cx(0, 1);
        let s = circuit.run_from_default().unwrap();
        let h = s.probabilities();
        assert!((h.probability(0) - 0.5).abs() < 1e-12);
        assert!((h.probability(3) - 0.5).abs() < 1e-12);
        assert!(h.probability(1) < 1e-15);
        assert!(h.probability(2) < 1e-15);
    }

    #[test]
    fn von_neumann_coin_is_fair_for_any_bias() {
        for k in 0..100 {
            let theta = (k as f64) * 0.0628 + 0.01;
            let mut circuit = Circuit::new(1);
            circuit.ry(theta, 0).h(0).ry(theta, 0);
            let s = circuit.run_from_default().unwrap();
            assert!(
                (s.probability_of(0) - 0.5).abs() < ALGEBRAIC_TOL,
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn inverse_undoes_any_circuit() {
        let mut circuit = Circuit::new(3);
        circuit
            .h(0)
            .ry(0.7, 1)
            .cx(0, 2)
            .phase(1.1, 2)
            .swap(0, 1)
            .rz(-0.3, 0);
        let state = circuit.run_from_default().unwrap();
        let restored = circuit.inverse().run(&state).unwrap();
        assert!((restored.probability_of(0) - 1.0).abs() < ALGEBRAIC_TOL);

        let mut ry = Circuit::new(1);
        ry.ry(0.7, 0);
        assert_eq!(ry.inverse().ops()[0].kind, GateKind::Ry(-0.7));
        let mut h = Circuit::new(1);
        h.h(0);
        assert_eq!(h.inverse().ops()[0].kind, GateKind::H);
    }

    #[test]
    fn controlled_circuit_acts_only_on_the_marked_subspace() {
        let mut x0 = Circuit::new(2);
        x0.x(0);
        let controlled = x0.controlled(&[1]).unwrap();

        // Control clear: nothing happens.
        let s = controlled.run(&QuantumState::new(2).unwrap()).unwrap();
        assert_eq!(s.probability_of(0), 1.0);

        // Control set: |10> -> |11>.
        let mut prep = Circuit::new(2);
        prep.x(1);
        let s = prep.run_from_default().unwrap();
        let s = controlled.run(&s).unwrap();
        assert_eq!(s.probability_of(3), 1.0);

        // Controls may not overlap the circuit's own qubits.
        assert!(x0.controlled(&[0]).is_err());
    }

    #[test]
    fn qft_width_one_is_a_hadamard() {
        let c = qft_circuit(1, false).unwrap();
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.ops()[0].kind, GateKind::H);
    }

    #[test]
    fn qft_matches_direct_dft_on_all_basis_states() {
        for width in 1..=6usize {
            let n = 1usize << width;
            let circuit = qft_circuit(width, false).unwrap();
            assert!(circuit.gate_count() <= width * width + width);
            for v in 0..n as u64 {
                let got = column(&circuit, v);
                let mut impulse = vec![c64(0.0, 0.0); n];
                impulse[v as usize] = c64(1.0, 0.0);
                let want = dft(&impulse, KernelSign::Plus).unwrap();
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).norm() < ALGEBRAIC_TOL, "width {width}, basis {v}");
                }
            }
        }
    }

    #[test]
    fn inverse_qft_decodes_a_basis_encoded_integer() {
        // QFT of |5> is the normalized geometric sequence of 5; the inverse
        // brings it back.
        let width = 3;
        let circuit = qft_circuit(width, false).unwrap();
        let got = column(&circuit, 5);
        let scale = 1.0 / 8f64.sqrt();
        let want: Vec<Complex> = geometric_sequence(5.0, 8)
            .unwrap()
            .iter()
            .map(|v| v * scale)
            .collect();
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < ALGEBRAIC_TOL);
        }

        let inv = qft_circuit(width, true).unwrap();
        let state = QuantumState::from_amplitudes(want).unwrap();
        let decoded = inv.run(&state).unwrap();
        assert!((decoded.probability_of(5) - 1.0).abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn inverse_qft_on_fractional_sequence_matches_fejer() {
        use crate::math::fejer_probability;
        let scale = 1.0 / 8f64.sqrt();
        let seq: Vec<Complex> = geometric_sequence(5.7, 8)
            .unwrap()
            .iter()
            .map(|v| v * scale)
            .collect();
        let state = QuantumState::from_amplitudes(seq).unwrap();
        let decoded = qft_circuit(3, true).unwrap().run(&state).unwrap();
        for k in 0..8usize {
            let want = fejer_probability(5.7, k, 8).unwrap();
            assert!((decoded.probability_of(k as u64) - want).abs() < ALGEBRAIC_TOL);
        }
    }

    #[test]
    fn qft_composed_with_its_inverse_is_identity() {
        let fwd = qft_circuit(3, false).unwrap();
        let inv = qft_circuit(3, true).unwrap();
        for v in 0..8u64 {
            let mut roundtrip = fwd.clone();
            roundtrip.extend_with(&inv).unwrap();
            let got = column(&roundtrip, v);
            for (k, a) in got.iter().enumerate() {
                let want = if k as u64 == v { 1.0 } else { 0.0 };
                assert!((a.norm() - want).abs() < ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn circuit_json_round_trips() {
        let mut circuit = Circuit::new(3);
        circuit.h(0).ry(0.25, 1).swap(1, 2);
        circuit.controlled_gate(GateKind::Phase(0.5), 2, &[0]);
        let js = circuit.to_json_string();
        let back = Circuit::from_json_str(&js).unwrap();
        assert_eq!(circuit, back);

        // Angle and controls appear in the expected shape.
        let v = circuit.to_json();
        assert_eq!(v["ops"][1]["kind"], "ry");
        assert_eq!(v["ops"][1]["angle"], 0.25);
        assert_eq!(v["ops"][3]["controls"][0], 0);
    }

    #[test]
    fn circuit_json_rejects_bad_indices() {
        let text = r#"{"num_qubits": 2, "ops": [{"kind": "x", "target": 5}]}"#;
        assert!(Circuit::from_json_str(text).is_err());
    }

    #[test]
    fn run_rejects_width_mismatch() {
        let mut circuit = Circuit::new(2);
        circuit.h(0);
        let state = QuantumState::new(3).unwrap();
        assert!(circuit.run(&state).is_err());
    }
}
