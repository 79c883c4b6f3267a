//! Algebraic invariants of the numeric and simulation layers, checked
//! against independent classical computations: brute-force enumeration,
//! closed-form rotation laws, and transform identities.

use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use qdict::algorithms::{
    grover_search, grover_success_probability, quantum_count_uniform, OracleSpec,
};
use qdict::dict::{
    self, allocate_keys, count_value_eq, count_value_lt, DictionarySpec, EncodingSource,
    QuadraticPolynomial,
};
use qdict::math::{dft, fejer_probability, geometric_sequence, Complex, KernelSign};
use qdict::state::{QuantumState, RegisterLayout};
use qdict::ALGEBRAIC_TOL;

fn norm_sqr(seq: &[Complex]) -> f64 {
    seq.iter().map(|c| c.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polar_form_round_trips(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let c = Complex::new(re, im);
        let back = Complex::from_polar(c.norm(), c.arg());
        prop_assert!((c - back).norm() < 1e-12);
    }

    #[test]
    fn dft_is_unitary_and_invertible(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..24)) {
        let seq: Vec<Complex> = values.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        let forward = dft(&seq, KernelSign::Plus).unwrap();
        prop_assert!((norm_sqr(&forward) - norm_sqr(&seq)).abs() < ALGEBRAIC_TOL);
        let back = dft(&forward, KernelSign::Minus).unwrap();
        for (a, b) in back.iter().zip(&seq) {
            prop_assert!((a - b).norm() < ALGEBRAIC_TOL);
        }
    }

    #[test]
    fn pair_transforms_preserve_the_norm(angle in -6.0f64..6.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random_state(3, &mut rng);
        let mut circuit = qdict::circuit::Circuit::new(3);
        circuit.ry(angle, 0).rz(-angle, 1).phase(angle / 2.0, 2).h(1);
        circuit.controlled_gate(qdict::circuit::GateKind::Rx(angle), 2, &[0]);
        let out = circuit.run(&state).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn sampling_is_deterministic_per_seed(seed in 0u64..500, shots in 1u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
        let state = random_state(2, &mut rng);
        let a = state.sample(shots, seed).unwrap();
        let b = state.sample(shots, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn twos_complement_round_trips(v in -128i64..128) {
        let m = 8usize;
        let raw = v.rem_euclid(1 << m) as u64;
        prop_assert_eq!(dict::decode_value(raw, m).unwrap().signed, v);
    }
}

fn random_state<R: RngCore>(num_qubits: usize, rng: &mut R) -> QuantumState {
    let dim = 1 << num_qubits;
    let mut amps: Vec<Complex> = (0..dim)
        .map(|_| {
            let re = (rng.next_u64() % 2000) as f64 / 1000.0 - 1.0;
            let im = (rng.next_u64() % 2000) as f64 / 1000.0 - 1.0;
            Complex::new(re, im)
        })
        .collect();
    let norm = norm_sqr(&amps).sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::from_amplitudes(amps).unwrap()
}

fn random_f64<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn integer_geometric_sequences_decode_to_indicators() {
    for n in 1..=64usize {
        for p in 0..n as u64 {
            let scale = 1.0 / (n as f64).sqrt();
            let seq: Vec<Complex> = geometric_sequence(p as f64, n)
                .unwrap()
                .iter()
                .map(|v| v * scale)
                .collect();
            let out = dft(&seq, KernelSign::Minus).unwrap();
            for (k, v) in out.iter().enumerate() {
                if k as u64 == p {
                    assert!((v.norm() - 1.0).abs() < ALGEBRAIC_TOL, "n={n} p={p}");
                } else {
                    assert!(v.norm() < ALGEBRAIC_TOL, "n={n} p={p} k={k}");
                }
            }
        }
    }
}

#[test]
fn fejer_kernel_is_a_probability_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let n = 16usize;
    for _ in 0..1000 {
        let p = random_f64(&mut rng) * n as f64;
        let total: f64 = (0..n).map(|k| fejer_probability(p, k, n).unwrap()).sum();
        assert!((total - 1.0).abs() < ALGEBRAIC_TOL, "p={p}");
    }
}

#[test]
fn fejer_kernel_equals_the_decoded_geometric_sequence() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    for n in [4usize, 8, 16] {
        for _ in 0..50 {
            let p = random_f64(&mut rng) * n as f64;
            let scale = 1.0 / (n as f64).sqrt();
            let seq: Vec<Complex> = geometric_sequence(p, n)
                .unwrap()
                .iter()
                .map(|v| v * scale)
                .collect();
            let decoded = dft(&seq, KernelSign::Minus).unwrap();
            for (k, v) in decoded.iter().enumerate() {
                let want = fejer_probability(p, k, n).unwrap();
                assert!(
                    (v.norm_sqr() - want).abs() < ALGEBRAIC_TOL,
                    "n={n} p={p} k={k}"
                );
            }
        }
    }
}

#[test]
fn marginal_over_all_qubits_is_the_joint_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..20 {
        let state = random_state(4, &mut rng);
        let layout = RegisterLayout::new(4).with_register("all", 0, 4).unwrap();
        let joint = state.probabilities();
        let marginal = joint.marginal(&layout, "all").unwrap();
        assert_eq!(joint, marginal);
    }
}

#[test]
fn grover_matches_the_rotation_law_across_widths() {
    for width in 1..=5usize {
        let n = 1u64 << width;
        for marked in 1..=n {
            let labels: Vec<u64> = (0..marked).collect();
            let spec = OracleSpec::explicit_set(labels.clone(), "key");
            for k in 0..=10usize {
                // Closed-form rotation law, computed independently.
                let expected = grover_success_probability(marked as f64 / n as f64, k);
                let hist = grover_search(&spec, width, k).unwrap();
                let good: f64 = labels.iter().map(|&l| hist.probability(l)).sum();
                assert!(
                    (good - expected).abs() < ALGEBRAIC_TOL,
                    "width={width} marked={marked} k={k}: {good} vs {expected}"
                );
            }
        }
    }
}

#[test]
fn uniform_counting_matches_brute_force_enumeration() {
    for width in 1..=4usize {
        let control = width + 2;
        let n = 1u64 << width;

        // Parity oracles.
        for even in [true, false] {
            let spec = OracleSpec::parity(even, "key");
            let brute = (0..n).filter(|v| (v & 1 == 0) == even).count() as u64;
            let result = quantum_count_uniform(&spec, width, control).unwrap();
            assert_eq!(
                result.estimated_count, brute,
                "parity even={even} width={width}"
            );
        }

        // A handful of seeded explicit sets per width.
        let mut rng = ChaCha8Rng::seed_from_u64(404 + width as u64);
        for _ in 0..4 {
            let mut labels: Vec<u64> = (0..n).filter(|_| rng.next_u64() % 2 == 0).collect();
            if labels.is_empty() {
                labels.push(rng.next_u64() % n);
            }
            let brute = labels.len() as u64;
            let spec = OracleSpec::explicit_set(labels, "key");
            let result = quantum_count_uniform(&spec, width, control).unwrap();
            assert_eq!(result.estimated_count, brute, "set width={width}");
        }
    }
}

#[test]
fn dictionary_support_is_exactly_the_encoded_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    for _ in 0..12 {
        let n = 1 + (rng.next_u64() % 3) as usize;
        let m = 4 + (rng.next_u64() % 3) as usize;
        let spec = DictionarySpec::new(n, m).unwrap();
        let half = 1i64 << (m - 1);
        let values: Vec<i64> = (0..spec.num_keys())
            .map(|_| (rng.next_u64() % (1 << m)) as i64 - half)
            .collect();
        let source = EncodingSource::CompleteTable { values };
        let circuit = dict::encode(&spec, &source).unwrap();
        let hist = circuit
            .run_from_default()
            .unwrap()
            .probabilities()
            .marginal_bits(0, n + m);
        for key in 0..spec.num_keys() {
            let value = source.evaluate(key, n).rem_euclid(1 << m) as u64;
            let p = hist.probability(key | value << n);
            assert!(
                (p - 1.0 / spec.num_keys() as f64).abs() < ALGEBRAIC_TOL,
                "n={n} m={m} key={key}"
            );
        }
    }
}

#[test]
fn partial_encoding_matches_classical_subset_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(406);
    for len in 1..=4usize {
        for _ in 0..4 {
            let inputs: Vec<i64> = (0..len).map(|_| (rng.next_u64() % 9) as i64 - 4).collect();
            let m = 6;
            let spec = DictionarySpec::new(len, m).unwrap();
            let circuit = dict::encode_sum_inputs(&spec, &inputs).unwrap();
            let hist = circuit
                .run_from_default()
                .unwrap()
                .probabilities()
                .marginal_bits(0, len + m);
            for key in 0..spec.num_keys() {
                let sum: i64 = (0..len)
                    .filter(|t| key >> t & 1 == 1)
                    .map(|t| inputs[t])
                    .sum();
                let value = sum.rem_euclid(1 << m) as u64;
                let p = hist.probability(key | value << len);
                assert!(
                    (p - 1.0 / spec.num_keys() as f64).abs() < ALGEBRAIC_TOL,
                    "inputs={inputs:?} key={key}"
                );
            }
        }
    }
}

fn random_polynomial<R: RngCore>(n: usize, rng: &mut R) -> QuadraticPolynomial {
    let coeff = |rng: &mut R| (rng.next_u64() % 17) as i64 - 8;
    let linear: Vec<i64> = (0..n).map(|_| coeff(rng)).collect();
    let mut quadratic = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            quadratic.push((i, j, coeff(rng)));
        }
    }
    QuadraticPolynomial::new(0, linear, quadratic)
}

/// Value width covering the polynomial's range with room for every shift
/// used by the inequality workflows.
fn width_for(lo: i64, hi: i64) -> usize {
    let span = (hi - lo).unsigned_abs().max(1);
    let mut m = 2;
    while (1u64 << (m - 1)) <= span || -(1i64 << (m - 1)) > lo || hi >= (1i64 << (m - 1)) {
        m += 1;
    }
    m
}

#[test]
fn value_counting_matches_brute_force_on_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(407);
    for case in 0..50 {
        let n = 1 + case % 3;
        let control = n + 2;
        let poly = random_polynomial(n, &mut rng);
        let values: Vec<i64> = (0..1u64 << n).map(|k| poly.evaluate(k)).collect();
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        let spec = DictionarySpec::new(n, width_for(lo, hi)).unwrap();
        let source = EncodingSource::Polynomial(poly);

        // Equality count against a value drawn from the reachable set.
        let target = values[(rng.next_u64() % values.len() as u64) as usize];
        let brute_eq = values.iter().filter(|&&v| v == target).count() as u64;
        let result = count_value_eq(&spec, &source, target, control).unwrap();
        assert_eq!(
            result.estimated_count, brute_eq,
            "case {case} eq target {target}"
        );

        // Inequality count against a threshold inside the range.
        let threshold = lo + ((rng.next_u64() % (hi - lo + 1) as u64) as i64);
        let brute_lt = values.iter().filter(|&&v| v < threshold).count() as u64;
        let result = count_value_lt(&spec, &source, threshold, control).unwrap();
        assert_eq!(
            result.estimated_count, brute_lt,
            "case {case} lt threshold {threshold}"
        );
    }
}

#[test]
fn distribution_marginal_equals_the_rounded_allocation() {
    let mut rng = ChaCha8Rng::seed_from_u64(408);
    for _ in 0..8 {
        let n = 3usize;
        let m = 3usize;
        let spec = DictionarySpec::new(n, m).unwrap();
        let count = 2 + (rng.next_u64() % 5) as usize;
        let mut weights: Vec<f64> = (0..count).map(|_| random_f64(&mut rng) + 0.05).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let masses: Vec<(u64, f64)> = weights
            .iter()
            .enumerate()
            .map(|(v, &p)| (v as u64, p))
            .collect();
        let allocation = allocate_keys(&masses, spec.num_keys()).unwrap();
        let circuit = dict::encode_distribution(&spec, &masses).unwrap();
        let hist = circuit
            .run_from_default()
            .unwrap()
            .probabilities()
            .marginal_bits(n, m);
        for (&(v, _), &keys) in masses.iter().zip(&allocation) {
            let want = keys as f64 / spec.num_keys() as f64;
            assert!(
                (hist.probability(v) - want).abs() < ALGEBRAIC_TOL,
                "value {v}: {} vs {want}",
                hist.probability(v)
            );
        }
    }
}
