//! Classical reference layer: roots of unity, inner products, direct
//! discrete Fourier transforms, and the Fejer kernel.
//!
//! Everything here is plain `O(N^2)` sequence arithmetic. The quantum layers
//! are tested against these functions, so they stay deliberately simple.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type Complex = Complex64;

/// Kernel sign of the discrete Fourier transform.
///
/// `Plus` uses positive powers of the base root of unity, `Minus` negative
/// powers. `Minus` is the decode direction: it maps the geometric sequence of
/// an integer parameter to the indicator sequence at that index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelSign {
    Plus,
    Minus,
}

impl KernelSign {
    fn factor(self) -> f64 {
        match self {
            KernelSign::Plus => 1.0,
            KernelSign::Minus => -1.0,
        }
    }
}

/// The `n`th roots of unity in order: element `k` is
/// `cos(2πk/n) + i sin(2πk/n)`.
pub fn roots_of_unity(n: usize) -> Result<Vec<Complex>> {
    if n == 0 {
        return Err(Error::invalid("roots_of_unity: n must be at least 1"));
    }
    Ok((0..n)
        .map(|k| Complex::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect())
}

/// Inner product `Σ x_k * conj(y_k)` of two equal-length sequences.
pub fn inner_product(x: &[Complex], y: &[Complex]) -> Result<Complex> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "inner_product: length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b.conj()).sum())
}

/// Geometric sequence `[1, λ, λ², …, λ^{N-1}]` of the unit complex number
/// `λ = exp(i p 2π/N)`, so element `k` has phase `k·p·2π/N`.
pub fn geometric_sequence(p: f64, n: usize) -> Result<Vec<Complex>> {
    if n == 0 {
        return Err(Error::invalid("geometric_sequence: n must be at least 1"));
    }
    Ok((0..n)
        .map(|k| Complex::from_polar(1.0, k as f64 * p * TAU / n as f64))
        .collect())
}

/// Direct discrete Fourier transform with unitary normalization:
/// output element `k` is `(1/√N) Σ_r seq_r · exp(sign · i 2π k r / N)`.
///
/// With [`KernelSign::Minus`] the transform sends `geometric_sequence(v, N)/√N`
/// for integer `v` to the indicator at index `v`. The two signs are exact
/// inverses of each other.
pub fn dft(seq: &[Complex], sign: KernelSign) -> Result<Vec<Complex>> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::invalid("dft: sequence must be non-empty"));
    }
    let norm = 1.0 / (n as f64).sqrt();
    let s = sign.factor();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = Complex::new(0.0, 0.0);
        for (r, v) in seq.iter().enumerate() {
            // exp(sign * i 2π k r / N); reduce k*r mod N to keep angles small
            let kr = (k * r) % n;
            acc += v * Complex::from_polar(1.0, s * TAU * kr as f64 / n as f64);
        }
        out.push(acc * norm);
    }
    Ok(out)
}

/// Cosine similarity of the parameter `p` against each of the `N` roots of
/// unity: entry `k` is `cos(p·2π/N − k·2π/N)`, the inner product of the two
/// unit vectors.
pub fn angle_similarity(p: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("angle_similarity: n must be at least 1"));
    }
    Ok((0..n)
        .map(|k| ((p - k as f64) * TAU / n as f64).cos())
        .collect())
}

/// Probability that phase estimation over `N` outcomes reports outcome `k`
/// when the hidden parameter is `p`: the normalized Fejer kernel
/// `(1/N²)(1 − cos(NΔ))/(1 − cos Δ)` with `Δ = 2π(p−k)/N`.
///
/// The kernel is periodic in `p − k` with period `N`; at the singular points
/// (`p − k` a multiple of `N`) the analytic limit `1` is returned. For fixed
/// `p` the values over `k = 0..N` sum to 1.
pub fn fejer_probability(p: f64, k: usize, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("fejer_probability: n must be at least 1"));
    }
    if k >= n {
        return Err(Error::invalid(format!(
            "fejer_probability: k = {k} out of range for n = {n}"
        )));
    }
    // Wrap the offset into [0, n) so parameters just below n resolve to
    // outcome 0 and the denominator singularity is caught in one place.
    let mut d = (p - k as f64) % n as f64;
    if d < 0.0 {
        d += n as f64;
    }
    let delta = TAU * d / n as f64;
    if delta.min(TAU - delta) < 1e-12 {
        return Ok(1.0);
    }
    // Evaluate as a ratio of sines; equal to (1-cos(NΔ))/(1-cos Δ) but stable
    // near the singular points.
    let ratio = ((n as f64) * delta / 2.0).sin() / (delta / 2.0).sin();
    Ok(ratio * ratio / (n as f64 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ALGEBRAIC_TOL, SCALAR_TOL};

    fn assert_close(a: Complex, b: Complex, tol: f64) {
        assert!(
            (a - b).norm() < tol,
            "expected {b}, got {a} (diff {})",
            (a - b).norm()
        );
    }

    #[test]
    fn roots_of_unity_n1_is_one() {
        let r = roots_of_unity(1).unwrap();
        assert_eq!(r.len(), 1);
        assert_close(r[0], Complex::new(1.0, 0.0), SCALAR_TOL);
    }

    #[test]
    fn roots_of_unity_n4_quarter_turns() {
        let r = roots_of_unity(4).unwrap();
        let expected = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 1.0),
            Complex::new(-1.0, 0.0),
            Complex::new(0.0, -1.0),
        ];
        for (a, b) in r.iter().zip(expected) {
            assert_close(*a, b, SCALAR_TOL);
        }
    }

    #[test]
    fn roots_of_unity_n8_first_nontrivial() {
        let r = roots_of_unity(8).unwrap();
        let c = std::f64::consts::FRAC_PI_4.cos();
        assert_close(r[1], Complex::new(c, c), SCALAR_TOL);
        for root in &r {
            assert!((root.norm() - 1.0).abs() < SCALAR_TOL);
        }
    }

    #[test]
    fn roots_of_unity_rejects_zero() {
        assert!(roots_of_unity(0).is_err());
    }

    #[test]
    fn inner_product_units_and_orthogonality() {
        let one = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        let zero = Complex::new(0.0, 0.0);
        assert_close(inner_product(&[one], &[one]).unwrap(), one, SCALAR_TOL);
        assert_close(inner_product(&[i], &[i]).unwrap(), one, SCALAR_TOL);
        assert_close(
            inner_product(&[one, zero], &[zero, one]).unwrap(),
            zero,
            SCALAR_TOL,
        );
        assert!(inner_product(&[one], &[one, one]).is_err());
    }

    #[test]
    fn geometric_sequence_integer_parameters() {
        let flat = geometric_sequence(0.0, 8).unwrap();
        for v in &flat {
            assert_close(*v, Complex::new(1.0, 0.0), SCALAR_TOL);
        }
        let base = geometric_sequence(1.0, 8).unwrap();
        let roots = roots_of_unity(8).unwrap();
        for (a, b) in base.iter().zip(&roots) {
            assert_close(*a, *b, SCALAR_TOL);
        }
    }

    #[test]
    fn geometric_sequence_fractional_phase() {
        let seq = geometric_sequence(5.7, 8).unwrap();
        let phase = seq[1].arg().rem_euclid(TAU);
        let expected = (5.7 * TAU / 8.0).rem_euclid(TAU);
        assert!((phase - expected).abs() < SCALAR_TOL);
    }

    #[test]
    fn dft_impulse_is_flat() {
        let impulse = [
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
        ];
        let out = dft(&impulse, KernelSign::Minus).unwrap();
        for v in &out {
            assert_close(*v, Complex::new(0.5, 0.0), ALGEBRAIC_TOL);
        }
    }

    #[test]
    fn dft_decodes_integer_geometric_sequence() {
        // Normalized geometric sequences of integer parameters decode to
        // exact indicators.
        let scale = 1.0 / 8f64.sqrt();
        let seq: Vec<Complex> = geometric_sequence(5.0, 8)
            .unwrap()
            .iter()
            .map(|v| v * scale)
            .collect();
        let out = dft(&seq, KernelSign::Minus).unwrap();
        for (k, v) in out.iter().enumerate() {
            if k == 5 {
                assert!((v.norm() - 1.0).abs() < ALGEBRAIC_TOL);
            } else {
                assert!(v.norm() < ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn dft_fractional_parameter_ranks_nearest_outcomes() {
        let seq = geometric_sequence(5.7, 8).unwrap();
        let out = dft(&seq, KernelSign::Minus).unwrap();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| out[b].norm().partial_cmp(&out[a].norm()).unwrap());
        assert_eq!(order[0], 6);
        assert_eq!(order[1], 5);
    }

    #[test]
    fn angle_similarity_examples() {
        let s = angle_similarity(3.0, 8).unwrap();
        assert!((s[3] - 1.0).abs() < SCALAR_TOL);

        let s = angle_similarity(5.7, 8).unwrap();
        let mut order: Vec<usize> = (0..8).collect();
        order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
        assert_eq!(order[0], 6);
        assert_eq!(order[1], 5);

        let s = angle_similarity(4.0, 8).unwrap();
        assert!((s[0] + 1.0).abs() < SCALAR_TOL);
    }

    #[test]
    fn fejer_integer_parameter_is_certain() {
        assert!((fejer_probability(5.0, 5, 8).unwrap() - 1.0).abs() < SCALAR_TOL);
        for k in 0..8 {
            if k != 5 {
                assert!(fejer_probability(5.0, k, 8).unwrap() < ALGEBRAIC_TOL);
            }
        }
    }

    #[test]
    fn fejer_halfway_parameter_splits_evenly() {
        let p5 = fejer_probability(5.5, 5, 8).unwrap();
        let p6 = fejer_probability(5.5, 6, 8).unwrap();
        assert!((p5 - p6).abs() < ALGEBRAIC_TOL);
    }

    #[test]
    fn fejer_5_7_ranks_six_then_five() {
        let probs: Vec<f64> = (0..8)
            .map(|k| fejer_probability(5.7, k, 8).unwrap())
            .collect();
        for (k, p) in probs.iter().enumerate() {
            if k != 6 {
                assert!(probs[6] > *p, "outcome 6 must dominate, k={k}");
            }
            if k != 5 && k != 6 {
                assert!(probs[5] > *p, "outcome 5 must be second, k={k}");
            }
        }
        // Spot magnitudes evaluated from the closed formula by hand.
        assert!((probs[6] - 0.7402).abs() < 1e-3);
        assert!((probs[5] - 0.1388).abs() < 1e-3);
    }

    #[test]
    fn fejer_wraps_near_the_top_of_the_range() {
        // A parameter just below N resolves to outcome 0.
        let p = fejer_probability(7.9999999, 0, 8).unwrap();
        assert!(p > 0.999);
    }
}
