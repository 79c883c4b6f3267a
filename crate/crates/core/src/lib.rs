//! A self-contained statevector quantum-circuit simulator together with the
//! algorithm stack built on top of it: quantum Fourier transforms, phase
//! estimation, oracles, Grover search, quantum counting, and a quantum
//! dictionary that entangles a key register with a value register.
//!
//! The crate is organized in layers, each one testable against the one below:
//!
//! - [`math`] is the classical reference layer (complex sequences, roots of
//!   unity, direct discrete Fourier transforms, the Fejer kernel).
//! - [`state`] holds the dense statevector and the amplitude-pair transform
//!   that all gates reduce to, plus measurement sampling and histograms.
//! - [`circuit`] is the gate catalog and circuit algebra (inverse, controlled,
//!   repetition, QFT construction).
//! - [`algorithms`] implements phase estimation, phase oracles, the diffusion
//!   operator, Grover search, amplitude amplification, and quantum counting.
//! - [`dict`] implements the quantum dictionary: phase-kickback encoding of
//!   key/value associations, value lookup, value counting, and the QUBO,
//!   subset-sum, and Fibonacci workflows.
//!
//! Everything runs exactly (no noise model); sampled histograms are drawn
//! from the exact distribution with a seeded, versioned PRNG so runs are
//! reproducible bit for bit.

pub mod algorithms;
pub mod circuit;
pub mod dict;
pub mod math;
pub mod state;

/// Error type shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Largest register the dense simulator accepts. A 26-qubit state is 1 GiB
/// of double-precision amplitudes, which is the edge of desk-scale use.
pub const MAX_QUBITS: usize = 26;

/// Tolerance for algebraic identities (norms, unitarity, histogram sums).
pub const ALGEBRAIC_TOL: f64 = 1e-9;

/// Tolerance for scalar complex arithmetic.
pub const SCALAR_TOL: f64 = 1e-12;
