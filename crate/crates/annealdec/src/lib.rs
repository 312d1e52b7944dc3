//! Decoding toolkit for the planar surface code.
//!
//! The pipeline: sample Pauli-Z errors on a distance-d planar lattice,
//! extract the X-stabilizer syndrome, encode "find a minimum-weight error
//! consistent with the syndrome" as a QUBO, and minimize it with a
//! digital-annealer-style engine (parallel trial, dynamic offset, replica
//! exchange). A single-flip simulated-annealing baseline and an exact
//! minimum-weight perfect-matching decoder are included for comparison,
//! along with a benchmark harness that drives scaling, threshold, and
//! ground-state experiments from config files and writes CSV/SVG output.

pub mod anneal;
pub mod bench;
pub mod decode;
pub mod lattice;
pub mod mwpm;
pub mod qubo;

pub use anneal::{local_delta, solve_da, solve_sa, AnnealConfig, Mode, SolveResult};
pub use decode::{
    classify_residual, decode, ground_state_oracle, ising_energy, DecodeOutcome, Method,
    ProblemWeights, ResidualClass,
};
pub use lattice::{build_lattice, extract_syndrome, logical_parity, sample_errors, CodeLattice, ErrorPattern, Syndrome};
pub use mwpm::{brute_force_matching, build_defect_graph, mwpm_decode, mwpm_solve, DefectGraph, MwpmSolution};
pub use qubo::{build_ising, evaluate, penalty_value, quadratize, IsingProblem, QuboProblem};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("code distance must be at least 2, got {0}")]
    InvalidDistance(usize),
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("length mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("instance too large for {what}: limit {limit}, got {actual}")]
    TooLarge {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("config error (line {line}): {reason}")]
    Config { line: usize, reason: String },
    #[error("fit error: {0}")]
    Fit(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
