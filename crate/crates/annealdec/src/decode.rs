//! End-to-end decoding: syndrome in, correction out, residual classified.
//!
//! A correction is judged against the actual error (when known) by the
//! residual r = actual XOR estimate. If r still excites a stabilizer the
//! syndrome constraint is broken (open); otherwise r is a cycle and either
//! crosses the lattice an odd number of times (logical error) or is a
//! product of face stabilizers (trivial, harmless). The ground-state proxy
//! marks estimates that satisfy the syndrome at a weight no greater than
//! the actual error's, i.e. the solver reached one of the most likely
//! errors rather than an excited state.

use crate::anneal::{solve_da, solve_sa, AnnealConfig, Mode};
use crate::lattice::{extract_syndrome, logical_parity, CodeLattice, ErrorPattern, Syndrome};
use crate::mwpm::{build_defect_graph, mwpm_decode};
use crate::qubo::{build_ising, quadratize};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Da,
    Sa,
    Mwpm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Da => "da",
            Method::Sa => "sa",
            Method::Mwpm => "mwpm",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "da" => Ok(Method::Da),
            "sa" => Ok(Method::Sa),
            "mwpm" => Ok(Method::Mwpm),
            other => Err(Error::InvalidParameter {
                name: "method",
                reason: format!("expected da, sa, or mwpm, got {other:?}"),
            }),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualClass {
    /// Residual is a product of face stabilizers: correction succeeded.
    Trivial,
    /// Residual commutes with all stabilizers but flips the logical qubit.
    Logical,
    /// Residual still excites stabilizers: the syndrome constraint broke.
    Open,
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    /// Data-bit part of the solver's best assignment.
    pub estimate: ErrorPattern,
    pub syndrome_satisfied: bool,
    /// Residual class is logical or open. Requires the actual error.
    pub logical_error: bool,
    /// Syndrome satisfied at weight <= actual's weight. Requires the
    /// actual error.
    pub ground_state_proxy: bool,
    /// Solver's best energy; for the matching decoder, the Ising energy
    /// of the returned estimate (same scale).
    pub energy: i64,
    /// Iteration at which the best assignment was found (annealers) or
    /// edge scans performed (matching decoder).
    pub iterations: u64,
}

/// Coupling, field, and penalty weights defining the optimization problem.
#[derive(Debug, Clone, Copy)]
pub struct ProblemWeights {
    pub coupling: i64,
    pub field: i64,
    pub penalty: i64,
}

impl ProblemWeights {
    /// Survey values: J=1024, h=1, penalty 8J.
    pub fn benchmark() -> Self {
        ProblemWeights { coupling: 1024, field: 1, penalty: 8192 }
    }

    /// Demonstration values: J=4, h=1 (valid for chains up to length 7).
    pub fn demo() -> Self {
        ProblemWeights { coupling: 4, field: 1, penalty: 32 }
    }
}

/// Ising energy of a pattern given the syndrome, -J sum_v b_v prod(sigma)
/// minus h sum_q sigma_q. Equals the QUBO energy whenever the auxiliaries
/// are consistent, so annealer energies and matching energies are
/// comparable.
pub fn ising_energy(
    lat: &CodeLattice,
    s: &Syndrome,
    pattern: &ErrorPattern,
    weights: &ProblemWeights,
) -> Result<i64> {
    if pattern.bits.len() != lat.n_data {
        return Err(Error::DimensionMismatch { expected: lat.n_data, actual: pattern.bits.len() });
    }
    if s.values.len() != lat.n_vertices {
        return Err(Error::DimensionMismatch { expected: lat.n_vertices, actual: s.values.len() });
    }
    let mut e = 0i64;
    for (v, support) in lat.vertex_support.iter().enumerate() {
        let mut prod = s.values[v] as i64;
        for &q in support {
            if pattern.bits[q] {
                prod = -prod;
            }
        }
        e -= weights.coupling * prod;
    }
    for &b in &pattern.bits {
        e -= weights.field * if b { -1 } else { 1 };
    }
    Ok(e)
}

/// Decode a syndrome with the chosen method. The actual error, when known,
/// fills the residual-class and ground-state-proxy fields; without it both
/// report false. A broken syndrome constraint is reported in the outcome,
/// never retried.
pub fn decode(
    lat: &CodeLattice,
    s: &Syndrome,
    method: Method,
    actual: Option<&ErrorPattern>,
    weights: &ProblemWeights,
    cfg: &AnnealConfig,
) -> Result<DecodeOutcome> {
    let (estimate, energy, iterations) = match method {
        Method::Mwpm => {
            let g = build_defect_graph(lat, s)?;
            let (pattern, scans) = mwpm_decode(&g);
            let e = ising_energy(lat, s, &pattern, weights)?;
            (pattern, e, scans)
        }
        Method::Da | Method::Sa => {
            let ising = build_ising(lat, s, weights.coupling, weights.field)?;
            let q = quadratize(&ising, weights.penalty);
            let mut cfg = cfg.clone();
            cfg.mode = if method == Method::Da { Mode::DaReplicaExchange } else { Mode::Sa };
            let r = match cfg.mode {
                Mode::DaReplicaExchange => solve_da(&q, &cfg)?,
                Mode::Sa => solve_sa(&q, &cfg)?,
            };
            let bits = r.best_bits[..lat.n_data].to_vec();
            (ErrorPattern { bits }, r.best_energy, r.best_iteration)
        }
    };

    let syndrome_satisfied = extract_syndrome(lat, &estimate)? == *s;
    let (logical_error, ground_state_proxy) = match actual {
        Some(actual) => {
            let class = classify_residual(lat, actual, &estimate)?;
            let logical = class != ResidualClass::Trivial;
            let proxy = syndrome_satisfied && estimate.weight() <= actual.weight();
            (logical, proxy)
        }
        None => (false, false),
    };

    Ok(DecodeOutcome {
        estimate,
        syndrome_satisfied,
        logical_error,
        ground_state_proxy,
        energy,
        iterations,
    })
}

/// Classify the residual actual XOR estimate: open if it still excites a
/// stabilizer, else logical or trivial by crossing parity.
pub fn classify_residual(
    lat: &CodeLattice,
    actual: &ErrorPattern,
    estimate: &ErrorPattern,
) -> Result<ResidualClass> {
    let residual = actual.xor(estimate);
    let syndrome = extract_syndrome(lat, &residual)?;
    if !syndrome.is_trivial() {
        return Ok(ResidualClass::Open);
    }
    if logical_parity(lat, &residual)? == 1 {
        Ok(ResidualClass::Logical)
    } else {
        Ok(ResidualClass::Trivial)
    }
}

/// Exhaustive minimum error weight consistent with the syndrome. Only for
/// lattices with at most 16 data qubits (d <= 3).
pub fn ground_state_oracle(lat: &CodeLattice, s: &Syndrome) -> Result<usize> {
    if lat.n_data > 16 {
        return Err(Error::TooLarge {
            what: "exhaustive ground-state search",
            limit: 16,
            actual: lat.n_data,
        });
    }
    if s.values.len() != lat.n_vertices {
        return Err(Error::DimensionMismatch { expected: lat.n_vertices, actual: s.values.len() });
    }
    // Precompute each vertex's incidence mask; a pattern matches the
    // syndrome iff every defect vertex has odd overlap and others even.
    let mut masks = vec![0u32; lat.n_vertices];
    for (v, support) in lat.vertex_support.iter().enumerate() {
        for &q in support {
            masks[v] |= 1 << q;
        }
    }
    let mut best: Option<u32> = None;
    for bits in 0u32..1 << lat.n_data {
        let w = bits.count_ones();
        if best.is_some_and(|b| w >= b) {
            continue;
        }
        let ok = masks
            .iter()
            .zip(&s.values)
            .all(|(&m, &val)| ((bits & m).count_ones() % 2 == 1) == (val == -1));
        if ok {
            best = Some(w);
        }
    }
    best.map(|w| w as usize).ok_or_else(|| Error::InvalidParameter {
        name: "syndrome",
        reason: "no error pattern reproduces it".into(),
    })
}
