//! Python bindings for the surface-code decoder toolkit. Errors are lists
//! of flipped qubit indices and syndromes are lists of defect vertices, so
//! everything crossing the boundary is a plain list, tuple, or scalar.
//!
//! Build the importable shared object with
//! `cargo build -p annealdec-py --release --features extension-module`
//! and load `libannealdec_py.so` as the module `annealdec_py`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use annealdec::{
    build_defect_graph, build_ising, build_lattice, decode as decode_rs, ground_state_oracle,
    mwpm_solve, quadratize, AnnealConfig, CodeLattice, ErrorPattern, Method, Mode,
    ProblemWeights, Syndrome,
};

fn err(e: annealdec::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Rotated planar code lattice of odd or even distance `d`.
#[pyclass(frozen)]
struct Lattice {
    inner: CodeLattice,
}

#[pymethods]
impl Lattice {
    #[new]
    fn new(d: usize) -> PyResult<Self> {
        Ok(Lattice { inner: build_lattice(d).map_err(err)? })
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn n_data(&self) -> usize {
        self.inner.n_data
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices
    }

    #[getter]
    fn logical_support(&self) -> Vec<usize> {
        self.inner.logical_support.clone()
    }

    #[getter]
    fn detector_support(&self) -> Vec<usize> {
        self.inner.detector_support.clone()
    }

    fn qubit_position(&self, q: usize) -> PyResult<(f64, f64)> {
        if q >= self.inner.n_data {
            return Err(PyValueError::new_err(format!("qubit index {q} out of range")));
        }
        Ok(self.inner.qubit_position(q))
    }

    fn vertex_position(&self, v: usize) -> PyResult<(f64, f64)> {
        if v >= self.inner.n_vertices {
            return Err(PyValueError::new_err(format!("vertex index {v} out of range")));
        }
        Ok(self.inner.vertex_position(v))
    }

    fn vertex_support(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n_vertices {
            return Err(PyValueError::new_err(format!("vertex index {v} out of range")));
        }
        Ok(self.inner.vertex_support[v].clone())
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(d={}, n_data={}, n_vertices={})",
            self.inner.d, self.inner.n_data, self.inner.n_vertices
        )
    }
}

/// Outcome of a single decode call.
#[pyclass(frozen, get_all)]
struct DecodeResult {
    estimate: Vec<usize>,
    syndrome_satisfied: bool,
    logical_error: bool,
    ground_state_proxy: bool,
    energy: i64,
    iterations: u64,
}

#[pymethods]
impl DecodeResult {
    fn __repr__(&self) -> String {
        let py_bool = |b: bool| if b { "True" } else { "False" };
        format!(
            "DecodeResult(weight={}, syndrome_satisfied={}, logical_error={}, \
             ground_state_proxy={}, energy={}, iterations={})",
            self.estimate.len(),
            py_bool(self.syndrome_satisfied),
            py_bool(self.logical_error),
            py_bool(self.ground_state_proxy),
            self.energy,
            self.iterations
        )
    }
}

fn pattern_from(lat: &CodeLattice, indices: &[usize]) -> PyResult<ErrorPattern> {
    if let Some(&q) = indices.iter().find(|&&q| q >= lat.n_data) {
        return Err(PyValueError::new_err(format!("qubit index {q} out of range")));
    }
    Ok(ErrorPattern::from_indices(lat.n_data, indices))
}

fn syndrome_from(lat: &CodeLattice, defects: &[usize]) -> PyResult<Syndrome> {
    let mut s = Syndrome::trivial(lat.n_vertices);
    for &v in defects {
        if v >= lat.n_vertices {
            return Err(PyValueError::new_err(format!("vertex index {v} out of range")));
        }
        s.values[v] = -1;
    }
    Ok(s)
}

/// Flip each qubit independently with probability `p`; returns the flipped
/// qubit indices. The same seed always gives the same pattern.
#[pyfunction]
fn sample_errors(lat: PyRef<'_, Lattice>, p: f64, seed: u64) -> PyResult<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = annealdec::sample_errors(&lat.inner, p, &mut rng).map_err(err)?;
    Ok((0..lat.inner.n_data).filter(|&q| e.bits[q]).collect())
}

/// Defect vertices of an error given as flipped qubit indices.
#[pyfunction]
fn extract_syndrome(lat: PyRef<'_, Lattice>, error: Vec<usize>) -> PyResult<Vec<usize>> {
    let e = pattern_from(&lat.inner, &error)?;
    Ok(annealdec::extract_syndrome(&lat.inner, &e).map_err(err)?.defects())
}

/// Parity of crossings between an error and the logical operator column.
#[pyfunction]
fn logical_parity(lat: PyRef<'_, Lattice>, error: Vec<usize>) -> PyResult<u8> {
    let e = pattern_from(&lat.inner, &error)?;
    annealdec::logical_parity(&lat.inner, &e).map_err(err)
}

/// Decode a syndrome (defect vertex list) with "da", "sa", or "mwpm".
/// Passing the actual error fills the logical_error and ground_state_proxy
/// fields of the result.
#[pyfunction]
#[pyo3(signature = (lat, defects, method, actual = None, coupling = 1024, field = 1,
                    penalty = 8192, replicas = 128, t_max = 5.0, t_min = 0.1,
                    max_iterations = 1_000_000, exchange_interval = 20,
                    offset_increment = 1, stall_iterations = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn decode(
    lat: PyRef<'_, Lattice>,
    defects: Vec<usize>,
    method: &str,
    actual: Option<Vec<usize>>,
    coupling: i64,
    field: i64,
    penalty: i64,
    replicas: usize,
    t_max: f64,
    t_min: f64,
    max_iterations: u64,
    exchange_interval: u64,
    offset_increment: i64,
    stall_iterations: Option<u64>,
    seed: u64,
) -> PyResult<DecodeResult> {
    let method: Method = method.parse().map_err(err)?;
    let s = syndrome_from(&lat.inner, &defects)?;
    let actual = match actual {
        Some(indices) => Some(pattern_from(&lat.inner, &indices)?),
        None => None,
    };
    let weights = ProblemWeights { coupling, field, penalty };
    let cfg = AnnealConfig {
        mode: Mode::DaReplicaExchange,
        replicas,
        t_max,
        t_min,
        max_iterations,
        exchange_interval,
        offset_increment,
        stall_iterations,
        seed,
    };
    let out =
        decode_rs(&lat.inner, &s, method, actual.as_ref(), &weights, &cfg).map_err(err)?;
    Ok(DecodeResult {
        estimate: (0..lat.inner.n_data).filter(|&q| out.estimate.bits[q]).collect(),
        syndrome_satisfied: out.syndrome_satisfied,
        logical_error: out.logical_error,
        ground_state_proxy: out.ground_state_proxy,
        energy: out.energy,
        iterations: out.iterations,
    })
}

/// Minimum correction weight over all syndrome-consistent error patterns,
/// by exhaustive enumeration. Only small lattices are feasible.
#[pyfunction]
fn minimum_weight(lat: PyRef<'_, Lattice>, defects: Vec<usize>) -> PyResult<usize> {
    let s = syndrome_from(&lat.inner, &defects)?;
    ground_state_oracle(&lat.inner, &s).map_err(err)
}

/// Total weight plus one (defect, partner) tuple per defect; the partner is
/// None for a boundary match.
type MatchingPairs = (i64, Vec<(usize, Option<usize>)>);

/// Matching weight and the matched defect pairs for a syndrome.
#[pyfunction]
fn matching_pairs(lat: PyRef<'_, Lattice>, defects: Vec<usize>) -> PyResult<MatchingPairs> {
    let s = syndrome_from(&lat.inner, &defects)?;
    let g = build_defect_graph(&lat.inner, &s).map_err(err)?;
    let sol = mwpm_solve(&g);
    let pairs = sol.pairs.iter().enumerate().map(|(k, &l)| (k, l)).collect();
    Ok((sol.weight, pairs))
}

/// Serialize the quadratized decoding problem for a syndrome in the sparse
/// text format used by the CLI.
#[pyfunction]
#[pyo3(signature = (lat, defects, coupling = 1024, field = 1, penalty = 8192))]
fn qubo_sparse_text(
    lat: PyRef<'_, Lattice>,
    defects: Vec<usize>,
    coupling: i64,
    field: i64,
    penalty: i64,
) -> PyResult<String> {
    let s = syndrome_from(&lat.inner, &defects)?;
    let ising = build_ising(&lat.inner, &s, coupling, field).map_err(err)?;
    Ok(quadratize(&ising, penalty).to_sparse_text())
}

/// Least-squares exponent and intercept of log(y) against log(x).
#[pyfunction]
fn fit_loglog_exponent(points: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    annealdec::bench::fit_loglog_exponent(&points).map_err(err)
}

/// Fit (c1, c2) in log P = log c1 + c2 * d_e * log(p / p_th) to
/// (distance, rate, P) cells.
#[pyfunction]
fn fit_power_law(cells: Vec<(usize, f64, f64)>, p_th: f64) -> PyResult<(f64, f64)> {
    annealdec::bench::fit_power_law(&cells, p_th).map_err(err)
}

#[pymodule]
fn annealdec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Lattice>()?;
    m.add_class::<DecodeResult>()?;
    m.add_function(wrap_pyfunction!(sample_errors, m)?)?;
    m.add_function(wrap_pyfunction!(extract_syndrome, m)?)?;
    m.add_function(wrap_pyfunction!(logical_parity, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(minimum_weight, m)?)?;
    m.add_function(wrap_pyfunction!(matching_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(qubo_sparse_text, m)?)?;
    m.add_function(wrap_pyfunction!(fit_loglog_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    Ok(())
}
