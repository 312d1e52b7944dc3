//! Experiment engine: expands a spec into (d, p, method, trial) cells,
//! decodes each trial under a derived seed, and aggregates per-cell
//! statistics. Trials are independent, so they run on a bounded worker
//! pool; row order and content depend only on the spec and master seed.

use super::config::{ExperimentKind, ExperimentSpec};
use super::records::{trial_seed, ResultRecord};
use crate::anneal::AnnealConfig;
use crate::decode::{decode, DecodeOutcome, Method};
use crate::lattice::{build_lattice, extract_syndrome, sample_errors, CodeLattice, ErrorPattern, Syndrome};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Aggregated statistics for one (d, p, method) cell.
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub d: usize,
    pub n_d: usize,
    pub p: f64,
    pub method: Method,
    pub trials: u64,
    pub syndrome_rate: f64,
    /// Fraction of trials whose residual was logical or open, with its
    /// binomial standard error.
    pub logical_rate: f64,
    pub logical_se: f64,
    pub proxy_rate: f64,
    pub proxy_se: f64,
    pub mean_iterations: f64,
    /// Mean iterations split by whether the trial reached the proxy
    /// criterion; None when the split is empty.
    pub mean_iterations_proxy: Option<f64>,
    pub mean_iterations_excited: Option<f64>,
}

fn run_single(
    lat: &CodeLattice,
    spec: &ExperimentSpec,
    d: usize,
    p: f64,
    method: Method,
    trial: u64,
) -> Result<(ResultRecord, DecodeOutcome, ErrorPattern, Syndrome)> {
    let seed = trial_seed(spec.seed, d, p, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let actual = sample_errors(lat, p, &mut rng)?;
    let s = extract_syndrome(lat, &actual)?;
    let mut cfg: AnnealConfig = spec.anneal.clone();
    cfg.seed = seed;
    let out = decode(lat, &s, method, Some(&actual), &spec.weights, &cfg)?;
    let record = ResultRecord {
        d,
        n_d: lat.n_data,
        p,
        method,
        trial,
        seed,
        syndrome_satisfied: out.syndrome_satisfied,
        logical_error: out.logical_error,
        ground_state_proxy: out.ground_state_proxy,
        iterations: out.iterations,
        energy: out.energy,
    };
    Ok((record, out, actual, s))
}

/// Run every cell of the spec and return rows ordered by
/// (d, p, method, trial).
pub fn run_trials(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    spec.validate()?;
    let mut lattices = BTreeMap::new();
    for &d in &spec.distances {
        lattices.entry(d).or_insert(build_lattice(d)?);
    }

    let mut tasks = Vec::new();
    for &d in &spec.distances {
        for &p in &spec.error_rates {
            for &method in &spec.methods {
                for trial in 0..spec.trials {
                    tasks.push((d, p, method, trial));
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidParameter { name: "workers", reason: e.to_string() })?;
    pool.install(|| {
        tasks
            .par_iter()
            .map(|&(d, p, method, trial)| {
                run_single(&lattices[&d], spec, d, p, method, trial).map(|(record, ..)| record)
            })
            .collect()
    })
}

fn expect_kind(spec: &ExperimentSpec, kind: ExperimentKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "experiment",
            reason: format!("config declares {:?}, expected {:?}", spec.kind.as_str(), kind.as_str()),
        })
    }
}

/// Decoder effort vs problem size: per-trial iteration counts for a grid
/// of distances and error rates.
pub fn run_scaling(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    expect_kind(spec, ExperimentKind::Scaling)?;
    run_trials(spec)
}

/// Logical error rates over an error-rate sweep for threshold bracketing.
pub fn run_threshold(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    expect_kind(spec, ExperimentKind::Threshold)?;
    run_trials(spec)
}

/// Ground-state-proxy statistics per cell.
pub fn run_ground_state_stats(spec: &ExperimentSpec) -> Result<Vec<ResultRecord>> {
    expect_kind(spec, ExperimentKind::GroundStats)?;
    run_trials(spec)
}

/// Instance-level artifacts of a demo run, for rendering.
#[derive(Debug, Clone)]
pub struct DemoArtifacts {
    pub d: usize,
    pub p: f64,
    pub actual: ErrorPattern,
    pub syndrome: Syndrome,
    pub estimates: Vec<(Method, ErrorPattern)>,
}

/// Decode one sampled instance with every configured method. Records cover
/// all trials; the artifacts describe trial 0.
pub fn run_demo(spec: &ExperimentSpec) -> Result<(Vec<ResultRecord>, DemoArtifacts)> {
    expect_kind(spec, ExperimentKind::Demo)?;
    spec.validate()?;
    if spec.distances.len() != 1 || spec.error_rates.len() != 1 {
        return Err(Error::InvalidParameter {
            name: "experiment",
            reason: "demo takes exactly one distance and one error rate".into(),
        });
    }
    let (d, p) = (spec.distances[0], spec.error_rates[0]);
    let lat = build_lattice(d)?;

    let mut records = Vec::new();
    let mut artifacts = DemoArtifacts {
        d,
        p,
        actual: ErrorPattern::empty(lat.n_data),
        syndrome: Syndrome::trivial(lat.n_vertices),
        estimates: Vec::new(),
    };
    for &method in &spec.methods {
        for trial in 0..spec.trials {
            let (record, out, actual, s) = run_single(&lat, spec, d, p, method, trial)?;
            if trial == 0 {
                artifacts.actual = actual;
                artifacts.syndrome = s;
                artifacts.estimates.push((method, out.estimate.clone()));
            }
            records.push(record);
        }
    }
    // Match the canonical (d, p, method, trial) row order.
    records.sort_by_key(|r| (r.method, r.trial));
    Ok((records, artifacts))
}

/// Collapse rows into per-cell summaries, ordered by (d, p, method).
pub fn summarize(records: &[ResultRecord]) -> Vec<CellSummary> {
    let mut cells: BTreeMap<(usize, u64, Method), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.d, r.p.to_bits(), r.method)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((d, p_bits, method), rows)| {
            let n = rows.len() as f64;
            let frac = |f: &dyn Fn(&ResultRecord) -> bool| {
                rows.iter().filter(|r| f(r)).count() as f64 / n
            };
            let se = |r: f64| (r * (1.0 - r) / n).sqrt();
            let logical_rate = frac(&|r| r.logical_error);
            let proxy_rate = frac(&|r| r.ground_state_proxy);
            let mean = |rows: &[&ResultRecord]| {
                if rows.is_empty() {
                    None
                } else {
                    Some(rows.iter().map(|r| r.iterations as f64).sum::<f64>() / rows.len() as f64)
                }
            };
            let proxy_rows: Vec<&ResultRecord> =
                rows.iter().copied().filter(|r| r.ground_state_proxy).collect();
            let excited_rows: Vec<&ResultRecord> =
                rows.iter().copied().filter(|r| !r.ground_state_proxy).collect();
            CellSummary {
                d,
                n_d: rows[0].n_d,
                p: f64::from_bits(p_bits),
                method,
                trials: rows.len() as u64,
                syndrome_rate: frac(&|r| r.syndrome_satisfied),
                logical_rate,
                logical_se: se(logical_rate),
                proxy_rate,
                proxy_se: se(proxy_rate),
                mean_iterations: mean(&rows).unwrap_or(0.0),
                mean_iterations_proxy: mean(&proxy_rows),
                mean_iterations_excited: mean(&excited_rows),
            }
        })
        .collect()
}

/// Mean iterations vs problem size for one (method, p) series, suitable
/// for a log-log fit.
pub fn scaling_points(cells: &[CellSummary], method: Method, p: f64) -> Vec<(f64, f64)> {
    cells
        .iter()
        .filter(|c| c.method == method && c.p == p)
        .map(|c| (c.n_d as f64, c.mean_iterations))
        .collect()
}

/// Bracket the threshold: the consecutive error rates where the logical
/// error curves of the smallest and largest distance change order. Below
/// threshold larger distances do better; above they do worse.
pub fn threshold_bracket(cells: &[CellSummary], method: Method) -> Option<(f64, f64)> {
    let ds: Vec<usize> = {
        let mut v: Vec<usize> =
            cells.iter().filter(|c| c.method == method).map(|c| c.d).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (&d_lo, &d_hi) = (ds.first()?, ds.last()?);
    if d_lo == d_hi {
        return None;
    }
    let rate = |d: usize, p: f64| {
        cells
            .iter()
            .find(|c| c.method == method && c.d == d && c.p == p)
            .map(|c| c.logical_rate)
    };
    let mut ps: Vec<f64> = cells
        .iter()
        .filter(|c| c.method == method && c.d == d_lo)
        .map(|c| c.p)
        .collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let mut prev: Option<(f64, f64)> = None;
    for &p in &ps {
        let diff = rate(d_hi, p)? - rate(d_lo, p)?;
        if let Some((p_prev, diff_prev)) = prev {
            if diff_prev < 0.0 && diff >= 0.0 {
                return Some((p_prev, p));
            }
        }
        prev = Some((p, diff));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::records::records_to_csv;

    fn spec_text(kind: &str, extra: &str) -> String {
        format!("schema_version = 1\nexperiment = {kind}\n{extra}")
    }

    fn parse(kind: &str, extra: &str) -> ExperimentSpec {
        ExperimentSpec::from_text(&spec_text(kind, extra)).unwrap()
    }

    #[test]
    fn rows_are_ordered_and_deterministic() {
        let extra = "distances = 2, 3\nerror_rates = 0.1\ntrials = 3\nmethods = mwpm, sa\n\
                     max_iterations = 5000\nreplicas = 4\nseed = 5\n";
        let spec = parse("scaling", extra);
        let rows = run_scaling(&spec).unwrap();
        // 2 distances, 1 rate, 2 methods, 3 trials.
        assert_eq!(rows.len(), 12);
        let keys: Vec<_> = rows.iter().map(|r| (r.d, r.p.to_bits(), r.method, r.trial)).collect();
        let mut expected = Vec::new();
        for d in [2usize, 3] {
            for method in [Method::Mwpm, Method::Sa] {
                for trial in 0..3u64 {
                    expected.push((d, 0.1f64.to_bits(), method, trial));
                }
            }
        }
        assert_eq!(keys, expected, "rows follow (d, p, method, trial) order");

        let again = run_scaling(&spec).unwrap();
        assert_eq!(records_to_csv(&rows), records_to_csv(&again));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let extra = "distances = 2, 3\nerror_rates = 0.05, 0.15\ntrials = 4\n\
                     methods = da, mwpm\nmax_iterations = 5000\nreplicas = 4\nseed = 9\n";
        let mut spec = parse("scaling", extra);
        spec.workers = 1;
        let one = run_trials(&spec).unwrap();
        spec.workers = 4;
        let four = run_trials(&spec).unwrap();
        assert_eq!(records_to_csv(&one), records_to_csv(&four));
    }

    #[test]
    fn zero_rate_trials_finish_at_start() {
        let extra = "distances = 3\nerror_rates = 0.0\ntrials = 3\nmethods = da, sa\n\
                     max_iterations = 2000\nreplicas = 4\nseed = 1\n";
        let rows = run_trials(&parse("scaling", extra)).unwrap();
        for r in &rows {
            assert_eq!(r.iterations, 0, "empty problem is optimal at the start");
            assert!(r.syndrome_satisfied);
            assert!(!r.logical_error);
            assert!(r.ground_state_proxy);
        }
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let extra = "distances = 3\nerror_rates = 0.05\nmethods = mwpm\n";
        let spec = parse("scaling", extra);
        assert!(run_threshold(&spec).is_err());
        assert!(run_ground_state_stats(&spec).is_err());
    }

    #[test]
    fn rows_recompute_from_their_seed() {
        let extra = "distances = 3\nerror_rates = 0.12\ntrials = 5\nmethods = mwpm\nseed = 31\n";
        let spec = parse("scaling", extra);
        let rows = run_trials(&spec).unwrap();
        let lat = build_lattice(3).unwrap();
        for r in &rows {
            // Reconstruct the trial from the row's seed alone.
            let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
            let actual = sample_errors(&lat, r.p, &mut rng).unwrap();
            let s = extract_syndrome(&lat, &actual).unwrap();
            let mut cfg = spec.anneal.clone();
            cfg.seed = r.seed;
            let out = decode(&lat, &s, r.method, Some(&actual), &spec.weights, &cfg).unwrap();
            assert_eq!(out.syndrome_satisfied, r.syndrome_satisfied);
            assert_eq!(out.logical_error, r.logical_error);
            assert_eq!(out.iterations, r.iterations);
            assert_eq!(out.energy, r.energy);
        }
    }

    #[test]
    fn summaries_count_correctly() {
        let mut rows = Vec::new();
        for trial in 0..8u64 {
            rows.push(ResultRecord {
                d: 3,
                n_d: 13,
                p: 0.1,
                method: Method::Mwpm,
                trial,
                seed: trial,
                syndrome_satisfied: true,
                logical_error: trial < 2,
                ground_state_proxy: trial % 2 == 0,
                iterations: 10 * (trial + 1),
                energy: 0,
            });
        }
        let cells = summarize(&rows);
        assert_eq!(cells.len(), 1);
        let c = &cells[0];
        assert_eq!(c.trials, 8);
        assert_eq!(c.logical_rate, 0.25);
        assert!((c.logical_se - (0.25f64 * 0.75 / 8.0).sqrt()).abs() < 1e-12);
        assert_eq!(c.proxy_rate, 0.5);
        assert_eq!(c.mean_iterations, 45.0);
        assert_eq!(c.mean_iterations_proxy, Some(40.0));
        assert_eq!(c.mean_iterations_excited, Some(50.0));
    }

    #[test]
    fn bracket_found_where_curves_cross() {
        let mk = |d: usize, p: f64, rate: f64| CellSummary {
            d,
            n_d: d * d + (d - 1) * (d - 1),
            p,
            method: Method::Da,
            trials: 100,
            syndrome_rate: 1.0,
            logical_rate: rate,
            logical_se: 0.0,
            proxy_rate: 1.0,
            proxy_se: 0.0,
            mean_iterations: 1.0,
            mean_iterations_proxy: None,
            mean_iterations_excited: None,
        };
        let mut cells = Vec::new();
        for &(p, lo, hi) in &[(0.08, 0.10, 0.05), (0.09, 0.15, 0.12), (0.10, 0.20, 0.24)] {
            cells.push(mk(5, p, lo));
            cells.push(mk(11, p, hi));
        }
        assert_eq!(threshold_bracket(&cells, Method::Da), Some((0.09, 0.10)));
        assert_eq!(threshold_bracket(&cells, Method::Sa), None);

        let below_only: Vec<CellSummary> =
            cells.iter().filter(|c| c.p < 0.095).cloned().collect();
        assert_eq!(threshold_bracket(&below_only, Method::Da), None);
    }
}
