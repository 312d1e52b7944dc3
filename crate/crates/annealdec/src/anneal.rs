//! QUBO solvers: a digital-annealer-style engine and a plain SA baseline.
//!
//! The DA-style engine runs a ladder of replicas at fixed temperatures,
//! geometric from t_min to t_max. One iteration advances every replica by a
//! parallel-trial step: the energy change of every single-bit flip is
//! examined, a flip is eligible if dE - E_off <= 0 or a Metropolis draw at
//! the replica temperature accepts it, and one eligible flip is applied
//! uniformly at random. When no flip is eligible the dynamic offset E_off
//! grows by a fixed increment; any applied flip resets it to zero. Adjacent
//! temperatures attempt a replica-exchange swap every exchange_interval
//! iterations.
//!
//! The SA baseline proposes one uniformly chosen bit per iteration under
//! geometric cooling from t_max to t_min.
//!
//! Both solvers start from the all-zero state, track the best energy seen
//! and the iteration of its last improvement, and are bit-reproducible for
//! a given seed at any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::qubo::{evaluate, QuboProblem};
use crate::{Error, Result};

/// Metropolis draws are skipped when -dE/T is below this: the acceptance
/// probability (< 1e-19) is beyond the resolution of a 53-bit uniform draw.
const LN_ACCEPT_CUTOFF: f64 = 45.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    DaReplicaExchange,
    Sa,
}

#[derive(Debug, Clone)]
pub struct AnnealConfig {
    pub mode: Mode,
    pub replicas: usize,
    pub t_max: f64,
    pub t_min: f64,
    pub max_iterations: u64,
    pub exchange_interval: u64,
    pub offset_increment: i64,
    /// Extra stopping rule: give up when this many iterations pass without
    /// a best-energy improvement. None runs to max_iterations.
    pub stall_iterations: Option<u64>,
    pub seed: u64,
}

impl AnnealConfig {
    /// Survey parameters: 128 replicas, temperatures 0.1..5.
    pub fn benchmark(seed: u64) -> Self {
        AnnealConfig {
            mode: Mode::DaReplicaExchange,
            replicas: 128,
            t_max: 5.0,
            t_min: 0.1,
            max_iterations: 1_000_000,
            exchange_interval: 20,
            offset_increment: 1,
            stall_iterations: None,
            seed,
        }
    }

    /// Demonstration parameters: hotter ladder for the small-J regime.
    pub fn demo(seed: u64) -> Self {
        AnnealConfig {
            t_max: 10.0,
            ..AnnealConfig::benchmark(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::InvalidParameter {
                name: "replicas",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.t_min > 0.0 && self.t_min <= self.t_max) {
            return Err(Error::InvalidParameter {
                name: "t_min",
                reason: format!("need 0 < t_min <= t_max, got {} and {}", self.t_min, self.t_max),
            });
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be at least 1".into(),
            });
        }
        if self.exchange_interval < 1 {
            return Err(Error::InvalidParameter {
                name: "exchange_interval",
                reason: "must be at least 1".into(),
            });
        }
        if self.offset_increment < 0 {
            return Err(Error::InvalidParameter {
                name: "offset_increment",
                reason: "must be nonnegative".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best_bits: Vec<bool>,
    pub best_energy: i64,
    /// Iteration of the last strict improvement (0 = the initial state).
    pub best_iteration: u64,
    pub iterations_run: u64,
    /// Whether the assignment satisfies the syndrome; filled by the decoder.
    pub converged: bool,
}

/// Energy change from flipping bit i, from scratch. The solvers maintain
/// the same quantity incrementally.
pub fn local_delta(q: &QuboProblem, bits: &[bool], i: usize) -> Result<i64> {
    if bits.len() != q.n_total {
        return Err(Error::DimensionMismatch {
            expected: q.n_total,
            actual: bits.len(),
        });
    }
    if i >= q.n_total {
        return Err(Error::InvalidParameter {
            name: "index",
            reason: format!("{i} out of range for {} variables", q.n_total),
        });
    }
    let field: i64 = q.w[i].iter().map(|&(j, w)| if bits[j] { w } else { 0 }).sum();
    let sign = if bits[i] { -1 } else { 1 };
    Ok(sign * (-field - q.v[i]))
}

struct Replica {
    bits: Vec<bool>,
    /// Local fields: field[i] = sum_j W_ij y_j.
    field: Vec<i64>,
    energy: i64,
    offset: i64,
    rng: ChaCha8Rng,
    /// Best found since the last barrier merge.
    chunk_best: Option<(i64, u64, Vec<bool>)>,
}

impl Replica {
    fn flip(&mut self, q: &QuboProblem, i: usize, delta: i64) {
        self.bits[i] = !self.bits[i];
        self.energy += delta;
        let sign = if self.bits[i] { 1 } else { -1 };
        for &(j, w) in &q.w[i] {
            self.field[j] += sign * w;
        }
    }

    /// One parallel-trial step at temperature t; returns true if a flip
    /// was applied.
    fn trial_step(&mut self, q: &QuboProblem, t: f64, offset_increment: i64) -> bool {
        let band = (LN_ACCEPT_CUTOFF * t).ceil() as i64;
        let mut chosen: Option<(usize, i64)> = None;
        let mut eligible: u32 = 0;
        for i in 0..q.n_total {
            let raw = -self.field[i] - q.v[i];
            let delta = if self.bits[i] { -raw } else { raw };
            let slack = delta - self.offset;
            let ok = if slack <= 0 {
                true
            } else if slack <= band {
                self.rng.random::<f64>() < (-(slack as f64) / t).exp()
            } else {
                false
            };
            if ok {
                eligible += 1;
                if eligible == 1 || self.rng.random_range(0..eligible) == 0 {
                    chosen = Some((i, delta));
                }
            }
        }
        match chosen {
            Some((i, delta)) => {
                self.flip(q, i, delta);
                self.offset = 0;
                true
            }
            None => {
                self.offset += offset_increment;
                false
            }
        }
    }

    fn note_improvement(&mut self, iteration: u64) {
        let improved = match &self.chunk_best {
            Some((e, _, _)) => self.energy < *e,
            None => true,
        };
        if improved {
            self.chunk_best = Some((self.energy, iteration, self.bits.clone()));
        }
    }
}

fn temperature_ladder(cfg: &AnnealConfig) -> Vec<f64> {
    let r = cfg.replicas;
    if r == 1 {
        return vec![cfg.t_max];
    }
    let ratio = cfg.t_max / cfg.t_min;
    (0..r)
        .map(|k| cfg.t_min * ratio.powf(k as f64 / (r - 1) as f64))
        .collect()
}

struct BestTracker {
    energy: i64,
    iteration: u64,
    bits: Vec<bool>,
}

impl BestTracker {
    /// Fold the per-replica chunk bests into the global best, honoring
    /// strict-improvement order: earliest iteration of the lowest energy.
    fn merge(&mut self, replicas: &mut [Replica]) {
        let mut candidate: Option<(i64, u64, usize)> = None;
        for (idx, rep) in replicas.iter().enumerate() {
            if let Some((e, it, _)) = &rep.chunk_best {
                let key = (*e, *it, idx);
                if candidate.is_none_or(|c| key < c) {
                    candidate = Some(key);
                }
            }
        }
        if let Some((e, it, idx)) = candidate {
            if e < self.energy {
                self.energy = e;
                self.iteration = it;
                self.bits = replicas[idx].chunk_best.as_ref().unwrap().2.clone();
            }
        }
        for rep in replicas {
            rep.chunk_best = None;
        }
    }
}

pub fn solve_da(q: &QuboProblem, cfg: &AnnealConfig) -> Result<SolveResult> {
    if cfg.mode != Mode::DaReplicaExchange {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "solve_da requires da_replica_exchange mode".into(),
        });
    }
    cfg.validate()?;

    let temps = temperature_ladder(cfg);
    let betas: Vec<f64> = temps.iter().map(|t| 1.0 / t).collect();
    let mut exchange_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    exchange_rng.set_stream(0);

    let zero_energy = q.c;
    let mut replicas: Vec<Replica> = (0..cfg.replicas)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64 + 1);
            Replica {
                bits: vec![false; q.n_total],
                field: vec![0; q.n_total],
                energy: zero_energy,
                offset: 0,
                rng,
                chunk_best: None,
            }
        })
        .collect();

    let mut best = BestTracker {
        energy: zero_energy,
        iteration: 0,
        bits: vec![false; q.n_total],
    };

    let mut iteration: u64 = 0;
    let mut exchange_count: u64 = 0;
    while iteration < cfg.max_iterations {
        let chunk = cfg
            .exchange_interval
            .min(cfg.max_iterations - iteration);
        let start = iteration;
        replicas
            .par_iter_mut()
            .zip(temps.par_iter())
            .for_each(|(rep, &t)| {
                for step in 0..chunk {
                    if rep.trial_step(q, t, cfg.offset_increment) {
                        rep.note_improvement(start + step + 1);
                    }
                }
            });
        iteration += chunk;
        best.merge(&mut replicas);

        #[cfg(debug_assertions)]
        for rep in &replicas {
            debug_assert_eq!(rep.energy, evaluate(q, &rep.bits).unwrap());
        }

        if let Some(stall) = cfg.stall_iterations {
            if iteration.saturating_sub(best.iteration) >= stall {
                break;
            }
        }
        if iteration >= cfg.max_iterations {
            break;
        }

        // Alternate even and odd adjacent pairs across exchange events.
        let offset = (exchange_count % 2) as usize;
        exchange_count += 1;
        let mut k = offset;
        while k + 1 < replicas.len() {
            let de = replicas[k].energy - replicas[k + 1].energy;
            let log_p = (betas[k] - betas[k + 1]) * de as f64;
            let u: f64 = exchange_rng.random();
            if log_p >= 0.0 || u < log_p.exp() {
                let (a, b) = replicas.split_at_mut(k + 1);
                let ra = &mut a[k];
                let rb = &mut b[0];
                std::mem::swap(&mut ra.bits, &mut rb.bits);
                std::mem::swap(&mut ra.field, &mut rb.field);
                std::mem::swap(&mut ra.energy, &mut rb.energy);
            }
            k += 2;
        }
    }

    debug_assert_eq!(best.energy, evaluate(q, &best.bits)?);
    Ok(SolveResult {
        best_bits: best.bits,
        best_energy: best.energy,
        best_iteration: best.iteration,
        iterations_run: iteration,
        converged: false,
    })
}

pub fn solve_sa(q: &QuboProblem, cfg: &AnnealConfig) -> Result<SolveResult> {
    if cfg.mode != Mode::Sa {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "solve_sa requires sa mode".into(),
        });
    }
    cfg.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);

    let mut bits = vec![false; q.n_total];
    let mut field = vec![0i64; q.n_total];
    let mut energy = q.c;
    let mut best_bits = bits.clone();
    let mut best_energy = energy;
    let mut best_iteration: u64 = 0;

    // Geometric cooling across the full budget, independent of stalling.
    let cool = if cfg.max_iterations > 1 {
        (cfg.t_min / cfg.t_max).powf(1.0 / (cfg.max_iterations - 1) as f64)
    } else {
        1.0
    };
    let mut t = cfg.t_max;

    let mut iteration: u64 = 0;
    while iteration < cfg.max_iterations {
        iteration += 1;
        let i = rng.random_range(0..q.n_total);
        let raw = -field[i] - q.v[i];
        let delta = if bits[i] { -raw } else { raw };
        let accept = if delta <= 0 {
            true
        } else if (delta as f64) <= LN_ACCEPT_CUTOFF * t {
            rng.random::<f64>() < (-(delta as f64) / t).exp()
        } else {
            false
        };
        if accept {
            bits[i] = !bits[i];
            energy += delta;
            let sign = if bits[i] { 1 } else { -1 };
            for &(j, w) in &q.w[i] {
                field[j] += sign * w;
            }
            if energy < best_energy {
                best_energy = energy;
                best_iteration = iteration;
                best_bits.copy_from_slice(&bits);
            }
        }
        t *= cool;
        if let Some(stall) = cfg.stall_iterations {
            if iteration - best_iteration >= stall {
                break;
            }
        }
    }

    debug_assert_eq!(best_energy, evaluate(q, &best_bits)?);
    Ok(SolveResult {
        best_bits,
        best_energy,
        best_iteration,
        iterations_run: iteration,
        converged: false,
    })
}
