//! Ising formulation of syndrome decoding and its QUBO quadratization.
//!
//! A syndrome b defines the Hamiltonian
//!
//!   H(sigma) = -J sum_v b_v prod_{i in dv} sigma_i - h sum_i sigma_i
//!
//! whose ground states flip spins along minimum-weight chains consistent
//! with the syndrome. Substituting sigma_i = 1 - 2 x_i yields a degree-3/4
//! pseudo-boolean polynomial; each cubic or quartic vertex term is reduced
//! to quadratic with auxiliary bits z = x_i x_j, enforced by the penalty
//! alpha (x_i x_j - 2 z (x_i + x_j) + 3 z). The result is kept in the form
//!
//!   H'(y) = -1/2 sum_{ij} W_ij y_i y_j - sum_i V_i y_i + c
//!
//! with integer coefficients throughout, so energies are exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::lattice::{CodeLattice, Syndrome};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct IsingProblem {
    /// (coefficient, spin indices): one 3- or 4-spin term per vertex with
    /// coefficient -J*b_v, plus one 1-spin term per qubit with coefficient -h.
    pub terms: Vec<(i64, Vec<usize>)>,
    pub n_spins: usize,
    pub j: i64,
    pub h: i64,
}

impl IsingProblem {
    /// Exact energy of a +1/-1 spin assignment.
    pub fn energy(&self, spins: &[i8]) -> i64 {
        assert_eq!(spins.len(), self.n_spins);
        self.terms
            .iter()
            .map(|(coeff, idx)| {
                let prod: i64 = idx.iter().map(|&i| spins[i] as i64).product();
                coeff * prod
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct QuboProblem {
    /// Total variable count N = n_data + number of auxiliaries.
    pub n_total: usize,
    /// Variables 0..n_data are error indicators x_i; the rest are auxiliaries.
    pub n_data: usize,
    /// Sparse rows of the symmetric weight matrix W (zero diagonal).
    pub w: Vec<Vec<(usize, i64)>>,
    /// Bias vector V.
    pub v: Vec<i64>,
    /// Constant offset c.
    pub c: i64,
    /// Penalty weight enforcing auxiliary consistency.
    pub alpha: i64,
    /// For auxiliary k (variable n_data + k), the pair (i, j) with z_k = x_i x_j.
    pub aux_map: Vec<(usize, usize)>,
}

impl QuboProblem {
    /// Extend a data-bit assignment with consistent auxiliaries z_k = x_i x_j.
    pub fn consistent_completion(&self, data_bits: &[bool]) -> Vec<bool> {
        assert_eq!(data_bits.len(), self.n_data);
        let mut bits = data_bits.to_vec();
        bits.extend(self.aux_map.iter().map(|&(i, j)| data_bits[i] && data_bits[j]));
        bits
    }

    /// Sparse text export: a header line `N c alpha n_data`, then one line
    /// per nonzero entry. `i i value` is the bias V_i; `i j value` with
    /// i < j is the weight W_ij.
    pub fn to_sparse_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# qubo: energy = -1/2 sum W_ij y_i y_j - sum V_i y_i + c");
        let _ = writeln!(out, "# header: N c alpha n_data; then `i i V_i` and `i j W_ij` (i < j)");
        let _ = writeln!(out, "{} {} {} {}", self.n_total, self.c, self.alpha, self.n_data);
        for (i, &v) in self.v.iter().enumerate() {
            if v != 0 {
                let _ = writeln!(out, "{i} {i} {v}");
            }
        }
        for (i, row) in self.w.iter().enumerate() {
            for &(j, w) in row {
                if i < j {
                    let _ = writeln!(out, "{i} {j} {w}");
                }
            }
        }
        out
    }
}

pub fn build_ising(lat: &CodeLattice, s: &Syndrome, j: i64, h: i64) -> Result<IsingProblem> {
    if j <= 0 {
        return Err(Error::InvalidParameter {
            name: "coupling",
            reason: format!("must be positive, got {j}"),
        });
    }
    if h <= 0 {
        return Err(Error::InvalidParameter {
            name: "field",
            reason: format!("must be positive, got {h}"),
        });
    }
    if s.values.len() != lat.n_vertices {
        return Err(Error::DimensionMismatch {
            expected: lat.n_vertices,
            actual: s.values.len(),
        });
    }
    let mut terms = Vec::with_capacity(lat.n_vertices + lat.n_data);
    for (v, supp) in lat.vertex_support.iter().enumerate() {
        terms.push((-j * s.values[v] as i64, supp.clone()));
    }
    for i in 0..lat.n_data {
        terms.push((-h, vec![i]));
    }
    Ok(IsingProblem {
        terms,
        n_spins: lat.n_data,
        j,
        h,
    })
}

/// Value of the consistency penalty alpha (x_i x_j - 2 z (x_i + x_j) + 3 z).
/// Zero iff z = x_i x_j, otherwise at least alpha.
pub fn penalty_value(x_i: u8, x_j: u8, z: u8, alpha: i64) -> i64 {
    debug_assert!(x_i <= 1 && x_j <= 1 && z <= 1);
    let (xi, xj, z) = (x_i as i64, x_j as i64, z as i64);
    alpha * (xi * xj - 2 * z * (xi + xj) + 3 * z)
}

/// Reduce the degree-3/4 polynomial to quadratic. Each weight-4 vertex term
/// gets two auxiliaries pairing its two lowest and two highest qubit
/// indices; each weight-3 term gets one auxiliary on its two lowest.
pub fn quadratize(ising: &IsingProblem, alpha: i64) -> QuboProblem {
    let n_data = ising.n_spins;
    // Polynomial accumulators: constant k, linear l, quadratic q over
    // unordered index pairs (kept as (min, max)).
    let mut k: i64 = 0;
    let mut l: Vec<i64> = vec![0; n_data];
    let mut q: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut aux_map: Vec<(usize, usize)> = Vec::new();

    let add_q = |q: &mut BTreeMap<(usize, usize), i64>, a: usize, b: usize, val: i64| {
        debug_assert_ne!(a, b);
        let key = (a.min(b), a.max(b));
        *q.entry(key).or_insert(0) += val;
    };

    for (coeff, idx) in &ising.terms {
        let c = *coeff;
        match idx.as_slice() {
            // c * sigma_i = c (1 - 2 x_i)
            &[i] => {
                k += c;
                l[i] -= 2 * c;
            }
            // c (1 - 2 x_i)(1 - 2 x_j)
            &[i, j] => {
                k += c;
                l[i] -= 2 * c;
                l[j] -= 2 * c;
                add_q(&mut q, i, j, 4 * c);
            }
            // c (1 - 2 a)(1 - 2 x_r) with a = x_i + x_j - 2 z
            &[i, j, r] => {
                let z = n_data + aux_map.len();
                aux_map.push((i, j));
                l.push(0);
                k += c;
                l[i] -= 2 * c;
                l[j] -= 2 * c;
                l[r] -= 2 * c;
                l[z] += 4 * c;
                add_q(&mut q, i, r, 4 * c);
                add_q(&mut q, j, r, 4 * c);
                add_q(&mut q, z, r, -8 * c);
            }
            // c (1 - 2 a)(1 - 2 b), a = x_i + x_j - 2 z_m, b = x_r + x_s - 2 z_n
            &[i, j, r, s] => {
                let zm = n_data + aux_map.len();
                aux_map.push((i, j));
                l.push(0);
                let zn = n_data + aux_map.len();
                aux_map.push((r, s));
                l.push(0);
                k += c;
                for t in [i, j, r, s] {
                    l[t] -= 2 * c;
                }
                l[zm] += 4 * c;
                l[zn] += 4 * c;
                for (a, b) in [(i, r), (i, s), (j, r), (j, s)] {
                    add_q(&mut q, a, b, 4 * c);
                }
                for (a, b) in [(i, zn), (j, zn), (zm, r), (zm, s)] {
                    add_q(&mut q, a, b, -8 * c);
                }
                add_q(&mut q, zm, zn, 16 * c);
            }
            other => panic!("unsupported interaction order {}", other.len()),
        }
    }

    for (idx, &(i, j)) in aux_map.iter().enumerate() {
        let z = n_data + idx;
        add_q(&mut q, i, j, alpha);
        add_q(&mut q, i, z, -2 * alpha);
        add_q(&mut q, j, z, -2 * alpha);
        l[z] += 3 * alpha;
    }

    let n_total = n_data + aux_map.len();
    let mut w = vec![Vec::new(); n_total];
    for (&(a, b), &val) in &q {
        if val != 0 {
            w[a].push((b, -val));
            w[b].push((a, -val));
        }
    }
    QuboProblem {
        n_total,
        n_data,
        w,
        v: l.iter().map(|&x| -x).collect(),
        c: k,
        alpha,
        aux_map,
    }
}

/// Exact QUBO energy -1/2 sum W_ij y_i y_j - sum V_i y_i + c.
pub fn evaluate(q: &QuboProblem, bits: &[bool]) -> Result<i64> {
    if bits.len() != q.n_total {
        return Err(Error::DimensionMismatch {
            expected: q.n_total,
            actual: bits.len(),
        });
    }
    let mut e = q.c;
    for (i, &bit) in bits.iter().enumerate() {
        if !bit {
            continue;
        }
        e -= q.v[i];
        for &(j, w) in &q.w[i] {
            if j > i && bits[j] {
                e -= w;
            }
        }
    }
    Ok(e)
}
