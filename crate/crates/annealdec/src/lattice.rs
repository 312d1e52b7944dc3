//! Planar surface-code geometry, error sampling, and syndrome extraction.
//!
//! Data qubits sit on the edges of a d x d planar patch, realized here as
//! two interleaved grids: integer sites (i, j) with 0 <= i, j < d and
//! half-integer sites (i+1/2, j+1/2) with 0 <= i, j < d-1, giving
//! N_d = d^2 + (d-1)^2 data qubits. X-stabilizers live at (i+1/2, j) with
//! 0 <= i < d-1, 0 <= j < d, giving N_v = d(d-1) vertices; each acts on the
//! two integer sites above and below it and the one or two half-integer
//! sites beside it (weight 3 on the left/right columns, 4 inside).
//!
//! Pauli-Z error chains terminate either on a defect (a vertex measuring -1)
//! or on the top/bottom rows i = 0, d-1, whose integer qubits touch a single
//! vertex. A boundary-to-boundary column of integer qubits is the logical-Z
//! representative; the conjugate parity detector is a diagonal staircase that
//! crosses every stabilizer an even number of times and the logical column an
//! odd number of times.

use rand::Rng;

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct CodeLattice {
    pub d: usize,
    pub n_data: usize,
    pub n_vertices: usize,
    /// For each vertex, the incident data qubits (sorted ascending).
    pub vertex_support: Vec<Vec<usize>>,
    /// For each data qubit, the vertices it appears in (length 1 or 2).
    pub qubit_incidence: Vec<Vec<usize>>,
    /// One logical-Z representative: the integer column j = 0.
    pub logical_support: Vec<usize>,
    /// Conjugate logical-X path used for homology parity tests.
    pub detector_support: Vec<usize>,
}

/// A set of Pauli-Z errors; bits[i] = true means qubit i has an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPattern {
    pub bits: Vec<bool>,
}

impl ErrorPattern {
    pub fn empty(n: usize) -> Self {
        ErrorPattern { bits: vec![false; n] }
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in indices {
            bits[i] = true;
        }
        ErrorPattern { bits }
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn xor(&self, other: &ErrorPattern) -> ErrorPattern {
        assert_eq!(self.bits.len(), other.bits.len());
        ErrorPattern {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a ^ b)
                .collect(),
        }
    }
}

/// Measured X-stabilizer eigenvalues, one of +1/-1 per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    pub values: Vec<i8>,
}

impl Syndrome {
    pub fn trivial(n_vertices: usize) -> Self {
        Syndrome { values: vec![1; n_vertices] }
    }

    /// Vertices measuring -1 (endpoints of error chains).
    pub fn defects(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == -1)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 1)
    }
}

impl CodeLattice {
    fn int_qubit(&self, i: usize, j: usize) -> usize {
        i * self.d + j
    }

    fn half_qubit(&self, i: usize, j: usize) -> usize {
        self.d * self.d + i * (self.d - 1) + j
    }

    /// Grid coordinates (row, col) of a data qubit, for rendering.
    pub fn qubit_position(&self, q: usize) -> (f64, f64) {
        let d = self.d;
        if q < d * d {
            ((q / d) as f64, (q % d) as f64)
        } else {
            let k = q - d * d;
            ((k / (d - 1)) as f64 + 0.5, (k % (d - 1)) as f64 + 0.5)
        }
    }

    /// Grid coordinates (row, col) of a vertex, for rendering.
    pub fn vertex_position(&self, v: usize) -> (f64, f64) {
        ((v / self.d) as f64 + 0.5, (v % self.d) as f64)
    }

    /// Z-stabilizer plaquettes at (i, j+1/2): flipping one in an error
    /// pattern preserves both the syndrome and the homology class.
    pub fn face_supports(&self) -> Vec<Vec<usize>> {
        let d = self.d;
        let mut faces = Vec::with_capacity(d * (d - 1));
        for i in 0..d {
            for j in 0..d - 1 {
                let mut supp = vec![self.int_qubit(i, j), self.int_qubit(i, j + 1)];
                if i >= 1 {
                    supp.push(self.half_qubit(i - 1, j));
                }
                if i <= d - 2 {
                    supp.push(self.half_qubit(i, j));
                }
                supp.sort_unstable();
                faces.push(supp);
            }
        }
        faces
    }
}

pub fn build_lattice(d: usize) -> Result<CodeLattice> {
    if d < 2 {
        return Err(Error::InvalidDistance(d));
    }
    let n_data = d * d + (d - 1) * (d - 1);
    let n_vertices = d * (d - 1);
    let mut lat = CodeLattice {
        d,
        n_data,
        n_vertices,
        vertex_support: Vec::with_capacity(n_vertices),
        qubit_incidence: vec![Vec::new(); n_data],
        logical_support: (0..d).map(|i| i * d).collect(),
        detector_support: Vec::new(),
    };

    // Vertex (i+1/2, j) touches integer sites (i,j), (i+1,j) and the
    // half-integer sites (i+1/2, j-1/2), (i+1/2, j+1/2) where present.
    for i in 0..d - 1 {
        for j in 0..d {
            let mut supp = vec![lat.int_qubit(i, j), lat.int_qubit(i + 1, j)];
            if j >= 1 {
                supp.push(lat.half_qubit(i, j - 1));
            }
            if j <= d - 2 {
                supp.push(lat.half_qubit(i, j));
            }
            supp.sort_unstable();
            let v = lat.vertex_support.len();
            for &q in &supp {
                lat.qubit_incidence[q].push(v);
            }
            lat.vertex_support.push(supp);
        }
    }

    // Staircase (0,0), (1/2,1/2), (1,1), ..., (d-1,d-1): it meets every
    // vertex support in exactly 0 or 2 qubits and the logical column once.
    for k in 0..d {
        lat.detector_support.push(lat.int_qubit(k, k));
    }
    for k in 0..d - 1 {
        lat.detector_support.push(lat.half_qubit(k, k));
    }
    lat.detector_support.sort_unstable();

    Ok(lat)
}

/// Flip each qubit independently with probability p.
pub fn sample_errors<R: Rng + ?Sized>(lat: &CodeLattice, p: f64, rng: &mut R) -> Result<ErrorPattern> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    Ok(ErrorPattern {
        bits: (0..lat.n_data).map(|_| rng.random_bool(p)).collect(),
    })
}

pub fn extract_syndrome(lat: &CodeLattice, e: &ErrorPattern) -> Result<Syndrome> {
    if e.bits.len() != lat.n_data {
        return Err(Error::DimensionMismatch {
            expected: lat.n_data,
            actual: e.bits.len(),
        });
    }
    let values = lat
        .vertex_support
        .iter()
        .map(|supp| {
            let odd = supp.iter().filter(|&&q| e.bits[q]).count() % 2 == 1;
            if odd {
                -1
            } else {
                1
            }
        })
        .collect();
    Ok(Syndrome { values })
}

/// Parity of the overlap with the detector path: for a syndrome-free
/// pattern, 1 means the nontrivial homology class (a logical error).
pub fn logical_parity(lat: &CodeLattice, e: &ErrorPattern) -> Result<u8> {
    if e.bits.len() != lat.n_data {
        return Err(Error::DimensionMismatch {
            expected: lat.n_data,
            actual: e.bits.len(),
        });
    }
    let overlap = lat.detector_support.iter().filter(|&&q| e.bits[q]).count();
    Ok((overlap % 2) as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_small_distance() {
        assert!(matches!(build_lattice(0), Err(Error::InvalidDistance(0))));
        assert!(matches!(build_lattice(1), Err(Error::InvalidDistance(1))));
    }

    #[test]
    fn qubit_and_vertex_counts() {
        assert_eq!(build_lattice(4).unwrap().n_data, 25);
        assert_eq!(build_lattice(46).unwrap().n_data, 4141);
        let lat = build_lattice(2).unwrap();
        assert_eq!(lat.n_data, 5);
        assert_eq!(lat.n_vertices, 2);
        assert!(lat.vertex_support.iter().all(|s| s.len() == 3));
    }

    fn check_invariants(d: usize) {
        let lat = build_lattice(d).unwrap();
        assert_eq!(lat.n_data, d * d + (d - 1) * (d - 1));
        assert_eq!(lat.n_vertices, d * (d - 1));
        assert_eq!(lat.vertex_support.len(), lat.n_vertices);
        assert_eq!(lat.qubit_incidence.len(), lat.n_data);

        let weight3 = lat.vertex_support.iter().filter(|s| s.len() == 3).count();
        assert_eq!(weight3, 2 * (d - 1));
        for s in &lat.vertex_support {
            assert!(s.len() == 3 || s.len() == 4);
            assert!(s.windows(2).all(|w| w[0] < w[1]), "support must be sorted");
        }

        let singles = lat.qubit_incidence.iter().filter(|v| v.len() == 1).count();
        assert_eq!(singles, 2 * d);
        assert!(lat.qubit_incidence.iter().all(|v| (1..=2).contains(&v.len())));

        for supp in &lat.vertex_support {
            let overlap = supp.iter().filter(|q| lat.logical_support.contains(q)).count();
            assert_eq!(overlap % 2, 0);
        }
        let cross = lat
            .detector_support
            .iter()
            .filter(|q| lat.logical_support.contains(q))
            .count();
        assert_eq!(cross % 2, 1);
        for supp in &lat.vertex_support {
            let overlap = supp.iter().filter(|q| lat.detector_support.contains(q)).count();
            assert_eq!(overlap % 2, 0);
        }
        for face in lat.face_supports() {
            let syn = extract_syndrome(&lat, &ErrorPattern::from_indices(lat.n_data, &face)).unwrap();
            assert!(syn.is_trivial(), "face flips must commute with all vertices");
            let overlap = face.iter().filter(|q| lat.detector_support.contains(q)).count();
            assert_eq!(overlap % 2, 0);
        }
    }

    #[test]
    fn lattice_invariants_hold() {
        for d in 2..=12 {
            check_invariants(d);
        }
        check_invariants(41);
    }

    #[test]
    fn sampling_edge_probabilities() {
        let lat = build_lattice(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(sample_errors(&lat, 0.0, &mut rng).unwrap().weight(), 0);
        assert_eq!(sample_errors(&lat, 1.0, &mut rng).unwrap().weight(), 25);
        assert!(sample_errors(&lat, -0.1, &mut rng).is_err());
        assert!(sample_errors(&lat, 1.5, &mut rng).is_err());
    }

    #[test]
    fn sampling_mean_weight() {
        // Binomial(25, 0.1) over 100k samples: mean 2.5, sigma of the
        // sample mean = sqrt(25 * 0.1 * 0.9 / 1e5) ~ 0.0047.
        let lat = build_lattice(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let total: usize = (0..n)
            .map(|_| sample_errors(&lat, 0.1, &mut rng).unwrap().weight())
            .sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 2.5).abs() < 3.0 * 0.0047, "mean {mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let lat = build_lattice(6).unwrap();
        let a = sample_errors(&lat, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = sample_errors(&lat, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn syndrome_of_single_errors() {
        let lat = build_lattice(3).unwrap();
        let empty = extract_syndrome(&lat, &ErrorPattern::empty(lat.n_data)).unwrap();
        assert!(empty.is_trivial());
        for q in 0..lat.n_data {
            let syn = extract_syndrome(&lat, &ErrorPattern::from_indices(lat.n_data, &[q])).unwrap();
            assert_eq!(syn.defects().len(), lat.qubit_incidence[q].len());
            assert_eq!(syn.defects(), lat.qubit_incidence[q]);
        }
    }

    #[test]
    fn syndrome_length_mismatch() {
        let lat = build_lattice(3).unwrap();
        assert!(extract_syndrome(&lat, &ErrorPattern::empty(4)).is_err());
        assert!(logical_parity(&lat, &ErrorPattern::empty(4)).is_err());
    }

    #[test]
    fn parity_of_representatives() {
        for d in 2..=6 {
            let lat = build_lattice(d).unwrap();
            assert_eq!(logical_parity(&lat, &ErrorPattern::empty(lat.n_data)).unwrap(), 0);
            let logical = ErrorPattern::from_indices(lat.n_data, &lat.logical_support);
            assert_eq!(logical_parity(&lat, &logical).unwrap(), 1);
            assert!(extract_syndrome(&lat, &logical).unwrap().is_trivial());
            for supp in &lat.vertex_support {
                let e = ErrorPattern::from_indices(lat.n_data, supp);
                assert_eq!(logical_parity(&lat, &e).unwrap(), 0);
            }
        }
    }

    fn arb_pattern(n: usize) -> impl Strategy<Value = ErrorPattern> {
        proptest::collection::vec(any::<bool>(), n).prop_map(|bits| ErrorPattern { bits })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn syndrome_is_linear_under_xor(
            (e1, e2) in (2usize..6).prop_flat_map(|d| {
                let n = d * d + (d - 1) * (d - 1);
                (arb_pattern(n), arb_pattern(n)).prop_map(move |(a, b)| ((d, a), b))
            }).prop_map(|((d, a), b)| ((d, a.clone()), (d, b)))
        ) {
            let (d, a) = e1;
            let (_, b) = e2;
            let lat = build_lattice(d).unwrap();
            let sa = extract_syndrome(&lat, &a).unwrap();
            let sb = extract_syndrome(&lat, &b).unwrap();
            let sx = extract_syndrome(&lat, &a.xor(&b)).unwrap();
            for v in 0..lat.n_vertices {
                prop_assert_eq!(sx.values[v], sa.values[v] * sb.values[v]);
            }
        }

        #[test]
        fn parity_respects_homology(
            (d, e) in (2usize..6).prop_flat_map(|d| {
                let n = d * d + (d - 1) * (d - 1);
                arb_pattern(n).prop_map(move |e| (d, e))
            })
        ) {
            let lat = build_lattice(d).unwrap();
            let base = logical_parity(&lat, &e).unwrap();
            for supp in &lat.vertex_support {
                let shifted = e.xor(&ErrorPattern::from_indices(lat.n_data, supp));
                prop_assert_eq!(logical_parity(&lat, &shifted).unwrap(), base);
            }
            for face in lat.face_supports() {
                let shifted = e.xor(&ErrorPattern::from_indices(lat.n_data, &face));
                prop_assert_eq!(logical_parity(&lat, &shifted).unwrap(), base);
            }
            let flipped = e.xor(&ErrorPattern::from_indices(lat.n_data, &lat.logical_support));
            prop_assert_eq!(logical_parity(&lat, &flipped).unwrap(), 1 - base);
        }

        #[test]
        fn defect_count_parity_matches_boundary_hits(
            (d, e) in (2usize..7).prop_flat_map(|d| {
                let n = d * d + (d - 1) * (d - 1);
                arb_pattern(n).prop_map(move |e| (d, e))
            })
        ) {
            let lat = build_lattice(d).unwrap();
            let syn = extract_syndrome(&lat, &e).unwrap();
            let boundary_bits = (0..lat.n_data)
                .filter(|&q| e.bits[q] && lat.qubit_incidence[q].len() == 1)
                .count();
            prop_assert_eq!(syn.defects().len() % 2, boundary_bits % 2);
        }
    }
}
