//! Minimum-weight perfect matching decoder.
//!
//! Defects (vertices measuring -1) are paired along shortest lattice paths,
//! either with each other or with the nearest chain-terminating boundary.
//! Each defect gets a virtual boundary node; boundary-boundary edges are
//! free, so a perfect matching always exists. Minimum weight is found with
//! an exact Edmonds blossom matcher (primal-dual with blossom shrinking,
//! after Galil's survey and van Rantwijk's reference implementation),
//! instrumented to count edge examinations so decoder effort can be
//! compared across problem sizes.

use crate::lattice::{CodeLattice, ErrorPattern, Syndrome};
use crate::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct DefectGraph {
    /// Vertex indices measuring -1.
    pub defects: Vec<usize>,
    /// For defect k, the shortest lattice distance to a chain-terminating
    /// boundary; its virtual boundary node in the matching graph is m + k.
    pub boundary_nodes: Vec<i64>,
    /// Pairwise defect-to-defect shortest-path lengths.
    pub weights: Vec<Vec<i64>>,
    /// One shortest qubit path per defect pair.
    pub paths: Vec<Vec<Vec<usize>>>,
    /// One shortest qubit path from each defect to its boundary.
    pub boundary_paths: Vec<Vec<usize>>,
    pub n_data: usize,
}

/// Complete matching output: the pairing, its total lattice weight, the
/// edge-scan count of the matcher, and the reconstructed correction.
#[derive(Debug, Clone)]
pub struct MwpmSolution {
    /// For each defect index k: Some(l) if matched to defect l, None if
    /// matched to a boundary node.
    pub pairs: Vec<Option<usize>>,
    pub weight: i64,
    pub edge_scans: u64,
    pub pattern: ErrorPattern,
}

pub fn build_defect_graph(lat: &CodeLattice, s: &Syndrome) -> Result<DefectGraph> {
    if s.values.len() != lat.n_vertices {
        return Err(Error::DimensionMismatch {
            expected: lat.n_vertices,
            actual: s.values.len(),
        });
    }
    let defects = s.defects();
    let m = defects.len();

    // Vertex adjacency with a shared boundary supernode: interior qubits
    // join two vertices, single-incidence qubits join a vertex to the
    // boundary. Built in qubit order, so BFS tie-breaking is deterministic.
    let boundary = lat.n_vertices;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); lat.n_vertices + 1];
    for q in 0..lat.n_data {
        match lat.qubit_incidence[q].as_slice() {
            &[v] => adj[v].push((boundary, q)),
            &[v, w] => {
                adj[v].push((w, q));
                adj[w].push((v, q));
            }
            other => unreachable!("qubit with {} incidences", other.len()),
        }
    }

    let mut weights = vec![vec![0i64; m]; m];
    let mut paths = vec![vec![Vec::new(); m]; m];
    let mut boundary_nodes = vec![0i64; m];
    let mut boundary_paths = vec![Vec::new(); m];

    for (k, &src) in defects.iter().enumerate() {
        // BFS over vertices; the boundary node absorbs (no expansion).
        let mut dist = vec![NONE; lat.n_vertices + 1];
        let mut pred: Vec<(usize, usize)> = vec![(NONE, NONE); lat.n_vertices + 1];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            if u == boundary {
                continue;
            }
            for &(w, q) in &adj[u] {
                if dist[w] == NONE {
                    dist[w] = dist[u] + 1;
                    pred[w] = (u, q);
                    queue.push_back(w);
                }
            }
        }
        let trace = |target: usize| -> Vec<usize> {
            let mut path = Vec::new();
            let mut node = target;
            while node != src {
                let (prev, q) = pred[node];
                path.push(q);
                node = prev;
            }
            path.reverse();
            path
        };
        for (l, &dst) in defects.iter().enumerate().skip(k + 1) {
            let w = dist[dst];
            debug_assert_ne!(w, NONE, "vertex graph must be connected");
            weights[k][l] = w as i64;
            weights[l][k] = w as i64;
            let p = trace(dst);
            paths[k][l] = p.clone();
            paths[l][k] = p;
        }
        boundary_nodes[k] = dist[boundary] as i64;
        boundary_paths[k] = trace(boundary);
    }

    Ok(DefectGraph {
        defects,
        boundary_nodes,
        weights,
        paths,
        boundary_paths,
        n_data: lat.n_data,
    })
}

/// Solve the matching and reconstruct the correction pattern.
pub fn mwpm_solve(g: &DefectGraph) -> MwpmSolution {
    let m = g.defects.len();
    if m == 0 {
        return MwpmSolution {
            pairs: Vec::new(),
            weight: 0,
            edge_scans: 0,
            pattern: ErrorPattern::empty(g.n_data),
        };
    }

    // Matching nodes: defects 0..m, boundary nodes m..2m. Any defect may
    // take any boundary node at its own boundary distance (assignments are
    // interchangeable), and leftover boundary nodes pair up for free.
    // Minimization becomes maximization of (top - w) at forced cardinality.
    let mut top = 1;
    for k in 0..m {
        top = top.max(g.boundary_nodes[k] + 1);
        for l in k + 1..m {
            top = top.max(g.weights[k][l] + 1);
        }
    }
    let mut edges: Vec<(usize, usize, i64)> = Vec::with_capacity(m * (2 * m - 1));
    for a in 0..m {
        for b in a + 1..m {
            edges.push((a, b, top - g.weights[a][b]));
        }
        for i in 0..m {
            edges.push((a, m + i, top - g.boundary_nodes[a]));
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            edges.push((m + i, m + j, top));
        }
    }

    let (mate, edge_scans) = max_weight_matching(2 * m, &edges, true);

    let mut pairs = vec![None; m];
    let mut weight = 0i64;
    let mut bits = vec![false; g.n_data];
    let mut flip = |path: &[usize]| {
        for &q in path {
            bits[q] ^= true;
        }
    };
    for a in 0..m {
        let partner = mate[a];
        debug_assert_ne!(partner, NONE, "perfect matching must cover all defects");
        if partner < m {
            pairs[a] = Some(partner);
            if a < partner {
                weight += g.weights[a][partner];
                flip(&g.paths[a][partner]);
            }
        } else {
            weight += g.boundary_nodes[a];
            flip(&g.boundary_paths[a]);
        }
    }

    MwpmSolution {
        pairs,
        weight,
        edge_scans,
        pattern: ErrorPattern { bits },
    }
}

/// Decode a defect graph: the correction pattern and the matcher's
/// edge-scan count.
pub fn mwpm_decode(g: &DefectGraph) -> (ErrorPattern, u64) {
    let sol = mwpm_solve(g);
    (sol.pattern, sol.edge_scans)
}

/// Exhaustive minimum matching weight over all pairings and boundary
/// assignments. Test oracle; only for small defect counts.
pub fn brute_force_matching(g: &DefectGraph) -> Result<i64> {
    let m = g.defects.len();
    if m > 10 {
        return Err(Error::TooLarge {
            what: "brute-force matching",
            limit: 10,
            actual: m,
        });
    }
    fn go(g: &DefectGraph, unmatched: &mut Vec<usize>) -> i64 {
        let Some(a) = unmatched.pop() else { return 0 };
        // a goes to the boundary...
        let mut best = g.boundary_nodes[a] + go(g, unmatched);
        // ...or pairs with another unmatched defect.
        for idx in 0..unmatched.len() {
            let b = unmatched.remove(idx);
            let cand = g.weights[a][b] + go(g, unmatched);
            unmatched.insert(idx, b);
            best = best.min(cand);
        }
        unmatched.push(a);
        best
    }
    let mut all: Vec<usize> = (0..m).collect();
    Ok(go(g, &mut all))
}

/// Maximum-weight matching on a general graph (Edmonds blossom,
/// primal-dual). Returns (mate, edge_scans): mate[v] is v's partner or
/// NONE. With max_cardinality, only maximum-cardinality matchings are
/// considered. Vertex duals are kept doubled so integer weights yield
/// integer duals throughout. O(n^3).
fn max_weight_matching(
    n: usize,
    edges: &[(usize, usize, i64)],
    max_cardinality: bool,
) -> (Vec<usize>, u64) {
    if edges.is_empty() {
        return (vec![NONE; n], 0);
    }
    let mut m = Matcher::new(n, edges, max_cardinality);
    m.solve();
    (m.final_mates(), m.edge_scans)
}

/// Labels: 0 free, 1 = S (even), 2 = T (odd); bit 2 marks scan breadcrumbs.
struct Matcher<'a> {
    n: usize,
    edges: &'a [(usize, usize, i64)],
    max_cardinality: bool,
    edge_scans: u64,

    /// endpoint[p]: vertex attached to edge endpoint p (p = 2k or 2k+1).
    endpoint: Vec<usize>,
    /// neighbend[v]: endpoints pointing away from v.
    neighbend: Vec<Vec<usize>>,
    /// mate[v]: remote endpoint of the matched edge, or NONE.
    mate: Vec<usize>,
    label: Vec<u8>,
    /// labelend[b]: remote endpoint of the edge through which b got its label.
    labelend: Vec<usize>,
    /// inblossom[v]: top-level blossom containing vertex v.
    inblossom: Vec<usize>,
    blossom_parent: Vec<usize>,
    blossom_childs: Vec<Vec<usize>>,
    blossom_base: Vec<usize>,
    /// blossom_endps[b][i]: endpoint of child i on the edge to child i+1.
    blossom_endps: Vec<Vec<usize>>,
    /// Least-slack edge to an S-blossom, per free vertex / top S-blossom.
    best_edge: Vec<usize>,
    blossom_best_edges: Vec<Vec<usize>>,
    unused_blossoms: Vec<usize>,
    /// Doubled vertex duals followed by blossom duals.
    dual: Vec<i64>,
    allow_edge: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Matcher<'a> {
    fn new(n: usize, edges: &'a [(usize, usize, i64)], max_cardinality: bool) -> Self {
        let max_weight = edges.iter().map(|e| e.2).max().unwrap().max(0);
        let mut endpoint = Vec::with_capacity(2 * edges.len());
        let mut neighbend = vec![Vec::new(); n];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            assert!(i != j && i < n && j < n);
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dual = vec![max_weight; n];
        dual.extend(vec![0; n]);
        Matcher {
            n,
            edges,
            max_cardinality,
            edge_scans: 0,
            endpoint,
            neighbend,
            mate: vec![NONE; n],
            label: vec![0; 2 * n],
            labelend: vec![NONE; 2 * n],
            inblossom: (0..n).collect(),
            blossom_parent: vec![NONE; 2 * n],
            blossom_childs: vec![Vec::new(); 2 * n],
            blossom_base: (0..n).chain(std::iter::repeat_n(NONE, n)).collect(),
            blossom_endps: vec![Vec::new(); 2 * n],
            best_edge: vec![NONE; 2 * n],
            blossom_best_edges: vec![Vec::new(); 2 * n],
            unused_blossoms: (n..2 * n).collect(),
            dual,
            allow_edge: vec![false; edges.len()],
            queue: Vec::new(),
        }
    }

    /// Doubled slack of edge k (valid only outside blossoms).
    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dual[i] + self.dual[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.n {
            out.push(b);
        } else {
            for &t in &self.blossom_childs[b] {
                self.blossom_leaves(t, out);
            }
        }
    }

    fn leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.blossom_leaves(b, &mut out);
        out
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        debug_assert!(self.label[w] == 0 && self.label[b] == 0);
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.best_edge[w] = NONE;
        self.best_edge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves(b);
            self.queue.extend(leaves);
        } else {
            // The base is the only vertex of a T-blossom with an external
            // mate; its partner becomes an S-vertex.
            let base = self.blossom_base[b];
            debug_assert_ne!(self.mate[base], NONE);
            let mbase = self.mate[base];
            self.assign_label(self.endpoint[mbase], 1, mbase ^ 1);
        }
    }

    /// Trace back from v and w; return the base of a new blossom, or NONE
    /// if the paths reach two different roots (an augmenting path).
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        let (mut v, mut w) = (v, w);
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossom_base[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            debug_assert_eq!(self.labelend[b], self.mate[self.blossom_base[b]]);
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                debug_assert_ne!(self.labelend[b], NONE);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    /// Shrink the cycle through edge k and base into a new S-blossom.
    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];

        let b = self.unused_blossoms.pop().expect("blossom numbers exhausted");
        self.blossom_base[b] = base;
        self.blossom_parent[b] = NONE;
        self.blossom_parent[bb] = b;

        let mut childs = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossom_parent[bv] = b;
            childs.push(bv);
            endps.push(self.labelend[bv]);
            debug_assert_ne!(self.labelend[bv], NONE);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        childs.push(bb);
        childs.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossom_parent[bw] = b;
            childs.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            debug_assert_ne!(self.labelend[bw], NONE);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.blossom_childs[b] = childs;
        self.blossom_endps[b] = endps;

        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dual[b] = 0;

        for v in self.leaves(b) {
            if self.label[self.inblossom[v]] == 2 {
                // Former T-vertices become S-vertices inside the blossom.
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }

        // Merge the children's least-slack edge lists.
        let mut best_to = vec![NONE; 2 * self.n];
        for child_idx in 0..self.blossom_childs[b].len() {
            let bv = self.blossom_childs[b][child_idx];
            let lists: Vec<Vec<usize>> = if self.blossom_best_edges[bv].is_empty() {
                self.leaves(bv)
                    .iter()
                    .map(|&v| self.neighbend[v].iter().map(|p| p / 2).collect())
                    .collect()
            } else {
                vec![self.blossom_best_edges[bv].clone()]
            };
            for list in lists {
                for k in list {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (best_to[bj] == NONE || self.slack(k) < self.slack(best_to[bj]))
                    {
                        best_to[bj] = k;
                    }
                }
            }
            self.blossom_best_edges[bv] = Vec::new();
            self.best_edge[bv] = NONE;
        }
        let merged: Vec<usize> = best_to.into_iter().filter(|&k| k != NONE).collect();
        self.best_edge[b] = NONE;
        for &k in &merged {
            if self.best_edge[b] == NONE || self.slack(k) < self.slack(self.best_edge[b]) {
                self.best_edge[b] = k;
            }
        }
        self.blossom_best_edges[b] = merged;
    }

    /// Undo a blossom: promote children to top level; during a stage,
    /// relabel along the cycle so the alternating tree stays intact.
    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        for s in self.blossom_childs[b].clone() {
            self.blossom_parent[s] = NONE;
            if s < self.n {
                self.inblossom[s] = s;
            } else if endstage && self.dual[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves(s) {
                    self.inblossom[v] = s;
                }
            }
        }

        if !endstage && self.label[b] == 2 {
            debug_assert_ne!(self.labelend[b], NONE);
            let entry_child = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let childs = self.blossom_childs[b].clone();
            let endps = self.blossom_endps[b].clone();
            let len = childs.len() as i32;
            let at = |v: &[usize], idx: i32| -> usize {
                let i = if idx >= 0 { idx as usize } else { (len + idx) as usize % len as usize };
                v[i]
            };
            let mut j = childs.iter().position(|&c| c == entry_child).unwrap() as i32;
            let (jstep, endptrick): (i32, usize) = if j & 1 != 0 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                // Relabel the T-sub-blossom.
                self.label[self.endpoint[p ^ 1]] = 0;
                self.label[self.endpoint[at(&endps, j - endptrick as i32) ^ endptrick ^ 1]] = 0;
                let ep = self.endpoint[p ^ 1];
                self.assign_label(ep, 2, p);
                // Step to the next S-sub-blossom; its connecting edges are allowable.
                self.allow_edge[at(&endps, j - endptrick as i32) / 2] = true;
                j += jstep;
                p = at(&endps, j - endptrick as i32) ^ endptrick;
                self.allow_edge[p / 2] = true;
                j += jstep;
            }
            // The base keeps label T without stepping through to its mate.
            let bv = at(&childs, j);
            self.label[self.endpoint[p ^ 1]] = 2;
            self.label[bv] = 2;
            self.labelend[self.endpoint[p ^ 1]] = p;
            self.labelend[bv] = p;
            self.best_edge[bv] = NONE;
            j += jstep;
            while at(&childs, j) != entry_child {
                let bv = at(&childs, j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let mut reached = NONE;
                for v in self.leaves(bv) {
                    reached = v;
                    if self.label[v] != 0 {
                        break;
                    }
                }
                if self.label[reached] != 0 {
                    debug_assert_eq!(self.label[reached], 2);
                    debug_assert_eq!(self.inblossom[reached], bv);
                    self.label[reached] = 0;
                    self.label[self.endpoint[self.mate[self.blossom_base[bv]]]] = 0;
                    let lblend = self.labelend[reached];
                    self.assign_label(reached, 2, lblend);
                }
                j += jstep;
            }
        }

        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossom_base[b] = NONE;
        self.best_edge[b] = NONE;
        self.blossom_childs[b] = Vec::new();
        self.blossom_endps[b] = Vec::new();
        self.blossom_best_edges[b] = Vec::new();
        self.unused_blossoms.push(b);
    }

    /// Swap matched/unmatched edges along the path from v to the base of b.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossom_parent[t] != b {
            t = self.blossom_parent[t];
        }
        if t >= self.n {
            self.augment_blossom(t, v);
        }

        let childs = self.blossom_childs[b].clone();
        let endps = self.blossom_endps[b].clone();
        let len = childs.len() as i32;
        let at = |v: &[usize], idx: i32| -> usize {
            let i = if idx >= 0 { idx as usize } else { (len + idx) as usize % len as usize };
            v[i]
        };
        let i = childs.iter().position(|&c| c == t).unwrap();
        let mut j = i as i32;
        let (jstep, endptrick): (i32, usize) = if i & 1 != 0 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = at(&childs, j);
            let p = at(&endps, j - endptrick as i32) ^ endptrick;
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = at(&childs, j);
            if t >= self.n {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossom_childs[b].rotate_left(i);
        self.blossom_endps[b].rotate_left(i);
        self.blossom_base[b] = self.blossom_base[self.blossom_childs[b][0]];
        debug_assert_eq!(self.blossom_base[b], v);
    }

    /// Augment along the path through edge k between two tree roots.
    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                debug_assert_eq!(self.labelend[bs], self.mate[self.blossom_base[bs]]);
                if bs >= self.n {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                debug_assert_ne!(self.labelend[bt], NONE);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossom_base[bt], t);
                if bt >= self.n {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn solve(&mut self) {
        for _stage in 0..self.n {
            self.label = vec![0; 2 * self.n];
            self.best_edge = vec![NONE; 2 * self.n];
            for b in self.n..2 * self.n {
                self.blossom_best_edges[b] = Vec::new();
            }
            self.allow_edge = vec![false; self.edges.len()];
            self.queue = Vec::new();
            for v in 0..self.n {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }

            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let ends = self.neighbend[v].clone();
                    let mut found = false;
                    for p in ends {
                        self.edge_scans += 1;
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allow_edge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allow_edge[k] = true;
                            }
                        }
                        if self.allow_edge[k] {
                            let bw = self.inblossom[w];
                            if self.label[bw] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[bw] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    found = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[bw], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.best_edge[b] == NONE || kslack < self.slack(self.best_edge[b]) {
                                self.best_edge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.best_edge[w] == NONE || kslack < self.slack(self.best_edge[w]))
                        {
                            self.best_edge[w] = k;
                        }
                    }
                    if found {
                        break;
                    }
                }
                if augmented {
                    break;
                }

                // No augmenting path: pump slack out of the duals.
                let mut delta_type = -1;
                let mut delta = 0i64;
                let mut delta_edge = NONE;
                let mut delta_blossom = NONE;

                if !self.max_cardinality {
                    delta_type = 1;
                    delta = *self.dual[..self.n].iter().min().unwrap();
                }
                for v in 0..self.n {
                    if self.label[self.inblossom[v]] == 0 && self.best_edge[v] != NONE {
                        let d = self.slack(self.best_edge[v]);
                        if delta_type == -1 || d < delta {
                            delta = d;
                            delta_type = 2;
                            delta_edge = self.best_edge[v];
                        }
                    }
                }
                for b in 0..2 * self.n {
                    if self.blossom_parent[b] == NONE
                        && self.label[b] == 1
                        && self.best_edge[b] != NONE
                    {
                        let d = self.slack(self.best_edge[b]) / 2;
                        if delta_type == -1 || d < delta {
                            delta = d;
                            delta_type = 3;
                            delta_edge = self.best_edge[b];
                        }
                    }
                }
                for b in self.n..2 * self.n {
                    if self.blossom_base[b] != NONE
                        && self.blossom_parent[b] == NONE
                        && self.label[b] == 2
                        && (delta_type == -1 || self.dual[b] < delta)
                    {
                        delta = self.dual[b];
                        delta_type = 4;
                        delta_blossom = b;
                    }
                }
                if delta_type == -1 {
                    // Max-cardinality optimum: settle duals for verification.
                    debug_assert!(self.max_cardinality);
                    delta_type = 1;
                    delta = (*self.dual[..self.n].iter().min().unwrap()).max(0);
                }

                for v in 0..self.n {
                    match self.label[self.inblossom[v]] {
                        0 => {}
                        1 => self.dual[v] -= delta,
                        2 => self.dual[v] += delta,
                        _ => unreachable!(),
                    }
                }
                for b in self.n..2 * self.n {
                    if self.blossom_base[b] != NONE && self.blossom_parent[b] == NONE {
                        match self.label[b] {
                            0 => {}
                            1 => self.dual[b] += delta,
                            2 => self.dual[b] -= delta,
                            _ => unreachable!(),
                        }
                    }
                }

                match delta_type {
                    1 => break,
                    2 => {
                        self.allow_edge[delta_edge] = true;
                        let (mut i, j, _) = self.edges[delta_edge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allow_edge[delta_edge] = true;
                        let (i, _, _) = self.edges[delta_edge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    4 => self.expand_blossom(delta_blossom, false),
                    _ => unreachable!(),
                }
            }

            if !augmented {
                break;
            }
            for b in self.n..2 * self.n {
                if self.blossom_parent[b] == NONE
                    && self.blossom_base[b] != NONE
                    && self.label[b] == 1
                    && self.dual[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }

        #[cfg(debug_assertions)]
        self.verify_optimum();
    }

    /// Check complementary slackness of the final primal/dual pair.
    #[cfg(debug_assertions)]
    fn verify_optimum(&self) {
        let offset = if self.max_cardinality {
            (-self.dual[..self.n].iter().min().unwrap()).max(0)
        } else {
            0
        };
        for (k, &(i, j, wt)) in self.edges.iter().enumerate() {
            let mut s = self.dual[i] + self.dual[j] - 2 * wt;
            let mut iblossoms = vec![i];
            let mut jblossoms = vec![j];
            while self.blossom_parent[*iblossoms.last().unwrap()] != NONE {
                iblossoms.push(self.blossom_parent[*iblossoms.last().unwrap()]);
            }
            while self.blossom_parent[*jblossoms.last().unwrap()] != NONE {
                jblossoms.push(self.blossom_parent[*jblossoms.last().unwrap()]);
            }
            iblossoms.reverse();
            jblossoms.reverse();
            for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dual[bi];
            }
            assert!(s >= 0, "negative slack on edge {k}");
            let matched = self.mate[i] != NONE && self.mate[i] / 2 == k
                || self.mate[j] != NONE && self.mate[j] / 2 == k;
            if matched {
                assert_eq!(s, 0, "matched edge {k} has nonzero slack");
            }
        }
        for v in 0..self.n {
            assert!(self.mate[v] != NONE || self.dual[v] + offset == 0);
        }
        for b in self.n..2 * self.n {
            if self.blossom_base[b] != NONE && self.dual[b] > 0 {
                assert_eq!(self.blossom_endps[b].len() % 2, 1);
                for (ix, &p) in self.blossom_endps[b].iter().enumerate() {
                    if ix % 2 == 1 {
                        assert_eq!(self.mate[self.endpoint[p]], p ^ 1);
                        assert_eq!(self.mate[self.endpoint[p ^ 1]], p);
                    }
                }
            }
        }
    }

    fn final_mates(&self) -> Vec<usize> {
        let mates: Vec<usize> = self
            .mate
            .iter()
            .map(|&p| if p == NONE { NONE } else { self.endpoint[p] })
            .collect();
        for v in 0..self.n {
            debug_assert!(mates[v] == NONE || mates[mates[v]] == v);
        }
        mates
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice, extract_syndrome, sample_errors};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mates(n: usize, edges: &[(usize, usize, i64)], maxcard: bool) -> Vec<usize> {
        max_weight_matching(n, edges, maxcard).0
    }

    #[test]
    fn matcher_basic_cases() {
        assert_eq!(mates(0, &[], false), Vec::<usize>::new());
        assert_eq!(mates(2, &[(0, 1, 1)], false), vec![1, 0]);
        assert_eq!(mates(4, &[(1, 2, 10), (2, 3, 11)], false), vec![NONE, NONE, 3, 2]);
        // Cardinality beats weight when forced.
        let edges = [(1, 2, 5), (2, 3, 11), (3, 4, 5)];
        assert_eq!(mates(5, &edges, false), vec![NONE, NONE, 3, 2, NONE]);
        assert_eq!(mates(5, &edges, true), vec![NONE, 2, 1, 4, 3]);
    }

    #[test]
    fn matcher_negative_weights() {
        let edges = [(1, 2, 2), (1, 3, -2), (2, 3, 1), (2, 4, -1), (3, 4, -6)];
        assert_eq!(mates(5, &edges, false), vec![NONE, 2, 1, NONE, NONE]);
        assert_eq!(mates(5, &edges, true), vec![NONE, 3, 4, 1, 2]);
    }

    #[test]
    fn matcher_blossom_augmentation() {
        let edges = [(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)];
        assert_eq!(mates(5, &edges, false), vec![NONE, 2, 1, 4, 3]);
        let edges = [(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7), (1, 6, 5), (4, 5, 6)];
        assert_eq!(mates(7, &edges, false), vec![NONE, 6, 3, 2, 5, 4, 1]);
    }

    #[test]
    fn matcher_relabel_t_blossom() {
        let edges = [(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)];
        assert_eq!(mates(7, &edges, false), vec![NONE, 6, 3, 2, 5, 4, 1]);
        let edges = [(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 3), (3, 6, 4)];
        assert_eq!(mates(7, &edges, false), vec![NONE, 2, 1, 6, 5, 4, 3]);
    }

    #[test]
    fn matcher_nested_blossoms() {
        let edges = [(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)];
        assert_eq!(mates(7, &edges, false), vec![NONE, 3, 4, 1, 2, 6, 5]);
        let edges = [
            (1, 2, 8), (1, 3, 8), (2, 3, 10), (2, 4, 12), (3, 5, 12),
            (4, 5, 14), (4, 6, 12), (5, 7, 12), (6, 7, 14), (7, 8, 12),
        ];
        assert_eq!(mates(9, &edges, false), vec![NONE, 2, 1, 5, 6, 3, 4, 8, 7]);
    }

    #[test]
    fn matcher_t_blossom_expansion() {
        let edges = [
            (1, 2, 23), (1, 5, 22), (1, 6, 15), (2, 3, 25),
            (3, 4, 22), (4, 5, 25), (4, 8, 14), (5, 7, 13),
        ];
        assert_eq!(mates(9, &edges, false), vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4]);
        let edges = [
            (1, 2, 19), (1, 3, 20), (1, 8, 8), (2, 3, 25), (2, 4, 18),
            (3, 5, 18), (4, 5, 13), (4, 7, 7), (5, 6, 7),
        ];
        assert_eq!(mates(9, &edges, false), vec![NONE, 8, 3, 2, 7, 6, 5, 4, 1]);
    }

    #[test]
    fn matcher_tricky_expansion_cases() {
        let edges = [
            (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
            (1, 6, 30), (3, 9, 35), (4, 8, 35), (5, 7, 26), (9, 10, 5),
        ];
        assert_eq!(mates(11, &edges, false), vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]);
        let edges = [
            (1, 2, 45), (1, 5, 45), (2, 3, 50), (3, 4, 45), (4, 5, 50),
            (1, 6, 30), (3, 9, 35), (4, 8, 28), (5, 7, 26), (9, 10, 5),
        ];
        assert_eq!(mates(11, &edges, false), vec![NONE, 6, 3, 2, 8, 7, 1, 5, 4, 10, 9]);
        let edges = [
            (1, 2, 45), (1, 7, 45), (2, 3, 50), (3, 4, 45), (4, 5, 95), (4, 6, 94),
            (5, 6, 94), (6, 7, 50), (1, 8, 30), (3, 11, 35), (5, 9, 36), (7, 10, 26),
            (11, 12, 5),
        ];
        assert_eq!(mates(13, &edges, false), vec![NONE, 8, 3, 2, 6, 9, 4, 10, 1, 5, 7, 12, 11]);
        let edges = [
            (1, 2, 40), (1, 3, 40), (2, 3, 60), (2, 4, 55), (3, 5, 55), (4, 5, 50),
            (1, 8, 15), (5, 7, 30), (7, 6, 10), (8, 10, 10), (4, 9, 30),
        ];
        assert_eq!(mates(11, &edges, false), vec![NONE, 2, 1, 5, 9, 3, 7, 6, 10, 4, 8]);
    }

    #[test]
    fn empty_syndrome_gives_empty_graph() {
        let lat = build_lattice(4).unwrap();
        let g = build_defect_graph(&lat, &Syndrome::trivial(lat.n_vertices)).unwrap();
        assert!(g.defects.is_empty());
        let (pattern, scans) = mwpm_decode(&g);
        assert_eq!(pattern.weight(), 0);
        assert_eq!(scans, 0);
        assert_eq!(brute_force_matching(&g).unwrap(), 0);
    }

    #[test]
    fn adjacent_defects_have_weight_one() {
        // Two vertices sharing one qubit, from a single interior error.
        let lat = build_lattice(3).unwrap();
        let q = (0..lat.n_data).find(|&q| lat.qubit_incidence[q].len() == 2).unwrap();
        let s = extract_syndrome(&lat, &ErrorPattern::from_indices(lat.n_data, &[q])).unwrap();
        let g = build_defect_graph(&lat, &s).unwrap();
        assert_eq!(g.defects.len(), 2);
        assert_eq!(g.weights[0][1], 1);
        assert_eq!(g.paths[0][1], vec![q]);
    }

    #[test]
    fn boundary_weight_one_next_to_rough_edge() {
        let lat = build_lattice(3).unwrap();
        let q = (0..lat.n_data).find(|&q| lat.qubit_incidence[q].len() == 1).unwrap();
        let s = extract_syndrome(&lat, &ErrorPattern::from_indices(lat.n_data, &[q])).unwrap();
        let g = build_defect_graph(&lat, &s).unwrap();
        assert_eq!(g.defects.len(), 1);
        assert_eq!(g.boundary_nodes[0], 1);
        let (pattern, _) = mwpm_decode(&g);
        assert!(pattern.bits[q]);
        assert_eq!(pattern.weight(), 1);
    }

    #[test]
    fn distant_pair_beats_boundaries() {
        // Defects at distance 3 whose boundary distances are 3 each:
        // pairing (3) beats two boundary legs (6).
        let lat = build_lattice(6).unwrap();
        let mut values = vec![1i8; lat.n_vertices];
        values[2 * 6 + 2] = -1;
        values[2 * 6 + 5] = -1;
        let g = build_defect_graph(&lat, &Syndrome { values: values.clone() }).unwrap();
        assert_eq!(g.weights[0][1], 3);
        assert_eq!(g.boundary_nodes[0], 3);
        assert_eq!(g.boundary_nodes[1], 3);
        let sol = mwpm_solve(&g);
        assert_eq!(sol.weight, 3);
        assert_eq!(sol.pairs, vec![Some(1), Some(0)]);
        assert_eq!(brute_force_matching(&g).unwrap(), 3);
        let syn = extract_syndrome(&lat, &sol.pattern).unwrap();
        assert_eq!(syn.values, values);
    }

    #[test]
    fn triangle_inequality_and_symmetry() {
        let lat = build_lattice(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = sample_errors(&lat, 0.15, &mut rng).unwrap();
        let s = extract_syndrome(&lat, &e).unwrap();
        let g = build_defect_graph(&lat, &s).unwrap();
        let m = g.defects.len();
        for a in 0..m {
            assert_eq!(g.weights[a][a], 0);
            assert_eq!(g.paths[a].len(), m);
            assert_eq!(g.boundary_paths[a].len(), g.boundary_nodes[a] as usize);
            for b in 0..m {
                assert_eq!(g.weights[a][b], g.weights[b][a]);
                assert_eq!(g.paths[a][b].len(), g.weights[a][b] as usize);
                for c in 0..m {
                    assert!(g.weights[a][b] <= g.weights[a][c] + g.weights[c][b]);
                }
            }
        }
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for d in [4usize, 6] {
            let lat = build_lattice(d).unwrap();
            while checked < if d == 4 { 25 } else { 50 } {
                let e = sample_errors(&lat, 0.08, &mut rng).unwrap();
                let s = extract_syndrome(&lat, &e).unwrap();
                if s.defects().len() > 8 {
                    continue;
                }
                let g = build_defect_graph(&lat, &s).unwrap();
                let sol = mwpm_solve(&g);
                assert_eq!(sol.weight, brute_force_matching(&g).unwrap());
                let syn = extract_syndrome(&lat, &sol.pattern).unwrap();
                assert_eq!(syn.values, s.values, "correction must reproduce the syndrome");
                assert!(sol.pattern.weight() as i64 <= sol.weight);
                checked += 1;
            }
        }
    }

    #[test]
    fn decode_is_deterministic() {
        let lat = build_lattice(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let e = sample_errors(&lat, 0.2, &mut rng).unwrap();
        let s = extract_syndrome(&lat, &e).unwrap();
        let g1 = build_defect_graph(&lat, &s).unwrap();
        let g2 = build_defect_graph(&lat, &s).unwrap();
        let (p1, it1) = mwpm_decode(&g1);
        let (p2, it2) = mwpm_decode(&g2);
        assert_eq!(p1, p2);
        assert_eq!(it1, it2);
        assert!(it1 > 0);
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let lat = build_lattice(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        loop {
            let e = sample_errors(&lat, 0.3, &mut rng).unwrap();
            let s = extract_syndrome(&lat, &e).unwrap();
            if s.defects().len() > 10 {
                let g = build_defect_graph(&lat, &s).unwrap();
                assert!(matches!(brute_force_matching(&g), Err(Error::TooLarge { .. })));
                break;
            }
        }
    }
}
