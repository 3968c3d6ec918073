//! Ribbon graphs (combinatorial maps) encoded as permutation pairs on half-edges.
//!
//! A ribbon graph on `2E` half-edges is a pair of permutations: `sigma`, whose
//! cycles are the counterclockwise rotations at the vertices, and `alpha`, a
//! fixed-point-free involution pairing each half-edge with the opposite end of
//! its edge. Faces are the orbits of `phi = sigma ∘ alpha` (flip across the
//! edge, then turn left). Connectivity of the graph is transitivity of the
//! action generated by `sigma` and `alpha`.
//!
//! Everything downstream (coordinates, forms, bounds) works with trivalent
//! graphs, where every `sigma` cycle has length 3, but the type itself allows
//! arbitrary valences so that duals (whose vertices are the punctures) can be
//! represented by the same structure.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Index of a half-edge in `0..2E`.
pub type HalfEdge = usize;
/// Index of an (unoriented) edge in `0..E`; edges are numbered by their
/// minimal half-edge.
pub type EdgeIdx = usize;
/// Index of a vertex (a `sigma` cycle), numbered by minimal half-edge.
pub type VertexIdx = usize;
/// Index of a face (a `phi` cycle), numbered by minimal half-edge.
pub type FaceIdx = usize;

/// Default cap on the vertex count accepted by [`enumerate_trivalent`].
/// `V = 8` means 24 half-edges and a 23!! ≈ 1.3e11 raw search space, which is
/// already past what an exhaustive pairing scan should attempt by default.
pub const DEFAULT_VERTEX_CAP: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("sigma acts on {sigma} half-edges but alpha acts on {alpha}")]
    LengthMismatch { sigma: usize, alpha: usize },
    #[error("the number of half-edges must be positive and even, got {0}")]
    BadHalfEdgeCount(usize),
    #[error("sigma is not a permutation (image {value} at half-edge {index})")]
    NotAPermutation { index: usize, value: usize },
    #[error("alpha is not a fixed-point-free involution at half-edge {0}")]
    BadInvolution(usize),
    #[error("the graph is not connected")]
    Disconnected,
    #[error("vertex {vertex} has degree {degree}, expected a trivalent graph")]
    NotTrivalent { vertex: usize, degree: usize },
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("face {face} has {sides} sides; the operation needs a graph all of whose faces are triangles")]
    NotATriangulation { face: usize, sides: usize },
    #[error("edge {0} is a loop (both endpoints at the same puncture) and cannot be contracted")]
    LoopContraction(usize),
    #[error("surface type (g={genus}, n={punctures}) is not hyperbolic: need n ≥ 1 and 2g − 2 + n > 0")]
    NotHyperbolic { genus: usize, punctures: usize },
    #[error("enumeration needs {vertices} vertices, above the cap of {cap}")]
    CapExceeded { vertices: usize, cap: usize },
    #[error("contraction degenerated: {0}")]
    DegenerateContraction(&'static str),
}

/// Serialization schema: the permutations are stored as image arrays.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    half_edges: usize,
    sigma: Vec<usize>,
    alpha: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct RibbonGraph {
    sigma: Vec<usize>,
    alpha: Vec<usize>,
    vertex_of: Vec<VertexIdx>,
    edge_of: Vec<EdgeIdx>,
    face_of: Vec<FaceIdx>,
    vertex_cycles: Vec<Vec<HalfEdge>>,
    edge_pairs: Vec<[HalfEdge; 2]>,
    face_cycles: Vec<Vec<HalfEdge>>,
}

impl TryFrom<RawGraph> for RibbonGraph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        if raw.sigma.len() != raw.half_edges {
            return Err(GraphError::LengthMismatch {
                sigma: raw.sigma.len(),
                alpha: raw.alpha.len(),
            });
        }
        RibbonGraph::new(raw.sigma, raw.alpha)
    }
}

impl From<RibbonGraph> for RawGraph {
    fn from(g: RibbonGraph) -> RawGraph {
        RawGraph {
            half_edges: g.sigma.len(),
            sigma: g.sigma,
            alpha: g.alpha,
        }
    }
}

/// Cycles of a permutation, each listed from its minimal element, sorted by
/// that minimal element. This fixes a deterministic numbering of vertices,
/// edges and faces.
fn orbit_cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = perm[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = perm[cur];
        }
        cycles.push(cycle);
    }
    cycles
}

impl RibbonGraph {
    pub fn new(sigma: Vec<usize>, alpha: Vec<usize>) -> Result<Self, GraphError> {
        let h = sigma.len();
        if alpha.len() != h {
            return Err(GraphError::LengthMismatch {
                sigma: h,
                alpha: alpha.len(),
            });
        }
        if h == 0 || h % 2 != 0 {
            return Err(GraphError::BadHalfEdgeCount(h));
        }
        let mut seen = vec![false; h];
        for (index, &value) in sigma.iter().enumerate() {
            if value >= h || seen[value] {
                return Err(GraphError::NotAPermutation { index, value });
            }
            seen[value] = true;
        }
        for (i, &v) in alpha.iter().enumerate() {
            if v >= h || v == i || alpha[v] != i {
                return Err(GraphError::BadInvolution(i));
            }
        }
        // Connectivity: breadth-first search along both permutations.
        let mut reached = vec![false; h];
        let mut queue = vec![0usize];
        reached[0] = true;
        while let Some(x) = queue.pop() {
            for next in [sigma[x], alpha[x]] {
                if !reached[next] {
                    reached[next] = true;
                    queue.push(next);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(GraphError::Disconnected);
        }

        let vertex_cycles = orbit_cycles(&sigma);
        let phi: Vec<usize> = (0..h).map(|x| sigma[alpha[x]]).collect();
        let face_cycles = orbit_cycles(&phi);
        let mut edge_pairs = Vec::with_capacity(h / 2);
        for x in 0..h {
            if x < alpha[x] {
                edge_pairs.push([x, alpha[x]]);
            }
        }
        let mut vertex_of = vec![0; h];
        for (v, cyc) in vertex_cycles.iter().enumerate() {
            for &x in cyc {
                vertex_of[x] = v;
            }
        }
        let mut face_of = vec![0; h];
        for (f, cyc) in face_cycles.iter().enumerate() {
            for &x in cyc {
                face_of[x] = f;
            }
        }
        let mut edge_of = vec![0; h];
        for (e, pair) in edge_pairs.iter().enumerate() {
            edge_of[pair[0]] = e;
            edge_of[pair[1]] = e;
        }
        Ok(RibbonGraph {
            sigma,
            alpha,
            vertex_of,
            edge_of,
            face_of,
            vertex_cycles,
            edge_pairs,
            face_cycles,
        })
    }

    /// The unique trivalent one-puncture torus graph: two vertices joined by
    /// three parallel edges with matching rotations.
    pub fn theta() -> RibbonGraph {
        RibbonGraph::new(vec![1, 2, 0, 4, 5, 3], vec![3, 4, 5, 0, 1, 2]).expect("theta is valid")
    }

    pub fn num_half_edges(&self) -> usize {
        self.sigma.len()
    }
    pub fn num_vertices(&self) -> usize {
        self.vertex_cycles.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edge_pairs.len()
    }
    pub fn num_faces(&self) -> usize {
        self.face_cycles.len()
    }

    /// Genus from the Euler formula `V − E + F = 2 − 2g`.
    pub fn genus(&self) -> usize {
        let v = self.num_vertices() as isize;
        let e = self.num_edges() as isize;
        let f = self.num_faces() as isize;
        let two_g = 2 - (v - e + f);
        debug_assert!(two_g >= 0 && two_g % 2 == 0, "Euler characteristic of a closed orientable surface");
        (two_g / 2) as usize
    }

    pub fn sigma(&self, h: HalfEdge) -> HalfEdge {
        self.sigma[h]
    }
    pub fn alpha(&self, h: HalfEdge) -> HalfEdge {
        self.alpha[h]
    }
    /// Face step: flip to the opposite half-edge, then turn left.
    pub fn phi(&self, h: HalfEdge) -> HalfEdge {
        self.sigma[self.alpha[h]]
    }

    pub fn vertex_of(&self, h: HalfEdge) -> VertexIdx {
        self.vertex_of[h]
    }
    pub fn edge_of(&self, h: HalfEdge) -> EdgeIdx {
        self.edge_of[h]
    }
    pub fn face_of(&self, h: HalfEdge) -> FaceIdx {
        self.face_of[h]
    }
    pub fn vertex_cycle(&self, v: VertexIdx) -> &[HalfEdge] {
        &self.vertex_cycles[v]
    }
    pub fn face_cycle(&self, f: FaceIdx) -> &[HalfEdge] {
        &self.face_cycles[f]
    }
    pub fn edge_half_edges(&self, e: EdgeIdx) -> [HalfEdge; 2] {
        self.edge_pairs[e]
    }

    pub fn is_trivalent(&self) -> bool {
        self.vertex_cycles.iter().all(|c| c.len() == 3)
    }

    pub fn ensure_trivalent(&self) -> Result<(), GraphError> {
        for (vertex, cyc) in self.vertex_cycles.iter().enumerate() {
            if cyc.len() != 3 {
                return Err(GraphError::NotTrivalent {
                    vertex,
                    degree: cyc.len(),
                });
            }
        }
        Ok(())
    }

    /// True when the edge's two half-edges sit at the same vertex.
    pub fn is_loop_edge(&self, e: EdgeIdx) -> bool {
        let [a, b] = self.edge_pairs[e];
        self.vertex_of[a] == self.vertex_of[b]
    }

    pub fn has_loop(&self) -> bool {
        (0..self.num_edges()).any(|e| self.is_loop_edge(e))
    }

    /// The three edges at a trivalent vertex, in rotation order starting from
    /// the cycle's minimal half-edge. Loops appear twice.
    pub fn vertex_edge_triple(&self, v: VertexIdx) -> [EdgeIdx; 3] {
        let c = &self.vertex_cycles[v];
        debug_assert_eq!(c.len(), 3);
        [self.edge_of[c[0]], self.edge_of[c[1]], self.edge_of[c[2]]]
    }

    /// Poincaré dual: faces become vertices (`sigma' = phi`), edges stay.
    /// Applying it twice restores the original graph exactly, because
    /// `phi ∘ alpha = sigma`.
    pub fn dual(&self) -> RibbonGraph {
        let h = self.num_half_edges();
        let phi: Vec<usize> = (0..h).map(|x| self.phi(x)).collect();
        RibbonGraph::new(phi, self.alpha.clone()).expect("dual of a valid graph is valid")
    }

    /// Conjugate every half-edge label by `perm` (`new = perm[old]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<RibbonGraph, GraphError> {
        let h = self.num_half_edges();
        if perm.len() != h {
            return Err(GraphError::LengthMismatch {
                sigma: h,
                alpha: perm.len(),
            });
        }
        let mut sigma = vec![0; h];
        let mut alpha = vec![0; h];
        for old in 0..h {
            sigma[perm[old]] = perm[self.sigma[old]];
            alpha[perm[old]] = perm[self.alpha[old]];
        }
        RibbonGraph::new(sigma, alpha)
    }

    /// Lexicographically minimal traversal encoding and its multiplicity.
    ///
    /// For each root half-edge, a breadth-first traversal along `sigma` then
    /// `alpha` relabels the half-edges in first-visit order; the encoding is
    /// the relabeled `(sigma, alpha)` pair. Because the action is transitive,
    /// two roots produce identical encodings exactly when an automorphism maps
    /// one to the other, and automorphisms act freely on half-edges; hence the
    /// number of minimizing roots is the order of the automorphism group.
    pub fn canonical(&self) -> CanonicalForm {
        let (key, aut_order) = min_encoding(&self.sigma, &self.alpha);
        let h = self.num_half_edges();
        let graph = RibbonGraph::new(key[..h].to_vec(), key[h..].to_vec())
            .expect("relabeling preserves validity");
        CanonicalForm {
            graph,
            aut_order,
            key,
        }
    }

    /// Order of the automorphism group: half-edge permutations commuting with
    /// both `sigma` and `alpha`.
    pub fn aut_order(&self) -> usize {
        self.canonical().aut_order
    }

    pub fn is_isomorphic(&self, other: &RibbonGraph) -> bool {
        self.num_half_edges() == other.num_half_edges()
            && min_encoding(&self.sigma, &self.alpha).0
                == min_encoding(&other.sigma, &other.alpha).0
    }

    /// Contract an edge joining two distinct punctures of a triangulation
    /// graph (a graph whose faces are all triangles; its dual is trivalent).
    ///
    /// The move shrinks the edge and collapses the triangle on each side of it
    /// into a single arc, merging the two punctures. It is carried out on the
    /// dual trivalent graph, where it reads: delete the dual edge, then
    /// repeatedly erase 1-valent vertices (with their pendant edge) and smooth
    /// 2-valent vertices (fusing their two edges) until the graph is trivalent
    /// again. The result has one puncture fewer, three edges fewer, and the
    /// same genus.
    pub fn contract_puncture_pair(&self, e: EdgeIdx) -> Result<RibbonGraph, GraphError> {
        if e >= self.num_edges() {
            return Err(GraphError::EdgeOutOfRange(e));
        }
        for (face, cyc) in self.face_cycles.iter().enumerate() {
            if cyc.len() != 3 {
                return Err(GraphError::NotATriangulation {
                    face,
                    sides: cyc.len(),
                });
            }
        }
        let [h1, h2] = self.edge_pairs[e];
        if self.vertex_of[h1] == self.vertex_of[h2] {
            return Err(GraphError::LoopContraction(e));
        }

        // Work on the dual (trivalent) side; `alpha` and half-edge identities
        // are shared, so the chosen edge is the same half-edge pair there.
        let gamma = self.dual();
        let mut scene = CascadeScene::new(&gamma);
        scene.delete_edge_and_simplify(h1)?;
        let gamma_contracted = scene.finish()?;
        gamma_contracted.ensure_trivalent()?;
        if gamma_contracted.num_faces() + 1 != gamma.num_faces()
            || gamma_contracted.num_edges() + 3 != gamma.num_edges()
            || gamma_contracted.genus() != gamma.genus()
        {
            return Err(GraphError::DegenerateContraction(
                "puncture/edge/genus bookkeeping failed after the collapse",
            ));
        }
        Ok(gamma_contracted.dual())
    }

    /// Sigma and alpha as image arrays (for hashing and reports).
    pub fn permutations(&self) -> (&[usize], &[usize]) {
        (&self.sigma, &self.alpha)
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub graph: RibbonGraph,
    pub aut_order: usize,
    /// Concatenated relabeled `(sigma, alpha)` images: a dedup/sort key.
    pub key: Vec<usize>,
}

/// Minimal traversal encoding over all roots; see [`RibbonGraph::canonical`].
/// Returns the concatenated `(sigma, alpha)` images and the number of roots
/// achieving the minimum (= order of the automorphism group).
pub(crate) fn min_encoding(sigma: &[usize], alpha: &[usize]) -> (Vec<usize>, usize) {
    let h = sigma.len();
    let mut label = vec![usize::MAX; h];
    let mut order: Vec<usize> = Vec::with_capacity(h);
    let mut cur = vec![0usize; 2 * h];
    let mut best: Vec<usize> = Vec::new();
    let mut count = 0usize;
    for root in 0..h {
        label.fill(usize::MAX);
        order.clear();
        label[root] = 0;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            let s = sigma[x];
            if label[s] == usize::MAX {
                label[s] = order.len();
                order.push(s);
            }
            let a = alpha[x];
            if label[a] == usize::MAX {
                label[a] = order.len();
                order.push(a);
            }
        }
        debug_assert_eq!(order.len(), h, "traversal must reach every half-edge");
        for old in 0..h {
            cur[label[old]] = label[sigma[old]];
            cur[h + label[old]] = label[alpha[old]];
        }
        if best.is_empty() {
            best = cur.clone();
            count = 1;
        } else {
            match cur.as_slice().cmp(best.as_slice()) {
                std::cmp::Ordering::Less => {
                    best.copy_from_slice(&cur);
                    count = 1;
                }
                std::cmp::Ordering::Equal => count += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    (best, count)
}

/// Mutable delete/smooth scene for edge contraction, tracking live half-edges
/// with both rotation directions so cycle splicing stays O(1).
struct CascadeScene {
    sigma: Vec<usize>,
    sigma_inv: Vec<usize>,
    alpha: Vec<usize>,
    alive: Vec<bool>,
}

impl CascadeScene {
    fn new(g: &RibbonGraph) -> Self {
        let h = g.num_half_edges();
        let mut sigma_inv = vec![0; h];
        for x in 0..h {
            sigma_inv[g.sigma[x]] = x;
        }
        CascadeScene {
            sigma: g.sigma.clone(),
            sigma_inv,
            alpha: g.alpha.clone(),
            alive: vec![true; h],
        }
    }

    /// Remove `x` from its rotation cycle. Returns a surviving member of the
    /// cycle, or `None` when `x` was the last one.
    fn splice_out(&mut self, x: usize) -> Option<usize> {
        debug_assert!(self.alive[x]);
        self.alive[x] = false;
        let next = self.sigma[x];
        if next == x {
            return None;
        }
        let prev = self.sigma_inv[x];
        self.sigma[prev] = next;
        self.sigma_inv[next] = prev;
        Some(next)
    }

    fn cycle_len(&self, x: usize) -> usize {
        let mut len = 1;
        let mut cur = self.sigma[x];
        while cur != x {
            len += 1;
            cur = self.sigma[cur];
        }
        len
    }

    /// Delete the edge through `h`, then restore trivalence by erasing
    /// pendant vertices and smoothing 2-valent ones.
    fn delete_edge_and_simplify(&mut self, h: usize) -> Result<(), GraphError> {
        let mut worklist: Vec<usize> = Vec::new();
        let partner = self.alpha[h];
        for x in [h, partner] {
            if let Some(survivor) = self.splice_out(x) {
                worklist.push(survivor);
            }
        }
        while let Some(x) = worklist.pop() {
            if !self.alive[x] {
                continue;
            }
            match self.cycle_len(x) {
                3.. => {}
                2 => {
                    // Smooth: fuse the two edges at this vertex into one.
                    let a = x;
                    let b = self.sigma[x];
                    let pa = self.alpha[a];
                    let pb = self.alpha[b];
                    if pa == b {
                        return Err(GraphError::DegenerateContraction(
                            "collapse produced a free circle",
                        ));
                    }
                    self.alpha[pa] = pb;
                    self.alpha[pb] = pa;
                    self.alive[a] = false;
                    self.alive[b] = false;
                }
                1 => {
                    // Pendant vertex: erase it together with its edge.
                    let z = x;
                    let partner = self.alpha[z];
                    self.alive[z] = false;
                    if let Some(survivor) = self.splice_out(partner) {
                        worklist.push(survivor);
                    }
                }
                0 => unreachable!("cycle length is at least 1"),
            }
        }
        Ok(())
    }

    /// Compact the surviving half-edges into `0..k` and build the graph.
    fn finish(&self) -> Result<RibbonGraph, GraphError> {
        let live: Vec<usize> = (0..self.alive.len()).filter(|&x| self.alive[x]).collect();
        if live.is_empty() {
            return Err(GraphError::DegenerateContraction("everything collapsed"));
        }
        let mut new_id = vec![usize::MAX; self.alive.len()];
        for (i, &x) in live.iter().enumerate() {
            new_id[x] = i;
        }
        let sigma = live.iter().map(|&x| new_id[self.sigma[x]]).collect();
        let alpha = live.iter().map(|&x| new_id[self.alpha[x]]).collect();
        RibbonGraph::new(sigma, alpha)
    }
}

/// Statistics from an enumeration scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    pub pairings_scanned: u64,
    /// Labeled pairings that were connected with the requested face count.
    pub labeled_valid: u64,
    pub classes: usize,
}

/// All trivalent ribbon graph isomorphism classes of genus `g` with `n`
/// punctures (faces), as canonical representatives in deterministic order.
///
/// The scan fixes `sigma` as `V` disjoint 3-cycles and enumerates every
/// fixed-point-free pairing of the `3V` half-edges, keeping the connected ones
/// with `n` faces (which forces genus `g` by the Euler formula) and deduping
/// by canonical form.
pub fn enumerate_trivalent(
    genus: usize,
    punctures: usize,
    vertex_cap: usize,
) -> Result<Vec<RibbonGraph>, GraphError> {
    Ok(enumerate_trivalent_with_stats(genus, punctures, vertex_cap)?.0)
}

pub fn enumerate_trivalent_with_stats(
    genus: usize,
    punctures: usize,
    vertex_cap: usize,
) -> Result<(Vec<RibbonGraph>, EnumerationStats), GraphError> {
    if punctures == 0 || 2 * genus + punctures <= 2 {
        return Err(GraphError::NotHyperbolic { genus, punctures });
    }
    let vertices = 4 * genus + 2 * punctures - 4;
    if vertices > vertex_cap {
        return Err(GraphError::CapExceeded {
            vertices,
            cap: vertex_cap,
        });
    }
    let h = 3 * vertices;
    let mut sigma = vec![0usize; h];
    for k in 0..vertices {
        sigma[3 * k] = 3 * k + 1;
        sigma[3 * k + 1] = 3 * k + 2;
        sigma[3 * k + 2] = 3 * k;
    }

    let mut scan = PairingScan::new(&sigma, punctures);
    scan.run();

    let mut reps: Vec<(Vec<usize>, RibbonGraph)> = scan
        .classes
        .into_iter()
        .map(|(key, _)| {
            let g = RibbonGraph::new(key[..h].to_vec(), key[h..].to_vec())
                .expect("canonical encoding is a valid graph");
            (key, g)
        })
        .collect();
    reps.sort_by(|a, b| a.0.cmp(&b.0));
    let stats = EnumerationStats {
        pairings_scanned: scan.pairings_scanned,
        labeled_valid: scan.labeled_valid,
        classes: reps.len(),
    };
    let graphs = reps.into_iter().map(|(_, g)| g).collect();
    Ok((graphs, stats))
}

/// Exhaustive fixed-point-free pairing scan against a fixed `sigma`.
struct PairingScan {
    sigma: Vec<usize>,
    faces_wanted: usize,
    alpha: Vec<usize>,
    pairings_scanned: u64,
    labeled_valid: u64,
    classes: HashMap<Vec<usize>, u64>,
    // Scratch buffers reused across candidates.
    dsu: Vec<usize>,
    dsu_base: Vec<usize>,
    visited: Vec<bool>,
}

const UNPAIRED: usize = usize::MAX;

impl PairingScan {
    fn new(sigma: &[usize], faces_wanted: usize) -> Self {
        let h = sigma.len();
        // Union half-edges around each vertex once; candidates start from a
        // copy of this base and only add the pairing unions.
        let mut dsu_base: Vec<usize> = (0..h).collect();
        for x in 0..h {
            let root = dsu_root(&mut dsu_base, x);
            let s = dsu_root(&mut dsu_base, sigma[x]);
            dsu_base[s] = root;
        }
        PairingScan {
            sigma: sigma.to_vec(),
            faces_wanted,
            alpha: vec![UNPAIRED; h],
            pairings_scanned: 0,
            labeled_valid: 0,
            classes: HashMap::new(),
            dsu: vec![0; h],
            dsu_base,
            visited: vec![false; h],
        }
    }

    fn run(&mut self) {
        self.extend(0);
    }

    fn extend(&mut self, from: usize) {
        let h = self.sigma.len();
        let mut first = from;
        while first < h && self.alpha[first] != UNPAIRED {
            first += 1;
        }
        if first == h {
            self.inspect_candidate();
            return;
        }
        for mate in (first + 1)..h {
            if self.alpha[mate] != UNPAIRED {
                continue;
            }
            self.alpha[first] = mate;
            self.alpha[mate] = first;
            self.extend(first + 1);
            self.alpha[first] = UNPAIRED;
            self.alpha[mate] = UNPAIRED;
        }
    }

    fn inspect_candidate(&mut self) {
        self.pairings_scanned += 1;
        let h = self.sigma.len();
        // Connectivity.
        self.dsu.copy_from_slice(&self.dsu_base);
        for x in 0..h {
            let a = dsu_root(&mut self.dsu, x);
            let b = dsu_root(&mut self.dsu, self.alpha[x]);
            if a != b {
                self.dsu[a] = b;
            }
        }
        let root0 = dsu_root(&mut self.dsu, 0);
        for x in 1..h {
            if dsu_root(&mut self.dsu, x) != root0 {
                return;
            }
        }
        // Face count: orbits of sigma ∘ alpha.
        self.visited.fill(false);
        let mut faces = 0;
        for start in 0..h {
            if self.visited[start] {
                continue;
            }
            faces += 1;
            if faces > self.faces_wanted {
                return;
            }
            let mut cur = start;
            while !self.visited[cur] {
                self.visited[cur] = true;
                cur = self.sigma[self.alpha[cur]];
            }
        }
        if faces != self.faces_wanted {
            return;
        }
        self.labeled_valid += 1;
        let (key, _) = min_encoding(&self.sigma, &self.alpha);
        *self.classes.entry(key).or_insert(0) += 1;
    }
}

fn dsu_root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}
