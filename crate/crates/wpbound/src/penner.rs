//! λ-length (Penner) coordinates on the cell of a trivalent ribbon graph.
//!
//! A cell point assigns a positive λ to every edge. From these the module
//! derives the simplicial coordinates `X_e`, the α-lengths of the sectors at
//! the vertices, and the horocyclic sums `ρ_i` — one per face/puncture —
//! whose level set `ρ_i = 1` cuts the projectivized cell out of the positive
//! orthant. Everything is homogeneous of degree −1 in λ, which is what makes
//! the radial slice gauge work.
//!
//! Two independent routes compute `ρ_i`: summing `X_e` along the face cycle
//! with traversal multiplicity, and twice the sum of the α-lengths of the
//! traversed sectors. They agree identically; the sector route is primary and
//! also yields the analytic partial derivatives `∂ρ_i/∂λ_e`.

use crate::ribbon_graph::{EdgeIdx, FaceIdx, GraphError, HalfEdge, RibbonGraph};
use serde::Serialize;
use thiserror::Error;

/// Default tolerance for membership in the slice `ρ_i = 1`.
pub const DEFAULT_SLICE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PennerError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("lambda has {got} entries, the graph has {expected} edges")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lambda must be positive and finite: edge {edge} has {value}")]
    BadLambda { edge: usize, value: f64 },
    #[error("operation is specific to one-puncture graphs, this graph has {0} faces")]
    WrongPunctureCount(usize),
    #[error("total horocyclic sum must be positive to normalize, got {0}")]
    NonPositiveRho(f64),
}

pub fn check_lambda(graph: &RibbonGraph, lambda: &[f64]) -> Result<(), PennerError> {
    graph.ensure_trivalent()?;
    if lambda.len() != graph.num_edges() {
        return Err(PennerError::DimensionMismatch {
            expected: graph.num_edges(),
            got: lambda.len(),
        });
    }
    for (edge, &value) in lambda.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(PennerError::BadLambda { edge, value });
        }
    }
    Ok(())
}

/// α-length of the sector opposite to the slot `h`: the edge of `h` over the
/// product of the other two edges at its vertex. A loop contributes its λ on
/// both sides it occupies.
pub fn alpha_length(graph: &RibbonGraph, lambda: &[f64], h: HalfEdge) -> f64 {
    let e = graph.edge_of(h);
    let f = graph.edge_of(graph.sigma(h));
    let g = graph.edge_of(graph.sigma(graph.sigma(h)));
    lambda[e] / (lambda[f] * lambda[g])
}

/// Simplicial coordinate of an edge: the sum over its two ends of
/// `f/(e·g) + g/(e·f) − e/(f·g)`, where `f` and `g` are the other two edges
/// at that end (read from the rotation, so a loop sees itself).
pub fn simplicial_coordinate(graph: &RibbonGraph, lambda: &[f64], e: EdgeIdx) -> f64 {
    let mut sum = 0.0;
    for h in graph.edge_half_edges(e) {
        let le = lambda[graph.edge_of(h)];
        let lf = lambda[graph.edge_of(graph.sigma(h))];
        let lg = lambda[graph.edge_of(graph.sigma(graph.sigma(h)))];
        sum += lf / (le * lg) + lg / (le * lf) - le / (lf * lg);
    }
    sum
}

pub fn simplicial_coordinates(graph: &RibbonGraph, lambda: &[f64]) -> Vec<f64> {
    (0..graph.num_edges())
        .map(|e| simplicial_coordinate(graph, lambda, e))
        .collect()
}

/// The slot whose α-length is the sector the face traversal crosses when it
/// leaves `h`: the third slot at the vertex where `edge(h)` meets `edge(φh)`.
fn sector_slot(graph: &RibbonGraph, h: HalfEdge) -> HalfEdge {
    graph.sigma(graph.sigma(graph.alpha(h)))
}

/// Horocyclic sum of a face: twice the α-lengths of the traversed sectors.
pub fn rho_face(graph: &RibbonGraph, lambda: &[f64], face: FaceIdx) -> f64 {
    2.0 * graph
        .face_cycle(face)
        .iter()
        .map(|&h| alpha_length(graph, lambda, sector_slot(graph, h)))
        .sum::<f64>()
}

/// Horocyclic sum of a face computed the other way: the simplicial
/// coordinates of the edges along the face cycle, with multiplicity.
pub fn rho_face_path(graph: &RibbonGraph, lambda: &[f64], face: FaceIdx) -> f64 {
    graph
        .face_cycle(face)
        .iter()
        .map(|&h| simplicial_coordinate(graph, lambda, graph.edge_of(h)))
        .sum()
}

pub fn rho_faces(graph: &RibbonGraph, lambda: &[f64]) -> Vec<f64> {
    (0..graph.num_faces())
        .map(|i| rho_face(graph, lambda, i))
        .collect()
}

/// Total horocyclic sum `ρ = Σ_i ρ_i`; identically `2 Σ_e X_e`.
pub fn rho_total(graph: &RibbonGraph, lambda: &[f64]) -> f64 {
    (0..graph.num_faces())
        .map(|i| rho_face(graph, lambda, i))
        .sum()
}

/// Analytic partial `∂ρ_i/∂λ_e` from the sector sum: each sector term
/// `λ_C/(λ_A·λ_B)` differentiates to `±T/λ_e` per occurrence of `e` in its
/// numerator/denominator (occurrences can repeat when the sector's edges
/// coincide on a loop).
pub fn drho_dlambda(graph: &RibbonGraph, lambda: &[f64], face: FaceIdx, e: EdgeIdx) -> f64 {
    let mut acc = 0.0;
    for &h in graph.face_cycle(face) {
        let a_slot = graph.alpha(h);
        let b_slot = graph.sigma(a_slot);
        let c_slot = graph.sigma(b_slot);
        let ea = graph.edge_of(a_slot);
        let eb = graph.edge_of(b_slot);
        let ec = graph.edge_of(c_slot);
        let mut mult = 0i32;
        if ec == e {
            mult += 1;
        }
        if ea == e {
            mult -= 1;
        }
        if eb == e {
            mult -= 1;
        }
        if mult != 0 {
            acc += f64::from(mult) * lambda[ec] / (lambda[ea] * lambda[eb]);
        }
    }
    2.0 * acc / lambda[e]
}

/// All partials at once: `matrix[face][edge] = ∂ρ_face/∂λ_edge`.
pub fn drho_matrix(graph: &RibbonGraph, lambda: &[f64]) -> Vec<Vec<f64>> {
    (0..graph.num_faces())
        .map(|i| {
            (0..graph.num_edges())
                .map(|e| drho_dlambda(graph, lambda, i, e))
                .collect()
        })
        .collect()
}

pub fn scale(lambda: &[f64], t: f64) -> Vec<f64> {
    lambda.iter().map(|&x| t * x).collect()
}

/// Rescale a one-puncture λ onto the slice `ρ = 1`. Since ρ is homogeneous of
/// degree −1, multiplying λ by ρ(λ) lands exactly on the slice.
pub fn normalize_to_slice(graph: &RibbonGraph, lambda: &[f64]) -> Result<Vec<f64>, PennerError> {
    check_lambda(graph, lambda)?;
    if graph.num_faces() != 1 {
        return Err(PennerError::WrongPunctureCount(graph.num_faces()));
    }
    let rho = rho_total(graph, lambda);
    if !(rho > 0.0) {
        return Err(PennerError::NonPositiveRho(rho));
    }
    Ok(scale(lambda, rho))
}

/// Everything one wants to know about a cell point in one pass.
#[derive(Debug, Clone, Serialize)]
pub struct DomainDiagnostics {
    /// Simplicial coordinate per edge.
    pub x: Vec<f64>,
    /// Horocyclic sum per face (sector route).
    pub rho: Vec<f64>,
    pub rho_total: f64,
    /// Minimal λ over the edges.
    pub min_lambda: f64,
    /// Triangle inequality `e ≤ f + g` for every edge at every vertex.
    pub triangle_ok: bool,
    /// All `X_e > 0` and every `|ρ_i − 1| ≤ tol`.
    pub in_domain: bool,
    /// Minimal λ exceeds 4 (a theorem inside the domain; reported, not assumed).
    pub min_lambda_gt_4: bool,
    /// `ρ < 8V/μ` with μ the minimal λ (a theorem under the triangle
    /// inequalities; reported, not assumed).
    pub rho_upper_ok: bool,
}

pub fn diagnostics(
    graph: &RibbonGraph,
    lambda: &[f64],
    slice_tol: f64,
) -> Result<DomainDiagnostics, PennerError> {
    check_lambda(graph, lambda)?;
    let x = simplicial_coordinates(graph, lambda);
    let rho = rho_faces(graph, lambda);
    let rho_total: f64 = rho.iter().sum();
    let min_lambda = lambda.iter().cloned().fold(f64::INFINITY, f64::min);
    let triangle_ok = triangle_inequalities_hold(graph, lambda);
    let in_domain =
        x.iter().all(|&v| v > 0.0) && rho.iter().all(|&r| (r - 1.0).abs() <= slice_tol);
    let min_lambda_gt_4 = min_lambda > 4.0;
    let rho_upper_ok = rho_total < 8.0 * graph.num_vertices() as f64 / min_lambda;
    Ok(DomainDiagnostics {
        x,
        rho,
        rho_total,
        min_lambda,
        triangle_ok,
        in_domain,
        min_lambda_gt_4,
        rho_upper_ok,
    })
}

/// `e ≤ f + g` for each of the three edges at every vertex.
pub fn triangle_inequalities_hold(graph: &RibbonGraph, lambda: &[f64]) -> bool {
    (0..graph.num_vertices()).all(|v| {
        let [a, b, c] = graph.vertex_edge_triple(v);
        let (la, lb, lc) = (lambda[a], lambda[b], lambda[c]);
        la <= lb + lc && lb <= la + lc && lc <= la + lb
    })
}
