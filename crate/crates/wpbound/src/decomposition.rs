//! Linking choices, chains, wheels, and the integration lemmas.
//!
//! A *linking choice* designates one of the three edge slots at every
//! trivalent vertex as the minimal one; the other two slots are *linked*
//! (they form the vertex's bond). Following bonds from edge to edge
//! partitions the edge set into *chains* — open paths ending on two minimal
//! slots, or closed cycles. Every vertex hosts exactly one chain passing
//! through its bond and exactly one chain end on its minimal slot, so the
//! ends of chains define a map from chains to chains ("where do my ends
//! land"), and the *wheels* of the decomposition are closures under that
//! map.
//!
//! [`decompose`] reproduces the greedy construction: seed a wheel at the
//! chain of the given edge (or at the chain its first end points to when the
//! seed chain cannot stand on its own), close it up, attach every chain both
//! of whose ends land on settled structure, and when a chain has exactly one
//! settled end, use it as the bridge to the next wheel. On a connected graph
//! this always exhausts the edge set; the stuck case is still reported as a
//! structured error carrying the partial result.
//!
//! The second half of the module checks the per-edge integration lemmas
//! numerically: each lemma's left-hand side is evaluated by adaptive
//! quadrature over its own region (ratio bounds from linking, triangle
//! inequalities, λ > 4) and compared against its constant.

use crate::mc::{self, McError, QuadResult};
use crate::ribbon_graph::{EdgeIdx, GraphError, HalfEdge, RibbonGraph, VertexIdx};
use serde::Serialize;
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DecompositionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("choice must pick one of the 3 slots at each of the {expected} vertices")]
    BadChoiceShape { expected: usize, got: usize },
    #[error("slot {slot} does not sit at vertex {vertex}")]
    SlotNotAtVertex { vertex: VertexIdx, slot: HalfEdge },
    #[error("edge {edge} is not incident to vertex {vertex}")]
    EdgeNotAtVertex { vertex: VertexIdx, edge: EdgeIdx },
    #[error("seed edge {0} out of range")]
    SeedOutOfRange(EdgeIdx),
    #[error("decomposition stuck with {unassigned} chains unabsorbed")]
    Stuck {
        partial: Box<Decomposition>,
        unassigned: usize,
    },
}

/// One slot per vertex designated as minimal; the other two slots at each
/// vertex are linked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingChoice {
    pub minimal_at: Vec<HalfEdge>,
}

impl LinkingChoice {
    pub fn new(graph: &RibbonGraph, minimal_at: Vec<HalfEdge>) -> Result<Self, DecompositionError> {
        graph.ensure_trivalent()?;
        if minimal_at.len() != graph.num_vertices() {
            return Err(DecompositionError::BadChoiceShape {
                expected: graph.num_vertices(),
                got: minimal_at.len(),
            });
        }
        for (v, &slot) in minimal_at.iter().enumerate() {
            if !graph.vertex_cycle(v).contains(&slot) {
                return Err(DecompositionError::SlotNotAtVertex { vertex: v, slot });
            }
        }
        Ok(LinkingChoice { minimal_at })
    }

    /// Designate an edge (rather than a slot) per vertex; for a loop the
    /// smaller of its two slots is taken.
    pub fn from_minimal_edges(
        graph: &RibbonGraph,
        edges: &[EdgeIdx],
    ) -> Result<Self, DecompositionError> {
        graph.ensure_trivalent()?;
        if edges.len() != graph.num_vertices() {
            return Err(DecompositionError::BadChoiceShape {
                expected: graph.num_vertices(),
                got: edges.len(),
            });
        }
        let mut minimal_at = Vec::with_capacity(edges.len());
        for (v, &e) in edges.iter().enumerate() {
            let slot = graph
                .vertex_cycle(v)
                .iter()
                .copied()
                .find(|&h| graph.edge_of(h) == e)
                .ok_or(DecompositionError::EdgeNotAtVertex { vertex: v, edge: e })?;
            minimal_at.push(slot);
        }
        Ok(LinkingChoice { minimal_at })
    }

    /// The choice a λ-assignment induces: the slot of smallest λ at each
    /// vertex, ties broken toward the smaller slot.
    pub fn from_lambda(graph: &RibbonGraph, lambda: &[f64]) -> Self {
        let minimal_at = (0..graph.num_vertices())
            .map(|v| {
                *graph
                    .vertex_cycle(v)
                    .iter()
                    .min_by(|&&a, &&b| {
                        lambda[graph.edge_of(a)]
                            .total_cmp(&lambda[graph.edge_of(b)])
                            .then(a.cmp(&b))
                    })
                    .unwrap()
            })
            .collect();
        LinkingChoice { minimal_at }
    }

    /// Decode one of the `3^V` choices from a mixed-radix code.
    pub fn nth(graph: &RibbonGraph, mut code: u64) -> Self {
        let minimal_at = (0..graph.num_vertices())
            .map(|v| {
                let slot = graph.vertex_cycle(v)[(code % 3) as usize];
                code /= 3;
                slot
            })
            .collect();
        LinkingChoice { minimal_at }
    }

    /// All `3^V` choices, in mixed-radix order.
    pub fn enumerate_all(graph: &RibbonGraph) -> Vec<Self> {
        let total = 3u64.pow(graph.num_vertices() as u32);
        (0..total).map(|code| Self::nth(graph, code)).collect()
    }

    /// The two linked (non-minimal) slots at a vertex.
    pub fn bond_slots(&self, graph: &RibbonGraph, v: VertexIdx) -> (HalfEdge, HalfEdge) {
        let cyc = graph.vertex_cycle(v);
        let m = self.minimal_at[v];
        let mut it = cyc.iter().copied().filter(|&h| h != m);
        (it.next().unwrap(), it.next().unwrap())
    }
}

/// True when `e ≠ f` meet at some vertex whose designated minimal slot is
/// the remaining third slot there.
pub fn linked(graph: &RibbonGraph, choice: &LinkingChoice, e: EdgeIdx, f: EdgeIdx) -> bool {
    if e == f {
        return false;
    }
    (0..graph.num_vertices()).any(|v| {
        let (p, q) = choice.bond_slots(graph, v);
        let (a, b) = (graph.edge_of(p), graph.edge_of(q));
        (a, b) == (e, f) || (a, b) == (f, e)
    })
}

/// A maximal run of edges joined bond-to-bond. Open chains carry their two
/// free end slots — each is the designated minimal slot at its outer vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub edges: Vec<EdgeIdx>,
    pub closed: bool,
    pub ends: Option<(HalfEdge, HalfEdge)>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// The bonded partner of a slot: the other non-minimal slot at its vertex,
/// or `None` when the slot is the designated minimal (a free chain end).
fn partner(graph: &RibbonGraph, choice: &LinkingChoice, h: HalfEdge) -> Option<HalfEdge> {
    let v = graph.vertex_of(h);
    if choice.minimal_at[v] == h {
        return None;
    }
    let (p, q) = choice.bond_slots(graph, v);
    Some(if p == h { q } else { p })
}

/// The chains of a choice: every edge in exactly one, open chains first
/// (ordered by their smaller free end), then closed ones (by smallest edge).
pub fn chains(graph: &RibbonGraph, choice: &LinkingChoice) -> Vec<Chain> {
    let mut used = vec![false; graph.num_edges()];
    let mut out = Vec::new();
    for h0 in 0..graph.num_half_edges() {
        if partner(graph, choice, h0).is_some() || used[graph.edge_of(h0)] {
            continue;
        }
        let mut edges = Vec::new();
        let mut cur = h0;
        let far = loop {
            used[graph.edge_of(cur)] = true;
            edges.push(graph.edge_of(cur));
            let far = graph.alpha(cur);
            match partner(graph, choice, far) {
                None => break far,
                Some(next) => cur = next,
            }
        };
        out.push(Chain {
            edges,
            closed: false,
            ends: Some((h0, far)),
        });
    }
    for e in 0..graph.num_edges() {
        if used[e] {
            continue;
        }
        let h0 = graph.edge_half_edges(e)[0];
        let mut edges = Vec::new();
        let mut cur = h0;
        loop {
            used[graph.edge_of(cur)] = true;
            edges.push(graph.edge_of(cur));
            let next = partner(graph, choice, graph.alpha(cur))
                .expect("closed walk has no free slots");
            if next == h0 {
                break;
            }
            cur = next;
        }
        out.push(Chain {
            edges,
            closed: true,
            ends: None,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Wheel {
    /// Chain indices in discovery order: each chain after the seed was
    /// pulled in because an earlier chain's end lands inside it.
    pub chains: Vec<usize>,
    /// True when every member's ends land inside the wheel itself.
    pub maximal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainRole {
    WheelMember(usize),
    Attached(usize),
    Bridge(usize),
}

/// The full wheels-and-chains structure produced by [`decompose`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub seed_edge: EdgeIdx,
    pub chains: Vec<Chain>,
    pub chain_of_edge: Vec<usize>,
    pub wheels: Vec<Wheel>,
    /// Per wheel, the chains attached while it was current (both ends on
    /// settled structure).
    pub attached: Vec<Vec<usize>>,
    /// Per wheel, the chain bridging to the next wheel (`None` for the last).
    pub bridges: Vec<Option<usize>>,
    pub roles: Vec<ChainRole>,
}

impl Decomposition {
    /// Every edge in exactly one chain and every chain in exactly one role.
    pub fn is_partition(&self, graph: &RibbonGraph) -> bool {
        let mut edge_seen = vec![0usize; graph.num_edges()];
        for c in &self.chains {
            for &e in &c.edges {
                edge_seen[e] += 1;
            }
        }
        if edge_seen.iter().any(|&k| k != 1) {
            return false;
        }
        let mut role_seen = vec![0usize; self.chains.len()];
        for w in &self.wheels {
            for &c in &w.chains {
                role_seen[c] += 1;
            }
        }
        for list in &self.attached {
            for &c in list {
                role_seen[c] += 1;
            }
        }
        for b in self.bridges.iter().flatten() {
            role_seen[*b] += 1;
        }
        role_seen.iter().all(|&k| k == 1)
    }

    pub fn total_edges(&self) -> usize {
        self.chains.iter().map(Chain::len).sum()
    }
}

/// Where each end of each chain lands: the chain passing through the bond at
/// the end's vertex. Closed chains have no entries.
fn end_targets(
    graph: &RibbonGraph,
    choice: &LinkingChoice,
    chains: &[Chain],
    chain_of_edge: &[usize],
) -> Vec<Vec<usize>> {
    let through = |v: VertexIdx| -> usize {
        let (p, _) = choice.bond_slots(graph, v);
        chain_of_edge[graph.edge_of(p)]
    };
    chains
        .iter()
        .map(|c| match c.ends {
            None => Vec::new(),
            Some((h1, h2)) => vec![through(graph.vertex_of(h1)), through(graph.vertex_of(h2))],
        })
        .collect()
}

/// Greedy wheels-and-chains decomposition seeded at `mu`.
///
/// The seed wheel starts from the chain containing `mu` when that chain can
/// stand alone (closed, or ending only on itself); otherwise from the chain
/// its first end lands in. Wheels are closures under "where do the ends
/// land", restricted to unsettled chains. After each wheel, every chain with
/// both ends settled (an end landing on its own chain counts once the chain
/// itself settles) is attached; a chain with exactly one settled end bridges
/// to the next wheel, seeded where its dangling end lands.
pub fn decompose(
    graph: &RibbonGraph,
    choice: &LinkingChoice,
    mu: EdgeIdx,
) -> Result<Decomposition, DecompositionError> {
    graph.ensure_trivalent()?;
    if mu >= graph.num_edges() {
        return Err(DecompositionError::SeedOutOfRange(mu));
    }
    let chains = chains(graph, choice);
    let mut chain_of_edge = vec![usize::MAX; graph.num_edges()];
    for (i, c) in chains.iter().enumerate() {
        for &e in &c.edges {
            chain_of_edge[e] = i;
        }
    }
    let targets = end_targets(graph, choice, &chains, &chain_of_edge);

    let n_chains = chains.len();
    let mut role: Vec<Option<ChainRole>> = vec![None; n_chains];
    let mut wheels: Vec<Wheel> = Vec::new();
    let mut attached: Vec<Vec<usize>> = Vec::new();
    let mut bridges: Vec<Option<usize>> = Vec::new();

    let seed_chain = chain_of_edge[mu];
    let self_standing =
        chains[seed_chain].closed || targets[seed_chain].iter().all(|&t| t == seed_chain);
    let mut seeds = if self_standing {
        vec![seed_chain]
    } else {
        // Start where the seed chain's ends land; prefer the first end, fall
        // back to the second if the first points back at the chain itself.
        match targets[seed_chain].iter().copied().find(|&t| t != seed_chain) {
            Some(t) => vec![t],
            None => vec![seed_chain],
        }
    };

    loop {
        let w = wheels.len();
        let mut members = Vec::new();
        let mut queue: VecDeque<usize> = seeds.drain(..).collect();
        while let Some(c) = queue.pop_front() {
            if role[c].is_some() {
                continue;
            }
            role[c] = Some(ChainRole::WheelMember(w));
            members.push(c);
            for &t in &targets[c] {
                if role[t].is_none() {
                    queue.push_back(t);
                }
            }
        }
        let maximal = members
            .iter()
            .all(|&c| targets[c].iter().all(|&t| members.contains(&t)));
        wheels.push(Wheel {
            chains: members,
            maximal,
        });
        attached.push(Vec::new());
        bridges.push(None);

        // Attach every open chain whose ends all land on settled chains
        // (counting itself), to fixpoint.
        loop {
            let mut progressed = false;
            for c in 0..n_chains {
                if role[c].is_some() || chains[c].closed {
                    continue;
                }
                if targets[c].iter().all(|&t| t == c || role[t].is_some()) {
                    role[c] = Some(ChainRole::Attached(w));
                    attached[w].push(c);
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }

        if role.iter().all(Option::is_some) {
            break;
        }

        // Bridge: the first chain with exactly one settled end; its dangling
        // end seeds the next wheel.
        let bridge = (0..n_chains).find_map(|c| {
            if role[c].is_some() || chains[c].closed {
                return None;
            }
            let settled: Vec<bool> = targets[c]
                .iter()
                .map(|&t| t == c || role[t].is_some())
                .collect();
            if settled.iter().filter(|&&s| s).count() == 1 {
                let dangling = targets[c][settled.iter().position(|&s| !s).unwrap()];
                Some((c, dangling))
            } else {
                None
            }
        });
        match bridge {
            Some((c, dangling)) => {
                role[c] = Some(ChainRole::Bridge(w));
                bridges[w] = Some(c);
                seeds = vec![dangling];
            }
            None => {
                let unassigned = role.iter().filter(|r| r.is_none()).count();
                let roles = role
                    .iter()
                    .map(|r| r.unwrap_or(ChainRole::WheelMember(usize::MAX)))
                    .collect();
                return Err(DecompositionError::Stuck {
                    partial: Box::new(Decomposition {
                        seed_edge: mu,
                        chains,
                        chain_of_edge,
                        wheels,
                        attached,
                        bridges,
                        roles,
                    }),
                    unassigned,
                });
            }
        }
    }

    let roles = role.iter().map(|r| r.unwrap()).collect();
    Ok(Decomposition {
        seed_edge: mu,
        chains,
        chain_of_edge,
        wheels,
        attached,
        bridges,
        roles,
    })
}

/// The per-graph integration factor `(8/3)^{(N−1)/2}`.
pub fn per_graph_factor(n_edges: usize) -> f64 {
    (8.0f64 / 3.0).powf((n_edges as f64 - 1.0) / 2.0)
}

// ---------------------------------------------------------------------------
// Integration lemmas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lemma {
    Trick1,
    Trick2,
    Trick3,
    ChainOk,
    WheelOk,
}

/// Parameters for [`verify_lemma`]: the fixed outer variable and, for the
/// chain/wheel lemmas, the number of edges `m`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaParams {
    pub fixed: f64,
    pub m: usize,
}

impl LemmaParams {
    pub fn fixed(value: f64) -> Self {
        LemmaParams { fixed: value, m: 0 }
    }

    pub fn with_m(value: f64, m: usize) -> Self {
        LemmaParams { fixed: value, m }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub name: String,
    pub fixed: f64,
    pub m: usize,
    pub numeric: f64,
    pub bound: f64,
    pub pass: bool,
    pub achieved: f64,
    pub evals: u64,
}

const LEMMA_TOL: f64 = 1e-8;
/// Multiplier pushing truncation points far enough that every tail bound
/// used below is ≤ 1e−10 relative to the fixed scale.
const TAIL_FACTOR: f64 = 2e10;

fn report(
    name: &str,
    params: LemmaParams,
    numeric: f64,
    bound: f64,
    quad: QuadResult,
    extra_tail: f64,
) -> LemmaReport {
    LemmaReport {
        name: name.to_string(),
        fixed: params.fixed,
        m: params.m,
        numeric,
        bound,
        pass: numeric <= bound * (1.0 + 1e-7) + 1e-12,
        achieved: quad.achieved + extra_tail,
        evals: quad.evals,
    }
}

const EMPTY_QUAD: QuadResult = QuadResult {
    value: 0.0,
    achieved: 0.0,
    evals: 0,
};

/// `∫ df/f` over the linked range of `f` for fixed `e`, against `ln 4`.
fn verify_trick1(params: LemmaParams) -> Result<LemmaReport, McError> {
    let e = params.fixed;
    let (a, b) = ((e / 2.0).max(4.0), 2.0 * e);
    let quad = if b > a {
        mc::integrate_1d(|f| 1.0 / f, a, b, LEMMA_TOL * 1e-2)?
    } else {
        EMPTY_QUAD
    };
    Ok(report("trick1", params, quad.value, 4f64.ln(), quad, 0.0))
}

/// `∫∫ de df/(ef)` over the linked pair above a fixed minimal `g`, against 2.
/// The two `e ≷ f` halves are symmetric; the `f → ∞` tail is bounded by
/// `g/F` per half and added to the reported value.
fn verify_trick2(params: LemmaParams) -> Result<LemmaReport, McError> {
    let g = params.fixed;
    let a = g.max(4.0);
    let cap = a * TAIL_FACTOR;
    let quad = mc::integrate_2d(
        |_, e| 1.0 / e,
        a.ln(),
        cap.ln(),
        |t| {
            let f = t.exp();
            (f, f + g)
        },
        LEMMA_TOL,
    )?;
    let tail = 2.0 * g / cap;
    Ok(report(
        "trick2",
        params,
        2.0 * quad.value + tail,
        2.0,
        quad,
        tail,
    ))
}

/// `∫∫ df dg/(fg)` over `4 < g ≤ e`, `max(g, e−g) ≤ f ≤ e+g`, against 8/3.
fn verify_trick3(params: LemmaParams) -> Result<LemmaReport, McError> {
    let e = params.fixed;
    let quad = if e > 4.0 {
        mc::integrate_2d(
            |_, f| 1.0 / f,
            4f64.ln(),
            e.ln(),
            |t| {
                let g = t.exp();
                (g.max(e - g), e + g)
            },
            LEMMA_TOL,
        )?
    } else {
        EMPTY_QUAD
    };
    Ok(report("trick3", params, quad.value, 8.0 / 3.0, quad, 0.0))
}

/// The series the first part of the 8/3 estimate telescopes into:
/// `Σ_{n≥1} (1 − (4/e)^n)/n² = π²/6 − Li₂(4/e)`, always below `Σ 1/n² < 5/3`.
pub fn trick3_first_part_series(e: f64) -> f64 {
    let r = 4.0 / e;
    let mut dilog = 0.0;
    let mut power = 1.0;
    for n in 1..10_000u64 {
        power *= r;
        let term = power / (n * n) as f64;
        dilog += term;
        if term < 1e-17 {
            break;
        }
    }
    std::f64::consts::PI.powi(2) / 6.0 - dilog
}

/// Nested elimination along one arm of a chain: `A_0 = 1`,
/// `A_j(x) = ∫_{max(4, x/2)}^{2x} A_{j−1}(f) df/f`, integrated in `ln f`.
fn chain_arm(depth: usize, x: f64, evals: &mut u64) -> Result<f64, McError> {
    if depth == 0 {
        return Ok(1.0);
    }
    let (a, b) = ((x / 2.0).max(4.0), 2.0 * x);
    if b <= a {
        return Ok(0.0);
    }
    let inner_evals = std::cell::Cell::new(0u64);
    let failed = std::cell::Cell::new(false);
    let quad = mc::integrate_1d(
        |t| {
            let mut e = 0;
            let value = chain_arm(depth - 1, t.exp(), &mut e).unwrap_or_else(|_| {
                failed.set(true);
                f64::NAN
            });
            inner_evals.set(inner_evals.get() + e);
            value
        },
        a.ln(),
        b.ln(),
        1e-9,
    )?;
    if failed.get() {
        return Err(McError::QuadratureDidNotConverge {
            achieved: f64::INFINITY,
            requested: 1e-9,
        });
    }
    *evals += quad.evals + inner_evals.get();
    Ok(quad.value)
}

/// Chain elimination: fix the middle edge of an `m`-chain at the given value
/// and integrate the rest outward-in, against `(ln 4)^{m−1}`.
fn verify_chainok(params: LemmaParams) -> Result<LemmaReport, McError> {
    let m = params.m;
    if m == 0 || m > 7 {
        return Err(McError::BadConfig(format!(
            "chain length must be between 1 and 7, got {m}"
        )));
    }
    let left = (m - 1) / 2;
    let right = (m - 1) - left;
    let mut evals = 0;
    let numeric = chain_arm(left, params.fixed, &mut evals)?
        * chain_arm(right, params.fixed, &mut evals)?;
    let quad = QuadResult {
        value: numeric,
        achieved: 1e-9 * (m as f64),
        evals,
    };
    Ok(report(
        "chainok",
        params,
        numeric,
        4f64.ln().powi(m as i32 - 1),
        quad,
        0.0,
    ))
}

/// Wheel elimination for a closed `m`-chain hung on a fixed minimal `g`,
/// against `max(ln 4, √2)^m`. The innermost edge's range is closed-form, so
/// `m = 2` reduces to one and `m = 3` to two quadrature dimensions.
fn verify_wheelok(params: LemmaParams) -> Result<LemmaReport, McError> {
    let g = params.fixed;
    let m = params.m;
    let a = g.max(4.0);
    let cap = a * TAIL_FACTOR;
    let bound = 4f64.ln().max(2f64.sqrt()).powi(m as i32);
    let log_span = |lo: f64, hi: f64| -> f64 {
        if hi > lo {
            (hi / lo).ln()
        } else {
            0.0
        }
    };
    match m {
        2 => {
            // e2 linked to e1 at the g-vertex and ratio-linked at the other.
            let quad = mc::integrate_1d(
                |t| {
                    let e1 = t.exp();
                    let lo = (e1 / 2.0).max(e1 - g).max(g).max(4.0);
                    let hi = (2.0 * e1).min(e1 + g);
                    log_span(lo, hi)
                },
                a.ln(),
                cap.ln(),
                LEMMA_TOL,
            )?;
            let tail = 3.0 * g / cap;
            Ok(report("wheelok", params, quad.value + tail, bound, quad, tail))
        }
        3 => {
            // e1, e2 linked over g; e3 ratio-linked to both.
            let quad = mc::integrate_2d(
                |t, e2| {
                    let e1 = t.exp();
                    let lo = (e1.max(e2) / 2.0).max(4.0);
                    let hi = 2.0 * e1.min(e2);
                    log_span(lo, hi) / e2
                },
                a.ln(),
                cap.ln(),
                |t| {
                    let e1 = t.exp();
                    ((e1 - g).max(g).max(4.0), e1 + g)
                },
                LEMMA_TOL,
            )?;
            let tail = 3.0 * 4f64.ln() * g / cap;
            Ok(report("wheelok", params, quad.value + tail, bound, quad, tail))
        }
        _ => Err(McError::BadConfig(format!(
            "wheel check supports m = 2 or 3 edges, got {m}"
        ))),
    }
}

/// Evaluate one lemma's left side by quadrature and compare to its constant.
pub fn verify_lemma(which: Lemma, params: LemmaParams) -> Result<LemmaReport, McError> {
    if !(params.fixed > 0.0) || !params.fixed.is_finite() {
        return Err(McError::BadConfig(format!(
            "the fixed edge value must be positive and finite, got {}",
            params.fixed
        )));
    }
    match which {
        Lemma::Trick1 => verify_trick1(params),
        Lemma::Trick2 => verify_trick2(params),
        Lemma::Trick3 => verify_trick3(params),
        Lemma::ChainOk => verify_chainok(params),
        Lemma::WheelOk => verify_wheelok(params),
    }
}

/// The theta-cell instance of the full elimination: fix the minimal edge at
/// `mu` and integrate the other two over triangle + ratio + minimality
/// constraints; the result must stay under `(8/3)^{(N−1)/2} = 8/3`.
pub fn intout_theta_check(mu: f64) -> Result<LemmaReport, McError> {
    if !(mu > 4.0) {
        return Err(McError::BadConfig(format!(
            "the fixed minimal edge must exceed 4, got {mu}"
        )));
    }
    let cap = mu * TAIL_FACTOR;
    let quad = mc::integrate_2d(
        |_, l2| 1.0 / l2,
        mu.ln(),
        cap.ln(),
        |t| {
            let l1 = t.exp();
            (mu.max(l1 / 2.0).max(l1 - mu), l1 + mu)
        },
        LEMMA_TOL,
    )?;
    let tail = 3.0 * mu / cap;
    Ok(report(
        "intout-theta",
        LemmaParams::fixed(mu),
        quad.value + tail,
        per_graph_factor(3),
        quad,
        tail,
    ))
}

/// The standard sweep behind `verify --suite lemmas`: twenty
/// logarithmically spaced parameters per lemma.
pub fn standard_lemma_sweep() -> Result<Vec<LemmaReport>, McError> {
    let logspace = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64))
            .collect()
    };
    let mut out = Vec::new();
    for e in logspace(1.0, 1e4, 20) {
        out.push(verify_lemma(Lemma::Trick1, LemmaParams::fixed(e))?);
    }
    for g in logspace(0.5, 1e4, 20) {
        out.push(verify_lemma(Lemma::Trick2, LemmaParams::fixed(g))?);
    }
    for e in logspace(4.5, 1e5, 20) {
        out.push(verify_lemma(Lemma::Trick3, LemmaParams::fixed(e))?);
    }
    for (i, v) in logspace(1.0, 1e4, 20).into_iter().enumerate() {
        out.push(verify_lemma(
            Lemma::ChainOk,
            LemmaParams::with_m(v, 1 + i % 5),
        )?);
    }
    for (i, g) in logspace(0.5, 1e4, 20).into_iter().enumerate() {
        out.push(verify_lemma(
            Lemma::WheelOk,
            LemmaParams::with_m(g, 2 + i % 2),
        )?);
    }
    Ok(out)
}
