//! Quadrature and Monte Carlo estimation.
//!
//! Two halves. The deterministic half is a small adaptive-Simpson engine
//! (one- and two-dimensional, with dependent inner bounds) used by the
//! integration-lemma checks. The stochastic half estimates the volume
//! `∫_{D(Γ)} ω^{∧(3g−2)}` of a one-puncture cell by integrating over the
//! slice `ρ = 1`.
//!
//! The slice parametrization is the map `Φ(u) = ρ(u)·u`, which is
//! scale-invariant (ρ is homogeneous of degree −1) and sends any positive
//! direction with all simplicial coordinates positive to a point of the
//! domain on the slice. Directions are sampled uniformly on the open unit
//! simplex; a sample is rejected when some `X_e(u) ≤ 0` (a scale-invariant
//! test). The tangent frame of the chart is pushed forward through the
//! analytic Jacobian `dΦ = ρ·I + u·(∇ρ)ᵀ` and the two-form density is
//! evaluated on it.
//!
//! Determinism: the generator is counter-based — each sample index seeks the
//! ChaCha stream to a fixed offset — and per-shard accumulators use exact
//! (error-free) summation, so the estimate is bit-identical for any shard
//! count.

use crate::penner::{self, PennerError};
use crate::ribbon_graph::RibbonGraph;
use crate::wp_form::{self, WpFormError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error(transparent)]
    Penner(#[from] PennerError),
    #[error(transparent)]
    WpForm(#[from] WpFormError),
    #[error("operation requires exactly one puncture, the graph has {0}")]
    WrongPunctureCount(usize),
    #[error("invalid sampler configuration: {0}")]
    BadConfig(String),
    #[error("no sample was accepted out of {samples}; the cell region was never hit")]
    ZeroAcceptances { samples: u64 },
    #[error("quadrature did not converge: achieved tolerance {achieved} > requested {requested}")]
    QuadratureDidNotConverge { achieved: f64, requested: f64 },
}

// ---------------------------------------------------------------------------
// Exact summation
// ---------------------------------------------------------------------------

/// Error-free accumulator: keeps the running sum as a list of non-overlapping
/// partials (Shewchuk's growing expansion), so the represented value is the
/// exact real sum of everything added. [`ExactSum::total`] returns the
/// correctly rounded double of that exact value, which makes totals
/// independent of how the inputs were grouped into shards.
#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        if x != 0.0 {
            self.partials.push(x);
        }
    }

    /// Folds another accumulator in; the represented exact value is the sum
    /// of both exact values.
    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    /// Correctly rounded double of the exact sum (round-half-even corrected).
    pub fn total(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        // Double-rounding correction: if the discarded low part and the next
        // partial push in the same direction, half-ulp cases need one nudge.
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of the accepted panels' error estimates.
    pub achieved: f64,
    pub evals: u64,
}

const MAX_DEPTH: u32 = 60;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    (fa + 4.0 * fm + fb) * h / 6.0
}

struct Adapt<'f> {
    f: &'f dyn Fn(f64) -> f64,
    evals: u64,
    achieved: f64,
    converged: bool,
    max_depth: u32,
}

impl Adapt<'_> {
    fn run(&mut self, a: f64, m: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evals += 2;
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let err = (left + right - whole) / 15.0;
        if err.abs() <= tol || depth >= self.max_depth {
            if err.abs() > tol {
                self.converged = false;
            }
            self.achieved += err.abs();
            return left + right + err;
        }
        self.run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

fn integrate_1d_impl(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<QuadResult, McError> {
    if !(tol > 0.0) {
        return Err(McError::BadConfig(format!("tolerance must be positive, got {tol}")));
    }
    if b <= a {
        return Ok(QuadResult { value: 0.0, achieved: 0.0, evals: 0 });
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    let mut adapt = Adapt { f, evals: 3, achieved: 0.0, converged: true, max_depth };
    let value = adapt.run(a, m, b, fa, fm, fb, whole, tol, 0);
    if !adapt.converged || !value.is_finite() {
        return Err(McError::QuadratureDidNotConverge { achieved: adapt.achieved, requested: tol });
    }
    Ok(QuadResult { value, achieved: adapt.achieved, evals: adapt.evals })
}

/// `∫_a^b f` by adaptive Simpson to absolute tolerance `tol`. An empty
/// interval (`b ≤ a`) integrates to zero.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult, McError> {
    integrate_1d_impl(&f, a, b, tol, MAX_DEPTH)
}

#[cfg(test)]
pub(crate) fn integrate_1d_shallow(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<QuadResult, McError> {
    integrate_1d_impl(&f, a, b, tol, max_depth)
}

/// `∫_a^b dx ∫_{lo(x)}^{hi(x)} f(x,y) dy` with dependent inner bounds. The
/// inner integrals run at `tol/100`; the reported `achieved` folds the inner
/// tolerance times the outer range on top of the outer panel errors.
pub fn integrate_2d(
    f: impl Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    inner_bounds: impl Fn(f64) -> (f64, f64),
    tol: f64,
) -> Result<QuadResult, McError> {
    let inner_tol = tol * 1e-2;
    let evals = std::cell::Cell::new(0u64);
    let inner_fail = std::cell::Cell::new(false);
    let g = |x: f64| -> f64 {
        let (lo, hi) = inner_bounds(x);
        match integrate_1d(|y| f(x, y), lo, hi, inner_tol) {
            Ok(r) => {
                evals.set(evals.get() + r.evals);
                r.value
            }
            Err(_) => {
                inner_fail.set(true);
                0.0
            }
        }
    };
    let outer = integrate_1d_impl(&g, a, b, tol, MAX_DEPTH)?;
    if inner_fail.get() {
        return Err(McError::QuadratureDidNotConverge { achieved: f64::INFINITY, requested: tol });
    }
    Ok(QuadResult {
        value: outer.value,
        achieved: outer.achieved + inner_tol * (b - a).max(0.0),
        evals: outer.evals + evals.get(),
    })
}

// ---------------------------------------------------------------------------
// Slice map
// ---------------------------------------------------------------------------

/// `Φ(u) = ρ(u)·u`: the slice point determined by a positive direction. For
/// a one-puncture graph the result satisfies `ρ(Φ(u)) = 1` exactly up to
/// rounding.
pub fn slice_point_from_direction(graph: &RibbonGraph, u: &[f64]) -> Result<Vec<f64>, McError> {
    penner::check_lambda(graph, u)?;
    if graph.num_faces() != 1 {
        return Err(McError::WrongPunctureCount(graph.num_faces()));
    }
    Ok(penner::scale(u, penner::rho_total(graph, u)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JacobianMode {
    Analytic,
    FiniteDifference,
}

/// Pushes a tangent vector of the chart through `dΦ_u = ρ·I + u·(∇ρ)ᵀ`.
fn push_forward(rho: f64, grad: &[f64], u: &[f64], v: &[f64]) -> Vec<f64> {
    let gv: f64 = grad.iter().zip(v).map(|(g, x)| g * x).sum();
    u.iter().zip(v).map(|(&ui, &vi)| rho * vi + gv * ui).collect()
}

fn push_forward_fd(graph: &RibbonGraph, u: &[f64], v: &[f64]) -> Vec<f64> {
    let h = 1e-6;
    let at = |s: f64| -> Vec<f64> {
        let shifted: Vec<f64> = u.iter().zip(v).map(|(&ui, &vi)| ui + s * vi).collect();
        penner::scale(&shifted, penner::rho_total(graph, &shifted))
    };
    let plus = at(h);
    let minus = at(-h);
    plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect()
}

/// The slice point and the pushed-forward simplex-chart frame
/// `dΦ(e_i − e_N)`, `i = 1..N−1`, at direction `u` (any positive scale).
pub fn slice_frame(
    graph: &RibbonGraph,
    u: &[f64],
    mode: JacobianMode,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), McError> {
    let n = graph.num_edges();
    let mut chart = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v[n - 1] = -1.0;
        chart.push(v);
    }
    slice_frame_for_chart(graph, u, &chart, mode)
}

fn slice_frame_for_chart(
    graph: &RibbonGraph,
    u: &[f64],
    chart: &[Vec<f64>],
    mode: JacobianMode,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), McError> {
    penner::check_lambda(graph, u)?;
    if graph.num_faces() != 1 {
        return Err(McError::WrongPunctureCount(graph.num_faces()));
    }
    let lambda = slice_point_from_direction(graph, u)?;
    let frame = match mode {
        JacobianMode::Analytic => {
            let rho = penner::rho_total(graph, u);
            let grad: Vec<f64> = (0..graph.num_edges())
                .map(|e| penner::drho_dlambda(graph, u, 0, e))
                .collect();
            chart.iter().map(|v| push_forward(rho, &grad, u, v)).collect()
        }
        JacobianMode::FiniteDifference => {
            chart.iter().map(|v| push_forward_fd(graph, u, v)).collect()
        }
    };
    Ok((lambda, frame))
}

// ---------------------------------------------------------------------------
// Sampler
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Proposal {
    /// Directions uniform on the open unit simplex.
    SimplexUniform,
    /// Each λ log-uniform on [4, cutoff]; used for domain sampling only.
    LogUniform { cutoff: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Gauge {
    /// Chart over the open unit simplex `Σu = 1`.
    Simplex,
    /// Chart over the cube faces `max u = 1`; an independent parametrization
    /// of the same slice, used to validate the change of variables.
    MaxFace,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: u64,
    pub shards: u32,
    pub proposal: Proposal,
    pub gauge: Gauge,
    pub jacobian: JacobianMode,
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: u64) -> Self {
        SamplerConfig {
            seed,
            samples,
            shards: 1,
            proposal: Proposal::SimplexUniform,
            gauge: Gauge::Simplex,
            jacobian: JacobianMode::Analytic,
        }
    }

    fn validate(&self) -> Result<(), McError> {
        if self.samples == 0 {
            return Err(McError::BadConfig("samples must be positive".into()));
        }
        if self.shards == 0 {
            return Err(McError::BadConfig("shards must be positive".into()));
        }
        if let Proposal::LogUniform { cutoff } = self.proposal {
            if !(cutoff > 4.0) {
                return Err(McError::BadConfig(format!(
                    "log-uniform cutoff must exceed 4, got {cutoff}"
                )));
            }
        }
        Ok(())
    }
}

/// Near-boundary diagnostic attached to every estimate: how much of the
/// accepted mass sits within `epsilon` of the simplex boundary, and what the
/// estimate becomes with that mass excluded.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailReport {
    pub epsilon: f64,
    /// Fraction of accepted samples with `min_i u_i < epsilon`.
    pub boundary_fraction: f64,
    /// The estimate recomputed with near-boundary contributions dropped.
    pub trimmed_mean: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub accept_rate: f64,
    pub tail: TailReport,
}

const BOUNDARY_EPSILON: f64 = 1e-3;

/// Fixed ChaCha word stride per sample index, so shard boundaries can never
/// shift the stream.
fn words_per_sample(n_edges: usize) -> u128 {
    2 * n_edges as u128 + 4
}

fn seeded_at(seed: u64, n_edges: usize, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(index as u128 * words_per_sample(n_edges));
    rng
}

/// One direction draw. Exponential ratios give the uniform simplex law; the
/// max-face gauge instead fixes a uniformly chosen coordinate at 1.
fn draw_direction(rng: &mut ChaCha8Rng, n: usize, gauge: Gauge) -> Vec<f64> {
    match gauge {
        Gauge::Simplex => {
            let exps: Vec<f64> = (0..n).map(|_| -f64::ln_1p(-rng.gen::<f64>())).collect();
            let total: f64 = exps.iter().sum();
            exps.iter().map(|&e| e / total).collect()
        }
        Gauge::MaxFace => {
            let j = ((rng.gen::<f64>() * n as f64) as usize).min(n - 1);
            let mut w = vec![0.0; n];
            for (i, slot) in w.iter_mut().enumerate() {
                if i == j {
                    *slot = 1.0;
                } else {
                    // Open interval: reflect exact zeros away.
                    let x = rng.gen::<f64>();
                    *slot = if x == 0.0 { 0.5 } else { x };
                }
            }
            w
        }
    }
}

/// The sample's chart tangent basis. For the max-face gauge that is
/// `{e_i : i ≠ argmax u}`, for the simplex `{e_i − e_N : i < N−1}`.
fn chart_basis(n: usize, gauge: Gauge, u: &[f64]) -> Vec<Vec<f64>> {
    match gauge {
        Gauge::Simplex => (0..n - 1)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v[n - 1] = -1.0;
                v
            })
            .collect(),
        Gauge::MaxFace => {
            let j = u
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            (0..n)
                .filter(|&i| i != j)
                .map(|i| {
                    let mut v = vec![0.0; n];
                    v[i] = 1.0;
                    v
                })
                .collect()
        }
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

struct ShardAccum {
    sum: ExactSum,
    sum_sq: ExactSum,
    trimmed_sum: ExactSum,
    accepted: u64,
    near_boundary: u64,
}

impl ShardAccum {
    fn new() -> Self {
        ShardAccum {
            sum: ExactSum::new(),
            sum_sq: ExactSum::new(),
            trimmed_sum: ExactSum::new(),
            accepted: 0,
            near_boundary: 0,
        }
    }
}

/// Monte Carlo estimate of the cell volume `∫_{D(Γ)} ω^{∧(3g−2)}` of a
/// one-puncture graph, by slice integration in the configured gauge.
pub fn estimate_cell_volume_n1(
    graph: &RibbonGraph,
    config: &SamplerConfig,
) -> Result<McEstimate, McError> {
    config.validate()?;
    graph.ensure_trivalent().map_err(PennerError::from)?;
    if graph.num_faces() != 1 {
        return Err(McError::WrongPunctureCount(graph.num_faces()));
    }
    if config.proposal != Proposal::SimplexUniform {
        return Err(McError::BadConfig(
            "the volume estimator samples directions; use the simplex-uniform proposal".into(),
        ));
    }
    let n = graph.num_edges();
    let b = wp_form::pairing_matrix(graph)?;
    // The chart measure: 1/(N−1)! for the simplex (its coordinate volume),
    // N for the face union (N faces of coordinate volume 1, face chosen
    // uniformly).
    let gauge_factor = match config.gauge {
        Gauge::Simplex => 1.0 / factorial(n - 1),
        Gauge::MaxFace => n as f64,
    };

    let samples = config.samples;
    let shards = (config.shards as u64).min(samples);
    let mut merged = ShardAccum::new();
    for shard in 0..shards {
        let lo = samples * shard / shards;
        let hi = samples * (shard + 1) / shards;
        let mut acc = ShardAccum::new();
        for idx in lo..hi {
            let mut rng = seeded_at(config.seed, n, idx);
            let u = draw_direction(&mut rng, n, config.gauge);
            let x = penner::simplicial_coordinates(graph, &u);
            if x.iter().any(|&v| v <= 0.0) {
                continue;
            }
            let chart = chart_basis(n, config.gauge, &u);
            let (lambda, frame) = slice_frame_for_chart(graph, &u, &chart, config.jacobian)?;
            let y = wp_form::density_on_frame(&b, &lambda, &frame)?.abs();
            acc.accepted += 1;
            acc.sum.add(y);
            acc.sum_sq.add(y * y);
            let total: f64 = u.iter().sum();
            let near = u.iter().any(|&ui| ui / total < BOUNDARY_EPSILON);
            if near {
                acc.near_boundary += 1;
            } else {
                acc.trimmed_sum.add(y);
            }
        }
        merged.sum.merge(&acc.sum);
        merged.sum_sq.merge(&acc.sum_sq);
        merged.trimmed_sum.merge(&acc.trimmed_sum);
        merged.accepted += acc.accepted;
        merged.near_boundary += acc.near_boundary;
    }

    if merged.accepted == 0 {
        return Err(McError::ZeroAcceptances { samples });
    }
    let m = samples as f64;
    let s1 = merged.sum.total();
    let s2 = merged.sum_sq.total();
    let mean_raw = s1 / m;
    let var = if samples > 1 {
        ((s2 - s1 * s1 / m) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean: gauge_factor * mean_raw,
        std_error: gauge_factor * (var / m).sqrt(),
        samples,
        seed: config.seed,
        accept_rate: merged.accepted as f64 / m,
        tail: TailReport {
            epsilon: BOUNDARY_EPSILON,
            boundary_fraction: merged.near_boundary as f64 / merged.accepted as f64,
            trimmed_mean: gauge_factor * merged.trimmed_sum.total() / m,
        },
    })
}

/// Slice-normalized in-domain points of a one-puncture cell: runs the
/// configured proposal for `config.samples` attempts and keeps the accepted
/// ones, normalized onto `ρ = 1`.
pub fn sample_domain_points(
    graph: &RibbonGraph,
    config: &SamplerConfig,
) -> Result<Vec<Vec<f64>>, McError> {
    config.validate()?;
    graph.ensure_trivalent().map_err(PennerError::from)?;
    if graph.num_faces() != 1 {
        return Err(McError::WrongPunctureCount(graph.num_faces()));
    }
    let n = graph.num_edges();
    let mut out = Vec::new();
    for idx in 0..config.samples {
        let mut rng = seeded_at(config.seed, n, idx);
        let u: Vec<f64> = match config.proposal {
            Proposal::SimplexUniform => draw_direction(&mut rng, n, Gauge::Simplex),
            Proposal::LogUniform { cutoff } => {
                let span = (cutoff / 4.0).ln();
                (0..n).map(|_| 4.0 * (span * rng.gen::<f64>()).exp()).collect()
            }
        };
        let x = penner::simplicial_coordinates(graph, &u);
        if x.iter().any(|&v| v <= 0.0) {
            continue;
        }
        out.push(slice_point_from_direction(graph, &u)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penner::tests::assert_close;
    use crate::penner::DEFAULT_SLICE_TOL;
    use rand::RngCore;

    fn theta() -> RibbonGraph {
        RibbonGraph::theta()
    }

    #[test]
    fn exact_sum_is_grouping_invariant_and_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let values: Vec<f64> = (0..2000)
            .map(|_| {
                let exp = (rng.next_u32() % 60) as i32 - 30;
                (rng.gen::<f64>() - 0.5) * 2f64.powi(exp)
            })
            .collect();
        let mut sequential = ExactSum::new();
        for &v in &values {
            sequential.add(v);
        }
        for chunks in [2usize, 3, 7, 16] {
            let mut merged = ExactSum::new();
            for chunk in values.chunks(values.len() / chunks + 1) {
                let mut part = ExactSum::new();
                for &v in chunk {
                    part.add(v);
                }
                merged.merge(&part);
            }
            assert_eq!(sequential.total().to_bits(), merged.total().to_bits());
        }
        // 1 + ε/2 added 2^k times must not lose the tiny parts.
        let mut s = ExactSum::new();
        s.add(1.0);
        for _ in 0..1024 {
            s.add(f64::EPSILON / 2.0);
        }
        assert_eq!(s.total(), 1.0 + 512.0 * f64::EPSILON);
    }

    #[test]
    fn quadrature_known_integrals() {
        let r = integrate_1d(|x| 1.0 / x, 4.0, 16.0, 1e-10).unwrap();
        assert_close(r.value, 4f64.ln(), 1e-10, 0.0);
        let r = integrate_1d(|x| x, 0.0, 1.0, 1e-12).unwrap();
        assert_close(r.value, 0.5, 1e-12, 0.0);
        assert!(r.achieved <= 1e-12);
        // Empty interval.
        assert_eq!(integrate_1d(|x| x, 3.0, 2.0, 1e-9).unwrap().value, 0.0);
        // 2D with dependent bounds: ∫_0^1 dx ∫_0^x dy 1 = 1/2.
        let r = integrate_2d(|_, _| 1.0, 0.0, 1.0, |x| (0.0, x), 1e-9).unwrap();
        assert_close(r.value, 0.5, 1e-8, 0.0);
        // ∫_0^π dx ∫_0^sin x dy y = ∫ sin²/2 = π/4.
        let r = integrate_2d(
            |_, y| y,
            0.0,
            std::f64::consts::PI,
            |x| (0.0, x.sin()),
            1e-9,
        )
        .unwrap();
        assert_close(r.value, std::f64::consts::PI / 4.0, 1e-7, 0.0);
    }

    #[test]
    fn quadrature_reports_non_convergence() {
        let err = integrate_1d_shallow(|x| (1.0 / x).sin(), 1e-6, 1.0, 1e-12, 3).unwrap_err();
        assert!(matches!(err, McError::QuadratureDidNotConverge { .. }));
    }

    #[test]
    fn slice_map_sends_barycenter_to_twelve() {
        let g = theta();
        let lambda = slice_point_from_direction(&g, &[1.0 / 3.0; 3]).unwrap();
        for &x in &lambda {
            assert_close(x, 12.0, 1e-12, 1e-12);
        }
    }

    #[test]
    fn analytic_frame_matches_finite_differences() {
        let g = theta();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let u = draw_direction(&mut rng, 3, Gauge::Simplex);
            let (la, fa) = slice_frame(&g, &u, JacobianMode::Analytic).unwrap();
            let (lb, fb) = slice_frame(&g, &u, JacobianMode::FiniteDifference).unwrap();
            assert_eq!(la, lb);
            for (va, vb) in fa.iter().zip(&fb) {
                for (a, b) in va.iter().zip(vb) {
                    assert_close(*a, *b, 1e-6, 1e-5);
                }
            }
        }
    }

    #[test]
    fn estimator_is_shard_invariant_bit_for_bit() {
        let g = theta();
        let mut one = SamplerConfig::new(99, 20_000);
        one.shards = 1;
        let mut four = one;
        four.shards = 4;
        let mut seven = one;
        seven.shards = 7;
        let a = estimate_cell_volume_n1(&g, &one).unwrap();
        let b = estimate_cell_volume_n1(&g, &four).unwrap();
        let c = estimate_cell_volume_n1(&g, &seven).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.mean.to_bits(), c.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        assert_eq!(a.accept_rate, b.accept_rate);
        assert_eq!(
            a.tail.trimmed_mean.to_bits(),
            b.tail.trimmed_mean.to_bits()
        );
    }

    #[test]
    fn estimator_basic_sanity_on_theta() {
        let est = estimate_cell_volume_n1(&theta(), &SamplerConfig::new(7, 50_000)).unwrap();
        assert!(est.mean > 0.0);
        assert!(est.std_error > 0.0);
        assert!(est.mean - 3.0 * est.std_error > 0.0);
        assert!(est.mean + 3.0 * est.std_error < 288.0);
        assert!(est.accept_rate > 0.0 && est.accept_rate <= 1.0);
        assert!(est.tail.boundary_fraction < 0.05);
        // Trimming the boundary sliver must not move the estimate much.
        assert!((est.tail.trimmed_mean - est.mean).abs() < 5.0 * est.std_error + 1e-12);
    }

    #[test]
    fn gauges_agree_within_joint_error() {
        let g = theta();
        let mut simplex = SamplerConfig::new(1234, 60_000);
        simplex.gauge = Gauge::Simplex;
        let mut faces = SamplerConfig::new(4321, 60_000);
        faces.gauge = Gauge::MaxFace;
        let a = estimate_cell_volume_n1(&g, &simplex).unwrap();
        let b = estimate_cell_volume_n1(&g, &faces).unwrap();
        let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.mean - b.mean).abs() < 3.0 * joint,
            "simplex {} vs faces {} (joint stderr {joint})",
            a.mean,
            b.mean
        );
    }

    #[test]
    fn fd_jacobian_mode_tracks_analytic_estimate() {
        let g = theta();
        let mut analytic = SamplerConfig::new(5, 2_000);
        analytic.jacobian = JacobianMode::Analytic;
        let mut fd = analytic;
        fd.jacobian = JacobianMode::FiniteDifference;
        let a = estimate_cell_volume_n1(&g, &analytic).unwrap();
        let b = estimate_cell_volume_n1(&g, &fd).unwrap();
        assert_close(a.mean, b.mean, 1e-9, 1e-6);
    }

    #[test]
    fn stderr_shrinks_like_inverse_sqrt() {
        let g = theta();
        let mut ratios = Vec::new();
        for seed in 0..5 {
            let small = estimate_cell_volume_n1(&g, &SamplerConfig::new(seed, 8_000)).unwrap();
            let big = estimate_cell_volume_n1(&g, &SamplerConfig::new(seed, 16_000)).unwrap();
            ratios.push(big.std_error / small.std_error);
        }
        let avg: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let expected = 1.0 / 2f64.sqrt();
        assert!(
            (avg - expected).abs() < 0.2 * expected,
            "stderr ratio {avg} too far from {expected}"
        );
    }

    #[test]
    fn contribution_is_symmetric_under_theta_edge_permutations() {
        // Every coordinate permutation of a direction gives the same
        // acceptance and the same |density| contribution: the permutations
        // are symmetries of the cell and the frame change has |det| = 1.
        let g = theta();
        let b = wp_form::pairing_matrix(&g).unwrap();
        let contribution = |u: &[f64]| -> Option<f64> {
            let x = penner::simplicial_coordinates(&g, u);
            if x.iter().any(|&v| v <= 0.0) {
                return None;
            }
            let (lambda, frame) = slice_frame(&g, u, JacobianMode::Analytic).unwrap();
            Some(wp_form::density_on_frame(&b, &lambda, &frame).unwrap().abs())
        };
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let mut checked = 0;
        for _ in 0..800 {
            let u = draw_direction(&mut rng, 3, Gauge::Simplex);
            let base = contribution(&u);
            for perm in &perms {
                let pu: Vec<f64> = perm.iter().map(|&i| u[i]).collect();
                let permuted = contribution(&pu);
                match (base, permuted) {
                    (None, None) => {}
                    (Some(a), Some(p)) => {
                        assert_close(a, p, 1e-12, 1e-9);
                        checked += 1;
                    }
                    _ => panic!("acceptance must be permutation-invariant"),
                }
            }
        }
        // Theta's acceptance rate is about 8%, so roughly 380 of the 4800
        // permuted draws land in the cell.
        assert!(checked > 150);
    }

    #[test]
    fn domain_points_are_in_domain_with_lambda_above_four() {
        let g = theta();
        for proposal in [
            Proposal::SimplexUniform,
            Proposal::LogUniform { cutoff: 1e4 },
        ] {
            let mut config = SamplerConfig::new(61, 3_000);
            config.proposal = proposal;
            let points = sample_domain_points(&g, &config).unwrap();
            assert!(!points.is_empty());
            for lambda in &points {
                let d = penner::diagnostics(&g, lambda, DEFAULT_SLICE_TOL).unwrap();
                assert!(d.in_domain, "point {lambda:?} escaped the domain");
                assert!(d.min_lambda > 4.0, "min λ {} ≤ 4", d.min_lambda);
            }
        }
    }

    #[test]
    fn sampler_rejects_bad_configs() {
        let g = theta();
        let mut zero = SamplerConfig::new(1, 0);
        zero.samples = 0;
        assert!(matches!(
            estimate_cell_volume_n1(&g, &zero),
            Err(McError::BadConfig(_))
        ));
        let mut bad_cutoff = SamplerConfig::new(1, 10);
        bad_cutoff.proposal = Proposal::LogUniform { cutoff: 2.0 };
        assert!(matches!(
            sample_domain_points(&g, &bad_cutoff),
            Err(McError::BadConfig(_))
        ));
        let mut log_vol = SamplerConfig::new(1, 10);
        log_vol.proposal = Proposal::LogUniform { cutoff: 100.0 };
        assert!(matches!(
            estimate_cell_volume_n1(&g, &log_vol),
            Err(McError::BadConfig(_))
        ));
        let dumbbell = RibbonGraph::new(vec![1, 2, 0, 4, 5, 3], vec![3, 2, 1, 0, 5, 4]).unwrap();
        assert!(matches!(
            estimate_cell_volume_n1(&dumbbell, &SamplerConfig::new(1, 10)),
            Err(McError::WrongPunctureCount(3))
        ));
    }
}
