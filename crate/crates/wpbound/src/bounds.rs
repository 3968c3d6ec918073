//! Closed-form volume bounds, triangulation counting, and the large-genus
//! limit report.
//!
//! Every bound is reported as a [`BoundValue`]: the direct floating-point
//! evaluation (which may overflow to infinity for large genus), the always
//! finite natural logarithm, and the formula it came from. Factorials are
//! taken exactly in arbitrary precision and only then reduced to logarithms,
//! so the reports stay meaningful out to genus several hundred.
//!
//! Two closed forms for the one-puncture total exist side by side — the
//! per-cell constant `(8/3)^{(N−1)/2}` and the aggregated `(ln 4)^{6g−3}` —
//! and neither is "corrected" into the other; [`total_upper_bound`] exposes
//! both, plus the product assembled from this module's own pieces, under
//! explicit [`Variant`] names.

use crate::ribbon_graph::{enumerate_trivalent, GraphError, RibbonGraph};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no punctured hyperbolic surface has genus {g} and {n} punctures")]
    BadSurface { g: usize, n: usize },
    #[error("this bound is stated for one puncture; got n = {0}")]
    OnePunctureOnly(usize),
    #[error("unknown bound variant {0:?}; expected conclusion-n1, general-n, or assembled")]
    UnknownVariant(String),
    #[error("the recursion compares n against n−1 and needs n ≥ 2, got {0}")]
    NeedsTwoPunctures(usize),
    #[error("limit report needs g_max ≥ 2, got {0}")]
    GMaxTooSmall(usize),
}

/// A bound together with its logarithm and the formula that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundValue {
    /// Direct evaluation; overflows to `+inf` once the genus is large.
    pub value: f64,
    /// Natural log of the bound, finite at every supported genus.
    pub ln_value: f64,
    pub formula: &'static str,
}

impl BoundValue {
    fn new(value: f64, ln_value: f64, formula: &'static str) -> Self {
        BoundValue {
            value,
            ln_value,
            formula,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (ln {:.6})", self.value, self.ln_value)
    }
}

/// Which printed form of the total upper bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// `(2g)! 2^{4g−2} 3^{4g−2} (ln 4)^{6g−3} (6/e)^{2g}`, one puncture only.
    ConclusionN1,
    /// The displayed product for fixed `n`, carrying `(8/3)^{N/2}`.
    GeneralN,
    /// Triangulation count bound × per-graph bound, multiplied out from this
    /// module's own pieces.
    Assembled,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self, BoundsError> {
        match s {
            "conclusion-n1" => Ok(Variant::ConclusionN1),
            "general-n" => Ok(Variant::GeneralN),
            "assembled" => Ok(Variant::Assembled),
            other => Err(BoundsError::UnknownVariant(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::ConclusionN1 => "conclusion-n1",
            Variant::GeneralN => "general-n",
            Variant::Assembled => "assembled",
        }
    }

    /// The printed formula matching the surface type: the aggregated
    /// one-puncture form when n = 1, the general product otherwise.
    pub fn default_for(n: usize) -> Self {
        if n == 1 {
            Variant::ConclusionN1
        } else {
            Variant::GeneralN
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_surface(g: usize, n: usize) -> Result<(), BoundsError> {
    if n == 0 || 2 * g + n <= 2 {
        return Err(BoundsError::BadSurface { g, n });
    }
    Ok(())
}

/// Edge and vertex counts of a trivalent graph filling the surface:
/// `N = 6g−6+3n`, `V = 4g−4+2n`.
fn dims(g: usize, n: usize) -> Result<(usize, usize), BoundsError> {
    check_surface(g, n)?;
    Ok((6 * g + 3 * n - 6, 4 * g + 2 * n - 4))
}

/// Exact factorial in arbitrary precision.
pub fn factorial(k: usize) -> BigUint {
    (1..=k as u64).map(BigUint::from).product()
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 64;
    let top = x >> shift;
    let v = top.iter_u64_digits().next().unwrap();
    (v as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln k!`, taken from the exact factorial rather than an asymptotic series.
pub fn ln_factorial(k: usize) -> f64 {
    ln_biguint(&factorial(k))
}

fn factorial_f64(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

const LN_2: f64 = std::f64::consts::LN_2;
const E: f64 = std::f64::consts::E;
const EIGHT_THIRDS: f64 = 8.0 / 3.0;

fn ln3() -> f64 {
    3f64.ln()
}

/// `ln(6/e) = ln 6 − 1`.
fn ln_6_over_e() -> f64 {
    6f64.ln() - 1.0
}

pub const PER_GRAPH_FORMULA: &str = "2^N 3^V N^n (8/3)^((N-1)/2) (2V)^n";
pub const PER_GRAPH_N1_FORMULA: &str = "2^(4g-2) 3^V (8/3)^((N-1)/2) N";
pub const CELL_COUNT_FORMULA: &str = "(2g)!/N (6/e)^(2g) for one puncture";
pub const TRIANGULATION_FORMULA: &str = "(2g)! N^(2n-3) 2^(1-n) (6/e)^(2g)";
pub const CONCLUSION_N1_FORMULA: &str = "(2g)! 2^(4g-2) 3^(4g-2) (ln 4)^(6g-3) (6/e)^(2g)";
pub const GENERAL_N_FORMULA: &str =
    "(2g)! N^(2n-3) 2^(1-n) (6/e)^(2g) 2^N 3^V N^n (8/3)^(N/2) (2V)^n";
pub const ASSEMBLED_FORMULA: &str = "triangulation bound x per-graph bound";
pub const PENNER_LOWER_FORMULA: &str = "(8 e^2/9)^(2g) (2g)! / (2 (6g-3)^2)";

/// Upper bound on one cell's volume integral, any number of punctures.
pub fn per_graph_bound(g: usize, n: usize) -> Result<BoundValue, BoundsError> {
    let (nn, v) = dims(g, n)?;
    let (nf, vf) = (nn as f64, v as f64);
    let value = 2f64.powi(nn as i32)
        * 3f64.powi(v as i32)
        * nf.powi(n as i32)
        * EIGHT_THIRDS.powf((nf - 1.0) / 2.0)
        * (2.0 * vf).powi(n as i32);
    let ln_value = nf * LN_2
        + vf * ln3()
        + n as f64 * nf.ln()
        + (nf - 1.0) / 2.0 * EIGHT_THIRDS.ln()
        + n as f64 * (2.0 * vf).ln();
    Ok(BoundValue::new(value, ln_value, PER_GRAPH_FORMULA))
}

/// The sharper one-puncture per-cell bound from the explicit volume form.
pub fn per_graph_bound_n1(g: usize) -> Result<BoundValue, BoundsError> {
    let (nn, v) = dims(g, 1)?;
    let (nf, vf) = (nn as f64, v as f64);
    let value = 2f64.powi(4 * g as i32 - 2)
        * 3f64.powi(v as i32)
        * EIGHT_THIRDS.powf((nf - 1.0) / 2.0)
        * nf;
    let ln_value =
        (4 * g - 2) as f64 * LN_2 + vf * ln3() + (nf - 1.0) / 2.0 * EIGHT_THIRDS.ln() + nf.ln();
    Ok(BoundValue::new(value, ln_value, PER_GRAPH_N1_FORMULA))
}

/// Asymptotic count of top-dimensional cells for one puncture.
pub fn cell_count_asymptotic(g: usize) -> Result<BoundValue, BoundsError> {
    let (nn, _) = dims(g, 1)?;
    let nf = nn as f64;
    let value = factorial_f64(2 * g) / nf * (6.0 / E).powi(2 * g as i32);
    let ln_value = ln_factorial(2 * g) - nf.ln() + 2.0 * g as f64 * ln_6_over_e();
    Ok(BoundValue::new(value, ln_value, CELL_COUNT_FORMULA))
}

/// Upper bound on the number of ideal triangulations for any `n`; at `n = 1`
/// it coincides with [`cell_count_asymptotic`].
pub fn triangulation_bound(g: usize, n: usize) -> Result<BoundValue, BoundsError> {
    let (nn, _) = dims(g, n)?;
    let nf = nn as f64;
    let value = factorial_f64(2 * g) * nf.powi(2 * n as i32 - 3) / 2f64.powi(n as i32 - 1)
        * (6.0 / E).powi(2 * g as i32);
    let ln_value = ln_factorial(2 * g) + (2.0 * n as f64 - 3.0) * nf.ln()
        - (n as f64 - 1.0) * LN_2
        + 2.0 * g as f64 * ln_6_over_e();
    Ok(BoundValue::new(value, ln_value, TRIANGULATION_FORMULA))
}

/// Total volume upper bound under the chosen printed form.
pub fn total_upper_bound(g: usize, n: usize, variant: Variant) -> Result<BoundValue, BoundsError> {
    check_surface(g, n)?;
    match variant {
        Variant::ConclusionN1 => {
            if n != 1 {
                return Err(BoundsError::OnePunctureOnly(n));
            }
            let gf = g as f64;
            let value = factorial_f64(2 * g)
                * 2f64.powi(4 * g as i32 - 2)
                * 3f64.powi(4 * g as i32 - 2)
                * 4f64.ln().powi(6 * g as i32 - 3)
                * (6.0 / E).powi(2 * g as i32);
            let ln_value = ln_factorial(2 * g)
                + (4.0 * gf - 2.0) * (LN_2 + ln3())
                + (6.0 * gf - 3.0) * 4f64.ln().ln()
                + 2.0 * gf * ln_6_over_e();
            Ok(BoundValue::new(value, ln_value, CONCLUSION_N1_FORMULA))
        }
        Variant::GeneralN => {
            let (nn, v) = dims(g, n)?;
            let (nf, vf) = (nn as f64, v as f64);
            let tri = triangulation_bound(g, n)?;
            let value = tri.value
                * 2f64.powi(nn as i32)
                * 3f64.powi(v as i32)
                * nf.powi(n as i32)
                * EIGHT_THIRDS.powf(nf / 2.0)
                * (2.0 * vf).powi(n as i32);
            let ln_value = tri.ln_value
                + nf * LN_2
                + vf * ln3()
                + n as f64 * nf.ln()
                + nf / 2.0 * EIGHT_THIRDS.ln()
                + n as f64 * (2.0 * vf).ln();
            Ok(BoundValue::new(value, ln_value, GENERAL_N_FORMULA))
        }
        Variant::Assembled => {
            let tri = triangulation_bound(g, n)?;
            let per = if n == 1 {
                per_graph_bound_n1(g)?
            } else {
                per_graph_bound(g, n)?
            };
            Ok(BoundValue::new(
                tri.value * per.value,
                tri.ln_value + per.ln_value,
                ASSEMBLED_FORMULA,
            ))
        }
    }
}

/// The matching lower bound for one puncture.
pub fn penner_lower_bound(g: usize) -> Result<BoundValue, BoundsError> {
    check_surface(g, 1)?;
    let gf = g as f64;
    let base = 8.0 * E * E / 9.0;
    let denom = 6.0 * gf - 3.0;
    let value = base.powi(2 * g as i32) * factorial_f64(2 * g) / (2.0 * denom * denom);
    let ln_value =
        2.0 * gf * base.ln() + ln_factorial(2 * g) - LN_2 - 2.0 * denom.ln();
    Ok(BoundValue::new(value, ln_value, PENNER_LOWER_FORMULA))
}

/// One row of the large-genus table: `ratio = ln(total_upper)/(g ln g)`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub g: usize,
    pub ln_total_upper: f64,
    pub ratio: f64,
}

/// The ratio table for `g = 2..=g_max` at fixed `n`, computed entirely in
/// log space. The ratio decreases toward its limiting value 2 from above.
pub fn limit_report(g_max: usize, n: usize) -> Result<Vec<LimitRow>, BoundsError> {
    if g_max < 2 {
        return Err(BoundsError::GMaxTooSmall(g_max));
    }
    let variant = Variant::default_for(n);
    (2..=g_max)
        .map(|g| {
            let total = total_upper_bound(g, n, variant)?;
            let gf = g as f64;
            Ok(LimitRow {
                g,
                ln_total_upper: total.ln_value,
                ratio: total.ln_value / (gf * gf.ln()),
            })
        })
        .collect()
}

/// Number of isomorphism classes of trivalent graph cells, by enumeration.
pub fn count_triangulations_exact(
    g: usize,
    n: usize,
    vertex_cap: usize,
) -> Result<usize, BoundsError> {
    Ok(enumerate_trivalent(g, n, vertex_cap)?.len())
}

/// `Σ 1/|Aut Γ|` over the enumerated classes — the exact weight that the
/// aggregate bounds replace by the class count.
pub fn sum_inverse_aut(g: usize, n: usize, vertex_cap: usize) -> Result<f64, BoundsError> {
    let cat = enumerate_trivalent(g, n, vertex_cap)?;
    Ok(cat.iter().map(|x| 1.0 / x.aut_order() as f64).sum())
}

/// Result of checking the puncture-reduction recursion at `(g, n)`.
#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub g: usize,
    pub n: usize,
    pub count_n: usize,
    pub count_n_minus_1: usize,
    /// `N²/2 × |T(g, n−1)|` with `N = 6g−6+3n`.
    pub recursion_rhs: f64,
    pub inequality_holds: bool,
    pub graphs_checked: usize,
    pub contractions_checked: usize,
    /// Every contraction landed on a class present in the `(g, n−1)` catalog.
    pub contraction_closed: bool,
    /// Every graph had at least one edge joining two distinct punctures.
    pub every_graph_contractible: bool,
    pub pass: bool,
}

/// Verify `|T(g,n)| < N²/2 · |T(g,n−1)|` by enumeration, and that shrinking
/// any edge joining two distinct punctures lands inside the smaller catalog.
pub fn verify_counting_recursion(
    g: usize,
    n: usize,
    vertex_cap: usize,
) -> Result<CountingReport, BoundsError> {
    if n < 2 {
        return Err(BoundsError::NeedsTwoPunctures(n));
    }
    check_surface(g, n - 1)?;
    let cat_n = enumerate_trivalent(g, n, vertex_cap)?;
    let cat_n1 = enumerate_trivalent(g, n - 1, vertex_cap)?;
    let keys: BTreeSet<Vec<usize>> = cat_n1.iter().map(|x| x.canonical().key).collect();

    let nn = 6 * g + 3 * n - 6;
    let recursion_rhs = (nn * nn) as f64 / 2.0 * cat_n1.len() as f64;
    let inequality_holds = 2 * cat_n.len() < nn * nn * cat_n1.len();

    let mut contractions_checked = 0usize;
    let mut contraction_closed = true;
    let mut every_graph_contractible = true;
    for gamma in &cat_n {
        let triangulation = gamma.dual();
        let mut contractible = false;
        for e in 0..triangulation.num_edges() {
            match triangulation.contract_puncture_pair(e) {
                Ok(smaller) => {
                    contractible = true;
                    contractions_checked += 1;
                    if !keys.contains(&smaller.dual().canonical().key) {
                        contraction_closed = false;
                    }
                }
                Err(GraphError::LoopContraction(_)) => {}
                Err(err) => return Err(err.into()),
            }
        }
        if !contractible {
            every_graph_contractible = false;
        }
    }

    let pass = inequality_holds && contraction_closed && every_graph_contractible;
    Ok(CountingReport {
        g,
        n,
        count_n: cat_n.len(),
        count_n_minus_1: cat_n1.len(),
        recursion_rhs,
        inequality_holds,
        graphs_checked: cat_n.len(),
        contractions_checked,
        contraction_closed,
        every_graph_contractible,
        pass,
    })
}

/// Everything the `bound` command reports for one surface type.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub g: usize,
    pub n: usize,
    pub per_graph_bound: BoundValue,
    pub per_graph_bound_n1: Option<BoundValue>,
    /// Exact class count when the surface is within the enumeration cap.
    pub cell_count_exact: Option<usize>,
    /// Exact `Σ 1/|Aut|` when enumeration is available.
    pub sum_inverse_aut: Option<f64>,
    pub cell_count_asymptotic: Option<BoundValue>,
    pub triangulation_bound: BoundValue,
    pub variant: Variant,
    pub total_upper: BoundValue,
    /// All applicable variants side by side, keyed by variant name.
    pub total_upper_variants: Vec<(String, BoundValue)>,
    pub penner_lower: Option<BoundValue>,
    /// `ln(total_upper)/(g ln g)`; undefined at g ≤ 1.
    pub limit_ratio: Option<f64>,
}

/// Assemble the full report. `variant` defaults to the printed form matching
/// `n`; enumeration-backed fields are filled only when `V ≤ vertex_cap`.
pub fn bound_report(
    g: usize,
    n: usize,
    vertex_cap: usize,
    variant: Option<Variant>,
) -> Result<BoundReport, BoundsError> {
    let (_, v) = dims(g, n)?;
    let variant = variant.unwrap_or_else(|| Variant::default_for(n));
    let total_upper = total_upper_bound(g, n, variant)?;

    let mut total_upper_variants = Vec::new();
    if n == 1 {
        total_upper_variants.push((
            Variant::ConclusionN1.name().to_string(),
            total_upper_bound(g, n, Variant::ConclusionN1)?,
        ));
    }
    total_upper_variants.push((
        Variant::GeneralN.name().to_string(),
        total_upper_bound(g, n, Variant::GeneralN)?,
    ));
    total_upper_variants.push((
        Variant::Assembled.name().to_string(),
        total_upper_bound(g, n, Variant::Assembled)?,
    ));

    let (cell_count_exact, sum_inv_aut) = if v <= vertex_cap {
        let cat = enumerate_trivalent(g, n, vertex_cap)?;
        let inv: f64 = cat.iter().map(|x| 1.0 / x.aut_order() as f64).sum();
        (Some(cat.len()), Some(inv))
    } else {
        (None, None)
    };

    let gf = g as f64;
    let limit_ratio = (g >= 2).then(|| total_upper.ln_value / (gf * gf.ln()));

    Ok(BoundReport {
        g,
        n,
        per_graph_bound: per_graph_bound(g, n)?,
        per_graph_bound_n1: (n == 1).then(|| per_graph_bound_n1(g)).transpose()?,
        cell_count_exact,
        sum_inverse_aut: sum_inv_aut,
        cell_count_asymptotic: (n == 1).then(|| cell_count_asymptotic(g)).transpose()?,
        triangulation_bound: triangulation_bound(g, n)?,
        variant,
        total_upper,
        total_upper_variants,
        penner_lower: (n == 1).then(|| penner_lower_bound(g)).transpose()?,
        limit_ratio,
    })
}

/// Catalog handle used by report assembly elsewhere.
pub fn catalog(g: usize, n: usize, vertex_cap: usize) -> Result<Vec<RibbonGraph>, BoundsError> {
    Ok(enumerate_trivalent(g, n, vertex_cap)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penner::tests::assert_close;

    #[test]
    fn per_graph_frozen_values() {
        assert_close(per_graph_bound(1, 1).unwrap().value, 2304.0, 1e-9, 1e-12);
        let expected_21 = 512.0 * 729.0 * 9.0 * EIGHT_THIRDS.powi(4) * 12.0;
        assert_close(per_graph_bound(2, 1).unwrap().value, expected_21, 0.0, 1e-12);
        assert_close(per_graph_bound_n1(1).unwrap().value, 288.0, 1e-9, 1e-12);
        let expected_n1_g2 = 64.0 * 729.0 * EIGHT_THIRDS.powi(4) * 9.0;
        assert_close(
            per_graph_bound_n1(2).unwrap().value,
            expected_n1_g2,
            0.0,
            1e-12,
        );
        for g in 1..8 {
            assert!(
                per_graph_bound_n1(g + 1).unwrap().value > per_graph_bound_n1(g).unwrap().value
            );
        }
        // The n-dependence follows the formula itself.
        let ratio = per_graph_bound(1, 2).unwrap().value / per_graph_bound(1, 1).unwrap().value;
        let expected = 2f64.powi(3) * 3f64.powi(2) * (36.0 / 3.0)
            * EIGHT_THIRDS.powf(1.5)
            * (64.0 / 4.0);
        assert_close(ratio, expected, 0.0, 1e-10);
    }

    #[test]
    fn cell_count_and_triangulation_bound() {
        let cc = cell_count_asymptotic(1).unwrap();
        assert_close(cc.value, 24.0 / (E * E), 0.0, 1e-12);
        assert_close(cc.value, 3.24805, 1e-5, 0.0);
        // At one puncture the triangulation bound is the cell-count
        // asymptotic itself.
        for g in 1..6 {
            let tri = triangulation_bound(g, 1).unwrap();
            let cc = cell_count_asymptotic(g).unwrap();
            assert_close(tri.value, cc.value, 0.0, 1e-12);
            assert_close(tri.ln_value, cc.ln_value, 1e-10, 1e-12);
        }
        let tri_12 = triangulation_bound(1, 2).unwrap();
        assert_close(tri_12.value, 2.0 * 6.0 / 2.0 * (6.0 / E).powi(2), 0.0, 1e-12);
    }

    #[test]
    fn total_upper_frozen_values_and_variant_ratio() {
        let conclusion = total_upper_bound(1, 1, Variant::ConclusionN1).unwrap();
        let expected = 2.0 * 4.0 * 9.0 * 4f64.ln().powi(3) * (6.0 / E).powi(2);
        assert_close(conclusion.value, expected, 0.0, 1e-12);
        assert!(conclusion.value > 930.0 && conclusion.value < 940.0);

        let assembled = total_upper_bound(1, 1, Variant::Assembled).unwrap();
        assert_close(
            assembled.value,
            cell_count_asymptotic(1).unwrap().value * 288.0,
            0.0,
            1e-12,
        );
        assert!(assembled.value > 935.0 && assembled.value < 936.0);

        // The two one-puncture forms differ exactly by the replacement of
        // (8/3)^((N-1)/2) with (ln 4)^(6g-3).
        for g in 1..=10 {
            let c = total_upper_bound(g, 1, Variant::ConclusionN1).unwrap();
            let a = total_upper_bound(g, 1, Variant::Assembled).unwrap();
            let expected_gap = (6.0 * g as f64 - 3.0) * 4f64.ln().ln()
                - (3.0 * g as f64 - 2.0) * EIGHT_THIRDS.ln();
            assert_close(c.ln_value - a.ln_value, expected_gap, 1e-9, 1e-9);
        }
    }

    #[test]
    fn general_n_reduces_at_one_puncture() {
        for g in 1..=6 {
            let total = total_upper_bound(g, 1, Variant::GeneralN).unwrap();
            let (nn, v) = dims(g, 1).unwrap();
            let (nf, vf) = (nn as f64, v as f64);
            let expected_ln = ln_factorial(2 * g) - nf.ln()
                + 2.0 * g as f64 * ln_6_over_e()
                + nf * LN_2
                + vf * ln3()
                + nf.ln()
                + nf / 2.0 * EIGHT_THIRDS.ln()
                + (2.0 * vf).ln();
            assert_close(total.ln_value, expected_ln, 1e-9, 1e-12);
        }
    }

    #[test]
    fn penner_lower_sits_below_the_upper_bound() {
        let lower = penner_lower_bound(1).unwrap();
        assert_close(
            lower.value,
            (8.0 * E * E / 9.0).powi(2) * 2.0 / (2.0 * 81.0 / 9.0),
            0.0,
            1e-12,
        );
        assert_close(lower.value, 4.79325, 1e-5, 0.0);
        let g2 = penner_lower_bound(2).unwrap();
        assert_close(
            g2.value,
            (8.0 * E * E / 9.0).powi(4) * 24.0 / (2.0 * 81.0),
            0.0,
            1e-12,
        );
        for g in 1..=20 {
            let upper = total_upper_bound(g, 1, Variant::ConclusionN1).unwrap();
            assert!(
                penner_lower_bound(g).unwrap().ln_value < upper.ln_value,
                "lower bound crossed the upper bound at g = {g}"
            );
        }
    }

    #[test]
    fn limit_ratio_trends_toward_two_from_above() {
        let rows = limit_report(500, 1).unwrap();
        assert_eq!(rows.len(), 499);
        assert_eq!(rows[0].g, 2);
        let at = |g: usize| rows.iter().find(|r| r.g == g).unwrap().ratio;
        // The approach to the limit is logarithmic: ratio ≈ 2 + c/ln g with
        // c ≈ 10.1, so g = 50 sits near 4.6 and g = 500 near 3.6.
        assert!(at(50) > 2.0 && at(50) < 5.0);
        assert!(at(500) > 2.0 && at(500) < 4.0);
        assert!(at(500) < at(50));
        assert!(at(500) - 2.0 < 0.85 * (at(50) - 2.0));
        for pair in rows.windows(2) {
            assert!(
                pair[1].ratio < pair[0].ratio,
                "ratio column must decrease: g = {}",
                pair[1].g
            );
        }
        assert!(rows.iter().all(|r| r.ln_total_upper.is_finite()));
        // Holding n fixed at a different value shifts the ratio by o(1).
        let rows_n3 = limit_report(500, 3).unwrap();
        let gap_50 = (rows_n3[48].ratio - at(50)).abs();
        let gap_500 = (rows_n3[498].ratio - at(500)).abs();
        assert!(gap_500 < gap_50);
        assert!(matches!(limit_report(1, 1), Err(BoundsError::GMaxTooSmall(1))));
    }

    #[test]
    fn general_n_growth_constant_sanity() {
        // The per-genus growth rate of ln(total/(2g)!) approaches
        // ln(2^17 3^3 / e^2) for every fixed n.
        let target = 17.0 * LN_2 + 3.0 * ln3() - 2.0;
        for n in 1..=3 {
            let rate = |g: usize| {
                (total_upper_bound(g, n, Variant::GeneralN).unwrap().ln_value
                    - ln_factorial(2 * g))
                    / g as f64
            };
            // The deviation carries an n-dependent (ln g)/g term, so it is
            // still visible at g = 30 but shrinking.
            assert!((rate(30) - target).abs() < 2.0, "n = {n}");
            assert!((rate(30) - target).abs() < (rate(5) - target).abs());
        }
    }

    #[test]
    fn exact_counts_and_recursion() {
        assert_eq!(count_triangulations_exact(1, 1, 8).unwrap(), 1);
        assert_eq!(count_triangulations_exact(0, 3, 8).unwrap(), 2);
        assert_close(sum_inverse_aut(1, 1, 8).unwrap(), 1.0 / 6.0, 1e-12, 0.0);
        // Theta's class has |Aut| = 6 and the (0,3) classes have 6 and 2.
        assert_close(
            sum_inverse_aut(0, 3, 8).unwrap(),
            1.0 / 6.0 + 1.0 / 2.0,
            1e-12,
            0.0,
        );

        for (g, n) in [(1, 2), (0, 4)] {
            let rep = verify_counting_recursion(g, n, 8).unwrap();
            assert!(rep.pass, "recursion check failed at ({g}, {n}): {rep:?}");
            assert!(rep.inequality_holds);
            assert!(rep.contraction_closed);
            assert!(rep.every_graph_contractible);
            assert!(rep.contractions_checked > 0);
            assert_eq!(
                rep.count_n,
                count_triangulations_exact(g, n, 8).unwrap()
            );
            assert!((rep.count_n as f64) < rep.recursion_rhs);
        }

        assert!(matches!(
            verify_counting_recursion(1, 1, 8),
            Err(BoundsError::NeedsTwoPunctures(1))
        ));
        assert!(matches!(
            verify_counting_recursion(0, 3, 8),
            Err(BoundsError::BadSurface { g: 0, n: 2 })
        ));
        assert!(matches!(
            count_triangulations_exact(2, 1, 4),
            Err(BoundsError::Graph(GraphError::CapExceeded { .. }))
        ));
    }

    #[test]
    fn report_assembly() {
        let rep = bound_report(1, 1, 8, None).unwrap();
        assert_eq!(rep.variant, Variant::ConclusionN1);
        assert_close(rep.per_graph_bound.value, 2304.0, 1e-9, 1e-12);
        assert_close(
            rep.per_graph_bound_n1.as_ref().unwrap().value,
            288.0,
            1e-9,
            1e-12,
        );
        assert_eq!(rep.cell_count_exact, Some(1));
        assert_close(rep.sum_inverse_aut.unwrap(), 1.0 / 6.0, 1e-12, 0.0);
        assert!(rep.penner_lower.is_some());
        assert_eq!(rep.limit_ratio, None);
        assert_eq!(rep.total_upper_variants.len(), 3);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("2304"));
        assert!(json.contains("288"));

        // Outside the cap the enumeration-backed fields are simply absent.
        let big = bound_report(2, 1, 4, Some(Variant::Assembled)).unwrap();
        assert_eq!(big.cell_count_exact, None);
        assert_eq!(big.sum_inverse_aut, None);
        assert!(big.limit_ratio.unwrap() > 2.0);

        let multi = bound_report(0, 4, 8, None).unwrap();
        assert_eq!(multi.variant, Variant::GeneralN);
        assert!(multi.per_graph_bound_n1.is_none());
        assert!(multi.penner_lower.is_none());
        assert_eq!(multi.total_upper_variants.len(), 2);

        assert!(matches!(
            bound_report(0, 1, 8, None),
            Err(BoundsError::BadSurface { g: 0, n: 1 })
        ));
        assert!(matches!(
            Variant::parse("tightest"),
            Err(BoundsError::UnknownVariant(_))
        ));
        assert_eq!(Variant::parse("general-n").unwrap(), Variant::GeneralN);
    }

    #[test]
    fn logs_match_values_and_survive_large_genus() {
        for g in 1..=5 {
            for n in 1..=3 {
                let b = per_graph_bound(g, n).unwrap();
                assert_close(b.value.ln(), b.ln_value, 1e-9, 1e-12);
                let t = total_upper_bound(g, n, Variant::Assembled).unwrap();
                assert_close(t.value.ln(), t.ln_value, 1e-9, 1e-12);
            }
        }
        let big = total_upper_bound(400, 1, Variant::ConclusionN1).unwrap();
        assert!(big.value.is_infinite());
        assert!(big.ln_value.is_finite());
        // ln(800!) against direct summation.
        let direct: f64 = (1..=800).map(|i| (i as f64).ln()).sum();
        assert_close(ln_factorial(800), direct, 1e-8, 1e-12);
        assert_eq!(factorial(6), BigUint::from(720u32));
    }
}
