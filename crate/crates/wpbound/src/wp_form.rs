//! The intersection two-form on a cell and its top wedge power.
//!
//! In λ-lengths the two-form on the cell of a trivalent ribbon graph is
//! `ω = Σ_{j<k} b_jk · dλ_j/λ_j ∧ dλ_k/λ_k`, with an integer antisymmetric
//! pairing matrix `b` read off the vertex rotations: each trivalent vertex
//! whose edges in rotation order are `(A, B, C)` contributes `−2` to
//! `b[A][B]`, `b[B][C]`, `b[C][A]` (and `+2` to the transposes). A vertex on
//! a loop contributes nothing — its terms cancel in pairs.
//!
//! The volume form on a cell of a genus-`g`, `n`-puncture graph is the wedge
//! power `ω^∧p` with `p = 3g − 3 + n` (no factorial normalization). The
//! module expands it over the bitmask basis of `dλ` monomials, and evaluates
//! densities against a frame two ways: a Pfaffian of the restricted two-form,
//! and the explicit monomial expansion.

use crate::ribbon_graph::{GraphError, RibbonGraph};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum WpFormError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bitmask basis supports at most 63 edges, the graph has {0}")]
    TooManyEdges(usize),
    #[error("frame must have {expected} vectors of length {len}, got {got} of length {got_len}")]
    BadFrame {
        expected: usize,
        len: usize,
        got: usize,
        got_len: usize,
    },
}

/// The integer pairing matrix `b` of the cell's two-form.
pub fn pairing_matrix(graph: &RibbonGraph) -> Result<Vec<Vec<i64>>, WpFormError> {
    graph.ensure_trivalent()?;
    let n = graph.num_edges();
    let mut b = vec![vec![0i64; n]; n];
    for v in 0..graph.num_vertices() {
        let [a, bb, c] = graph.vertex_edge_triple(v);
        for (j, k) in [(a, bb), (bb, c), (c, a)] {
            b[j][k] -= 2;
            b[k][j] += 2;
        }
    }
    Ok(b)
}

/// Coefficient matrix of the two-form in the `dλ` basis at a point:
/// `M_jk = b_jk / (λ_j λ_k)`.
pub fn two_form_matrix(b: &[Vec<i64>], lambda: &[f64]) -> Vec<Vec<f64>> {
    let n = lambda.len();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            m[j][k] = b[j][k] as f64 / (lambda[j] * lambda[k]);
        }
    }
    m
}

/// A homogeneous exterior form with integer coefficients over the basis of
/// `dλ` monomials, each monomial encoded as a bitmask of edge indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgePower {
    pub n_vars: usize,
    /// Form degree: every key has exactly this many bits set.
    pub degree: usize,
    /// Sorted for deterministic iteration; zero coefficients are dropped.
    pub terms: BTreeMap<u64, i64>,
}

impl WedgePower {
    pub fn coefficient(&self, mask: u64) -> i64 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    /// `p!` for the half-degree `p`: the multiplicity with which every
    /// distinct pairing of two-form factors occurs inside the literal
    /// `p`-fold product.
    pub fn symmetry_factor(&self) -> i64 {
        (1..=(self.degree / 2) as i64).product()
    }

    /// Coefficients with the factor-ordering multiplicity divided out. The
    /// combinatorial cap `|a_I| ≤ 2^N` — and the one-puncture magnitude
    /// `2^{4g−2}` — are statements about these integers, while density
    /// evaluation uses the literal terms.
    pub fn normalized_terms(&self) -> Vec<(u64, i64)> {
        let f = self.symmetry_factor();
        self.terms
            .iter()
            .map(|(&mask, &coeff)| {
                assert_eq!(coeff % f, 0, "pairing multiplicity must divide every coefficient");
                (mask, coeff / f)
            })
            .collect()
    }

    pub fn max_abs_normalized(&self) -> i64 {
        self.normalized_terms()
            .iter()
            .map(|&(_, c)| c.abs())
            .max()
            .unwrap_or(0)
    }
}

/// Sign of appending `dλ_j` to the sorted monomial `mask` (which must not
/// contain `j`): one transposition per set bit above `j`.
fn insert_sign(mask: u64, j: usize) -> i64 {
    if (mask >> (j + 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `ω^∧p` expanded over the bitmask basis. `p = 0` gives the constant 1.
pub fn wedge_power(b: &[Vec<i64>], p: usize) -> Result<WedgePower, WpFormError> {
    let n = b.len();
    if n > 63 {
        return Err(WpFormError::TooManyEdges(n));
    }
    let mut terms = BTreeMap::new();
    terms.insert(0u64, 1i64);
    for step in 0..p {
        let mut next: BTreeMap<u64, i64> = BTreeMap::new();
        for (&mask, &coeff) in &terms {
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                for k in (j + 1)..n {
                    let bjk = b[j][k];
                    if bjk == 0 || mask & (1 << k) != 0 {
                        continue;
                    }
                    let sign = insert_sign(mask, j) * insert_sign(mask | (1 << j), k);
                    let entry = next.entry(mask | (1 << j) | (1 << k)).or_insert(0);
                    *entry += coeff * bjk * sign;
                }
            }
        }
        next.retain(|_, c| *c != 0);
        terms = next;
        if terms.is_empty() {
            return Ok(WedgePower {
                n_vars: n,
                degree: 2 * (step + 1),
                terms,
            });
        }
    }
    Ok(WedgePower {
        n_vars: n,
        degree: 2 * p,
        terms,
    })
}

/// The volume-form power for a cell: `ω^∧p` with `p = 3g − 3 + n`.
pub fn top_power(graph: &RibbonGraph) -> Result<WedgePower, WpFormError> {
    let b = pairing_matrix(graph)?;
    let p = (graph.num_edges() - graph.num_faces()) / 2;
    wedge_power(&b, p)
}

/// Pfaffian of an antisymmetric matrix by expansion along the first active
/// row. Exact enough for the small even sizes that occur here; the empty
/// matrix has Pfaffian 1 and odd sizes have Pfaffian 0.
pub fn pfaffian(a: &[Vec<f64>]) -> f64 {
    let all: Vec<usize> = (0..a.len()).collect();
    if all.len() % 2 == 1 {
        return 0.0;
    }
    fn rec(a: &[Vec<f64>], idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let i = idx[0];
        let mut sum = 0.0;
        for t in 1..idx.len() {
            let entry = a[i][idx[t]];
            if entry == 0.0 {
                continue;
            }
            let rest: Vec<usize> = idx[1..]
                .iter()
                .copied()
                .filter(|&x| x != idx[t])
                .collect();
            let sign = if t % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * entry * rec(a, &rest);
        }
        sum
    }
    rec(a, &all)
}

/// Determinant by LU with partial pivoting.
pub fn determinant(mat: &[Vec<f64>]) -> f64 {
    let n = mat.len();
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    det
}

fn check_frame(n_vars: usize, degree: usize, frame: &[Vec<f64>]) -> Result<(), WpFormError> {
    let got_len = frame.first().map_or(n_vars, Vec::len);
    if frame.len() != degree || frame.iter().any(|v| v.len() != n_vars) {
        return Err(WpFormError::BadFrame {
            expected: degree,
            len: n_vars,
            got: frame.len(),
            got_len,
        });
    }
    Ok(())
}

/// `ω^∧p` evaluated on a frame of `2p` tangent vectors, via the restricted
/// two-form: `p! · Pf(Fᵀ M F)` with `M` from [`two_form_matrix`].
pub fn density_on_frame(
    b: &[Vec<i64>],
    lambda: &[f64],
    frame: &[Vec<f64>],
) -> Result<f64, WpFormError> {
    let n = lambda.len();
    let k = frame.len();
    check_frame(n, k & !1, frame)?;
    let m = two_form_matrix(b, lambda);
    // G[a][c] = ω(F_a, F_c) = F_aᵀ M F_c.
    let mut g = vec![vec![0.0; k]; k];
    for a in 0..k {
        for c in (a + 1)..k {
            let mut val = 0.0;
            for j in 0..n {
                let mut mv = 0.0;
                for l in 0..n {
                    mv += m[j][l] * frame[c][l];
                }
                val += frame[a][j] * mv;
            }
            g[a][c] = val;
            g[c][a] = -val;
        }
    }
    let p = k / 2;
    Ok(factorial(p) * pfaffian(&g))
}

/// The same evaluation through the monomial expansion:
/// `Σ_I a_I · det((diag(1/λ) F) restricted to rows I)`.
pub fn density_from_power(
    power: &WedgePower,
    lambda: &[f64],
    frame: &[Vec<f64>],
) -> Result<f64, WpFormError> {
    check_frame(power.n_vars, power.degree, frame)?;
    let k = power.degree;
    let mut sum = 0.0;
    for (&mask, &coeff) in &power.terms {
        let rows: Vec<usize> = (0..power.n_vars).filter(|&j| mask & (1 << j) != 0).collect();
        let mut sub = vec![vec![0.0; k]; k];
        for (r, &j) in rows.iter().enumerate() {
            for (c, vec) in frame.iter().enumerate() {
                sub[r][c] = vec[j] / lambda[j];
            }
        }
        sum += coeff as f64 * determinant(&sub);
    }
    Ok(sum)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// For a one-puncture cell the top power has exactly `N` monomials — the
/// complements of the singletons — with coefficients `a_î = s · (−1)^i · m`
/// for a fixed sign `s` and magnitude `m`. Returns `(s, m)` when the power
/// has that shape.
pub fn n1_alternating(power: &WedgePower) -> Option<(i64, i64)> {
    let n = power.n_vars;
    if power.degree + 1 != n || power.terms.len() != n {
        return None;
    }
    let full: u64 = (1 << n) - 1;
    let a0 = power.coefficient(full & !1);
    if a0 == 0 {
        return None;
    }
    let (s, m) = (a0.signum(), a0.abs());
    for i in 0..n {
        let want = s * if i % 2 == 0 { m } else { -m };
        if power.coefficient(full & !(1 << i)) != want {
            return None;
        }
    }
    Some((s, m))
}

/// Explicit one-puncture density using the alternating-coefficient shape:
/// `s·m · Σ_i (−1)^i · det(diag(1/λ)·F with row i omitted)`.
pub fn density_n1_explicit(
    s: i64,
    m: i64,
    lambda: &[f64],
    frame: &[Vec<f64>],
) -> Result<f64, WpFormError> {
    let n = lambda.len();
    check_frame(n, n - 1, frame)?;
    let k = n - 1;
    let mut sum = 0.0;
    for omit in 0..n {
        let mut sub = vec![vec![0.0; k]; k];
        let mut r = 0;
        for j in 0..n {
            if j == omit {
                continue;
            }
            for (c, vec) in frame.iter().enumerate() {
                sub[r][c] = vec[j] / lambda[j];
            }
            r += 1;
        }
        let sign = if omit % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * determinant(&sub);
    }
    Ok((s * m) as f64 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penner::tests::assert_close;
    use crate::ribbon_graph::enumerate_trivalent;
    use rand::Rng;
    use rand::SeedableRng;

    fn theta() -> RibbonGraph {
        RibbonGraph::theta()
    }

    fn planar_theta() -> RibbonGraph {
        RibbonGraph::new(vec![1, 2, 0, 5, 3, 4], vec![3, 4, 5, 0, 1, 2]).unwrap()
    }

    fn dumbbell() -> RibbonGraph {
        RibbonGraph::new(vec![1, 2, 0, 4, 5, 3], vec![3, 2, 1, 0, 5, 4]).unwrap()
    }

    fn small_catalog() -> Vec<RibbonGraph> {
        let mut all = Vec::new();
        for (g, n) in [(1, 1), (0, 3), (1, 2), (0, 4)] {
            all.extend(enumerate_trivalent(g, n, 8).unwrap());
        }
        all
    }

    fn random_frame(n: usize, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn theta_pairing_matrix() {
        let b = pairing_matrix(&theta()).unwrap();
        assert_eq!(b[0][1], -4);
        assert_eq!(b[1][2], -4);
        assert_eq!(b[0][2], 4);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(b[j][k], -b[k][j]);
            }
        }
    }

    #[test]
    fn planar_theta_and_dumbbell_forms_vanish() {
        // Both underlie zero-dimensional moduli, and the dumbbell's loop
        // vertices cancel term by term.
        for g in [planar_theta(), dumbbell()] {
            let b = pairing_matrix(&g).unwrap();
            assert!(b.iter().flatten().all(|&x| x == 0));
            let power = top_power(&g).unwrap();
            assert_eq!(power.degree, 0);
            assert_eq!(power.coefficient(0), 1);
        }
    }

    #[test]
    fn pairing_entries_are_even_and_bounded_across_catalog() {
        for g in small_catalog() {
            let b = pairing_matrix(&g).unwrap();
            for j in 0..g.num_edges() {
                assert_eq!(b[j][j], 0);
                for k in 0..g.num_edges() {
                    assert_eq!(b[j][k], -b[k][j]);
                    assert_eq!(b[j][k] % 2, 0);
                    assert!(b[j][k].abs() <= 4, "entry {} out of range", b[j][k]);
                }
            }
        }
    }

    #[test]
    fn theta_top_power_terms() {
        let power = top_power(&theta()).unwrap();
        assert_eq!(power.degree, 2);
        assert_eq!(power.coefficient(0b011), -4);
        assert_eq!(power.coefficient(0b110), -4);
        assert_eq!(power.coefficient(0b101), 4);
        assert_eq!(power.terms.len(), 3);
        // One power higher is a 4-form on 3 variables: identically zero.
        let b = pairing_matrix(&theta()).unwrap();
        assert!(wedge_power(&b, 2).unwrap().terms.is_empty());
    }

    #[test]
    fn theta_alternating_shape() {
        let power = top_power(&theta()).unwrap();
        assert_eq!(n1_alternating(&power), Some((-1, 4)));
    }

    #[test]
    fn normalized_coefficients_divide_out_the_pairing_multiplicity() {
        // Degree-2 powers are their own normalization.
        let power = top_power(&theta()).unwrap();
        assert_eq!(power.symmetry_factor(), 1);
        assert_eq!(power.max_abs_normalized(), 4);

        // Two-puncture torus graphs have p = 2, so every literal coefficient
        // carries a factor 2; the normalized values obey the 2^N cap.
        for graph in crate::ribbon_graph::enumerate_trivalent(1, 2, 8).unwrap() {
            let power = top_power(&graph).unwrap();
            assert_eq!(power.symmetry_factor(), 2);
            let cap = 1i64 << graph.num_edges();
            for (_, coeff) in power.normalized_terms() {
                assert!(coeff.abs() <= cap);
            }
            assert!(power.max_abs_normalized() <= cap);
        }
    }

    #[test]
    fn pfaffian_small_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        assert_eq!(pfaffian(&Vec::<Vec<f64>>::new()), 1.0);
        assert_eq!(pfaffian(&[vec![0.0]]), 0.0);
        for _ in 0..50 {
            // 4×4: Pf = af − be + cd.
            let (a, b, c, d, e, f): (f64, f64, f64, f64, f64, f64) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let m = vec![
                vec![0.0, a, b, c],
                vec![-a, 0.0, d, e],
                vec![-b, -d, 0.0, f],
                vec![-c, -e, -f, 0.0],
            ];
            assert_close(pfaffian(&m), a * f - b * e + c * d, 1e-14, 1e-12);
        }
        for size in [2usize, 4, 6, 8] {
            for _ in 0..10 {
                let mut m = vec![vec![0.0; size]; size];
                for j in 0..size {
                    for k in (j + 1)..size {
                        let v = rng.gen_range(-1.0..1.0);
                        m[j][k] = v;
                        m[k][j] = -v;
                    }
                }
                let pf = pfaffian(&m);
                assert_close(pf * pf, determinant(&m), 1e-10, 1e-9);
            }
        }
    }

    #[test]
    fn density_routes_agree_across_catalog() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for g in small_catalog() {
            let b = pairing_matrix(&g).unwrap();
            let power = top_power(&g).unwrap();
            let n = g.num_edges();
            let k = power.degree;
            for _ in 0..40 {
                let lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..20.0)).collect();
                let frame = random_frame(n, k, &mut rng);
                let via_pf = density_on_frame(&b, &lambda, &frame).unwrap();
                let via_terms = density_from_power(&power, &lambda, &frame).unwrap();
                assert_close(via_pf, via_terms, 1e-12, 1e-9);
                if let Some((s, m)) = n1_alternating(&power) {
                    let explicit = density_n1_explicit(s, m, &lambda, &frame).unwrap();
                    assert_close(via_terms, explicit, 1e-12, 1e-9);
                }
            }
        }
    }

    #[test]
    fn one_puncture_cells_have_alternating_top_power() {
        for g in enumerate_trivalent(1, 1, 8).unwrap() {
            let power = top_power(&g).unwrap();
            let (_, m) = n1_alternating(&power).expect("alternating shape");
            // 2^(4g−2) with g = 1.
            assert_eq!(m, 4);
        }
    }

    #[test]
    fn density_scales_homogeneously() {
        // λ → tλ sends M to M/t², hence the density of ω^∧p to t^(−2p) times
        // itself.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let g = theta();
        let b = pairing_matrix(&g).unwrap();
        for _ in 0..20 {
            let lambda: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..10.0)).collect();
            let frame = random_frame(3, 2, &mut rng);
            let base = density_on_frame(&b, &lambda, &frame).unwrap();
            for t in [0.5, 2.0, 7.0f64] {
                let scaled: Vec<f64> = lambda.iter().map(|&x| t * x).collect();
                let d = density_on_frame(&b, &scaled, &frame).unwrap();
                assert_close(d, base / t.powi(2), 1e-14, 1e-11);
            }
        }
    }

    #[test]
    fn frame_validation() {
        let g = theta();
        let b = pairing_matrix(&g).unwrap();
        let bad = vec![vec![1.0, 0.0, 0.0]];
        assert!(matches!(
            density_on_frame(&b, &[12.0, 12.0, 12.0], &bad),
            Err(WpFormError::BadFrame { .. })
        ));
    }
}
