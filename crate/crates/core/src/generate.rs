//! Seeded random systems for property suites and benchmarks.
//!
//! Every generated pair `(f, g)` is homogeneous of degree `p` with respect to
//! its dilation `r` by construction: each monomial of component `i` satisfies
//! `sum_j a_j r_j = p + r_i` up to rounding.

use rand::Rng;

use crate::model::{DilationMap, Monomial, PolyMap};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub min_dim: usize,
    pub max_dim: usize,
    /// Positive terms per component besides the mandatory ones.
    pub max_extra_terms: usize,
    /// Fixed degree, or `None` for a draw from `[0, 3]`.
    pub degree: Option<f64>,
    /// Draw weights from `{1, 2, 3}` instead of `[0.5, 3]`.
    pub integer_weights: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { min_dim: 1, max_dim: 4, max_extra_terms: 3, degree: None, integer_weights: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSystem {
    pub f: PolyMap,
    pub g: PolyMap,
    pub r: DilationMap,
    pub p: f64,
}

/// Nonnegative exponents with `sum_j a_j r_j = budget`, zero outside `support`.
fn split_budget<R: Rng>(rng: &mut R, r: &[f64], support: &[usize], budget: f64) -> Vec<f64> {
    let mut a = vec![0.0; r.len()];
    if support.is_empty() || budget <= 0.0 {
        return a;
    }
    let w: Vec<f64> = support.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    for (&j, wj) in support.iter().zip(&w) {
        a[j] = budget * wj / total / r[j];
    }
    a
}

fn random_support<R: Rng>(rng: &mut R, n: usize, exclude: Option<usize>) -> Vec<usize> {
    let candidates: Vec<usize> = (0..n).filter(|j| Some(*j) != exclude).collect();
    let mut support: Vec<usize> = candidates.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    if support.is_empty() && !candidates.is_empty() {
        support.push(candidates[rng.gen_range(0..candidates.len())]);
    }
    support
}

/// A cooperative `f` (negative pure-diagonal term plus positive monomials) and a
/// nondecreasing `g` whose component `i` contains a term linear in `x_i` and
/// only monomials with exponent at least 1 in `x_i`.
pub fn random_homogeneous_system<R: Rng>(rng: &mut R, cfg: &GeneratorConfig) -> GeneratedSystem {
    let n = rng.gen_range(cfg.min_dim..=cfg.max_dim.max(cfg.min_dim));
    // A scalar field has no other coordinate to carry the degree of the linear g term.
    let p = cfg.degree.unwrap_or_else(|| if n == 1 { 0.0 } else { rng.gen_range(0.0..3.0) });
    let r: Vec<f64> = (0..n)
        .map(|_| if cfg.integer_weights { f64::from(rng.gen_range(1..=3u8)) } else { rng.gen_range(0.5..3.0) })
        .collect();

    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let budget = p + r[i];
        let mut diag = vec![0.0; n];
        diag[i] = budget / r[i];
        let mut fi = vec![Monomial::new(-rng.gen_range(0.5..5.0), diag)];
        for _ in 0..rng.gen_range(0..=cfg.max_extra_terms) {
            let support = random_support(rng, n, None);
            fi.push(Monomial::new(rng.gen_range(0.1..2.0), split_budget(rng, &r, &support, budget)));
        }
        f.push(fi);

        let support = random_support(rng, n, Some(i));
        let mut linear = split_budget(rng, &r, &support, p);
        linear[i] = if n == 1 { budget / r[i] } else { 1.0 };
        let mut gi = vec![Monomial::new(rng.gen_range(0.1..2.0), linear)];
        for _ in 0..rng.gen_range(0..=cfg.max_extra_terms) {
            // x_i times a monomial of degree p: exponent of x_i stays >= 1.
            let support = random_support(rng, n, None);
            let mut e = split_budget(rng, &r, &support, p);
            e[i] += 1.0;
            gi.push(Monomial::new(rng.gen_range(0.1..2.0), e));
        }
        g.push(gi);
    }
    GeneratedSystem {
        f: PolyMap::new(f).expect("generated exponents are nonnegative"),
        g: PolyMap::new(g).expect("generated exponents are nonnegative"),
        r: DilationMap::new(r).expect("generated weights are positive"),
        p,
    }
}

/// Linear pair `x' = A x + B x(d(t))` with Metzler `A`, nonnegative `B` and
/// `a_ii < -sum_(j != i) |a_ij| - sum_j b_ij`, so `xi = 1` gives negative margins.
pub fn random_stable_linear<R: Rng>(rng: &mut R, n: usize) -> (PolyMap, PolyMap) {
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            b[i][j] = rng.gen_range(0.0..1.0);
            row += b[i][j];
            if j != i {
                a[i][j] = rng.gen_range(0.0..1.0);
                row += a[i][j];
            }
        }
        a[i][i] = -row - rng.gen_range(0.1..1.0);
    }
    (
        PolyMap::linear(&a).expect("finite matrix"),
        PolyMap::linear(&b).expect("finite matrix"),
    )
}
