//! Monomial-sum vector fields on the nonnegative orthant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single term `coeff * prod_j x_j^exponents[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    #[serde(rename = "c")]
    pub coeff: f64,
    #[serde(rename = "e")]
    pub exponents: Vec<f64>,
}

impl Monomial {
    pub fn new(coeff: f64, exponents: impl Into<Vec<f64>>) -> Self {
        Self { coeff, exponents: exponents.into() }
    }

    /// Value at `x`; `0^0` evaluates to 1.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeff * self.product(x)
    }

    fn product(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&a, &xj)| acc * pow(xj, a))
    }

    /// Analytic partial derivative with respect to `x_j`.
    pub fn partial(&self, x: &[f64], j: usize) -> f64 {
        let aj = self.exponents[j];
        if aj == 0.0 {
            return 0.0;
        }
        let mut acc = self.coeff * aj;
        for (k, (&a, &xk)) in self.exponents.iter().zip(x).enumerate() {
            acc *= if k == j { pow(xk, a - 1.0) } else { pow(xk, a) };
        }
        acc
    }

    /// Weighted degree `sum_j exponents[j] * r[j]`.
    pub fn weighted_degree(&self, r: &[f64]) -> f64 {
        self.exponents.iter().zip(r).map(|(a, w)| a * w).sum()
    }
}

#[inline]
pub(crate) fn pow(x: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else if a == 1.0 {
        x
    } else if a.fract() == 0.0 && a.abs() <= 64.0 {
        x.powi(a as i32)
    } else {
        x.powf(a)
    }
}

/// A vector field whose component `i` is a sum of monomials.
///
/// Components are kept in canonical form: like terms merged, zero
/// coefficients dropped, first-appearance order preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    components: Vec<Vec<Monomial>>,
}

impl PolyMap {
    /// Builds a source field. Exponents must be finite and nonnegative.
    pub fn new(components: Vec<Vec<Monomial>>) -> Result<Self> {
        let map = Self::with_signed_exponents(components)?;
        for (i, comp) in map.components.iter().enumerate() {
            if let Some(a) = comp
                .iter()
                .flat_map(|m| m.exponents.iter())
                .find(|a| **a < 0.0)
            {
                return Err(Error::InvalidExponent { component: i, exponent: *a });
            }
        }
        Ok(map)
    }

    /// Builds a field that may carry negative exponents (transformed fields).
    pub fn with_signed_exponents(components: Vec<Vec<Monomial>>) -> Result<Self> {
        let n = components.len();
        let mut canonical = Vec::with_capacity(n);
        for (i, comp) in components.into_iter().enumerate() {
            for m in &comp {
                if m.exponents.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: m.exponents.len() });
                }
                if let Some(a) = m.exponents.iter().find(|a| !a.is_finite()) {
                    return Err(Error::InvalidExponent { component: i, exponent: *a });
                }
                if !m.coeff.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "coeff",
                        reason: format!("non-finite coefficient in component {i}"),
                    });
                }
            }
            canonical.push(merge_like_terms(comp));
        }
        Ok(Self { components: canonical })
    }

    pub fn zero(n: usize) -> Self {
        Self { components: vec![Vec::new(); n] }
    }

    /// The linear field `x -> A x`.
    pub fn linear(a: &[Vec<f64>]) -> Result<Self> {
        let n = a.len();
        let comps = a
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: row.len() });
                }
                Ok(row
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let mut e = vec![0.0; n];
                        e[j] = 1.0;
                        Monomial::new(c, e)
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[Monomial] {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Vec::is_empty)
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.components
            .iter()
            .flatten()
            .any(|m| m.exponents.iter().any(|a| *a < 0.0))
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let comps = self
            .components
            .iter()
            .map(|c| {
                c.iter()
                    .map(|m| Monomial::new(alpha * m.coeff, m.exponents.clone()))
                    .collect()
            })
            .collect();
        Self::with_signed_exponents(comps).expect("scaling preserves validity")
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(())
    }

    /// Evaluates the field at a point of the nonnegative orthant.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        if x.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::OutsideDomain("nonnegative orthant"));
        }
        (0..self.dim())
            .map(|i| {
                let singular = self.components[i].iter().any(|m| {
                    m.exponents.iter().zip(x).any(|(a, xj)| *a < 0.0 && *xj == 0.0)
                });
                if singular {
                    Err(Error::SingularAtBoundary { component: i })
                } else {
                    Ok(self.eval_component(i, x))
                }
            })
            .collect()
    }

    /// Component `i` without domain checks.
    pub fn eval_component(&self, i: usize, x: &[f64]) -> f64 {
        self.components[i].iter().map(|m| m.eval(x)).sum()
    }

    pub(crate) fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.eval_component(i, x);
        }
    }

    /// Sum of absolute term values of component `i`; used as a rounding scale.
    pub fn term_scale(&self, i: usize, x: &[f64]) -> f64 {
        self.components[i].iter().map(|m| m.eval(x).abs()).sum()
    }

    /// Exact Jacobian at a strictly positive point.
    pub fn jacobian(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_dim(x)?;
        if x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::OutsideDomain("open positive orthant"));
        }
        Ok(self.jacobian_unchecked(x))
    }

    pub(crate) fn jacobian_unchecked(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.components[i].iter().map(|m| m.partial(x, j)).sum())
                    .collect()
            })
            .collect()
    }

    /// Max absolute row sum of the Jacobian (a Gershgorin bound on its spectral radius).
    pub(crate) fn jacobian_row_sum_bound(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                let d: f64 = self.components[i].iter().map(|m| m.partial(x, j)).sum();
                row += d.abs();
            }
            worst = worst.max(row);
        }
        worst
    }
}

fn merge_like_terms(terms: Vec<Monomial>) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::with_capacity(terms.len());
    for m in terms {
        match out.iter_mut().find(|o| o.exponents == m.exponents) {
            Some(o) => o.coeff += m.coeff,
            None => out.push(m),
        }
    }
    out.retain(|m| m.coeff != 0.0);
    out
}

impl Serialize for PolyMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.components.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let comps = Vec::<Vec<Monomial>>::deserialize(d)?;
        PolyMap::new(comps).map_err(serde::de::Error::custom)
    }
}

/// Positive weights `r` defining `delta_lambda^r(x) = (lambda^r_1 x_1, ..., lambda^r_n x_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DilationMap {
    r: Vec<f64>,
}

impl DilationMap {
    pub fn new(r: impl Into<Vec<f64>>) -> Result<Self> {
        let r = r.into();
        if let Some((index, &value)) = r
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
        {
            return Err(Error::InvalidDilation { index, value });
        }
        Ok(Self { r })
    }

    pub fn standard(n: usize) -> Self {
        Self { r: vec![1.0; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn max_weight(&self) -> f64 {
        self.r.iter().cloned().fold(f64::MIN, f64::max)
    }

    pub fn apply(&self, lambda: f64, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.r).map(|(xi, ri)| lambda.powf(*ri) * xi).collect()
    }
}

impl<'de> Deserialize<'de> for DilationMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Vec::<f64>::deserialize(d)?;
        DilationMap::new(r).map_err(serde::de::Error::custom)
    }
}
