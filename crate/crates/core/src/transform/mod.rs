//! The change of variables `z_i = x_i^(1/r_i)` and the induced fields
//! `fbar_i(z) = f_i(x) / z_i^(r_i - 1)`, built in exact monomial form.

mod lemmas;

pub use lemmas::{verify_lemma1, verify_lemma2, verify_lemma3, LemmaCheck, LemmaFailure, LemmaReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DilationMap, Monomial, PolyMap};

/// `fbar` and `gbar` in `z` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformedSystem {
    pub fbar: PolyMap,
    pub gbar: PolyMap,
    pub r: DilationMap,
    /// Common homogeneity degree of the source pair, when known.
    pub p: Option<f64>,
    /// Components whose `gbar_i` carries a negative exponent in `z_i`.
    pub gbar_flags: Vec<usize>,
    /// Same for `fbar`.
    pub fbar_flags: Vec<usize>,
}

impl TransformedSystem {
    pub fn new(f: &PolyMap, g: &PolyMap, r: &DilationMap, p: Option<f64>) -> Result<Self> {
        let fbar = transform_field(f, r)?;
        let gbar = transform_field(g, r)?;
        Ok(Self {
            fbar_flags: negative_self_exponents(&fbar),
            gbar_flags: negative_self_exponents(&gbar),
            fbar,
            gbar,
            r: r.clone(),
            p,
        })
    }

    /// Assembles a system directly from `z`-space fields.
    pub fn from_parts(fbar: PolyMap, gbar: PolyMap, r: DilationMap, p: Option<f64>) -> Result<Self> {
        if fbar.dim() != r.dim() || gbar.dim() != r.dim() {
            return Err(Error::DimensionMismatch { expected: r.dim(), got: fbar.dim().max(gbar.dim()) });
        }
        Ok(Self {
            fbar_flags: negative_self_exponents(&fbar),
            gbar_flags: negative_self_exponents(&gbar),
            fbar,
            gbar,
            r,
            p,
        })
    }
}

fn negative_self_exponents(map: &PolyMap) -> Vec<usize> {
    (0..map.dim())
        .filter(|&i| map.component(i).iter().any(|m| m.exponents[i] < 0.0))
        .collect()
}

/// Maps `c x^a` in component `i` to `c z^b` with `b_j = a_j r_j` for `j != i`
/// and `b_i = a_i r_i - r_i + 1`.
pub fn transform_field(f: &PolyMap, r: &DilationMap) -> Result<PolyMap> {
    if f.dim() != r.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: r.dim() });
    }
    let w = r.weights();
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, comp)| {
            comp.iter()
                .map(|m| {
                    let b = m
                        .exponents
                        .iter()
                        .zip(w)
                        .enumerate()
                        .map(|(j, (a, rj))| if j == i { a * rj - (rj - 1.0) } else { a * rj })
                        .collect::<Vec<_>>();
                    Monomial::new(m.coeff, b)
                })
                .collect()
        })
        .collect();
    PolyMap::with_signed_exponents(comps)
}

fn check_state(v: &[f64], r: &DilationMap) -> Result<()> {
    if v.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), got: v.len() });
    }
    if v.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::OutsideDomain("nonnegative orthant"));
    }
    Ok(())
}

/// `z_i = x_i^(1/r_i)`.
pub fn state_to_z(x: &[f64], r: &DilationMap) -> Result<Vec<f64>> {
    check_state(x, r)?;
    Ok(x.iter().zip(r.weights()).map(|(xi, ri)| root(*xi, *ri)).collect())
}

/// `x_i = z_i^(r_i)`.
pub fn z_to_state(z: &[f64], r: &DilationMap) -> Result<Vec<f64>> {
    check_state(z, r)?;
    Ok(z.iter().zip(r.weights()).map(|(zi, ri)| zi.powf(*ri)).collect())
}

#[inline]
pub(crate) fn root(x: f64, r: f64) -> f64 {
    if r == 1.0 {
        x
    } else if r == 2.0 {
        x.sqrt()
    } else if r == 3.0 {
        x.cbrt()
    } else {
        x.powf(1.0 / r)
    }
}
