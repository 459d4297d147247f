//! The two-dimensional benchmark system: a cooperative `f` and a nondecreasing
//! `g`, both homogeneous of degree 2 for the dilation weights `r = (1, 2)`.

use super::poly::{DilationMap, Monomial, PolyMap};

/// `f(x) = (-5 x1^3 + 2 x1 x2, x1^2 x2 - 4 x2^2)`
pub fn f() -> PolyMap {
    PolyMap::new(vec![
        vec![Monomial::new(-5.0, vec![3.0, 0.0]), Monomial::new(2.0, vec![1.0, 1.0])],
        vec![Monomial::new(1.0, vec![2.0, 1.0]), Monomial::new(-4.0, vec![0.0, 2.0])],
    ])
    .expect("valid field")
}

/// `g(x) = (x1 x2, 2 x1^4)`
pub fn g() -> PolyMap {
    PolyMap::new(vec![
        vec![Monomial::new(1.0, vec![1.0, 1.0])],
        vec![Monomial::new(2.0, vec![4.0, 0.0])],
    ])
    .expect("valid field")
}

pub fn r() -> DilationMap {
    DilationMap::new(vec![1.0, 2.0]).expect("positive weights")
}

pub const PHI0: [f64; 2] = [1.0, 4.0];
