//! Vector-field representation and the structural hypotheses checked on it.

pub mod example;
pub mod poly;
pub mod structure;

pub use poly::{DilationMap, Monomial, PolyMap};
pub use structure::{
    analyze_structure, check_cooperative, check_nondecreasing, check_omega_condition,
    homogeneity_degree, Homogeneity, StructureReport, Verdict, Witness,
};
