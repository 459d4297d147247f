//! Shared fixtures for the benchmarks.

use mustab_core::generate::{random_homogeneous_system, GeneratedSystem, GeneratorConfig};
use mustab_core::harness::{parse_system, SystemDocument, WORKED_EXAMPLE};
use mustab_core::sampling::Sampling;

/// The built-in worked example with its horizon replaced.
pub fn worked_example(t_end: f64) -> SystemDocument {
    let mut doc = parse_system(WORKED_EXAMPLE).expect("built-in example is valid");
    if let Some(sim) = doc.sim.as_mut() {
        sim.t_end = t_end;
    }
    doc
}

/// A generated system of dimension exactly `n`.
pub fn generated(n: usize, seed: u64) -> GeneratedSystem {
    let cfg = GeneratorConfig { min_dim: n, max_dim: n, ..GeneratorConfig::default() };
    random_homogeneous_system(&mut Sampling::structural(seed).rng(), &cfg)
}
