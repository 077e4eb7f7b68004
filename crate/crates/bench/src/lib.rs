//! Shared inputs for the benchmarks.

use std::path::Path;

use dstit_core::harness::{generate_model, GenParams};
use dstit_core::{load_model, Model};

/// Formulas of increasing cost, all over the verdict vocabulary.
pub const FORMULAS: &[&str] = &[
    "a & !e",
    "K:doctor ([doctor] a | [doctor] !a)",
    "B:doctor[e] [doctor] d",
    "O:doctor a & Os:doctor a",
    "Ob:doctor a & K:doctor Ob:doctor a",
    "B:doctor[!e] (!e & O:doctor a)",
];

pub fn verdict() -> Model {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/verdict.model");
    load_model(path).expect("verdict fixture")
}

pub fn generated(seeds: std::ops::Range<u64>) -> Vec<Model> {
    seeds
        .map(|s| generate_model(&GenParams::varied(s, 0)).expect("generated model"))
        .collect()
}
