//! Random model generation, schema sweeps and countermodel search.

pub mod catalog;
pub mod generate;
pub mod random;
pub mod search;
pub mod sweep;

pub use catalog::{catalog, Schema, SchemaKind};
pub use generate::{generate_model, GenParams};
pub use search::{find_countermodel, Countermodel, SearchOutcome};
pub use sweep::{generated_pool, model_digest, replay, sweep_axioms, Counterexample, SweepConfig, SweepModel, SweepReport};
