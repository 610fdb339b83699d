//! Theory-agnostic algebra: systems, states, effects, processes and tests,
//! with sequential/parallel composition, lifting and coarse-graining.
//!
//! Every value is immutable once built; operations return new values.

mod ops;
mod process;
mod scalar;
mod system;
mod vectors;

#[cfg(test)]
pub(crate) use ops::apply_kraus;
pub use ops::{
    apply, coarse_grain, lift, lift_left, marginal, pair, pull_back, randomize, reduce_to_first, reduce_to_second, tensor_effects, tensor_processes,
    tensor_states, tensor_systems, Keep,
};
pub use process::{Process, ProcessRepr, ProcessTags, Test};
pub use scalar::{ProbVector, Scalar};
pub use system::{Backend, System};
pub use vectors::{Effect, EffectKind, State, StateKind};
