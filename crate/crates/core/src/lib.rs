//! Finite-dimensional operational probabilistic theories (classical, complex
//! quantum and real quantum) with executable process-tomography checks:
//! equality notions, containment, tomographic ordering, dynamically faithful
//! states, Local Tomography, conclusive teleportation, universal extensions
//! and purification, plus a small circuit language for closed diagrams.

pub mod backends;
pub mod casestudies;
pub mod dsl;
mod error;
pub mod linalg;
pub mod report;
pub mod structures;
pub mod theory;
pub mod tomography;

pub use error::{Error, Result};

/// Pass/fail tolerance used when none is supplied.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Target accuracy for identities that hold by construction.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
