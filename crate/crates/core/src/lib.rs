//! Generalized dynamical pruning of finite rooted binary trees with edge
//! lengths, exponential critical Galton-Watson tree sampling, and the
//! continuum 1-D ballistic annihilation model in two equivalent forms:
//! event-driven sink dynamics and mass-equipped pruning of the level-set
//! tree. A Monte Carlo harness checks the closed-form distributions.

pub mod annihilation;
pub mod bessel;
pub mod gw;
pub mod harris;
pub mod io;
pub mod numeric;
pub mod pruning;
pub mod rng;
pub mod stats;
pub mod tree;
pub mod verify;

pub use tree::{is_embeddable, CombinatorialShape, NodeId, PlaneTree, Side, TreeError, TreePoint};
