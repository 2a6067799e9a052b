//! Heat flow, Riesz transforms and a mild-solution surrogate on model
//! manifolds, checked numerically against Morrey-space estimates.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod mild;
pub mod morrey;
pub mod numerics;
pub mod profile;
pub mod riesz;
pub mod semigroup;

pub use error::{Error, Result};
pub use geometry::{Ball, ManifoldKind, ModelManifold};
pub use profile::{Decay, RadialProfile, Snapshot};
