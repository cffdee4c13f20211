//! Steady compressible fluid / clamped beam interaction with a hard-sphere
//! pressure law, solved on a corrected domain by damped fixed-point iteration.
//!
//! Module map:
//! - [`eos`]: pressure laws, cutoff, regularization, renormalization pair
//! - [`geometry`]: beam states, the correction barrier, mapped grids
//! - [`operators`]: boundary data extension, harmonic lift, Bogovskii
//! - [`discrete`]: continuity, momentum and beam solvers
//! - [`fixedpoint`]: the operator 𝒯 and its damped iteration
//! - [`continuation`]: ε/δ schedules and the stiffness sweep
//! - [`diagnostics`]: identities, norms and weak residuals
//! - [`config`]: validated run configuration

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod continuation;
pub mod diagnostics;
pub mod discrete;
pub mod eos;
pub mod error;
pub mod fixedpoint;
pub mod geometry;
pub mod operators;

mod fem;
mod linalg;

pub use config::{RunConfig, SolverConfig};
pub use discrete::{FluidState, PhysicalParams, VectorField};
pub use eos::{LawForm, PressureLaw, Regularization, RenormPair};
pub use error::{Error, Result, Stage};
pub use fixedpoint::{IterateState, RunLog};
pub use geometry::{BeamDisplacement, GridLayout, MappedGrid};
pub use operators::{BoundaryData, Profile};
