//! Mean-field theory of recursive tree processes on finite state spaces.
//!
//! The crate evaluates the mean-field operator `T` exactly, integrates the
//! mean-field equation, samples the marked branching tree that represents its
//! semigroup, solves bivariate and higher-level equations, and simulates the
//! finite-N particle system on the complete graph. The running example is
//! cooperative branching (`cob(x1, x2, x3) = x1 ∨ (x2 ∧ x3)`) with deaths.
//!
//! Runnable walk-throughs live in the crate's `examples/` directory; the
//! `rtp` binary exposes the same experiments on the command line.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod higher;
pub mod io;
pub mod meanfield;
pub mod model;
mod ode;
pub mod particle;
pub mod rng;
pub mod tree;
pub mod variate;

pub use error::{Error, Result};
pub use model::{Component, Dist, LocalMap, MapFamily, Preset, State, StateSpace, StructuredEntry, StructuredFamily};
