//! Vacuum potentials, hyperedge resummation and DLR checks for marked
//! Poisson gases, with the time-evolved Widom-Rowlinson model as the main
//! worked example.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] windows, configurations, clusters, orderings, annuli
//! * [`sampling`] seeded Poisson sampling and spin-flip evolution
//! * [`models`] pre-modifications `h_Λ` (WRM, hard-core WR, Potts gas, ...)
//! * [`vacuum`] Möbius vacuum potentials, Hamiltonians and series forms
//! * [`resum`] the hyperedge resummation `Ψ` and its summability checks
//! * [`kernel`] importance-sampled specification kernels and DLR checks
//! * [`cli`] the `hyperedge` command line driver

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod kernel;
pub mod models;
pub mod numeric;
pub mod resum;
pub mod sampling;
pub mod vacuum;

mod par;

pub use error::{Error, Result};
pub use geometry::{Mark, MarkedConfiguration, MarkedPoint, Norm, Point, Window};
pub use models::PreModification;
