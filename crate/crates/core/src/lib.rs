//! Steady-state phonon statistics of a laser-driven two-level quantum dot
//! coupled to one cavity phonon mode.
//!
//! The dressed-state master equation is solved both with the secular
//! Hamiltonian and with the second-order correction from the fast-rotating
//! terms. [`reduced`] is the production path; [`oracle`] rebuilds the same
//! model as a full Liouvillian (plus an undressed lab-frame variant) to
//! cross-check it.

pub mod error;
pub mod model;
pub mod oracle;
pub mod reduced;
pub mod selftest;
pub mod sparse;
pub mod statistics;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{dress, thermal_occupation, DressedParams, ModelParams, Regime};
pub use reduced::{assemble, solve_adaptive, solve_steady, ReducedGenerator, SteadyState};
pub use statistics::{observables, PhononStats};
