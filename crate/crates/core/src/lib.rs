//! Exact verification and extreme-function approximation for one-row
//! cut-generating functions.
//!
//! * [`pwl`]: periodic and quasi-periodic piecewise-linear functions.
//! * [`minimality`]: subadditivity, symmetry, strong minimality and the
//!   2-slope extremality certificate.
//! * [`approx_group`]: approximation of a strongly minimal function for
//!   `b + ℤ` by an extreme 2-slope function.
//! * [`approx_truncated`]: the same for `b + ℤ₊` and quasi-periodic inputs.
//! * [`ccgf`]: gauges of maximal S-free polyhedra for the continuous relaxation.
//!
//! Every scalar is a [`Rational`]; nothing in this crate rounds.

pub mod approx_group;
pub mod approx_truncated;
pub mod ccgf;
pub mod error;
pub mod minimality;
pub mod pwl;
pub mod rational;

pub use error::{Error, Result};
pub use minimality::{GroupProblem, Lattice, MinimalityReport, SlackVertex};
pub use pwl::{CutFunction, GridFunction, Node, PeriodicSource, PwlPeriodic, QuasiPeriodicPwl};
pub use rational::{rat, Rational};
