//! Equivariant harmonic self-maps of cohomogeneity one spheres and
//! orthogonal groups.
//!
//! The crate encodes the classified `(g, m0, m1)`-actions together with
//! their `k`-maps and degrees ([`actions`]), the singular second order
//! boundary value problems whose solutions give harmonic `(k, r)`-maps
//! ([`ode`]), numerical checks of the trigonometric identities behind the
//! closed forms ([`identities`]), a double shooting solver for the singular
//! problems ([`solver`]), and the harmonicity/degree classification of the
//! linear `k`-maps ([`classify`]).
//!
//! ```
//! use cohom1::{actions::{make_action, Space}, classify::is_harmonic_k_map};
//!
//! let action = make_action(Space::OrthogonalGroup, 3, 2, 2, true).unwrap();
//! let verdict = is_harmonic_k_map(&action, -2).unwrap();
//! assert_eq!(verdict.k, -5);
//! assert!(verdict.harmonic);
//! assert_eq!(verdict.degree, -5);
//! ```

// Negated float comparisons deliberately treat NaN as failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actions;
pub mod classify;
pub mod cli;
mod error;
pub mod identities;
mod integrate;
pub mod io;
pub mod ode;
pub mod solver;
mod trig;

pub use actions::{ActionDescriptor, Space, Tangential};
pub use classify::HarmonicityVerdict;
pub use error::{Error, Result};
pub use ode::{BvpSpec, ProfileSample, TensionSample};
pub use solver::{ShootingConfig, SolutionProfile};
