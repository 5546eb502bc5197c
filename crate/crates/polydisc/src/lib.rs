//! Computations on the symmetrized polydisc G_n and the extended
//! symmetrized polydisc G~_n: membership tests, Schwarz lemma conditions,
//! two-point interpolation and invariant distances from the origin.

pub mod cli;
pub mod clinalg;
pub mod distances;
pub mod error;
pub mod geometry;
pub mod interpolation;
pub mod membership;
pub mod mobius;
pub mod sampling;
pub mod schwarz;
pub mod suites;

pub use clinalg::{Cplx, HermEig2, Mat2};
pub use error::{Error, Result};
pub use membership::{CondId, ConditionMargin, MembershipReport, SetId};
pub use mobius::{CPoint, DiskImage};
