//! Interaction potentials between two cold polar molecules dressed by DC
//! fields, microwaves and a transverse optical trap.
//!
//! Natural units are used throughout the library: the rotational constant
//! `B`, the permanent dipole `d` and `ħ` are all one, so lengths are in
//! units of `r_B = (d²/B)^{1/3}` and the only molecule-dependent number is
//! the dimensionless mass. SI conversions live in [`units`].

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod confinement;
pub mod error;
pub mod fit;
pub mod floquet;
pub mod instanton;
pub mod linalg;
pub mod pair;
pub mod quadrature;
pub mod rotor;
pub mod scan;
pub mod surface;
pub mod tables;
pub mod units;

pub use error::{Error, Result};
