//! Upper bounds on parametric Gromov widths of fiberwise starshaped domains
//! in cotangent bundles.
//!
//! A domain is described by its fiber support function ([`gauge`]). Loop
//! families are measured with it ([`loops`]), the resulting suprema and
//! infima are plugged into symbolic string-topology derivations
//! ([`stralg`]), and [`bounds`] turns a [`catalog`] scenario into numbers
//! with attached certificates. [`frames`] checks the unitary frame family
//! used for the matching lower bound on ellipsoids.

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod frames;
pub mod gauge;
pub mod loops;
pub mod optimize;
pub mod quadrature;
pub mod stralg;

pub use error::{Error, Result};
