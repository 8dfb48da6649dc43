//! Euler's problem of two fixed centers at negative energy.
//!
//! Closed-form periods and rotation numbers of Liouville tori and critical
//! orbits, Conley-Zehnder indices of collision orbits, the regularized flow,
//! and brute-force oracles for all of them.

pub mod contact;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod extended;
pub mod index;
pub mod ode;
pub mod periods;
pub mod problem;
pub mod quadrature;
pub mod rotation;
pub mod verify;

pub use error::{Error, Result};
pub use extended::ExtReal;
