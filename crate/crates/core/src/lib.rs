//! Gauss sums `tau_l(chi, e) = sum_{X in GL_2(Z/p^l)} chi(X) e(Tr X)` computed
//! exactly in cyclotomic integers, both from closed forms and by brute force.

pub mod appendix;
pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod gauss;
pub mod group;
pub mod padic;
pub mod residue;
pub mod verify;

pub use error::{Error, Result};
