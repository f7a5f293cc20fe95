//! Angular-momentum special functions.
//!
//! Every phase convention used elsewhere in the crate (Condon–Shortley for
//! spherical harmonics, z-y-z Euler angles for rotations) is fixed here.

mod halfint;
mod quadrature;
mod special;
mod wigner;

pub use halfint::HalfInt;
pub use quadrature::{gauss_legendre, Quadrature};
pub use special::{legendre_p, log_factorial, spherical_harmonic};
pub use wigner::{three_j, wigner_big_d, wigner_small_d, HalfAnglePowers, SmallD};
