//! Piecewise graded power series on rational polyhedral fans with
//! coefficients in the truncated Lazard ring.
//!
//! The crate is `no_std` and only needs `alloc`. Modules, bottom up:
//!
//! - [`intlin`]: exact integer linear algebra (Smith and Hermite forms,
//!   kernels, saturation).
//! - [`fgl`]: graded coefficient rings, truncated graded power series and
//!   the formal group law calculus.
//! - [`lazard`]: the truncated Lazard ring and its specializations.
//! - [`fan`]: cones, fans, stars, star subdivisions and toric resolution.
//! - [`pps`]: the sheaf of piecewise graded power series and its sections.
//! - [`descent`]: gluing squares for star subdivisions and the
//!   resolve-and-glue route to global sections.
//! - [`oracles`]: independent piecewise polynomial solver.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod descent;
pub mod fan;
pub mod fgl;
pub mod intlin;
pub mod lazard;
pub mod oracles;
pub mod pps;
