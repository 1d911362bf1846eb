//! Cluster-expansion pipeline for the multidimensional dimer problem.
//!
//! The crate is layered bottom-up:
//!
//! * [`lattice`] holds torus lattices, located tiles and the dimer weights
//!   `f`, `f_0` and `v = f - f_0`.
//! * [`oracle`] provides brute-force and closed-form ground truth (tiling and
//!   perfect-matching counts, `Z`, `Z_0`, the `beta(N, i)` factors).
//! * [`kernels`] computes the connected cluster kernels `J_s` exactly on
//!   finite tori, extrapolates them to infinite volume and recovers their
//!   polynomial structure in `1/d`.
//! * [`series`] runs the truncated power-series machinery in `u = 1/d` that
//!   turns kernels into the coefficients `c_i` of
//!   `lambda_d ~ ln(2d)/2 - 1/2 + c_1/d + c_2/d^2 + ...`.
//!
//! All coefficient arithmetic is exact ([`Rational`]); high-precision reals
//! from [`real`] only appear when logarithms are taken.

pub mod error;
pub mod kernels;
pub mod lattice;
pub mod oracle;
pub mod rational;
pub mod real;
pub mod series;

pub use error::{Error, Result};
pub use rational::Rational;
