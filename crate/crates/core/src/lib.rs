//! Exact Ehrhart theory for lattice simplex families.
//!
//! * [`exactpoly`] — dense big-integer and rational polynomials.
//! * [`delta_simplex`] — h*-polynomials of `Δ(0,q)`, direct and breakpoint-based.
//! * [`eulerian`] — Eulerian polynomials, Lehmer codes, the simplices `S_d(m)`.
//! * [`lattice_oracle`] — brute-force lattice point counts used as ground truth.
//! * [`ehrhart_algebra`] — Ehrhart polynomials of products of dilated blocks.
//! * [`signpattern`] — polytopes realizing prescribed signs of Ehrhart coefficients.

pub mod delta_simplex;
pub mod ehrhart_algebra;
pub mod eulerian;
pub mod exactpoly;
pub mod json_int;
pub mod lattice_oracle;
pub mod signpattern;
