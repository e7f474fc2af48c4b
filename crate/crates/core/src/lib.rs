//! Asymptotic distribution of conjugate algebraic numbers of fixed degree
//! under weighted `l_p` heights.
//!
//! Three independent routes to the same limiting densities live here:
//!
//! * exact enumeration of prime integer polynomials in a height ball
//!   ([`counting`], backed by [`intarith`], [`roots`] and [`lattice`]),
//! * closed-form and quadrature evaluation of the mixed correlation
//!   functions of zeros of the associated random polynomial ([`density`]),
//! * Monte Carlo simulation of that random polynomial ([`mcsim`]).
//!
//! [`verify`] cross-checks the three routes and backs the `verify` CLI
//! subcommand.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counting;
pub mod density;
pub mod error;
pub mod heights;
pub mod intarith;
pub mod lattice;
pub mod mcsim;
pub mod numerics;
pub mod poly;
pub mod region;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use heights::{PNorm, WeightedHeight};
pub use numerics::{IntegrationResult, RngStream};
pub use poly::{Complex, IntPoly, RealPoly, RootConfiguration};
pub use region::{Interval, Rect, Region, RegionBox};
