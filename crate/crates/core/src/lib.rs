//! Exact analysis of piecewise-linear self-maps of finite metric trees.
//!
//! Maps are given piece by piece with rational breakpoints and exact
//! images. The [`criteria`] module decides equicontinuity through nine
//! equivalent conditions and backs every decided verdict with a
//! certificate that [`report`] can re-check from scratch.

pub mod catalog;
pub mod certificates;
pub mod criteria;
pub mod dynamics;
pub mod error;
#[cfg(test)]
mod fixtures;
pub mod harness;
pub mod io;
pub mod map;
pub mod region;
pub mod report;
pub mod scalar;
pub mod svg;
pub mod tree;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default exact scalar.
pub type Rational = num_rational::BigRational;

pub type Tree = tree::FiniteTree<Rational>;
pub type Point = tree::TreePoint<Rational>;
pub type Region = region::RegionSet<Rational>;
pub type Map = map::PlMap<Rational>;
pub type Report = criteria::AnalysisReport<Rational>;
