//! Fourier analysis on the Gaussian integers: residue boxes, Ramanujan sums,
//! sector averages, High/Low multipliers and Goldbach representation scans.

pub mod error;
pub mod fft;
pub mod gaussian;
pub mod goldbach;
pub mod highlow;
pub mod point;
pub mod ramanujan;
pub mod residue;
pub mod scalar;
pub mod sector;
pub mod tables;

pub use error::{Error, Result};
pub use gaussian::{divide_into_box, gcd, GaussInt, Unit};
pub use point::{pairing, ComplexPoint, RationalPoint};
pub use residue::ResidueBox;
pub use scalar::Real;
pub use sector::Sector;
pub use tables::{ArithmeticTable, Factorization};

/// Lattice array of doubles.
pub type Lattice = sector::LatticeArray<f64>;

/// A point of ℝ² in double precision.
pub type Point = ComplexPoint<f64>;

/// Multiplier grid on the torus in double precision.
pub type Grid = highlow::GridFunction<f64>;
