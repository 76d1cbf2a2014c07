//! Numerical laboratory for maximal-in-time estimates of the fractional
//! Schrodinger evolution: a phase-panel oscillatory quadrature engine, the
//! approach geometries (tangential curves, line fields over fractal
//! direction sets), mixed-norm maximal functions, counterexample scenarios
//! with scaling-exponent fits, and probes of the kernel estimates behind
//! the sufficiency direction.

pub mod error;
pub mod geometry;
pub mod kernelcheck;
pub mod maximal;
pub mod point;
pub mod propagator;
pub mod quad;
pub mod rng;
pub mod scenarios;
pub mod spectral;

pub use error::{Error, Result};
pub use point::Point;
