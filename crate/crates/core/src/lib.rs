//! Relative Reshetikhin-Turaev invariants of fundamental shadow links and
//! their rational Dehn fillings at odd roots of unity, quantum 6j-symbols,
//! and the hyperbolic geometry that governs their growth.
//!
//! Layers, bottom-up:
//! - [`qarith`]: root-of-unity arithmetic and log-space complex sums;
//! - [`specfun`]: dilogarithm, Lobachevsky function, quantum dilogarithm;
//! - [`sixj`]: quantum 6j-symbols with interchangeable evaluators;
//! - [`fsl`]: fundamental shadow link presentations and their invariants;
//! - [`filling`]: continued fractions and invariants of Dehn fillings;
//! - [`geometry`]: potentials, critical points, volume, holonomy, torsion;
//! - [`asympt`]: growth fits and comparison with the predicted leading term.

pub mod asympt;
pub mod error;
pub mod filling;
pub mod fsl;
pub mod geometry;
pub mod qarith;
pub mod registry;
pub mod sixj;
pub mod specfun;

pub use error::{Error, Result};
