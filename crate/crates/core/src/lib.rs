//! Simulation and verification toolkit for level crossings of smooth random
//! processes and level sets of random fields.
//!
//! The crate is organized around six subsystems:
//!
//! * [`bounds`] — feasibility conditions, series constants and explicit upper
//!   bounds for the moments of crossing counts on intervals, and their
//!   extensions to level-set measures on balls and spheres.
//! * [`simulate`] — exact samplers for the example processes (conditional
//!   sine-cosine, finite spectral Gaussian mixtures, chi-square, shot noise in
//!   one and several dimensions, regularized diffusions) with derivative
//!   evaluation wherever the construction permits.
//! * [`crossings`] — grid scanning with bisection refinement for crossing
//!   counts, sup-norms of derivatives, and the smoothed (Kac) counter.
//! * [`geometry`] — Crofton line sampling on the ball and great-circle
//!   sampling on the sphere for level-set measure estimation.
//! * [`diagnostics`] — empirical moment estimation with bootstrap intervals,
//!   bound comparison, Hill tail-index estimation, and numerical checks of the
//!   shot-noise moment and density hypotheses.
//! * [`kacrice`] — numerical verification that the smoothed counter's
//!   expectation converges to the expected crossing count, with the stationary
//!   Gaussian closed form as an independent oracle.
//!
//! Everything is deterministic given a master seed: replicate-level work is
//! parallelized with per-replicate seeds derived by [`rng::mix64`] and reduced
//! in replicate-index order, so results do not depend on the thread schedule.
//! Compiling with `--no-default-features` replaces the rayon backend with
//! sequential iteration without changing any result.

pub mod bounds;
pub mod crossings;
pub mod diagnostics;
pub mod exec;
pub mod geometry;
pub mod kacrice;
pub mod rng;
pub mod simulate;
pub mod stats;
pub mod taylor;

pub use stats::MomentEstimate;
