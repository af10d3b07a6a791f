//! Tempered stable distributions (TSD) and their approximation machinery.
//!
//! The crate covers the six-parameter family `TSD(m1, a1, l1, m2, a2, l2)`
//! with Lévy density `m1 u^{-1-a1} e^{-l1 u}` on the right tail and the
//! mirrored expression on the left, for stability indices in `[0, 1)`.
//!
//! Main subsystems:
//! - [`model`]: parameterizations, Lévy densities, cumulants (closed form and
//!   quadrature oracle), sub-family classification.
//! - [`charfn`]: closed-form characteristic functions (tempered, stable,
//!   compound-Poisson approximant, symmetric variance-gamma, the
//!   self-decomposability ratio).
//! - [`inversion`]: Gil-Pelaez CDF/PDF recovery and tabulated [`inversion::NumericLaw`]s.
//! - [`sampling`]: exact bilateral-gamma, tilted one-sided stable rejection,
//!   small-jump truncation and compound-Poisson approximant samplers.
//! - [`bias`]: the non-zero bias distribution built from the Lévy tail
//!   integrals, with moments and an inverse-transform sampler.
//! - [`stein`]: the Stein operator, identity residuals, the Ornstein-Uhlenbeck
//!   type semigroup and the Stein-equation solution with derivative bounds.
//! - [`distance`]: Kolmogorov, empirical Wasserstein-1 and a dictionary lower
//!   bound for the smooth Wasserstein distance `d_{H3}`.
//! - [`bounds`]: theorem bound calculators and empirical rate sweeps.

pub mod bias;
pub mod bounds;
pub mod charfn;
pub mod distance;
pub mod error;
pub mod inversion;
pub mod model;
pub mod quad;
pub mod sampling;
pub mod special;
pub mod stein;

pub use error::{Error, Result};
pub use model::{StableParams, SubFamily, TsdParams};
