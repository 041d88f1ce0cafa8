//! Randomly weighted averages `Z = Σ W_j X_j` with Dirichlet weights and
//! independent Beta components.
//!
//! The crate has two halves. The exact half ([`exact`], [`moments`]) computes
//! moments of `Z` as canonical rationals, by brute-force composition sums and
//! by the closed-form Beta target, and compares them order by order. The
//! floating half ([`sampling`], [`densities`], [`stats`]) draws reproducible
//! variates, evaluates Beta / arcsin / power semicircle densities and CDFs,
//! and runs moment and Kolmogorov–Smirnov checks against those targets.

pub mod cli;
pub mod densities;
pub mod error;
pub mod exact;
pub mod moments;
pub mod quadrature;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use exact::{MultiIndex, Rational};
pub use moments::{BetaParams, DirichletParams, MomentReport, RwaSpec};
