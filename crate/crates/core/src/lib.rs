//! Generalized Schürmann entropy estimators for undersampled discrete
//! distributions.
//!
//! * [`special_fn`]: `ψ(n)`, `E_1`, `g_n(a)`, `G_n(a)` by recursion, with a
//!   quadrature cross-check.
//! * [`estimators`]: plug-in, `φ`-ansatz, Grassberger and per-box Schürmann
//!   estimators.
//! * [`exact_oracle`]: exact entropy, closed-form expectations and bias, and
//!   brute-force multinomial enumeration of estimator moments.
//! * [`sampling`]: seeded multinomial draws and dataset subsampling.
//! * [`experiments`]: Monte Carlo harness and parameter sweeps.
//! * [`mi`]: mutual information for `(x, binary y)` data.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod exact_oracle;
pub mod experiments;
pub mod mi;
pub mod quadrature;
pub mod sampling;
pub mod special_fn;

pub use error::{Error, Result};
