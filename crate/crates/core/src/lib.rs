//! Stuttering Poisson distributions.
//!
//! A stuttering Poisson law counts events that arrive in batches: batches of
//! size `i` occur as a Poisson stream with rate `theta_i`, and the observed
//! count is the total number of events. The crate covers
//!
//! - [`series`]: truncated power-series arithmetic used for generating functions;
//! - [`distribution`]: PMF, PGF, cumulants, moments and sampling;
//! - [`characterize`]: recognizing arbitrary discrete laws as (signed) SPDs,
//!   compounding and the negative binomial identity;
//! - [`estimate`]: cumulant-matching fits from count histograms;
//! - [`gof`]: expected counts, Pearson statistics and chi-squared tails.
//!
//! The stochastic process view (independent stationary increments solved
//! through Chapman-Kolmogorov equations) is not modelled; every law is handled
//! through its generating function.

pub mod characterize;
pub mod distribution;
pub mod error;
pub mod estimate;
pub mod gof;
pub mod series;

pub use error::{Error, Result};
