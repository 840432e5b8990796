//! Latent Gaussian copula estimation for binary and mixed binary/continuous
//! data.
//!
//! Observed binary columns are modelled as thresholded latent normal scores
//! and continuous columns as monotone transforms of them. The crate estimates
//! the latent correlation matrix from pairwise Kendall's tau
//! ([`latent_corr`]), projects it onto the PSD cone ([`psd`]), recovers the
//! latent conditional-independence graph ([`precision`]) and the sparse
//! leading eigenvector ([`spca`]). [`simgen`], [`evaluate`] and [`bench`]
//! reproduce simulation benchmarks. [`io`] and [`cli`] back the `lgc` binary.

pub mod baseline;
pub mod bench;
pub mod cli;
pub mod dists;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod latent_corr;
pub mod linalg;
pub mod precision;
pub mod psd;
pub mod simgen;
pub mod spca;

pub use error::{Error, Result};
