//! Causal strength of arrow sets in causal Bayesian networks.
//!
//! The central quantity is the relative entropy between the observed joint
//! distribution and the "post-cutting" distribution obtained by severing a
//! set of arrows and feeding each open end independently with the source's
//! marginal. The crate provides:
//!
//! - an exact engine for finite categorical models ([`discrete`]), including
//!   the baseline measures it is usually compared against (conditional
//!   mutual information, ACE, information flow, transfer entropy),
//! - a closed-form engine for linear Gaussian structural equation models
//!   ([`gaussian`]),
//! - a sample-based estimator combining ridge regression, permutation
//!   resampling of structural equations, and k-nearest-neighbor divergence
//!   estimation ([`estimation`]),
//! - bivariate time-series strength for order-1 autoregressive models and
//!   the perturbed-copy chain ([`timeseries`]),
//! - JSON/CSV loaders for the model and data formats ([`io`]).

pub mod discrete;
pub mod error;
pub mod estimation;
pub mod fixtures;
pub mod gaussian;
pub mod graph;
pub mod io;
pub mod timeseries;

pub use error::{Error, Result};

/// Logarithm base for information quantities.
///
/// All engines work in natural log internally; conversion happens once at
/// the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Bits,
    Nats,
}

impl Base {
    /// Convert a value measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            Base::Nats => nats,
            Base::Bits => nats / std::f64::consts::LN_2,
        }
    }

    /// Convert a value measured in this base into nats.
    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            Base::Nats => value,
            Base::Bits => value * std::f64::consts::LN_2,
        }
    }
}

impl std::str::FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" => Ok(Base::Bits),
            "nats" => Ok(Base::Nats),
            other => Err(Error::Usage(format!(
                "unknown base {other:?}, expected \"bits\" or \"nats\""
            ))),
        }
    }
}
