//! Secret-key capacity with limited one-way public communication.
//!
//! * [`sk`]: the scalar Gaussian key-rate curve.
//! * [`waterfill`]: rate splitting across product components, in closed form
//!   and by a generic equal-slope allocator.
//! * [`gauss_vector`]: reduction of correlated Gaussian vectors to a product
//!   source by whitening and joint diagonalisation.
//! * [`spectral`]: the frequency-domain frontier of stationary Gaussian processes.
//! * [`sdpi`]: the strong data processing constant of small discrete sources.
//!
//! Every solver is generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the stated tolerances assume.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gauss_vector;
pub mod scalar;
pub mod sdpi;
pub mod sk;
pub mod spectral;
pub mod validation;
pub mod waterfill;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GaussTriple64 = sk::GaussTriple<f64>;
pub type Beta64 = sk::Beta<f64>;
pub type BetaProfile64 = waterfill::BetaProfile<f64>;
pub type RatePoint64 = waterfill::RatePoint<f64>;
pub type RateCurve64 = waterfill::RateCurve<f64>;
pub type CovarianceSet64 = gauss_vector::CovarianceSet<f64>;
pub type ProductReduction64 = gauss_vector::ProductReduction<f64>;
pub type SpectrumGrid64 = spectral::SpectrumGrid<f64>;
pub type CorrelationFunctions64 = spectral::CorrelationFunctions<f64>;
pub type JointPmf64 = sdpi::JointPmf<f64>;
pub type SdpiResult64 = sdpi::SdpiResult<f64>;

pub type GaussTriple32 = sk::GaussTriple<f32>;
pub type BetaProfile32 = waterfill::BetaProfile<f32>;
