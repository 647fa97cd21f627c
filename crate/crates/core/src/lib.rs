//! Numerical reproduction of quantum probability backflow.
//!
//! * [`numerics`]: Gauss–Legendre grids, Fresnel integrals, half-line transforms.
//! * [`spectral`]: the (smeared) flux kernel, its Nyström matrix and spectrum.
//! * [`states`]: positive-momentum states, gaussian superpositions, currents and fluxes.
//! * [`measure`]: absorbing-potential arrival times and their deconvolution.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix the scalar to `f64`.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod measure;
pub mod numerics;
pub mod scalar;
pub mod spectral;
pub mod states;

pub use error::{BackflowError, Result};
pub use scalar::Real;

pub type MomentumGrid64 = numerics::MomentumGrid<f64>;
pub type TailSpec64 = numerics::TailSpec<f64>;
pub type FluxKernel64 = spectral::FluxKernel<f64>;
pub type DiscretizedOperator64 = spectral::DiscretizedOperator<f64>;
pub type SpectralResult64 = spectral::SpectralResult<f64>;
pub type MomentumState64 = states::MomentumState<f64>;
pub type GaussianSuperposition64 = states::GaussianSuperposition<f64>;
pub type CurrentTrace64 = states::CurrentTrace<f64>;
pub type FluxWindow64 = states::FluxWindow<f64>;
pub type SpatialGrid64 = measure::SpatialGrid<f64>;
pub type MeasurementRun64 = measure::MeasurementRun<f64>;
pub type ArrivalDistribution64 = measure::ArrivalDistribution<f64>;
