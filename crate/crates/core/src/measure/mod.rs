//! Arrival-time measurement with a complex absorbing step `−iV₀θ(x)`.

pub mod compare;
pub mod evolve;
pub mod grid;
pub mod smear;

pub use compare::{compare_distributions, weak_limit_compare, DeviationReport};
pub use evolve::{evolve_complex_potential, evolve_from, EvolutionParams, ExpectationCheck, MeasurementRun};
pub use grid::SpatialGrid;
pub use smear::{
    deconvolve, deconvolve_with, required_history, smeared_current, ArrivalDistribution, Deconvolution,
    DEFAULT_NOISE_THRESHOLD, HISTORY_DECAY,
};
