//! Positive-momentum states, gaussian superpositions, currents and fluxes.

pub mod current;
pub mod gaussian;
pub mod momentum;
pub mod window;

pub use current::{dimensionless_current, flux, uniform_times, CurrentEvaluator, DEFAULT_S_MAX};
pub use gaussian::{GaussianComponent, GaussianSuperposition, PhaseConvention};
pub use momentum::{
    default_analytic_grid, make_phi_a, phi_a_tail_law, phi_a_unnormalized, MomentumState, Sampler, StateForm,
};
pub use window::{most_negative_window, negative_windows, CurrentFn, CurrentTrace, FluxWindow, TimeUnits};
