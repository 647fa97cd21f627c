//! Quadrature grids, Fresnel-type special functions and oscillatory
//! half-line integrals.

pub mod quadrature;
pub mod special;
pub mod transform;

pub use quadrature::{
    composite_grid, composite_rule, gauss_legendre, integrate_adaptive, AdaptiveOptions, GaussLegendre,
    MomentumGrid, PanelLayout,
};
pub use special::{exp_integral_imag, fresnel_c, fresnel_integrals, fresnel_tail, sine_cosine_integrals};
pub use transform::{
    half_line_transform, sample, transform_pair, Moment, OscillatoryTail, TailMode, TailSpec,
};
