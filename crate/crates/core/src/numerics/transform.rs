//! Half-line transforms `G_m(s) = ∫₀^∞ u^m φ(u) exp(-i u² s) du`.

use num_complex::Complex;

use super::quadrature::MomentumGrid;
use super::special::{exp_integral_imag, fresnel_tail};
use crate::error::{invalid, BackflowError, Result};
use crate::scalar::Real;

/// Large-`u` law `φ(u) ≈ (cos_coeff · cos u² + sin_coeff · sin u²) / u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryTail<T> {
    pub cos_coeff: T,
    pub sin_coeff: T,
}

impl<T: Real> OscillatoryTail<T> {
    pub fn scaled(self, k: T) -> Self {
        Self {
            cos_coeff: self.cos_coeff * k,
            sin_coeff: self.sin_coeff * k,
        }
    }

    pub fn value(&self, u: T) -> T {
        let w = u * u;
        (self.cos_coeff * w.cos() + self.sin_coeff * w.sin()) / u
    }

    /// Exact `∫_L^∞ φ_tail(u)² du` of the model.
    pub fn norm_sq_beyond(&self, l: T) -> Result<T> {
        let (a, b) = (self.cos_coeff, self.sin_coeff);
        let two = T::lit(2.0);
        let phase = two * l * l;
        let w = Complex::new(phase.cos(), phase.sin()) / l
            + Complex::new(T::zero(), T::lit(4.0)) * quadratic_phase_tail(two, l)?;
        let half = T::lit(0.5);
        Ok(half * (a * a + b * b) / l + half * (a * a - b * b) * w.re + a * b * w.im)
    }

    /// `(∫_L^∞ φ_tail e^{-iu²s} du, ∫_L^∞ u φ_tail e^{-iu²s} du)`.
    pub fn transform_beyond(&self, l: T, s: T) -> Result<(Complex<T>, Complex<T>)> {
        let half = T::lit(0.5);
        // cos = (e^{iw} + e^{-iw})/2, sin = (e^{iw} - e^{-iw})/2i.
        let plus = Complex::new(half * self.cos_coeff, -half * self.sin_coeff);
        let minus = Complex::new(half * self.cos_coeff, half * self.sin_coeff);
        let (om_p, om_m) = (T::one() - s, -(T::one() + s));
        let g1 = plus * quadratic_phase_tail(om_p, l)? + minus * quadratic_phase_tail(om_m, l)?;
        let g0 =
            (plus * reciprocal_phase_tail(om_p, l * l)? + minus * reciprocal_phase_tail(om_m, l * l)?) * half;
        Ok((g0, g1))
    }
}

/// `∫_L^∞ exp(i ω u²) du`.
fn quadratic_phase_tail<T: Real>(omega: T, l: T) -> Result<Complex<T>> {
    if omega == T::zero() {
        return Err(BackflowError::Domain(
            "tail transform is singular at |s| = 1".into(),
        ));
    }
    let r = omega.abs().sqrt();
    let v = fresnel_tail(l * r) / r;
    Ok(if omega > T::zero() { v } else { v.conj() })
}

/// `∫_X^∞ exp(i ω w) / w dw`.
fn reciprocal_phase_tail<T: Real>(omega: T, x: T) -> Result<Complex<T>> {
    if omega == T::zero() {
        return Err(BackflowError::Domain(
            "tail transform is singular at |s| = 1".into(),
        ));
    }
    let e1 = exp_integral_imag(omega.abs() * x);
    Ok(if omega > T::zero() { e1.conj() } else { e1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailMode<T> {
    Truncate,
    /// Adds the analytic transform of a known oscillatory tail beyond `u_max`.
    AsymptoticCorrection(OscillatoryTail<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSpec<T> {
    pub mode: TailMode<T>,
    pub u_max: T,
}

impl<T: Real> TailSpec<T> {
    pub fn truncate(u_max: T) -> Result<Self> {
        Self::new(TailMode::Truncate, u_max)
    }

    pub fn new(mode: TailMode<T>, u_max: T) -> Result<Self> {
        if !(u_max > T::zero()) {
            return Err(invalid("tail u_max must be positive"));
        }
        Ok(Self { mode, u_max })
    }

    fn check_grid(&self, grid: &MomentumGrid<T>) -> Result<()> {
        let tol = T::lit(1e-12) * grid.u_max();
        if (self.u_max - grid.u_max()).abs() > tol {
            return Err(invalid("tail must start where the grid is truncated"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    Zeroth,
    First,
}

impl TryFrom<u32> for Moment {
    type Error = BackflowError;

    fn try_from(m: u32) -> Result<Self> {
        match m {
            0 => Ok(Moment::Zeroth),
            1 => Ok(Moment::First),
            _ => Err(invalid(format!("moment must be 0 or 1, got {m}"))),
        }
    }
}

/// `∫₀^∞ u^m φ(u) exp(-i u² s) du` by grid quadrature plus the optional tail.
pub fn half_line_transform<T: Real, F: Fn(T) -> T>(
    phi: F,
    s: T,
    grid: &MomentumGrid<T>,
    tail: &TailSpec<T>,
    moment: Moment,
) -> Result<Complex<T>> {
    let values = sample(&phi, grid)?;
    let (g0, g1) = transform_pair(&values, s, grid, tail)?;
    Ok(match moment {
        Moment::Zeroth => g0,
        Moment::First => g1,
    })
}

/// Samples `phi` on the grid nodes, rejecting non-finite values.
pub fn sample<T: Real, F: Fn(T) -> T>(phi: &F, grid: &MomentumGrid<T>) -> Result<Vec<T>> {
    grid.nodes()
        .iter()
        .map(|&u| {
            let v = phi(u);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(BackflowError::Domain(format!("state undefined at u = {u}")))
            }
        })
        .collect()
}

/// Both moments `(G₀(s), G₁(s))` from values already sampled on `grid`.
pub fn transform_pair<T: Real>(
    values: &[T],
    s: T,
    grid: &MomentumGrid<T>,
    tail: &TailSpec<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    if values.len() != grid.len() {
        return Err(invalid("sample count does not match the grid"));
    }
    tail.check_grid(grid)?;
    let mut g0 = Complex::new(T::zero(), T::zero());
    let mut g1 = g0;
    for ((&u, &w), &v) in grid.nodes().iter().zip(grid.weights()).zip(values) {
        let phase = u * u * s;
        let e = Complex::new(phase.cos(), -phase.sin()) * (w * v);
        g0 = g0 + e;
        g1 = g1 + e * u;
    }
    if let TailMode::AsymptoticCorrection(law) = tail.mode {
        let (t0, t1) = law.transform_beyond(tail.u_max, s)?;
        g0 = g0 + t0;
        g1 = g1 + t1;
    }
    Ok((g0, g1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> MomentumGrid<f64> {
        MomentumGrid::oscillatory(8, 120, 12, 20.0).unwrap()
    }

    #[test]
    fn exponential_moments_at_zero_time() {
        let g = MomentumGrid::composite(40, 16, 40.0).unwrap();
        let tail = TailSpec::truncate(40.0).unwrap();
        let g0 = half_line_transform(|u: f64| (-u).exp(), 0.0, &g, &tail, Moment::Zeroth).unwrap();
        let g1 = half_line_transform(|u: f64| (-u).exp(), 0.0, &g, &tail, Moment::First).unwrap();
        assert_abs_diff_eq!(g0.re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g0.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g1.re, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn rejects_undefined_samples() {
        let g = grid();
        let tail = TailSpec::truncate(20.0).unwrap();
        let r = half_line_transform(|u: f64| 1.0 / (u - g.nodes()[3]), 0.0, &g, &tail, Moment::Zeroth);
        assert!(matches!(r, Err(BackflowError::Domain(_))));
        assert!(Moment::try_from(2).is_err());
    }

    #[test]
    fn tail_must_match_grid() {
        let g = grid();
        let tail = TailSpec::truncate(25.0).unwrap();
        assert!(half_line_transform(|u: f64| (-u).exp(), 0.0, &g, &tail, Moment::Zeroth).is_err());
    }

    #[test]
    fn tail_norm_matches_direct_quadrature() {
        let law = OscillatoryTail {
            cos_coeff: 0.3,
            sin_coeff: -0.7,
        };
        let l = 6.0;
        // Dense rule on panels uniform in u² over (l, 60], then the model beyond 60.
        let edges: Vec<f64> = {
            let (lo, hi) = (l * l, 60.0f64 * 60.0);
            (0..=6000)
                .map(|k| (lo + (hi - lo) * k as f64 / 6000.0).sqrt())
                .collect()
        };
        let (x, w) = crate::numerics::quadrature::composite_rule(&edges, 12).unwrap();
        let direct: f64 = x.iter().zip(&w).map(|(&u, &w)| w * law.value(u).powi(2)).sum();
        let beyond_60 = law.norm_sq_beyond(60.0).unwrap();
        assert_abs_diff_eq!(
            direct + beyond_60,
            law.norm_sq_beyond(l).unwrap(),
            epsilon = 1e-10
        );
    }
}
