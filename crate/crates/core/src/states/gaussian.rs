//! Superpositions of freely evolving gaussian packets of equal width
//! (`ħ = m = 1`).

use num_complex::Complex;
use rayon::prelude::*;

use super::window::{CurrentTrace, TimeUnits};
use crate::error::{invalid, Result};
use crate::numerics::GaussLegendre;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseConvention {
    /// Phase `p (x - x0 - p t)` measured from the moving packet centre. Not a
    /// solution of the free Schrödinger equation.
    ComovingPhase,
    /// Free-evolution phase `p (x - x0) - p² t / 2`.
    #[default]
    SchrodingerExact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent<T> {
    pub amplitude: T,
    pub momentum: T,
}

/// `ψ(x,t) = N Σ_k A_k (4σ² + 2it)^{-1/2} exp(i·phase_k − (x − x0 − p_k t)² / (4σ² + 2it))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSuperposition<T> {
    components: Vec<GaussianComponent<T>>,
    sigma: T,
    x0: T,
    convention: PhaseConvention,
    norm: T,
}

/// Half-width of the spatial integration domain, in units of the evolved width.
const SPATIAL_CUTOFF: f64 = 14.0;

impl<T: Real> GaussianSuperposition<T> {
    pub fn new(
        components: Vec<GaussianComponent<T>>,
        sigma: T,
        x0: T,
        convention: PhaseConvention,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("gaussian superposition needs at least one component"));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(invalid(format!("gaussian width must be positive, got {sigma}")));
        }
        if !x0.is_finite()
            || components
                .iter()
                .any(|c| !c.amplitude.is_finite() || !c.momentum.is_finite())
        {
            return Err(invalid("gaussian parameters must be finite"));
        }
        let mut g = Self {
            components,
            sigma,
            x0,
            convention,
            norm: T::one(),
        };
        let raw = g.raw_norm_sq();
        if !(raw > T::zero()) {
            return Err(invalid("gaussian amplitudes cancel to a zero state"));
        }
        g.norm = raw.sqrt().recip();
        Ok(g)
    }

    /// The two-packet state `p = (0.3, 1.4)`, `A = (1.8, 1)`, `σ = 10`, centered at 0.
    pub fn backflow_example(convention: PhaseConvention) -> Self {
        let c = |a: f64, p: f64| GaussianComponent {
            amplitude: T::lit(a),
            momentum: T::lit(p),
        };
        Self::new(
            vec![c(1.8, 0.3), c(1.0, 1.4)],
            T::lit(10.0),
            T::zero(),
            convention,
        )
        .expect("valid built-in parameters")
    }

    pub fn components(&self) -> &[GaussianComponent<T>] {
        &self.components
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn x0(&self) -> T {
        self.x0
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn with_convention(&self, convention: PhaseConvention) -> Self {
        Self {
            convention,
            ..self.clone()
        }
    }

    /// Normalization factor `N` applied to the printed sum.
    pub fn norm_factor(&self) -> T {
        self.norm
    }

    /// `∫|ψ(x,0)|² dx` of the unnormalized sum, in closed form.
    pub fn raw_norm_sq(&self) -> T {
        let s2 = self.sigma * self.sigma;
        let base = (T::lit(2.0) * T::PI()).sqrt() * self.sigma / (T::lit(4.0) * s2);
        let mut total = T::zero();
        for cj in &self.components {
            for ck in &self.components {
                let dp = cj.momentum - ck.momentum;
                total = total + cj.amplitude * ck.amplitude * (-dp * dp * s2 * T::lit(0.5)).exp();
            }
        }
        total * base
    }

    fn terms(&self, x: T, t: T) -> (Complex<T>, Complex<T>) {
        let four_s2 = T::lit(4.0) * self.sigma * self.sigma;
        let z = Complex::new(four_s2, T::lit(2.0) * t);
        let pre = z.sqrt().inv();
        let mut psi = Complex::new(T::zero(), T::zero());
        let mut dpsi = psi;
        for c in &self.components {
            let p = c.momentum;
            let y = x - self.x0 - p * t;
            let phase = match self.convention {
                PhaseConvention::ComovingPhase => p * y,
                PhaseConvention::SchrodingerExact => p * (x - self.x0) - p * p * t * T::lit(0.5),
            };
            let expo = Complex::new(T::zero(), phase) - Complex::new(y * y, T::zero()) / z;
            let term = pre * expo.exp() * c.amplitude;
            psi = psi + term;
            dpsi = dpsi + term * (Complex::new(T::zero(), p) - Complex::new(T::lit(2.0) * y, T::zero()) / z);
        }
        (psi * self.norm, dpsi * self.norm)
    }

    pub fn wavefunction(&self, x: T, t: T) -> Complex<T> {
        self.terms(x, t).0
    }

    /// `∂ψ/∂x`, differentiated analytically.
    pub fn wavefunction_dx(&self, x: T, t: T) -> Complex<T> {
        self.terms(x, t).1
    }

    /// `J(x, t) = Im(ψ* ∂ψ/∂x)`.
    pub fn current_at(&self, x: T, t: T) -> T {
        let (psi, d) = self.terms(x, t);
        (psi.conj() * d).im
    }

    /// Current through the origin.
    pub fn current(&self, t: T) -> T {
        self.current_at(T::zero(), t)
    }

    pub fn current_trace(&self, times: &[T]) -> Result<CurrentTrace<T>> {
        let values = times.par_iter().map(|&t| self.current(t)).collect();
        CurrentTrace::new(times.to_vec(), values, TimeUnits::NaturalT)
    }

    /// RMS width of `|ψ|²` for one component at time `t`.
    pub fn evolved_width(&self, t: T) -> T {
        let s2 = self.sigma * self.sigma;
        self.sigma * (T::one() + t * t / (T::lit(4.0) * s2 * s2)).sqrt()
    }

    /// Spatial interval outside which every component carries `≲ e^{-98}` of its mass.
    pub fn support(&self, t: T) -> (T, T) {
        let w = self.evolved_width(t) * T::lit(SPATIAL_CUTOFF);
        let centres = self.components.iter().map(|c| self.x0 + c.momentum * t);
        let (lo, hi) = centres.fold((T::infinity(), T::neg_infinity()), |(lo, hi), c| {
            (lo.min(c), hi.max(c))
        });
        (lo - w, hi + w)
    }

    /// `∫_a^b |ψ(x,t)|² dx` by panel-wise Gauss–Legendre quadrature.
    pub fn probability_between(&self, a: T, b: T, t: T) -> Result<T> {
        if !(a < b) {
            return Ok(T::zero());
        }
        let width = self.evolved_width(t);
        // Interference terms oscillate with wavenumber at most the largest
        // momentum difference.
        let k = self
            .components
            .iter()
            .flat_map(|a| {
                self.components
                    .iter()
                    .map(move |b| (a.momentum - b.momentum).abs())
            })
            .fold(T::zero(), T::max);
        let mut h = width * T::lit(0.5);
        if k > T::zero() {
            h = h.min(T::FRAC_PI_2() / k);
        }
        let panels = ((b - a) / h).ceil().to_usize().unwrap_or(1).max(1);
        let rule = GaussLegendre::<T>::new(16)?;
        let step = (b - a) / T::from_usize_lossy(panels);
        let total = (0..panels)
            .into_par_iter()
            .map(|i| {
                let lo = a + step * T::from_usize_lossy(i);
                let hi = if i + 1 == panels { b } else { lo + step };
                rule.integrate(lo, hi, |x| self.wavefunction(x, t).norm_sqr())
            })
            .collect::<Vec<T>>();
        Ok(total.into_iter().sum())
    }

    /// Probability of finding the particle in `x < 0` at time `t`.
    pub fn prob_left(&self, t: T) -> Result<T> {
        let (lo, hi) = self.support(t);
        let upper = hi.min(T::zero());
        let p = self.probability_between(lo, upper, t)?;
        Ok(p.max(T::zero()).min(T::one()))
    }

    /// `∫|ψ(x,t)|² dx` over the numerical support.
    pub fn norm_sq_at(&self, t: T) -> Result<T> {
        let (lo, hi) = self.support(t);
        self.probability_between(lo, hi, t)
    }

    /// Probability of a negative momentum, from the closed-form momentum
    /// distribution and complementary error functions.
    pub fn neg_momentum_prob(&self) -> T {
        let s = self.sigma.to_f64_lossy();
        let mut num = 0.0;
        let mut den = 0.0;
        for cj in &self.components {
            for ck in &self.components {
                let (pj, pk) = (cj.momentum.to_f64_lossy(), ck.momentum.to_f64_lossy());
                let aa = cj.amplitude.to_f64_lossy() * ck.amplitude.to_f64_lossy();
                let dp = pj - pk;
                let mean = 0.5 * (pj + pk);
                let weight = aa * (-0.5 * s * s * dp * dp).exp();
                den += weight;
                num += weight * 0.5 * libm::erfc(std::f64::consts::SQRT_2 * s * mean);
            }
        }
        T::lit(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(p: f64, sigma: f64) -> GaussianSuperposition<f64> {
        GaussianSuperposition::new(
            vec![GaussianComponent {
                amplitude: 1.0,
                momentum: p,
            }],
            sigma,
            0.0,
            PhaseConvention::SchrodingerExact,
        )
        .unwrap()
    }

    #[test]
    fn conventions_agree_at_time_zero() {
        let a = GaussianSuperposition::<f64>::backflow_example(PhaseConvention::ComovingPhase);
        let b = a.with_convention(PhaseConvention::SchrodingerExact);
        for x in [-20.0, -3.0, 0.0, 4.5, 30.0] {
            assert_eq!(a.wavefunction(x, 0.0), b.wavefunction(x, 0.0));
        }
    }

    #[test]
    fn initial_shape_is_gaussian() {
        let g = single(0.7, 2.0);
        let r = g.wavefunction(1.3, 0.0) / g.wavefunction(0.0, 0.0);
        let expect = Complex::new(0.0, 0.7 * 1.3).exp() * (-1.3f64 * 1.3 / 16.0).exp();
        assert!((r - expect).norm() < 1e-14);
    }

    #[test]
    fn normalized_at_start() {
        let g = GaussianSuperposition::<f64>::backflow_example(PhaseConvention::ComovingPhase);
        assert!((g.norm_sq_at(0.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn symmetric_packet_half_left() {
        let g = single(0.4, 1.5);
        assert!((g.prob_left(0.0).unwrap() - 0.5).abs() < 1e-10);
        assert!((single(0.0, 3.0).neg_momentum_prob() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn current_sign_follows_momentum() {
        assert!(single(0.8, 2.0).current(0.0) > 0.0);
        assert!(single(-0.8, 2.0).current(0.0) < 0.0);
    }

    #[test]
    fn analytic_derivative_matches_differences() {
        let g = GaussianSuperposition::<f64>::backflow_example(PhaseConvention::SchrodingerExact);
        let (x, t, h) = (1.7, 3.2, 1e-5);
        let fd = (g.wavefunction(x + h, t) - g.wavefunction(x - h, t)) / (2.0 * h);
        assert!((fd - g.wavefunction_dx(x, t)).norm() < 1e-9);
    }

    #[test]
    fn rejects_invalid() {
        assert!(GaussianSuperposition::<f64>::new(vec![], 1.0, 0.0, PhaseConvention::ComovingPhase).is_err());
        let c = GaussianComponent {
            amplitude: 1.0,
            momentum: 1.0,
        };
        assert!(GaussianSuperposition::new(vec![c], 0.0, 0.0, PhaseConvention::ComovingPhase).is_err());
    }
}
