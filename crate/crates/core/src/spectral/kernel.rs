use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Backflow kernel `(1/π) sin(u² - v²)/(u - v) · exp(-a²(u - v)²)`.
///
/// `a = 0` is the sharp projector; `a² = 2mσ²/ħT` measures the smearing of
/// the quasiprojector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxKernel<T> {
    a: T,
}

impl<T: Real> FluxKernel<T> {
    pub fn sharp() -> Self {
        Self { a: T::zero() }
    }

    pub fn smeared(a: T) -> Result<Self> {
        if !(a >= T::zero()) || !a.is_finite() {
            return Err(invalid(format!("smearing a must be finite and >= 0, got {a}")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn value(&self, u: T, v: T) -> Result<T> {
        if !(u > T::zero() && v > T::zero()) {
            return Err(invalid(format!("kernel needs u, v > 0, got ({u}, {v})")));
        }
        Ok(self.value_unchecked(u, v))
    }

    pub(crate) fn value_unchecked(&self, u: T, v: T) -> T {
        let d = u - v;
        let sum = u + v;
        // sin(u² - v²)/(u - v) = (u + v) sinc((u - v)(u + v)).
        let x = d * sum;
        let sinc = if x.abs() < T::lit(1e-4) {
            T::one() - x * x / T::lit(6.0)
        } else {
            x.sin() / x
        };
        let smear = if self.a == T::zero() {
            T::one()
        } else {
            (-(self.a * self.a) * d * d).exp()
        };
        sum * sinc * smear * T::FRAC_1_PI()
    }
}

pub fn kernel_value<T: Real>(u: T, v: T, kernel: &FluxKernel<T>) -> Result<T> {
    kernel.value(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn diagonal_limit() {
        let k = FluxKernel::sharp();
        assert_abs_diff_eq!(k.value(1.3, 1.3).unwrap(), 2.0 * 1.3 / PI, epsilon = 1e-15);
        // Approaching the diagonal is continuous.
        let near = k.value(1.3, 1.3 + 1e-7).unwrap();
        assert_abs_diff_eq!(near, 2.0 * 1.3 / PI, epsilon = 1e-7);
    }

    #[test]
    fn symmetric_in_arguments() {
        for &a in &[0.0, 0.5, 1.0, 3.0] {
            let k = FluxKernel::smeared(a).unwrap();
            assert_eq!(k.value(1.0, 0.5).unwrap(), k.value(0.5, 1.0).unwrap());
        }
    }

    #[test]
    fn smeared_value_against_direct_formula() {
        let k = FluxKernel::smeared(1.0).unwrap();
        let direct = (1.0f64 - 0.25).sin() / 0.5 * (-0.25f64).exp() / PI;
        assert_abs_diff_eq!(k.value(1.0, 0.5).unwrap(), direct, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let k = FluxKernel::<f64>::sharp();
        assert!(k.value(0.0, 1.0).is_err());
        assert!(k.value(1.0, -2.0).is_err());
        assert!(FluxKernel::smeared(-0.1f64).is_err());
        assert!(FluxKernel::smeared(f64::NAN).is_err());
    }
}
