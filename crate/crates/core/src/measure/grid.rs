use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Periodic grid `x_k = x_min + k·dx`, `k = 0..n`, on `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid<T> {
    x_min: T,
    x_max: T,
    n: usize,
}

impl<T: Real> SpatialGrid<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min < T::zero() && T::zero() < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!(
                "spatial grid must straddle the origin, got [{x_min}, {x_max})"
            )));
        }
        if n < 16 {
            return Err(invalid(format!("spatial grid needs at least 16 points, got {n}")));
        }
        if !n.is_power_of_two() {
            log::debug!("spatial grid size {n} is not a power of two; FFTs will be slower");
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.n)
    }

    pub fn x(&self, k: usize) -> T {
        self.x_min + self.dx() * T::from_usize_lossy(k)
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<T> {
        let n = self.n;
        let dk = T::lit(2.0) * T::PI() / (self.x_max - self.x_min);
        (0..n)
            .map(|k| {
                let m = if k <= (n - 1) / 2 {
                    k as f64
                } else {
                    k as f64 - n as f64
                };
                dk * T::lit(m)
            })
            .collect()
    }

    pub fn nyquist(&self) -> T {
        T::PI() / self.dx()
    }

    pub fn sample<F: Fn(T) -> Complex<T>>(&self, f: F) -> Vec<Complex<T>> {
        (0..self.n).map(|k| f(self.x(k))).collect()
    }
}
