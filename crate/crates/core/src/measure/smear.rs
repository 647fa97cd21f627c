//! Exponential time-smearing of a current, `Π(τ) = 2V₀ ∫ e^{−2V₀(τ−t)} J(t) dt`,
//! and its local inverse `J = Π + Π'/(2V₀)`.

use crate::error::{invalid, BackflowError, Result};
use crate::scalar::Real;
use crate::states::window::trapezoid;
use crate::states::{CurrentTrace, TimeUnits};

/// Memory of the kernel that must be covered by the trace: `e^{−2V₀·span} ≤ 1e−8`.
pub const HISTORY_DECAY: f64 = 1e-8;
pub const DEFAULT_NOISE_THRESHOLD: f64 = 0.05;

/// Measured arrival-time density `Π(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalDistribution<T> {
    times: Vec<T>,
    values: Vec<T>,
    units: TimeUnits,
}

impl<T: Real> ArrivalDistribution<T> {
    pub fn new(times: Vec<T>, values: Vec<T>, units: TimeUnits) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("arrival distribution needs as many values as times"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("arrival times must be strictly ascending"));
        }
        Ok(Self { times, values, units })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn units(&self) -> TimeUnits {
        self.units
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trapezoid-rule `∫Π dτ`.
    pub fn total(&self) -> T {
        trapezoid(&self.times, &self.values)
    }

    pub fn peak(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }
}

/// Kernel width needed before the first output sample.
pub fn required_history<T: Real>(v0: T) -> T {
    -T::lit(HISTORY_DECAY).ln() / (T::lit(2.0) * v0)
}

fn check_v0<T: Real>(v0: T) -> Result<()> {
    if !(v0 > T::zero()) || !v0.is_finite() {
        return Err(invalid(format!("absorber strength must be positive, got {v0}")));
    }
    Ok(())
}

/// Exact convolution of the piecewise-linear interpolant of `(times, values)`
/// with `κ e^{−κt}`, `κ = 2V₀`, starting from `initial` at `times[0]`.
pub(crate) fn convolve<T: Real>(times: &[T], values: &[T], v0: T, initial: T) -> Vec<T> {
    let kappa = T::lit(2.0) * v0;
    let mut out = Vec::with_capacity(times.len());
    let mut acc = initial;
    out.push(acc);
    for i in 1..times.len() {
        let x = kappa * (times[i] - times[i - 1]);
        let decay = (-x).exp();
        // (1 − e^{−x}) / x without cancellation.
        let frac = if x > T::zero() {
            -((-x).exp_m1()) / x
        } else {
            T::one()
        };
        acc = acc * decay + values[i] * (T::one() - frac) + values[i - 1] * (frac - decay);
        out.push(acc);
    }
    out
}

/// Weak-measurement arrival density for a current known over enough history.
///
/// The trace is assumed to have been constant before its first sample, so a
/// constant current maps to itself exactly.
pub fn smeared_current<T: Real>(trace: &CurrentTrace<T>, v0: T) -> Result<ArrivalDistribution<T>> {
    check_v0(v0)?;
    if trace.is_empty() {
        return Err(invalid("cannot smear an empty trace"));
    }
    let ts = trace.times();
    let span = ts[ts.len() - 1] - ts[0];
    let required = required_history(v0);
    if (-T::lit(2.0) * v0 * span).exp() > T::lit(HISTORY_DECAY) {
        return Err(BackflowError::InsufficientHistory {
            span: span.to_f64_lossy(),
            required: required.to_f64_lossy(),
            v0: v0.to_f64_lossy(),
        });
    }
    let values = convolve(ts, trace.values(), v0, trace.values()[0]);
    ArrivalDistribution::new(ts.to_vec(), values, trace.units())
}

/// Derivative of samples on a nonuniform grid: three-point centered formula
/// inside, second-order one-sided formulas at the ends.
pub(crate) fn derivative<T: Real>(t: &[T], y: &[T]) -> Vec<T> {
    let n = t.len();
    if n < 2 {
        return vec![T::zero(); n];
    }
    if n == 2 {
        let d = (y[1] - y[0]) / (t[1] - t[0]);
        return vec![d, d];
    }
    let three_point = |i0: usize, at: usize| -> T {
        let (x0, x1, x2) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let x = t[at];
        let l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
        let l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
        let l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        y[i0] * l0 + y[i0 + 1] * l1 + y[i0 + 2] * l2
    };
    (0..n)
        .map(|i| {
            if i == 0 {
                three_point(0, 0)
            } else if i + 1 == n {
                three_point(n - 3, n - 1)
            } else {
                three_point(i - 1, i)
            }
        })
        .collect()
}

/// Current recovered from an arrival distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Deconvolution<T> {
    pub trace: CurrentTrace<T>,
    /// Estimated relative noise contributed by differentiating `Π`.
    pub roughness: T,
    /// `roughness` exceeded the configured threshold.
    pub noisy: bool,
}

/// `J = Π + Π'/(2V₀)` with the default noise threshold.
pub fn deconvolve<T: Real>(arrival: &ArrivalDistribution<T>, v0: T) -> Result<Deconvolution<T>> {
    deconvolve_with(arrival, v0, T::lit(DEFAULT_NOISE_THRESHOLD))
}

pub fn deconvolve_with<T: Real>(
    arrival: &ArrivalDistribution<T>,
    v0: T,
    noise_threshold: T,
) -> Result<Deconvolution<T>> {
    check_v0(v0)?;
    if arrival.len() < 2 {
        return Err(invalid("deconvolution needs at least two samples"));
    }
    let (t, pi) = (arrival.times(), arrival.values());
    let kappa = T::lit(2.0) * v0;
    let d = derivative(t, pi);
    let values: Vec<T> = pi.iter().zip(&d).map(|(&p, &dp)| p + dp / kappa).collect();
    let roughness = roughness(t, pi, kappa);
    let noisy = roughness > noise_threshold;
    if noisy {
        log::warn!(
            "deconvolution amplifies sample noise: roughness {:.3e} exceeds {:.3e}",
            roughness.to_f64_lossy(),
            noise_threshold.to_f64_lossy()
        );
    }
    Ok(Deconvolution {
        trace: CurrentTrace::new(t.to_vec(), values, arrival.units())?,
        roughness,
        noisy,
    })
}

/// RMS third difference, scaled to the noise it induces in `Π'/κ` relative to
/// the peak of `Π`. Smooth data give `O(h²)`; white noise of size `ε` gives
/// about `ε / (κ h · peak)`.
fn roughness<T: Real>(t: &[T], pi: &[T], kappa: T) -> T {
    let n = t.len();
    let peak = pi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if n < 4 || peak == T::zero() {
        return T::zero();
    }
    let h = (t[n - 1] - t[0]) / T::from_usize_lossy(n - 1);
    let sum_sq: T = pi
        .windows(4)
        .map(|w| {
            let d3 = w[3] - T::lit(3.0) * w[2] + T::lit(3.0) * w[1] - w[0];
            d3 * d3
        })
        .sum();
    let rms = (sum_sq / T::from_usize_lossy(n - 3)).sqrt() / T::lit(20.0).sqrt();
    rms / (T::lit(2.0).sqrt() * kappa * h * peak)
}
