//! Deviation between measured and modelled arrival densities.

use super::evolve::MeasurementRun;
use super::smear::{convolve, ArrivalDistribution};
use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::states::CurrentTrace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport<T> {
    pub max_abs: T,
    pub rms: T,
    /// Largest `|Π|` of the reference.
    pub peak: T,
    pub samples: usize,
}

impl<T: Real> DeviationReport<T> {
    pub fn rms_over_peak(&self) -> T {
        self.rms / self.peak
    }

    pub fn max_over_peak(&self) -> T {
        self.max_abs / self.peak
    }
}

fn interpolate<T: Real>(ts: &[T], vs: &[T], t: T) -> Option<T> {
    if ts.is_empty() || t < ts[0] || t > ts[ts.len() - 1] {
        return None;
    }
    let k = ts.partition_point(|&x| x <= t);
    if k == 0 {
        return Some(vs[0]);
    }
    if k >= ts.len() {
        return Some(vs[ts.len() - 1]);
    }
    let f = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
    Some(vs[k - 1] + (vs[k] - vs[k - 1]) * f)
}

/// Deviation of `other` (linearly interpolated) from `reference` at the
/// reference times they share.
pub fn compare_distributions<T: Real>(
    reference: &ArrivalDistribution<T>,
    other: &ArrivalDistribution<T>,
) -> Result<DeviationReport<T>> {
    let mut max_abs = T::zero();
    let mut sum_sq = T::zero();
    let mut peak = T::zero();
    let mut samples = 0;
    for (&t, &r) in reference.times().iter().zip(reference.values()) {
        if let Some(o) = interpolate(other.times(), other.values(), t) {
            let d = (r - o).abs();
            max_abs = max_abs.max(d);
            sum_sq = sum_sq + d * d;
            peak = peak.max(r.abs());
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(invalid("distributions share no time range"));
    }
    Ok(DeviationReport {
        max_abs,
        rms: (sum_sq / T::from_usize_lossy(samples)).sqrt(),
        peak,
        samples,
    })
}

/// Compares a simulated run with the weak-measurement convolution of the
/// free current of the same initial state, with the detector switched on at
/// the start of the run.
pub fn weak_limit_compare<T: Real>(
    run: &MeasurementRun<T>,
    trace: &CurrentTrace<T>,
    v0: T,
) -> Result<DeviationReport<T>> {
    let tol = T::lit(1e-12) * (T::one() + v0.abs());
    if (run.v0() - v0).abs() > tol {
        return Err(invalid(format!(
            "run used V0 = {}, comparison asked for {v0}",
            run.v0()
        )));
    }
    let start = run.t_start();
    let (ts, vs) = (trace.times(), trace.values());
    let j0 =
        interpolate(ts, vs, start).ok_or_else(|| invalid("current trace must cover the start of the run"))?;
    let mut times = vec![start];
    let mut values = vec![j0];
    for (&t, &v) in ts.iter().zip(vs) {
        if t > start {
            times.push(t);
            values.push(v);
        }
    }
    let model = convolve(&times, &values, v0, T::zero());
    let model = ArrivalDistribution::new(times, model, trace.units())?;
    compare_distributions(run.arrival(), &model)
}
