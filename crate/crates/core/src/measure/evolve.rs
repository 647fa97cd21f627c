//! Split-step evolution under `H₀ − i V₀ θ(x)` and the resulting survival
//! probability `N(τ)` and arrival distribution `Π(τ) = −dN/dτ`.

use num_complex::Complex;
use rustfft::FftPlanner;

use super::grid::SpatialGrid;
use super::smear::ArrivalDistribution;
use crate::error::{invalid, BackflowError, Result};
use crate::scalar::Real;
use crate::states::TimeUnits;

/// Largest allowed norm increase in one step.
const GROWTH_TOL: f64 = 1e-8;
/// Momentum mass allowed in the top tenth of the band below Nyquist.
const ALIAS_TOL: f64 = 1e-6;
/// Momentum mass ignored when locating the fastest component.
const SPECTRAL_TAIL: f64 = 1e-10;
/// Position mass allowed near either end of the grid.
const EDGE_TOL: f64 = 1e-8;
const EXPECTATION_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams<T> {
    pub v0: T,
    pub dt: T,
    /// Duration of the run.
    pub duration: T,
    /// Time label of the initial state.
    pub t_start: T,
}

/// `Π` from differencing `N` against `2 V₀ ⟨θ⟩` at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationCheck<T> {
    pub time: T,
    pub differenced: T,
    pub expectation: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRun<T> {
    params: EvolutionParams<T>,
    times: Vec<T>,
    survival: Vec<T>,
    arrival: ArrivalDistribution<T>,
    boundary_mass: T,
    initial_norm: T,
    p_max: T,
    checks: Vec<ExpectationCheck<T>>,
}

impl<T: Real> MeasurementRun<T> {
    pub fn v0(&self) -> T {
        self.params.v0
    }

    pub fn dt(&self) -> T {
        self.params.dt
    }

    pub fn t_start(&self) -> T {
        self.params.t_start
    }

    pub fn duration(&self) -> T {
        self.params.duration
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    /// `N(τ)` at each recorded time.
    pub fn survival(&self) -> &[T] {
        &self.survival
    }

    pub fn arrival(&self) -> &ArrivalDistribution<T> {
        &self.arrival
    }

    /// Mass within the outer 1/32 of the grid on either side at the end of the run.
    pub fn boundary_mass(&self) -> T {
        self.boundary_mass
    }

    /// `‖ψ₀‖²` of the supplied samples before normalization.
    pub fn initial_norm(&self) -> T {
        self.initial_norm
    }

    /// Momentum beyond which the initial state carries negligible mass.
    pub fn p_max(&self) -> T {
        self.p_max
    }

    pub fn expectation_checks(&self) -> &[ExpectationCheck<T>] {
        &self.checks
    }

    /// Largest gap between differenced and expectation-form `Π` at the check times.
    pub fn expectation_mismatch(&self) -> T {
        self.checks
            .iter()
            .map(|c| (c.differenced - c.expectation).abs())
            .fold(T::zero(), T::max)
    }
}

fn absorber_weight<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x == T::zero() {
        T::lit(0.5)
    } else {
        T::zero()
    }
}

/// Evolves `psi0` from time 0; see [`evolve_from`].
pub fn evolve_complex_potential<T: Real>(
    psi0: &[Complex<T>],
    grid: &SpatialGrid<T>,
    v0: T,
    dt: T,
    duration: T,
) -> Result<MeasurementRun<T>> {
    evolve_from(
        psi0,
        grid,
        &EvolutionParams {
            v0,
            dt,
            duration,
            t_start: T::zero(),
        },
    )
}

/// Strang-split spectral propagation: half absorber decay, exact kinetic
/// step in momentum space, half absorber decay.
///
/// `psi0` is normalized on the grid before stepping. `Π` is the centered
/// difference of `N` (one-sided at the ends).
pub fn evolve_from<T: Real>(
    psi0: &[Complex<T>],
    grid: &SpatialGrid<T>,
    params: &EvolutionParams<T>,
) -> Result<MeasurementRun<T>> {
    let EvolutionParams {
        v0,
        dt,
        duration,
        t_start,
    } = *params;
    if !(v0 >= T::zero()) || !v0.is_finite() {
        return Err(invalid(format!(
            "absorber strength must be finite and non-negative, got {v0}"
        )));
    }
    if !(dt > T::zero()) || !(duration > T::zero()) || !t_start.is_finite() {
        return Err(invalid("time step and duration must be positive"));
    }
    let n = grid.len();
    if psi0.len() != n {
        return Err(invalid(format!(
            "initial state has {} samples, grid has {n}",
            psi0.len()
        )));
    }
    if psi0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(BackflowError::Domain(
            "initial state has non-finite samples".into(),
        ));
    }
    let steps = (duration / dt).round().to_usize().unwrap_or(0).max(1);
    let dx = grid.dx();

    let raw: T = psi0.iter().map(|z| z.norm_sqr()).sum::<T>() * dx;
    if !(raw > T::zero()) {
        return Err(invalid("initial state is zero"));
    }
    let edge = (n / 32).max(1);
    let edge_mass = |psi: &[Complex<T>]| -> T {
        let lo: T = psi[..edge].iter().map(|z| z.norm_sqr()).sum();
        let hi: T = psi[n - edge..].iter().map(|z| z.norm_sqr()).sum();
        (lo + hi) * dx
    };
    let scale = raw.sqrt().recip();
    let mut psi: Vec<Complex<T>> = psi0.iter().map(|z| z * scale).collect();
    if edge_mass(&psi) > T::lit(EDGE_TOL) {
        return Err(invalid(format!(
            "initial state has {:.3e} of its mass at the grid edges; widen the grid",
            edge_mass(&psi).to_f64_lossy()
        )));
    }

    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let k = grid.wavenumbers();

    let mut spectrum = psi.clone();
    forward.process(&mut spectrum);
    let power: Vec<T> = spectrum.iter().map(|z| z.norm_sqr()).collect();
    let total: T = power.iter().copied().sum();
    let band = grid.nyquist() * T::lit(0.9);
    let aliased: T = power
        .iter()
        .zip(&k)
        .filter(|(_, &kk)| kk.abs() >= band)
        .map(|(p, _)| *p)
        .sum::<T>()
        / total;
    if aliased > T::lit(ALIAS_TOL) {
        return Err(BackflowError::Aliasing {
            mass: aliased.to_f64_lossy(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| k[b].abs().partial_cmp(&k[a].abs()).expect("finite wavenumbers"));
    let mut tail = T::zero();
    let mut p_max = T::zero();
    for &i in &order {
        tail = tail + power[i] / total;
        if tail > T::lit(SPECTRAL_TAIL) {
            p_max = k[i].abs();
            break;
        }
    }
    if p_max > T::zero() && dt > dx / (T::lit(4.0) * p_max) {
        return Err(invalid(format!(
            "time step {dt} does not resolve momentum {p_max}: need dt <= dx/(4 p_max) = {}",
            dx / (T::lit(4.0) * p_max)
        )));
    }

    let inv_n = T::from_usize_lossy(n).recip();
    let kinetic: Vec<Complex<T>> = k
        .iter()
        .map(|&kk| Complex::from_polar(inv_n, -kk * kk * dt * T::lit(0.5)))
        .collect();
    let theta: Vec<T> = grid.points().into_iter().map(absorber_weight).collect();
    let half_decay: Vec<T> = theta
        .iter()
        .map(|&th| (-v0 * th * dt * T::lit(0.5)).exp())
        .collect();

    let check_every = (steps / EXPECTATION_SAMPLES).max(1);
    let mut survival = Vec::with_capacity(steps + 1);
    survival.push(T::one());
    let mut expectations: Vec<(usize, T)> = Vec::new();
    let expectation = |psi: &[Complex<T>]| -> T {
        T::lit(2.0)
            * v0
            * psi
                .iter()
                .zip(&theta)
                .map(|(z, &th)| th * z.norm_sqr())
                .sum::<T>()
            * dx
    };
    expectations.push((0, expectation(&psi)));
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); forward.get_inplace_scratch_len()];

    for step in 1..=steps {
        for (z, &d) in psi.iter_mut().zip(&half_decay) {
            *z = *z * d;
        }
        forward.process_with_scratch(&mut psi, &mut scratch);
        for (z, &kin) in psi.iter_mut().zip(&kinetic) {
            *z = *z * kin;
        }
        inverse.process_with_scratch(&mut psi, &mut scratch);
        for (z, &d) in psi.iter_mut().zip(&half_decay) {
            *z = *z * d;
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>() * dx;
        let prev = survival[step - 1];
        if norm - prev > T::lit(GROWTH_TOL) || !norm.is_finite() {
            return Err(BackflowError::UnstableConfiguration {
                step,
                growth: (norm - prev).to_f64_lossy(),
            });
        }
        survival.push(norm);
        if step % check_every == 0 && expectations.len() < EXPECTATION_SAMPLES {
            expectations.push((step, expectation(&psi)));
        }
    }

    let boundary_mass = edge_mass(&psi);
    if boundary_mass > T::lit(EDGE_TOL) {
        log::warn!(
            "{:.3e} of the norm reached the grid edges; the domain may be too small",
            boundary_mass.to_f64_lossy()
        );
    }

    let times: Vec<T> = (0..=steps)
        .map(|i| t_start + dt * T::from_usize_lossy(i))
        .collect();
    let pi = differentiate_survival(&survival, dt);
    let checks = expectations
        .into_iter()
        .map(|(i, e)| ExpectationCheck {
            time: times[i],
            differenced: pi[i],
            expectation: e,
        })
        .collect();
    let arrival = ArrivalDistribution::new(times.clone(), pi, TimeUnits::NaturalT)?;
    Ok(MeasurementRun {
        params: EvolutionParams {
            duration: dt * T::from_usize_lossy(steps),
            ..*params
        },
        times,
        survival,
        arrival,
        boundary_mass,
        initial_norm: raw,
        p_max,
        checks,
    })
}

/// `−dN/dτ` by centered differences, one-sided at the ends. Its trapezoid
/// integral telescopes to `N(0) − N(end)`.
fn differentiate_survival<T: Real>(n: &[T], dt: T) -> Vec<T> {
    let m = n.len();
    if m < 2 {
        return vec![T::zero(); m];
    }
    (0..m)
        .map(|i| {
            if i == 0 {
                -(n[1] - n[0]) / dt
            } else if i + 1 == m {
                -(n[m - 1] - n[m - 2]) / dt
            } else {
                -(n[i + 1] - n[i - 1]) / (T::lit(2.0) * dt)
            }
        })
        .collect()
}
