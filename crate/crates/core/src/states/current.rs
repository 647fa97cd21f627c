//! Dimensionless current `j(s) = (1/π) Re[G₀*(s) G₁(s)]` and its time integrals.

use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;

use super::momentum::MomentumState;
use super::window::{CurrentTrace, FluxWindow, TimeUnits};
use crate::error::{invalid, BackflowError, Result};
use crate::numerics::{integrate_adaptive, transform_pair, AdaptiveOptions, MomentumGrid, TailSpec};
use crate::scalar::Real;

pub const DEFAULT_S_MAX: f64 = 3.0;

/// Effective quadrature points per unit `s` in [`CurrentEvaluator::flux`].
const POINTS_PER_UNIT_S: f64 = 200.0;

#[derive(Debug)]
struct Level<T> {
    grid: MomentumGrid<T>,
    values: Vec<T>,
    tail: TailSpec<T>,
}

/// Evaluates the current of one state.
///
/// The state's own grid resolves the phase `u²(1 ± s)` for `|s| ≤ 1`. Analytic
/// and custom states are resampled on grids with `2^k` times as many
/// oscillatory panels for larger `|s|`; those grids are built on first use and
/// shared between threads.
#[derive(Debug)]
pub struct CurrentEvaluator<'a, T> {
    state: &'a MomentumState<T>,
    s_max: T,
    levels: Vec<OnceLock<Result<Arc<Level<T>>>>>,
}

fn level_for<T: Real>(s: T) -> usize {
    let need = ((T::one() + s.abs()) * T::lit(0.5)).to_f64_lossy();
    if need <= 1.0 {
        0
    } else {
        need.log2().ceil() as usize
    }
}

impl<'a, T: Real> CurrentEvaluator<'a, T> {
    pub fn new(state: &'a MomentumState<T>) -> Self {
        Self::with_s_max(state, T::lit(DEFAULT_S_MAX)).expect("default s_max is valid")
    }

    pub fn with_s_max(state: &'a MomentumState<T>, s_max: T) -> Result<Self> {
        if !(s_max >= T::zero()) || !s_max.is_finite() {
            return Err(invalid(format!(
                "s_max must be finite and non-negative, got {s_max}"
            )));
        }
        let count = if state.is_refinable() && state.grid().layout().is_some() {
            level_for(s_max) + 1
        } else {
            1
        };
        Ok(Self {
            state,
            s_max,
            levels: (0..count).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn s_max(&self) -> T {
        self.s_max
    }

    pub fn state(&self) -> &MomentumState<T> {
        self.state
    }

    fn level(&self, s: T) -> Result<Arc<Level<T>>> {
        let k = level_for(s).min(self.levels.len() - 1);
        self.levels[k]
            .get_or_init(|| {
                let st = if k == 0 {
                    self.state.clone()
                } else {
                    self.state.resampled(self.state.grid().refined(1 << k)?)?
                };
                Ok(Arc::new(Level {
                    values: st.samples().to_vec(),
                    tail: *st.tail(),
                    grid: st.grid().clone(),
                }))
            })
            .clone()
    }

    /// `(G₀(s), G₁(s))` on the grid appropriate for `s`.
    pub fn transforms(&self, s: T) -> Result<(Complex<T>, Complex<T>)> {
        if !(s.abs() <= self.s_max) {
            return Err(invalid(format!(
                "|s| = {} exceeds s_max = {}",
                s.abs(),
                self.s_max
            )));
        }
        let lv = self.level(s)?;
        transform_pair(&lv.values, s, &lv.grid, &lv.tail)
    }

    pub fn current(&self, s: T) -> Result<T> {
        let (g0, g1) = self.transforms(s)?;
        let j = (g0.conj() * g1).re / T::PI();
        if j.is_finite() {
            Ok(j)
        } else {
            Err(BackflowError::Domain(format!("current is not finite at s = {s}")))
        }
    }

    /// Current at every time in `times`, evaluated in parallel.
    pub fn trace(&self, times: &[T]) -> Result<CurrentTrace<T>> {
        let values = times
            .par_iter()
            .map(|&s| self.current(s))
            .collect::<Result<Vec<T>>>()?;
        CurrentTrace::new(times.to_vec(), values, TimeUnits::DimensionlessS)
    }

    /// `∫_{s1}^{s2} j(s) ds` by composite Gauss–Legendre quadrature, with
    /// panels graded geometrically towards `s = ±1`.
    pub fn flux(&self, s1: T, s2: T) -> Result<FluxWindow<T>> {
        if s1 == s2 {
            return FluxWindow::new(s1, s2, T::zero());
        }
        if !(s1 < s2) {
            return Err(invalid(format!("flux window [{s1}, {s2}] is reversed")));
        }
        let one = T::one();
        let mut cuts = vec![s1];
        for c in [-one, one] {
            if c > s1 && c < s2 {
                cuts.push(c);
            }
        }
        cuts.push(s2);
        let f = |s: T| self.current(s);
        let mut total = T::zero();
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let len = (b - a).to_f64_lossy();
            let per_panel = 16usize;
            let panels = ((POINTS_PER_UNIT_S * len) / per_panel as f64).ceil().max(1.0) as usize;
            let opts = AdaptiveOptions {
                initial_panels: panels,
                points_per_panel: per_panel,
                abs_tol: T::lit(1e-9),
                rel_tol: T::lit(1e-9),
                max_doublings: 6,
                grade_left: a.abs() == one,
                grade_right: b.abs() == one,
            };
            total = total + integrate_adaptive(f, a, b, &opts)?.0;
        }
        FluxWindow::new(s1, s2, total)
    }
}

/// `j(s)` with the default `s_max`.
pub fn dimensionless_current<T: Real>(state: &MomentumState<T>, s: T) -> Result<T> {
    CurrentEvaluator::new(state).current(s)
}

/// `∫_{s1}^{s2} j(s) ds`; requires `s1 ≤ s2`.
pub fn flux<T: Real>(state: &MomentumState<T>, s1: T, s2: T) -> Result<FluxWindow<T>> {
    CurrentEvaluator::new(state).flux(s1, s2)
}

/// Evenly spaced times `start, start + step, …` up to `end` inclusive.
pub fn uniform_times<T: Real>(start: T, end: T, count: usize) -> Result<Vec<T>> {
    if count < 2 || !(start < end) {
        return Err(invalid("need at least two times on a non-empty interval"));
    }
    let step = (end - start) / T::from_usize_lossy(count - 1);
    Ok((0..count)
        .map(|k| {
            if k + 1 == count {
                end
            } else {
                start + step * T::from_usize_lossy(k)
            }
        })
        .collect())
}
