//! Current traces and their negative-flux windows.

use crate::error::{invalid, Result};
use crate::numerics::{integrate_adaptive, AdaptiveOptions};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnits {
    /// Rescaled time `s`, with the eigen-interval at `[-1, 1]`.
    DimensionlessS,
    /// Natural units `ħ = m = 1`.
    NaturalT,
}

impl TimeUnits {
    pub fn label(self) -> &'static str {
        match self {
            TimeUnits::DimensionlessS => "s",
            TimeUnits::NaturalT => "t",
        }
    }
}

/// Samples of a current `J` at strictly ascending times.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentTrace<T> {
    times: Vec<T>,
    values: Vec<T>,
    units: TimeUnits,
}

impl<T: Real> CurrentTrace<T> {
    pub fn new(times: Vec<T>, values: Vec<T>, units: TimeUnits) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("trace needs as many values as times"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("trace times must be strictly ascending"));
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

    /// Trapezoid-rule integral over the whole trace.
    pub fn integral(&self) -> T {
        trapezoid(&self.times, &self.values)
    }

    pub fn min(&self) -> Option<(T, T)> {
        self.times
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(T, T)>, (&t, &v)| match best {
                Some((_, bv)) if bv <= v => best,
                _ => Some((t, v)),
            })
    }
}

pub(crate) fn trapezoid<T: Real>(times: &[T], values: &[T]) -> T {
    let half = T::lit(0.5);
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| (t[1] - t[0]) * (v[0] + v[1]) * half)
        .sum()
}

/// Flux `∫_{t1}^{t2} J dt` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWindow<T> {
    pub t1: T,
    pub t2: T,
    pub flux: T,
}

impl<T: Real> FluxWindow<T> {
    pub fn new(t1: T, t2: T, flux: T) -> Result<Self> {
        if !(t1 <= t2) {
            return Err(invalid(format!("window start {t1} is after its end {t2}")));
        }
        Ok(Self { t1, t2, flux })
    }

    /// Zero-length, zero-flux window reported when nothing is negative.
    pub fn empty() -> Self {
        Self {
            t1: T::zero(),
            t2: T::zero(),
            flux: T::zero(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.t1 == self.t2 && self.flux == T::zero()
    }

    pub fn duration(&self) -> T {
        self.t2 - self.t1
    }
}

/// Exact current used to sharpen window endpoints and fluxes.
pub type CurrentFn<'a, T> = &'a (dyn Fn(T) -> Result<T> + Sync);

const BISECTION_STEPS: usize = 200;

fn bisect_crossing<T: Real>(f: CurrentFn<'_, T>, mut lo: T, mut hi: T, lo_negative: bool) -> Result<T> {
    let eps = T::epsilon() * T::lit(4.0) * (lo.abs() + hi.abs() + T::one());
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= eps {
            break;
        }
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid)? < T::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * T::lit(0.5))
}

fn linear_crossing<T: Real>(t0: T, v0: T, t1: T, v1: T) -> T {
    if v0 == v1 {
        return t0;
    }
    t0 + (t1 - t0) * v0 / (v0 - v1)
}

/// Every maximal run of negative current in the trace, in time order.
///
/// Without `current`, endpoints come from linear interpolation and fluxes from
/// the trapezoid rule on the samples. With it, endpoints are refined by
/// bisection and fluxes are integrated by adaptive Gauss–Legendre quadrature.
pub fn negative_windows<T: Real>(
    trace: &CurrentTrace<T>,
    current: Option<CurrentFn<'_, T>>,
) -> Result<Vec<FluxWindow<T>>> {
    let (ts, vs) = (trace.times(), trace.values());
    let n = ts.len();
    let mut windows = Vec::new();
    let mut i = 0;
    while i < n {
        if vs[i] >= T::zero() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && vs[i] < T::zero() {
            i += 1;
        }
        let end = i - 1;
        let t1 = if start == 0 {
            ts[0]
        } else {
            match current {
                Some(f) => bisect_crossing(f, ts[start - 1], ts[start], false)?,
                None => linear_crossing(ts[start - 1], vs[start - 1], ts[start], vs[start]),
            }
        };
        let t2 = if end + 1 == n {
            ts[n - 1]
        } else {
            match current {
                Some(f) => bisect_crossing(f, ts[end], ts[end + 1], true)?,
                None => linear_crossing(ts[end], vs[end], ts[end + 1], vs[end + 1]),
            }
        };
        let flux = match current {
            Some(f) => window_flux(f, t1, t2)?,
            None => {
                let open = if start == 0 { vs[0] } else { T::zero() };
                let close = if end + 1 == n { vs[n - 1] } else { T::zero() };
                let mut pts: Vec<(T, T)> = vec![(t1, open)];
                for (&t, &v) in ts[start..=end].iter().zip(&vs[start..=end]) {
                    if t > pts[pts.len() - 1].0 {
                        pts.push((t, v));
                    }
                }
                if t2 > pts[pts.len() - 1].0 {
                    pts.push((t2, close));
                }
                let (a, b): (Vec<T>, Vec<T>) = pts.into_iter().unzip();
                trapezoid(&a, &b)
            }
        };
        windows.push(FluxWindow::new(t1, t2, flux)?);
    }
    Ok(windows)
}

fn window_flux<T: Real>(f: CurrentFn<'_, T>, t1: T, t2: T) -> Result<T> {
    if t1 == t2 {
        return Ok(T::zero());
    }
    let opts = AdaptiveOptions {
        initial_panels: 4,
        points_per_panel: 16,
        abs_tol: T::lit(1e-12),
        rel_tol: T::lit(1e-10),
        max_doublings: 10,
        grade_left: false,
        grade_right: false,
    };
    Ok(integrate_adaptive(f, t1, t2, &opts)?.0)
}

/// The negative window with the most negative flux, or [`FluxWindow::empty`].
pub fn most_negative_window<T: Real>(
    trace: &CurrentTrace<T>,
    current: Option<CurrentFn<'_, T>>,
) -> Result<FluxWindow<T>> {
    if trace.is_empty() {
        return Err(invalid("cannot search an empty trace"));
    }
    let windows = negative_windows(trace, current)?;
    Ok(windows
        .into_iter()
        .fold(None, |best: Option<FluxWindow<T>>, w| match best {
            Some(b) if b.flux <= w.flux => Some(b),
            _ => Some(w),
        })
        .unwrap_or_else(FluxWindow::empty))
}
