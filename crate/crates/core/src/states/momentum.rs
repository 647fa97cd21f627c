//! Positive-momentum states `φ(u)` on the rescaled half-line.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, BackflowError, Result};
use crate::numerics::{fresnel_c, sample, MomentumGrid, OscillatoryTail, TailMode, TailSpec};
use crate::scalar::Real;

/// Arbitrary (unnormalized) wavefunction sampler.
pub type Sampler<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub enum StateForm<T> {
    /// `a e^{-bu} + 1/2 - C(u)`.
    AnalyticA {
        a: T,
        b: T,
    },
    /// Values known only at the grid nodes.
    Tabulated,
    Custom(Sampler<T>),
}

impl<T: fmt::Debug> fmt::Debug for StateForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateForm::AnalyticA { a, b } => f.debug_struct("AnalyticA").field("a", a).field("b", b).finish(),
            StateForm::Tabulated => f.write_str("Tabulated"),
            StateForm::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A normalized wavefunction sampled on a [`MomentumGrid`], with an optional
/// analytic model of its tail beyond the grid.
#[derive(Debug, Clone)]
pub struct MomentumState<T> {
    form: StateForm<T>,
    grid: MomentumGrid<T>,
    values: Vec<T>,
    tail: TailSpec<T>,
    norm_constant: T,
}

/// Unnormalized `φ_A(u) = a e^{-bu} + 1/2 - C(u)`.
pub fn phi_a_unnormalized<T: Real>(a: T, b: T, u: T) -> T {
    a * (-b * u).exp() + T::lit(0.5) - fresnel_c(u)
}

/// Large-`u` law of the unnormalized `φ_A`: `1/2 - C(u) ≈ -sin(u²) / (√(2π) u)`.
pub fn phi_a_tail_law<T: Real>() -> OscillatoryTail<T> {
    OscillatoryTail {
        cos_coeff: T::zero(),
        sin_coeff: -(T::one() / (T::lit(2.0) * T::PI()).sqrt()),
    }
}

/// Grid used for `φ_A` when the caller does not supply one.
pub fn default_analytic_grid<T: Real>() -> Result<MomentumGrid<T>> {
    MomentumGrid::oscillatory(8, 120, 12, T::lit(20.0))
}

/// Normalized `φ_A` on `grid`, with its asymptotic tail accounted for.
pub fn make_phi_a<T: Real>(a: T, b: T, grid: MomentumGrid<T>) -> Result<MomentumState<T>> {
    MomentumState::analytic_a(a, b, grid)?.with_asymptotic_tail()
}

impl<T: Real> MomentumState<T> {
    /// `φ_A` normalized on the truncated grid (no tail model).
    pub fn analytic_a(a: T, b: T, grid: MomentumGrid<T>) -> Result<Self> {
        if !(a >= T::zero()) {
            return Err(invalid(format!("phi_A needs a >= 0, got {a}")));
        }
        if !(b > T::zero()) {
            return Err(invalid(format!("phi_A needs b > 0, got {b}")));
        }
        let raw = sample(&|u| phi_a_unnormalized(a, b, u), &grid)?;
        Self::normalize(StateForm::AnalyticA { a, b }, grid, raw, TailMode::Truncate)
    }

    /// State known only through its values at the grid nodes.
    pub fn tabulated(grid: MomentumGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("tabulated state needs one value per grid node"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(BackflowError::Domain(
                "tabulated state has non-finite values".into(),
            ));
        }
        Self::normalize(StateForm::Tabulated, grid, values, TailMode::Truncate)
    }

    pub fn custom(sampler: Sampler<T>, grid: MomentumGrid<T>) -> Result<Self> {
        let raw = sample(&|u| sampler(u), &grid)?;
        Self::normalize(StateForm::Custom(sampler), grid, raw, TailMode::Truncate)
    }

    fn normalize(form: StateForm<T>, grid: MomentumGrid<T>, raw: Vec<T>, mode: TailMode<T>) -> Result<Self> {
        let mut norm_sq: T = raw.iter().zip(grid.weights()).map(|(&v, &w)| w * v * v).sum();
        if let TailMode::AsymptoticCorrection(law) = mode {
            norm_sq = norm_sq + law.norm_sq_beyond(grid.u_max())?;
        }
        if !(norm_sq > T::zero()) || !norm_sq.is_finite() {
            return Err(BackflowError::Domain("state has zero or non-finite norm".into()));
        }
        let n = norm_sq.sqrt().recip();
        let tail = match mode {
            TailMode::Truncate => TailSpec::truncate(grid.u_max())?,
            TailMode::AsymptoticCorrection(law) => {
                TailSpec::new(TailMode::AsymptoticCorrection(law.scaled(n)), grid.u_max())?
            }
        };
        let values = raw.into_iter().map(|v| v * n).collect();
        Ok(Self {
            form,
            grid,
            values,
            tail,
            norm_constant: n,
        })
    }

    fn raw_values(&self) -> Vec<T> {
        self.values.iter().map(|&v| v / self.norm_constant).collect()
    }

    /// Re-normalizes with `mode` describing the tail of the unnormalized function.
    pub fn with_tail(self, mode: TailMode<T>) -> Result<Self> {
        let raw = self.raw_values();
        Self::normalize(self.form, self.grid, raw, mode)
    }

    /// Attaches the known tail law of `φ_A`; other forms have none.
    pub fn with_asymptotic_tail(self) -> Result<Self> {
        match self.form {
            StateForm::AnalyticA { .. } => self.with_tail(TailMode::AsymptoticCorrection(phi_a_tail_law())),
            _ => Err(invalid("only phi_A has a built-in tail law")),
        }
    }

    pub fn form(&self) -> &StateForm<T> {
        &self.form
    }

    pub fn grid(&self) -> &MomentumGrid<T> {
        &self.grid
    }

    /// Normalized samples at the grid nodes.
    pub fn samples(&self) -> &[T] {
        &self.values
    }

    pub fn tail(&self) -> &TailSpec<T> {
        &self.tail
    }

    /// Factor `N` multiplying the unnormalized wavefunction.
    pub fn norm_constant(&self) -> T {
        self.norm_constant
    }

    /// Whether the state can be sampled away from its grid nodes.
    pub fn is_refinable(&self) -> bool {
        !matches!(self.form, StateForm::Tabulated)
    }

    /// `∫|φ|²` under the grid rule plus the tail model.
    pub fn norm_sq(&self) -> Result<T> {
        let mut total: T = self
            .values
            .iter()
            .zip(self.grid.weights())
            .map(|(&v, &w)| w * v * v)
            .sum();
        if let TailMode::AsymptoticCorrection(law) = self.tail.mode {
            total = total + law.norm_sq_beyond(self.tail.u_max)?;
        }
        Ok(total)
    }

    /// Unnormalized value, for analytic and custom forms.
    pub fn unnormalized(&self, u: T) -> Result<T> {
        match &self.form {
            StateForm::AnalyticA { a, b } => Ok(phi_a_unnormalized(*a, *b, u)),
            StateForm::Custom(f) => Ok(f(u)),
            StateForm::Tabulated => Ok(self.value(u)? / self.norm_constant),
        }
    }

    /// Normalized `φ(u)`. Tabulated states interpolate linearly between nodes.
    pub fn value(&self, u: T) -> Result<T> {
        match &self.form {
            StateForm::Tabulated => {
                let nodes = self.grid.nodes();
                let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
                if !(u >= first && u <= last) {
                    return Err(BackflowError::Domain(format!(
                        "tabulated state is only known on [{first}, {last}], asked for u = {u}"
                    )));
                }
                let k = nodes.partition_point(|&x| x <= u);
                if k == 0 || k >= nodes.len() {
                    return Ok(self.values[k.min(nodes.len()) - 1]);
                }
                let (x0, x1) = (nodes[k - 1], nodes[k]);
                let f = (u - x0) / (x1 - x0);
                Ok(self.values[k - 1] + (self.values[k] - self.values[k - 1]) * f)
            }
            _ => Ok(self.unnormalized(u)? * self.norm_constant),
        }
    }

    /// The same state sampled on another grid, keeping the normalization constant.
    pub fn resampled(&self, grid: MomentumGrid<T>) -> Result<Self> {
        let raw = match &self.form {
            StateForm::AnalyticA { a, b } => sample(&|u| phi_a_unnormalized(*a, *b, u), &grid)?,
            StateForm::Custom(f) => sample(&|u| f(u), &grid)?,
            StateForm::Tabulated => return Err(invalid("tabulated states cannot be resampled")),
        };
        let n = self.norm_constant;
        let tail = TailSpec::new(self.tail.mode, grid.u_max())?;
        Ok(Self {
            form: self.form.clone(),
            values: raw.into_iter().map(|v| v * n).collect(),
            grid,
            tail,
            norm_constant: n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> MomentumGrid<f64> {
        default_analytic_grid().unwrap()
    }

    #[test]
    fn phi_a_value_at_origin() {
        assert!((phi_a_unnormalized(0.6f64, 2.8, 0.0) - 1.1).abs() < 1e-15);
    }

    #[test]
    fn phi_a_is_normalized() {
        let s = make_phi_a(0.6, 2.8, grid()).unwrap();
        assert!((s.norm_sq().unwrap() - 1.0).abs() < 1e-8);
        let t = MomentumState::analytic_a(0.6, 2.8, grid()).unwrap();
        assert!((t.norm_sq().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_a_asymptotic_form() {
        let s = make_phi_a(0.6, 2.8, grid()).unwrap();
        let mut ratios = Vec::new();
        for k in 0..400 {
            let u = 8.0 + 0.02 * k as f64;
            let sn = (u * u).sin();
            if sn.abs() > 0.5 {
                ratios.push(s.value(u).unwrap() * u / sn);
            }
        }
        let expect = -s.norm_constant() / (2.0 * std::f64::consts::PI).sqrt();
        for r in ratios {
            assert!((r - expect).abs() < 2e-2 * expect.abs(), "{r} vs {expect}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MomentumState::analytic_a(0.6, 0.0, grid()).is_err());
        assert!(MomentumState::analytic_a(-0.1, 1.0, grid()).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_keeps_unit_norm() {
        let g = MomentumGrid::composite(4, 4, 4.0f64).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|u| (-u).exp()).collect();
        let s = MomentumState::tabulated(g.clone(), vals).unwrap();
        assert!((s.norm_sq().unwrap() - 1.0).abs() < 1e-14);
        let u = g.nodes()[3];
        assert!((s.value(u).unwrap() - s.samples()[3]).abs() < 1e-15);
        assert!(s.value(10.0).is_err());
        assert!(s.resampled(g).is_err());
    }

    #[test]
    fn resampling_keeps_normalization_constant() {
        let s = make_phi_a(0.6, 2.8, grid()).unwrap();
        let fine = s.resampled(s.grid().refined(2).unwrap()).unwrap();
        assert_eq!(fine.norm_constant(), s.norm_constant());
        assert!((fine.norm_sq().unwrap() - 1.0).abs() < 1e-8);
    }
}
