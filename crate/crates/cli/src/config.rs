//! TOML run configurations. Every table rejects unknown keys.

use std::path::Path;

use backflow_core::numerics::MomentumGrid;
use backflow_core::states::{GaussianComponent, GaussianSuperposition, PhaseConvention};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Spectrum(SpectrumConfig),
    SweepSmearing(SweepConfig),
    Gaussian(GaussianConfig),
    AnalyticState(AnalyticConfig),
    Measure(MeasureConfig),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Spectrum(_) => "spectrum",
            RunConfig::SweepSmearing(_) => "sweep-smearing",
            RunConfig::Gaussian(_) => "gaussian",
            RunConfig::AnalyticState(_) => "analytic-state",
            RunConfig::Measure(_) => "measure",
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            RunConfig::Spectrum(c) => {
                c.grid.build()?;
                if c.refinement_steps > 0 {
                    c.grid.coarsened(c.refinement_steps)?;
                }
                positive("bounds_tol", c.bounds_tol)?;
                non_negative("a", c.a)
            }
            RunConfig::SweepSmearing(c) => {
                c.grid.build()?;
                if c.a.is_empty() {
                    return Err(config_err("a must list at least one value"));
                }
                c.a.iter().try_for_each(|&a| non_negative("a", a))
            }
            RunConfig::Gaussian(c) => {
                c.state.build()?;
                c.times.check()
            }
            RunConfig::AnalyticState(c) => {
                positive("a", c.a)?;
                positive("b", c.b)?;
                positive("s_max", c.s_max)?;
                if c.s_count < 2 {
                    return Err(config_err("s_count must be at least 2"));
                }
                if let Some([s1, s2]) = c.window {
                    if !(s1 <= s2) || s1.abs() > c.s_max || s2.abs() > c.s_max {
                        return Err(config_err("window must satisfy -s_max <= s1 <= s2 <= s_max"));
                    }
                }
                if let Some(l) = &c.landscape {
                    if l.a.is_empty() || l.b.is_empty() {
                        return Err(config_err("landscape needs at least one a and one b"));
                    }
                    l.a.iter()
                        .chain(&l.b)
                        .try_for_each(|&v| positive("landscape value", v))?;
                }
                Ok(())
            }
            RunConfig::Measure(c) => {
                c.state.build()?;
                for &v in std::iter::once(&c.v0).chain(&c.weak_limit_v0) {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(config_err(format!("V0 must be > 0, got {v}")));
                    }
                }
                positive("dt", c.dt)?;
                positive("duration", c.duration)?;
                positive("noise_threshold", c.noise_threshold)?;
                if !c.t_start.is_finite() {
                    return Err(config_err("t_start must be finite"));
                }
                if !(c.grid.x_min < 0.0 && c.grid.x_max > 0.0 && c.grid.n >= 16) {
                    return Err(config_err("grid must straddle x = 0 with at least 16 points"));
                }
                Ok(())
            }
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_err(format!("{name} must be non-negative, got {v}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GridConfig {
    Uniform {
        panels: usize,
        points_per_panel: usize,
        u_max: f64,
    },
    Oscillatory {
        low_panels: usize,
        high_panels: usize,
        points_per_panel: usize,
        u_max: f64,
    },
}

impl GridConfig {
    pub fn build(&self) -> Result<MomentumGrid<f64>, CliError> {
        let grid = match *self {
            GridConfig::Uniform {
                panels,
                points_per_panel,
                u_max,
            } => MomentumGrid::composite(panels, points_per_panel, u_max),
            GridConfig::Oscillatory {
                low_panels,
                high_panels,
                points_per_panel,
                u_max,
            } => MomentumGrid::oscillatory(low_panels, high_panels, points_per_panel, u_max),
        };
        grid.map_err(|e| config_err(format!("grid: {e}")))
    }

    /// The grid with `2^k` times fewer panels and `u_max / 2^(k/2)`, for `k = steps, ..., 1`.
    ///
    /// Halving the panels while shrinking `u_max` by `√2` keeps the number of
    /// nodes per oscillation of `cos(u²)` fixed.
    pub fn coarsened(&self, steps: usize) -> Result<Vec<GridConfig>, CliError> {
        let GridConfig::Oscillatory {
            low_panels,
            high_panels,
            points_per_panel,
            u_max,
        } = *self
        else {
            return Err(config_err("refinement needs the oscillatory layout"));
        };
        let div = 1usize << steps;
        if low_panels % div != 0 || high_panels % div != 0 {
            return Err(config_err(format!(
                "refinement_steps = {steps} needs panel counts divisible by {div}"
            )));
        }
        let coarse: Vec<GridConfig> = (1..=steps)
            .rev()
            .map(|k| GridConfig::Oscillatory {
                low_panels: low_panels >> k,
                high_panels: high_panels >> k,
                points_per_panel,
                u_max: u_max / 2f64.powf(k as f64 / 2.0),
            })
            .collect();
        for g in &coarse {
            g.build()?;
        }
        Ok(coarse)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "default_bounds_tol")]
    pub bounds_tol: f64,
    /// Extra coarser solves reported as a convergence sequence.
    #[serde(default)]
    pub refinement_steps: usize,
}

fn default_bounds_tol() -> f64 {
    backflow_core::spectral::DEFAULT_BOUNDS_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: GridConfig,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    ComovingPhase,
    SchrodingerExact,
}

impl From<Convention> for PhaseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::ComovingPhase => PhaseConvention::ComovingPhase,
            Convention::SchrodingerExact => PhaseConvention::SchrodingerExact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub amplitude: f64,
    pub momentum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianStateConfig {
    pub sigma: f64,
    #[serde(default)]
    pub x0: f64,
    pub phase_convention: Convention,
    pub components: Vec<ComponentConfig>,
}

impl GaussianStateConfig {
    pub fn build(&self) -> Result<GaussianSuperposition<f64>, CliError> {
        let comps = self
            .components
            .iter()
            .map(|c| GaussianComponent {
                amplitude: c.amplitude,
                momentum: c.momentum,
            })
            .collect();
        GaussianSuperposition::new(comps, self.sigma, self.x0, self.phase_convention.into())
            .map_err(|e| config_err(format!("state: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Sampling {
    fn check(&self) -> Result<(), CliError> {
        if !(self.start < self.end) || !self.start.is_finite() || !self.end.is_finite() || self.count < 2 {
            return Err(config_err("times need start < end and count >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub state: GaussianStateConfig,
    pub times: Sampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticConfig {
    pub a: f64,
    pub b: f64,
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    pub s_count: usize,
    /// Points used to locate the backflow window inside `(-1, 1)`.
    #[serde(default = "default_window_samples")]
    pub window_samples: usize,
    /// Extra flux interval `[s1, s2]` reported in the summary.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    #[serde(default)]
    pub landscape: Option<LandscapeConfig>,
}

fn default_s_max() -> f64 {
    backflow_core::states::DEFAULT_S_MAX
}

fn default_window_samples() -> usize {
    401
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpatialGridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub v0: f64,
    /// Absorber strengths for the weak-limit comparison; may be empty.
    #[serde(default)]
    pub weak_limit_v0: Vec<f64>,
    pub dt: f64,
    pub t_start: f64,
    pub duration: f64,
    #[serde(default = "default_noise_threshold")]
    pub noise_threshold: f64,
    pub grid: SpatialGridConfig,
    pub state: GaussianStateConfig,
}

fn default_noise_threshold() -> f64 {
    backflow_core::measure::DEFAULT_NOISE_THRESHOLD
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPECTRUM: &str = r#"
command = "spectrum"
refinement_steps = 2
[grid]
layout = "oscillatory"
low_panels = 16
high_panels = 200
points_per_panel = 10
u_max = 40.0
"#;

    #[test]
    fn parses_spectrum() {
        let cfg = RunConfig::from_toml(SPECTRUM).unwrap();
        assert_eq!(cfg.command(), "spectrum");
        let RunConfig::Spectrum(s) = cfg else { panic!() };
        assert_eq!(s.bounds_tol, 2e-3);
        let coarse = s.grid.coarsened(2).unwrap();
        assert_eq!(coarse.len(), 2);
        assert!(
            matches!(coarse[0], GridConfig::Oscillatory { low_panels: 4, high_panels: 50, u_max, .. } if (u_max - 20.0).abs() < 1e-12)
        );
    }

    #[test]
    fn rejects_unknown_keys_everywhere() {
        let top = SPECTRUM.replace("refinement_steps = 2", "refinement_steps = 2\nbogus = 1");
        assert!(matches!(RunConfig::from_toml(&top), Err(CliError::Config(_))));
        let nested = SPECTRUM.replace("u_max = 40.0", "u_max = 40.0\numax = 3");
        assert!(RunConfig::from_toml(&nested).is_err());
        assert!(RunConfig::from_toml("command = \"nope\"").is_err());
    }

    #[test]
    fn refinement_needs_divisible_panels() {
        let bad = SPECTRUM.replace("low_panels = 16", "low_panels = 6");
        assert!(RunConfig::from_toml(&bad).is_err());
    }
}
