use backflow_core::measure::{
    deconvolve_with, evolve_from, weak_limit_compare, EvolutionParams, MeasurementRun, SpatialGrid,
};
use backflow_core::states::GaussianSuperposition;
use num_complex::Complex;
use serde_json::{json, Value};

use super::{object, real};
use crate::config::MeasureConfig;
use crate::error::CliError;
use crate::output::{Csv, OutputDir};

/// `⟨p²/2⟩` of the sampled state.
fn mean_energy(state: &GaussianSuperposition<f64>, grid: &SpatialGrid<f64>, t: f64) -> f64 {
    let (mut kinetic, mut norm) = (0.0, 0.0);
    for x in grid.points() {
        kinetic += 0.5 * state.wavefunction_dx(x, t).norm_sqr();
        norm += state.wavefunction(x, t).norm_sqr();
    }
    kinetic / norm
}

pub fn measure(c: &MeasureConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let state = c.state.build()?;
    let grid = SpatialGrid::new(c.grid.x_min, c.grid.x_max, c.grid.n)?;
    let psi0: Vec<Complex<f64>> = grid.sample(|x| state.wavefunction(x, c.t_start));
    let evolve = |v0: f64| -> Result<MeasurementRun<f64>, CliError> {
        let params = EvolutionParams {
            v0,
            dt: c.dt,
            duration: c.duration,
            t_start: c.t_start,
        };
        Ok(evolve_from(&psi0, &grid, &params)?)
    };

    let run = evolve(c.v0)?;
    let free = state.current_trace(run.times())?;
    let decon = deconvolve_with(run.arrival(), c.v0, c.noise_threshold)?;
    if decon.noisy {
        log::warn!(
            "deconvolution is noise dominated (roughness {:.3e})",
            decon.roughness
        );
    }

    let t_col = ("t", "hbar=m=1");
    let mut surv = Csv::new(&[t_col, ("survival", "-")]);
    for (&t, &n) in run.times().iter().zip(run.survival()) {
        surv.row(&[t.into(), n.into()]);
    }
    out.csv("survival.csv", &surv)?;
    let mut arr = Csv::new(&[t_col, ("arrival_density", "hbar=m=1")]);
    for (&t, &p) in run.times().iter().zip(run.arrival().values()) {
        arr.row(&[t.into(), p.into()]);
    }
    out.csv("arrival.csv", &arr)?;
    let mut dec = Csv::new(&[
        t_col,
        ("deconvolved_current", "hbar=m=1"),
        ("free_current", "hbar=m=1"),
    ]);
    for ((&t, &j), &f) in run.times().iter().zip(decon.trace.values()).zip(free.values()) {
        dec.row(&[t.into(), j.into(), f.into()]);
    }
    out.csv("deconvolved.csv", &dec)?;

    let mut weak = Vec::new();
    for &v0 in &c.weak_limit_v0 {
        let r = if v0 == c.v0 {
            weak_limit_compare(&run, &free, v0)?
        } else {
            let other = evolve(v0)?;
            weak_limit_compare(&other, &state.current_trace(other.times())?, v0)?
        };
        weak.push((v0, r));
    }
    let mut by_v0 = weak.clone();
    by_v0.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decreasing = by_v0
        .windows(2)
        .all(|w| w[1].1.rms_over_peak() < w[0].1.rms_over_peak());
    let weak: Vec<Value> = weak
        .iter()
        .map(|(v0, r)| {
            object([
                ("v0", real(*v0)),
                ("rms_over_peak", real(r.rms_over_peak())),
                ("max_over_peak", real(r.max_over_peak())),
                ("samples", json!(r.samples)),
            ])
        })
        .collect();

    let (i, dmin) = decon
        .trace
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    let free_min = free
        .min()
        .map_or(Value::Null, |(t, v)| object([("t", real(t)), ("value", real(v))]));
    let survival = run.survival();

    Ok(object([
        ("v0", real(c.v0)),
        ("mean_energy", real(mean_energy(&state, &grid, c.t_start))),
        (
            "deconvolved_min",
            object([("t", real(run.times()[i])), ("value", real(dmin))]),
        ),
        ("free_current_min", free_min),
        ("arrival_min", real(run.arrival().min())),
        ("arrival_peak", real(run.arrival().peak())),
        ("total_absorbed", real(run.arrival().total())),
        ("final_survival", real(survival[survival.len() - 1])),
        ("boundary_mass", real(run.boundary_mass())),
        ("p_max", real(run.p_max())),
        ("expectation_mismatch", real(run.expectation_mismatch())),
        ("roughness", real(decon.roughness)),
        ("noisy", json!(decon.noisy)),
        ("weak_limit", Value::Array(weak)),
        ("weak_limit_decreasing_with_v0", json!(decreasing)),
    ]))
}
