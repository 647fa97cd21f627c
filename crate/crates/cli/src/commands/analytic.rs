use backflow_core::states::{
    default_analytic_grid, make_phi_a, most_negative_window, uniform_times, CurrentEvaluator, FluxWindow,
    MomentumState,
};
use serde_json::{json, Value};

use super::gaussian::window_json;
use super::{object, real};
use crate::config::AnalyticConfig;
use crate::error::CliError;
use crate::output::{Csv, OutputDir};

/// Distance from `s = ±1` inside which samples are dropped: the current
/// diverges there.
const SINGULAR_GAP: f64 = 1e-9;

fn backflow_window(state: &MomentumState<f64>, samples: usize) -> Result<FluxWindow<f64>, CliError> {
    let ev = CurrentEvaluator::new(state);
    let edge = 1.0 - 1e-3;
    let trace = ev.trace(&uniform_times(-edge, edge, samples.max(2))?)?;
    let f = |s: f64| ev.current(s);
    Ok(most_negative_window(&trace, Some(&f))?)
}

pub fn analytic_state(c: &AnalyticConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let state = make_phi_a(c.a, c.b, default_analytic_grid()?)?;
    let ev = CurrentEvaluator::with_s_max(&state, c.s_max)?;

    let mut phi = Csv::new(&[("u", "-"), ("phi", "-")]);
    for (&u, &p) in state.grid().nodes().iter().zip(state.samples()) {
        phi.row(&[u.into(), p.into()]);
    }
    out.csv("phi.csv", &phi)?;

    let times: Vec<f64> = uniform_times(-c.s_max, c.s_max, c.s_count)?
        .into_iter()
        .filter(|s| (s.abs() - 1.0).abs() > SINGULAR_GAP)
        .collect();
    let trace = ev.trace(&times)?;
    let mut cur = Csv::new(&[("s", "-"), ("j", "-")]);
    for (&s, &j) in times.iter().zip(trace.values()) {
        cur.row(&[s.into(), j.into()]);
    }
    out.csv("current.csv", &cur)?;

    let window = backflow_window(&state, c.window_samples)?;
    let full = ev.flux(-1.0, 1.0)?.flux;
    let custom = match c.window {
        Some([s1, s2]) => window_json(&ev.flux(s1, s2)?),
        None => Value::Null,
    };

    let landscape = match &c.landscape {
        None => Value::Null,
        Some(l) => {
            let mut csv = Csv::new(&[("a", "-"), ("b", "-"), ("flux", "-"), ("t1", "-"), ("t2", "-")]);
            let mut best: Option<(f64, f64, f64)> = None;
            for &a in &l.a {
                for &b in &l.b {
                    let s = make_phi_a(a, b, default_analytic_grid()?)?;
                    let w = backflow_window(&s, c.window_samples)?;
                    log::info!("a = {a}, b = {b}: window flux {:e}", w.flux);
                    csv.row(&[a.into(), b.into(), w.flux.into(), w.t1.into(), w.t2.into()]);
                    if best.is_none_or(|(_, _, f)| w.flux < f) {
                        best = Some((a, b, w.flux));
                    }
                }
            }
            out.csv("flux_landscape.csv", &csv)?;
            let (a, b, f) = best.expect("landscape is non-empty");
            object([("a", real(a)), ("b", real(b)), ("flux", real(f))])
        }
    };

    Ok(object([
        ("a", real(c.a)),
        ("b", real(c.b)),
        ("norm_constant", real(state.norm_constant())),
        ("backflow_window", window_json(&window)),
        ("flux_minus1_to_1", real(full)),
        ("custom_window", custom),
        ("landscape_minimum", landscape),
        ("samples_dropped_near_singularity", json!(c.s_count - times.len())),
    ]))
}
