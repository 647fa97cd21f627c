use backflow_core::states::{negative_windows, uniform_times, FluxWindow};
use serde_json::{json, Value};

use super::{object, real};
use crate::config::GaussianConfig;
use crate::error::CliError;
use crate::output::{Csv, OutputDir};

pub(crate) fn window_json(w: &FluxWindow<f64>) -> Value {
    object([("t1", real(w.t1)), ("t2", real(w.t2)), ("flux", real(w.flux))])
}

/// Largest `p[j] - p[i]` with `i < j`, as `(i, j, gain)`.
fn largest_gain(p: &[f64]) -> (usize, usize, f64) {
    let mut best = (0, 0, 0.0);
    let mut low = 0;
    for j in 1..p.len() {
        if p[j] - p[low] > best.2 {
            best = (low, j, p[j] - p[low]);
        }
        if p[j] < p[low] {
            low = j;
        }
    }
    best
}

pub fn gaussian(c: &GaussianConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let state = c.state.build()?;
    let times = uniform_times(c.times.start, c.times.end, c.times.count)?;
    let trace = state.current_trace(&times)?;
    let f = |t: f64| Ok(state.current(t));
    let windows = negative_windows(&trace, Some(&f))?;
    let p_left = times
        .iter()
        .map(|&t| state.prob_left(t))
        .collect::<Result<Vec<f64>, _>>()?;

    let mut cur = Csv::new(&[("t", "hbar=m=1"), ("j", "hbar=m=1")]);
    for (&t, &j) in times.iter().zip(trace.values()) {
        cur.row(&[t.into(), j.into()]);
    }
    out.csv("current.csv", &cur)?;
    let mut prob = Csv::new(&[("t", "hbar=m=1"), ("prob_left", "-")]);
    for (&t, &p) in times.iter().zip(&p_left) {
        prob.row(&[t.into(), p.into()]);
    }
    out.csv("prob_left.csv", &prob)?;
    let mut win = Csv::new(&[
        ("index", "-"),
        ("t1", "hbar=m=1"),
        ("t2", "hbar=m=1"),
        ("flux", "-"),
    ]);
    for (i, w) in windows.iter().enumerate() {
        win.row(&[i.into(), w.t1.into(), w.t2.into(), w.flux.into()]);
    }
    out.csv("windows.csv", &win)?;

    let most = windows
        .iter()
        .min_by(|a, b| a.flux.total_cmp(&b.flux))
        .map_or(Value::Null, window_json);
    let (i, j, gain) = largest_gain(&p_left);
    let gain = if gain > 0.0 {
        object([
            ("t1", real(times[i])),
            ("t2", real(times[j])),
            ("gain", real(gain)),
        ])
    } else {
        Value::Null
    };
    Ok(object([
        ("window_count", json!(windows.len())),
        ("most_negative_window", most),
        ("neg_momentum_prob", real(state.neg_momentum_prob())),
        ("largest_prob_left_gain", gain),
        ("total_flux", real(trace.integral())),
    ]))
}

#[cfg(test)]
mod tests {
    use super::largest_gain;

    #[test]
    fn gain_uses_earlier_minimum() {
        assert_eq!(largest_gain(&[0.5, 0.2, 0.4, 0.1, 0.35]), (3, 4, 0.35 - 0.1));
        assert_eq!(largest_gain(&[3.0, 2.0, 1.0]).2, 0.0);
    }
}
