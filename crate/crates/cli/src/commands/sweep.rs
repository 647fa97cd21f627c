use backflow_core::spectral::lambda_sweep;
use serde_json::{json, Value};

use super::{object, real};
use crate::config::SweepConfig;
use crate::error::CliError;
use crate::output::{Csv, OutputDir};

pub fn sweep_smearing(c: &SweepConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let grid = c.grid.build()?;
    let rows = lambda_sweep(&c.a, &grid)?;
    let mut csv = Csv::new(&[("a", "-"), ("lambda_min", "-"), ("a_squared_times_lambda", "-")]);
    for &(a, l) in &rows {
        csv.row(&[a.into(), l.into(), (a * a * l).into()]);
    }
    out.csv("lambda_a.csv", &csv)?;
    let monotone = rows.windows(2).all(|w| w[1].1 >= w[0].1);
    let table: Vec<Value> = rows
        .iter()
        .map(|&(a, l)| {
            object([
                ("a", real(a)),
                ("lambda_min", real(l)),
                ("a_squared_times_lambda", real(a * a * l)),
            ])
        })
        .collect();
    Ok(object([
        ("nodes", json!(grid.len())),
        ("rows", Value::Array(table)),
        ("monotone_non_decreasing", json!(monotone)),
    ]))
}
