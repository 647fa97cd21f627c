use backflow_core::spectral::{
    build_operator, eigen_decompose, lowest_eigenvalue, spectrum_bounds_check, BoundSide, FluxKernel, C_BM,
};
use backflow_core::states::CurrentEvaluator;
use serde_json::{json, Value};

use super::{object, real};
use crate::config::{GridConfig, SpectrumConfig};
use crate::error::CliError;
use crate::output::{Csv, OutputDir};

fn resolution(g: &GridConfig, nodes: usize) -> Value {
    let mut v = serde_json::to_value(g).expect("grid configs serialize");
    v["nodes"] = json!(nodes);
    v
}

pub fn spectrum(c: &SpectrumConfig, out: &mut OutputDir) -> Result<Value, CliError> {
    let kernel = FluxKernel::smeared(c.a)?;
    let mut sequence = Vec::new();
    if c.refinement_steps > 0 {
        for g in c.grid.coarsened(c.refinement_steps)? {
            let grid = g.build()?;
            let lambda = lowest_eigenvalue(&build_operator(&grid, &kernel)?)?;
            log::info!("{} nodes: lambda_min = {lambda:e}", grid.len());
            sequence.push((resolution(&g, grid.len()), lambda));
        }
    }

    let grid = c.grid.build()?;
    let result = eigen_decompose(&build_operator(&grid, &kernel)?)?;
    sequence.push((resolution(&c.grid, grid.len()), result.lowest));

    let mut eig = Csv::new(&[("index", "-"), ("lambda", "-")]);
    for (i, &l) in result.eigenvalues.iter().enumerate() {
        eig.row(&[i.into(), l.into()]);
    }
    out.csv("eigenvalues.csv", &eig)?;
    let mut phi = Csv::new(&[("u", "-"), ("phi", "-")]);
    for (&u, &p) in result.phi_max.grid().nodes().iter().zip(result.phi_max.samples()) {
        phi.row(&[u.into(), p.into()]);
    }
    out.csv("phi_max.csv", &phi)?;

    let bounds = spectrum_bounds_check(&result, c.bounds_tol);
    let violations: Vec<Value> = bounds
        .violations
        .iter()
        .map(|v| {
            let side = match v.side {
                BoundSide::Below => "below",
                BoundSide::Above => "above",
            };
            object([
                ("index", json!(v.index)),
                ("value", real(v.value)),
                ("side", json!(side)),
            ])
        })
        .collect();

    let flux = if grid.u_max() > 1.0 && grid.len() > 1 {
        real(CurrentEvaluator::new(&result.phi_max).flux(-1.0, 1.0)?.flux)
    } else {
        Value::Null
    };

    let lambdas: Vec<f64> = sequence.iter().map(|(_, l)| *l).collect();
    let toward = lambdas
        .windows(2)
        .all(|w| w[1] <= w[0] && (w[1] + C_BM).abs() <= (w[0] + C_BM).abs());
    let refinement: Vec<Value> = sequence
        .into_iter()
        .map(|(res, l)| object([("resolution", res), ("lambda_min", real(l))]))
        .collect();

    Ok(object([
        ("lambda_min", real(result.lowest)),
        ("a", real(c.a)),
        ("c_bm", real(C_BM)),
        ("resolution", resolution(&c.grid, grid.len())),
        (
            "bounds",
            object([
                ("lower", real(bounds.lower)),
                ("upper", real(bounds.upper)),
                ("tol", real(bounds.tol)),
                ("ok", json!(bounds.is_ok())),
                ("violations", Value::Array(violations)),
            ]),
        ),
        ("phi_max_flux_minus1_to_1", flux),
        ("refinement", Value::Array(refinement)),
        ("refinement_monotone_toward_c_bm", json!(toward)),
    ]))
}
