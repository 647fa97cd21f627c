//! One module per command. Each writes its CSV files and returns the
//! command-specific `results` object of the summary.

mod analytic;
mod gaussian;
mod measure;
mod spectrum;
mod sweep;

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::OutputDir;

pub use analytic::analytic_state;
pub use gaussian::gaussian;
pub use measure::measure;
pub use spectrum::spectrum;
pub use sweep::sweep_smearing;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `cfg` and writes its files plus `summary.json` into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let start = Instant::now();
    let mut dir = OutputDir::create(out)?;
    let results = match cfg {
        RunConfig::Spectrum(c) => spectrum(c, &mut dir)?,
        RunConfig::SweepSmearing(c) => sweep_smearing(c, &mut dir)?,
        RunConfig::Gaussian(c) => gaussian(c, &mut dir)?,
        RunConfig::AnalyticState(c) => analytic_state(c, &mut dir)?,
        RunConfig::Measure(c) => measure(c, &mut dir)?,
    };
    let mut files = dir.written().to_vec();
    files.push("summary.json".into());
    let summary = json!({
        "command": cfg.command(),
        "config": serde_json::to_value(cfg).expect("configs serialize"),
        "version": VERSION,
        "wall_clock_seconds": start.elapsed().as_secs_f64(),
        "files": files,
        "results": results,
    });
    dir.json("summary.json", &summary)
}

/// A JSON object from `(key, value)` pairs.
pub(crate) fn object<const N: usize>(pairs: [(&str, Value); N]) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k.to_owned(), v))
            .collect::<Map<_, _>>(),
    )
}

/// `NaN`/infinite values become `null`.
pub(crate) fn real(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
