use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cvtele_core::StrategyRegistry;

use crate::error::{CliError, Result};
use crate::observables::{Evaluation, ObservableRegistry};
use crate::scenario::{Point, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub version: String,
    pub scenario: Scenario,
    /// Sweep axis name followed by one name per observable per resource.
    pub columns: Vec<String>,
    /// Column-major values; `data[0]` is the sweep axis.
    pub data: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
    }
}

fn evaluate_point(scenario: &Scenario, point: &Point, columns: &[String]) -> Result<Vec<f64>> {
    let strategies = StrategyRegistry::with_defaults();
    let observables = ObservableRegistry::with_defaults();
    let input = point.input().map_err(|e| CliError::config(e.to_string()))?;
    let params = point
        .params()
        .map_err(|e| CliError::config(e.to_string()))?;
    let ctx = point.context(params);

    let mut resolved = Vec::with_capacity(scenario.resources.len());
    for name in &scenario.resources {
        let res = strategies
            .lookup(name)
            .and_then(|s| s.resolve(&ctx))
            .map_err(|e| CliError::compute(format!("resource `{name}`: {e}")))?;
        resolved.push(res);
    }

    let mut row = Vec::with_capacity(columns.len());
    for out in &scenario.outputs {
        for obs in observables.expand(out)? {
            for (res, name) in resolved.iter().zip(&scenario.resources) {
                let ev = Evaluation {
                    input: &input,
                    resource: res,
                    params: &params,
                    context: &ctx,
                };
                let v = obs
                    .evaluate(&ev)
                    .map_err(|e| CliError::compute(format!("{}:{name}: {e}", obs.name())))?;
                if !v.is_finite() {
                    return Err(CliError::compute(format!(
                        "{}:{name} evaluated to {v}",
                        obs.name()
                    )));
                }
                row.push(v);
            }
        }
    }
    Ok(row)
}

/// Evaluates every requested observable at every sweep point. Points are
/// computed in parallel; the result is in sweep order and does not depend on
/// the number of threads.
pub fn run_scenario(scenario: &Scenario) -> Result<SweepResult> {
    scenario.validate()?;
    let columns = scenario.columns()?;
    let values = scenario.sweep.values();
    let rows: Vec<Vec<f64>> = scenario
        .points()
        .par_iter()
        .zip(values.par_iter())
        .map(|(p, v)| {
            evaluate_point(scenario, p, &columns).map_err(|e| match e {
                CliError::Compute(msg) => {
                    CliError::Compute(format!("at {} = {v}: {msg}", scenario.sweep.axis))
                }
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    let mut data = vec![values];
    for j in 0..columns.len() {
        data.push(rows.iter().map(|r| r[j]).collect());
    }
    let mut all = vec![scenario.sweep.axis.clone()];
    all.extend(columns);
    Ok(SweepResult {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.clone(),
        columns: all,
        data,
    })
}

/// [`run_scenario`] on a dedicated pool of `jobs` threads.
pub fn run_scenario_with_jobs(scenario: &Scenario, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {jobs} worker threads: {e}")))?;
    pool.install(|| run_scenario(scenario))
}
