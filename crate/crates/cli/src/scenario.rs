//! Scenario files: one TOML document describing the fixed parameters, the
//! swept axis, the resources to compare and the observables to record.
//!
//! ```toml
//! resources = ["sb-subopt", "pss", "twb"]
//! outputs = ["fidelity"]
//!
//! [input]
//! s_db = 5.0
//!
//! [channel]
//! tau = 0.1
//! r2 = 0.05
//!
//! [sweep]
//! axis = "r_db"
//! from = 0.0
//! to = 25.0
//! points = 101
//! ```

use std::f64::consts::PI;
use std::path::Path;

use cvtele_core::{db_to_natural, ChannelParams, InputState, ResourceContext, StrategyRegistry};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::observables::ObservableRegistry;

/// Parameters that a sweep may vary.
pub const AXES: &[&str] = &[
    "r_db", "s_db", "s_bar_db", "beta_re", "beta_im", "varphi", "phi_res", "delta", "theta", "tau",
    "n_th", "r2", "t", "g",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub resources: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub resource: ResourceSection,
    #[serde(default)]
    pub channel: ChannelSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    #[serde(default)]
    pub beta_re: f64,
    #[serde(default)]
    pub beta_im: f64,
    #[serde(default)]
    pub s_db: f64,
    #[serde(default)]
    pub varphi: f64,
}

impl Default for InputSection {
    fn default() -> Self {
        Self {
            beta_re: 0.0,
            beta_im: 0.0,
            s_db: 0.0,
            varphi: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSection {
    #[serde(default)]
    pub r_db: f64,
    #[serde(default = "default_phi_res")]
    pub phi_res: f64,
    #[serde(default = "default_s_bar_db")]
    pub s_bar_db: f64,
    /// Only used by `sb-free`.
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub theta: f64,
}

fn default_phi_res() -> f64 {
    PI
}

fn default_s_bar_db() -> f64 {
    cvtele_core::optimize::DEFAULT_S_BAR_DB
}

impl Default for ResourceSection {
    fn default() -> Self {
        Self {
            r_db: 0.0,
            phi_res: PI,
            s_bar_db: default_s_bar_db(),
            delta: 0.0,
            theta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainMode {
    /// `g = 1/T`, so that the effective gain `g T` is one.
    UnitEffective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gain {
    Fixed(f64),
    Mode(GainMode),
}

impl Default for Gain {
    fn default() -> Self {
        Gain::Mode(GainMode::UnitEffective)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    /// Beam-splitter reflectivity `R^2`; give this or `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    /// Beam-splitter transmissivity `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub n_th: f64,
    #[serde(default)]
    pub gain: Gain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepSection {
    /// Evenly spaced values, both ends included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Every scalar of a scenario at one sweep value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r_db: f64,
    pub s_db: f64,
    pub s_bar_db: f64,
    pub beta_re: f64,
    pub beta_im: f64,
    pub varphi: f64,
    pub phi_res: f64,
    pub delta: f64,
    pub theta: f64,
    pub t: f64,
    pub tau: f64,
    pub n_th: f64,
    /// `None` means unit effective gain.
    pub g: Option<f64>,
}

impl Point {
    pub fn input(&self) -> cvtele_core::Result<InputState> {
        InputState::from_db(
            Complex64::new(self.beta_re, self.beta_im),
            self.s_db,
            self.varphi,
        )
    }

    pub fn params(&self) -> cvtele_core::Result<ChannelParams> {
        match self.g {
            Some(g) => ChannelParams::new(self.t, self.tau, self.n_th, g),
            None => ChannelParams::unit_effective_gain(self.t, self.tau, self.n_th),
        }
    }

    pub fn context(&self, params: ChannelParams) -> ResourceContext {
        let mut ctx = ResourceContext::new(db_to_natural(self.r_db), params)
            .with_input_s(db_to_natural(self.s_db))
            .with_s_bar(db_to_natural(self.s_bar_db));
        ctx.phi_res = self.phi_res;
        ctx.delta = self.delta;
        ctx.theta = self.theta;
        ctx
    }

    fn set(&mut self, axis: &str, value: f64) {
        match axis {
            "r_db" => self.r_db = value,
            "s_db" => self.s_db = value,
            "s_bar_db" => self.s_bar_db = value,
            "beta_re" => self.beta_re = value,
            "beta_im" => self.beta_im = value,
            "varphi" => self.varphi = value,
            "phi_res" => self.phi_res = value,
            "delta" => self.delta = value,
            "theta" => self.theta = value,
            "tau" => self.tau = value,
            "n_th" => self.n_th = value,
            "r2" => self.t = (1.0 - value).sqrt(),
            "t" => self.t = value,
            "g" => self.g = Some(value),
            other => unreachable!("axis `{other}` passed validation"),
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| CliError::config(format!("invalid scenario: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn base_point(&self) -> Point {
        let t = match (self.channel.t, self.channel.r2) {
            (Some(t), _) => t,
            (None, Some(r2)) => (1.0 - r2).sqrt(),
            (None, None) => 1.0,
        };
        Point {
            r_db: self.resource.r_db,
            s_db: self.input.s_db,
            s_bar_db: self.resource.s_bar_db,
            beta_re: self.input.beta_re,
            beta_im: self.input.beta_im,
            varphi: self.input.varphi,
            phi_res: self.resource.phi_res,
            delta: self.resource.delta,
            theta: self.resource.theta,
            t,
            tau: self.channel.tau,
            n_th: self.channel.n_th,
            g: match self.channel.gain {
                Gain::Fixed(g) => Some(g),
                Gain::Mode(GainMode::UnitEffective) => None,
            },
        }
    }

    /// The parameter set at each sweep value, in sweep order.
    pub fn points(&self) -> Vec<Point> {
        let base = self.base_point();
        self.sweep
            .values()
            .into_iter()
            .map(|v| {
                let mut p = base;
                p.set(&self.sweep.axis, v);
                p
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let sw = &self.sweep;
        if !AXES.contains(&sw.axis.as_str()) {
            return Err(CliError::config(format!(
                "sweep axis `{}` is not one of {}",
                sw.axis,
                AXES.join(", ")
            )));
        }
        if !(sw.from.is_finite() && sw.to.is_finite()) {
            return Err(CliError::config("sweep range must be finite"));
        }
        if sw.points < 2 {
            return Err(CliError::config(format!(
                "sweep needs at least 2 points, got {}",
                sw.points
            )));
        }
        if self.channel.t.is_some() && self.channel.r2.is_some() {
            return Err(CliError::config(
                "give either channel.t or channel.r2, not both",
            ));
        }
        if let Some(r2) = self.channel.r2 {
            if !(0.0..1.0).contains(&r2) {
                return Err(CliError::config(format!(
                    "channel.r2 must be in [0, 1), got {r2}"
                )));
            }
        }
        if self.resources.is_empty() {
            return Err(CliError::config("`resources` is empty"));
        }
        if self.outputs.is_empty() {
            return Err(CliError::config("`outputs` is empty"));
        }
        let strategies = StrategyRegistry::with_defaults();
        for name in &self.resources {
            strategies
                .lookup(name)
                .map_err(|e| CliError::config(e.to_string()))?;
        }
        let observables = ObservableRegistry::with_defaults();
        for name in &self.outputs {
            observables.expand(name)?;
        }
        for (i, p) in self.points().iter().enumerate() {
            let at = |e: cvtele_core::Error| {
                CliError::config(format!(
                    "sweep point {i} ({} = {}): {e}",
                    sw.axis,
                    sw.values()[i]
                ))
            };
            p.input().map_err(at)?;
            p.params().map_err(at)?;
            if !(p.r_db.is_finite() && p.r_db >= 0.0) {
                return Err(at(cvtele_core::Error::InvalidParameter {
                    name: "r_db",
                    reason: format!("must be >= 0, got {}", p.r_db),
                }));
            }
        }
        Ok(())
    }

    /// Output column names after the sweep axis: one per observable per
    /// resource, observable-major.
    pub fn columns(&self) -> Result<Vec<String>> {
        let observables = ObservableRegistry::with_defaults();
        let mut cols = Vec::new();
        for name in &self.outputs {
            for obs in observables.expand(name)? {
                for res in &self.resources {
                    cols.push(format!("{}:{}", obs.name(), res));
                }
            }
        }
        Ok(cols)
    }
}
