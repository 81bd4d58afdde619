//! JSON scenarios: a named experiment with parameters and a seed, run into
//! a report of checks against declared tolerances.

mod gaussian_exp;
mod hardcore_exp;
mod invariance;
mod partial_wave_exp;
mod report;
mod representation;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scattering::PhaseShiftModel;

pub use report::{write_report, Format, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    InvarianceSweep,
    #[serde(rename = "scatter_1d")]
    Scatter1d,
    ScatterPw,
    GaussianAnalysis,
    RepCheck,
}

impl Experiment {
    fn randomized(self) -> bool {
        !matches!(self, Experiment::Scatter1d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "empty_object")]
    pub parameters: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

/// Options supplied outside the scenario file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub smatrix: Option<PhaseShiftModel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|value - reference| <= tolerance`
    Abs,
    /// `value < tolerance`
    Below,
    /// `value > tolerance`
    Above,
    /// Informational; always passes.
    Record,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    fn make(name: impl Into<String>, value: f64, reference: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Abs => (value - reference).abs() <= tolerance,
            Comparison::Below => value < tolerance,
            Comparison::Above => value > tolerance,
            Comparison::Record => true,
        };
        Self { name: name.into(), value, reference, tolerance, comparison, pass }
    }

    pub fn close(name: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        Self::make(name, value, reference, tolerance, Comparison::Abs)
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::make(name, value, 0.0, tolerance, Comparison::Below)
    }

    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::make(name, value, 0.0, threshold, Comparison::Above)
    }

    pub fn record(name: impl Into<String>, value: f64) -> Self {
        Self::make(name, value, 0.0, 0.0, Comparison::Record)
    }
}

/// Experiment parameters after schema validation.
#[derive(Clone, Debug)]
pub enum Parameters {
    GaussianAnalysis(gaussian_exp::Params),
    InvarianceSweep(invariance::Params),
    ScatterPw(partial_wave_exp::Params),
    Scatter1d(hardcore_exp::Params),
    RepCheck(representation::Params),
}

fn pointer(prefix: &str, path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = prefix.to_string();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}

fn typed<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value)
        .map_err(|e| Error::Config { pointer: pointer(prefix, e.path()), message: e.inner().to_string() })
}

pub(crate) fn config_error(pointer: &str, message: impl Into<String>) -> Error {
    Error::Config { pointer: pointer.to_string(), message: message.into() }
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<(Scenario, Parameters)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Config { pointer: pointer("", e.path()), message: e.inner().to_string() })?;
    let params = validate(&scenario)?;
    Ok((scenario, params))
}

/// Schema and range validation of the parameters of `s`.
pub fn validate(s: &Scenario) -> Result<Parameters> {
    if !s.parameters.is_object() {
        return Err(config_error("/parameters", "expected an object"));
    }
    let p = &s.parameters;
    let params = match s.experiment {
        Experiment::GaussianAnalysis => Parameters::GaussianAnalysis(typed(p, "/parameters")?),
        Experiment::InvarianceSweep => Parameters::InvarianceSweep(typed(p, "/parameters")?),
        Experiment::ScatterPw => Parameters::ScatterPw(typed(p, "/parameters")?),
        Experiment::Scatter1d => Parameters::Scatter1d(typed(p, "/parameters")?),
        Experiment::RepCheck => Parameters::RepCheck(typed(p, "/parameters")?),
    };
    match &params {
        Parameters::GaussianAnalysis(x) => x.validate()?,
        Parameters::InvarianceSweep(x) => x.validate()?,
        Parameters::ScatterPw(x) => x.validate()?,
        Parameters::Scatter1d(x) => x.validate()?,
        Parameters::RepCheck(x) => x.validate()?,
    }
    Ok(params)
}

/// Runs a parsed scenario. The seed from `overrides` wins over the file.
pub fn run_scenario(s: &Scenario, params: &Parameters, overrides: &Overrides) -> Result<Report> {
    let seed = overrides.seed.or(s.seed);
    if s.experiment.randomized() && seed.is_none() {
        return Err(config_error("/seed", "randomized experiments need a seed"));
    }
    let seed_value = seed.unwrap_or(0);
    let checks = match params {
        Parameters::GaussianAnalysis(p) => gaussian_exp::run(p, seed_value)?,
        Parameters::InvarianceSweep(p) => invariance::run(p, seed_value)?,
        Parameters::ScatterPw(p) => partial_wave_exp::run(p, seed_value, overrides.smatrix.as_ref())?,
        Parameters::Scatter1d(p) => hardcore_exp::run(p)?,
        Parameters::RepCheck(p) => representation::run(p, seed_value)?,
    };
    Ok(Report::new(s, seed, checks))
}

#[cfg(test)]
mod tests;
