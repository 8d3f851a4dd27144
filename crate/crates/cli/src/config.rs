//! TOML run configuration and its merge with command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use ringabs_core::runner::{AxisSpec, Model, PointParams, Quantity, RateSpec, Temperature};
use ringabs_core::Detuning;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub ring: RingSection,
    #[serde(default)]
    pub rates: RateSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub figure: FigureSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: Option<String>,
    pub quantity: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RingSection {
    pub n_emitters: Option<usize>,
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RateSection {
    pub gamma_t: Option<f64>,
    pub gamma_t_norm: Option<f64>,
    pub gamma_d: Option<f64>,
    pub gamma_d_norm: Option<f64>,
    pub gamma_bth: Option<f64>,
    pub gamma_bth_norm: Option<f64>,
    pub fbar: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub beta_j: Option<f64>,
    pub beta_gamma0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DetuningValue {
    Number(f64),
    Tag(String),
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub rabi: Option<f64>,
    pub detuning: Option<DetuningValue>,
    pub intensity: Option<f64>,
    pub mean_photons: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub name: Option<String>,
    pub axis1: Option<String>,
    pub axis2: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub points: Option<usize>,
    pub fig3_gamma_t_norm: Option<f64>,
    pub fig3_gamma_bth_norm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub gamma_t_bounds: Option<[f64; 2]>,
    pub dephasing_bounds: Option<[f64; 2]>,
    pub coarse_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub path: Option<PathBuf>,
    pub svg: Option<bool>,
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

pub fn parse(text: &str) -> Result<FileConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

/// A dephasing rate with the key it was given under.
pub type NamedRate = (&'static str, RateSpec);

/// Physical parameters as given on the command line or in a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Physics {
    pub model: Option<Model>,
    pub quantity: Option<Quantity>,
    pub n_emitters: Option<usize>,
    pub spacing: Option<f64>,
    pub gamma_t: Option<RateSpec>,
    pub dephasing: Option<NamedRate>,
    pub temperature: Option<Temperature>,
    pub rabi: Option<f64>,
    pub detuning: Option<Detuning>,
    pub intensity: Option<f64>,
    pub mean_photons: Option<f64>,
}

fn one_of<T>(
    field: &str,
    options: Vec<(&'static str, Option<T>)>,
) -> Result<Option<(&'static str, T)>, CliError> {
    let given: Vec<(&'static str, T)> = options
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    if given.len() > 1 {
        let names: Vec<_> = given.iter().map(|(k, _)| *k).collect();
        return Err(CliError::Usage(format!(
            "{field}: give only one of {}",
            names.join(", ")
        )));
    }
    Ok(given.into_iter().next())
}

pub fn parse_detuning(s: &str) -> Result<Detuning, String> {
    match s {
        "resonant" | "resonant-with-brightest" => Ok(Detuning::ResonantWithBrightest),
        other => other
            .parse::<f64>()
            .map(Detuning::Fixed)
            .map_err(|_| format!("detuning '{other}' must be a number or 'resonant'")),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn rates_from(
    gamma_t: Option<f64>,
    gamma_t_norm: Option<f64>,
    gamma_d: Option<f64>,
    gamma_d_norm: Option<f64>,
    gamma_bth: Option<f64>,
    gamma_bth_norm: Option<f64>,
    fbar: Option<f64>,
) -> Result<(Option<RateSpec>, Option<NamedRate>), CliError> {
    let trap = one_of(
        "trap rate",
        vec![
            ("gamma_t", gamma_t.map(RateSpec::Absolute)),
            ("gamma_t_norm", gamma_t_norm.map(RateSpec::PerBright)),
        ],
    )?
    .map(|(_, r)| r);
    let dephasing = one_of(
        "dephasing",
        vec![
            ("gamma_d", gamma_d.map(RateSpec::Absolute)),
            ("gamma_d_norm", gamma_d_norm.map(RateSpec::PerBright)),
            ("gamma_bth", gamma_bth.map(RateSpec::Absolute)),
            ("gamma_bth_norm", gamma_bth_norm.map(RateSpec::PerBright)),
            ("fbar", fbar.map(RateSpec::BathSlope)),
        ],
    )?;
    Ok((trap, dephasing))
}

pub fn temperature_from(
    beta_j: Option<f64>,
    beta_gamma0: Option<f64>,
) -> Result<Option<Temperature>, CliError> {
    Ok(one_of(
        "temperature",
        vec![
            ("beta_j", beta_j.map(Temperature::BetaJ)),
            ("beta_gamma0", beta_gamma0.map(Temperature::BetaGamma0)),
        ],
    )?
    .map(|(_, t)| t))
}

impl FileConfig {
    pub fn physics(&self) -> Result<Physics, CliError> {
        let usage = CliError::Usage;
        let (gamma_t, dephasing) = rates_from(
            self.rates.gamma_t,
            self.rates.gamma_t_norm,
            self.rates.gamma_d,
            self.rates.gamma_d_norm,
            self.rates.gamma_bth,
            self.rates.gamma_bth_norm,
            self.rates.fbar,
        )?;
        let detuning = match &self.drive.detuning {
            None => None,
            Some(DetuningValue::Number(x)) => Some(Detuning::Fixed(*x)),
            Some(DetuningValue::Tag(s)) => Some(parse_detuning(s).map_err(usage)?),
        };
        Ok(Physics {
            model: self
                .model
                .name
                .as_deref()
                .map(str::parse)
                .transpose()
                .map_err(usage)?,
            quantity: self
                .model
                .quantity
                .as_deref()
                .map(str::parse)
                .transpose()
                .map_err(usage)?,
            n_emitters: self.ring.n_emitters,
            spacing: self.ring.spacing,
            gamma_t,
            dephasing,
            temperature: temperature_from(self.bath.beta_j, self.bath.beta_gamma0)?,
            rabi: self.drive.rabi,
            detuning,
            intensity: self.drive.intensity,
            mean_photons: self.drive.mean_photons,
        })
    }

    pub fn axes(&self) -> Result<(Option<AxisSpec>, Option<AxisSpec>), CliError> {
        let parse = |s: &Option<String>| {
            s.as_deref()
                .map(str::parse::<AxisSpec>)
                .transpose()
                .map_err(CliError::Usage)
        };
        Ok((parse(&self.sweep.axis1)?, parse(&self.sweep.axis2)?))
    }
}

impl Physics {
    /// Values set here win over those in `lower`.
    pub fn over(self, lower: Physics) -> Physics {
        Physics {
            model: self.model.or(lower.model),
            quantity: self.quantity.or(lower.quantity),
            n_emitters: self.n_emitters.or(lower.n_emitters),
            spacing: self.spacing.or(lower.spacing),
            gamma_t: self.gamma_t.or(lower.gamma_t),
            dephasing: self.dephasing.or(lower.dephasing),
            temperature: self.temperature.or(lower.temperature),
            rabi: self.rabi.or(lower.rabi),
            detuning: self.detuning.or(lower.detuning),
            intensity: self.intensity.or(lower.intensity),
            mean_photons: self.mean_photons.or(lower.mean_photons),
        }
    }

    /// Fills unset values with defaults and checks that the dephasing kind
    /// fits the model.
    pub fn resolve(&self) -> Result<(Model, Quantity, PointParams), CliError> {
        let model = self.model.unwrap_or(Model::DickeLocal);
        let quantity = self.quantity.unwrap_or(Quantity::Absorption);
        if let Some((name, _)) = self.dephasing {
            let thermal_key = matches!(name, "gamma_bth" | "gamma_bth_norm" | "fbar");
            if thermal_key != model.is_thermal() {
                return Err(CliError::Usage(format!(
                    "{name} does not apply to model {model}; use {}",
                    if model.is_thermal() {
                        "gamma_bth, gamma_bth_norm or fbar"
                    } else {
                        "gamma_d or gamma_d_norm"
                    }
                )));
            }
        }
        let defaults = PointParams::default();
        let params = PointParams {
            n_emitters: self.n_emitters.unwrap_or(defaults.n_emitters),
            spacing: self.spacing.unwrap_or(defaults.spacing),
            gamma_t: self.gamma_t.unwrap_or(defaults.gamma_t),
            dephasing: self.dephasing.map_or(defaults.dephasing, |(_, r)| r),
            temperature: self.temperature.unwrap_or(defaults.temperature),
            rabi: self.rabi.unwrap_or(defaults.rabi),
            detuning: self.detuning.unwrap_or(defaults.detuning),
            intensity: self.intensity.unwrap_or(defaults.intensity),
            mean_photons: self.mean_photons.unwrap_or(defaults.mean_photons),
        };
        Ok((model, quantity, params))
    }
}
