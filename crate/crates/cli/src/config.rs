//! Strict JSON run configuration.
//!
//! Kaon scenarios take times and rates in units of the short lifetime
//! (`tau1 = 1`) unless `tau1` is given explicitly; the `spectrum` scenario
//! takes SI junction parameters.

use std::path::{Path, PathBuf};

use kaonsim_core::junction::JunctionParams;
use kaonsim_core::kaon::{CpEpsilon, KaonParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Spectrum,
    MixAnalytic,
    MixQubit,
    MixTwoQubit,
    Regen,
    Cpv,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::MixAnalytic => "mix-analytic",
            Scenario::MixQubit => "mix-qubit",
            Scenario::MixTwoQubit => "mix-two-qubit",
            Scenario::Regen => "regen",
            Scenario::Cpv => "cpv",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Scenario>,
    kaon: Option<KaonSpec>,
    two_qubit: Option<TwoQubitSpec>,
    epsilon: Option<[f64; 2]>,
    regeneration: Option<RegenSpec>,
    junction: Option<JunctionSpec>,
    spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    sampling: Sampling,
    #[serde(default)]
    output: OutputSpec,
}

/// Either `{tau1, tau2, delta_m}` or `{tau2_over_tau1, tau1_delta_m}`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct KaonSpec {
    tau1: Option<f64>,
    tau2: Option<f64>,
    delta_m: Option<f64>,
    tau2_over_tau1: Option<f64>,
    tau1_delta_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoQubitSpec {
    /// Coupling `g` in units of `1 / tau1`.
    coupling: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegenSpec {
    t1_over_tau1: f64,
    t2_over_tau1: f64,
    /// Rabi angle accumulated in the slab.
    omega_x_t2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JunctionSpec {
    capacitance: f64,
    critical_current: f64,
    inductance: f64,
    phi_dc: f64,
    phi_ac: f64,
    omega_rf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSpec {
    pub well_index: usize,
    pub n_levels: usize,
    pub grid_points: usize,
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        Self {
            well_index: 0,
            n_levels: 3,
            grid_points: 4096,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sampling {
    pub t_max_over_tau1: f64,
    pub n_points: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            t_max_over_tau1: 10.0,
            n_points: 1000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

/// Validated parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Spectrum {
        junction: JunctionParams,
        spectrum: SpectrumSpec,
    },
    Kaon(KaonParams),
    TwoQubit {
        kaon: KaonParams,
        coupling: f64,
    },
    Regen {
        kaon: KaonParams,
        t1: f64,
        t2: f64,
        omega_x: f64,
    },
    Cpv {
        kaon: KaonParams,
        epsilon: CpEpsilon,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub params: Params,
    pub sampling: Sampling,
    pub output: OutputSpec,
}

pub const MAX_POINTS: usize = 10_000_000;

/// Reads and validates a config file for `scenario`.
pub fn parse_config(path: &Path, scenario: Scenario) -> Result<RunConfig, CliError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CliError::MissingFile(path.to_path_buf()))
        }
        Err(e) => return Err(CliError::io(path, e)),
    };
    parse_config_str(&text, scenario)
}

pub fn parse_config_str(text: &str, scenario: Scenario) -> Result<RunConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            CliError::schema(e.into_inner().to_string())
        } else {
            CliError::schema(format!("{path}: {}", e.into_inner()))
        }
    })?;
    de.end()
        .map_err(|e| CliError::schema(format!("trailing content: {e}")))?;
    validate(raw, scenario)
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::schema(format!(
            "{key}: must be finite and positive, got {v}"
        )))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::schema(format!("{key}: must be finite, got {v}")))
    }
}

fn required<T>(key: &str, v: Option<T>, scenario: Scenario) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::schema(format!("{key}: required for scenario {}", scenario.name())))
}

fn unused<T>(key: &str, v: &Option<T>, scenario: Scenario) -> Result<(), CliError> {
    match v {
        Some(_) => Err(CliError::schema(format!(
            "{key}: not used by scenario {}",
            scenario.name()
        ))),
        None => Ok(()),
    }
}

fn kaon_params(spec: KaonSpec) -> Result<KaonParams, CliError> {
    let physical = [spec.tau1, spec.tau2, spec.delta_m];
    let reduced = [spec.tau2_over_tau1, spec.tau1_delta_m];
    let k = match (physical, reduced) {
        ([Some(tau1), Some(tau2), Some(dm)], [None, None]) => KaonParams {
            m: 0.0,
            delta_m: finite("kaon.delta_m", dm)?,
            tau1: positive("kaon.tau1", tau1)?,
            tau2: positive("kaon.tau2", tau2)?,
            omega_x: 0.0,
        },
        ([None, None, None], [Some(ratio), Some(tdm)]) => KaonParams {
            m: 0.0,
            delta_m: finite("kaon.tau1_delta_m", tdm)?,
            tau1: 1.0,
            tau2: positive("kaon.tau2_over_tau1", ratio)?,
            omega_x: 0.0,
        },
        _ => {
            return Err(CliError::schema(
                "kaon: give either {tau1, tau2, delta_m} or {tau2_over_tau1, tau1_delta_m}",
            ))
        }
    };
    k.validate()
        .map_err(|e| CliError::schema(format!("kaon: {e}")))?;
    Ok(k)
}

fn validate(raw: RawConfig, scenario: Scenario) -> Result<RunConfig, CliError> {
    if let Some(s) = raw.scenario {
        if s != scenario {
            return Err(CliError::schema(format!(
                "scenario: config is for {} but {} was requested",
                s.name(),
                scenario.name()
            )));
        }
    }
    let sampling = raw.sampling;
    if !(2..=MAX_POINTS).contains(&sampling.n_points) {
        return Err(CliError::schema(format!(
            "sampling.n_points: must lie in [2, {MAX_POINTS}], got {}",
            sampling.n_points
        )));
    }
    positive("sampling.t_max_over_tau1", sampling.t_max_over_tau1)?;

    if scenario != Scenario::Spectrum {
        unused("junction", &raw.junction, scenario)?;
        unused("spectrum", &raw.spectrum, scenario)?;
    }
    if scenario != Scenario::MixTwoQubit {
        unused("two_qubit", &raw.two_qubit, scenario)?;
    }
    if scenario != Scenario::Cpv {
        unused("epsilon", &raw.epsilon, scenario)?;
    }
    if scenario != Scenario::Regen {
        unused("regeneration", &raw.regeneration, scenario)?;
    }

    let params = match scenario {
        Scenario::Spectrum => {
            unused("kaon", &raw.kaon, scenario)?;
            let j = required("junction", raw.junction, scenario)?;
            let junction = JunctionParams::new(
                j.capacitance,
                j.critical_current,
                j.inductance,
                j.phi_dc,
                j.phi_ac,
                j.omega_rf,
            )
            .map_err(|e| CliError::schema(format!("junction: {e}")))?;
            let spectrum = raw.spectrum.unwrap_or_default();
            if spectrum.n_levels < 2 {
                return Err(CliError::schema(format!(
                    "spectrum.n_levels: need at least 2, got {}",
                    spectrum.n_levels
                )));
            }
            Params::Spectrum { junction, spectrum }
        }
        Scenario::MixAnalytic | Scenario::MixQubit => {
            Params::Kaon(kaon_params(required("kaon", raw.kaon, scenario)?)?)
        }
        Scenario::MixTwoQubit => {
            let kaon = kaon_params(required("kaon", raw.kaon, scenario)?)?;
            let coupling = match raw.two_qubit {
                Some(t) => positive("two_qubit.coupling", t.coupling)? / kaon.tau1,
                None => 1.0 / kaon.tau1,
            };
            Params::TwoQubit { kaon, coupling }
        }
        Scenario::Regen => {
            let kaon = kaon_params(required("kaon", raw.kaon, scenario)?)?;
            let r = required("regeneration", raw.regeneration, scenario)?;
            let t1 = finite("regeneration.t1_over_tau1", r.t1_over_tau1)? * kaon.tau1;
            let t2 = positive("regeneration.t2_over_tau1", r.t2_over_tau1)? * kaon.tau1;
            if t1 < 0.0 {
                return Err(CliError::schema(
                    "regeneration.t1_over_tau1: must not be negative",
                ));
            }
            let omega_x = finite("regeneration.omega_x_t2", r.omega_x_t2)? / t2;
            Params::Regen {
                kaon,
                t1,
                t2,
                omega_x,
            }
        }
        Scenario::Cpv => {
            let kaon = kaon_params(required("kaon", raw.kaon, scenario)?)?;
            let [re, im] = required("epsilon", raw.epsilon, scenario)?;
            let epsilon = CpEpsilon::new(finite("epsilon[0]", re)?, finite("epsilon[1]", im)?);
            Params::Cpv { kaon, epsilon }
        }
    };
    Ok(RunConfig {
        scenario,
        params,
        sampling,
        output: raw.output,
    })
}
