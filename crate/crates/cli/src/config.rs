//! TOML run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zeno_core::decay::{Baseline, MeasurementProtocol, QuadratureSettings};
use zeno_core::frame::{DriveSetting, SystemParams};
use zeno_core::oracle::{OracleSettings, Picture};
use zeno_core::scenarios::Scenario;
use zeno_core::spectral::{parse_tabulated, CombSettings, CombWeights, SincConvention, SpectralDensity};

use crate::error::CliError;

/// Spectral density as written in a config file; `tabulated-file` points at a
/// two-column text table, resolved relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumConfig {
    HydrogenLike { eta: f64, omega_s: f64 },
    LowFrequency { chi: f64, lambda: f64 },
    Tabulated { points: Vec<(f64, f64)> },
    TabulatedFile { path: PathBuf },
    DiscreteComb { modes: Vec<(f64, f64)> },
}

impl SpectrumConfig {
    pub fn resolve(&self, base: Option<&Path>) -> Result<SpectralDensity, CliError> {
        Ok(match self {
            SpectrumConfig::HydrogenLike { eta, omega_s } => SpectralDensity::HydrogenLike { eta: *eta, omega_s: *omega_s },
            SpectrumConfig::LowFrequency { chi, lambda } => SpectralDensity::LowFrequency { chi: *chi, lambda: *lambda },
            SpectrumConfig::Tabulated { points } => SpectralDensity::Tabulated { points: points.clone() },
            SpectrumConfig::DiscreteComb { modes } => SpectralDensity::DiscreteComb { modes: modes.clone() },
            SpectrumConfig::TabulatedFile { path } => {
                let full = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let text = fs::read_to_string(&full)
                    .map_err(|e| CliError::Config(format!("cannot read spectrum table {}: {e}", full.display())))?;
                parse_tabulated(&text)?
            }
        })
    }
}

impl From<&SpectralDensity> for SpectrumConfig {
    fn from(spec: &SpectralDensity) -> Self {
        match spec {
            SpectralDensity::HydrogenLike { eta, omega_s } => SpectrumConfig::HydrogenLike { eta: *eta, omega_s: *omega_s },
            SpectralDensity::LowFrequency { chi, lambda } => SpectrumConfig::LowFrequency { chi: *chi, lambda: *lambda },
            SpectralDensity::Tabulated { points } => SpectrumConfig::Tabulated { points: points.clone() },
            SpectralDensity::DiscreteComb { modes } => SpectrumConfig::DiscreteComb { modes: modes.clone() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_lobes")]
    pub lobes_each_side: usize,
    #[serde(default = "default_modes")]
    pub modes_per_lobe: usize,
    #[serde(default)]
    pub weights: CombWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub picture: Picture,
}

fn default_lobes() -> usize {
    CombSettings::default().lobes_each_side
}

fn default_modes() -> usize {
    CombSettings::default().modes_per_lobe
}

impl Default for OracleConfig {
    fn default() -> Self {
        let comb = CombSettings::default();
        Self {
            lobes_each_side: comb.lobes_each_side,
            modes_per_lobe: comb.modes_per_lobe,
            weights: comb.weights,
            dt_max: None,
            picture: Picture::Interaction,
        }
    }
}

impl OracleConfig {
    pub fn comb(&self) -> CombSettings {
        CombSettings { lobes_each_side: self.lobes_each_side, modes_per_lobe: self.modes_per_lobe, weights: self.weights }
    }

    pub fn settings(&self) -> OracleSettings {
        OracleSettings { dt_max: self.dt_max, picture: self.picture }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default)]
    pub baseline: Baseline,
    #[serde(default)]
    pub sinc: SincConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default)]
    pub notes: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub si_omega_q: Option<f64>,
    pub system: SystemParams,
    pub drive: DriveSetting,
    pub spectrum: SpectrumConfig,
    pub measurement: MeasurementProtocol,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_scenario(s: &Scenario) -> Self {
        Self {
            name: s.name.clone(),
            notes: s.notes.clone(),
            si_omega_q: s.si_omega_q,
            system: s.system,
            drive: s.drive,
            spectrum: SpectrumConfig::from(&s.spectrum),
            measurement: s.protocol,
            quadrature: QuadratureSettings::default(),
            oracle: OracleConfig::default(),
            model: ModelConfig { baseline: s.baseline, sinc: s.sinc },
            output: OutputConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<(Self, Scenario), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config = Self::parse(&text)?;
        let scenario = config.scenario(path.parent())?;
        Ok((config, scenario))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Builds and validates the scenario described by this config.
    pub fn scenario(&self, base: Option<&Path>) -> Result<Scenario, CliError> {
        let scenario = Scenario {
            name: self.name.clone(),
            system: self.system,
            drive: self.drive,
            spectrum: self.spectrum.resolve(base)?,
            protocol: self.measurement,
            baseline: self.model.baseline,
            sinc: self.model.sinc,
            si_omega_q: self.si_omega_q,
            notes: self.notes.clone(),
        };
        scenario.validate()?;
        self.quadrature.validate()?;
        if self.oracle.lobes_each_side == 0 || self.oracle.modes_per_lobe == 0 {
            return Err(CliError::Config("oracle lobe and mode counts must be >= 1".into()));
        }
        if let Some(dt) = self.oracle.dt_max {
            if dt.is_nan() || dt <= 0.0 {
                return Err(CliError::Config(format!("oracle dt_max must be > 0, got {dt}")));
            }
        }
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use zeno_core::scenarios::{circuit_preset, hydrogen_preset};

    #[test]
    fn presets_round_trip() {
        for preset in [circuit_preset(), hydrogen_preset()] {
            let config = RunConfig::from_scenario(&preset);
            let text = config.to_toml().unwrap();
            let back = RunConfig::parse(&text).unwrap();
            assert_eq!(back, config);
            assert_eq!(back.scenario(None).unwrap(), preset);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut text = RunConfig::from_scenario(&circuit_preset()).to_toml().unwrap();
        text = text.replace("[system]\n", "[system]\nbogus = 1\n");
        assert!(matches!(RunConfig::parse(&text), Err(CliError::Config(_))));
        let text = RunConfig::from_scenario(&circuit_preset()).to_toml().unwrap().replace("chi =", "chi_typo =");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn invalid_values_rejected_at_load() {
        let mut config = RunConfig::from_scenario(&circuit_preset());
        config.drive = DriveSetting::Explicit { omega_d: 0.0, drive_g: 2.0 };
        assert!(config.scenario(None).is_err());
        let mut config = RunConfig::from_scenario(&circuit_preset());
        config.measurement.tau = 0.0;
        assert!(config.scenario(None).is_err());
        let mut config = RunConfig::from_scenario(&circuit_preset());
        config.quadrature.rel_tol = 2.0;
        assert!(config.scenario(None).is_err());
    }

    #[test]
    fn tabulated_file_resolves_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("g.txt"), "# w G\n0 0\n10 1e-6\n").unwrap();
        let mut config = RunConfig::from_scenario(&circuit_preset());
        config.spectrum = SpectrumConfig::TabulatedFile { path: "g.txt".into() };
        let path = dir.path().join("run.toml");
        fs::write(&path, config.to_toml().unwrap()).unwrap();
        let (_, scenario) = RunConfig::load(&path).unwrap();
        assert_eq!(scenario.spectrum, SpectralDensity::Tabulated { points: vec![(0.0, 0.0), (10.0, 1e-6)] });
    }
}
