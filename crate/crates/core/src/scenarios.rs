//! Ready-made parameter sets for the hydrogen 2P–1S transition and a
//! superconducting qubit with low-frequency noise.

use serde::{Deserialize, Serialize};

use crate::decay::{
    decay_pair, parameter_sweep, Baseline, DrivePair, MeasurementProtocol, QuadratureSettings, SweepAxis,
    SweepContext, SweepRow,
};
use crate::error::{Error, Result};
use crate::frame::{resolve_drive, DriveSetting, DriveSolution, SystemParams};
use crate::spectral::{FilterSpec, SincConvention, SpectralDensity};

pub const HYDROGEN: &str = "hydrogen-2p1s";
pub const CIRCUIT: &str = "circuit-lowfreq";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub system: SystemParams,
    pub drive: DriveSetting,
    pub spectrum: SpectralDensity,
    pub protocol: MeasurementProtocol,
    #[serde(default)]
    pub baseline: Baseline,
    #[serde(default)]
    pub sinc: SincConvention,
    /// Qubit frequency in rad/s, for display.
    #[serde(default)]
    pub si_omega_q: Option<f64>,
    #[serde(default)]
    pub notes: String,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.spectrum.validate()?;
        self.protocol.validate()?;
        self.filter().validate()?;
        self.solution().map(|_| ())
    }

    pub fn solution(&self) -> Result<DriveSolution> {
        resolve_drive(&self.system, &self.drive)
    }

    pub fn filter(&self) -> FilterSpec {
        FilterSpec { tau: self.protocol.tau, omega_q: self.system.omega_q, convention: self.sinc }
    }

    pub fn sweep_context(&self, quadrature: QuadratureSettings) -> SweepContext {
        SweepContext {
            system: self.system,
            drive: self.drive,
            spectrum: self.spectrum.clone(),
            filter: self.filter(),
            quadrature,
            baseline: self.baseline,
        }
    }
}

/// Hydrogen 2P–1S: `eta = 6.4e-9`, cutoff `550 omega_q`, `omega_q tau = 1`,
/// `g = 1e-6`, `r_s = 10`. The cavity frequency (`1.5 omega_q`) is a free
/// choice; the drive frequency is then fixed by resonance.
pub fn hydrogen_preset() -> Scenario {
    Scenario {
        name: HYDROGEN.into(),
        system: SystemParams { omega_q: 1.0, omega_c: 1.5, g: 1e-6 },
        drive: DriveSetting::Resonant { r_s: 10.0 },
        spectrum: SpectralDensity::HydrogenLike { eta: 6.4e-9, omega_s: 550.0 },
        protocol: MeasurementProtocol { tau: 1.0, n: 100 },
        baseline: Baseline::Resonant,
        sinc: SincConvention::Unnormalized,
        si_omega_q: Some(1.55e16),
        notes: "hydrogen 2P-1S transition; atomic cavity QED coupling g/omega <= 1e-6".into(),
    }
}

/// Superconducting qubit: `chi = 1e-4`, `lambda = 0.05 omega_q`,
/// `g = 1e-3 omega_q`, `r_s = 10`, `omega_q tau = 1`.
pub fn circuit_preset() -> Scenario {
    Scenario {
        name: CIRCUIT.into(),
        system: SystemParams { omega_q: 1.0, omega_c: 1.5, g: 1e-3 },
        drive: DriveSetting::Resonant { r_s: 10.0 },
        spectrum: SpectralDensity::LowFrequency { chi: 1e-4, lambda: 0.05 },
        protocol: MeasurementProtocol { tau: 1.0, n: 100 },
        baseline: Baseline::Resonant,
        sinc: SincConvention::Unnormalized,
        si_omega_q: None,
        notes: "superconducting qubit with intrinsic low-frequency noise".into(),
    }
}

pub fn preset_names() -> [&'static str; 2] {
    [HYDROGEN, CIRCUIT]
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        HYDROGEN => Some(hydrogen_preset()),
        CIRCUIT => Some(circuit_preset()),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRatios {
    pub gamma_c_over_gamma_e: f64,
    pub gamma_e_over_gamma_c_wo: f64,
    pub rates: DrivePair,
}

pub fn scenario_ratios(scenario: &Scenario, settings: &QuadratureSettings) -> Result<RateRatios> {
    let solution = scenario.solution()?;
    let rates = decay_pair(
        &solution.frame,
        scenario.system.g,
        &scenario.spectrum,
        &scenario.filter(),
        settings,
        scenario.baseline,
    )?;
    Ok(RateRatios {
        gamma_c_over_gamma_e: rates.gamma_c_over_gamma_e(),
        gamma_e_over_gamma_c_wo: rates.gamma_e_over_gamma_c_wo(),
        rates,
    })
}

/// 30 log-spaced couplings in `[1e-8, 1e-6]`.
pub fn default_g_grid() -> Vec<f64> {
    log_grid(1e-8, 1e-6, 30)
}

pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..points)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64))
        .collect()
}

/// Coupling sweep of the hydrogen preset; panel (a) is `Gamma_e / Gamma_c^wo`
/// without drive, panel (b) is `Gamma_c / Gamma_e` with `r_s = 10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2 {
    pub rows: Vec<SweepRow>,
}

impl Figure2 {
    pub fn panel_a(&self) -> Vec<(f64, f64)> {
        self.points(|v| v.gamma_e_over_gamma_c_wo())
    }

    pub fn panel_b(&self) -> Vec<(f64, f64)> {
        self.points(|v| v.gamma_c_over_gamma_e())
    }

    fn points(&self, pick: impl Fn(&crate::decay::SweepValues) -> f64) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().map(|v| (r.value, pick(v))))
            .collect()
    }
}

pub fn figure2_sweep(g_grid: &[f64], settings: &QuadratureSettings) -> Result<Figure2> {
    figure2_sweep_for(&hydrogen_preset(), g_grid, settings)
}

pub fn figure2_sweep_for(scenario: &Scenario, g_grid: &[f64], settings: &QuadratureSettings) -> Result<Figure2> {
    if g_grid.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::Domain("coupling grid must be strictly positive".into()));
    }
    let rows = parameter_sweep(SweepAxis::G, g_grid, &scenario.sweep_context(*settings))?;
    Ok(Figure2 { rows })
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log10(), y.log10())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
