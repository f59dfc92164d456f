//! Measurement-induced decay rates, the survival law and parameter sweeps.
//!
//! The total rate splits into a cavity part and a bath part,
//! `Gamma = Gamma_c + Gamma_e` with `Gamma_e = 2 pi ∫_0^∞ G(omega) F(omega) d omega`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{resolve_drive, solve_resonant_drive, DriveSetting, SqueezedFrame, SystemParams};
use crate::quadrature::{self, Estimate};
use crate::spectral::{filter_lobes, FilterSpec, SpectralDensity};

/// Tolerances for the bath overlap integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub max_lobes: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_lobes: 1_000_000 }
    }
}

impl QuadratureSettings {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.max_lobes == 0 {
            return Err(Error::Domain("max_lobes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Which cavity the drive-off comparison rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Undriven cavity tuned to the qubit: `Gamma_c^wo = g^2 tau`.
    #[default]
    Resonant,
    /// The same cavity with the pump switched off, detuned by `delta_c - delta_q`.
    SameCavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvRate {
    pub value: f64,
    pub abs_error: f64,
    pub lobes_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBreakdown {
    pub gamma_c: f64,
    pub gamma_e: f64,
    pub gamma_total: f64,
    pub quad_abs_error: f64,
    pub drive_on: bool,
    pub lobes_used: usize,
}

impl DecayBreakdown {
    fn new(gamma_c: f64, env: EnvRate, drive_on: bool) -> Self {
        Self {
            gamma_c,
            gamma_e: env.value,
            gamma_total: gamma_c + env.value,
            quad_abs_error: env.abs_error,
            drive_on,
            lobes_used: env.lobes_used,
        }
    }
}

fn detuned_rate(coupling: f64, detuning: f64, tau: f64) -> f64 {
    let s = crate::spectral::sinc(0.5 * detuning * tau);
    coupling * coupling * tau * s * s
}

/// `g_s^2 tau sinc^2[(delta_s - delta_q) tau / 2]`.
pub fn gamma_cavity(frame: &SqueezedFrame, tau: f64) -> f64 {
    detuned_rate(frame.g_s, frame.mode_detuning(), tau)
}

/// Cavity rate with the drive off.
pub fn gamma_cavity_undriven(frame: &SqueezedFrame, g_bare: f64, tau: f64, baseline: Baseline) -> f64 {
    let detuning = match baseline {
        Baseline::Resonant => 0.0,
        Baseline::SameCavity => frame.delta_c - frame.delta_q,
    };
    detuned_rate(g_bare, detuning, tau)
}

/// Bath overlap rate `2 pi ∫ G F`.
///
/// Continuum spectra are integrated lobe by lobe between the filter zeros.
/// Everything left of the qubit frequency is a finite range and is always
/// integrated in full; lobes on the right are added until the bound
/// `sup_{w > W} G(w) * 4 / (tau (W - omega_q))` on the rest drops below
/// `rel_tol` times the accumulated value. The reported error is the summed
/// panel error plus that final tail bound.
pub fn gamma_env(spec: &SpectralDensity, f: &FilterSpec, settings: &QuadratureSettings) -> Result<EnvRate> {
    spec.validate()?;
    f.validate()?;
    settings.validate()?;
    if let SpectralDensity::DiscreteComb { modes } = spec {
        let value = modes.iter().map(|&(w, fk)| fk * fk * f.tau * f.sinc_squared(w)).fold(0.0, |acc, x| acc + x);
        return Ok(EnvRate { value, abs_error: 0.0, lobes_used: 0 });
    }

    let spacing = f.zero_spacing();
    let (support_lo, support_hi) = spec.support();
    let lo = support_lo.max(0.0);
    let integrand = |w: f64| spec.value(w).unwrap_or(0.0) * f.tau * f.sinc_squared(w);
    let lobe_tol = 0.1 * settings.rel_tol;
    let integrate = |a: f64, b: f64| -> Estimate {
        let (a, b) = (a.max(lo), b.min(support_hi));
        if b <= a {
            return Estimate::default();
        }
        quadrature::integrate(&integrand, a, b, lobe_tol, 0.0, 2000)
    };

    let mut total = Estimate::default();
    let mut lobes = 0usize;
    // left of the filter centre, plus the central lobe
    let left_lobes = if f.omega_q > lo { ((f.omega_q - lo) / spacing).ceil() as usize } else { 0 };
    if left_lobes > settings.max_lobes {
        return Err(Error::Convergence { lobes: settings.max_lobes, tail_bound: f64::INFINITY, target: 0.0 });
    }
    let mut n = 1usize;
    let mut edge = f.omega_q + spacing;
    if edge > lo {
        for (a, b) in filter_lobes(f, lo, left_lobes.max(1)) {
            if a >= edge {
                break;
            }
            total += integrate(a, b.min(edge));
            lobes += 1;
        }
    } else {
        // support starts right of the central lobe
        n = ((lo - f.omega_q) / spacing).floor() as usize;
        edge = lo;
    }

    // the bound only shrinks with W, so if even the last allowed lobe cannot
    // meet the largest reachable target there is no point in integrating
    let w_max = f.omega_q + spacing * (n + settings.max_lobes.saturating_sub(lobes)) as f64;
    let reachable = edge - f.omega_q;
    if w_max < support_hi && edge < support_hi && reachable > 0.0 {
        let best = spec.sup_beyond(w_max) * f.tail_weight(w_max - f.omega_q);
        let ceiling = total.value.abs() + spec.sup_beyond(edge) * f.tail_weight(reachable);
        if best > settings.rel_tol * ceiling {
            return Err(Error::Convergence { lobes: settings.max_lobes, tail_bound: best, target: settings.rel_tol * ceiling });
        }
    }

    loop {
        if edge >= support_hi {
            return Ok(EnvRate { value: total.value, abs_error: total.abs_error, lobes_used: lobes });
        }
        let distance = edge - f.omega_q;
        let bound = spec.sup_beyond(edge) * f.tail_weight(distance);
        let target = settings.rel_tol * total.value.abs();
        if bound <= target {
            return Ok(EnvRate { value: total.value, abs_error: total.abs_error + bound, lobes_used: lobes });
        }
        if lobes >= settings.max_lobes {
            return Err(Error::Convergence { lobes, tail_bound: bound, target });
        }
        n += 1;
        let next = f.omega_q + spacing * n as f64;
        total += integrate(edge, next);
        lobes += 1;
        edge = next;
    }
}

pub fn decay_breakdown(
    frame: &SqueezedFrame,
    g_bare: f64,
    spec: &SpectralDensity,
    f: &FilterSpec,
    drive_on: bool,
    settings: &QuadratureSettings,
) -> Result<DecayBreakdown> {
    let env = gamma_env(spec, f, settings)?;
    Ok(breakdown_with_env(frame, g_bare, env, f.tau, drive_on, Baseline::default()))
}

/// Assembles a breakdown from a bath rate that was already computed; the bath
/// term does not depend on the drive.
pub fn breakdown_with_env(
    frame: &SqueezedFrame,
    g_bare: f64,
    env: EnvRate,
    tau: f64,
    drive_on: bool,
    baseline: Baseline,
) -> DecayBreakdown {
    let gamma_c = if drive_on {
        gamma_cavity(frame, tau)
    } else {
        gamma_cavity_undriven(frame, g_bare, tau, baseline)
    };
    DecayBreakdown::new(gamma_c, env, drive_on)
}

/// Drive-on and drive-off breakdowns sharing one bath integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePair {
    pub on: DecayBreakdown,
    pub off: DecayBreakdown,
}

impl DrivePair {
    pub fn gamma_c_over_gamma_e(&self) -> f64 {
        self.on.gamma_c / self.on.gamma_e
    }

    pub fn gamma_e_over_gamma_c_wo(&self) -> f64 {
        self.off.gamma_e / self.off.gamma_c
    }
}

pub fn decay_pair(
    frame: &SqueezedFrame,
    g_bare: f64,
    spec: &SpectralDensity,
    f: &FilterSpec,
    settings: &QuadratureSettings,
    baseline: Baseline,
) -> Result<DrivePair> {
    let env = gamma_env(spec, f, settings)?;
    Ok(DrivePair {
        on: breakdown_with_env(frame, g_bare, env, f.tau, true, baseline),
        off: breakdown_with_env(frame, g_bare, env, f.tau, false, baseline),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementProtocol {
    pub tau: f64,
    pub n: usize,
}

impl MeasurementProtocol {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Domain(format!("measurement interval must be > 0, got {}", self.tau)));
        }
        if self.n == 0 {
            return Err(Error::Domain("need at least one measurement".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub times: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// `P(m tau) = exp(-Gamma m tau)` for `m = 0..=n`.
pub fn survival_probability(gamma_total: f64, proto: &MeasurementProtocol) -> Result<SurvivalCurve> {
    proto.validate()?;
    if !(gamma_total >= 0.0) {
        return Err(Error::Domain(format!("decay rate must be >= 0, got {gamma_total}")));
    }
    let times: Vec<f64> = (0..=proto.n).map(|m| m as f64 * proto.tau).collect();
    let probabilities = times.iter().map(|t| (-gamma_total * t).exp()).collect();
    Ok(SurvivalCurve { times, probabilities })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    G,
    RS,
    Tau,
    DriveG,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::G => "g",
            SweepAxis::RS => "r_s",
            SweepAxis::Tau => "tau",
            SweepAxis::DriveG => "drive_g",
        }
    }

    fn affects_bath(&self) -> bool {
        matches!(self, SweepAxis::Tau)
    }
}

/// Everything held fixed during a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepContext {
    pub system: SystemParams,
    pub drive: DriveSetting,
    pub spectrum: SpectralDensity,
    pub filter: FilterSpec,
    pub quadrature: QuadratureSettings,
    pub baseline: Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<SweepValues, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepValues {
    pub gamma_c: f64,
    pub gamma_e: f64,
    pub gamma_c_wo: f64,
    pub quad_abs_error: f64,
}

impl SweepValues {
    pub fn gamma_c_over_gamma_e(&self) -> f64 {
        self.gamma_c / self.gamma_e
    }

    pub fn gamma_e_over_gamma_c_wo(&self) -> f64 {
        self.gamma_e / self.gamma_c_wo
    }
}

/// One row per grid value, in grid order. Rows whose parameters are invalid
/// carry the error message instead of aborting the sweep; numerical failures
/// of the shared bath integral abort it.
pub fn parameter_sweep(axis: SweepAxis, grid: &[f64], ctx: &SweepContext) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let shared_env = if axis.affects_bath() {
        None
    } else {
        Some(gamma_env(&ctx.spectrum, &ctx.filter, &ctx.quadrature)?)
    };
    grid.par_iter()
        .map(|&value| match sweep_point(axis, value, ctx, shared_env) {
            Ok(v) => Ok(SweepRow { value, outcome: Ok(v) }),
            Err(e) if e.is_numerical() => Err(e),
            Err(e) => Ok(SweepRow { value, outcome: Err(e.to_string()) }),
        })
        .collect()
}

fn sweep_point(axis: SweepAxis, value: f64, ctx: &SweepContext, shared_env: Option<EnvRate>) -> Result<SweepValues> {
    let mut system = ctx.system;
    let mut drive = ctx.drive;
    let mut filter = ctx.filter;
    match axis {
        SweepAxis::G => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Domain(format!("coupling must be >= 0, got {value}")));
            }
            system.g = value;
        }
        SweepAxis::RS => drive = DriveSetting::Resonant { r_s: value },
        SweepAxis::Tau => {
            filter.tau = value;
            filter.validate()?;
        }
        SweepAxis::DriveG => {
            let omega_d = solve_resonant_drive(system.omega_q, system.omega_c, value)?;
            drive = DriveSetting::Explicit { omega_d, drive_g: value };
        }
    }
    let solution = resolve_drive(&system, &drive)?;
    let env = match shared_env {
        Some(env) => env,
        None => gamma_env(&ctx.spectrum, &filter, &ctx.quadrature)?,
    };
    let on = breakdown_with_env(&solution.frame, system.g, env, filter.tau, true, ctx.baseline);
    let off = breakdown_with_env(&solution.frame, system.g, env, filter.tau, false, ctx.baseline);
    Ok(SweepValues {
        gamma_c: on.gamma_c,
        gamma_e: env.value,
        gamma_c_wo: off.gamma_c,
        quad_abs_error: env.abs_error,
    })
}
