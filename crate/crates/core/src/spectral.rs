//! Bath spectral densities, the measurement filter and bath discretization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Coupling-weighted density of bath modes, `G(omega)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectralDensity {
    /// `eta * omega / [1 + (omega / omega_s)^2]^4`
    HydrogenLike { eta: f64, omega_s: f64 },
    /// `2 chi omega / (omega^2 + lambda^2)` (frequencies in units of omega_q)
    LowFrequency { chi: f64, lambda: f64 },
    /// Linearly interpolated `(omega, value)` samples.
    Tabulated { points: Vec<(f64, f64)> },
    /// Discrete modes `(omega_k, f_k)`.
    DiscreteComb { modes: Vec<(f64, f64)> },
}

impl SpectralDensity {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite and >= 0, got {v}")))
            }
        };
        match self {
            SpectralDensity::HydrogenLike { eta, omega_s } => {
                finite_nonneg("eta", *eta)?;
                if !(omega_s.is_finite() && *omega_s > 0.0) {
                    return Err(Error::Domain(format!("cutoff must be > 0, got {omega_s}")));
                }
            }
            SpectralDensity::LowFrequency { chi, lambda } => {
                finite_nonneg("chi", *chi)?;
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::Domain(format!("lambda must be > 0, got {lambda}")));
                }
            }
            SpectralDensity::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::Domain("tabulated spectrum needs at least two points".into()));
                }
                check_increasing(points, "tabulated omega")?;
                for &(w, v) in points {
                    finite_nonneg("tabulated omega", w)?;
                    finite_nonneg("tabulated value", v)?;
                }
            }
            SpectralDensity::DiscreteComb { modes } => {
                check_increasing(modes, "comb omega")?;
                for &(w, f) in modes {
                    finite_nonneg("comb omega", w)?;
                    finite_nonneg("comb coupling", f)?;
                }
            }
        }
        Ok(())
    }

    pub fn is_continuum(&self) -> bool {
        !matches!(self, SpectralDensity::DiscreteComb { .. })
    }

    /// Evaluates `G(omega)` for continuum variants.
    pub fn value(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("spectral density is defined for omega >= 0, got {omega}")));
        }
        match self {
            SpectralDensity::HydrogenLike { eta, omega_s } => {
                let u = omega / omega_s;
                Ok(eta * omega / (1.0 + u * u).powi(4))
            }
            SpectralDensity::LowFrequency { chi, lambda } => Ok(2.0 * chi * omega / (omega * omega + lambda * lambda)),
            SpectralDensity::Tabulated { points } => interpolate(points, omega),
            SpectralDensity::DiscreteComb { .. } => {
                Err(Error::Variant("a discrete comb has no pointwise density"))
            }
        }
    }

    /// Frequency range over which the density is non-zero.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SpectralDensity::Tabulated { points } => (points[0].0, points[points.len() - 1].0),
            SpectralDensity::DiscreteComb { modes } => match (modes.first(), modes.last()) {
                (Some(a), Some(b)) => (a.0, b.0),
                _ => (0.0, 0.0),
            },
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Upper bound on `G` over `[omega, inf)`.
    ///
    /// Both closed-form densities rise to a single maximum and decay after it
    /// (hydrogen-like at `omega_s / sqrt 7`, low-frequency at `lambda`).
    pub(crate) fn sup_beyond(&self, omega: f64) -> f64 {
        match self {
            SpectralDensity::HydrogenLike { omega_s, .. } => {
                self.value(omega.max(omega_s / 7f64.sqrt())).unwrap_or(0.0)
            }
            SpectralDensity::LowFrequency { lambda, .. } => self.value(omega.max(*lambda)).unwrap_or(0.0),
            SpectralDensity::Tabulated { points } => {
                let last = points[points.len() - 1].0;
                if omega >= last {
                    return 0.0;
                }
                let start = interpolate(points, omega.max(points[0].0)).unwrap_or(0.0);
                points
                    .iter()
                    .filter(|p| p.0 > omega)
                    .fold(start, |m, p| m.max(p.1))
            }
            SpectralDensity::DiscreteComb { .. } => 0.0,
        }
    }
}

fn check_increasing(points: &[(f64, f64)], what: &str) -> Result<()> {
    if points.windows(2).all(|w| w[0].0 < w[1].0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} values must be strictly increasing")))
    }
}

fn interpolate(points: &[(f64, f64)], omega: f64) -> Result<f64> {
    let lo = points[0].0;
    let hi = points[points.len() - 1].0;
    if omega < lo || omega > hi {
        return Err(Error::Range { omega, lo, hi });
    }
    let idx = points.partition_point(|p| p.0 <= omega);
    if idx >= points.len() {
        return Ok(points[points.len() - 1].1);
    }
    let (x0, y0) = points[idx - 1];
    let (x1, y1) = points[idx];
    Ok(y0 + (y1 - y0) * (omega - x0) / (x1 - x0))
}

/// Parses a two-column `omega value` table; `#` lines and blank lines are skipped.
pub fn parse_tabulated(text: &str) -> Result<SpectralDensity> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let mut next = |name: &str| -> Result<f64> {
            let tok = cols.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("missing {name} column"),
            })?;
            tok.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("bad {name} '{tok}': {e}"),
            })
        };
        let omega = next("omega")?;
        let value = next("value")?;
        if cols.next().is_some() {
            return Err(Error::Parse { line: i + 1, message: "expected exactly two columns".into() });
        }
        points.push((omega, value));
    }
    let spec = SpectralDensity::Tabulated { points };
    spec.validate()?;
    Ok(spec)
}

/// How `sinc` is normalised in the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SincConvention {
    /// `sin(x) / x`, the filter produced by the short-time expansion.
    #[default]
    Unnormalized,
    /// `sin(pi x) / (pi x)`.
    Normalized,
}

pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Measurement filter `F(omega) = (tau / 2 pi) sinc^2[(omega - omega_q) tau / 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub tau: f64,
    pub omega_q: f64,
    #[serde(default)]
    pub convention: SincConvention,
}

impl FilterSpec {
    pub fn new(tau: f64, omega_q: f64) -> Result<Self> {
        let f = Self { tau, omega_q, convention: SincConvention::Unnormalized };
        f.validate()?;
        Ok(f)
    }

    pub fn with_convention(self, convention: SincConvention) -> Self {
        Self { convention, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Domain(format!("measurement interval must be > 0, got {}", self.tau)));
        }
        if !self.omega_q.is_finite() {
            return Err(Error::Domain("filter center must be finite".into()));
        }
        Ok(())
    }

    /// `sinc^2` of the filter argument at `omega`.
    pub fn sinc_squared(&self, omega: f64) -> f64 {
        let x = 0.5 * (omega - self.omega_q) * self.tau;
        let s = match self.convention {
            SincConvention::Unnormalized => sinc(x),
            SincConvention::Normalized => sinc(PI * x),
        };
        s * s
    }

    pub fn value(&self, omega: f64) -> f64 {
        self.tau / (2.0 * PI) * self.sinc_squared(omega)
    }

    /// Distance between consecutive filter zeros.
    pub fn zero_spacing(&self) -> f64 {
        match self.convention {
            SincConvention::Unnormalized => 2.0 * PI / self.tau,
            SincConvention::Normalized => 2.0 / self.tau,
        }
    }

    /// Upper bound on `∫ tau sinc^2` over `|omega - omega_q| > distance`, one side.
    pub(crate) fn tail_weight(&self, distance: f64) -> f64 {
        let envelope = match self.convention {
            SincConvention::Unnormalized => 4.0,
            SincConvention::Normalized => 4.0 / (PI * PI),
        };
        envelope / (self.tau * distance)
    }
}

/// Splits `[omega_min, omega_q + max_lobes * spacing]` at the filter zeros.
pub fn filter_lobes(f: &FilterSpec, omega_min: f64, max_lobes: usize) -> Vec<(f64, f64)> {
    let spacing = f.zero_spacing();
    let right = f.omega_q + spacing * max_lobes as f64;
    if omega_min >= right {
        return Vec::new();
    }
    let mut breaks: Vec<f64> = (1..=max_lobes)
        .rev()
        .map(|n| f.omega_q - spacing * n as f64)
        .chain((1..=max_lobes).map(|n| f.omega_q + spacing * n as f64))
        .filter(|&w| w > omega_min)
        .collect();
    breaks.insert(0, omega_min);
    breaks.windows(2).map(|w| (w[0], w[1])).collect()
}

/// How comb couplings are derived from the continuum density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombWeights {
    /// `f_k^2 = G(omega_k) * delta_omega` at cell midpoints.
    Midpoint,
    /// `f_k^2 = ∫_cell G`, exact bath weight of each cell.
    #[default]
    CellIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombSettings {
    pub lobes_each_side: usize,
    pub modes_per_lobe: usize,
    #[serde(default)]
    pub weights: CombWeights,
}

impl Default for CombSettings {
    fn default() -> Self {
        Self { lobes_each_side: 40, modes_per_lobe: 80, weights: CombWeights::CellIntegral }
    }
}

/// A finite comb of bath modes standing in for a continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathDiscretization {
    /// `(omega_k, f_k)` at cell midpoints.
    pub modes: Vec<(f64, f64)>,
    pub window: (f64, f64),
    pub delta_omega: f64,
    /// Qubit frequency the mode detunings are measured from.
    pub center: f64,
}

impl BathDiscretization {
    pub fn empty(center: f64) -> Self {
        Self { modes: Vec::new(), window: (center, center), delta_omega: 0.0, center }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ f_k^2`
    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.1 * m.1).fold(0.0, |acc, w| acc + w)
    }

    pub fn as_spectrum(&self) -> SpectralDensity {
        SpectralDensity::DiscreteComb { modes: self.modes.clone() }
    }
}

pub fn discretize_bath(spec: &SpectralDensity, f: &FilterSpec, settings: &CombSettings) -> Result<BathDiscretization> {
    if !spec.is_continuum() {
        return Err(Error::Variant("cannot discretize a discrete comb"));
    }
    if settings.lobes_each_side == 0 || settings.modes_per_lobe == 0 {
        return Err(Error::Domain("lobe and mode counts must be >= 1".into()));
    }
    spec.validate()?;
    f.validate()?;
    let half_width = f.zero_spacing() * settings.lobes_each_side as f64;
    let (support_lo, support_hi) = spec.support();
    let lo = (f.omega_q - half_width).max(0.0).max(support_lo);
    let hi = (f.omega_q + half_width).min(support_hi);
    if hi <= lo {
        return Ok(BathDiscretization::empty(f.omega_q));
    }
    let cells = ((hi - lo) / f.zero_spacing() * settings.modes_per_lobe as f64).ceil() as usize;
    let delta_omega = (hi - lo) / cells as f64;
    let mut modes = Vec::with_capacity(cells);
    for k in 0..cells {
        let a = lo + delta_omega * k as f64;
        let b = if k + 1 == cells { hi } else { a + delta_omega };
        let omega = 0.5 * (a + b);
        let weight = match settings.weights {
            CombWeights::Midpoint => spec.value(omega)? * delta_omega,
            CombWeights::CellIntegral => {
                let g = |w: f64| spec.value(w).unwrap_or(0.0);
                quadrature::integrate(&g, a, b, 1e-12, 0.0, 200).value.max(0.0)
            }
        };
        modes.push((omega, weight.sqrt()));
    }
    Ok(BathDiscretization { modes, window: (lo, hi), delta_omega, center: f.omega_q })
}
