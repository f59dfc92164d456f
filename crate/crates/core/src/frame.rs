//! Rotating-frame detunings and the Bogoliubov squeezing of the cavity mode.
//!
//! Every frequency here is expressed in units of the two-level transition
//! frequency, so `omega_q` is normally `1.0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bare model parameters: qubit, cavity, parametric drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabFrameParams {
    pub omega_q: f64,
    pub omega_c: f64,
    pub omega_d: f64,
    pub g: f64,
    pub drive_g: f64,
}

impl LabFrameParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("omega_q", self.omega_q),
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
            ("g", self.g),
            ("drive_g", self.drive_g),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")));
            }
        }
        let delta_c = self.omega_c - 0.5 * self.omega_d;
        if self.drive_g >= delta_c {
            return Err(Error::Domain(format!(
                "drive amplitude {} at or above cavity detuning {delta_c}: squeezed mode unstable",
                self.drive_g
            )));
        }
        Ok(())
    }
}

/// Detunings in the frame rotating at half the drive frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatingFrameParams {
    pub delta_q: f64,
    pub delta_c: f64,
    pub g: f64,
}

/// Parameters of the Hamiltonian after the squeezing transformation.
///
/// `delta_c` is carried along so the undriven cavity can be recovered from
/// the frame (`delta_c = delta_s * cosh(2 r_s)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedFrame {
    pub r_s: f64,
    pub delta_s: f64,
    pub g_s: f64,
    pub delta_q: f64,
    pub delta_c: f64,
}

impl SqueezedFrame {
    /// Builds the frame directly from the squeezing parameter.
    ///
    /// Near threshold the drive amplitude and cavity detuning agree to more
    /// digits than an `f64` holds (at `r_s = 10` they differ by ~4e-18
    /// relative), so large squeezing has to be specified through `r_s`.
    pub fn from_squeezing(r_s: f64, delta_c: f64, delta_q: f64, g: f64) -> Result<Self> {
        if !(r_s.is_finite() && r_s >= 0.0) {
            return Err(Error::Domain(format!("squeezing parameter must be finite and >= 0, got {r_s}")));
        }
        if !(delta_c.is_finite() && delta_c > 0.0) {
            return Err(Error::Domain(format!("cavity detuning must be > 0, got {delta_c}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("coupling must be finite and >= 0, got {g}")));
        }
        Ok(Self {
            r_s,
            delta_s: delta_c / (2.0 * r_s).cosh(),
            g_s: g * r_s.cosh(),
            delta_q,
            delta_c,
        })
    }

    /// Drive amplitude implied by the frame, `delta_s * sinh(2 r_s)`.
    pub fn drive_amplitude(&self) -> f64 {
        self.delta_s * (2.0 * self.r_s).sinh()
    }

    /// Detuning of the squeezed mode from the qubit, `delta_s - delta_q`.
    pub fn mode_detuning(&self) -> f64 {
        self.delta_s - self.delta_q
    }

    /// Large-squeezing approximation of the enhancement, `e^{r_s} / 2`.
    /// Diagnostic only; `g_s` always uses `cosh(r_s)`.
    pub fn asymptotic_enhancement(&self) -> f64 {
        0.5 * self.r_s.exp()
    }
}

pub fn rotating_detunings(lab: &LabFrameParams) -> RotatingFrameParams {
    let half_drive = 0.5 * lab.omega_d;
    RotatingFrameParams {
        delta_q: lab.omega_q - half_drive,
        delta_c: lab.omega_c - half_drive,
        g: lab.g,
    }
}

/// `r_s = (1/4) ln[(delta_c + G) / (delta_c - G)]`, evaluated as `atanh(G / delta_c) / 2`.
pub fn squeeze_parameter(delta_c: f64, drive_g: f64) -> Result<f64> {
    check_drive(delta_c, drive_g)?;
    Ok(0.5 * (drive_g / delta_c).atanh())
}

/// Squeezing parameter from the distance to threshold, `gap = delta_c - G`.
///
/// Resolves gaps far below the `f64` spacing of `delta_c`.
pub fn squeeze_parameter_from_gap(delta_c: f64, gap: f64) -> Result<f64> {
    if !(delta_c.is_finite() && delta_c > 0.0) {
        return Err(Error::Domain(format!("cavity detuning must be > 0, got {delta_c}")));
    }
    if !(gap > 0.0 && gap <= delta_c) {
        return Err(Error::Domain(format!("threshold gap must lie in (0, delta_c], got {gap}")));
    }
    Ok(0.25 * ((2.0 * delta_c - gap) / gap).ln())
}

pub fn squeezed_frame(rot: &RotatingFrameParams, drive_g: f64) -> Result<SqueezedFrame> {
    let r_s = squeeze_parameter(rot.delta_c, drive_g)?;
    if !(rot.g.is_finite() && rot.g >= 0.0) {
        return Err(Error::Domain(format!("coupling must be finite and >= 0, got {}", rot.g)));
    }
    // factored form keeps precision close to threshold
    let delta_s = ((rot.delta_c - drive_g) * (rot.delta_c + drive_g)).sqrt();
    Ok(SqueezedFrame {
        r_s,
        delta_s,
        g_s: rot.g * r_s.cosh(),
        delta_q: rot.delta_q,
        delta_c: rot.delta_c,
    })
}

/// Drive frequency that puts the squeezed mode on resonance with the qubit
/// (`delta_s = delta_q`) for a given pump amplitude.
pub fn solve_resonant_drive(omega_q: f64, omega_c: f64, drive_g: f64) -> Result<f64> {
    let offset = omega_c - omega_q;
    if offset == 0.0 {
        return Err(Error::Domain(
            "cavity degenerate with qubit: resonance with the squeezed mode forces zero drive".into(),
        ));
    }
    if !(drive_g.is_finite() && drive_g >= 0.0) {
        return Err(Error::Domain(format!("drive amplitude must be finite and >= 0, got {drive_g}")));
    }
    let ratio = drive_g * drive_g / offset;
    let delta_q = 0.5 * (ratio - offset);
    let delta_c = 0.5 * (ratio + offset);
    if delta_q <= 0.0 || delta_c <= drive_g {
        return Err(Error::Domain(format!(
            "no stable resonant drive for omega_c - omega_q = {offset} and G = {drive_g}"
        )));
    }
    Ok(2.0 * (omega_c - delta_c))
}

/// How the parametric drive is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DriveSetting {
    /// Squeezing `r_s` with the drive frequency chosen so `delta_s = delta_q`.
    Resonant { r_s: f64 },
    /// Explicit pump frequency and amplitude.
    Explicit { omega_d: f64, drive_g: f64 },
}

/// Qubit and cavity parameters that do not depend on the drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub omega_q: f64,
    pub omega_c: f64,
    pub g: f64,
}

/// A resolved drive: lab-frame parameters and the matching squeezed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSolution {
    pub lab: LabFrameParams,
    pub frame: SqueezedFrame,
}

/// Resonant construction from `r_s`: `delta_s = delta_q = (omega_c - omega_q) / (2 sinh^2 r_s)`.
pub fn resonant_design(system: &SystemParams, r_s: f64) -> Result<DriveSolution> {
    let offset = system.omega_c - system.omega_q;
    if !(r_s.is_finite() && r_s >= 0.0) {
        return Err(Error::Domain(format!("squeezing parameter must be finite and >= 0, got {r_s}")));
    }
    if r_s == 0.0 {
        if offset != 0.0 {
            return Err(Error::Domain(
                "without squeezing the cavity must be degenerate with the qubit for resonance".into(),
            ));
        }
        let lab = LabFrameParams {
            omega_q: system.omega_q,
            omega_c: system.omega_c,
            omega_d: 0.0,
            g: system.g,
            drive_g: 0.0,
        };
        lab.validate()?;
        let frame = squeezed_frame(&rotating_detunings(&lab), 0.0)?;
        return Ok(DriveSolution { lab, frame });
    }
    if offset <= 0.0 {
        return Err(Error::Domain(format!(
            "resonant squeezing needs omega_c > omega_q, got omega_c - omega_q = {offset}"
        )));
    }
    let sinh_r = r_s.sinh();
    let delta_q = offset / (2.0 * sinh_r * sinh_r);
    let delta_c = delta_q * (2.0 * r_s).cosh();
    let frame = SqueezedFrame::from_squeezing(r_s, delta_c, delta_q, system.g)?;
    let lab = LabFrameParams {
        omega_q: system.omega_q,
        omega_c: system.omega_c,
        omega_d: 2.0 * (system.omega_q - delta_q),
        g: system.g,
        drive_g: frame.drive_amplitude(),
    };
    Ok(DriveSolution { lab, frame })
}

/// Resolves a drive setting into lab-frame parameters and the squeezed frame.
pub fn resolve_drive(system: &SystemParams, drive: &DriveSetting) -> Result<DriveSolution> {
    match *drive {
        DriveSetting::Resonant { r_s } => resonant_design(system, r_s),
        DriveSetting::Explicit { omega_d, drive_g } => {
            let lab = LabFrameParams {
                omega_q: system.omega_q,
                omega_c: system.omega_c,
                omega_d,
                g: system.g,
                drive_g,
            };
            lab.validate()?;
            let frame = squeezed_frame(&rotating_detunings(&lab), drive_g)?;
            Ok(DriveSolution { lab, frame })
        }
    }
}

fn check_drive(delta_c: f64, drive_g: f64) -> Result<()> {
    if !(delta_c.is_finite() && delta_c > 0.0) {
        return Err(Error::Domain(format!("cavity detuning must be > 0, got {delta_c}")));
    }
    if !(drive_g.is_finite() && drive_g >= 0.0) {
        return Err(Error::Domain(format!("drive amplitude must be finite and >= 0, got {drive_g}")));
    }
    if drive_g >= delta_c {
        return Err(Error::Domain(format!(
            "drive amplitude {drive_g} at or above threshold delta_c = {delta_c}"
        )));
    }
    Ok(())
}
