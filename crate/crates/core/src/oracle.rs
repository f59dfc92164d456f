//! Brute-force check of the analytic rates: the single-excitation amplitudes
//! are integrated against a discretized bath and interrupted by projective
//! measurements at fixed intervals.
//!
//! Amplitudes are stored in the interaction picture, whose phases only involve
//! `delta_s - delta_q` and `omega_k - omega_q`. The picture's time origin is
//! the last reset (`epoch`); moving it changes amplitude phases, never
//! populations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decay::{MeasurementProtocol, SurvivalCurve};
use crate::error::{Error, Result};
use crate::frame::SqueezedFrame;
use crate::spectral::BathDiscretization;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Evolution aborts once `|norm - 1|` exceeds this.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationState {
    /// `|e, 0, {0}>`
    pub alpha: Complex64,
    /// `|g, 1, {0}>`
    pub beta: Complex64,
    /// `|g, 0, 1_k>`, one per bath mode
    pub gamma: Vec<Complex64>,
    pub t: f64,
    pub epoch: f64,
}

impl SingleExcitationState {
    /// Qubit excited, cavity and bath empty, at `t = 0`.
    pub fn excited(modes: usize) -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            gamma: vec![Complex64::new(0.0, 0.0); modes],
            t: 0.0,
            epoch: 0.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr() + self.gamma.iter().map(|g| g.norm_sqr()).sum::<f64>()
    }

    pub fn survival(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

/// Time derivatives of the three amplitude groups.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeRates {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Vec<Complex64>,
}

/// Which picture the integrator stores amplitudes in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Picture {
    /// Rotating with each basis state's own energy (time-dependent couplings).
    #[default]
    Interaction,
    /// Energies measured from `|e>`; constant coefficients, fast phases.
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSettings {
    /// Upper bound on the integrator step; `None` picks one from the fastest scale.
    #[serde(default)]
    pub dt_max: Option<f64>,
    #[serde(default)]
    pub picture: Picture,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { dt_max: None, picture: Picture::Interaction }
    }
}

/// Right-hand sides of the interaction-picture amplitude equations at the state's time.
pub fn amplitude_derivatives(
    state: &SingleExcitationState,
    frame: &SqueezedFrame,
    bath: &BathDiscretization,
) -> Result<AmplitudeRates> {
    check_dims(state, bath)?;
    let s = state.t - state.epoch;
    let cavity_phase = Complex64::from_polar(1.0, frame.mode_detuning() * s);
    let mut alpha = -I * frame.g_s * state.beta * cavity_phase.conj();
    let mut gamma = Vec::with_capacity(bath.len());
    for (&(omega, f), amp) in bath.modes.iter().zip(&state.gamma) {
        let phase = Complex64::from_polar(1.0, (omega - bath.center) * s);
        alpha += -I * f * amp * phase.conj();
        gamma.push(-I * f * state.alpha * phase);
    }
    let beta = -I * frame.g_s * state.alpha * cavity_phase;
    Ok(AmplitudeRates { alpha, beta, gamma })
}

fn check_dims(state: &SingleExcitationState, bath: &BathDiscretization) -> Result<()> {
    if state.gamma.len() != bath.len() {
        return Err(Error::Dimension { expected: bath.len(), got: state.gamma.len() });
    }
    Ok(())
}

/// Step bound resolving both the Rabi frequency and the fastest phase.
pub fn default_dt_max(frame: &SqueezedFrame, bath: &BathDiscretization) -> f64 {
    let coupling = frame.g_s.max(bath.total_weight().sqrt());
    let spread = bath
        .modes
        .iter()
        .map(|m| (m.0 - bath.center).abs())
        .fold(frame.mode_detuning().abs(), f64::max);
    (0.02 / coupling).min(0.02 / spread)
}

/// Flattened amplitudes `[alpha, beta, gamma_1, ...]` and the RK4 scratch space.
struct Integrator<'a> {
    frame: &'a SqueezedFrame,
    couplings: Vec<f64>,
    detunings: Vec<f64>,
    picture: Picture,
    /// `e^{i d_k h / 2}` for stepping phasors between stage times.
    half_turns: Vec<Complex64>,
    phasors: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
    scratch: Vec<Complex64>,
}

impl<'a> Integrator<'a> {
    fn new(frame: &'a SqueezedFrame, bath: &BathDiscretization, h: f64, picture: Picture) -> Self {
        let detunings: Vec<f64> = bath.modes.iter().map(|m| m.0 - bath.center).collect();
        let couplings = bath.modes.iter().map(|m| m.1).collect();
        let half_turns = detunings.iter().map(|&d| Complex64::from_polar(1.0, 0.5 * d * h)).collect();
        let n = detunings.len() + 2;
        Self {
            frame,
            couplings,
            phasors: vec![Complex64::new(1.0, 0.0); detunings.len()],
            detunings,
            picture,
            half_turns,
            k: std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]),
            scratch: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    fn rhs(&self, s: f64, y: &[Complex64], out: &mut [Complex64]) {
        let g_s = self.frame.g_s;
        let delta = self.frame.mode_detuning();
        let (alpha, beta) = (y[0], y[1]);
        match self.picture {
            Picture::Interaction => {
                let cavity = Complex64::from_polar(1.0, delta * s);
                let mut acc = g_s * beta * cavity.conj();
                for (j, ((&f, p), amp)) in self.couplings.iter().zip(&self.phasors).zip(&y[2..]).enumerate() {
                    acc += f * amp * p.conj();
                    out[j + 2] = -I * f * alpha * p;
                }
                out[0] = -I * acc;
                out[1] = -I * g_s * alpha * cavity;
            }
            Picture::Schrodinger => {
                let mut acc = g_s * beta;
                for (j, ((&f, &d), amp)) in self.couplings.iter().zip(&self.detunings).zip(&y[2..]).enumerate() {
                    acc += f * amp;
                    out[j + 2] = -I * (d * amp + f * alpha);
                }
                out[0] = -I * acc;
                out[1] = -I * (delta * beta + g_s * alpha);
            }
        }
    }

    fn set_phasors(&mut self, s: f64) {
        if self.picture == Picture::Interaction {
            for (p, &d) in self.phasors.iter_mut().zip(&self.detunings) {
                *p = Complex64::from_polar(1.0, d * s);
            }
        }
    }

    fn advance_phasors(&mut self) {
        if self.picture == Picture::Interaction {
            for (p, r) in self.phasors.iter_mut().zip(&self.half_turns) {
                *p *= r;
            }
        }
    }

    /// Classical RK4 step from local time `s`.
    fn step(&mut self, s: f64, h: f64, y: &mut [Complex64]) {
        let mut k = std::mem::take(&mut self.k);
        let mut scratch = std::mem::take(&mut self.scratch);
        self.set_phasors(s);
        self.rhs(s, y, &mut k[0]);
        self.advance_phasors();
        for i in 0..y.len() {
            scratch[i] = y[i] + 0.5 * h * k[0][i];
        }
        self.rhs(s + 0.5 * h, &scratch, &mut k[1]);
        for i in 0..y.len() {
            scratch[i] = y[i] + 0.5 * h * k[1][i];
        }
        self.rhs(s + 0.5 * h, &scratch, &mut k[2]);
        self.advance_phasors();
        for i in 0..y.len() {
            scratch[i] = y[i] + h * k[2][i];
        }
        self.rhs(s + h, &scratch, &mut k[3]);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        self.k = k;
        self.scratch = scratch;
    }
}

/// Fixed-step RK4 over one measurement interval, interaction picture.
pub fn evolve_interval(
    state: &SingleExcitationState,
    frame: &SqueezedFrame,
    bath: &BathDiscretization,
    tau: f64,
    dt_max: f64,
) -> Result<SingleExcitationState> {
    evolve_interval_in(state, frame, bath, tau, dt_max, Picture::Interaction)
}

/// As [`evolve_interval`], with the storage picture chosen explicitly.
///
/// A Schrödinger-picture state holds `c_j e^{-i E_j (t - epoch)}` where the
/// interaction-picture state holds `c_j`.
pub fn evolve_interval_in(
    state: &SingleExcitationState,
    frame: &SqueezedFrame,
    bath: &BathDiscretization,
    tau: f64,
    dt_max: f64,
    picture: Picture,
) -> Result<SingleExcitationState> {
    check_dims(state, bath)?;
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Domain(format!("interval must be > 0, got {tau}")));
    }
    if !(dt_max > 0.0) {
        return Err(Error::Domain(format!("step bound must be > 0, got {dt_max}")));
    }
    let steps = (tau / dt_max).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    let mut y = Vec::with_capacity(bath.len() + 2);
    y.push(state.alpha);
    y.push(state.beta);
    y.extend_from_slice(&state.gamma);

    let initial_norm = state.norm_sqr();
    let start = state.t - state.epoch;
    let mut integrator = Integrator::new(frame, bath, h, picture);
    for j in 0..steps {
        integrator.step(start + h * j as f64, h, &mut y);
    }
    let next = SingleExcitationState {
        alpha: y[0],
        beta: y[1],
        gamma: y[2..].to_vec(),
        t: state.t + tau,
        epoch: state.epoch,
    };
    let drift = (next.norm_sqr() - initial_norm).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift { drift, t: next.t });
    }
    Ok(next)
}

/// Projects onto `|e, 0, {0}>`: returns `|alpha|^2` and the renormalized
/// survived branch, restarting the picture clock at the current time.
pub fn projective_measurement(state: &SingleExcitationState) -> (f64, SingleExcitationState) {
    let mut reset = SingleExcitationState::excited(state.gamma.len());
    reset.t = state.t;
    reset.epoch = state.t;
    (state.survival(), reset)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRun {
    pub survival: SurvivalCurve,
    /// `-ln P(n tau) / (n tau)`
    pub gamma_effective: f64,
    /// `|alpha(tau)|^2` before each measurement.
    pub interval_survival: Vec<f64>,
    pub max_norm_drift: f64,
    pub dt: f64,
    pub frame: SqueezedFrame,
    pub protocol: MeasurementProtocol,
    pub bath_modes: usize,
}

pub fn stroboscopic_run(
    frame: &SqueezedFrame,
    bath: &BathDiscretization,
    proto: &MeasurementProtocol,
    settings: &OracleSettings,
) -> Result<OracleRun> {
    proto.validate()?;
    let dt_max = settings.dt_max.unwrap_or_else(|| default_dt_max(frame, bath)).min(proto.tau);
    let steps = (proto.tau / dt_max).ceil().max(1.0);
    let mut state = SingleExcitationState::excited(bath.len());
    let mut times = vec![0.0];
    let mut probabilities = vec![1.0];
    let mut interval_survival = Vec::with_capacity(proto.n);
    let mut max_norm_drift: f64 = 0.0;
    for m in 1..=proto.n {
        let evolved = evolve_interval_in(&state, frame, bath, proto.tau, dt_max, settings.picture)?;
        max_norm_drift = max_norm_drift.max((evolved.norm_sqr() - 1.0).abs());
        let (p, reset) = projective_measurement(&evolved);
        interval_survival.push(p);
        probabilities.push(probabilities[m - 1] * p);
        times.push(m as f64 * proto.tau);
        state = reset;
    }
    let total_time = proto.n as f64 * proto.tau;
    let gamma_effective = -probabilities[proto.n].ln() / total_time;
    Ok(OracleRun {
        survival: SurvivalCurve { times, probabilities },
        gamma_effective,
        interval_survival,
        max_norm_drift,
        dt: proto.tau / steps,
        frame: *frame,
        protocol: *proto,
        bath_modes: bath.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn resonant(g_s: f64) -> SqueezedFrame {
        SqueezedFrame { r_s: 0.0, delta_s: 1.0, g_s, delta_q: 1.0, delta_c: 1.0 }
    }

    fn comb(modes: Vec<(f64, f64)>) -> BathDiscretization {
        BathDiscretization { modes, window: (0.0, 2.0), delta_omega: 0.1, center: 1.0 }
    }

    #[test]
    fn derivatives_at_initial_state() {
        let bath = comb(vec![(0.8, 0.01), (1.3, 0.02)]);
        let state = SingleExcitationState::excited(2);
        let d = amplitude_derivatives(&state, &resonant(0.3), &bath).unwrap();
        assert_eq!(d.alpha, Complex64::new(0.0, 0.0));
        assert_eq!(d.beta, -I * 0.3);
        assert_eq!(d.gamma, vec![-I * 0.01, -I * 0.02]);

        let empty = BathDiscretization::empty(1.0);
        let d = amplitude_derivatives(&SingleExcitationState::excited(0), &resonant(0.0), &empty).unwrap();
        assert_eq!((d.alpha, d.beta), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        assert!(d.gamma.is_empty());
    }

    #[test]
    fn derivative_phase() {
        let bath = comb(vec![(1.5, 0.01)]);
        let mut state = SingleExcitationState::excited(1);
        state.alpha = Complex64::new(0.6, 0.8);
        state.t = PI;
        let d = amplitude_derivatives(&state, &resonant(0.0), &bath).unwrap();
        // -i * 0.01 * alpha * e^{i pi / 2} = 0.01 * alpha
        let want = 0.01 * state.alpha;
        assert!((d.gamma[0] - want).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let bath = comb(vec![(1.5, 0.01)]);
        let state = SingleExcitationState::excited(3);
        assert!(matches!(
            amplitude_derivatives(&state, &resonant(0.1), &bath),
            Err(Error::Dimension { expected: 1, got: 3 })
        ));
        assert!(evolve_interval(&state, &resonant(0.1), &bath, 1.0, 0.1).is_err());
    }

    #[test]
    fn vacuum_rabi_closed_form() {
        let bath = BathDiscretization::empty(1.0);
        let frame = resonant(0.7);
        let dt = default_dt_max(&frame, &bath);
        for tau in [0.1, 0.5, 1.0, 2.0, PI / 0.7] {
            let s = evolve_interval(&SingleExcitationState::excited(0), &frame, &bath, tau, dt).unwrap();
            let want = (0.7 * tau).cos().powi(2);
            assert!((s.survival() - want).abs() < 1e-8, "{tau}");
            assert_eq!(s.t, tau);
        }
        let s = evolve_interval(&SingleExcitationState::excited(0), &frame, &bath, PI / 1.4, dt).unwrap();
        assert!(s.survival() < 1e-8);
    }

    #[test]
    fn measurement_resets() {
        let mut state = SingleExcitationState::excited(2);
        let (p, reset) = projective_measurement(&state);
        assert_eq!(p, 1.0);
        assert_eq!(reset, state);

        state.alpha = Complex64::new(0.0, 0.0);
        state.beta = Complex64::new(1.0, 0.0);
        state.t = 2.5;
        let (p, reset) = projective_measurement(&state);
        assert_eq!(p, 0.0);
        assert_eq!(reset.alpha, Complex64::new(1.0, 0.0));
        assert_eq!(reset.t, 2.5);
        assert_eq!(reset.norm_sqr(), 1.0);

        state.alpha = Complex64::new(0.75f64.sqrt(), 0.0);
        state.beta = Complex64::new(0.0, 0.5);
        let (p, _) = projective_measurement(&state);
        assert_relative_eq!(p, 0.75, max_relative = 1e-15);
    }

    #[test]
    fn stroboscopic_rabi_power_law() {
        let bath = BathDiscretization::empty(1.0);
        let frame = resonant(0.4);
        let proto = MeasurementProtocol { tau: 0.3, n: 6 };
        let run = stroboscopic_run(&frame, &bath, &proto, &OracleSettings::default()).unwrap();
        let p1 = (0.4f64 * 0.3).cos().powi(2);
        for (m, p) in run.survival.probabilities.iter().enumerate() {
            assert!((p - p1.powi(m as i32)).abs() < 1e-8);
        }
        assert_relative_eq!(run.gamma_effective, -p1.ln() / 0.3, max_relative = 1e-7);
    }

    #[test]
    fn single_interval_equals_evolve_then_measure() {
        let bath = comb(vec![(0.5, 0.05), (1.2, 0.03), (1.9, 0.02)]);
        let frame = resonant(0.1);
        let proto = MeasurementProtocol { tau: 1.0, n: 1 };
        let settings = OracleSettings { dt_max: Some(0.01), ..Default::default() };
        let run = stroboscopic_run(&frame, &bath, &proto, &settings).unwrap();
        let s = evolve_interval(&SingleExcitationState::excited(3), &frame, &bath, 1.0, 0.01).unwrap();
        assert_eq!(run.survival.probabilities[1], projective_measurement(&s).0);
    }

    #[test]
    fn product_structure_is_exact() {
        let bath = comb((0..40).map(|k| (0.05 * k as f64, 0.01)).collect());
        let frame = SqueezedFrame { delta_s: 1.3, ..resonant(0.05) };
        let proto = MeasurementProtocol { tau: 0.7, n: 12 };
        let run = stroboscopic_run(&frame, &bath, &proto, &OracleSettings::default()).unwrap();
        let p1 = run.interval_survival[0];
        for (m, p) in run.survival.probabilities.iter().enumerate() {
            assert_relative_eq!(*p, p1.powi(m as i32), max_relative = 1e-12);
        }
    }

    #[test]
    fn coarse_steps_trigger_norm_drift() {
        let bath = comb(vec![(41.0, 0.3)]);
        let r = evolve_interval(&SingleExcitationState::excited(1), &resonant(0.0), &bath, 5.0, 0.2);
        assert!(matches!(r, Err(Error::NormDrift { .. })));
    }

    #[test]
    fn fourth_order_convergence() {
        let bath = comb(vec![(0.2, 0.3), (1.7, 0.4)]);
        let frame = SqueezedFrame { delta_s: 1.5, ..resonant(0.8) };
        let run = |dt: f64| evolve_interval(&SingleExcitationState::excited(2), &frame, &bath, 2.0, dt).unwrap().survival();
        let (a, b, c) = (run(0.08), run(0.04), run(0.02));
        let ratio = (a - b).abs() / (b - c).abs();
        assert!((12.0..20.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn pictures_agree_on_populations() {
        let bath = comb((0..60).map(|k| (0.1 * k as f64, 0.02)).collect());
        let frame = SqueezedFrame { delta_s: 1.4, ..resonant(0.1) };
        let dt = 0.25 * default_dt_max(&frame, &bath);
        let mut a = SingleExcitationState::excited(bath.len());
        let mut b = a.clone();
        for _ in 0..8 {
            a = evolve_interval_in(&a, &frame, &bath, 0.5, dt, Picture::Interaction).unwrap();
            b = evolve_interval_in(&b, &frame, &bath, 0.5, dt, Picture::Schrodinger).unwrap();
            assert!((a.survival() - b.survival()).abs() < 1e-10);
            assert!((a.beta.norm_sqr() - b.beta.norm_sqr()).abs() < 1e-10);
        }
    }
}
