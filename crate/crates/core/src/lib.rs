//! Measurement-induced decay of a two-level system coupled to a parametrically
//! driven (squeezed) cavity and a dissipative bath.
//!
//! The analytic rates in [`decay`] are cross-checked by [`oracle`], which
//! integrates the single-excitation amplitudes against a discretized bath and
//! applies stroboscopic projective measurements.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decay;
pub mod error;
pub mod frame;
pub mod oracle;
pub mod quadrature;
pub mod scenarios;
pub mod spectral;

pub use decay::{
    decay_breakdown, decay_pair, gamma_cavity, gamma_env, parameter_sweep, survival_probability, Baseline,
    DecayBreakdown, DrivePair, EnvRate, MeasurementProtocol, QuadratureSettings, SurvivalCurve, SweepAxis,
    SweepContext, SweepRow, SweepValues,
};
pub use error::{Error, Result};
pub use frame::{
    resolve_drive, resonant_design, rotating_detunings, solve_resonant_drive, squeeze_parameter, squeezed_frame,
    DriveSetting, DriveSolution, LabFrameParams, RotatingFrameParams, SqueezedFrame, SystemParams,
};
pub use oracle::{stroboscopic_run, OracleRun, OracleSettings, SingleExcitationState};
pub use scenarios::Scenario;
pub use spectral::{
    discretize_bath, filter_lobes, BathDiscretization, CombSettings, CombWeights, FilterSpec, SincConvention,
    SpectralDensity,
};
