use thiserror::Error;

/// Errors raised by the rate calculations and the amplitude integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters outside the physically valid domain (e.g. drive at or past threshold).
    #[error("domain error: {0}")]
    Domain(String),

    /// Frequency outside the range covered by a tabulated spectrum.
    #[error("range error: omega = {omega} outside table range [{lo}, {hi}]")]
    Range { omega: f64, lo: f64, hi: f64 },

    /// Operation not defined for this spectral density variant.
    #[error("variant error: {0}")]
    Variant(&'static str),

    /// Lobe summation did not reach the requested tolerance.
    #[error("convergence error: tail bound {tail_bound:e} above target {target:e} after {lobes} lobes")]
    Convergence {
        lobes: usize,
        tail_bound: f64,
        target: f64,
    },

    /// State norm drifted, usually because the step bound is too coarse.
    #[error("norm drift error: |norm - 1| = {drift:e} at t = {t}")]
    NormDrift { drift: f64, t: f64 },

    /// Malformed tabulated-spectrum input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected} bath amplitudes, got {got}")]
    Dimension { expected: usize, got: usize },
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Range { .. } => "range",
            Error::Variant(_) => "variant",
            Error::Convergence { .. } => "convergence",
            Error::NormDrift { .. } => "norm-drift",
            Error::Parse { .. } => "parse",
            Error::Dimension { .. } => "dimension",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::NormDrift { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
