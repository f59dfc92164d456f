//! Cross-checks between the analytic bath rate and the discretized-bath
//! amplitude integration.

use std::time::Instant;

use zeno_core::decay::{gamma_cavity, gamma_env};
use zeno_core::oracle::{evolve_interval, stroboscopic_run, OracleSettings, SingleExcitationState};
use zeno_core::spectral::discretize_bath;
use zeno_core::*;

fn circuit_bath() -> SpectralDensity {
    SpectralDensity::LowFrequency { chi: 1e-4, lambda: 0.05 }
}

fn resonant_frame(g_s: f64) -> SqueezedFrame {
    SqueezedFrame { r_s: 0.0, delta_s: 1.0, g_s, delta_q: 1.0, delta_c: 1.0 }
}

#[test]
fn comb_rate_converges_to_continuum() {
    let f = FilterSpec::new(1.0, 1.0).unwrap();
    let exact = gamma_env(&circuit_bath(), &f, &QuadratureSettings::default()).unwrap().value;
    let bath = discretize_bath(&circuit_bath(), &f, &CombSettings::default()).unwrap();
    let comb = gamma_env(&bath.as_spectrum(), &f, &QuadratureSettings::default()).unwrap().value;
    assert!((comb / exact - 1.0).abs() < 5e-3, "{comb} vs {exact}");

    let hydrogen = SpectralDensity::HydrogenLike { eta: 6.4e-9, omega_s: 550.0 };
    let exact = gamma_env(&hydrogen, &f, &QuadratureSettings::default()).unwrap().value;
    // hydrogen's rate collects weight up to the cutoff, far outside 40 lobes
    let settings = CombSettings { lobes_each_side: 400, ..CombSettings::default() };
    let bath = discretize_bath(&hydrogen, &f, &settings).unwrap();
    let comb = gamma_env(&bath.as_spectrum(), &f, &QuadratureSettings::default()).unwrap().value;
    assert!((comb / exact - 1.0).abs() < 5e-3, "{comb} vs {exact}");
}

#[test]
fn bath_only_decay_matches_rate() {
    let f = FilterSpec::new(1.0, 1.0).unwrap();
    let env = gamma_env(&circuit_bath(), &f, &QuadratureSettings::default()).unwrap().value;
    let bath = discretize_bath(&circuit_bath(), &f, &CombSettings::default()).unwrap();
    let frame = resonant_frame(0.0);
    let dt = zeno_core::oracle::default_dt_max(&frame, &bath);
    let s = evolve_interval(&SingleExcitationState::excited(bath.len()), &frame, &bath, 1.0, dt).unwrap();
    let decayed = 1.0 - s.survival();
    assert!((decayed / env - 1.0).abs() < 0.02, "{decayed} vs {env}");
    assert!((s.norm_sqr() - 1.0).abs() <= 1e-9);
}

#[test]
fn stroboscopic_rate_matches_analytic() {
    let start = Instant::now();
    let f = FilterSpec::new(1.0, 1.0).unwrap();
    let frame = resonant_frame(0.01);
    let env = gamma_env(&circuit_bath(), &f, &QuadratureSettings::default()).unwrap().value;
    let analytic = gamma_cavity(&frame, 1.0) + env;
    assert!(analytic * 1.0 <= 1e-3);

    let bath = discretize_bath(&circuit_bath(), &f, &CombSettings::default()).unwrap();
    let run = stroboscopic_run(&frame, &bath, &MeasurementProtocol { tau: 1.0, n: 10 }, &OracleSettings::default()).unwrap();
    let dev = run.gamma_effective / analytic - 1.0;
    println!("oracle {:.6e} analytic {:.6e} rel dev {dev:.3e} norm drift {:.1e} in {:?}",
        run.gamma_effective, analytic, run.max_norm_drift, start.elapsed());
    assert!(dev.abs() < 0.05);
    assert!(run.max_norm_drift <= 1e-9);

    // short-time law on the first interval
    let first_loss = 1.0 - run.interval_survival[0];
    assert!((first_loss - analytic).abs() <= 0.05 * analytic);
}
