//! Detected spectra against the covariance route: the integral of the
//! background-subtracted, gain-referred PSD must recover the steady-state
//! variance of the measured quadrature (Parseval), and every intermediate
//! object must stay physical.

mod common;

use common::*;
use std::f64::consts::TAU;

use qmfs::dynamics::{assemble_drift, output_routing, DetectionCavity};
use qmfs::model::{reference_config, QuadratureSelector, ToneSet};
use qmfs::scenarios::{measurement_preset, CoolingPreset, TOMOGRAPHY_COOPERATIVITY};
use qmfs::spectra::{
    calibrate_gain, fit_two_lorentzians, output_spectrum, variance_from_trace, FrequencyGrid,
};
use qmfs::steadystate::solve_lyapunov;

/// Plain trapezoid quadrature, no tail completion — the independent route.
fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += (y[i - 1] + y[i]) / 2.0 * (x[i] - x[i - 1]);
    }
    acc
}

#[test]
fn integrated_spectrum_recovers_the_lyapunov_variance() {
    let cfg = measurement_preset(CoolingPreset::Weak, TOMOGRAPHY_COOPERATIVITY);
    let valid = cfg.validate().unwrap();
    let model = assemble_drift(&valid).unwrap();
    let cov = solve_lyapunov(&model).unwrap();
    let x2 = cov.variance(&QuadratureSelector::X_PLUS);

    let map = output_routing(&model, DetectionCavity::Pump, 0.0).unwrap();
    let gain = calibrate_gain(&model, DetectionCavity::Pump).unwrap();

    // Independent route: a very wide, dense grid and a plain trapezoid —
    // no fits, no analytic tails. The floor is the known amplifier +
    // cavity-noise level.
    let gamma = model.gamma[0].max(model.gamma[1]);
    let grid = FrequencyGrid::centered(model.detuning + 4000.0 * gamma, 120_001);
    let trace = output_spectrum(&model, &map, &grid);
    let floor = model.n_amp + valid.config.pump_cavity.n_thermal + 0.5;
    let excess: Vec<f64> = trace.psd.iter().map(|s| s - floor).collect();
    let integral = trapezoid(&trace.omega, &excess) / (TAU * gain);
    assert!(
        (integral - x2).abs() / x2 < 5e-3,
        "wide-grid Parseval: {integral} vs {x2}"
    );

    // Library route on the default grid: fitted floor and tail completion
    // must reach the same variance despite a 60× narrower span.
    let default_grid = FrequencyGrid::for_model(&model);
    let default_trace = output_spectrum(&model, &map, &default_grid);
    let fit = fit_two_lorentzians(&default_trace).unwrap();
    let recovered = variance_from_trace(&default_trace, &fit, &model, DetectionCavity::Pump).unwrap();
    assert!(
        (recovered - x2).abs() / x2 < 5e-3,
        "default-grid recovery: {recovered} vs {x2}"
    );
}

#[test]
fn detected_floor_sits_at_the_amplifier_plus_vacuum_level() {
    // No tones at all: the port shows pure amplifier + cavity noise.
    let mut cfg = reference_config();
    cfg.probe_cavity = None;
    cfg.pump_tones = ToneSet::symmetric(10e3, 0.0, [0.0; 4]);
    cfg.pump_cavity.n_thermal = 0.23;
    let model = assemble_drift(&cfg.validate().unwrap()).unwrap();
    let map = output_routing(&model, DetectionCavity::Pump, 0.0).unwrap();
    let grid = FrequencyGrid::centered(TAU * 1e6, 101);
    let trace = output_spectrum(&model, &map, &grid);
    let expected = 30.0 + 0.23 + 0.5;
    for (i, s) in trace.psd.iter().enumerate() {
        assert!(
            (s - expected).abs() < 1e-9,
            "floor at point {i}: {s} vs {expected}"
        );
    }
}

#[test]
fn steady_states_along_a_cooperativity_scan_stay_physical() {
    for c in [0.1, 1.0, 10.0, 50.0] {
        let cfg = measurement_preset(CoolingPreset::Strong, c);
        let model = assemble_drift(&cfg.validate().unwrap()).unwrap();
        let cov = solve_lyapunov(&model).unwrap();
        let margin = uncertainty_margin(&cov.matrix);
        assert!(
            margin > -1e-9,
            "C = {c}: uncertainty margin {margin:.2e}"
        );
    }
}
