//! Preconfigured demonstration reports.
//!
//! Each scenario assembles a full measurement pipeline — config, steady
//! state, detected spectra, fits — around one headline result, and returns a
//! [`Report`] of numeric panels ready for CSV export. Next to every
//! simulated column the panels carry the corresponding closed-form overlay
//! from [`crate::budget`], so data/theory gaps stay visible; the overlays are
//! never fitted to the data.
//!
//! The four reports:
//!
//! * [`scenario_fig2`] — backaction evasion versus measurement strength: the
//!   measured collective quadrature stays at its thermal variance while the
//!   cooperativity scans orders of magnitude, and the inferred imprecision
//!   falls below the stationary quantum limit.
//! * [`scenario_fig3`] — tomography: rotating the measured axis away from
//!   the backaction-evaded quadrature exposes the conjugate pair heated by
//!   quantum and classical backaction; rotating the drive itself leaves the
//!   measured variance flat.
//! * [`scenario_fig4`] — collective dissipative squeezing: detuning the
//!   red/blue amplitude balance cools both commuting collective quadratures
//!   below vacuum, certified by the Duan quantity dropping under 1.
//! * [`scenario_force_sensing_note`] — a deterministic demo of coherent
//!   force detection through the evaded pair: linear response, zero force →
//!   zero signal, and SNR growing monotonically with cooperativity.
//!
//! All pipelines are seedless and deterministic: identical inputs render
//! byte-identical CSV.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use crate::budget;
use crate::dynamics::{assemble_drift, output_routing, DetectionCavity, LinearModel};
use crate::error::Result;
use crate::model::{reference_config, Collective, QuadratureSelector, SystemConfig, ToneSet};
use crate::spectra::{
    coherent_response, fit_two_lorentzians, output_spectrum, psd_at, FrequencyGrid,
    SpectralInference, SpectrumTrace, TwoPeakFit,
};
use crate::steadystate::{selector_vector, steady_state, Covariance};

/// Phase points per tomography sweep: 0..2π inclusive.
const PHASE_POINTS: usize = 33;

/// Probe power relative to the pump, in dB (amplitude ratio 10^(dB/20)).
pub const PROBE_ATTENUATION_DB: f64 = -15.0;

/// Pump cooperativity of the tomography preset.
pub const TOMOGRAPHY_COOPERATIVITY: f64 = 2.1;

/// Residual pump-cavity occupation of the tomography preset.
pub const TOMOGRAPHY_CAVITY_OCCUPATION: f64 = 0.23;

// ---------------------------------------------------------------------------
// report containers
// ---------------------------------------------------------------------------

/// One table of a scenario report: named columns over numeric rows.
#[derive(Debug, Clone, Serialize)]
pub struct Panel {
    /// File-stem-friendly name, unique within the report.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Panel {
            name: name.to_owned(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// All values of one column, by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Deterministic CSV rendering: a `#`-prefixed header line, then one
    /// comma-separated row per line. Floats use Rust's shortest round-trip
    /// formatting, so equal inputs give byte-identical output.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&self.columns.join(", "));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push_str(", ");
                }
                let _ = write!(out, "{v}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// A named bundle of panels produced by one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub panels: Vec<Panel>,
}

impl Report {
    pub fn panel(&self, name: &str) -> Option<&Panel> {
        self.panels.iter().find(|p| p.name == name)
    }
}

// ---------------------------------------------------------------------------
// presets and tone patterns
// ---------------------------------------------------------------------------

/// Mechanical starting point for the measurement scans: either the
/// moderately cooled regime (broad thermal peaks, low sideband frequency) or
/// the strongly cooled one (near ground state, well-separated sidebands).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoolingPreset {
    Weak,
    Strong,
}

impl CoolingPreset {
    /// Effective mechanical linewidth of both oscillators, Hz.
    pub fn gamma_hz(self) -> f64 {
        match self {
            CoolingPreset::Weak => 630.0,
            CoolingPreset::Strong => 4.6e3,
        }
    }

    /// Effective bath occupation of both oscillators.
    pub fn occupation(self) -> f64 {
        match self {
            CoolingPreset::Weak => 2.7,
            CoolingPreset::Strong => 0.5,
        }
    }

    /// Sideband (rotating-frame) frequency Ω/2π, Hz.
    pub fn sideband_hz(self) -> f64 {
        match self {
            CoolingPreset::Weak => 10e3,
            CoolingPreset::Strong => 200e3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CoolingPreset::Weak => "weak",
            CoolingPreset::Strong => "strong",
        }
    }
}

/// Tone amplitude (Hz) that realizes cooperativity `c` against a cavity of
/// total linewidth `kappa_hz` and an oscillator of linewidth `gamma_hz`.
pub fn amplitude_for_cooperativity(c: f64, kappa_hz: f64, gamma_hz: f64) -> f64 {
    (c * kappa_hz * gamma_hz / 4.0).sqrt()
}

/// Per-tone phases (θ1−, θ1+, θ2−, θ2+) that rotate the measured axis from
/// X₊ toward P₊ by `angle` (half-angle convention: the axis is
/// cos(angle/2)·X₊ + sin(angle/2)·P₊).
pub fn conjugate_plane_phases(angle: f64) -> [f64; 4] {
    [0.0, angle, 0.0, angle]
}

/// Per-tone phases that rotate the measured axis from X₊ toward P₋ by
/// `angle`, staying inside the commuting collective pair.
pub fn commuting_plane_phases(angle: f64) -> [f64; 4] {
    [0.0, angle, angle, 0.0]
}

fn probe_amplitude_ratio() -> f64 {
    10f64.powf(PROBE_ATTENUATION_DB / 20.0)
}

/// Balanced four-tone measurement of X₊ at cooperativity `c` on the chosen
/// cooling preset. Pump only; amplifier noise 30 quanta.
pub fn measurement_preset(cooling: CoolingPreset, c: f64) -> SystemConfig {
    let mut cfg = reference_config();
    cfg.probe_cavity = None;
    for m in &mut cfg.mechanical_modes {
        m.gamma_hz = cooling.gamma_hz();
        m.n_thermal = cooling.occupation();
    }
    let g_hz = amplitude_for_cooperativity(c, cfg.pump_cavity.kappa_hz(), cooling.gamma_hz());
    cfg.pump_tones = ToneSet::symmetric(cooling.sideband_hz(), g_hz, [0.0; 4]);
    cfg
}

/// Weak-preset measurement at the tomography cooperativity, with the pump
/// cavity's residual occupation. No probe.
fn tomography_base() -> SystemConfig {
    let mut cfg = measurement_preset(CoolingPreset::Weak, TOMOGRAPHY_COOPERATIVITY);
    cfg.pump_cavity.n_thermal = TOMOGRAPHY_CAVITY_OCCUPATION;
    cfg
}

/// Tomography configuration: strong pump measuring X₊, attenuated probe
/// reading the axis rotated by `probe_angle` in the {X₊, P₊} plane.
pub fn tomography_config(probe_angle: f64) -> SystemConfig {
    let mut cfg = tomography_base();
    cfg.probe_cavity = reference_config().probe_cavity;
    let g_probe = probe_amplitude_ratio() * cfg.pump_tones.tones[0].amplitude_hz;
    cfg.probe_tones = Some(ToneSet::symmetric(
        cfg.pump_tones.detuning_hz,
        g_probe,
        conjugate_plane_phases(probe_angle),
    ));
    cfg
}

// ---------------------------------------------------------------------------
// shared measurement pipeline
// ---------------------------------------------------------------------------

/// Everything read off one detected port: the raw trace, the two-Lorentzian
/// fit, the gain-referred levels, and the integrated variance.
#[derive(Debug, Clone)]
pub struct PortMeasurement {
    pub trace: SpectrumTrace,
    pub fit: TwoPeakFit,
    pub inference: SpectralInference,
    /// Integrated, gain-referred variance of the measured quadrature, quanta.
    pub variance: f64,
}

/// Run the full detection chain on one cavity port of an assembled model.
pub fn measure_port(model: &LinearModel, cavity: DetectionCavity) -> Result<PortMeasurement> {
    let map = output_routing(model, cavity, 0.0)?;
    let grid = FrequencyGrid::for_model(model);
    let trace = output_spectrum(model, &map, &grid);
    let fit = fit_two_lorentzians(&trace)?;
    let inference = crate::spectra::effective_occupation(&fit, model, cavity)?;
    let variance = crate::spectra::variance_from_trace(&trace, &fit, model, cavity)?;
    Ok(PortMeasurement {
        trace,
        fit,
        inference,
        variance,
    })
}

fn phase_grid() -> Vec<f64> {
    (0..PHASE_POINTS)
        .map(|i| TAU * i as f64 / (PHASE_POINTS - 1) as f64)
        .collect()
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Default cooperativity grid for [`scenario_fig2`]: 25 log-spaced points
/// covering 0.1–50.
pub fn default_cooperativity_grid() -> Vec<f64> {
    log_grid(0.1, 50.0, 25)
}

// ---------------------------------------------------------------------------
// scenario: backaction evasion vs cooperativity
// ---------------------------------------------------------------------------

/// Scan measurement strength at fixed thermal conditions.
///
/// One row per cooperativity: the measured collective variance both from the
/// integrated spectrum and directly from the steady-state covariance, the
/// effective (imprecision-included) variance and imprecision from the
/// Lorentzian fit, the fitted linewidths of both sidebands, and the analytic
/// overlays (backaction that a non-evading measurement would add, ideal
/// imprecision, thermal level, quantum limit).
///
/// Rows with `c = 0` have no sidebands to fit; their fit-derived columns are
/// NaN and their backaction overlay is exactly zero.
pub fn scenario_fig2(cooling: CoolingPreset, c_grid: &[f64]) -> Result<Report> {
    let mut panel = Panel::new(
        "cooperativity_scan",
        &[
            "cooperativity",
            "g_hz",
            "x2_spectrum",
            "x2_lyapunov",
            "x2_eff",
            "n_imp",
            "fwhm_left_hz",
            "fwhm_right_hz",
            "n_qba",
            "n_imp_budget",
            "thermal",
            "fql",
        ],
    );
    let thermal = budget::thermal_variance(cooling.occupation(), cooling.occupation());
    for &c in c_grid {
        let cfg = measurement_preset(cooling, c);
        let g_hz = cfg.pump_tones.tones[0].amplitude_hz;
        let n_amp = cfg.amplifier_noise;
        let (model, cov) = steady_state(&cfg.validate()?)?;
        let x2_lyapunov = cov.variance(&QuadratureSelector::X_PLUS);
        let (x2_spectrum, x2_eff, n_imp, fwhm_left, fwhm_right) = if c > 0.0 {
            let m = measure_port(&model, DetectionCavity::Pump)?;
            (
                m.variance,
                m.inference.x2_eff,
                m.inference.n_imp,
                m.fit.left.fwhm / TAU,
                m.fit.right.fwhm / TAU,
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };
        panel.push(vec![
            c,
            g_hz,
            x2_spectrum,
            x2_lyapunov,
            x2_eff,
            n_imp,
            fwhm_left,
            fwhm_right,
            budget::n_qba(c),
            budget::n_imp(c, n_amp),
            thermal,
            budget::FQL_EFFECTIVE_VARIANCE,
        ]);
    }
    Ok(Report {
        name: format!("fig2_{}", cooling.label()),
        panels: vec![panel],
    })
}

// ---------------------------------------------------------------------------
// scenario: tomography of the measured and conjugate planes
// ---------------------------------------------------------------------------

/// Which axis sweep a tomography report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fig3Sweep {
    /// Rotate the pump's own measured axis from X₊ toward P₊.
    XpToPp,
    /// Rotate the pump's own measured axis from X₊ toward P₋.
    XpToPm,
    /// Keep the pump on X₊; scan a weak probe across the {X₊, P₊} plane.
    Tomography,
}

impl Fig3Sweep {
    pub fn label(self) -> &'static str {
        match self {
            Fig3Sweep::XpToPp => "xp_to_pp",
            Fig3Sweep::XpToPm => "xp_to_pm",
            Fig3Sweep::Tomography => "tomography",
        }
    }
}

/// Phase sweeps around the backaction-evaded quadrature at the tomography
/// preset (cooperativity ≈ 2.1, ⟨X²⟩ᵀ ≈ 3.2).
///
/// The two pump-detected sweeps rotate the measurement axis itself; because
/// a balanced four-tone drive evades backaction on whatever axis it defines,
/// the measured variance stays flat at the thermal level for every phase.
/// The probe-detected tomography instead holds the strong pump on X₊ and
/// scans the probe axis toward P₊, exposing the conjugate-pair heating; its
/// overlay columns give the expected curve with and without the classical
/// (cavity-occupation) backaction, and `variance_ideal` is the same axis on
/// a probe-free model, isolating the probe's own backaction.
pub fn scenario_fig3(sweep: Fig3Sweep) -> Result<Report> {
    let report = match sweep {
        Fig3Sweep::XpToPp => pump_detected_sweep(sweep, Collective::PPlus)?,
        Fig3Sweep::XpToPm => pump_detected_sweep(sweep, Collective::PMinus)?,
        Fig3Sweep::Tomography => tomography_sweep()?,
    };
    Ok(report)
}

fn pump_detected_sweep(sweep: Fig3Sweep, toward: Collective) -> Result<Report> {
    let mut panel = Panel::new(
        "measured_variance",
        &[
            "phase_rad",
            "variance_spectrum",
            "variance_lyapunov",
            "theory_thermal",
        ],
    );
    let thermal = {
        let n = CoolingPreset::Weak.occupation();
        budget::thermal_variance(n, n)
    };
    let phases = match toward {
        Collective::PPlus => conjugate_plane_phases as fn(f64) -> [f64; 4],
        _ => commuting_plane_phases as fn(f64) -> [f64; 4],
    };
    for phi in phase_grid() {
        let mut cfg = tomography_base();
        let g_hz = cfg.pump_tones.tones[0].amplitude_hz;
        cfg.pump_tones = ToneSet::symmetric(cfg.pump_tones.detuning_hz, g_hz, phases(phi));
        let (model, cov) = steady_state(&cfg.validate()?)?;
        let axis = QuadratureSelector::generalized(Collective::XPlus, toward, phi);
        let m = measure_port(&model, DetectionCavity::Pump)?;
        panel.push(vec![phi, m.variance, cov.variance(&axis), thermal]);
    }
    Ok(Report {
        name: format!("fig3_{}", sweep.label()),
        panels: vec![panel],
    })
}

fn tomography_sweep() -> Result<Report> {
    let mut panel = Panel::new(
        "tomography",
        &[
            "phase_rad",
            "variance_probe",
            "variance_lyapunov",
            "variance_ideal",
            "theory_thermal",
            "theory_qba",
            "theory_qba_cba",
        ],
    );
    let n = CoolingPreset::Weak.occupation();
    let thermal = budget::thermal_variance(n, n);
    let n_qba = budget::n_qba(TOMOGRAPHY_COOPERATIVITY);
    let n_cba = budget::n_cba(TOMOGRAPHY_COOPERATIVITY, TOMOGRAPHY_CAVITY_OCCUPATION);

    // The ideal reference: same pump, no probe at all.
    let (_, ideal_cov) = steady_state(&tomography_base().validate()?)?;

    for phi in phase_grid() {
        let (model, cov) = steady_state(&tomography_config(phi).validate()?)?;
        let axis = QuadratureSelector::generalized(Collective::XPlus, Collective::PPlus, phi);
        let m = measure_port(&model, DetectionCavity::Probe)?;
        let s2 = (phi / 2.0).sin().powi(2);
        panel.push(vec![
            phi,
            m.variance,
            cov.variance(&axis),
            ideal_cov.variance(&axis),
            thermal,
            thermal + s2 * n_qba,
            thermal + s2 * (n_qba + n_cba),
        ]);
    }
    Ok(Report {
        name: "fig3_tomography".to_owned(),
        panels: vec![panel],
    })
}

// ---------------------------------------------------------------------------
// scenario: collective squeezing and entanglement
// ---------------------------------------------------------------------------

/// Parameters of the dissipative collective-squeezing run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Fig4Params {
    /// Blue/red amplitude ratio of each tone pair (0 ⇒ pure cooling;
    /// approaching 1 the damping vanishes and past 1 the drive is unstable).
    pub blue_red_ratio: f64,
    /// Red-tone amplitude, Hz.
    pub red_amplitude_hz: f64,
    /// Sideband frequency for the spectra panel, Hz.
    pub omega_spectra_hz: f64,
    /// Sideband frequency for the variance/Duan panels, Hz.
    pub omega_contrast_hz: f64,
    /// Thermal variance ⟨X²⟩ᵀ both oscillators start from.
    pub thermal_variance: f64,
}

impl Default for Fig4Params {
    fn default() -> Self {
        Fig4Params {
            blue_red_ratio: 0.37,
            red_amplitude_hz: 121e3,
            omega_spectra_hz: 400e3,
            omega_contrast_hz: 100e3,
            thermal_variance: 54.0,
        }
    }
}

/// Unbalanced four-tone drive at `qmfs_angle` in the commuting plane, with
/// an optional attenuated probe reading the axis at `probe_angle` in the
/// {X₊, P₊} plane.
fn entangler_config(
    p: &Fig4Params,
    omega_hz: f64,
    qmfs_angle: f64,
    probe_angle: Option<f64>,
) -> SystemConfig {
    let mut cfg = reference_config();
    for m in &mut cfg.mechanical_modes {
        m.n_thermal = p.thermal_variance - 0.5;
    }
    let amps = [
        p.red_amplitude_hz,
        p.blue_red_ratio * p.red_amplitude_hz,
        p.red_amplitude_hz,
        p.blue_red_ratio * p.red_amplitude_hz,
    ];
    cfg.pump_tones = ToneSet::with_amplitudes(omega_hz, amps, commuting_plane_phases(qmfs_angle));
    match probe_angle {
        Some(theta) => {
            cfg.probe_tones = Some(ToneSet::symmetric(
                omega_hz,
                probe_amplitude_ratio() * p.red_amplitude_hz,
                conjugate_plane_phases(theta),
            ));
        }
        None => {
            cfg.probe_cavity = None;
        }
    }
    cfg
}

fn entangler_state(
    p: &Fig4Params,
    omega_hz: f64,
    qmfs_angle: f64,
) -> Result<(LinearModel, Covariance)> {
    steady_state(&entangler_config(p, omega_hz, qmfs_angle, None).validate()?)
}

/// Dissipative squeezing of both commuting collective quadratures.
///
/// Panels:
/// * `tomography_spectra` — probe-detected spectra at five probe angles
///   across the {X₊, P₊} plane, at the spectra sideband frequency.
/// * `variance_vs_phase_xp_pp` / `variance_vs_phase_xp_pm` — steady-state
///   variance of the rotated axis in the heated plane (large contrast) and
///   in the commuting plane (below vacuum throughout), probe off.
/// * `duan_vs_phase` — the Duan quantity of the rotated commuting pair as
///   the drive's starting phase scans 0..2π; entanglement holds for every
///   starting phase.
/// * `budget` — one summary row of the collective variances, the Duan
///   quantity and its margin below 1, at the spectra sideband frequency.
///
/// Errors with an instability if `blue_red_ratio` reaches or exceeds the
/// range where blue dominates red.
pub fn scenario_fig4(p: &Fig4Params) -> Result<Report> {
    // --- probe-detected spectra across the conjugate plane ---
    let probe_angles: [(f64, &str); 5] = [
        (0.0, "psd_0"),
        (PI / 4.0, "psd_pi_4"),
        (PI / 2.0, "psd_pi_2"),
        (3.0 * PI / 4.0, "psd_3pi_4"),
        (PI, "psd_pi"),
    ];
    let mut columns = vec!["omega_rel_hz"];
    columns.extend(probe_angles.iter().map(|(_, name)| *name));
    let mut spectra = Panel::new("tomography_spectra", &columns);

    let mut traces = Vec::new();
    let mut grid: Option<FrequencyGrid> = None;
    for (theta, _) in probe_angles {
        let cfg = entangler_config(p, p.omega_spectra_hz, 0.0, Some(theta));
        let model = assemble_drift(&cfg.validate()?)?;
        let g = grid.get_or_insert_with(|| FrequencyGrid::for_model(&model));
        let map = output_routing(&model, DetectionCavity::Probe, 0.0)?;
        traces.push(output_spectrum(&model, &map, g));
    }
    let grid = grid.expect("at least one probe angle");
    for (k, &w) in grid.omegas().iter().enumerate() {
        let mut row = vec![w / TAU];
        row.extend(traces.iter().map(|t| t.psd[k]));
        spectra.push(row);
    }

    // --- variance vs analysis phase on the fixed drive, probe off ---
    let (_, contrast_cov) = entangler_state(p, p.omega_contrast_hz, 0.0)?;
    let mut xp_pp = Panel::new(
        "variance_vs_phase_xp_pp",
        &["phase_rad", "variance", "thermal", "vacuum"],
    );
    let mut xp_pm = Panel::new(
        "variance_vs_phase_xp_pm",
        &["phase_rad", "variance", "thermal", "vacuum"],
    );
    for phi in phase_grid() {
        let heated = QuadratureSelector::generalized(Collective::XPlus, Collective::PPlus, phi);
        let commuting = QuadratureSelector::generalized(Collective::XPlus, Collective::PMinus, phi);
        xp_pp.push(vec![
            phi,
            contrast_cov.variance(&heated),
            p.thermal_variance,
            0.5,
        ]);
        xp_pm.push(vec![
            phi,
            contrast_cov.variance(&commuting),
            p.thermal_variance,
            0.5,
        ]);
    }

    // --- Duan quantity vs the drive's starting phase ---
    let mut duan_panel = Panel::new("duan_vs_phase", &["phase_rad", "duan", "duan_margin_db"]);
    for phi in phase_grid() {
        let (_, cov) = entangler_state(p, p.omega_contrast_hz, phi)?;
        let q = QuadratureSelector::generalized(Collective::XPlus, Collective::PMinus, phi);
        let w = QuadratureSelector::generalized(Collective::PMinus, Collective::XPlus, -phi);
        let duan = cov.variance(&q) + cov.variance(&w);
        duan_panel.push(vec![phi, duan, budget::duan_margin_db(duan)]);
    }

    // --- summary row at the spectra sideband frequency ---
    let (model, cov) = entangler_state(p, p.omega_spectra_hz, 0.0)?;
    let gamma_mean_hz = (model.gamma[0] + model.gamma[1]) / (2.0 * TAU);
    let kappa_hz = reference_config().pump_cavity.kappa_hz();
    let c = budget::cooperativity(p.red_amplitude_hz, kappa_hz, gamma_mean_hz);
    let duan = cov.duan_quantity();
    let mut summary = Panel::new(
        "budget",
        &[
            "cooperativity",
            "thermal",
            "x_plus",
            "p_minus",
            "p_plus",
            "x_minus",
            "duan",
            "duan_margin_db",
        ],
    );
    summary.push(vec![
        c,
        p.thermal_variance,
        cov.variance(&QuadratureSelector::X_PLUS),
        cov.variance(&QuadratureSelector::P_MINUS),
        cov.variance(&QuadratureSelector::P_PLUS),
        cov.variance(&QuadratureSelector::X_MINUS),
        duan,
        budget::duan_margin_db(duan),
    ]);

    Ok(Report {
        name: "fig4".to_owned(),
        panels: vec![spectra, xp_pp, xp_pm, duan_panel, summary],
    })
}

// ---------------------------------------------------------------------------
// scenario: coherent force sensing note
// ---------------------------------------------------------------------------

/// Coherent response of one detected port to a classical force applied
/// symmetrically to both oscillators' momenta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ForceResponse {
    /// |P₊| of the driven steady-state response, dimensionless quadrature
    /// amplitude.
    pub p_plus_amplitude: f64,
    /// |X₋| of the driven response — the other quadrature of the same
    /// collective rotating pair.
    pub x_minus_amplitude: f64,
    /// Output-field amplitude of the coherent tone, √(rad/s) units.
    pub output_amplitude: f64,
    /// Noise PSD of the same port at the drive frequency, quanta.
    pub noise_psd: f64,
    /// Signal-to-noise accumulation rate |field|²/(2·PSD), rad/s: the SNR
    /// reached after integration time T is this rate times T.
    pub snr_rate: f64,
}

/// Drive both momenta with a force Re(f·e^{−iωt}) (f in rad/s of momentum
/// rate) and read the coherent response plus the noise floor at ω.
pub fn force_response(
    model: &LinearModel,
    cavity: DetectionCavity,
    force: f64,
    omega: f64,
) -> Result<ForceResponse> {
    let mut drive = DVector::<Complex64>::zeros(model.dim());
    drive[model.mech_offset(1) + 1] = Complex64::new(force, 0.0);
    drive[model.mech_offset(2) + 1] = Complex64::new(force, 0.0);
    let map = output_routing(model, cavity, 0.0)?;
    let (state, field) = coherent_response(model, &map, &drive, omega);

    let amplitude = |sel: &QuadratureSelector| -> f64 {
        let v = selector_vector(&model.ordering, sel);
        let mut z = Complex64::new(0.0, 0.0);
        for i in 0..model.dim() {
            z += Complex64::new(v[i], 0.0) * state[i];
        }
        z.norm()
    };

    let noise_psd = psd_at(model, &map, omega);
    let snr_rate = field.norm_sqr() / (2.0 * noise_psd);
    Ok(ForceResponse {
        p_plus_amplitude: amplitude(&QuadratureSelector::P_PLUS),
        x_minus_amplitude: amplitude(&QuadratureSelector::X_MINUS),
        output_amplitude: field.norm(),
        noise_psd,
        snr_rate,
    })
}

/// Force-sensing demo: a balanced four-tone measurement of P₊ watches a
/// classical force that drives both oscillators in phase.
///
/// The driven pair (P₊, X₋) is exactly the pair the P₊ measurement leaves
/// backaction-free, so both collective quadratures of the response are
/// recovered with no backaction penalty. Panels:
///
/// * `linearity` — response at force 0, f₀ and 2f₀: zero force gives zero
///   response, doubling the force doubles every recovered amplitude.
/// * `snr_vs_cooperativity` — the SNR accumulation rate grows monotonically
///   with measurement strength.
pub fn scenario_force_sensing_note() -> Result<Report> {
    let config_at = |c: f64| {
        let mut cfg = measurement_preset(CoolingPreset::Weak, c);
        let g_hz = cfg.pump_tones.tones[0].amplitude_hz;
        cfg.pump_tones = ToneSet::symmetric(
            cfg.pump_tones.detuning_hz,
            g_hz,
            conjugate_plane_phases(PI),
        );
        cfg
    };
    let force_0 = TAU * 100.0;

    let mut linearity = Panel::new(
        "linearity",
        &[
            "force_rad_s",
            "p_plus_response",
            "x_minus_response",
            "output_amplitude",
            "snr_rate",
        ],
    );
    let model = assemble_drift(&config_at(TOMOGRAPHY_COOPERATIVITY).validate()?)?;
    let omega_drive = model.detuning;
    for force in [0.0, force_0, 2.0 * force_0] {
        let r = force_response(&model, DetectionCavity::Pump, force, omega_drive)?;
        linearity.push(vec![
            force,
            r.p_plus_amplitude,
            r.x_minus_amplitude,
            r.output_amplitude,
            r.snr_rate,
        ]);
    }

    let mut snr = Panel::new(
        "snr_vs_cooperativity",
        &["cooperativity", "output_amplitude", "noise_psd", "snr_rate"],
    );
    for c in log_grid(0.1, 50.0, 9) {
        let model = assemble_drift(&config_at(c).validate()?)?;
        let r = force_response(&model, DetectionCavity::Pump, force_0, omega_drive)?;
        snr.push(vec![c, r.output_amplitude, r.noise_psd, r.snr_rate]);
    }

    Ok(Report {
        name: "force_sensing".to_owned(),
        panels: vec![linearity, snr],
    })
}

// ---------------------------------------------------------------------------
