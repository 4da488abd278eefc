//! First-moment dynamics: drift and diffusion matrices in the rotating frame.
//!
//! The frame rotates at each cavity resonance and at ω₁ − Ω / ω₂ + Ω for the
//! two oscillators, so the free mechanical evolution is ±Ω rotation (opposite
//! signs — oscillator 2 is the negative-mass partner) and the four drive
//! tones become static couplings g = G·e^{iθ} between each oscillator and
//! its cavity. Fast terms at 2ω_j etc. are dropped (rotating-wave
//! approximation), which is what the sideband-resolution warnings in
//! validation are about.
//!
//! State ordering is `[X_c, P_c, (X_d, P_d,) X_1, P_1, X_2, P_2]` — probe
//! cavity quadratures present only when the config has one. The quantum
//! Langevin equations then read `ẋ = A x + B x_in` with white inputs of
//! symmetrized strength `n + 1/2` per quadrature, and the diffusion matrix
//! is `D = B N B^T`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CavityMode, Sideband, ToneSet, ValidConfig};

/// One quadrature slot of the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StateVar {
    PumpX,
    PumpP,
    ProbeX,
    ProbeP,
    /// X quadrature of oscillator 1 or 2.
    MechX(usize),
    MechP(usize),
}

impl fmt::Display for StateVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateVar::PumpX => write!(f, "Xc"),
            StateVar::PumpP => write!(f, "Pc"),
            StateVar::ProbeX => write!(f, "Xd"),
            StateVar::ProbeP => write!(f, "Pd"),
            StateVar::MechX(j) => write!(f, "X{j}"),
            StateVar::MechP(j) => write!(f, "P{j}"),
        }
    }
}

/// Which cavity's output port is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionCavity {
    Pump,
    Probe,
}

/// The four-tone drive of one cavity, reduced to its couplings to the
/// collective quadratures: H/ħ = (g_ref/2)·a·(A₋X₋ + A₊X₊ + B₋P₋ + B₊P₊) + h.c.
///
/// `g_ref` is the mean of the four tone amplitudes (rad/s); the dimensionless
/// weights then satisfy |A₊| = 4 for a balanced drive that couples only to
/// X₊. Rotating the drive phases moves weight between the entries without
/// changing Σ|c_q|² — the cavity always sees one generalized quadrature at
/// full strength.
#[derive(Debug, Clone, Copy)]
pub struct CouplingCoefficients {
    pub a_minus: Complex64,
    pub a_plus: Complex64,
    pub b_minus: Complex64,
    pub b_plus: Complex64,
    /// Reference amplitude, rad/s.
    pub g_ref: f64,
}

impl CouplingCoefficients {
    /// Σ_q |c_q|² over the four collective quadratures, in (rad/s)².
    /// Equals the plain sum of squared tone amplitudes; this is the quantity
    /// that sets the transduction gain.
    pub fn sum_sq(&self) -> f64 {
        let w = self.a_minus.norm_sqr()
            + self.a_plus.norm_sqr()
            + self.b_minus.norm_sqr()
            + self.b_plus.norm_sqr();
        (self.g_ref / 2.0).powi(2) * w
    }
}

/// Decompose a tone set into collective-quadrature coupling weights.
pub fn coupling_coefficients(tones: &ToneSet) -> CouplingCoefficients {
    let g = |osc, sb| -> Complex64 {
        match tones.tone(osc, sb) {
            Some(t) => Complex64::from_polar(t.amplitude(), t.phase_rad),
            None => Complex64::new(0.0, 0.0),
        }
    };
    let (g1m, g1p) = (g(1, Sideband::Red), g(1, Sideband::Blue));
    let (g2m, g2p) = (g(2, Sideband::Red), g(2, Sideband::Blue));

    // a† multiplies Σ_j [(g_m+g_p) X_j + i(g_m−g_p) P_j]/√2; regrouping into
    // X± = (X₁±X₂)/√2 gives the collective coefficients c_q below.
    let c_x_plus = ((g1m + g1p) + (g2m + g2p)) / 2.0;
    let c_x_minus = ((g1m + g1p) - (g2m + g2p)) / 2.0;
    let c_p_plus = Complex64::i() * ((g1m - g1p) + (g2m - g2p)) / 2.0;
    let c_p_minus = Complex64::i() * ((g1m - g1p) - (g2m - g2p)) / 2.0;

    let g_ref = tones.tones.iter().map(|t| t.amplitude()).sum::<f64>() / 4.0;
    let weight = |c: Complex64| {
        if g_ref > 0.0 {
            2.0 * c.conj() / g_ref
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    CouplingCoefficients {
        a_minus: weight(c_x_minus),
        a_plus: weight(c_x_plus),
        b_minus: weight(c_p_minus),
        b_plus: weight(c_p_plus),
        g_ref,
    }
}

/// One white-noise input channel.
#[derive(Debug, Clone, Copy)]
pub struct NoiseChannel {
    /// Coupling rate (κ_E, κ_I or γ_j), rad/s.
    pub rate: f64,
    /// Bath occupation in quanta; the symmetrized input strength is n + 1/2.
    pub occupation: f64,
    /// State-vector offset of the X quadrature this channel drives.
    pub offset: usize,
}

/// Where a cavity sits in the assembled model.
#[derive(Debug, Clone, Copy)]
pub struct CavityBlock {
    /// State-vector offset of the cavity's X quadrature.
    pub offset: usize,
    /// External-port rate, rad/s.
    pub kappa_ext: f64,
    /// Total linewidth, rad/s.
    pub kappa: f64,
    /// Index into `LinearModel::channels` of the external port.
    pub ext_channel: usize,
    /// Collective-quadrature decomposition of this cavity's tone set.
    pub coefficients: CouplingCoefficients,
    /// Phase-dressed (red, blue) coupling per oscillator, rad/s.
    pub mech_couplings: [(Complex64, Complex64); 2],
}

impl CavityBlock {
    /// Σ|c_q|² for this cavity, (rad/s)².
    pub fn coupling_sum_sq(&self) -> f64 {
        self.coefficients.sum_sq()
    }
}

/// Assembled linear model: `ẋ = A x + ξ`, `⟨ξξᵀ⟩_sym = D δ(t−t')`.
#[derive(Debug, Clone)]
pub struct LinearModel {
    /// Drift matrix A, rad/s.
    pub drift: DMatrix<f64>,
    /// Diffusion matrix D, rad/s.
    pub diffusion: DMatrix<f64>,
    pub ordering: Vec<StateVar>,
    pub channels: Vec<NoiseChannel>,
    pub pump: CavityBlock,
    pub probe: Option<CavityBlock>,
    /// Rotating-frame detuning Ω, rad/s.
    pub detuning: f64,
    /// Amplifier added noise, quanta.
    pub n_amp: f64,
    /// Mechanical linewidths [γ₁, γ₂], rad/s.
    pub gamma: [f64; 2],
    /// Largest real part over the drift eigenvalues, rad/s (negative for a
    /// stable model).
    pub max_re_eigenvalue: f64,
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    /// State-vector offset of X_j for oscillator `j` ∈ {1, 2}.
    pub fn mech_offset(&self, j: usize) -> usize {
        debug_assert!(j == 1 || j == 2);
        let base = if self.probe.is_some() { 4 } else { 2 };
        base + 2 * (j - 1)
    }

    pub fn cavity(&self, which: DetectionCavity) -> Result<&CavityBlock> {
        match which {
            DetectionCavity::Pump => Ok(&self.pump),
            DetectionCavity::Probe => self.probe.as_ref().ok_or(Error::NoProbeCavity),
        }
    }

    /// Input matrix B (n × 2m): column 2k drives channel k's X quadrature
    /// with √rate, column 2k+1 its P quadrature.
    pub fn input_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut b = DMatrix::zeros(n, 2 * self.channels.len());
        for (k, ch) in self.channels.iter().enumerate() {
            let s = ch.rate.sqrt();
            b[(ch.offset, 2 * k)] = s;
            b[(ch.offset + 1, 2 * k + 1)] = s;
        }
        b
    }

    /// Symmetrized input strengths N_i = n + 1/2, one per input-matrix
    /// column (so each channel occupation appears twice).
    pub fn input_strengths(&self) -> Vec<f64> {
        self.channels
            .iter()
            .flat_map(|ch| [ch.occupation + 0.5, ch.occupation + 0.5])
            .collect()
    }

    /// Estimated linewidth of oscillator `j` including dynamical broadening:
    /// γ_j plus 4(G₋² − G₊²)/κ per cavity (valid well inside each cavity's
    /// linewidth). A balanced red/blue drive contributes nothing; the value
    /// never drops below γ_j/10 so it stays usable as a frequency scale.
    pub fn effective_linewidth(&self, j: usize) -> f64 {
        let gamma = self.gamma[j - 1];
        let mut total = gamma;
        for block in [Some(&self.pump), self.probe.as_ref()].into_iter().flatten() {
            let (gm, gp) = block.mech_couplings[j - 1];
            total += 4.0 * (gm.norm_sqr() - gp.norm_sqr()) / block.kappa;
        }
        total.max(0.1 * gamma)
    }
}

/// Build the drift and diffusion matrices for a validated config.
///
/// Fails with [`Error::Unstable`] when the drift has an eigenvalue in the
/// right half-plane (a blue-weighted drive past its parametric threshold).
pub fn assemble_drift(valid: &ValidConfig) -> Result<LinearModel> {
    let cfg = &valid.config;
    let with_probe = cfg.probe_cavity.is_some();
    let n = if with_probe { 8 } else { 6 };
    let mech0 = if with_probe { 4 } else { 2 };
    let omega = cfg.pump_tones.detuning();

    let mut ordering = vec![StateVar::PumpX, StateVar::PumpP];
    if with_probe {
        ordering.push(StateVar::ProbeX);
        ordering.push(StateVar::ProbeP);
    }
    for j in [1, 2] {
        ordering.push(StateVar::MechX(j));
        ordering.push(StateVar::MechP(j));
    }

    let mut a = DMatrix::<f64>::zeros(n, n);

    // Mechanical diagonal blocks: damping plus ±Ω rotation.
    for (idx, m) in cfg.mechanical_modes.iter().enumerate() {
        let o = mech0 + 2 * idx;
        let sign = if idx == 0 { 1.0 } else { -1.0 };
        a[(o, o)] = -m.gamma() / 2.0;
        a[(o + 1, o + 1)] = -m.gamma() / 2.0;
        a[(o, o + 1)] = sign * omega;
        a[(o + 1, o)] = -sign * omega;
    }

    let mut channels = Vec::new();
    let mut add_cavity = |a: &mut DMatrix<f64>,
                          cav: &CavityMode,
                          tones: &ToneSet,
                          offset: usize|
     -> CavityBlock {
        a[(offset, offset)] = -cav.kappa() / 2.0;
        a[(offset + 1, offset + 1)] = -cav.kappa() / 2.0;
        let mut mech_couplings = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 2];
        for (idx, _) in cfg.mechanical_modes.iter().enumerate() {
            let j = idx + 1;
            let o = mech0 + 2 * idx;
            let g = |sb| -> Complex64 {
                match tones.tone(j, sb) {
                    Some(t) => Complex64::from_polar(t.amplitude(), t.phase_rad),
                    None => Complex64::new(0.0, 0.0),
                }
            };
            let (gm, gp) = (g(Sideband::Red), g(Sideband::Blue));
            mech_couplings[idx] = (gm, gp);
            let (sum, diff) = (gm + gp, gm - gp);
            // Hamiltonian coupling H = x_cᵀ M x_j written out by rows; the
            // mech→cavity and cavity→mech blocks share M, so the eight
            // entries below carry the symplectic pairing explicitly.
            a[(offset, o)] += sum.im;
            a[(offset, o + 1)] += diff.re;
            a[(offset + 1, o)] += -sum.re;
            a[(offset + 1, o + 1)] += diff.im;
            a[(o, offset)] += -diff.im;
            a[(o, offset + 1)] += diff.re;
            a[(o + 1, offset)] += -sum.re;
            a[(o + 1, offset + 1)] += -sum.im;
        }
        let ext_channel = channels.len();
        channels.push(NoiseChannel {
            rate: cav.kappa_ext(),
            occupation: cav.n_thermal,
            offset,
        });
        channels.push(NoiseChannel {
            rate: cav.kappa_int(),
            occupation: cav.n_thermal,
            offset,
        });
        CavityBlock {
            offset,
            kappa_ext: cav.kappa_ext(),
            kappa: cav.kappa(),
            ext_channel,
            coefficients: coupling_coefficients(tones),
            mech_couplings,
        }
    };

    let pump = add_cavity(&mut a, &cfg.pump_cavity, &cfg.pump_tones, 0);
    let probe = match (&cfg.probe_cavity, &cfg.probe_tones) {
        (Some(cav), Some(tones)) => Some(add_cavity(&mut a, cav, tones, 2)),
        (Some(cav), None) => {
            // Idle probe cavity: still a damped mode with its own noise.
            let silent = ToneSet::symmetric(cfg.pump_tones.detuning_hz, 0.0, [0.0; 4]);
            Some(add_cavity(&mut a, cav, &silent, 2))
        }
        _ => None,
    };

    for (idx, m) in cfg.mechanical_modes.iter().enumerate() {
        channels.push(NoiseChannel {
            rate: m.gamma(),
            occupation: m.n_thermal,
            offset: mech0 + 2 * idx,
        });
    }

    let mut d = DMatrix::<f64>::zeros(n, n);
    for ch in &channels {
        let w = ch.rate * (ch.occupation + 0.5);
        d[(ch.offset, ch.offset)] += w;
        d[(ch.offset + 1, ch.offset + 1)] += w;
    }

    let max_re_eigenvalue = a
        .complex_eigenvalues()
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re_eigenvalue > 0.0 {
        return Err(Error::Unstable {
            max_re: max_re_eigenvalue,
        });
    }

    Ok(LinearModel {
        drift: a,
        diffusion: d,
        ordering,
        channels,
        pump,
        probe,
        detuning: omega,
        n_amp: cfg.amplifier_noise,
        gamma: [
            cfg.mechanical_modes[0].gamma(),
            cfg.mechanical_modes[1].gamma(),
        ],
        max_re_eigenvalue,
    })
}

/// How the detected output field is formed from the state and the inputs:
/// `x_out = state_rows · x + feedthrough · x_in`, rows being the output X^λ
/// and P^λ quadratures at local-oscillator phase λ.
///
/// This encodes input–output at the external port, a_out = a_in − √κ_E a.
#[derive(Debug, Clone)]
pub struct OutputMap {
    /// 2 × n.
    pub state_rows: DMatrix<f64>,
    /// 2 × 2m, matching the input-matrix column layout.
    pub feedthrough: DMatrix<f64>,
    pub lo_phase: f64,
    pub cavity: DetectionCavity,
}

/// Build the output map for the external port of the chosen cavity.
pub fn output_routing(
    model: &LinearModel,
    cavity: DetectionCavity,
    lo_phase: f64,
) -> Result<OutputMap> {
    let block = model.cavity(cavity)?;
    let (c, s) = (lo_phase.cos(), lo_phase.sin());
    let root_ke = block.kappa_ext.sqrt();

    let mut state_rows = DMatrix::zeros(2, model.dim());
    // Row 0: X^λ_out, row 1: P^λ_out = X^(λ+π/2)_out.
    state_rows[(0, block.offset)] = -root_ke * c;
    state_rows[(0, block.offset + 1)] = -root_ke * s;
    state_rows[(1, block.offset)] = root_ke * s;
    state_rows[(1, block.offset + 1)] = -root_ke * c;

    let mut feedthrough = DMatrix::zeros(2, 2 * model.channels.len());
    let k = block.ext_channel;
    feedthrough[(0, 2 * k)] = c;
    feedthrough[(0, 2 * k + 1)] = s;
    feedthrough[(1, 2 * k)] = -s;
    feedthrough[(1, 2 * k + 1)] = c;

    Ok(OutputMap {
        state_rows,
        feedthrough,
        lo_phase,
        cavity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference_config;
    use std::f64::consts::TAU;

    fn config_with_amplitude(g_hz: f64, phases: [f64; 4]) -> ValidConfig {
        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        cfg.pump_tones = ToneSet::symmetric(10e3, g_hz, phases);
        cfg.validate().unwrap()
    }

    #[test]
    fn balanced_drive_couples_only_to_x_plus() {
        let valid = config_with_amplitude(20e3, [0.0; 4]);
        let c = coupling_coefficients(&valid.config.pump_tones);
        assert!((c.a_plus - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert!(c.a_minus.norm() < 1e-12);
        assert!(c.b_plus.norm() < 1e-12);
        assert!(c.b_minus.norm() < 1e-12);
        assert!((c.g_ref - TAU * 20e3).abs() < 1e-6);
        // Σ|c_q|² equals the sum of squared tone amplitudes.
        assert!((c.sum_sq() - 4.0 * (TAU * 20e3).powi(2)).abs() < 1e-3);
    }

    #[test]
    fn phase_rotation_moves_weight_onto_p_minus() {
        let phi = 0.7;
        let valid = config_with_amplitude(20e3, [0.0, phi, phi, 0.0]);
        let c = coupling_coefficients(&valid.config.pump_tones);
        let expect_a = 4.0 * (phi / 2.0).cos() * Complex64::from_polar(1.0, -phi / 2.0);
        let expect_b = 4.0 * (phi / 2.0).sin() * Complex64::from_polar(1.0, -phi / 2.0);
        assert!((c.a_plus - expect_a).norm() < 1e-12);
        assert!((c.b_minus - expect_b).norm() < 1e-12);
        assert!(c.a_minus.norm() < 1e-12);
        assert!(c.b_plus.norm() < 1e-12);
        // Total weight is phase-independent.
        assert!((c.sum_sq() - 4.0 * (TAU * 20e3).powi(2)).abs() < 1e-3);
    }

    #[test]
    fn drift_blocks_respect_hamiltonian_pairing() {
        // Arbitrary red-dominant amplitudes and arbitrary phases: the
        // mech→cavity block must be the symplectic transpose of the
        // cavity→mech block.
        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        cfg.pump_tones = ToneSet::with_amplitudes(
            10e3,
            [23e3, 11e3, 17e3, 5e3],
            [0.3, 1.9, 4.4, 2.2],
        );
        let model = assemble_drift(&cfg.validate().unwrap()).unwrap();
        let a = &model.drift;
        for j in [1usize, 2] {
            let o = model.mech_offset(j);
            assert!((a[(o, 0)] - -a[(1, o + 1)]).abs() < 1e-9);
            assert!((a[(o, 1)] - a[(0, o + 1)]).abs() < 1e-9);
            assert!((a[(o + 1, 0)] - a[(1, o)]).abs() < 1e-9);
            assert!((a[(o + 1, 1)] - -a[(0, o)]).abs() < 1e-9);
        }
    }

    #[test]
    fn balanced_drive_is_feedforward_stable() {
        // Equal red/blue amplitudes: backaction never returns to the measured
        // quadrature, so the eigenvalues cannot depend on the drive strength.
        let weak = assemble_drift(&config_with_amplitude(1e3, [0.0; 4])).unwrap();
        let strong = assemble_drift(&config_with_amplitude(200e3, [0.0; 4])).unwrap();
        let gamma_min = weak.gamma[0].min(weak.gamma[1]);
        assert!((weak.max_re_eigenvalue + gamma_min / 2.0).abs() < 1e-6 * gamma_min);
        assert!(
            (strong.max_re_eigenvalue - weak.max_re_eigenvalue).abs()
                < 1e-9 * weak.max_re_eigenvalue.abs()
        );
    }

    #[test]
    fn effective_linewidth_tracks_optical_damping() {
        let balanced = assemble_drift(&config_with_amplitude(50e3, [0.0; 4])).unwrap();
        assert!((balanced.effective_linewidth(1) - balanced.gamma[0]).abs() < 1e-9);

        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        cfg.pump_tones = ToneSet::with_amplitudes(10e3, [30e3, 0.0, 30e3, 0.0], [0.0; 4]);
        let cooled = assemble_drift(&cfg.validate().unwrap()).unwrap();
        let g = TAU * 30e3;
        let expected = cooled.gamma[0] + 4.0 * g * g / cooled.pump.kappa;
        assert!(
            (cooled.effective_linewidth(1) - expected).abs() < 1e-6 * expected,
            "{} vs {expected}",
            cooled.effective_linewidth(1)
        );
    }

    #[test]
    fn blue_dominant_drive_past_threshold_is_rejected() {
        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        cfg.pump_tones = ToneSet::with_amplitudes(10e3, [0.0, 50e3, 0.0, 0.0], [0.0; 4]);
        match assemble_drift(&cfg.validate().unwrap()) {
            Err(Error::Unstable { max_re }) => assert!(max_re > 0.0),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn uncoupled_diffusion_is_diagonal_with_bath_strengths() {
        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        let occupations = [
            cfg.mechanical_modes[0].n_thermal,
            cfg.mechanical_modes[1].n_thermal,
        ];
        let model = assemble_drift(&cfg.validate().unwrap()).unwrap();
        let d = &model.diffusion;
        let kappa = model.pump.kappa;
        // Cavity rows carry κ(n_c + 1/2) with n_c = 0.
        assert!((d[(0, 0)] - kappa * 0.5).abs() < 1e-6);
        for j in [1usize, 2] {
            let o = model.mech_offset(j);
            let expected = model.gamma[j - 1] * (occupations[j - 1] + 0.5);
            assert!((d[(o, o)] - expected).abs() < 1e-6);
            assert!((d[(o + 1, o + 1)] - expected).abs() < 1e-6);
        }
        assert_eq!(d.nrows(), 6);
        // Off-diagonals vanish: every channel drives a single mode.
        for i in 0..6 {
            for k in 0..6 {
                if i != k {
                    assert_eq!(d[(i, k)], 0.0);
                }
            }
        }
    }

    #[test]
    fn probe_block_present_only_with_probe_cavity() {
        let with = assemble_drift(&reference_config().validate().unwrap()).unwrap();
        assert_eq!(with.dim(), 8);
        assert_eq!(with.mech_offset(1), 4);
        assert!(with.probe.is_some());
        assert_eq!(with.channels.len(), 6);

        let mut cfg = reference_config();
        cfg.probe_cavity = None;
        let without = assemble_drift(&cfg.validate().unwrap()).unwrap();
        assert_eq!(without.dim(), 6);
        assert_eq!(without.mech_offset(1), 2);
        assert!(without.probe.is_none());
        assert_eq!(without.channels.len(), 4);
        assert!(matches!(
            output_routing(&without, DetectionCavity::Probe, 0.0),
            Err(Error::NoProbeCavity)
        ));
    }

    #[test]
    fn output_map_reflects_input_minus_leaked_field() {
        let valid = config_with_amplitude(20e3, [0.0; 4]);
        let model = assemble_drift(&valid).unwrap();
        let map = output_routing(&model, DetectionCavity::Pump, 0.0).unwrap();
        let root_ke = model.pump.kappa_ext.sqrt();
        assert!((map.state_rows[(0, 0)] + root_ke).abs() < 1e-12);
        assert_eq!(map.state_rows[(0, 1)], 0.0);
        assert!((map.state_rows[(1, 1)] + root_ke).abs() < 1e-12);
        let k = model.pump.ext_channel;
        assert_eq!(map.feedthrough[(0, 2 * k)], 1.0);
        assert_eq!(map.feedthrough[(1, 2 * k + 1)], 1.0);
        // Internal-loss inputs never reach the detector directly.
        assert_eq!(map.feedthrough[(0, 2 * k + 2)], 0.0);
    }

    #[test]
    fn input_matrix_reproduces_diffusion() {
        let model = assemble_drift(&reference_config().validate().unwrap()).unwrap();
        let b = model.input_matrix();
        let n = model.input_strengths();
        let mut d = DMatrix::<f64>::zeros(model.dim(), model.dim());
        for (i, w) in n.iter().enumerate() {
            let col = b.column(i).clone_owned();
            d += &col * col.transpose() * *w;
        }
        assert!((&d - &model.diffusion).norm() < 1e-9 * model.diffusion.norm());
    }
}
