//! Device description: oscillators, cavities, pump tones, and validation.
//!
//! Config files carry `*_hz` fields that are ordinary frequencies (f, not
//! angular). All physics code works in angular units; the accessor methods
//! (`omega()`, `gamma()`, `kappa()`, ...) do the 2π conversion on the way
//! out. The raw Hz value is what gets serialized back, so a config survives
//! a load/save round trip byte for byte — no 2π round-off creeps in.
//!
//! Quadratures are scaled so the vacuum variance is 1/2 (hbar = 1):
//! X = (b + b†)/√2, P = i(b† − b)/√2.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Schema version this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Vacuum (zero-point) variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// One mechanical oscillator in its rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicalMode {
    /// Lab-frame resonance frequency, in Hz.
    pub omega_hz: f64,
    /// Total energy decay rate (possibly already broadened by sideband
    /// cooling), in Hz.
    pub gamma_hz: f64,
    /// Thermal bath occupation, in quanta.
    pub n_thermal: f64,
}

impl MechanicalMode {
    pub fn omega(&self) -> f64 {
        TAU * self.omega_hz
    }
    pub fn gamma(&self) -> f64 {
        TAU * self.gamma_hz
    }
}

/// A microwave cavity with one measured (external) port and internal loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityMode {
    /// Resonance frequency, in Hz.
    pub omega_hz: f64,
    /// External (measured-port) coupling rate, in Hz.
    pub kappa_ext_hz: f64,
    /// Internal loss rate, in Hz.
    pub kappa_int_hz: f64,
    /// Occupation of both bath channels, in quanta.
    pub n_thermal: f64,
}

impl CavityMode {
    pub fn kappa_ext(&self) -> f64 {
        TAU * self.kappa_ext_hz
    }
    pub fn kappa_int(&self) -> f64 {
        TAU * self.kappa_int_hz
    }
    /// Total linewidth kappa_ext + kappa_int, rad/s.
    pub fn kappa(&self) -> f64 {
        self.kappa_ext() + self.kappa_int()
    }
    /// Total linewidth in Hz.
    pub fn kappa_hz(&self) -> f64 {
        self.kappa_ext_hz + self.kappa_int_hz
    }
}

/// Which motional sideband a pump tone addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sideband {
    /// Below cavity resonance: beam-splitter coupling a†b.
    Red,
    /// Above cavity resonance: two-mode-squeezing coupling a†b†.
    Blue,
}

/// One of the four drive tones. `amplitude_hz` is the induced coupling rate
/// G (not the raw drive power), `phase_rad` its phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpTone {
    /// Target oscillator, 1 or 2.
    pub oscillator: usize,
    pub sideband: Sideband,
    pub amplitude_hz: f64,
    pub phase_rad: f64,
}

impl PumpTone {
    pub fn amplitude(&self) -> f64 {
        TAU * self.amplitude_hz
    }
}

/// The full four-tone drive on one cavity.
///
/// `detuning_hz` is Ω: tones sit at ω_c ± (ω₁ − Ω) and ω_c ± (ω₂ + Ω), so
/// in the rotating frame oscillator 1 precesses at +Ω and oscillator 2 at
/// −Ω (the negative-mass partner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneSet {
    pub detuning_hz: f64,
    pub tones: Vec<PumpTone>,
}

impl ToneSet {
    /// Ω in rad/s.
    pub fn detuning(&self) -> f64 {
        TAU * self.detuning_hz
    }

    /// The tone addressing (oscillator, sideband), if present.
    pub fn tone(&self, oscillator: usize, sideband: Sideband) -> Option<&PumpTone> {
        self.tones
            .iter()
            .find(|t| t.oscillator == oscillator && t.sideband == sideband)
    }

    /// Convenience constructor for the common case: equal red/blue pairs per
    /// oscillator with per-tone phases `(θ1-, θ1+, θ2-, θ2+)`.
    pub fn symmetric(detuning_hz: f64, amplitude_hz: f64, phases: [f64; 4]) -> Self {
        Self::with_amplitudes(
            detuning_hz,
            [amplitude_hz, amplitude_hz, amplitude_hz, amplitude_hz],
            phases,
        )
    }

    /// Four tones in the order (1,red), (1,blue), (2,red), (2,blue).
    pub fn with_amplitudes(detuning_hz: f64, amplitudes_hz: [f64; 4], phases: [f64; 4]) -> Self {
        let mk = |osc, sideband, i: usize| PumpTone {
            oscillator: osc,
            sideband,
            amplitude_hz: amplitudes_hz[i],
            phase_rad: phases[i],
        };
        ToneSet {
            detuning_hz,
            tones: vec![
                mk(1, Sideband::Red, 0),
                mk(1, Sideband::Blue, 1),
                mk(2, Sideband::Red, 2),
                mk(2, Sideband::Blue, 3),
            ],
        }
    }

    fn check(&self, label: &str) -> Result<()> {
        if !(self.detuning_hz > 0.0) || !self.detuning_hz.is_finite() {
            return Err(Error::Config(format!(
                "{label}: detuning_hz must be positive and finite, got {}",
                self.detuning_hz
            )));
        }
        if self.tones.len() != 4 {
            return Err(Error::Config(format!(
                "{label}: expected exactly 4 tones, got {}",
                self.tones.len()
            )));
        }
        for osc in [1, 2] {
            for sb in [Sideband::Red, Sideband::Blue] {
                let n = self
                    .tones
                    .iter()
                    .filter(|t| t.oscillator == osc && t.sideband == sb)
                    .count();
                if n != 1 {
                    return Err(Error::Config(format!(
                        "{label}: oscillator {osc} {sb:?} sideband appears {n} times, expected exactly once"
                    )));
                }
            }
        }
        for t in &self.tones {
            if !(t.amplitude_hz >= 0.0) || !t.amplitude_hz.is_finite() {
                return Err(Error::Config(format!(
                    "{label}: tone amplitude must be >= 0 and finite, got {}",
                    t.amplitude_hz
                )));
            }
            if !t.phase_rad.is_finite() {
                return Err(Error::Config(format!("{label}: tone phase must be finite")));
            }
        }
        Ok(())
    }

    fn fold_phases(&mut self) {
        for t in &mut self.tones {
            t.phase_rad = t.phase_rad.rem_euclid(TAU);
        }
    }
}

/// Complete system description. This is the on-disk JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub schema_version: u32,
    pub mechanical_modes: [MechanicalMode; 2],
    pub pump_cavity: CavityMode,
    pub pump_tones: ToneSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_cavity: Option<CavityMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_tones: Option<ToneSet>,
    /// Added noise of the readout amplifier chain, in quanta.
    pub amplifier_noise: f64,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("JSON parse: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Mean mechanical linewidth, rad/s — the γ that enters the cooperativity.
    pub fn gamma_mean(&self) -> f64 {
        (self.mechanical_modes[0].gamma() + self.mechanical_modes[1].gamma()) / 2.0
    }

    /// Check every structural and physical invariant, fold tone phases into
    /// [0, 2π), and collect regime warnings. Idempotent: validating the
    /// result again yields the same config and the same warnings.
    pub fn validate(mut self) -> Result<ValidConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                found: self.schema_version,
                supported: SCHEMA_VERSION,
            });
        }
        for (i, m) in self.mechanical_modes.iter().enumerate() {
            let label = format!("mechanical_modes[{i}]");
            if !(m.omega_hz > 0.0) || !m.omega_hz.is_finite() {
                return Err(Error::Config(format!("{label}: omega_hz must be positive")));
            }
            if !(m.gamma_hz > 0.0) || !m.gamma_hz.is_finite() {
                return Err(Error::Config(format!("{label}: gamma_hz must be positive")));
            }
            if !(m.n_thermal >= 0.0) || !m.n_thermal.is_finite() {
                return Err(Error::Config(format!("{label}: n_thermal must be >= 0")));
            }
        }
        check_cavity(&self.pump_cavity, "pump_cavity")?;
        self.pump_tones.check("pump_tones")?;
        self.pump_tones.fold_phases();
        if let Some(c) = &self.probe_cavity {
            check_cavity(c, "probe_cavity")?;
        }
        if let Some(t) = &mut self.probe_tones {
            t.check("probe_tones")?;
            t.fold_phases();
        }
        if self.probe_tones.is_some() && self.probe_cavity.is_none() {
            return Err(Error::Config(
                "probe_tones given but no probe_cavity".into(),
            ));
        }
        if let Some(t) = &self.probe_tones {
            // Both tone sets must define the same rotating frame.
            if t.detuning_hz != self.pump_tones.detuning_hz {
                return Err(Error::Config(format!(
                    "probe detuning {} Hz differs from pump detuning {} Hz; both cavities must share one Ω",
                    t.detuning_hz, self.pump_tones.detuning_hz
                )));
            }
        }
        if !(self.amplifier_noise >= 0.0) || !self.amplifier_noise.is_finite() {
            return Err(Error::Config("amplifier_noise must be >= 0".into()));
        }

        let mut warnings = Vec::new();
        let kappa_hz = self.pump_cavity.kappa_ext_hz + self.pump_cavity.kappa_int_hz;
        let [m1, m2] = &self.mechanical_modes;
        if m1.omega_hz < kappa_hz || m2.omega_hz < kappa_hz {
            warnings.push(format!(
                "sideband resolution is marginal: mechanical frequency below the cavity linewidth {kappa_hz} Hz; the rotating-wave model degrades"
            ));
        }
        if (m1.omega_hz - m2.omega_hz).abs() < kappa_hz {
            warnings.push(format!(
                "oscillator splitting |ω1 − ω2| = {} Hz is below the cavity linewidth {kappa_hz} Hz; the four tones do not address the oscillators independently",
                (m1.omega_hz - m2.omega_hz).abs()
            ));
        }
        Ok(ValidConfig {
            config: self,
            warnings,
        })
    }
}

fn check_cavity(c: &CavityMode, label: &str) -> Result<()> {
    if !(c.omega_hz > 0.0) || !c.omega_hz.is_finite() {
        return Err(Error::Config(format!("{label}: omega_hz must be positive")));
    }
    if !(c.kappa_ext_hz > 0.0) || !c.kappa_ext_hz.is_finite() {
        return Err(Error::Config(format!(
            "{label}: kappa_ext_hz must be positive (the output port must exist)"
        )));
    }
    if !(c.kappa_int_hz >= 0.0) || !c.kappa_int_hz.is_finite() {
        return Err(Error::Config(format!("{label}: kappa_int_hz must be >= 0")));
    }
    if !(c.n_thermal >= 0.0) || !c.n_thermal.is_finite() {
        return Err(Error::Config(format!("{label}: n_thermal must be >= 0")));
    }
    Ok(())
}

/// A [`SystemConfig`] that has passed [`SystemConfig::validate`], plus any
/// regime warnings collected on the way.
#[derive(Debug, Clone)]
pub struct ValidConfig {
    pub config: SystemConfig,
    pub warnings: Vec<String>,
}

impl ValidConfig {
    pub fn has_probe(&self) -> bool {
        self.config.probe_cavity.is_some()
    }
}

/// Reference device: two aluminium drumhead oscillators at 6.692 and
/// 9.032 MHz coupled to a 4.98 GHz pump cavity and a 6.62 GHz probe cavity.
/// Tones are present but at zero amplitude — the starting point for building
/// scenarios. Mechanical baths sit at their equilibrium occupations, giving
/// ⟨X₊²⟩ = (n₁+n₂)/2 + 1/2 = 28.5.
pub fn reference_config() -> SystemConfig {
    SystemConfig {
        schema_version: SCHEMA_VERSION,
        mechanical_modes: [
            MechanicalMode {
                omega_hz: 6.692e6,
                gamma_hz: 55.0,
                n_thermal: 32.0,
            },
            MechanicalMode {
                omega_hz: 9.032e6,
                gamma_hz: 84.0,
                n_thermal: 24.0,
            },
        ],
        pump_cavity: CavityMode {
            omega_hz: 4.98e9,
            kappa_ext_hz: 1.45e6,
            kappa_int_hz: 0.13e6,
            n_thermal: 0.0,
        },
        pump_tones: ToneSet::symmetric(10e3, 0.0, [0.0; 4]),
        probe_cavity: Some(CavityMode {
            omega_hz: 6.62e9,
            kappa_ext_hz: 0.82e6,
            kappa_int_hz: 0.35e6,
            n_thermal: 0.0,
        }),
        probe_tones: None,
        amplifier_noise: 30.0,
    }
}

// ---------------------------------------------------------------------------
// quadrature selectors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quad {
    X,
    P,
}

/// The four collective quadratures X± = (X₁ ± X₂)/√2, P± = (P₁ ± P₂)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Collective {
    XPlus,
    PPlus,
    XMinus,
    PMinus,
}

impl fmt::Display for Collective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Collective::XPlus => "X+",
            Collective::PPlus => "P+",
            Collective::XMinus => "X-",
            Collective::PMinus => "P-",
        };
        f.write_str(s)
    }
}

/// Names one mechanical quadrature to evaluate against a covariance matrix.
///
/// `Generalized` is the tomography axis: sweeping `angle` = φ from 0 to 2π
/// rotates the measured quadrature within the plane spanned by `first` and
/// `second` with weights cos(φ/2), sin(φ/2) — the same half-angle convention
/// the phase-rotated tone set realizes, so φ here matches the drive phase φ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadratureSelector {
    Single { oscillator: usize, quad: Quad },
    Collective(Collective),
    Generalized {
        first: Collective,
        second: Collective,
        angle: f64,
    },
}

impl QuadratureSelector {
    pub const X_PLUS: Self = QuadratureSelector::Collective(Collective::XPlus);
    pub const P_PLUS: Self = QuadratureSelector::Collective(Collective::PPlus);
    pub const X_MINUS: Self = QuadratureSelector::Collective(Collective::XMinus);
    pub const P_MINUS: Self = QuadratureSelector::Collective(Collective::PMinus);

    pub fn generalized(first: Collective, second: Collective, angle: f64) -> Self {
        QuadratureSelector::Generalized {
            first,
            second,
            angle,
        }
    }
}

impl fmt::Display for QuadratureSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadratureSelector::Single { oscillator, quad } => {
                let q = if *quad == Quad::X { "X" } else { "P" };
                write!(f, "{q}{oscillator}")
            }
            QuadratureSelector::Collective(c) => write!(f, "{c}"),
            QuadratureSelector::Generalized {
                first,
                second,
                angle,
            } => write!(f, "{first}{second}@{angle}"),
        }
    }
}

impl FromStr for QuadratureSelector {
    type Err = Error;

    /// Accepts `X1 P1 X2 P2 X+ P+ X- P-` and generalized `X+P-@<angle_rad>`.
    fn from_str(s: &str) -> Result<Self> {
        fn collective(s: &str) -> Option<Collective> {
            match s {
                "X+" => Some(Collective::XPlus),
                "P+" => Some(Collective::PPlus),
                "X-" => Some(Collective::XMinus),
                "P-" => Some(Collective::PMinus),
                _ => None,
            }
        }
        let s = s.trim();
        match s {
            "X1" => {
                return Ok(QuadratureSelector::Single {
                    oscillator: 1,
                    quad: Quad::X,
                })
            }
            "P1" => {
                return Ok(QuadratureSelector::Single {
                    oscillator: 1,
                    quad: Quad::P,
                })
            }
            "X2" => {
                return Ok(QuadratureSelector::Single {
                    oscillator: 2,
                    quad: Quad::X,
                })
            }
            "P2" => {
                return Ok(QuadratureSelector::Single {
                    oscillator: 2,
                    quad: Quad::P,
                })
            }
            _ => {}
        }
        if let Some(c) = collective(s) {
            return Ok(QuadratureSelector::Collective(c));
        }
        if let Some((pair, angle)) = s.split_once('@') {
            if pair.len() == 4 {
                let (a, b) = pair.split_at(2);
                if let (Some(first), Some(second)) = (collective(a), collective(b)) {
                    if first == second {
                        return Err(Error::Selector(format!(
                            "generalized selector needs two distinct quadratures, got {s}"
                        )));
                    }
                    let angle: f64 = angle
                        .parse()
                        .map_err(|_| Error::Selector(format!("bad angle in {s}")))?;
                    return Ok(QuadratureSelector::Generalized {
                        first,
                        second,
                        angle,
                    });
                }
            }
        }
        Err(Error::Selector(format!(
            "unrecognized quadrature {s:?} (expected X1 P1 X2 P2 X+ P+ X- P- or e.g. X+P-@0.5)"
        )))
    }
}
