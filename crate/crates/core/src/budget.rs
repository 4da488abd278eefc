//! Closed-form noise-budget laws for a balanced four-tone measurement.
//!
//! These are the textbook limits the full model should reproduce in the
//! resolved-sideband, weak-coupling regime (κ ≫ G, Ω and Ω ≫ γ); they are
//! deliberately independent of the matrix machinery so the two routes can
//! be checked against each other.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Effective measured variance at the fundamental quantum limit, quanta.
/// Imprecision and backaction trade off to leave x²_eff = 1 at best for a
/// quadrature that is not backaction-evaded.
pub const FQL_EFFECTIVE_VARIANCE: f64 = 1.0;

/// Measurement cooperativity C = 4G²/(κγ). Any consistent frequency unit
/// works — the ratio is dimensionless.
pub fn cooperativity(g: f64, kappa: f64, gamma: f64) -> f64 {
    4.0 * g * g / (kappa * gamma)
}

/// Thermal variance of a collective quadrature, (n₁ + n₂)/2 + 1/2.
pub fn thermal_variance(n1: f64, n2: f64) -> f64 {
    (n1 + n2) / 2.0 + 0.5
}

/// Quantum-backaction heating of the conjugate quadrature pair, quanta.
pub fn n_qba(c: f64) -> f64 {
    2.0 * c
}

/// Classical-backaction heating from a thermal cavity occupation, quanta.
pub fn n_cba(c: f64, n_cavity: f64) -> f64 {
    4.0 * c * n_cavity
}

/// Measurement imprecision referred to the mechanics, quanta.
pub fn n_imp(c: f64, n_amp: f64) -> f64 {
    (n_amp + 0.5) / (8.0 * c)
}

/// dB distance of a separability value from the entanglement border at 1:
/// negative means entangled.
pub fn duan_margin_db(duan: f64) -> f64 {
    10.0 * duan.log10()
}

/// Linewidth and occupation after sideband cooling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CooledMode {
    /// Broadened linewidth γ₀(1 + C), same unit as γ₀.
    pub gamma_eff: f64,
    /// Effective occupation (n₀ + C·n_residual)/(1 + C), quanta.
    pub n_eff: f64,
}

/// Dynamical backaction cooling with cooperativity `c_cool`; `n_residual`
/// is the occupation the cooling bath itself enforces (cavity thermal
/// photons and counter-rotating terms), reached in the strong-cooling limit.
pub fn sideband_cooling_effective(
    gamma0: f64,
    n0: f64,
    c_cool: f64,
    n_residual: f64,
) -> CooledMode {
    CooledMode {
        gamma_eff: gamma0 * (1.0 + c_cool),
        n_eff: (n0 + c_cool * n_residual) / (1.0 + c_cool),
    }
}

/// Complete budget for a measured collective quadrature and its conjugate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoiseBudget {
    pub cooperativity: f64,
    /// Thermal level of either collective quadrature, quanta.
    pub thermal: f64,
    /// Quantum backaction landing on the conjugate pair, quanta.
    pub quantum_backaction: f64,
    /// Classical (thermal-photon) backaction on the conjugate pair, quanta.
    pub classical_backaction: f64,
    /// Imprecision of the measured quadrature, quanta.
    pub imprecision: f64,
    /// What a perfect backaction-evading readout records: thermal motion
    /// plus imprecision.
    pub measured_total: f64,
    /// Variance of the conjugate quadrature pair, heated by both
    /// backaction terms.
    pub conjugate_total: f64,
}

impl NoiseBudget {
    /// Budget from explicit parameters.
    pub fn new(c: f64, n1: f64, n2: f64, n_cavity: f64, n_amp: f64) -> Self {
        let thermal = thermal_variance(n1, n2);
        let quantum_backaction = n_qba(c);
        let classical_backaction = n_cba(c, n_cavity);
        let imprecision = n_imp(c, n_amp);
        NoiseBudget {
            cooperativity: c,
            thermal,
            quantum_backaction,
            classical_backaction,
            imprecision,
            measured_total: thermal + imprecision,
            conjugate_total: thermal + quantum_backaction + classical_backaction,
        }
    }

    /// Budget for a config's pump measurement, using the mean tone
    /// amplitude and the mean mechanical linewidth.
    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        let g = cfg
            .pump_tones
            .tones
            .iter()
            .map(|t| t.amplitude())
            .sum::<f64>()
            / 4.0;
        if g <= 0.0 {
            return Err(Error::ZeroCoupling);
        }
        let c = cooperativity(g, cfg.pump_cavity.kappa(), cfg.gamma_mean());
        Ok(NoiseBudget::new(
            c,
            cfg.mechanical_modes[0].n_thermal,
            cfg.mechanical_modes[1].n_thermal,
            cfg.pump_cavity.n_thermal,
            cfg.amplifier_noise,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reference_config, ToneSet};
    use std::f64::consts::TAU;

    #[test]
    fn cooperativity_is_unit_invariant() {
        let in_hz = cooperativity(121e3, 1.58e6, 69.5);
        let in_rad = cooperativity(TAU * 121e3, TAU * 1.58e6, TAU * 69.5);
        assert!((in_hz - 533.32).abs() < 0.01, "{in_hz}");
        assert!((in_hz - in_rad).abs() < 1e-9 * in_hz);
    }

    #[test]
    fn imprecision_law_reference_point() {
        assert!((n_imp(2.1, 0.0) - 0.029762).abs() < 1e-6);
        // Doubling the amplifier noise beyond vacuum doubles nothing else.
        assert!((n_imp(1.0, 0.5) - 0.125).abs() < 1e-12);
    }

    #[test]
    fn duan_margin_reference_points() {
        assert!((duan_margin_db(0.724) - (-1.403)).abs() < 5e-4);
        assert!((duan_margin_db(2.0) - 3.0103).abs() < 5e-4);
        assert_eq!(duan_margin_db(1.0), 0.0);
    }

    #[test]
    fn cooling_interpolates_between_bath_and_residual() {
        let free = sideband_cooling_effective(55.0, 32.0, 0.0, 0.1);
        assert_eq!(free.gamma_eff, 55.0);
        assert_eq!(free.n_eff, 32.0);

        let strong = sideband_cooling_effective(55.0, 32.0, 1e6, 0.1);
        assert!((strong.n_eff - 0.1).abs() < 1e-3);
        assert!((strong.gamma_eff - 55.0 * (1.0 + 1e6)).abs() < 1.0);

        let mid = sideband_cooling_effective(55.0, 32.0, 9.0, 0.0);
        assert!((mid.n_eff - 3.2).abs() < 1e-12);
    }

    #[test]
    fn budget_composition_is_consistent() {
        let b = NoiseBudget::new(2.1, 2.7, 2.7, 0.23, 30.0);
        assert!((b.thermal - 3.2).abs() < 1e-12);
        assert!((b.quantum_backaction - 4.2).abs() < 1e-12);
        assert!((b.classical_backaction - 4.0 * 2.1 * 0.23).abs() < 1e-12);
        assert!((b.measured_total - (b.thermal + b.imprecision)).abs() < 1e-12);
        assert!(
            (b.conjugate_total - (3.2 + 4.2 + 1.932)).abs() < 1e-12,
            "{}",
            b.conjugate_total
        );
    }

    #[test]
    fn config_budget_uses_mean_amplitude_and_linewidth() {
        let mut cfg = reference_config();
        cfg.pump_tones = ToneSet::symmetric(10e3, 121e3, [0.0; 4]);
        cfg.mechanical_modes[0].gamma_hz = 55.0;
        cfg.mechanical_modes[1].gamma_hz = 84.0;
        let b = NoiseBudget::for_config(&cfg).unwrap();
        assert!((b.cooperativity - 533.32).abs() < 0.01);

        cfg.pump_tones = ToneSet::symmetric(10e3, 0.0, [0.0; 4]);
        assert!(matches!(
            NoiseBudget::for_config(&cfg),
            Err(Error::ZeroCoupling)
        ));
    }
}
