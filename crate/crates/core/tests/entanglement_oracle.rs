//! Entanglement bookkeeping against the closed-form two-mode-squeezed state,
//! and the full dissipative model against its ideal limits.

mod common;

use common::*;
use qmfs::model::{Collective, QuadratureSelector};
use qmfs::scenarios::{scenario_fig4, Fig4Params};
use qmfs::steadystate::Covariance;

/// Wrap an analytic covariance in the library's container for the
/// [X₁,P₁,X₂,P₂] mechanical block.
fn mechanical_covariance(matrix: nalgebra::DMatrix<f64>) -> Covariance {
    use qmfs::dynamics::StateVar;
    Covariance {
        matrix,
        ordering: vec![
            StateVar::MechX(1),
            StateVar::MechP(1),
            StateVar::MechX(2),
            StateVar::MechP(2),
        ],
    }
}

#[test]
fn duan_of_the_analytic_squeezed_state_is_exact() {
    for r in [0.0, 0.3, 0.8, 1.5] {
        let cov = mechanical_covariance(two_mode_squeezed_covariance(r));
        let expected = (-2.0 * r).exp();
        let duan = cov.duan_quantity();
        assert!(
            (duan - expected).abs() < 1e-12,
            "r = {r}: Duan {duan} vs e^(-2r) = {expected}"
        );
        // The state is physical and, for r > 0, exactly at the uncertainty
        // boundary (it is pure).
        let margin = uncertainty_margin(&cov.matrix);
        assert!(margin.abs() < 1e-10, "pure state margin {margin:.2e}");
    }
}

#[test]
fn selector_variances_on_the_analytic_state_compose() {
    let cov = mechanical_covariance(two_mode_squeezed_covariance(0.6));
    let x_plus = cov.variance(&QuadratureSelector::X_PLUS);
    let p_plus = cov.variance(&QuadratureSelector::P_PLUS);
    // X₊ squeezed, P₊ anti-squeezed, product at the vacuum bound.
    assert!((x_plus - 0.5 * (-1.2f64).exp()).abs() < 1e-12);
    assert!((p_plus - 0.5 * (1.2f64).exp()).abs() < 1e-12);
    // A generalized axis interpolates with the half-angle law.
    for phi in [0.4, 1.7, 3.0] {
        let axis = QuadratureSelector::generalized(Collective::XPlus, Collective::PPlus, phi);
        let expected = (phi / 2.0).cos().powi(2) * x_plus + (phi / 2.0).sin().powi(2) * p_plus;
        let got = cov.variance(&axis);
        assert!(
            (got - expected).abs() < 1e-12,
            "phi = {phi}: {got} vs {expected} (X₊/P₊ are uncorrelated here)"
        );
    }
}

/// The full dissipative model can never beat the pure two-mode-squeezed
/// state at the same drive asymmetry, but it must still beat the separability
/// bound: ideal e^{-2r} = (1−ratio)/(1+ratio) < Duan_model < 1.
#[test]
fn dissipative_duan_sits_between_ideal_squeezing_and_separability() {
    let params = Fig4Params::default();
    let report = scenario_fig4(&params).unwrap();
    let duan = report.panel("budget").unwrap().column("duan").unwrap()[0];

    let ideal = (1.0 - params.blue_red_ratio) / (1.0 + params.blue_red_ratio);
    assert!(
        duan > ideal && duan < 1.0,
        "Duan {duan} outside ({ideal}, 1)"
    );

    // The steady state of the entangler is a physical Gaussian state.
    let x_plus = report.panel("budget").unwrap().column("x_plus").unwrap()[0];
    let p_plus = report.panel("budget").unwrap().column("p_plus").unwrap()[0];
    assert!(
        x_plus * p_plus >= 0.25 - 1e-9,
        "collective pair beats Heisenberg: {x_plus} × {p_plus}"
    );
}
