//! Steady-state covariance via the continuous Lyapunov equation.
//!
//! For a stable drift A and diffusion D, the stationary covariance V of the
//! quadrature vector solves A V + V Aᵀ + D = 0. The solver vectorizes the
//! equation with a Kronecker product — (I⊗A + A⊗I)·vec(V) = −vec(D) — and
//! LU-factors the result, which is exact and cheap at these dimensions
//! (n ≤ 8, so the linear system is at most 64×64).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::dynamics::{assemble_drift, LinearModel, StateVar};
use crate::error::{Error, Result};
use crate::model::{Collective, Quad, QuadratureSelector, SystemConfig, ValidConfig};

/// Fraction of the pump linewidth a drift eigenvalue must clear for the
/// steady state to be accepted as well-defined.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// Relative Frobenius residual allowed on the solved Lyapunov equation.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Symmetric steady-state covariance, in the model's state ordering.
/// Entries are dimensionless quadrature (co)variances; vacuum is 1/2.
#[derive(Debug, Clone)]
pub struct Covariance {
    pub matrix: DMatrix<f64>,
    pub ordering: Vec<StateVar>,
}

impl Covariance {
    /// ⟨Q²⟩ for the selected quadrature.
    pub fn variance(&self, selector: &QuadratureSelector) -> f64 {
        let v = selector_vector(&self.ordering, selector);
        (v.transpose() * &self.matrix * &v)[(0, 0)]
    }

    /// Symmetrized cross-correlation ⟨{Q_a, Q_b}⟩/2.
    pub fn correlation(&self, a: &QuadratureSelector, b: &QuadratureSelector) -> f64 {
        let va = selector_vector(&self.ordering, a);
        let vb = selector_vector(&self.ordering, b);
        (va.transpose() * &self.matrix * &vb)[(0, 0)]
    }

    /// The two-mode separability quantity ⟨X₊²⟩ + ⟨P₋²⟩; values below 1
    /// certify entanglement of the oscillator pair.
    pub fn duan_quantity(&self) -> f64 {
        self.variance(&QuadratureSelector::X_PLUS) + self.variance(&QuadratureSelector::P_MINUS)
    }
}

/// Unit vector of coefficients expressing a quadrature selector in the
/// given state ordering.
pub fn selector_vector(ordering: &[StateVar], selector: &QuadratureSelector) -> DVector<f64> {
    let pos = |var: StateVar| {
        ordering
            .iter()
            .position(|v| *v == var)
            .expect("mechanical quadratures are always present")
    };
    let mut v = DVector::zeros(ordering.len());
    match selector {
        QuadratureSelector::Single { oscillator, quad } => {
            let var = match quad {
                Quad::X => StateVar::MechX(*oscillator),
                Quad::P => StateVar::MechP(*oscillator),
            };
            v[pos(var)] = 1.0;
        }
        QuadratureSelector::Collective(c) => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            let (var1, var2, sign) = match c {
                Collective::XPlus => (StateVar::MechX(1), StateVar::MechX(2), 1.0),
                Collective::XMinus => (StateVar::MechX(1), StateVar::MechX(2), -1.0),
                Collective::PPlus => (StateVar::MechP(1), StateVar::MechP(2), 1.0),
                Collective::PMinus => (StateVar::MechP(1), StateVar::MechP(2), -1.0),
            };
            v[pos(var1)] = r;
            v[pos(var2)] = sign * r;
        }
        QuadratureSelector::Generalized {
            first,
            second,
            angle,
        } => {
            // Half-angle weights: one full turn of the drive phase sweeps the
            // measured axis from `first` to `second` and back with a sign.
            let a = selector_vector(ordering, &QuadratureSelector::Collective(*first));
            let b = selector_vector(ordering, &QuadratureSelector::Collective(*second));
            v = (angle / 2.0).cos() * a + (angle / 2.0).sin() * b;
        }
    }
    v
}

/// Solve A V + V Aᵀ + D = 0 for the model's stationary covariance.
///
/// Rejects models whose slowest eigenvalue sits within [`STABILITY_MARGIN`]
/// of the imaginary axis (relative to the pump linewidth): the steady state
/// formally exists there but loses numerical meaning.
pub fn solve_lyapunov(model: &LinearModel) -> Result<Covariance> {
    let threshold = -STABILITY_MARGIN * model.pump.kappa;
    if model.max_re_eigenvalue > threshold {
        return Err(Error::MarginallyStable {
            max_re: model.max_re_eigenvalue,
            threshold,
        });
    }

    let a = &model.drift;
    let d = &model.diffusion;
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    // vec is column-major, so vec(AV) = (I⊗A)vec(V), vec(VAᵀ) = (A⊗I)vec(V).
    let m = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DVector::from_column_slice(d.as_slice());
    let sol = m.lu().solve(&rhs).ok_or(Error::IllConditioned {
        residual: f64::INFINITY,
        tolerance: RESIDUAL_TOLERANCE,
    })?;
    let v = DMatrix::from_column_slice(n, n, sol.as_slice());
    let v = (&v + v.transpose()) / 2.0;

    let residual = (a * &v + &v * a.transpose() + d).norm() / d.norm();
    if !(residual < RESIDUAL_TOLERANCE) {
        return Err(Error::IllConditioned {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }

    Ok(Covariance {
        matrix: v,
        ordering: model.ordering.clone(),
    })
}

/// Assemble and solve in one step.
pub fn steady_state(valid: &ValidConfig) -> Result<(LinearModel, Covariance)> {
    let model = assemble_drift(valid)?;
    let cov = solve_lyapunov(&model)?;
    Ok((model, cov))
}

/// Evaluate selected variances for a batch of configs in parallel.
///
/// Rows come back in input order; each row fails independently, so one
/// unstable point does not poison a parameter sweep.
pub fn sweep(
    configs: &[SystemConfig],
    selectors: &[QuadratureSelector],
) -> Vec<Result<Vec<f64>>> {
    configs
        .par_iter()
        .map(|cfg| {
            let valid = cfg.clone().validate()?;
            let (_, cov) = steady_state(&valid)?;
            Ok(selectors.iter().map(|s| cov.variance(s)).collect())
        })
        .collect()
}
