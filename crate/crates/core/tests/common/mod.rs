//! Oracle helpers shared by the integration tests.
//!
//! Everything here reaches steady state by a route independent of the
//! library's Lyapunov solver: time-domain propagation built from matrix
//! exponentials and explicit integration, plus closed-form Gaussian states.
#![allow(dead_code)] // each test binary uses its own subset

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qmfs::model::{reference_config, SystemConfig, ToneSet};

/// e^{A t} by Taylor series with scaling and squaring.
pub fn expm(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = (a * t).norm();
    let squarings = norm.log2().ceil().max(0.0) as u32 + 8;
    let small = a * (t / 2f64.powi(squarings as i32));

    let mut result = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..60 {
        term = (&term * &small) / k as f64;
        result += &term;
        if term.norm() < 1e-20 * result.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Steady-state covariance by doubling the accumulation horizon:
/// V(2t) = V(t) + e^{At} V(t) e^{Aᵀt}, starting from a series expansion of
/// V(t₀) over a step where ‖A t₀‖ ≪ 1. Runs until the propagator has decayed
/// to nothing, which it must for any strictly stable A.
pub fn lyapunov_by_doubling(a: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let t0 = 1.0 / (256.0 * a.norm().max(1e-300));

    // V(t₀) = Σ_k t₀^k/k! · S_k with S₁ = D, S_{k+1} = A S_k + S_k Aᵀ.
    let mut v = DMatrix::<f64>::zeros(a.nrows(), a.ncols());
    let mut s = d.clone();
    let mut coeff = t0;
    for k in 1..60 {
        v += &s * coeff;
        let next = a * &s + &s * a.transpose();
        coeff *= t0 / (k + 1) as f64;
        if next.norm() * coeff < 1e-22 * v.norm().max(1e-300) {
            break;
        }
        s = next;
    }

    let mut e = expm(a, t0);
    for _ in 0..200 {
        let increment = &e * &v * e.transpose();
        v += &increment;
        if increment.norm() < 1e-16 * v.norm() {
            break;
        }
        e = &e * &e;
    }
    0.5 * (&v + &v.transpose())
}

/// Steady-state covariance by fixed-step RK4 on dV/dt = AV + VAᵀ + D from
/// V(0) = 0 to `t_final`. Only practical for mildly stiff models.
pub fn lyapunov_by_rk4(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    t_final: f64,
    steps: usize,
) -> DMatrix<f64> {
    let h = t_final / steps as f64;
    let f = |v: &DMatrix<f64>| a * v + v * a.transpose() + d;
    let mut v = DMatrix::<f64>::zeros(a.nrows(), a.ncols());
    for _ in 0..steps {
        let k1 = f(&v);
        let k2 = f(&(&v + &k1 * (h / 2.0)));
        let k3 = f(&(&v + &k2 * (h / 2.0)));
        let k4 = f(&(&v + &k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    0.5 * (&v + &v.transpose())
}

/// Smallest eigenvalue of the Hermitian matrix V + (i/2)σ, with σ the
/// symplectic form for (X, P) pairs. Non-negative for any physical Gaussian
/// state (Heisenberg uncertainty in matrix form).
pub fn uncertainty_margin(v: &DMatrix<f64>) -> f64 {
    let n = v.nrows();
    assert_eq!(n % 2, 0);
    let mut h = v.map(|x| Complex64::new(x, 0.0));
    for k in (0..n).step_by(2) {
        h[(k, k + 1)] += Complex64::new(0.0, 0.5);
        h[(k + 1, k)] += Complex64::new(0.0, -0.5);
    }
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Covariance of a two-mode squeezed vacuum with parameter `r`, ordering
/// (X₁, P₁, X₂, P₂): V = S Sᵀ / 2 for the symplectic squeezer S.
pub fn two_mode_squeezed_covariance(r: f64) -> DMatrix<f64> {
    let (c, s) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let sq = DMatrix::from_row_slice(4, 4, &[
         c,  0.0, -s,  0.0,
         0.0, c,   0.0, s,
        -s,  0.0,  c,  0.0,
         0.0, s,   0.0, c,
    ]);
    0.5 * &sq * sq.transpose()
}

/// Relative Frobenius distance between two matrices.
pub fn relative_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// A random, strictly red-dominant, well-damped configuration. Drawn from
/// `rng`, so a fixed seed gives a fixed sequence.
pub fn random_stable_config(rng: &mut ChaCha8Rng) -> SystemConfig {
    let mut cfg = reference_config();
    for m in &mut cfg.mechanical_modes {
        m.gamma_hz = rng.random_range(50.0..2000.0);
        m.n_thermal = rng.random_range(0.2..60.0);
    }
    cfg.pump_cavity.kappa_ext_hz = rng.random_range(0.5e6..2.0e6);
    cfg.pump_cavity.kappa_int_hz = rng.random_range(0.0..0.4e6);
    cfg.pump_cavity.n_thermal = rng.random_range(0.0..0.5);
    cfg.amplifier_noise = rng.random_range(0.0..40.0);

    let detuning_hz = rng.random_range(5e3..300e3);
    let mut amplitudes = [0.0; 4];
    let mut phases = [0.0; 4];
    for j in [0usize, 2] {
        let red = rng.random_range(5e3..120e3);
        amplitudes[j] = red;
        amplitudes[j + 1] = red * rng.random_range(0.0..0.9);
    }
    for p in &mut phases {
        *p = rng.random_range(0.0..std::f64::consts::TAU);
    }
    cfg.pump_tones = ToneSet::with_amplitudes(detuning_hz, amplitudes, phases);

    if rng.random_range(0.0..1.0) < 0.5 {
        let mut probe_amps = [0.0; 4];
        let mut probe_phases = [0.0; 4];
        for j in [0usize, 2] {
            let red = rng.random_range(1e3..20e3);
            probe_amps[j] = red;
            probe_amps[j + 1] = red * rng.random_range(0.0..0.9);
        }
        for p in &mut probe_phases {
            *p = rng.random_range(0.0..std::f64::consts::TAU);
        }
        cfg.probe_tones = Some(ToneSet::with_amplitudes(
            detuning_hz,
            probe_amps,
            probe_phases,
        ));
    } else {
        cfg.probe_cavity = None;
    }
    cfg
}
