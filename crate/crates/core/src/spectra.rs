//! Output-field spectra: computation, Lorentzian fitting, and the mapping
//! back to mechanical variances.
//!
//! The detected record is the full output field of one cavity port (both
//! quadratures, as a phase-insensitive amplifier delivers it), so the
//! symmetrized power spectral density is built from the field response
//! h_a = (h_X + i·h_P)/√2 of every noise input, plus the amplifier's added
//! noise:
//!
//! S(ω) = Σ_i N_i |h_a,i(ω)|² + n_amp,  h_X(ω) = c_Xᵀ (−iω − A)⁻¹ B + d_Xᵀ.
//!
//! With the couplings off this floor is exactly flat at (n_c + 1/2) + n_amp;
//! mechanical motion adds a Lorentzian pair at ±Ω riding on it. Calibrating
//! the transduction gain converts peak heights and areas back into
//! quadrature variances in quanta.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use crate::dynamics::{DetectionCavity, LinearModel, OutputMap};
use crate::error::{Error, Result};

/// Points in the default frequency grid.
pub const DEFAULT_GRID_POINTS: usize = 8001;

/// Half-span of the default grid, in effective mechanical linewidths beyond
/// the sideband frequency. The Lorentzian tails left outside carry ≈ 1% of
/// the area; [`variance_from_trace`] puts them back analytically.
pub const DEFAULT_SPAN_LINEWIDTHS: f64 = 30.0;

/// Frequencies (rad/s, relative to the detected cavity's resonance) at which
/// a spectrum is evaluated.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    /// Uniform grid of `points` frequencies on ±`half_span`.
    pub fn centered(half_span: f64, points: usize) -> Self {
        assert!(points >= 3, "a spectrum needs at least 3 points");
        assert!(half_span > 0.0, "grid half-span must be positive");
        let step = 2.0 * half_span / (points - 1) as f64;
        FrequencyGrid {
            omegas: (0..points).map(|i| -half_span + i as f64 * step).collect(),
        }
    }

    /// Default grid for a model: ±(Ω + 30 γ_eff) with γ_eff the mean
    /// broadened linewidth, wide enough that both sideband peaks sit well
    /// inside with room for their tails.
    pub fn for_model(model: &LinearModel) -> Self {
        let g_eff = (model.effective_linewidth(1) + model.effective_linewidth(2)) / 2.0;
        Self::centered(
            model.detuning + DEFAULT_SPAN_LINEWIDTHS * g_eff,
            DEFAULT_GRID_POINTS,
        )
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }
}

/// A computed spectrum: `psd[i]` is the symmetrized output PSD in quanta at
/// `omega[i]` rad/s from the detected cavity's resonance.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTrace {
    pub omega: Vec<f64>,
    pub psd: Vec<f64>,
}

impl SpectrumTrace {
    /// Two-column CSV, frequencies in Hz.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# omega_rel_hz, psd_quanta\n");
        for (w, s) in self.omega.iter().zip(&self.psd) {
            out.push_str(&format!("{},{}\n", w / TAU, s));
        }
        out
    }
}

/// Precomputed complex pieces of the response calculation.
struct FieldResponse {
    a: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
    rows: DMatrix<Complex64>,
    feed: DMatrix<Complex64>,
    strengths: Vec<f64>,
    n_amp: f64,
}

impl FieldResponse {
    fn new(model: &LinearModel, map: &OutputMap) -> Self {
        let to_c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
        FieldResponse {
            a: to_c(&model.drift),
            b: to_c(&model.input_matrix()),
            rows: to_c(&map.state_rows),
            feed: to_c(&map.feedthrough),
            strengths: model.input_strengths(),
            n_amp: model.n_amp,
        }
    }

    /// (−iω − A)⁻¹ applied to a right-hand side.
    fn resolvent(&self, omega: f64, rhs: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut m = -&self.a;
        for k in 0..self.a.nrows() {
            m[(k, k)] -= Complex64::new(0.0, omega);
        }
        // Stable drift ⇒ (−iω − A) is nonsingular for every real ω.
        m.lu().solve(rhs).expect("resolvent exists on the real axis")
    }

    fn psd(&self, omega: f64) -> f64 {
        let h = &self.rows * self.resolvent(omega, &self.b) + &self.feed;
        let mut s = self.n_amp;
        for (i, n_i) in self.strengths.iter().enumerate() {
            let h_a = (h[(0, i)] + Complex64::i() * h[(1, i)]) * FRAC_1_SQRT_2;
            s += n_i * h_a.norm_sqr();
        }
        s
    }
}

/// Symmetrized PSD of the output field described by `map`, over `grid`.
pub fn output_spectrum(
    model: &LinearModel,
    map: &OutputMap,
    grid: &FrequencyGrid,
) -> SpectrumTrace {
    let response = FieldResponse::new(model, map);
    let psd: Vec<f64> = grid.omegas.par_iter().map(|&w| response.psd(w)).collect();
    SpectrumTrace {
        omega: grid.omegas.clone(),
        psd,
    }
}

/// Output-field PSD at a single frequency.
pub fn psd_at(model: &LinearModel, map: &OutputMap, omega: f64) -> f64 {
    FieldResponse::new(model, map).psd(omega)
}

/// Complex amplitude of the output field produced by a classical drive
/// vector `d₀` oscillating as Re(d₀ e^{−iωt}) on the state equations.
pub fn coherent_response(
    model: &LinearModel,
    map: &OutputMap,
    drive: &DVector<Complex64>,
    omega: f64,
) -> (DVector<Complex64>, Complex64) {
    let response = FieldResponse::new(model, map);
    let x = response.resolvent(omega, &DMatrix::from_column_slice(model.dim(), 1, drive.as_slice()));
    let r = &response.rows * &x;
    let field = (r[(0, 0)] + Complex64::i() * r[(1, 0)]) * FRAC_1_SQRT_2;
    (DVector::from_column_slice(x.as_slice()), field)
}

/// Transduction gain of the detected cavity at the sideband frequency:
/// multiply a mechanical spectral density (quanta·s) by this rate to get
/// the PSD it produces at the output. gain = κ_E |χ_c(Ω)|² Σ|c_q|².
pub fn calibrate_gain(model: &LinearModel, cavity: DetectionCavity) -> Result<f64> {
    let block = model.cavity(cavity)?;
    let sum_sq = block.coupling_sum_sq();
    if sum_sq <= 0.0 {
        return Err(Error::ZeroCoupling);
    }
    let chi_sq = 1.0 / ((block.kappa / 2.0).powi(2) + model.detuning.powi(2));
    Ok(block.kappa_ext * chi_sq * sum_sq)
}

/// One fitted sideband peak.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeakFit {
    /// Center, rad/s relative to the cavity.
    pub center: f64,
    /// Full width at half maximum, rad/s.
    pub fwhm: f64,
    /// ∫ L dω/2π in PSD units; peak height above floor is 4·area/fwhm.
    pub area: f64,
}

/// Result of fitting floor + two Lorentzians to a spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct TwoPeakFit {
    /// Peak with the negative center.
    pub left: PeakFit,
    /// Peak with the positive center.
    pub right: PeakFit,
    /// Flat noise floor, PSD units.
    pub floor: f64,
    /// False when either fitted width exceeds the peak separation — the
    /// parameters are then a description of one merged bump, not two peaks.
    pub resolved: bool,
    /// Accepted optimizer steps.
    pub iterations: usize,
}

const FIT_MAX_ITERATIONS: usize = 200;
const FIT_STEP_TOLERANCE: f64 = 1e-8;

/// Fit `floor + L₁ + L₂` to a trace holding one peak on each side of ω = 0.
///
/// Initialization is deterministic: floor from the median, peak seeds from
/// the grid maxima of each half and their half-maximum widths. Refinement is
/// damped least squares with the analytic Jacobian; amplitudes and widths
/// are optimized in log space so they stay positive.
pub fn fit_two_lorentzians(trace: &SpectrumTrace) -> Result<TwoPeakFit> {
    let n = trace.omega.len();
    assert!(n >= 16, "too few points to fit two peaks");
    // Work in scaled units: frequencies by the span, PSD by its maximum.
    let w_scale = trace
        .omega
        .iter()
        .fold(0.0f64, |m, w| m.max(w.abs()))
        .max(f64::MIN_POSITIVE);
    let s_scale = trace
        .psd
        .iter()
        .fold(0.0f64, |m, s| m.max(s.abs()))
        .max(f64::MIN_POSITIVE);
    let xs: Vec<f64> = trace.omega.iter().map(|w| w / w_scale).collect();
    let zs: Vec<f64> = trace.psd.iter().map(|s| s / s_scale).collect();

    let floor0 = median(&zs);
    let step = (xs[n - 1] - xs[0]) / (n - 1) as f64;

    let seed_half = |lo: usize, hi: usize| -> Result<(f64, f64, f64)> {
        let (mut imax, mut zmax) = (lo, f64::NEG_INFINITY);
        for i in lo..hi {
            if zs[i] > zmax {
                zmax = zs[i];
                imax = i;
            }
        }
        let height = zmax - floor0;
        if !(height > 1e-6 * floor0.max(1e-12)) {
            return Err(Error::PeaksUnresolved);
        }
        // Half-maximum crossings give a width seed.
        let half = floor0 + height / 2.0;
        let mut l = imax;
        while l > lo && zs[l] > half {
            l -= 1;
        }
        let mut r = imax;
        while r + 1 < hi && zs[r] > half {
            r += 1;
        }
        let width = ((r - l) as f64 * step).max(2.0 * step);
        Ok((xs[imax], height, width))
    };
    let (c1, h1, g1) = seed_half(0, n / 2)?;
    let (c2, h2, g2) = seed_half(n / 2, n)?;

    // p = [floor, c₁, ln a₁, ln Γ₁, c₂, ln a₂, ln Γ₂], a = area (height·Γ/4).
    let p0 = DVector::from_vec(vec![
        floor0,
        c1,
        (h1 * g1 / 4.0).ln(),
        g1.ln(),
        c2,
        (h2 * g2 / 4.0).ln(),
        g2.ln(),
    ]);
    let (p, iterations) = levenberg_marquardt(p0, &xs, &zs)?;

    let mut peaks = [
        PeakFit {
            center: p[1] * w_scale,
            fwhm: p[3].exp() * w_scale,
            area: p[2].exp() * s_scale * w_scale,
        },
        PeakFit {
            center: p[4] * w_scale,
            fwhm: p[6].exp() * w_scale,
            area: p[5].exp() * s_scale * w_scale,
        },
    ];
    if peaks[0].center > peaks[1].center {
        peaks.swap(0, 1);
    }
    let separation = peaks[1].center - peaks[0].center;
    let resolved = peaks[0].fwhm < separation && peaks[1].fwhm < separation;
    Ok(TwoPeakFit {
        left: peaks[0],
        right: peaks[1],
        floor: p[0] * s_scale,
        resolved,
        iterations,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn fit_model(p: &DVector<f64>, x: f64) -> f64 {
    let mut v = p[0];
    for k in [1usize, 4] {
        let (c, a, g) = (p[k], p[k + 1].exp(), p[k + 2].exp());
        let d = x - c;
        v += a * g / (d * d + g * g / 4.0);
    }
    v
}

fn fit_cost(p: &DVector<f64>, xs: &[f64], zs: &[f64]) -> f64 {
    xs.iter()
        .zip(zs)
        .map(|(&x, &z)| {
            let r = fit_model(p, x) - z;
            r * r
        })
        .sum::<f64>()
        / 2.0
}

fn levenberg_marquardt(
    mut p: DVector<f64>,
    xs: &[f64],
    zs: &[f64],
) -> Result<(DVector<f64>, usize)> {
    let n = xs.len();
    let mut lambda = 1e-3;
    let mut cost = fit_cost(&p, xs, zs);
    let mut last_step = f64::INFINITY;

    for iteration in 1..=FIT_MAX_ITERATIONS {
        let mut jac = DMatrix::<f64>::zeros(n, 7);
        let mut res = DVector::<f64>::zeros(n);
        for (i, (&x, &z)) in xs.iter().zip(zs).enumerate() {
            res[i] = fit_model(&p, x) - z;
            jac[(i, 0)] = 1.0;
            for k in [1usize, 4] {
                let (c, a, g) = (p[k], p[k + 1].exp(), p[k + 2].exp());
                let d = x - c;
                let den = d * d + g * g / 4.0;
                let lor = a * g / den;
                jac[(i, k)] = lor * 2.0 * d / den;
                jac[(i, k + 1)] = lor; // ∂/∂ln a
                jac[(i, k + 2)] = a * g * (d * d - g * g / 4.0) / (den * den); // ∂/∂ln Γ
            }
        }
        let h = jac.transpose() * &jac;
        let grad = jac.transpose() * &res;

        let mut accepted = false;
        for _ in 0..60 {
            let mut m = h.clone();
            for k in 0..7 {
                m[(k, k)] += lambda * h[(k, k)].max(1e-12);
            }
            if let Some(delta) = m.lu().solve(&(-&grad)) {
                let candidate = &p + &delta;
                let c_new = fit_cost(&candidate, xs, zs);
                if c_new.is_finite() && c_new < cost {
                    last_step = delta.norm() / (p.norm() + 1e-12);
                    p = candidate;
                    cost = c_new;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !accepted {
            // No damping improves the fit: either we are at the minimum to
            // machine precision, or the model cannot follow the data.
            if last_step < FIT_STEP_TOLERANCE || cost < 1e-20 {
                return Ok((p, iteration));
            }
            return Err(Error::FitDiverged {
                iterations: iteration,
                last_step,
            });
        }
        if last_step < FIT_STEP_TOLERANCE {
            return Ok((p, iteration));
        }
    }
    Err(Error::FitDiverged {
        iterations: FIT_MAX_ITERATIONS,
        last_step,
    })
}

/// Variance- and imprecision-level summary read off a fitted spectrum.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralInference {
    /// Effective measured variance: true quadrature variance plus the
    /// imprecision level, in quanta. The quantum limit on a stationary
    /// quadrature is 1.
    pub x2_eff: f64,
    /// Measurement imprecision referred to the mechanics, quanta.
    pub n_imp: f64,
    /// Transduction gain used for the conversion, rad/s.
    pub gain: f64,
}

/// Convert fitted peak levels into mechanical units.
///
/// Uses the mean mechanical linewidth γ̄: the effective variance is the
/// gain-referred PSD at the peak centers times γ̄/2, averaged over the two
/// sidebands, and the imprecision is the gain-referred floor times γ̄/2.
pub fn effective_occupation(
    fit: &TwoPeakFit,
    model: &LinearModel,
    cavity: DetectionCavity,
) -> Result<SpectralInference> {
    let gain = calibrate_gain(model, cavity)?;
    let gamma = (model.gamma[0] + model.gamma[1]) / 2.0;
    let peak_psd = |p: &PeakFit| fit.floor + 4.0 * p.area / p.fwhm;
    let s_peak = (peak_psd(&fit.left) + peak_psd(&fit.right)) / 2.0;
    Ok(SpectralInference {
        x2_eff: gamma * s_peak / (2.0 * gain),
        n_imp: gamma * fit.floor / (2.0 * gain),
        gain,
    })
}

/// Recover the measured quadrature's variance from a spectrum: trapezoidal
/// integral of (PSD − floor)/gain over the grid, plus the analytic tails of
/// the fitted Lorentzians that the finite grid cuts off.
pub fn variance_from_trace(
    trace: &SpectrumTrace,
    fit: &TwoPeakFit,
    model: &LinearModel,
    cavity: DetectionCavity,
) -> Result<f64> {
    let gain = calibrate_gain(model, cavity)?;
    let mut acc = 0.0;
    for i in 1..trace.omega.len() {
        let f = (trace.psd[i - 1] - fit.floor) + (trace.psd[i] - fit.floor);
        acc += f / 2.0 * (trace.omega[i] - trace.omega[i - 1]);
    }
    let mut variance = acc / (TAU * gain);

    let (w_lo, w_hi) = (trace.omega[0], *trace.omega.last().unwrap());
    for p in [&fit.left, &fit.right] {
        let half = p.fwhm / 2.0;
        let inside = (((w_hi - p.center) / half).atan() - ((w_lo - p.center) / half).atan()) / PI;
        variance += p.area * (1.0 - inside) / gain;
    }
    Ok(variance)
}
