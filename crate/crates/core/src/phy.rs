//! Array response, LoS channels, and link/echo budgets.
//!
//! The transmit side is a uniform linear array whose element `m` sees the
//! phase `2π (Δd/λ) m sin θ` toward bearing θ, so the steering vector has
//! unit-modulus entries and squared norm `N_t`. A line-of-sight channel is
//! that steering vector scaled by `α0/d` and rotated by the carrier phase
//! of the slant range. Two transmit regimes appear:
//!
//! * omnidirectional — covariance `(P_T/N_t)·I`, used in the first slot of
//!   each frame to illuminate everything at once;
//! * directional — one beam vector per object, with per-object SINR and
//!   the echo SNR `G_m |β|² Σ_i |a(θ)^H w_i|² / σ²` that replaces the omni
//!   budget `P_T G_m |β|² / σ²` once beams exist.
//!
//! Echo strength follows the two-way inverse-square law through the
//! reflectivity `β = ε / d²`. All SINR/SNR helpers are pure functions of
//! the true geometry so the same code scores real and hypothetical beams.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Array layout and carrier, fixed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    /// Transmit elements.
    pub n_tx: usize,
    /// Receive elements.
    pub n_rx: usize,
    /// Element spacing, m.
    pub spacing_m: f64,
    /// Carrier wavelength, m.
    pub wavelength_m: f64,
}

impl ArrayGeometry {
    pub fn from_config(cfg: &crate::SimConfig) -> Self {
        ArrayGeometry {
            n_tx: cfg.n_tx,
            n_rx: cfg.n_rx,
            spacing_m: cfg.spacing_m(),
            wavelength_m: cfg.wavelength_m(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("range must be positive, got {d_m} m")]
    BadRange { d_m: f64 },
    #[error("beam covariance is not Hermitian PSD: {detail}")]
    NotPsd { detail: String },
}

/// Transmit steering vector `a(θ)`, entries `exp(j 2π (Δd/λ) m sin θ)`.
pub fn steering_vector(theta_rad: f64, geom: &ArrayGeometry) -> DVector<Complex64> {
    let step = 2.0 * std::f64::consts::PI * geom.spacing_m / geom.wavelength_m * theta_rad.sin();
    DVector::from_fn(geom.n_tx, |m, _| {
        Complex64::from_polar(1.0, step * m as f64)
    })
}

/// LoS channel `(α0/d) e^{j 2π d / λ} a(θ)`.
pub fn channel_vector(
    theta_rad: f64,
    d_m: f64,
    geom: &ArrayGeometry,
    alpha0: f64,
) -> Result<DVector<Complex64>, PhyError> {
    if !(d_m > 0.0) {
        return Err(PhyError::BadRange { d_m });
    }
    let phase = 2.0 * std::f64::consts::PI * d_m / geom.wavelength_m;
    let gain = Complex64::from_polar(alpha0 / d_m, phase);
    Ok(steering_vector(theta_rad, geom) * gain)
}

/// Hermitian PSD transmit covariance, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamMatrix {
    mat: DMatrix<Complex64>,
}

impl BeamMatrix {
    /// Accepts matrices Hermitian to 1e-9 (relative) whose eigenvalues are
    /// no more negative than `-1e-8 · tr`.
    pub fn try_new(mat: DMatrix<Complex64>) -> Result<Self, PhyError> {
        let scale = mat.norm().max(1e-300);
        let herm_err = (&mat - mat.adjoint()).norm() / scale;
        if herm_err > 1e-9 {
            return Err(PhyError::NotPsd {
                detail: format!("Hermitian defect {herm_err:.2e}"),
            });
        }
        // symmetrize before the eigencheck so roundoff cannot flip the verdict
        let sym = (&mat + mat.adjoint()) * Complex64::new(0.5, 0.0);
        let trace = sym.trace().re;
        let min_eig = sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -1e-8 * trace.abs().max(1e-300) {
            return Err(PhyError::NotPsd {
                detail: format!("eigenvalue {min_eig:.2e} below -1e-8·tr"),
            });
        }
        Ok(BeamMatrix { mat: sym })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Radiated power density toward θ: `a(θ)^H W a(θ)`, clamped at 0.
    pub fn gain(&self, theta_rad: f64, geom: &ArrayGeometry) -> f64 {
        let a = steering_vector(theta_rad, geom);
        (a.adjoint() * &self.mat * &a)[(0, 0)].re.max(0.0)
    }
}

/// Isotropic transmit covariance `(P_T/N_t)·I`.
pub fn omni_covariance(p_total: f64, geom: &ArrayGeometry) -> BeamMatrix {
    BeamMatrix {
        mat: DMatrix::from_diagonal_element(
            geom.n_tx,
            geom.n_tx,
            Complex64::new(p_total / geom.n_tx as f64, 0.0),
        ),
    }
}

/// Downlink SINR of one object during the omni slot, all `K` streams live.
pub fn omni_sinr(d_m: f64, k_objects: usize, alpha0: f64, p_total: f64, comm_noise: f64) -> f64 {
    let k = k_objects as f64;
    let per_stream = alpha0 * alpha0 * p_total / (d_m * d_m * k);
    per_stream / (per_stream * (k - 1.0) + comm_noise)
}

/// Downlink SINR of object `k` under directional beams.
pub fn directional_sinr(
    channel: &DVector<Complex64>,
    beams: &[DVector<Complex64>],
    k: usize,
    comm_noise: f64,
) -> f64 {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (i, w) in beams.iter().enumerate() {
        let p = channel.dotc(w).norm_sqr();
        if i == k {
            signal = p;
        } else {
            interference += p;
        }
    }
    signal / (interference + comm_noise)
}

/// Shannon rate, b/s/Hz.
pub fn rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Two-way reflectivity `β = ε / d²`.
pub fn reflection_coeff(d_m: f64, epsilon: Complex64) -> Result<Complex64, PhyError> {
    if !(d_m > 0.0) {
        return Err(PhyError::BadRange { d_m });
    }
    Ok(epsilon / (d_m * d_m))
}

/// Echo SNR under isotropic illumination.
pub fn radar_snr_omni(p_total: f64, matched_gain: f64, beta: Complex64, radar_noise: f64) -> f64 {
    p_total * matched_gain * beta.norm_sqr() / radar_noise
}

/// Echo SNR under directional beams; all beams illuminate the true bearing.
pub fn radar_snr_directional(
    theta_true_rad: f64,
    beams: &[DVector<Complex64>],
    geom: &ArrayGeometry,
    matched_gain: f64,
    beta: Complex64,
    radar_noise: f64,
) -> f64 {
    let a = steering_vector(theta_true_rad, geom);
    let energy: f64 = beams.iter().map(|w| a.dotc(w).norm_sqr()).sum();
    matched_gain * beta.norm_sqr() * energy / radar_noise
}
