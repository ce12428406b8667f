//! Echo measurement synthesis.
//!
//! Rather than simulating waveforms, each slot draws (angle, delay,
//! Doppler) estimates directly from the deterministic measurement map
//! plus zero-mean Gaussian errors whose variances follow the estimation
//! bounds at the current echo SNR:
//!
//! ```text
//! σ_θ² = 1 / (SNR · N_t · N_r · ξ²)      ξ² = π² d² cos²θ (N_t²−1) / (3λ²)
//! σ_τ² = 1 / (SNR · N_t · N_r · κ²)
//! σ_μ² = 1 / (SNR · N_t · N_r · ι²)
//! ```
//!
//! so better illumination of the true bearing directly tightens the next
//! fix. `ξ² → 0` at broadside (`cos θ → 0`), where the angle variance is
//! clamped to a configurable ceiling and flagged. The measurement map and
//! its inverse (used at first contact) are:
//!
//! ```text
//! θ̂ = θ          τ̂ = 2d/c          μ̂ = −2(v cosθ − v_u cos(θ+θ_u)) f_c / c
//! ```
//!
//! The inverse recovers `v` by dividing by `cos θ̂`, so it refuses
//! near-zenith fixes where the ground speed is unobservable from Doppler.

use crate::world::{PolarState, UavState};
use crate::C_MPS;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;
use thiserror::Error;

/// Constants of the variance model, fixed for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbParams {
    pub n_tx: usize,
    pub n_rx: usize,
    /// RMS signal bandwidth, Hz.
    pub kappa_hz: f64,
    /// RMS accumulation time, s.
    pub iota_s: f64,
    /// Carrier wavelength, m.
    pub wavelength_m: f64,
    /// Cap on σ_θ², rad².
    pub angle_var_ceiling_rad2: f64,
}

impl CrbParams {
    pub fn from_config(cfg: &crate::SimConfig) -> Self {
        CrbParams {
            n_tx: cfg.n_tx,
            n_rx: cfg.n_rx,
            kappa_hz: cfg.kappa_hz,
            iota_s: cfg.iota_s,
            wavelength_m: cfg.wavelength_m(),
            angle_var_ceiling_rad2: cfg.angle_var_ceiling_rad2,
        }
    }
}

/// Per-component variances used for one synthesized measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVariances {
    pub theta_rad2: f64,
    pub tau_s2: f64,
    pub mu_hz2: f64,
    /// True when σ_θ² hit the broadside ceiling.
    pub ceiling_applied: bool,
}

/// One synthesized echo fix with the variances it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub theta_rad: f64,
    pub tau_s: f64,
    pub mu_hz: f64,
    pub var: NoiseVariances,
}

#[derive(Debug, Error, PartialEq)]
pub enum SensingError {
    #[error("echo SNR must be positive, got {snr}")]
    BadSnr { snr: f64 },
    #[error("range must be positive, got {d_m} m")]
    BadRange { d_m: f64 },
    #[error("delay {tau_s} s does not invert to a positive range")]
    BadDelay { tau_s: f64 },
    #[error("bearing {theta_rad} rad is too close to broadside to recover ground speed")]
    NearZenith { theta_rad: f64 },
}

/// Estimation variances at the given echo SNR and true geometry.
pub fn crb_variances(
    snr: f64,
    theta_rad: f64,
    d_m: f64,
    p: &CrbParams,
) -> Result<NoiseVariances, SensingError> {
    if !(snr > 0.0) {
        return Err(SensingError::BadSnr { snr });
    }
    if !(d_m > 0.0) {
        return Err(SensingError::BadRange { d_m });
    }
    let n = snr * p.n_tx as f64 * p.n_rx as f64;
    let nt = p.n_tx as f64;
    let cos = theta_rad.cos();
    let xi2 = std::f64::consts::PI.powi(2) * d_m * d_m * cos * cos * (nt * nt - 1.0)
        / (3.0 * p.wavelength_m * p.wavelength_m);
    let raw_theta = 1.0 / (n * xi2);
    let ceiling_applied = !(raw_theta <= p.angle_var_ceiling_rad2);
    Ok(NoiseVariances {
        theta_rad2: if ceiling_applied {
            p.angle_var_ceiling_rad2
        } else {
            raw_theta
        },
        tau_s2: 1.0 / (n * p.kappa_hz * p.kappa_hz),
        mu_hz2: 1.0 / (n * p.iota_s * p.iota_s),
        ceiling_applied,
    })
}

/// Noise-free measurement of one object.
pub fn ideal_measurement(polar: &PolarState, uav: &UavState, carrier_hz: f64) -> (f64, f64, f64) {
    let range_rate = polar.v_mps * polar.theta_rad.cos()
        - uav.speed_mps * (polar.theta_rad + uav.heading_rad).cos();
    (
        polar.theta_rad,
        2.0 * polar.d_m / C_MPS,
        -2.0 * range_rate * carrier_hz / C_MPS,
    )
}

/// Draws one measurement; `noise_scale` scales every deviation (0 = exact).
pub fn synthesize_measurement<R: Rng + ?Sized>(
    polar: &PolarState,
    uav: &UavState,
    snr: f64,
    carrier_hz: f64,
    p: &CrbParams,
    noise_scale: f64,
    rng: &mut R,
) -> Result<Measurement, SensingError> {
    let var = crb_variances(snr, polar.theta_rad, polar.d_m, p)?;
    let (theta, tau, mu) = ideal_measurement(polar, uav, carrier_hz);
    let zt: f64 = rng.sample(StandardNormal);
    let zd: f64 = rng.sample(StandardNormal);
    let zm: f64 = rng.sample(StandardNormal);
    Ok(Measurement {
        theta_rad: theta + noise_scale * var.theta_rad2.sqrt() * zt,
        tau_s: tau + noise_scale * var.tau_s2.sqrt() * zd,
        mu_hz: mu + noise_scale * var.mu_hz2.sqrt() * zm,
        var,
    })
}

/// Inverts one fix into a polar state, for first contact with an object.
pub fn initial_state_from_measurement(
    m: &Measurement,
    uav: &UavState,
    carrier_hz: f64,
) -> Result<PolarState, SensingError> {
    let d_m = C_MPS * m.tau_s / 2.0;
    if !(d_m > 0.0) {
        return Err(SensingError::BadDelay { tau_s: m.tau_s });
    }
    let cos = m.theta_rad.cos();
    if cos.abs() < 1e-6 {
        return Err(SensingError::NearZenith {
            theta_rad: m.theta_rad,
        });
    }
    let uav_term = uav.speed_mps * (m.theta_rad + uav.heading_rad).cos();
    let v_mps = (uav_term - m.mu_hz * C_MPS / (2.0 * carrier_hz)) / cos;
    Ok(PolarState {
        theta_rad: m.theta_rad,
        d_m,
        v_mps,
    })
}
