//! Simulation parameters.
//!
//! Everything the simulator needs lives in one flat [`SimConfig`]: array
//! geometry, waveform constants, noise variances, beam-design knobs, and
//! the scenario (UAV motion plus initial object states). The defaults
//! reproduce the standard operating point — a 30-element half-wavelength
//! array at 30 GHz, 10 ms slots, 10-slot frames — and every field can be
//! overridden independently, so tests and sweeps only state what they
//! change.

use crate::world::ObjectInit;
use thiserror::Error;

/// Full parameter set for one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Transmit array elements.
    pub n_tx: usize,
    /// Receive array elements (enters estimation variances only).
    pub n_rx: usize,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Element spacing as a fraction of the carrier wavelength.
    pub spacing_wavelengths: f64,
    /// RMS signal bandwidth entering the delay variance, Hz.
    pub kappa_hz: f64,
    /// RMS accumulation time entering the Doppler variance, s.
    pub iota_s: f64,
    /// Matched-filter processing gain.
    pub matched_gain: f64,
    /// Reference channel gain at 1 m.
    pub alpha0: f64,
    /// Downlink receiver noise variance.
    pub comm_noise_var: f64,
    /// Radar receiver noise variance.
    pub radar_noise_var: f64,
    /// Complex reflectivity at 1 m, real and imaginary parts.
    pub reflect_re: f64,
    pub reflect_im: f64,
    /// Slot length, s.
    pub slot_s: f64,
    /// Evolution-model angle noise std, rad.
    pub evo_sigma_theta_rad: f64,
    /// Evolution-model range noise std, m.
    pub evo_sigma_d_m: f64,
    /// Evolution-model speed noise std, m/s.
    pub evo_sigma_v_mps: f64,
    /// Total transmit power budget.
    pub p_total: f64,
    /// Per-object rate floor, b/s/Hz.
    pub rate_floor: f64,
    /// Coverage flatness slack as a fraction of total beam power.
    pub coverage_slack: f64,
    /// Coverage half-width in angle standard deviations.
    pub coverage_mult: f64,
    /// Coverage grid step, rad.
    pub resolution_rad: f64,
    /// Slots per frame; slot 1 of each frame is omnidirectional.
    pub frame_len: usize,
    /// SCA stop: relative objective change below this.
    pub sca_rel_tol: f64,
    /// SCA stop: iteration cap.
    pub sca_max_iters: usize,
    /// Rank-minimization iteration cap.
    pub irm_max_iters: usize,
    /// Rank-minimization initial penalty weight.
    pub irm_weight0: f64,
    /// Rank-minimization penalty growth factor per iteration.
    pub irm_weight_growth: f64,
    /// Rank-residual target as a fraction of the per-element power `P_T/N_t`.
    pub irm_residual_frac: f64,
    /// Ceiling on the synthesized angle variance, rad^2 (guards `cos θ → 0`).
    pub angle_var_ceiling_rad2: f64,
    /// UAV altitude, m.
    pub uav_height_m: f64,
    /// UAV ground speed, m/s.
    pub uav_speed_mps: f64,
    /// UAV heading relative to the array axis, rad.
    pub uav_heading_rad: f64,
    /// Initial object states.
    pub objects: Vec<ObjectInit>,
    /// Scales every synthesized measurement deviation; 0 gives noiseless runs.
    pub noise_scale: f64,
    /// Base RNG seed; per-measurement streams are derived from it.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_tx: 30,
            n_rx: 30,
            carrier_hz: 30e9,
            spacing_wavelengths: 0.5,
            kappa_hz: 80e6,
            iota_s: 1e-5,
            matched_gain: 10.0,
            alpha0: 1.0,
            comm_noise_var: 1.0,
            radar_noise_var: 1.0,
            reflect_re: 120.0,
            reflect_im: 120.0,
            slot_s: 0.01,
            evo_sigma_theta_rad: 0.02_f64.to_radians(),
            evo_sigma_d_m: 0.2,
            evo_sigma_v_mps: 0.5,
            p_total: 1000.0,
            rate_floor: 0.5,
            coverage_slack: 0.05,
            coverage_mult: 3.0,
            resolution_rad: 0.1_f64.to_radians(),
            frame_len: 10,
            sca_rel_tol: 1e-4,
            sca_max_iters: 15,
            irm_max_iters: 20,
            irm_weight0: 1.0,
            irm_weight_growth: 2.0,
            irm_residual_frac: 1e-6,
            angle_var_ceiling_rad2: 1.0_f64.to_radians().powi(2),
            uav_height_m: 100.0,
            uav_speed_mps: 15.0,
            uav_heading_rad: std::f64::consts::PI,
            objects: vec![
                ObjectInit {
                    theta0_rad: 75.0_f64.to_radians(),
                    speed_mps: 30.0,
                    accel_mps2: -5.0,
                },
                ObjectInit {
                    theta0_rad: 135.0_f64.to_radians(),
                    speed_mps: -3.0,
                    accel_mps2: 1.0,
                },
            ],
            noise_scale: 1.0,
            seed: 0,
        }
    }
}

/// A parameter failed validation.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("{name} must be at least {min}, got {value}")]
    TooSmall {
        name: &'static str,
        min: usize,
        value: usize,
    },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("at least one object is required")]
    NoObjects,
    #[error("object {index}: initial angle must lie strictly inside (0, pi), got {theta0_rad} rad")]
    BadInitialAngle { index: usize, theta0_rad: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
}

impl SimConfig {
    /// Carrier wavelength, m.
    pub fn wavelength_m(&self) -> f64 {
        crate::C_MPS / self.carrier_hz
    }

    /// Element spacing, m.
    pub fn spacing_m(&self) -> f64 {
        self.spacing_wavelengths * self.wavelength_m()
    }

    /// Rejects parameter combinations the model cannot represent.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn pos(name: &'static str, value: f64) -> Result<(), ConfigError> {
            if !value.is_finite() {
                return Err(ConfigError::NotFinite { name, value });
            }
            if value <= 0.0 {
                return Err(ConfigError::NotPositive { name, value });
            }
            Ok(())
        }
        fn nonneg(name: &'static str, value: f64) -> Result<(), ConfigError> {
            if !value.is_finite() {
                return Err(ConfigError::NotFinite { name, value });
            }
            if value < 0.0 {
                return Err(ConfigError::Negative { name, value });
            }
            Ok(())
        }
        if self.n_tx < 2 {
            return Err(ConfigError::TooSmall {
                name: "N_t",
                min: 2,
                value: self.n_tx,
            });
        }
        if self.n_rx < 1 {
            return Err(ConfigError::TooSmall {
                name: "N_r",
                min: 1,
                value: self.n_rx,
            });
        }
        if self.frame_len < 2 {
            return Err(ConfigError::TooSmall {
                name: "frame_len",
                min: 2,
                value: self.frame_len,
            });
        }
        if self.sca_max_iters < 1 {
            return Err(ConfigError::TooSmall {
                name: "sca_max_iters",
                min: 1,
                value: self.sca_max_iters,
            });
        }
        if self.irm_max_iters < 1 {
            return Err(ConfigError::TooSmall {
                name: "irm_max_iters",
                min: 1,
                value: self.irm_max_iters,
            });
        }
        pos("f_c", self.carrier_hz)?;
        pos("delta_d_wl", self.spacing_wavelengths)?;
        pos("kappa", self.kappa_hz)?;
        pos("iota", self.iota_s)?;
        pos("G_m", self.matched_gain)?;
        pos("alpha0", self.alpha0)?;
        pos("sigma_C2", self.comm_noise_var)?;
        pos("sigma2", self.radar_noise_var)?;
        pos("dT", self.slot_s)?;
        pos("P_T", self.p_total)?;
        pos("B", self.coverage_slack)?;
        pos("resolution_deg", self.resolution_rad)?;
        pos("sca_tol", self.sca_rel_tol)?;
        pos("irm_w0", self.irm_weight0)?;
        pos("irm_rho", self.irm_weight_growth)?;
        pos("irm_tol_frac", self.irm_residual_frac)?;
        pos("theta_cap_deg", self.angle_var_ceiling_rad2)?;
        pos("h", self.uav_height_m)?;
        nonneg("Gamma", self.rate_floor)?;
        nonneg("l", self.coverage_mult)?;
        nonneg("sigma1_deg", self.evo_sigma_theta_rad)?;
        nonneg("sigma2_m", self.evo_sigma_d_m)?;
        nonneg("sigma3_mps", self.evo_sigma_v_mps)?;
        nonneg("noise_scale", self.noise_scale)?;
        if !self.uav_speed_mps.is_finite() {
            return Err(ConfigError::NotFinite {
                name: "v_u",
                value: self.uav_speed_mps,
            });
        }
        if !self.uav_heading_rad.is_finite() {
            return Err(ConfigError::NotFinite {
                name: "theta_u_deg",
                value: self.uav_heading_rad,
            });
        }
        if self.objects.is_empty() {
            return Err(ConfigError::NoObjects);
        }
        for (index, o) in self.objects.iter().enumerate() {
            if !(o.theta0_rad > 0.0 && o.theta0_rad < std::f64::consts::PI) {
                return Err(ConfigError::BadInitialAngle {
                    index,
                    theta0_rad: o.theta0_rad,
                });
            }
            if !o.speed_mps.is_finite() || !o.accel_mps2.is_finite() {
                return Err(ConfigError::NotFinite {
                    name: "object speed/accel",
                    value: if o.speed_mps.is_finite() {
                        o.accel_mps2
                    } else {
                        o.speed_mps
                    },
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn default_wavelength_is_one_centimeter() {
        let cfg = SimConfig::default();
        assert!((cfg.wavelength_m() - 0.009993081933333).abs() < 1e-12);
        assert!((cfg.spacing_m() - cfg.wavelength_m() / 2.0).abs() < 1e-18);
    }

    #[test]
    fn negative_slot_rejected() {
        let cfg = SimConfig {
            slot_s: -1.0,
            ..SimConfig::default()
        };
        assert_eq!(
            cfg.validate(),
            Err(ConfigError::NotPositive {
                name: "dT",
                value: -1.0
            })
        );
    }

    #[test]
    fn endfire_initial_angle_rejected() {
        let mut cfg = SimConfig::default();
        cfg.objects[0].theta0_rad = 0.0;
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::BadInitialAngle { index: 0, .. })
        ));
    }

    #[test]
    fn single_antenna_rejected() {
        let cfg = SimConfig {
            n_tx: 1,
            ..SimConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::TooSmall { .. })));
    }
}
