//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, keys use the short
//! symbol names the summary tables print (`N_t`, `dT`, `Gamma`, ...).
//! An empty file yields [`SimConfig::default`], so a config file only
//! states deviations from the standard operating point. Unknown keys,
//! malformed values, and parameter-invariant violations are all rejected
//! with the line they came from.

use isac_core::{ObjectInit, SimConfig};
use std::collections::HashMap;
use std::fmt;
use std::path::Path;

/// A configuration file could not be loaded.
#[derive(Debug)]
pub enum ConfigFileError {
    Io {
        path: String,
        source: std::io::Error,
    },
    /// Syntax or value error pinned to one line.
    Line { line: usize, message: String },
    /// Cross-field invariant violation; carries the line that set the
    /// offending key when the file did.
    Invalid {
        line: Option<usize>,
        message: String,
    },
}

impl fmt::Display for ConfigFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigFileError::Io { path, source } => write!(f, "config {path}: {source}"),
            ConfigFileError::Line { line, message } => write!(f, "line {line}: {message}"),
            ConfigFileError::Invalid {
                line: Some(line),
                message,
            } => write!(f, "line {line}: {message}"),
            ConfigFileError::Invalid {
                line: None,
                message,
            } => write!(f, "{message}"),
        }
    }
}

impl std::error::Error for ConfigFileError {}

/// Reads a config file, applies it over the defaults, and validates.
pub fn load_config(path: &Path) -> Result<SimConfig, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// [`load_config`] on in-memory text.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigFileError> {
    let mut cfg = SimConfig::default();
    // key -> line that set it, for duplicate detection and so validation
    // failures can point back into the file
    let mut set_at: HashMap<&'static str, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((lhs, rhs)) = content.split_once('=') else {
            return Err(ConfigFileError::Line {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = lhs.trim();
        let value = rhs.trim();
        let canonical = apply_key(&mut cfg, key, value, line)?;
        if let Some(prev) = set_at.insert(canonical, line) {
            return Err(ConfigFileError::Line {
                line,
                message: format!("duplicate key `{canonical}` (first set on line {prev})"),
            });
        }
    }

    cfg.validate().map_err(|e| {
        let message = e.to_string();
        // the invariant messages lead with the key name they fault
        let line = set_at
            .iter()
            .find(|(k, _)| message.starts_with(**k))
            .map(|(_, &l)| l);
        ConfigFileError::Invalid { line, message }
    })?;
    Ok(cfg)
}

fn bad_value(line: usize, key: &str, value: &str, expected: &str) -> ConfigFileError {
    ConfigFileError::Line {
        line,
        message: format!("`{key}` expects {expected}, got `{value}`"),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigFileError> {
    let x: f64 = value
        .parse()
        .map_err(|_| bad_value(line, key, value, "a number"))?;
    if !x.is_finite() {
        return Err(bad_value(line, key, value, "a finite number"));
    }
    Ok(x)
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, ConfigFileError> {
    value
        .parse()
        .map_err(|_| bad_value(line, key, value, "a non-negative integer"))
}

fn parse_objects(line: usize, value: &str) -> Result<Vec<ObjectInit>, ConfigFileError> {
    let expected = "`theta0_deg:speed:accel` triples separated by `;`";
    let mut objects = Vec::new();
    for part in value.split(';') {
        let fields: Vec<&str> = part.split(':').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad_value(line, "objects", part, expected));
        }
        let nums: Vec<f64> = fields
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad_value(line, "objects", part, expected))?;
        objects.push(ObjectInit {
            theta0_rad: nums[0].to_radians(),
            speed_mps: nums[1],
            accel_mps2: nums[2],
        });
    }
    Ok(objects)
}

/// Applies one assignment; returns the canonical key name.
fn apply_key(
    cfg: &mut SimConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<&'static str, ConfigFileError> {
    macro_rules! num {
        () => {
            parse_f64(line, key, value)?
        };
    }
    macro_rules! int {
        () => {
            parse_usize(line, key, value)?
        };
    }
    let canonical: &'static str = match key {
        "N_t" => {
            cfg.n_tx = int!();
            "N_t"
        }
        "N_r" => {
            cfg.n_rx = int!();
            "N_r"
        }
        "f_c" => {
            cfg.carrier_hz = num!();
            "f_c"
        }
        "delta_d_wl" => {
            cfg.spacing_wavelengths = num!();
            "delta_d_wl"
        }
        "kappa" => {
            cfg.kappa_hz = num!();
            "kappa"
        }
        "iota" => {
            cfg.iota_s = num!();
            "iota"
        }
        "G_m" => {
            cfg.matched_gain = num!();
            "G_m"
        }
        "alpha0" => {
            cfg.alpha0 = num!();
            "alpha0"
        }
        "sigma_C2" => {
            cfg.comm_noise_var = num!();
            "sigma_C2"
        }
        "sigma2" => {
            cfg.radar_noise_var = num!();
            "sigma2"
        }
        "epsilon_re" => {
            cfg.reflect_re = num!();
            "epsilon_re"
        }
        "epsilon_im" => {
            cfg.reflect_im = num!();
            "epsilon_im"
        }
        "dT" => {
            cfg.slot_s = num!();
            "dT"
        }
        "sigma1_deg" => {
            cfg.evo_sigma_theta_rad = num!().to_radians();
            "sigma1_deg"
        }
        "sigma2_m" => {
            cfg.evo_sigma_d_m = num!();
            "sigma2_m"
        }
        "sigma3_mps" => {
            cfg.evo_sigma_v_mps = num!();
            "sigma3_mps"
        }
        "P_T" => {
            cfg.p_total = num!();
            "P_T"
        }
        "Gamma" => {
            cfg.rate_floor = num!();
            "Gamma"
        }
        "B" => {
            cfg.coverage_slack = num!();
            "B"
        }
        "l" => {
            cfg.coverage_mult = num!();
            "l"
        }
        "resolution_deg" => {
            cfg.resolution_rad = num!().to_radians();
            "resolution_deg"
        }
        "frame_len" => {
            cfg.frame_len = int!();
            "frame_len"
        }
        "sca_tol" => {
            cfg.sca_rel_tol = num!();
            "sca_tol"
        }
        "sca_max_iters" => {
            cfg.sca_max_iters = int!();
            "sca_max_iters"
        }
        "irm_max_iters" => {
            cfg.irm_max_iters = int!();
            "irm_max_iters"
        }
        "irm_w0" => {
            cfg.irm_weight0 = num!();
            "irm_w0"
        }
        "irm_rho" => {
            cfg.irm_weight_growth = num!();
            "irm_rho"
        }
        "irm_tol_frac" => {
            cfg.irm_residual_frac = num!();
            "irm_tol_frac"
        }
        "theta_cap_deg" => {
            let cap = num!();
            // squaring would erase the sign, so gate it here
            if cap <= 0.0 {
                return Err(ConfigFileError::Line {
                    line,
                    message: format!("theta_cap_deg must be positive, got {cap}"),
                });
            }
            cfg.angle_var_ceiling_rad2 = cap.to_radians().powi(2);
            "theta_cap_deg"
        }
        "h" => {
            cfg.uav_height_m = num!();
            "h"
        }
        "v_u" => {
            cfg.uav_speed_mps = num!();
            "v_u"
        }
        "theta_u_deg" => {
            cfg.uav_heading_rad = num!().to_radians();
            "theta_u_deg"
        }
        "objects" => {
            cfg.objects = parse_objects(line, value)?;
            "objects"
        }
        "noise_scale" => {
            cfg.noise_scale = num!();
            "noise_scale"
        }
        "seed" => {
            cfg.seed = value.parse().map_err(|_| {
                bad_value(line, key, value, "an unsigned 64-bit integer")
            })?;
            "seed"
        }
        other => {
            return Err(ConfigFileError::Line {
                line,
                message: format!("unknown key `{other}`"),
            });
        }
    };
    Ok(canonical)
}
