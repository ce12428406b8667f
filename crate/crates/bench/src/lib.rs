//! Fixtures for the hot-path benchmarks: configurations, design problems,
//! and tracker states sized like the simulation defaults, built
//! deterministically so successive `cargo bench` runs measure the same
//! work.

use isac_core::beamform::BeamProblem;
use isac_core::tracker::TrackState;
use isac_core::world::{PolarState, UavState};
use isac_core::{Measurement, NoiseVariances, SimConfig};
use nalgebra::{Matrix3, Vector3};

/// Default-scale configuration with both array sizes overridden.
pub fn config(n_t: usize) -> SimConfig {
    let mut cfg = SimConfig::default();
    cfg.n_tx = n_t;
    cfg.n_rx = n_t;
    cfg
}

/// Two objects a comfortable 45° apart with sub-degree pointing
/// uncertainty — the steady-state shape of a mid-frame design call.
pub fn two_object_problem(n_t: usize, std_rad: f64) -> BeamProblem {
    BeamProblem::from_config(
        &config(n_t),
        vec![65f64.to_radians(), 110f64.to_radians()],
        vec![110.0, 145.0],
        vec![std_rad; 2],
    )
}

pub fn uav() -> UavState {
    UavState {
        x_m: 0.0,
        alt_m: 100.0,
        speed_mps: 15.0,
        heading_rad: std::f64::consts::PI,
    }
}

/// A mid-track state: quarter-degree bearing spread, metre-scale range
/// spread.
pub fn track() -> TrackState {
    TrackState {
        polar: PolarState {
            theta_rad: 1.15,
            d_m: 118.0,
            v_mps: 24.0,
        },
        mse: Matrix3::from_diagonal(&Vector3::new(2e-5, 1.5, 4.0)),
    }
}

/// An echo fix a hair off the track above, at directional-slot accuracy.
pub fn measurement() -> Measurement {
    Measurement {
        theta_rad: 1.1503,
        tau_s: 2.0 * 118.3 / isac_core::C_MPS,
        mu_hz: -3.2e3,
        var: NoiseVariances {
            theta_rad2: 1e-6,
            tau_s2: 1e-17,
            mu_hz2: 1e2,
            ceiling_applied: false,
        },
    }
}
