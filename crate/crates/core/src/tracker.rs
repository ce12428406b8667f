//! Extended Kalman filter over (bearing, range, ground speed).
//!
//! The evolution model advances one slot of relative motion using the
//! UAV's own displacement components
//!
//! ```text
//! I  = v_u sin θ_u · ΔT          (vertical)
//! II = v ΔT − v_u cos θ_u · ΔT   (along the axis, relative)
//! d' = d + I sin θ + II cos θ
//! θ' = θ − (II sin θ − I cos θ) / d'
//! v' = v
//! ```
//!
//! which is the first-order expansion of the exact polar kinematics; the
//! range update is exact to O(1/d) and the bearing update divides the
//! transverse displacement by the *updated* range. Jacobians are the exact
//! derivatives of this map — not of the underlying geometry — so
//! finite-difference checks against [`evolve`] close to machine precision.
//! The measurement map is shared with [`crate::sensing`], keeping the
//! filter consistent with the synthesizer by construction.
//!
//! Updates use the Joseph covariance form plus explicit symmetrization, so
//! the tracked MSE stays symmetric PSD; a divergence guard refuses updates
//! whose innovation covariance is numerically singular.

use crate::sensing::{self, Measurement, SensingError};
use crate::world::{PolarState, UavState};
use crate::C_MPS;
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Evolution noise covariance (diagonal), fixed for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Diagonal of `Q_s` in (rad², m², (m/s)²).
    pub q_evolution: Vector3<f64>,
}

impl NoiseModel {
    pub fn from_config(cfg: &crate::SimConfig) -> Self {
        NoiseModel {
            q_evolution: Vector3::new(
                cfg.evo_sigma_theta_rad * cfg.evo_sigma_theta_rad,
                cfg.evo_sigma_d_m * cfg.evo_sigma_d_m,
                cfg.evo_sigma_v_mps * cfg.evo_sigma_v_mps,
            ),
        }
    }
}

/// Filter state for one object.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub polar: PolarState,
    /// MSE matrix over (θ, d, v); symmetric PSD.
    pub mse: Matrix3<f64>,
}

/// One-step prediction, kept separate so beam design can run on it before
/// the slot's measurement exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub polar: PolarState,
    pub mse: Matrix3<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrackerError {
    #[error("evolution collapses the range: d' = {d_m} m")]
    DegenerateGeometry { d_m: f64 },
    #[error("innovation covariance condition number {cond:.3e} exceeds 1e14")]
    Divergence { cond: f64 },
    #[error(transparent)]
    Sensing(#[from] SensingError),
}

/// Advances one filter state by one slot; does not touch uncertainty.
pub fn evolve(polar: &PolarState, uav: &UavState, dt: f64) -> Result<PolarState, TrackerError> {
    let (i, ii) = displacements(polar, uav, dt);
    let (s, c) = polar.theta_rad.sin_cos();
    let d_next = polar.d_m + i * s + ii * c;
    if d_next <= 0.0 {
        return Err(TrackerError::DegenerateGeometry { d_m: d_next });
    }
    Ok(PolarState {
        theta_rad: polar.theta_rad - (ii * s - i * c) / d_next,
        d_m: d_next,
        v_mps: polar.v_mps,
    })
}

fn displacements(polar: &PolarState, uav: &UavState, dt: f64) -> (f64, f64) {
    let i = uav.speed_mps * uav.heading_rad.sin() * dt;
    let ii = polar.v_mps * dt - uav.speed_mps * uav.heading_rad.cos() * dt;
    (i, ii)
}

/// Exact Jacobian of [`evolve`] with respect to (θ, d, v).
pub fn jacobian_g(
    polar: &PolarState,
    uav: &UavState,
    dt: f64,
) -> Result<Matrix3<f64>, TrackerError> {
    let (i, ii) = displacements(polar, uav, dt);
    let (s, c) = polar.theta_rad.sin_cos();
    let den = polar.d_m + i * s + ii * c;
    if den <= 0.0 {
        return Err(TrackerError::DegenerateGeometry { d_m: den });
    }
    let num = ii * s - i * c; // transverse displacement
    // ∂num/∂θ = II c + I s, ∂den/∂θ = I c − II s, ∂II/∂v = dt
    let dnum_dtheta = ii * c + i * s;
    let dden_dtheta = i * c - ii * s;
    let dtheta_dtheta = 1.0 - (dnum_dtheta * den - num * dden_dtheta) / (den * den);
    let dtheta_dd = num / (den * den);
    let dtheta_dv = -(s * den - num * c) * dt / (den * den);
    Ok(Matrix3::new(
        dtheta_dtheta,
        dtheta_dd,
        dtheta_dv,
        dden_dtheta,
        1.0,
        dt * c,
        0.0,
        0.0,
        1.0,
    ))
}

/// Jacobian of the measurement map (θ, 2d/c, Doppler) wrt (θ, d, v).
pub fn jacobian_h(polar: &PolarState, uav: &UavState, carrier_hz: f64) -> Matrix3<f64> {
    let two_fc_over_c = 2.0 * carrier_hz / C_MPS;
    let (s, c) = polar.theta_rad.sin_cos();
    let dmu_dtheta =
        -two_fc_over_c * (-polar.v_mps * s + uav.speed_mps * (polar.theta_rad + uav.heading_rad).sin());
    Matrix3::new(
        1.0,
        0.0,
        0.0,
        0.0,
        2.0 / C_MPS,
        0.0,
        dmu_dtheta,
        0.0,
        -two_fc_over_c * c,
    )
}

/// Prediction half of the filter step.
pub fn ekf_predict(
    track: &TrackState,
    uav: &UavState,
    noise: &NoiseModel,
    dt: f64,
) -> Result<Prediction, TrackerError> {
    let polar = evolve(&track.polar, uav, dt)?;
    let g = jacobian_g(&track.polar, uav, dt)?;
    let mut mse = g * track.mse * g.transpose() + Matrix3::from_diagonal(&noise.q_evolution);
    symmetrize(&mut mse);
    Ok(Prediction { polar, mse })
}

/// Update half of the filter step; wraps the angle innovation to (−π, π].
pub fn ekf_update(
    pred: &Prediction,
    meas: &Measurement,
    uav: &UavState,
    carrier_hz: f64,
) -> Result<TrackState, TrackerError> {
    let h = jacobian_h(&pred.polar, uav, carrier_hz);
    let q_m = Matrix3::from_diagonal(&Vector3::new(
        meas.var.theta_rad2,
        meas.var.tau_s2,
        meas.var.mu_hz2,
    ));
    let mut s_mat = h * pred.mse * h.transpose() + q_m;
    symmetrize(&mut s_mat);
    // conditioning is judged on the Jacobi-scaled matrix: the raw diagonal
    // mixes rad², s², and Hz² scales, which alone spans ~20 decades
    let diag = s_mat.diagonal();
    if diag.min() <= 0.0 {
        return Err(TrackerError::Divergence { cond: f64::INFINITY });
    }
    let inv_scale = Matrix3::from_diagonal(&diag.map(|x| 1.0 / x.sqrt()));
    let s_scaled = inv_scale * s_mat * inv_scale;
    let eig = s_scaled.symmetric_eigenvalues();
    let (emin, emax) = (
        eig.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs())),
        eig.iter().fold(0.0f64, |a, &b| a.max(b.abs())),
    );
    let cond = if emin > 0.0 { emax / emin } else { f64::INFINITY };
    if cond > 1e14 {
        return Err(TrackerError::Divergence { cond });
    }
    let (i_theta, i_tau, i_mu) = sensing::ideal_measurement(&pred.polar, uav, carrier_hz);
    let mut innov = Vector3::new(
        wrap_angle(meas.theta_rad - i_theta),
        meas.tau_s - i_tau,
        meas.mu_hz - i_mu,
    );
    // gain K = P H^T S^{-1} through the scaled solve S̃ Y = D⁻¹ H P
    let y = s_scaled
        .lu()
        .solve(&(inv_scale * h * pred.mse))
        .ok_or(TrackerError::Divergence { cond })?;
    let k = (inv_scale * y).transpose();
    innov = k * innov;
    let polar = PolarState {
        theta_rad: pred.polar.theta_rad + innov[0],
        d_m: pred.polar.d_m + innov[1],
        v_mps: pred.polar.v_mps + innov[2],
    };
    // Joseph form keeps the MSE PSD under roundoff
    let ikh = Matrix3::identity() - k * h;
    let mut mse = ikh * pred.mse * ikh.transpose() + k * q_m * k.transpose();
    symmetrize(&mut mse);
    Ok(TrackState { polar, mse })
}

/// One full predict + update cycle.
pub fn ekf_step(
    track: &TrackState,
    meas: &Measurement,
    uav: &UavState,
    noise: &NoiseModel,
    dt: f64,
    carrier_hz: f64,
) -> Result<TrackState, TrackerError> {
    let pred = ekf_predict(track, uav, noise, dt)?;
    ekf_update(&pred, meas, uav, carrier_hz)
}

/// Open-loop prediction over several slots (no measurements).
pub fn predict_k_steps(
    track: &TrackState,
    uav: &UavState,
    noise: &NoiseModel,
    dt: f64,
    steps: usize,
) -> Result<TrackState, TrackerError> {
    let mut out = track.clone();
    for _ in 0..steps {
        let p = ekf_predict(&out, uav, noise, dt)?;
        out = TrackState {
            polar: p.polar,
            mse: p.mse,
        };
    }
    Ok(out)
}

impl TrackState {
    /// Opens a track from a first fix; the initial MSE is ten times the
    /// measurement variances mapped through the polar inversion.
    pub fn from_first_measurement(
        meas: &Measurement,
        uav: &UavState,
        carrier_hz: f64,
    ) -> Result<Self, TrackerError> {
        let polar = sensing::initial_state_from_measurement(meas, uav, carrier_hz)?;
        let cos = polar.theta_rad.cos();
        let d_scale = C_MPS / 2.0;
        let v_scale = C_MPS / (2.0 * carrier_hz * cos);
        let mse = Matrix3::from_diagonal(&Vector3::new(
            meas.var.theta_rad2,
            d_scale * d_scale * meas.var.tau_s2,
            v_scale * v_scale * meas.var.mu_hz2,
        )) * 10.0;
        Ok(TrackState { polar, mse })
    }
}

fn symmetrize(m: &mut Matrix3<f64>) {
    *m = (*m + m.transpose()) * 0.5;
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{crb_variances, CrbParams, NoiseVariances};
    use proptest::prelude::*;

    const FC: f64 = 30e9;

    fn uav_retreating() -> UavState {
        UavState {
            x_m: 0.0,
            alt_m: 100.0,
            speed_mps: 15.0,
            heading_rad: std::f64::consts::PI,
        }
    }

    fn crb() -> CrbParams {
        CrbParams {
            n_tx: 30,
            n_rx: 30,
            kappa_hz: 80e6,
            iota_s: 1e-5,
            wavelength_m: 0.01,
            angle_var_ceiling_rad2: 1.0_f64.to_radians().powi(2),
        }
    }

    fn quiet() -> NoiseModel {
        NoiseModel {
            q_evolution: Vector3::zeros(),
        }
    }

    fn exact_measurement(polar: &PolarState, uav: &UavState, var: NoiseVariances) -> Measurement {
        let (theta, tau, mu) = sensing::ideal_measurement(polar, uav, FC);
        Measurement {
            theta_rad: theta,
            tau_s: tau,
            mu_hz: mu,
            var,
        }
    }

    #[test]
    fn one_evolution_step_closed_form() {
        let polar = PolarState {
            theta_rad: 75.0_f64.to_radians(),
            d_m: 100.0 / 75.0_f64.to_radians().sin(),
            v_mps: 30.0,
        };
        let next = evolve(&polar, &uav_retreating(), 0.01).unwrap();
        // I = 0 (level flight), II = (30+15)·0.01
        let ii = 0.45;
        let d_want = polar.d_m + ii * polar.theta_rad.cos();
        let theta_want = polar.theta_rad - ii * polar.theta_rad.sin() / d_want;
        assert!((next.d_m - d_want).abs() < 1e-9);
        assert!((next.theta_rad - theta_want).abs() < 1e-12);
        assert!((next.v_mps - 30.0).abs() < 1e-15);
    }

    #[test]
    fn evolution_rejects_range_collapse() {
        let polar = PolarState {
            theta_rad: 0.1,
            d_m: 0.2,
            v_mps: -30.0,
        };
        assert!(matches!(
            evolve(&polar, &uav_retreating(), 1.0),
            Err(TrackerError::DegenerateGeometry { .. })
        ));
    }

    fn fd_jacobian(polar: &PolarState, uav: &UavState, dt: f64) -> Matrix3<f64> {
        let f = |p: &PolarState| {
            let n = evolve(p, uav, dt).unwrap();
            Vector3::new(n.theta_rad, n.d_m, n.v_mps)
        };
        let mut j = Matrix3::zeros();
        let base = [polar.theta_rad, polar.d_m, polar.v_mps];
        for col in 0..3 {
            let eps = 1e-6 * base[col].abs().max(1.0);
            let mut lo = *polar;
            let mut hi = *polar;
            match col {
                0 => {
                    lo.theta_rad -= eps;
                    hi.theta_rad += eps;
                }
                1 => {
                    lo.d_m -= eps;
                    hi.d_m += eps;
                }
                _ => {
                    lo.v_mps -= eps;
                    hi.v_mps += eps;
                }
            }
            let diff = (f(&hi) - f(&lo)) / (2.0 * eps);
            j.set_column(col, &diff);
        }
        j
    }

    #[test]
    fn evolution_jacobian_matches_central_differences() {
        let uav = uav_retreating();
        for (theta_deg, d, v) in [(75.0, 103.5, 30.0), (135.0, 141.4, -3.0), (40.0, 80.0, 10.0)] {
            let polar = PolarState {
                theta_rad: (theta_deg as f64).to_radians(),
                d_m: d,
                v_mps: v,
            };
            let g = jacobian_g(&polar, &uav, 0.01).unwrap();
            let fd = fd_jacobian(&polar, &uav, 0.01);
            for r in 0..3 {
                for c in 0..3 {
                    let scale = fd[(r, c)].abs().max(1e-9);
                    assert!(
                        (g[(r, c)] - fd[(r, c)]).abs() / scale < 1e-5,
                        "entry ({r},{c}): exact {} vs fd {}",
                        g[(r, c)],
                        fd[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn measurement_jacobian_delay_slope() {
        let polar = PolarState {
            theta_rad: 1.0,
            d_m: 120.0,
            v_mps: 20.0,
        };
        let h = jacobian_h(&polar, &uav_retreating(), FC);
        assert!((h[(1, 1)] - 6.671_281_903_963_040_8e-9).abs() < 1e-20); // 2/c
        assert!((h[(2, 2)] + 2.0 * FC / crate::C_MPS * polar.theta_rad.cos()).abs() < 1e-9);
        assert!(h[(0, 0)] == 1.0 && h[(0, 1)] == 0.0 && h[(2, 1)] == 0.0);
    }

    #[test]
    fn huge_measurement_noise_leaves_prediction() {
        let track = TrackState {
            polar: PolarState {
                theta_rad: 1.2,
                d_m: 110.0,
                v_mps: 25.0,
            },
            mse: Matrix3::from_diagonal(&Vector3::new(1e-6, 1.0, 1.0)),
        };
        let uav = uav_retreating();
        let pred = ekf_predict(&track, &uav, &quiet(), 0.01).unwrap();
        // measurement far off, but variances enormous → gain ≈ 0
        let var = NoiseVariances {
            theta_rad2: 1e6,
            tau_s2: 1e6,
            mu_hz2: 1e12,
            ceiling_applied: false,
        };
        let mut meas = exact_measurement(&pred.polar, &uav, var);
        meas.theta_rad += 0.5;
        meas.tau_s += 1e-7;
        meas.mu_hz += 500.0;
        let upd = ekf_update(&pred, &meas, &uav, FC).unwrap();
        assert!((upd.polar.theta_rad - pred.polar.theta_rad).abs() < 1e-5);
        assert!((upd.polar.d_m - pred.polar.d_m).abs() < 1e-3);
    }

    #[test]
    fn vanishing_measurement_noise_pins_estimate_to_fix() {
        let truth = PolarState {
            theta_rad: 1.2,
            d_m: 110.0,
            v_mps: 25.0,
        };
        let uav = uav_retreating();
        let track = TrackState {
            polar: PolarState {
                theta_rad: 1.25,
                d_m: 108.0,
                v_mps: 20.0,
            },
            mse: Matrix3::from_diagonal(&Vector3::new(1e-2, 25.0, 25.0)),
        };
        let pred = ekf_predict(&track, &uav, &quiet(), 0.01).unwrap();
        let var = NoiseVariances {
            theta_rad2: 1e-20,
            tau_s2: 1e-20,
            mu_hz2: 1e-20,
            ceiling_applied: false,
        };
        let truth_next = evolve(&truth, &uav, 0.01).unwrap();
        let meas = exact_measurement(&truth_next, &uav, var);
        let upd = ekf_update(&pred, &meas, &uav, FC).unwrap();
        // bearing and range are measured (nearly) directly: one update pins
        // them; speed enters through the Doppler linearized at a bearing
        // 0.05 rad off, so it only contracts toward the truth
        assert!((upd.polar.theta_rad - truth_next.theta_rad).abs() < 1e-8);
        assert!((upd.polar.d_m - truth_next.d_m).abs() < 1e-3);
        let v_err_pred = (pred.polar.v_mps - truth_next.v_mps).abs();
        let v_err_upd = (upd.polar.v_mps - truth_next.v_mps).abs();
        assert!(v_err_upd < 1.0, "speed error {v_err_upd} m/s");
        assert!(v_err_upd < 0.5 * v_err_pred);
    }

    #[test]
    fn zero_noise_loop_converges_to_machine_precision() {
        // truth follows evolve exactly; exact measurements with floor
        // variances; the default process noise keeps the gain alive so each
        // update re-pins the state and the Doppler linearization error
        // shrinks quadratically
        let uav = uav_retreating();
        let var = NoiseVariances {
            theta_rad2: 1e-20,
            tau_s2: 1e-26,
            mu_hz2: 1e-14,
            ceiling_applied: false,
        };
        let noise = NoiseModel::from_config(&crate::SimConfig::default());
        let mut truth = PolarState {
            theta_rad: 1.1,
            d_m: 120.0,
            v_mps: 28.0,
        };
        let mut track = TrackState {
            polar: PolarState {
                theta_rad: 1.15,
                d_m: 115.0,
                v_mps: 20.0,
            },
            mse: Matrix3::from_diagonal(&Vector3::new(1e-2, 25.0, 25.0)),
        };
        for _ in 0..5 {
            truth = evolve(&truth, &uav, 0.01).unwrap();
            let meas = exact_measurement(&truth, &uav, var);
            track = ekf_step(&track, &meas, &uav, &noise, 0.01, FC).unwrap();
        }
        assert!((track.polar.theta_rad - truth.theta_rad).abs() < 1e-6);
        assert!((track.polar.d_m - truth.d_m).abs() < 1e-6);
        assert!((track.polar.v_mps - truth.v_mps).abs() < 1e-6);
    }

    #[test]
    fn singular_innovation_covariance_trips_guard() {
        // rank-1 predicted MSE and zero measurement noise make S singular
        let u = Vector3::new(1e-3, 1.0, 0.5);
        let pred = Prediction {
            polar: PolarState {
                theta_rad: 1.1,
                d_m: 120.0,
                v_mps: 28.0,
            },
            mse: u * u.transpose(),
        };
        let uav = uav_retreating();
        let var = NoiseVariances {
            theta_rad2: 0.0,
            tau_s2: 0.0,
            mu_hz2: 0.0,
            ceiling_applied: false,
        };
        let meas = exact_measurement(&pred.polar, &uav, var);
        match ekf_update(&pred, &meas, &uav, FC) {
            Err(TrackerError::Divergence { cond }) => assert!(cond > 1e14),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn angle_innovation_wraps() {
        let pred = Prediction {
            polar: PolarState {
                theta_rad: 0.05,
                d_m: 100.0,
                v_mps: 0.0,
            },
            mse: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0)),
        };
        let uav = UavState {
            x_m: 0.0,
            alt_m: 100.0,
            speed_mps: 0.0,
            heading_rad: 0.0,
        };
        let var = NoiseVariances {
            theta_rad2: 1e-6,
            tau_s2: 1e-18,
            mu_hz2: 1.0,
            ceiling_applied: false,
        };
        let mut meas = exact_measurement(&pred.polar, &uav, var);
        meas.theta_rad += 2.0 * std::f64::consts::PI - 0.01; // ≡ −0.01
        let upd = ekf_update(&pred, &meas, &uav, FC).unwrap();
        assert!(
            upd.polar.theta_rad < pred.polar.theta_rad,
            "wrapped innovation must pull the angle down, got {}",
            upd.polar.theta_rad
        );
        assert!(upd.polar.theta_rad > -0.1);
    }

    #[test]
    fn open_loop_covariance_grows() {
        let noise = NoiseModel {
            q_evolution: Vector3::new(1e-7, 0.04, 0.25),
        };
        let track = TrackState {
            polar: PolarState {
                theta_rad: 1.3,
                d_m: 103.5,
                v_mps: 30.0,
            },
            mse: Matrix3::from_diagonal(&Vector3::new(1e-6, 0.01, 1.0)),
        };
        let uav = uav_retreating();
        let two = predict_k_steps(&track, &uav, &noise, 0.01, 2).unwrap();
        // G ≈ I at these scales: trace grows by at least tr(2 Q_s)
        let growth = two.mse.trace() - track.mse.trace();
        assert!(growth >= 2.0 * noise.q_evolution.sum() * 0.999);
        let ten = predict_k_steps(&track, &uav, &noise, 0.01, 10).unwrap();
        assert!(ten.mse.trace() > two.mse.trace());
    }

    #[test]
    fn first_fix_opens_inflated_track() {
        let polar = PolarState {
            theta_rad: 1.3,
            d_m: 103.5,
            v_mps: 30.0,
        };
        let uav = uav_retreating();
        let var = crb_variances(2.88, polar.theta_rad, polar.d_m, &crb()).unwrap();
        let meas = exact_measurement(&polar, &uav, var);
        let track = TrackState::from_first_measurement(&meas, &uav, FC).unwrap();
        assert!((track.polar.d_m - polar.d_m).abs() < 1e-9);
        assert!((track.mse[(0, 0)] - 10.0 * var.theta_rad2).abs() < 1e-12 * track.mse[(0, 0)]);
        let d_var = (crate::C_MPS / 2.0).powi(2) * var.tau_s2 * 10.0;
        assert!((track.mse[(1, 1)] - d_var).abs() < 1e-12 * d_var);
        let v_var =
            (crate::C_MPS / (2.0 * FC * polar.theta_rad.cos())).powi(2) * var.mu_hz2 * 10.0;
        assert!((track.mse[(2, 2)] - v_var).abs() < 1e-12 * v_var);
    }

    proptest! {
        #[test]
        fn mse_stays_symmetric_psd(
            theta_deg in 20.0..160.0f64,
            d in 60.0..300.0f64,
            v in -40.0..40.0f64,
            steps in 1usize..12,
        ) {
            let uav = uav_retreating();
            let noise = NoiseModel { q_evolution: Vector3::new(1e-7, 0.04, 0.25) };
            let mut truth = PolarState { theta_rad: theta_deg.to_radians(), d_m: d, v_mps: v };
            let var = crb_variances(2.88, truth.theta_rad, truth.d_m, &crb()).unwrap();
            let mut track = TrackState {
                polar: truth,
                mse: Matrix3::from_diagonal(&Vector3::new(1e-4, 4.0, 9.0)),
            };
            for _ in 0..steps {
                truth = evolve(&truth, &uav, 0.01).unwrap();
                let meas = exact_measurement(&truth, &uav, var);
                track = ekf_step(&track, &meas, &uav, &noise, 0.01, FC).unwrap();
                let asym = (track.mse - track.mse.transpose()).norm();
                prop_assert!(asym < 1e-12 * track.mse.norm().max(1e-30));
                let min_eig = track.mse.symmetric_eigenvalues().min();
                prop_assert!(min_eig > -1e-12 * track.mse.trace().abs().max(1e-30));
            }
        }

        #[test]
        fn jacobian_fd_random_states(
            theta_deg in 10.0..170.0f64,
            d in 40.0..400.0f64,
            v in -50.0..50.0f64,
            vu in 0.0..25.0f64,
            heading_deg in 0.0..360.0f64,
        ) {
            let polar = PolarState { theta_rad: theta_deg.to_radians(), d_m: d, v_mps: v };
            let uav = UavState { x_m: 0.0, alt_m: 100.0, speed_mps: vu, heading_rad: heading_deg.to_radians() };
            let g = jacobian_g(&polar, &uav, 0.01).unwrap();
            let fd = fd_jacobian(&polar, &uav, 0.01);
            for r in 0..3 {
                for c in 0..3 {
                    let scale = fd[(r, c)].abs().max(1e-6);
                    prop_assert!((g[(r, c)] - fd[(r, c)]).abs() / scale < 1e-4);
                }
            }
        }
    }
}
