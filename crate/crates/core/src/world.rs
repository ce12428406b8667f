//! Ground-truth kinematics.
//!
//! The geometry is a vertical plane containing the array axis: the UAV
//! flies at altitude with velocity `(v_u cos θ_u, v_u sin θ_u)` (x along
//! the array, z up), each ground object moves along x with constant
//! acceleration, and the polar view of object `k` is
//!
//! ```text
//! d = sqrt(gap² + alt²),   θ = atan2(alt, gap),   gap = x_obj − x_uav
//! ```
//!
//! so `θ ∈ (0, π)` sweeps from ahead of the array (small θ) to behind it.
//! With this convention the range rate is exactly
//! `ḋ = v cos θ − v_u cos(θ + θ_u)`, which is the form the Doppler model
//! and the tracker's evolution model linearize. Truth is propagated in
//! closed form each slot and never through the linearized model, so it
//! doubles as the oracle for the tracker's approximation error.

use thiserror::Error;

/// UAV pose and (constant) velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    /// Position along the array axis, m.
    pub x_m: f64,
    /// Altitude above the object plane, m.
    pub alt_m: f64,
    /// Speed, m/s.
    pub speed_mps: f64,
    /// Flight direction relative to the array axis, rad.
    pub heading_rad: f64,
}

/// One ground object moving along the array axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectTruth {
    /// Position along the array axis, m.
    pub x_m: f64,
    /// Signed speed along +x, m/s.
    pub speed_mps: f64,
    /// Signed acceleration along +x, m/s².
    pub accel_mps2: f64,
}

/// Initial object state given in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectInit {
    /// Initial bearing from the array axis, rad; strictly inside (0, π).
    pub theta0_rad: f64,
    /// Initial speed along +x, m/s.
    pub speed_mps: f64,
    /// Acceleration along +x, m/s².
    pub accel_mps2: f64,
}

/// Polar view of one object as the array sees it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarState {
    /// Bearing from the array axis, rad.
    pub theta_rad: f64,
    /// Slant range, m.
    pub d_m: f64,
    /// Object ground speed along +x, m/s.
    pub v_mps: f64,
}

/// Complete scene at one slot boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub uav: UavState,
    pub objects: Vec<ObjectTruth>,
    /// Slot length, s.
    pub slot_s: f64,
    /// Slots elapsed since the scenario start.
    pub elapsed_slots: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("initial angle {theta0_rad} rad is outside (0, pi)")]
    BadInitialAngle { theta0_rad: f64 },
    #[error("UAV altitude {alt_m} m must be positive")]
    BadAltitude { alt_m: f64 },
}

impl WorldState {
    /// Builds the scene at slot 0 with the UAV at the origin of the axis.
    pub fn new(
        alt_m: f64,
        uav_speed_mps: f64,
        uav_heading_rad: f64,
        inits: &[ObjectInit],
        slot_s: f64,
    ) -> Result<Self, WorldError> {
        if !(alt_m > 0.0) {
            return Err(WorldError::BadAltitude { alt_m });
        }
        let uav = UavState {
            x_m: 0.0,
            alt_m,
            speed_mps: uav_speed_mps,
            heading_rad: uav_heading_rad,
        };
        let objects = inits
            .iter()
            .map(|init| {
                if !(init.theta0_rad > 0.0 && init.theta0_rad < std::f64::consts::PI) {
                    return Err(WorldError::BadInitialAngle {
                        theta0_rad: init.theta0_rad,
                    });
                }
                // gap = alt / tan θ0 is signed: behind the array for θ0 > π/2
                Ok(ObjectTruth {
                    x_m: alt_m / init.theta0_rad.tan(),
                    speed_mps: init.speed_mps,
                    accel_mps2: init.accel_mps2,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(WorldState {
            uav,
            objects,
            slot_s,
            elapsed_slots: 0,
        })
    }

    /// Advances every body by one slot of exact constant-acceleration motion.
    pub fn propagate(&self) -> WorldState {
        let dt = self.slot_s;
        let uav = UavState {
            x_m: self.uav.x_m + self.uav.speed_mps * self.uav.heading_rad.cos() * dt,
            alt_m: self.uav.alt_m + self.uav.speed_mps * self.uav.heading_rad.sin() * dt,
            ..self.uav
        };
        let objects = self
            .objects
            .iter()
            .map(|o| ObjectTruth {
                x_m: o.x_m + o.speed_mps * dt + 0.5 * o.accel_mps2 * dt * dt,
                speed_mps: o.speed_mps + o.accel_mps2 * dt,
                accel_mps2: o.accel_mps2,
            })
            .collect();
        WorldState {
            uav,
            objects,
            slot_s: self.slot_s,
            elapsed_slots: self.elapsed_slots + 1,
        }
    }

    /// Exact polar view of object `k`.
    pub fn true_polar(&self, k: usize) -> PolarState {
        let o = &self.objects[k];
        let gap = o.x_m - self.uav.x_m;
        PolarState {
            theta_rad: self.uav.alt_m.atan2(gap),
            d_m: gap.hypot(self.uav.alt_m),
            v_mps: o.speed_mps,
        }
    }

    /// Exact range rate of object `k`, m/s; positive means receding.
    pub fn true_range_rate(&self, k: usize) -> f64 {
        let p = self.true_polar(k);
        p.v_mps * p.theta_rad.cos()
            - self.uav.speed_mps * (p.theta_rad + self.uav.heading_rad).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn world_single(theta0_deg: f64, alt: f64) -> WorldState {
        WorldState::new(
            alt,
            15.0,
            std::f64::consts::PI,
            &[ObjectInit {
                theta0_rad: theta0_deg.to_radians(),
                speed_mps: 30.0,
                accel_mps2: -5.0,
            }],
            0.01,
        )
        .unwrap()
    }

    #[test]
    fn initial_polar_matches_closed_form() {
        let w = world_single(75.0, 100.0);
        let p = w.true_polar(0);
        // d = h / sin θ0, gap = h / tan θ0
        assert!((p.d_m - 100.0 / 75.0_f64.to_radians().sin()).abs() < 1e-9);
        assert!((p.d_m - 103.527_618).abs() < 1e-6);
        assert!((w.objects[0].x_m - 26.794_919_24).abs() < 1e-6);
        assert!((p.theta_rad - 75.0_f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn behind_array_angle_is_obtuse() {
        let w = world_single(135.0, 100.0);
        assert!(w.objects[0].x_m < 0.0);
        let p = w.true_polar(0);
        assert!((p.theta_rad - 135.0_f64.to_radians()).abs() < 1e-12);
        assert!((p.d_m - 100.0 * 2.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn one_slot_of_decelerated_motion() {
        let w = world_single(75.0, 100.0);
        let next = w.propagate();
        let dx = next.objects[0].x_m - w.objects[0].x_m;
        assert!((dx - 0.29975).abs() < 1e-12); // 30·0.01 − ½·5·0.01²
        assert!((next.objects[0].speed_mps - 29.95).abs() < 1e-12);
        // θ_u = π: the UAV retreats along −x and holds altitude
        assert!((next.uav.x_m - (-0.15)).abs() < 1e-12);
        assert!((next.uav.alt_m - 100.0).abs() < 1e-12);
        assert_eq!(next.elapsed_slots, 1);
    }

    #[test]
    fn range_rate_matches_finite_difference() {
        let w = world_single(75.0, 100.0);
        let fine = WorldState {
            slot_s: 1e-7,
            ..w.clone()
        };
        let d0 = fine.true_polar(0).d_m;
        let d1 = fine.propagate().true_polar(0).d_m;
        // central effects of acceleration over 1e-7 s are far below tolerance
        assert!(((d1 - d0) / 1e-7 - w.true_range_rate(0)).abs() < 1e-5);
    }

    #[test]
    fn zenith_initial_angle_sits_at_zero_gap() {
        let w = world_single(90.0, 100.0);
        assert!(w.objects[0].x_m.abs() < 1e-10);
        assert!((w.true_polar(0).d_m - 100.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_scenarios_rejected() {
        assert!(matches!(
            WorldState::new(
                100.0,
                15.0,
                0.0,
                &[ObjectInit {
                    theta0_rad: 0.0,
                    speed_mps: 0.0,
                    accel_mps2: 0.0
                }],
                0.01
            ),
            Err(WorldError::BadInitialAngle { .. })
        ));
        assert!(matches!(
            WorldState::new(0.0, 15.0, 0.0, &[], 0.01),
            Err(WorldError::BadAltitude { .. })
        ));
    }

    proptest! {
        #[test]
        fn polar_round_trip(theta0_deg in 1.0..179.0f64, alt in 20.0..500.0f64) {
            let w = WorldState::new(
                alt,
                0.0,
                0.0,
                &[ObjectInit { theta0_rad: theta0_deg.to_radians(), speed_mps: 0.0, accel_mps2: 0.0 }],
                0.01,
            ).unwrap();
            let p = w.true_polar(0);
            prop_assert!((p.theta_rad - theta0_deg.to_radians()).abs() < 1e-12);
            prop_assert!((p.d_m - alt / theta0_deg.to_radians().sin()).abs() < 1e-9);
        }

        #[test]
        fn range_never_below_altitude(theta0_deg in 1.0..179.0f64, slots in 0u32..200) {
            let mut w = world_single(theta0_deg, 100.0);
            for _ in 0..slots {
                w = w.propagate();
            }
            prop_assert!(w.true_polar(0).d_m >= w.uav.alt_m - 1e-9);
        }

        #[test]
        fn statics_stay_put(slots in 0u32..100) {
            let mut w = WorldState::new(
                80.0,
                0.0,
                0.0,
                &[ObjectInit { theta0_rad: 1.0, speed_mps: 0.0, accel_mps2: 0.0 }],
                0.01,
            ).unwrap();
            let p0 = w.true_polar(0);
            for _ in 0..slots {
                w = w.propagate();
            }
            let p1 = w.true_polar(0);
            prop_assert!((p0.theta_rad - p1.theta_rad).abs() < 1e-15);
            prop_assert!((p0.d_m - p1.d_m).abs() < 1e-15);
        }
    }
}
