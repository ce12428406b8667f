//! Sensing-assisted beamforming for a UAV-mounted ISAC platform.
//!
//! A UAV carries a uniform linear array that serves ground objects while
//! sounding them with its own downlink echoes. Each frame opens with one
//! omnidirectional slot that (re)acquires every object in range; the
//! remaining slots transmit directional beams designed from the tracker's
//! one-step-ahead predictions, and every echo tightens those predictions
//! for the next slot. The crate provides the full closed loop:
//!
//! * [`world`] — exact polar kinematics of the UAV/object geometry, used as
//!   ground truth and as the oracle for the tracker's linearized model.
//! * [`phy`] — steering vectors, LoS channels, SINR/rate bookkeeping, and
//!   radar echo SNR for omni and directional transmission.
//! * [`sensing`] — deterministic-bound noise synthesis: per-slot angle,
//!   delay, and Doppler estimates drawn with variances that track the
//!   current echo SNR, plus the polar inversion used at first contact.
//! * [`tracker`] — an extended Kalman filter over (angle, range, radial
//!   speed) with the UAV's own motion folded into the evolution model.
//! * [`beamform`] — per-slot transmit covariance design: successive convex
//!   approximation over Hermitian PSD blocks with per-object rate floors
//!   and a flat coverage window sized by the tracker's angle uncertainty,
//!   then an iterative rank-minimization pass that collapses each block to
//!   (near) rank one so a single beam vector per object can be extracted.
//!   Water-filling/MRT and isotropic precoders serve as baselines.
//! * [`sim`] — frame scheduling, the proposed/pilot/water-filling schemes,
//!   common-random-number Monte-Carlo runs, and per-slot records.
//! * [`config`] — one flat parameter set with simulation-scale defaults.
//!
//! Angles are radians and SI units are used throughout; degrees appear
//! only at the presentation boundary (CSV export and the CLI).

pub mod beamform;
pub mod config;
pub mod phy;
pub mod sensing;
pub mod sim;
pub mod tracker;
pub mod world;

pub use config::SimConfig;
pub use phy::ArrayGeometry;
pub use sensing::{CrbParams, Measurement, NoiseVariances};
pub use sim::{McSummary, RunResult, Scheme, SimError, SlotRecord, SlotView};
pub use tracker::{NoiseModel, TrackState};
pub use world::{ObjectInit, ObjectTruth, PolarState, UavState, WorldError, WorldState};

/// Speed of light, m/s.
pub const C_MPS: f64 = 299_792_458.0;
