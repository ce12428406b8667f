//! Frame-structured closed-loop simulation.
//!
//! A run advances the true geometry slot by slot and plays one of three
//! transmission schemes against it:
//!
//! * `Proposed` — frame slot 1 transmits isotropically, measures every
//!   object, and (re)initializes or updates its track; slots 2..N design
//!   directional beams from one-step tracker predictions and fold each
//!   slot's echo back into the filter.
//! * `Pilot` — slot 1 is a pure pilot (no payload): it takes one omni fix
//!   per frame, beams are designed once from that fix and held for the
//!   rest of the frame, and no further echoes are processed.
//! * `WaterFilling` — same sensing loop as `Proposed`, but the beams are
//!   matched filters at the predicted bearings with water-filled powers
//!   instead of the conic design.
//!
//! Measurement noise is drawn from a generator keyed by
//! `(seed, frame, slot, object)` only, so all schemes see identical noise
//! on the slots where they measure, and any two runs with the same seed
//! are bit-identical. Rates and radar SNRs are always evaluated against
//! the true geometry, never the tracker's belief.

use crate::beamform::{self, BeamProblem, BeamSolution, BeamformError};
use crate::config::SimConfig;
use crate::phy::{self, ArrayGeometry, PhyError};
use crate::sensing::{self, CrbParams, SensingError};
use crate::tracker::{self, NoiseModel, TrackState, TrackerError};
use crate::world::{WorldError, WorldState};
use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Proposed,
    Pilot,
    WaterFilling,
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Pilot => "pilot",
            Scheme::WaterFilling => "waterfilling",
        }
    }

    pub fn all() -> [Scheme; 3] {
        [Scheme::Proposed, Scheme::Pilot, Scheme::WaterFilling]
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "pilot" => Ok(Scheme::Pilot),
            "waterfilling" => Ok(Scheme::WaterFilling),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// One object's view of one slot. Angles are radians; the CSV layer owns
/// the degree conversion. Measurement fields are NaN on slots where the
/// scheme takes no measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub run: u64,
    /// 1-based frame number.
    pub frame: usize,
    /// 1-based slot within the frame; slot 1 is the omni slot.
    pub slot: usize,
    pub scheme: Scheme,
    /// 0-based object index.
    pub object: usize,
    pub true_theta_rad: f64,
    pub true_d_m: f64,
    pub true_v_mps: f64,
    pub est_theta_rad: f64,
    pub est_d_m: f64,
    pub est_v_mps: f64,
    pub meas_theta_rad: f64,
    pub meas_tau_s: f64,
    pub meas_mu_hz: f64,
    /// Realized payload rate, b/s/Hz (0 on pure pilot slots).
    pub rate_bpshz: f64,
    pub radar_snr: f64,
    pub sca_iters: usize,
    pub irm_iters: usize,
    pub r_final: f64,
    pub status: &'static str,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Beamform(#[from] BeamformError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
    #[error(transparent)]
    Sensing(#[from] SensingError),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("run {seed}, frame {frame}, slot {slot}: {source}")]
    InRun {
        seed: u64,
        frame: usize,
        slot: usize,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    fn in_run(self, seed: u64, frame: usize, slot: usize) -> SimError {
        SimError::InRun {
            seed,
            frame,
            slot,
            source: Box::new(self),
        }
    }

    /// True when any nested cause is a solver failure or exhausted
    /// infeasibility ladder (the conditions that flip the CLI exit code).
    pub fn is_hard_solver_failure(&self) -> bool {
        match self {
            SimError::Beamform(BeamformError::Infeasible { .. })
            | SimError::Beamform(BeamformError::Solver(_)) => true,
            SimError::InRun { source, .. } => source.is_hard_solver_failure(),
            _ => false,
        }
    }
}

/// All records of one seed, in slot order.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub records: Vec<SlotRecord>,
}

/// SplitMix64-style avalanche; decorrelates neighboring keys.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Noise stream for one (run, frame, slot, object) cell; scheme-agnostic
/// so schemes share the same draws wherever they both measure.
fn slot_rng(seed: u64, frame: usize, slot: usize, object: usize) -> ChaCha8Rng {
    let mut h = mix(seed);
    h = mix(h ^ frame as u64);
    h = mix(h ^ slot as u64);
    h = mix(h ^ object as u64);
    ChaCha8Rng::seed_from_u64(h)
}

/// Per-object tracking state carried across slots.
struct Track {
    state: TrackState,
    /// Angle variance of the most recent measurement; floors the coverage
    /// window so it never collapses below the sensing resolution.
    last_meas_theta_var: f64,
}

/// Live internals surfaced once per slot by [`simulate_scheme_observed`]:
/// the transmit covariances on air (the omni slot reports its single
/// isotropic block) and each object's tracker MSE after the slot's update.
#[derive(Debug)]
pub struct SlotView<'a> {
    /// 1-based frame number.
    pub frame: usize,
    /// 1-based slot within the frame; slot 1 is the omni slot.
    pub slot: usize,
    pub covariances: &'a [phy::BeamMatrix],
    pub track_mse: &'a [Matrix3<f64>],
}

/// Runs one scheme over `n_frames` frames and returns every slot record.
pub fn simulate_scheme(
    cfg: &SimConfig,
    scheme: Scheme,
    seed: u64,
    n_frames: usize,
) -> Result<Vec<SlotRecord>, SimError> {
    simulate_scheme_observed(cfg, scheme, seed, n_frames, &mut |_| {})
}

/// [`simulate_scheme`] with a per-slot peek at the live design and filter
/// state.
pub fn simulate_scheme_observed(
    cfg: &SimConfig,
    scheme: Scheme,
    seed: u64,
    n_frames: usize,
    observe: &mut dyn FnMut(&SlotView),
) -> Result<Vec<SlotRecord>, SimError> {
    let geom = ArrayGeometry::from_config(cfg);
    let crb = CrbParams::from_config(cfg);
    let noise_model = NoiseModel::from_config(cfg);
    let beta_eps = Complex64::new(cfg.reflect_re, cfg.reflect_im);
    let k_n = cfg.objects.len();
    let n = cfg.frame_len;

    let mut world = WorldState::new(
        cfg.uav_height_m,
        cfg.uav_speed_mps,
        cfg.uav_heading_rad,
        &cfg.objects,
        cfg.slot_s,
    )?;
    let mut tracks: Vec<Option<Track>> = (0..k_n).map(|_| None).collect();
    let mut records = Vec::with_capacity(n_frames * n * k_n);
    // beams held across a frame by the pilot scheme
    let mut held: Option<BeamSolution> = None;
    let omni = phy::omni_covariance(cfg.p_total, &geom);

    for frame in 1..=n_frames {
        for slot in 1..=n {
            // truth advances first: slot s sees the geometry after s
            // slot-lengths of motion from the scenario start
            world = world.propagate();
            let step = |e: SimError| e.in_run(seed, frame, slot);

            let dir_cov;
            let on_air: &[phy::BeamMatrix] = if slot == 1 {
                run_omni_slot(
                    cfg, scheme, seed, frame, &world, &crb, &noise_model, beta_eps,
                    &mut tracks, &mut held, &mut records,
                )
                .map_err(step)?;
                std::slice::from_ref(&omni)
            } else {
                dir_cov = run_directional_slot(
                    cfg, scheme, seed, frame, slot, &world, &geom, &crb, &noise_model, beta_eps,
                    &mut tracks, &mut held, &mut records,
                )
                .map_err(step)?;
                &dir_cov
            };
            let mses: Vec<Matrix3<f64>> = tracks
                .iter()
                .map(|t| t.as_ref().expect("omni slot initializes all tracks").state.mse)
                .collect();
            observe(&SlotView {
                frame,
                slot,
                covariances: on_air,
                track_mse: &mses,
            });
        }
    }
    Ok(records)
}

#[allow(clippy::too_many_arguments)]
fn run_omni_slot(
    cfg: &SimConfig,
    scheme: Scheme,
    seed: u64,
    frame: usize,
    world: &WorldState,
    crb: &CrbParams,
    noise_model: &NoiseModel,
    beta_eps: Complex64,
    tracks: &mut [Option<Track>],
    held: &mut Option<BeamSolution>,
    records: &mut Vec<SlotRecord>,
) -> Result<(), SimError> {
    let k_n = world.objects.len();
    *held = None; // pilot re-fixes every frame
    if scheme == Scheme::Pilot {
        for t in tracks.iter_mut() {
            *t = None;
        }
    }
    for k in 0..k_n {
        let truth = world.true_polar(k);
        let beta = phy::reflection_coeff(truth.d_m, beta_eps)?;
        let snr = phy::radar_snr_omni(cfg.p_total, cfg.matched_gain, beta, cfg.radar_noise_var);
        let mut rng = slot_rng(seed, frame, 1, k);
        let meas = sensing::synthesize_measurement(
            &truth,
            &world.uav,
            snr,
            cfg.carrier_hz,
            crb,
            cfg.noise_scale,
            &mut rng,
        )?;

        let mut status = "omni";
        let next = match tracks[k].take() {
            None => TrackState::from_first_measurement(&meas, &world.uav, cfg.carrier_hz)?,
            Some(tr) => {
                let pred = tracker::ekf_predict(&tr.state, &world.uav, noise_model, cfg.slot_s)?;
                match tracker::ekf_update(&pred, &meas, &world.uav, cfg.carrier_hz) {
                    Ok(s) => s,
                    Err(TrackerError::Divergence { .. }) => {
                        // drop the stale covariance, restart from the echo
                        status = "reinit";
                        TrackState::from_first_measurement(&meas, &world.uav, cfg.carrier_hz)?
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        };
        let est = next.polar;
        tracks[k] = Some(Track {
            state: next,
            last_meas_theta_var: meas.var.theta_rad2,
        });

        let rate = if scheme == Scheme::Pilot {
            0.0 // pilot slot carries no payload
        } else {
            phy::rate(phy::omni_sinr(
                truth.d_m,
                k_n,
                cfg.alpha0,
                cfg.p_total,
                cfg.comm_noise_var,
            ))
        };
        records.push(SlotRecord {
            run: seed,
            frame,
            slot: 1,
            scheme,
            object: k,
            true_theta_rad: truth.theta_rad,
            true_d_m: truth.d_m,
            true_v_mps: truth.v_mps,
            est_theta_rad: est.theta_rad,
            est_d_m: est.d_m,
            est_v_mps: est.v_mps,
            meas_theta_rad: meas.theta_rad,
            meas_tau_s: meas.tau_s,
            meas_mu_hz: meas.mu_hz,
            rate_bpshz: rate,
            radar_snr: snr,
            sca_iters: 0,
            irm_iters: 0,
            r_final: 0.0,
            status,
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_directional_slot(
    cfg: &SimConfig,
    scheme: Scheme,
    seed: u64,
    frame: usize,
    slot: usize,
    world: &WorldState,
    geom: &ArrayGeometry,
    crb: &CrbParams,
    noise_model: &NoiseModel,
    beta_eps: Complex64,
    tracks: &mut [Option<Track>],
    held: &mut Option<BeamSolution>,
    records: &mut Vec<SlotRecord>,
) -> Result<Vec<phy::BeamMatrix>, SimError> {
    let k_n = world.objects.len();

    // design inputs: predictions for the tracking schemes, the held frame
    // fix for the pilot scheme
    let mut pointings = Vec::with_capacity(k_n);
    let mut ranges = Vec::with_capacity(k_n);
    let mut stds = Vec::with_capacity(k_n);
    let mut preds: Vec<Option<tracker::Prediction>> = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let tr = tracks[k].as_ref().expect("omni slot initializes all tracks");
        if scheme == Scheme::Pilot {
            pointings.push(tr.state.polar.theta_rad);
            ranges.push(tr.state.polar.d_m);
            stds.push(tr.last_meas_theta_var.sqrt());
            preds.push(None);
        } else {
            let pred = tracker::ekf_predict(&tr.state, &world.uav, noise_model, cfg.slot_s)?;
            pointings.push(pred.polar.theta_rad);
            ranges.push(pred.polar.d_m);
            stds.push(pred.mse[(0, 0)].max(0.0).sqrt().max(tr.last_meas_theta_var.sqrt()));
            preds.push(Some(pred));
        }
    }

    // beams for this slot
    let mut status: &'static str = "ok";
    let solution: BeamSolution = match scheme {
        Scheme::WaterFilling => {
            let problem = BeamProblem::from_config(cfg, pointings, ranges, stds);
            beamform::waterfill_mrt(&problem)?
        }
        Scheme::Pilot => {
            if let Some(h) = held.as_ref() {
                status = "hold";
                h.clone()
            } else {
                let problem = BeamProblem::from_config(cfg, pointings, ranges, stds);
                let sol = design_with_fallback(&problem, &mut status)?;
                *held = Some(sol.clone());
                sol
            }
        }
        Scheme::Proposed => {
            let problem = BeamProblem::from_config(cfg, pointings, ranges, stds);
            design_with_fallback(&problem, &mut status)?
        }
    };

    for k in 0..k_n {
        let truth = world.true_polar(k);
        let channel = phy::channel_vector(truth.theta_rad, truth.d_m, geom, cfg.alpha0)?;
        let rate = phy::rate(phy::directional_sinr(
            &channel,
            &solution.beams,
            k,
            cfg.comm_noise_var,
        ));
        let beta = phy::reflection_coeff(truth.d_m, beta_eps)?;
        let snr = phy::radar_snr_directional(
            truth.theta_rad,
            &solution.beams,
            geom,
            cfg.matched_gain,
            beta,
            cfg.radar_noise_var,
        );

        let (est, meas, obj_status) = if scheme == Scheme::Pilot {
            let tr = tracks[k].as_ref().unwrap();
            (tr.state.polar, None, status)
        } else {
            let mut rng = slot_rng(seed, frame, slot, k);
            let meas = sensing::synthesize_measurement(
                &truth,
                &world.uav,
                snr,
                cfg.carrier_hz,
                crb,
                cfg.noise_scale,
                &mut rng,
            )?;
            let pred = preds[k].as_ref().unwrap();
            let mut obj_status = status;
            let next = match tracker::ekf_update(pred, &meas, &world.uav, cfg.carrier_hz) {
                Ok(s) => s,
                Err(TrackerError::Divergence { .. }) => {
                    // skip the update, coast on the prediction
                    obj_status = "ekf_hold";
                    TrackState {
                        polar: pred.polar,
                        mse: pred.mse,
                    }
                }
                Err(e) => return Err(e.into()),
            };
            let est = next.polar;
            tracks[k] = Some(Track {
                state: next,
                last_meas_theta_var: meas.var.theta_rad2,
            });
            (est, Some(meas), obj_status)
        };

        let (m_theta, m_tau, m_mu) = match meas {
            Some(m) => (m.theta_rad, m.tau_s, m.mu_hz),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        records.push(SlotRecord {
            run: seed,
            frame,
            slot,
            scheme,
            object: k,
            true_theta_rad: truth.theta_rad,
            true_d_m: truth.d_m,
            true_v_mps: truth.v_mps,
            est_theta_rad: est.theta_rad,
            est_d_m: est.d_m,
            est_v_mps: est.v_mps,
            meas_theta_rad: m_theta,
            meas_tau_s: m_tau,
            meas_mu_hz: m_mu,
            rate_bpshz: rate,
            radar_snr: snr,
            sca_iters: solution.sca_iters,
            irm_iters: solution.irm_iters,
            r_final: solution.r_final,
            status: obj_status,
        });
    }
    Ok(solution.covariances)
}

/// Runs the conic design, accepting near-rank-one stalls (their best
/// iterate is still a valid transmit design) and naming relaxed slots.
fn design_with_fallback(
    problem: &BeamProblem,
    status: &mut &'static str,
) -> Result<BeamSolution, SimError> {
    match beamform::solve_beams(problem) {
        Ok(sol) => {
            *status = relax_label(sol.relax_stages);
            Ok(sol)
        }
        Err(BeamformError::NearRankOne { best, .. }) => {
            *status = "irm_rank_fail";
            Ok(*best)
        }
        Err(e) => Err(e.into()),
    }
}

fn relax_label(stages: usize) -> &'static str {
    match stages {
        0 => "ok",
        1 => "relaxed1",
        2 => "relaxed2",
        3 => "relaxed3",
        _ => "relaxed4",
    }
}

// ---------------------------------------------------------------------------
// Monte-Carlo harness

/// Mean/deviation/RMSE summaries per scheme per global slot.
#[derive(Debug, Clone)]
pub struct McSummary {
    pub schemes: Vec<Scheme>,
    pub n_runs: usize,
    pub frame_len: usize,
    pub n_slots: usize,
    /// `[scheme][global slot − 1]`: mean over runs of the slot's sum rate.
    pub mean_sum_rate: Vec<Vec<f64>>,
    /// Sample standard deviation of the same quantity.
    pub std_sum_rate: Vec<Vec<f64>>,
    /// RMSE over runs and objects of the post-slot estimates.
    pub rmse_theta_rad: Vec<Vec<f64>>,
    pub rmse_d_m: Vec<Vec<f64>>,
    pub rmse_v_mps: Vec<Vec<f64>>,
}

/// Runs `schemes × seeds` and keeps every record, seed-ordered. Honors
/// `ISAC_SIM_THREADS` (default: all cores) for seed-level parallelism;
/// outputs are identical regardless of thread count.
pub fn run_many(
    cfg: &SimConfig,
    schemes: &[Scheme],
    n_frames: usize,
    seeds: &[u64],
) -> Result<Vec<RunResult>, SimError> {
    run_many_with_threads(cfg, schemes, n_frames, seeds, thread_budget())
}

/// [`run_many`] with the worker count fixed by the caller.
pub fn run_many_with_threads(
    cfg: &SimConfig,
    schemes: &[Scheme],
    n_frames: usize,
    seeds: &[u64],
    threads: usize,
) -> Result<Vec<RunResult>, SimError> {
    let threads = threads.max(1).min(seeds.len().max(1));
    if threads <= 1 {
        return seeds
            .iter()
            .map(|&seed| run_one_seed(cfg, schemes, n_frames, seed))
            .collect();
    }
    let results: std::sync::Mutex<Vec<Option<Result<RunResult, SimError>>>> =
        std::sync::Mutex::new((0..seeds.len()).map(|_| None).collect());
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if idx >= seeds.len() {
                    break;
                }
                let out = run_one_seed(cfg, schemes, n_frames, seeds[idx]);
                results.lock().unwrap()[idx] = Some(out);
            });
        }
    });
    results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every seed index visited"))
        .collect()
}

fn run_one_seed(
    cfg: &SimConfig,
    schemes: &[Scheme],
    n_frames: usize,
    seed: u64,
) -> Result<RunResult, SimError> {
    let mut records = Vec::new();
    for &scheme in schemes {
        records.extend(simulate_scheme(cfg, scheme, seed, n_frames)?);
    }
    Ok(RunResult { seed, records })
}

fn thread_budget() -> usize {
    match std::env::var("ISAC_SIM_THREADS") {
        Ok(v) => v.trim().parse::<usize>().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

/// Collapses run records into per-slot means, deviations, and RMSEs.
pub fn summarize(runs: &[RunResult], schemes: &[Scheme], frame_len: usize) -> McSummary {
    let n_slots = runs
        .iter()
        .flat_map(|r| r.records.iter())
        .map(|rec| (rec.frame - 1) * frame_len + rec.slot)
        .max()
        .unwrap_or(0);
    let n_schemes = schemes.len();
    let mut mean = vec![vec![0.0; n_slots]; n_schemes];
    let mut m2 = vec![vec![0.0; n_slots]; n_schemes];
    let mut count = vec![vec![0usize; n_slots]; n_schemes];
    let mut se_theta = vec![vec![0.0; n_slots]; n_schemes];
    let mut se_d = vec![vec![0.0; n_slots]; n_schemes];
    let mut se_v = vec![vec![0.0; n_slots]; n_schemes];
    let mut se_count = vec![vec![0usize; n_slots]; n_schemes];

    for run in runs {
        // sum rates per (scheme, slot) within this run
        let mut sums = vec![vec![0.0; n_slots]; n_schemes];
        let mut touched = vec![vec![false; n_slots]; n_schemes];
        for rec in &run.records {
            let Some(si) = schemes.iter().position(|s| *s == rec.scheme) else {
                continue;
            };
            let g = (rec.frame - 1) * frame_len + rec.slot - 1;
            sums[si][g] += rec.rate_bpshz;
            touched[si][g] = true;
            se_theta[si][g] += (rec.est_theta_rad - rec.true_theta_rad).powi(2);
            se_d[si][g] += (rec.est_d_m - rec.true_d_m).powi(2);
            se_v[si][g] += (rec.est_v_mps - rec.true_v_mps).powi(2);
            se_count[si][g] += 1;
        }
        for si in 0..n_schemes {
            for g in 0..n_slots {
                if !touched[si][g] {
                    continue;
                }
                let x = sums[si][g];
                count[si][g] += 1;
                let n = count[si][g] as f64;
                let delta = x - mean[si][g];
                mean[si][g] += delta / n;
                m2[si][g] += delta * (x - mean[si][g]);
            }
        }
    }

    let std_sum_rate = m2
        .iter()
        .zip(&count)
        .map(|(row, cnts)| {
            row.iter()
                .zip(cnts)
                .map(|(v, &c)| if c > 1 { (v / (c as f64 - 1.0)).sqrt() } else { 0.0 })
                .collect()
        })
        .collect();
    let rmse = |se: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        se.into_iter()
            .zip(&se_count)
            .map(|(row, cnts)| {
                row.into_iter()
                    .zip(cnts)
                    .map(|(v, &c)| if c > 0 { (v / c as f64).sqrt() } else { f64::NAN })
                    .collect()
            })
            .collect()
    };
    McSummary {
        schemes: schemes.to_vec(),
        n_runs: runs.len(),
        frame_len,
        n_slots,
        mean_sum_rate: mean,
        std_sum_rate,
        rmse_theta_rad: rmse(se_theta),
        rmse_d_m: rmse(se_d),
        rmse_v_mps: rmse(se_v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.n_tx = 8;
        cfg.n_rx = 8;
        cfg.frame_len = 4;
        cfg
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let cfg = quick_cfg();
        let a = simulate_scheme(&cfg, Scheme::Proposed, 3, 1).unwrap();
        let b = simulate_scheme(&cfg, Scheme::Proposed, 3, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn schemes_share_measurement_noise() {
        let cfg = quick_cfg();
        let a = simulate_scheme(&cfg, Scheme::Proposed, 5, 1).unwrap();
        let b = simulate_scheme(&cfg, Scheme::WaterFilling, 5, 1).unwrap();
        // omni slot: identical truth, SNR, and draws → identical measurement
        for (ra, rb) in a.iter().zip(&b).filter(|(r, _)| r.slot == 1) {
            assert_eq!(ra.meas_theta_rad, rb.meas_theta_rad);
            assert_eq!(ra.meas_tau_s, rb.meas_tau_s);
            assert_eq!(ra.meas_mu_hz, rb.meas_mu_hz);
        }
    }

    #[test]
    fn record_layout_covers_all_slots_and_objects() {
        let cfg = quick_cfg();
        let recs = simulate_scheme(&cfg, Scheme::Proposed, 0, 2).unwrap();
        assert_eq!(recs.len(), 2 * cfg.frame_len * cfg.objects.len());
        // slot 1 of each frame is omni
        for r in &recs {
            if r.slot == 1 {
                assert!(r.status == "omni" || r.status == "reinit");
                assert_eq!(r.sca_iters, 0);
            } else {
                assert!(r.sca_iters > 0);
            }
        }
    }

    #[test]
    fn pilot_holds_beams_and_skips_measurements() {
        let cfg = quick_cfg();
        let recs = simulate_scheme(&cfg, Scheme::Pilot, 1, 1).unwrap();
        for r in &recs {
            if r.slot == 1 {
                assert_eq!(r.rate_bpshz, 0.0);
                assert!(r.meas_theta_rad.is_finite());
            } else {
                assert!(r.meas_theta_rad.is_nan());
                assert!(r.meas_tau_s.is_nan());
                // estimate frozen at the frame fix
                let fix = recs
                    .iter()
                    .find(|f| f.slot == 1 && f.object == r.object)
                    .unwrap();
                assert_eq!(r.est_theta_rad, fix.est_theta_rad);
            }
            if r.slot > 2 {
                assert_eq!(r.status, "hold");
            }
        }
    }

    #[test]
    fn zero_noise_tracks_truth_closely() {
        let mut cfg = quick_cfg();
        cfg.noise_scale = 0.0;
        let recs = simulate_scheme(&cfg, Scheme::Proposed, 0, 1).unwrap();
        let last = recs.iter().filter(|r| r.slot == cfg.frame_len).collect::<Vec<_>>();
        for r in last {
            assert!(
                (r.est_theta_rad - r.true_theta_rad).abs() < 1e-4,
                "θ err {} rad",
                (r.est_theta_rad - r.true_theta_rad).abs()
            );
            assert!((r.est_d_m - r.true_d_m).abs() < 0.5);
        }
    }

    #[test]
    fn proposed_beats_omni_rate_after_first_slot() {
        let cfg = quick_cfg();
        let recs = simulate_scheme(&cfg, Scheme::Proposed, 2, 1).unwrap();
        let omni_sum: f64 = recs
            .iter()
            .filter(|r| r.slot == 1)
            .map(|r| r.rate_bpshz)
            .sum();
        let dir_sum: f64 = recs
            .iter()
            .filter(|r| r.slot == 2)
            .map(|r| r.rate_bpshz)
            .sum();
        assert!(
            dir_sum > omni_sum,
            "directional {dir_sum} ≤ omni {omni_sum}"
        );
    }

    #[test]
    fn summary_shapes_match_runs() {
        let cfg = quick_cfg();
        let schemes = [Scheme::Proposed, Scheme::Pilot];
        let runs = run_many(&cfg, &schemes, 1, &[0, 1]).unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[0].seed, 0);
        let summary = summarize(&runs, &schemes, cfg.frame_len);
        assert_eq!(summary.n_runs, 2);
        assert_eq!(summary.n_slots, cfg.frame_len);
        assert_eq!(summary.mean_sum_rate.len(), 2);
        assert_eq!(summary.mean_sum_rate[0].len(), cfg.frame_len);
        // pilot's slot-1 rate is zero by construction
        assert_eq!(summary.mean_sum_rate[1][0], 0.0);
        assert!(summary.mean_sum_rate[0][0] > 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let cfg = quick_cfg();
        let schemes = [Scheme::WaterFilling];
        let a = run_many_with_threads(&cfg, &schemes, 1, &[0, 1, 2], 1).unwrap();
        let b = run_many_with_threads(&cfg, &schemes, 1, &[0, 1, 2], 3).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.records, rb.records);
        }
    }
}
