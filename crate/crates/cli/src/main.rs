//! `isac-sim`: run the sensing-assisted beamforming simulator from the
//! command line.
//!
//! Subcommands cover the full experiment surface: single runs
//! (`simulate`), scheme comparisons under common random numbers
//! (`compare`), parameter sweeps (`sweep`), the open-loop check of the
//! linearized state evolution (`validate-approx`), transmit beampattern
//! cuts (`beampattern`), and the estimation-variance table (`crb-table`).
//! Every command writes CSV with full-precision floats so outputs diff
//! cleanly; identical seeds give byte-identical files.
//!
//! Exit status: 0 on success, 1 when a run aborted on a hard solver
//! failure, 2 for usage/config errors.

mod configfile;
mod export;

use clap::{Args, Parser, Subcommand};
use configfile::load_config;
use export::{ApproxRow, CrbRow, PatternRow, SweepRow};
use isac_core::phy::{ArrayGeometry, BeamMatrix};
use isac_core::sensing::{crb_variances, CrbParams};
use isac_core::{sim, tracker, ObjectInit, Scheme, SimConfig, WorldState};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "isac-sim", version, about = "UAV ISAC beamforming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file overriding the default parameters (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for the CSV files
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme for a fixed seed and export every slot record
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// RNG seed; defaults to the config's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Number of slots to simulate (the final frame may be partial)
        #[arg(long, default_value = "10")]
        slots: usize,
        /// Scheme to run: proposed, pilot, or waterfilling
        #[arg(long, default_value = "proposed")]
        scheme: Scheme,
    },
    /// Run several schemes over many seeds and export per-slot summaries
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated scheme list
        #[arg(long, value_delimiter = ',', default_value = "proposed,pilot,waterfilling")]
        schemes: Vec<Scheme>,
        /// Number of Monte-Carlo runs (seeds are consecutive from --seed)
        #[arg(long, default_value = "10")]
        runs: usize,
        /// Frames per run
        #[arg(long, default_value = "1")]
        frames: usize,
        /// First seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-run the comparison across values of one parameter
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Parameter to vary: h (altitude, m), resolution (deg), or N_t
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated parameter values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Comma-separated scheme list
        #[arg(long, value_delimiter = ',', default_value = "proposed,waterfilling")]
        schemes: Vec<Scheme>,
        /// Monte-Carlo runs per value
        #[arg(long, default_value = "5")]
        runs: usize,
        /// Frames per run
        #[arg(long, default_value = "1")]
        frames: usize,
        /// First seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare exact kinematics with the linearized one-slot evolution
    ValidateApprox {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Export transmit beampattern cuts at chosen global slots
    Beampattern {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated 1-based global slot numbers
        #[arg(long, value_delimiter = ',', default_value = "1,2,5")]
        slots: Vec<usize>,
        /// RNG seed; defaults to the config's seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the estimation-variance table over a (d, theta, SNR) lattice
    CrbTable {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SweepParam {
    /// UAV altitude, m.
    H,
    /// Coverage grid resolution, degrees.
    Resolution,
    /// Transmit (and matching receive) array size.
    NT,
}

impl SweepParam {
    fn label(self) -> &'static str {
        match self {
            SweepParam::H => "h",
            SweepParam::Resolution => "resolution",
            SweepParam::NT => "N_t",
        }
    }

    fn apply(self, cfg: &mut SimConfig, value: f64) -> Result<(), CliError> {
        match self {
            SweepParam::H => cfg.uav_height_m = value,
            SweepParam::Resolution => cfg.resolution_rad = value.to_radians(),
            SweepParam::NT => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(CliError::Usage(format!(
                        "N_t values must be integers >= 2, got {value}"
                    )));
                }
                // keep the array square so sensing and beamforming scale together
                cfg.n_tx = value as usize;
                cfg.n_rx = value as usize;
            }
        }
        Ok(())
    }
}

enum CliError {
    Config(configfile::ConfigFileError),
    Sim(isac_core::SimError),
    Io(std::io::Error),
    Usage(String),
}

impl From<configfile::ConfigFileError> for CliError {
    fn from(e: configfile::ConfigFileError) -> Self {
        CliError::Config(e)
    }
}
impl From<isac_core::SimError> for CliError {
    fn from(e: isac_core::SimError) -> Self {
        CliError::Sim(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
impl From<isac_core::WorldError> for CliError {
    fn from(e: isac_core::WorldError) -> Self {
        CliError::Sim(isac_core::SimError::from(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Sim(e)) => {
            eprintln!("error: {e}");
            if e.is_hard_solver_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &CommonArgs) -> Result<SimConfig, CliError> {
    match &common.config {
        Some(path) => Ok(load_config(path)?),
        None => Ok(SimConfig::default()),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate {
            common,
            seed,
            slots,
            scheme,
        } => simulate(&common, seed, slots, scheme),
        Command::Compare {
            common,
            schemes,
            runs,
            frames,
            seed,
        } => compare(&common, &schemes, runs, frames, seed),
        Command::Sweep {
            common,
            param,
            values,
            schemes,
            runs,
            frames,
            seed,
        } => sweep(&common, param, &values, &schemes, runs, frames, seed),
        Command::ValidateApprox { common } => validate_approx(&common),
        Command::Beampattern {
            common,
            slots,
            seed,
        } => beampattern(&common, &slots, seed),
        Command::CrbTable { common } => crb_table(&common),
    }
}

fn global_slot(frame_len: usize, frame: usize, slot: usize) -> usize {
    (frame - 1) * frame_len + slot
}

fn simulate(
    common: &CommonArgs,
    seed: Option<u64>,
    slots: usize,
    scheme: Scheme,
) -> Result<(), CliError> {
    if slots == 0 {
        return Err(CliError::Usage("--slots must be at least 1".into()));
    }
    let cfg = load(common)?;
    let seed = seed.unwrap_or(cfg.seed);
    let frames = slots.div_ceil(cfg.frame_len);
    let mut records = sim::simulate_scheme(&cfg, scheme, seed, frames)?;
    records.retain(|r| global_slot(cfg.frame_len, r.frame, r.slot) <= slots);
    export::write_slots(&common.out.join("slots.csv"), &records)?;
    Ok(())
}

fn compare(
    common: &CommonArgs,
    schemes: &[Scheme],
    runs: usize,
    frames: usize,
    seed: Option<u64>,
) -> Result<(), CliError> {
    if runs == 0 || frames == 0 {
        return Err(CliError::Usage("--runs and --frames must be at least 1".into()));
    }
    let cfg = load(common)?;
    let base = seed.unwrap_or(cfg.seed);
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base.wrapping_add(i)).collect();
    let results = sim::run_many(&cfg, schemes, frames, &seeds)?;
    let summary = sim::summarize(&results, schemes, cfg.frame_len);
    export::write_comparison(&common.out.join("comparison.csv"), &summary)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    common: &CommonArgs,
    param: SweepParam,
    values: &[f64],
    schemes: &[Scheme],
    runs: usize,
    frames: usize,
    seed: Option<u64>,
) -> Result<(), CliError> {
    if runs == 0 || frames == 0 {
        return Err(CliError::Usage("--runs and --frames must be at least 1".into()));
    }
    let base_cfg = load(common)?;
    let base = seed.unwrap_or(base_cfg.seed);
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base.wrapping_add(i)).collect();
    let mut rows = Vec::with_capacity(values.len() * schemes.len());
    for &value in values {
        let mut cfg = base_cfg.clone();
        param.apply(&mut cfg, value)?;
        cfg.validate()
            .map_err(|e| CliError::Usage(format!("--values {value}: {e}")))?;
        let results = sim::run_many(&cfg, schemes, frames, &seeds)?;
        let summary = sim::summarize(&results, schemes, cfg.frame_len);
        for (si, scheme) in schemes.iter().enumerate() {
            let n = summary.n_slots as f64;
            let mean_rate = summary.mean_sum_rate[si].iter().sum::<f64>() / n;
            let tracked: Vec<f64> = summary.rmse_d_m[si]
                .iter()
                .copied()
                .filter(|v| v.is_finite())
                .collect();
            let mean_rmse = tracked.iter().sum::<f64>() / tracked.len().max(1) as f64;
            rows.push(SweepRow {
                param: param.label(),
                value,
                scheme: scheme.label(),
                mean_rate_bpshz: mean_rate,
                mean_rmse_d_m: mean_rmse,
            });
        }
    }
    export::write_sweep(&common.out.join("sweep.csv"), &rows)?;
    Ok(())
}

/// Open-loop check of the linearized evolution: both trajectories start
/// from the same state; the exact one advances by true kinematics, the
/// approximate one by the tracker's one-slot evolution model.
fn validate_approx(common: &CommonArgs) -> Result<(), CliError> {
    const N_SLOTS: usize = 40;
    let init = ObjectInit {
        theta0_rad: 45.0_f64.to_radians(),
        speed_mps: 30.0,
        accel_mps2: 0.0,
    };
    let mut world = WorldState::new(60.0, 15.0, std::f64::consts::PI, &[init], 0.05)?;
    let mut approx = world.true_polar(0);

    let mut rows = Vec::with_capacity(N_SLOTS);
    for slot in 1..=N_SLOTS {
        approx = tracker::evolve(&approx, &world.uav, world.slot_s)
            .map_err(isac_core::SimError::from)?;
        world = world.propagate();
        let exact = world.true_polar(0);
        rows.push(ApproxRow {
            slot,
            theta_exact_rad: exact.theta_rad,
            theta_approx_rad: approx.theta_rad,
            d_exact_m: exact.d_m,
            d_approx_m: approx.d_m,
        });
    }
    export::write_approx(&common.out.join("approx.csv"), &rows)?;
    Ok(())
}

fn beampattern(common: &CommonArgs, slots: &[usize], seed: Option<u64>) -> Result<(), CliError> {
    if slots.is_empty() || slots.contains(&0) {
        return Err(CliError::Usage(
            "--slots takes 1-based global slot numbers".into(),
        ));
    }
    let cfg = load(common)?;
    let seed = seed.unwrap_or(cfg.seed);
    let last = *slots.iter().max().unwrap();
    let frames = last.div_ceil(cfg.frame_len);

    // capture the per-object covariance blocks at the requested slots
    let mut captured: BTreeMap<usize, Vec<BeamMatrix>> = BTreeMap::new();
    let frame_len = cfg.frame_len;
    sim::simulate_scheme_observed(&cfg, Scheme::Proposed, seed, frames, &mut |view| {
        let g = global_slot(frame_len, view.frame, view.slot);
        if slots.contains(&g) {
            captured.insert(g, view.covariances.to_vec());
        }
    })?;

    let geom = ArrayGeometry::from_config(&cfg);
    let mut rows = Vec::new();
    for (&slot, blocks) in &captured {
        // 0.1-degree cut across the full forward half-plane
        for i in 0..=1800usize {
            let theta_rad = (i as f64 * 0.1).to_radians();
            let gain: f64 = blocks.iter().map(|w| w.gain(theta_rad, &geom)).sum();
            rows.push(PatternRow {
                slot,
                theta_rad,
                gain,
            });
        }
    }
    export::write_beampattern(&common.out.join("beampattern.csv"), &rows)?;
    Ok(())
}

fn crb_table(common: &CommonArgs) -> Result<(), CliError> {
    let cfg = load(common)?;
    let params = CrbParams::from_config(&cfg);
    let snrs: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
    let thetas_deg: [f64; 9] = [30.0, 45.0, 60.0, 75.0, 85.0, 90.0, 95.0, 120.0, 150.0];
    let ranges_m: [f64; 4] = [50.0, 100.0, 150.0, 200.0];

    let mut rows = Vec::with_capacity(snrs.len() * thetas_deg.len() * ranges_m.len());
    for &snr in &snrs {
        for &theta_deg in &thetas_deg {
            for &d_m in &ranges_m {
                let theta_rad = theta_deg.to_radians();
                let var = crb_variances(snr, theta_rad, d_m, &params)
                    .map_err(isac_core::SimError::from)?;
                rows.push(CrbRow {
                    snr,
                    theta_rad,
                    d_m,
                    var_theta_rad2: var.theta_rad2,
                    var_tau_s2: var.tau_s2,
                    var_mu_hz2: var.mu_hz2,
                    ceiling_applied: var.ceiling_applied,
                });
            }
        }
    }
    export::write_crb(&common.out.join("crb.csv"), &rows)?;
    Ok(())
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(SweepParam::H),
            "resolution" => Ok(SweepParam::Resolution),
            "N_t" => Ok(SweepParam::NT),
            other => Err(format!(
                "unknown parameter '{other}' (expected h, resolution, or N_t)"
            )),
        }
    }
}
