//! Deterministic CSV writers.
//!
//! Every float is printed as `{:.16e}` — 17 significant digits, enough to
//! round-trip an `f64` — so identical runs produce byte-identical files
//! and golden-file diffs stay meaningful. Angles are converted to degrees
//! here and nowhere else; everything upstream works in radians. Absent
//! measurements come through as `NaN` fields.

use isac_core::{McSummary, SlotRecord};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// `f64` at full round-trip precision; `NaN` for absent values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)
}

pub const SLOTS_HEADER: &str = "run,frame,slot,scheme,object,true_theta_deg,true_d_m,\
true_v_mps,est_theta_deg,est_d_m,est_v_mps,meas_theta_deg,meas_tau_s,meas_mu_hz,\
rate_bpshz,radar_snr,sca_iters,irm_iters,r_final,status";

/// Writes `slots.csv`: one row per (run, frame, slot, object).
pub fn write_slots(path: &Path, records: &[SlotRecord]) -> io::Result<()> {
    let mut out = String::with_capacity(records.len() * 220 + 256);
    out.push_str(SLOTS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run,
            r.frame,
            r.slot,
            r.scheme.label(),
            r.object,
            num(r.true_theta_rad.to_degrees()),
            num(r.true_d_m),
            num(r.true_v_mps),
            num(r.est_theta_rad.to_degrees()),
            num(r.est_d_m),
            num(r.est_v_mps),
            num(r.meas_theta_rad.to_degrees()),
            num(r.meas_tau_s),
            num(r.meas_mu_hz),
            num(r.rate_bpshz),
            num(r.radar_snr),
            r.sca_iters,
            r.irm_iters,
            num(r.r_final),
            r.status,
        );
    }
    write_file(path, &out)
}

/// Writes `comparison.csv`: per-scheme per-slot rate and tracking summary.
pub fn write_comparison(path: &Path, summary: &McSummary) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(
        "scheme,slot,mean_sum_rate_bpshz,std_sum_rate_bpshz,rmse_theta_deg,rmse_d_m,rmse_v_mps\n",
    );
    for (si, scheme) in summary.schemes.iter().enumerate() {
        for g in 0..summary.n_slots {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                scheme.label(),
                g + 1,
                num(summary.mean_sum_rate[si][g]),
                num(summary.std_sum_rate[si][g]),
                num(summary.rmse_theta_rad[si][g].to_degrees()),
                num(summary.rmse_d_m[si][g]),
                num(summary.rmse_v_mps[si][g]),
            );
        }
    }
    write_file(path, &out)
}

/// One `sweep.csv` row: a swept value summarized to a single operating
/// point per scheme.
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub scheme: &'static str,
    /// Sum rate averaged over all slots and runs.
    pub mean_rate_bpshz: f64,
    /// Distance RMSE averaged over the tracked slots.
    pub mean_rmse_d_m: f64,
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("param,value,scheme,mean_rate_bpshz,mean_rmse_d_m\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.param,
            num(r.value),
            r.scheme,
            num(r.mean_rate_bpshz),
            num(r.mean_rmse_d_m),
        );
    }
    write_file(path, &out)
}

/// One `approx.csv` row: exact kinematics against the linearized
/// single-slot evolution, open loop.
pub struct ApproxRow {
    pub slot: usize,
    pub theta_exact_rad: f64,
    pub theta_approx_rad: f64,
    pub d_exact_m: f64,
    pub d_approx_m: f64,
}

pub fn write_approx(path: &Path, rows: &[ApproxRow]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(
        "slot,theta_exact_deg,theta_approx_deg,d_exact_m,d_approx_m,err_theta_deg,err_d_m\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.slot,
            num(r.theta_exact_rad.to_degrees()),
            num(r.theta_approx_rad.to_degrees()),
            num(r.d_exact_m),
            num(r.d_approx_m),
            num((r.theta_approx_rad - r.theta_exact_rad).abs().to_degrees()),
            num((r.d_approx_m - r.d_exact_m).abs()),
        );
    }
    write_file(path, &out)
}

/// One `beampattern.csv` row: total transmit gain toward one angle.
pub struct PatternRow {
    pub slot: usize,
    pub theta_rad: f64,
    pub gain: f64,
}

pub fn write_beampattern(path: &Path, rows: &[PatternRow]) -> io::Result<()> {
    let mut out = String::with_capacity(rows.len() * 60 + 64);
    out.push_str("slot,theta_deg,gain\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.slot,
            num(r.theta_rad.to_degrees()),
            num(r.gain)
        );
    }
    write_file(path, &out)
}

/// One `crb.csv` row: estimation variances at one lattice point.
pub struct CrbRow {
    pub snr: f64,
    pub theta_rad: f64,
    pub d_m: f64,
    pub var_theta_rad2: f64,
    pub var_tau_s2: f64,
    pub var_mu_hz2: f64,
    pub ceiling_applied: bool,
}

pub fn write_crb(path: &Path, rows: &[CrbRow]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str("snr,theta_deg,d_m,var_theta_rad2,var_tau_s2,var_mu_hz2,ceiling_applied\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.snr),
            num(r.theta_rad.to_degrees()),
            num(r.d_m),
            num(r.var_theta_rad2),
            num(r.var_tau_s2),
            num(r.var_mu_hz2),
            u8::from(r.ceiling_applied),
        );
    }
    write_file(path, &out)
}
