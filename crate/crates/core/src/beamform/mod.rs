//! Per-slot transmit covariance design.
//!
//! Given predicted bearings, ranges, and bearing uncertainties for the `K`
//! served objects, the designer maximizes the predicted sum rate subject to
//! a total power budget, per-object rate floors, and a beampattern-coverage
//! window around each predicted bearing (so the echo stays usable even when
//! the prediction is off by a few standard deviations). The nonconvex rate
//! objective is handled by successive convex approximation: each round
//! replaces the interference log with its linearization at the previous
//! iterate, which is tight there and a global lower bound, so true sum
//! rates are monotone across rounds. The relaxed covariances are then
//! pushed toward rank one by an iterative penalty on the energy outside
//! each block's principal eigenvector, and beamvectors are read off the
//! principal eigenpairs.
//!
//! All conic subproblems are solved in a per-object subspace spanned by the
//! predicted channels and the coverage steering vectors. Every quantity in
//! the subproblem (rates, power, coverage gains) depends on the covariances
//! only through that span, and the iteration never leaves it, so the
//! reduction is numerically lossless while shrinking the PSD blocks from
//! `N_t` to a handful of dimensions.

pub mod conic;

use crate::config::SimConfig;
use crate::phy::{self, ArrayGeometry, BeamMatrix, PhyError};
use conic::{re_tr, principal_eigenpair, ConicProblem, LinExpr, SolveStatus};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// One slot's design inputs: per-object predictions plus solver knobs.
#[derive(Debug, Clone)]
pub struct BeamProblem {
    pub pointings_rad: Vec<f64>,
    pub ranges_m: Vec<f64>,
    /// Bearing standard deviations sizing the coverage windows.
    pub pointing_std_rad: Vec<f64>,
    pub geom: ArrayGeometry,
    pub alpha0: f64,
    pub p_total: f64,
    pub comm_noise_var: f64,
    pub rate_floors: Vec<f64>,
    pub coverage_slack: f64,
    pub coverage_mult: f64,
    pub resolution_rad: f64,
    pub sca_rel_tol: f64,
    pub sca_max_iters: usize,
    pub irm_max_iters: usize,
    pub irm_weight0: f64,
    pub irm_weight_growth: f64,
    /// Absolute residual below which a block counts as rank one.
    pub irm_residual_tol: f64,
}

impl BeamProblem {
    pub fn from_config(
        cfg: &SimConfig,
        pointings_rad: Vec<f64>,
        ranges_m: Vec<f64>,
        pointing_std_rad: Vec<f64>,
    ) -> Self {
        let k = pointings_rad.len();
        BeamProblem {
            pointings_rad,
            ranges_m,
            pointing_std_rad,
            geom: ArrayGeometry::from_config(cfg),
            alpha0: cfg.alpha0,
            p_total: cfg.p_total,
            comm_noise_var: cfg.comm_noise_var,
            rate_floors: vec![cfg.rate_floor; k],
            coverage_slack: cfg.coverage_slack,
            coverage_mult: cfg.coverage_mult,
            resolution_rad: cfg.resolution_rad,
            sca_rel_tol: cfg.sca_rel_tol,
            sca_max_iters: cfg.sca_max_iters,
            irm_max_iters: cfg.irm_max_iters,
            irm_weight0: cfg.irm_weight0,
            irm_weight_growth: cfg.irm_weight_growth,
            irm_residual_tol: cfg.irm_residual_frac * cfg.p_total / cfg.n_tx as f64,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.pointings_rad.len()
    }

    /// Predicted LoS channels at the pointing bearings and ranges.
    pub fn channels(&self) -> Result<Vec<DVector<Complex64>>, PhyError> {
        (0..self.n_objects())
            .map(|k| {
                phy::channel_vector(
                    self.pointings_rad[k],
                    self.ranges_m[k],
                    &self.geom,
                    self.alpha0,
                )
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum BeamformError {
    #[error("rate floors infeasible after {stages_tried} relaxation stages")]
    Infeasible { stages_tried: usize },
    #[error("conic solver failed: {0}")]
    Solver(String),
    #[error("rank reduction stalled at eigenvalue ratio {lambda_ratio:.3e}")]
    NearRankOne {
        best: Box<BeamSolution>,
        lambda_ratio: f64,
    },
    #[error(transparent)]
    Phy(#[from] PhyError),
}

/// Output of the relaxed (covariance) stage.
#[derive(Debug, Clone)]
pub struct ScaOutcome {
    /// Final covariances, full space.
    pub covariances: Vec<DMatrix<Complex64>>,
    /// True sum rate after each convex round; non-decreasing.
    pub objective_trace: Vec<f64>,
    pub iters: usize,
    /// 0 = floors and coverage held as given; 1 = coverage windows
    /// collapsed to their centers; 2-4 = floors additionally halved once
    /// per stage (down to 1/8).
    pub relax_stages: usize,
    pub floors_used: Vec<f64>,
    red: Reduction,
    s_red: Vec<DMatrix<Complex64>>,
    expansion: Expansion,
}

/// Final per-slot design: rank-reduced covariances and extracted beams.
#[derive(Debug, Clone)]
pub struct BeamSolution {
    pub covariances: Vec<BeamMatrix>,
    pub beams: Vec<DVector<Complex64>>,
    /// Predicted sum rate of the final covariances.
    pub sum_rate_covariance: f64,
    /// Predicted sum rate after beam extraction.
    pub sum_rate_beams: f64,
    pub per_object_rates: Vec<f64>,
    pub sca_iters: usize,
    pub sca_trace: Vec<f64>,
    pub irm_iters: usize,
    /// Rank residual after each penalty round; non-increasing.
    pub r_trace: Vec<f64>,
    pub r_final: f64,
    /// Worst `λ₂/λ₁` across the final covariances.
    pub lambda_ratio: f64,
    pub relax_stages: usize,
    pub rank_converged: bool,
}

/// Bearings probed by the coverage constraint: `θ̄ + i·Δ` for
/// `i ∈ [−n, n]`, where the half-width is `max(l·σ_θ, Δ)`.
pub fn build_coverage_grid(
    pointing_rad: f64,
    sigma_rad: f64,
    coverage_mult: f64,
    resolution_rad: f64,
) -> Vec<f64> {
    let half = (coverage_mult * sigma_rad).max(resolution_rad);
    let n_side = ((half / resolution_rad + 1e-9).floor() as i64).max(1);
    (-n_side..=n_side)
        .map(|i| pointing_rad + i as f64 * resolution_rad)
        .collect()
}

/// `log₂(1 + SINR_k)` for each object under covariances `W`.
pub fn true_rates(
    channels: &[DVector<Complex64>],
    covariances: &[DMatrix<Complex64>],
    comm_noise_var: f64,
) -> Vec<f64> {
    let k_n = channels.len();
    (0..k_n)
        .map(|k| {
            let own = quad_form(&channels[k], &covariances[k]);
            let interf: f64 = (0..k_n)
                .filter(|&i| i != k)
                .map(|i| quad_form(&channels[k], &covariances[i]))
                .sum();
            phy::rate(own / (interf + comm_noise_var))
        })
        .collect()
}

/// Linearization state of the interference logs at one iterate.
#[derive(Debug, Clone)]
pub struct SurrogateExpansion {
    /// `I_k + σ²` at the expansion point.
    pub interf_plus_noise: Vec<f64>,
    /// `log₂e / (I_k + σ²)`.
    pub lin_coeff: Vec<f64>,
    pub points: Vec<DMatrix<Complex64>>,
}

/// Expands the interference logs at `points` (full space).
pub fn expand_surrogate(
    channels: &[DVector<Complex64>],
    points: &[DMatrix<Complex64>],
    comm_noise_var: f64,
) -> SurrogateExpansion {
    let k_n = channels.len();
    let interf_plus_noise: Vec<f64> = (0..k_n)
        .map(|k| {
            comm_noise_var
                + (0..k_n)
                    .filter(|&i| i != k)
                    .map(|i| quad_form(&channels[k], &points[i]))
                    .sum::<f64>()
        })
        .collect();
    let lin_coeff = interf_plus_noise
        .iter()
        .map(|v| std::f64::consts::LOG2_E / v)
        .collect();
    SurrogateExpansion {
        interf_plus_noise,
        lin_coeff,
        points: points.to_vec(),
    }
}

/// Concave lower bounds on the per-object rates: the total-power log is
/// kept, the interference log is linearized at the expansion point. Equal
/// to the true rates there, below them everywhere else.
pub fn surrogate_rates(
    expansion: &SurrogateExpansion,
    channels: &[DVector<Complex64>],
    covariances: &[DMatrix<Complex64>],
    comm_noise_var: f64,
) -> Vec<f64> {
    let k_n = channels.len();
    (0..k_n)
        .map(|k| {
            let total: f64 = comm_noise_var
                + (0..k_n)
                    .map(|i| quad_form(&channels[k], &covariances[i]))
                    .sum::<f64>();
            let mut lin = 0.0;
            for i in 0..k_n {
                if i != k {
                    lin += expansion.lin_coeff[k]
                        * (quad_form(&channels[k], &covariances[i])
                            - quad_form(&channels[k], &expansion.points[i]));
                }
            }
            total.log2() - expansion.interf_plus_noise[k].log2() - lin
        })
        .collect()
}

fn quad_form(h: &DVector<Complex64>, w: &DMatrix<Complex64>) -> f64 {
    (h.adjoint() * w * h)[(0, 0)].re
}

// ---------------------------------------------------------------------------
// subspace reduction

/// Per-object orthonormal bases `U_k`; `W_k = U_k S_k U_kᴴ`.
#[derive(Debug, Clone)]
struct Reduction {
    bases: Vec<DMatrix<Complex64>>,
    /// `U_iᴴ h_k` indexed `[block i][object k]`.
    chan: Vec<Vec<DVector<Complex64>>>,
    /// `(U_iᴴ h_k)(U_iᴴ h_k)ᴴ` indexed `[block i][object k]`.
    chan_outer: Vec<Vec<DMatrix<Complex64>>>,
    /// Coverage-gain difference matrices per block: center minus probe.
    cover_diff: Vec<Vec<DMatrix<Complex64>>>,
    dims: Vec<usize>,
}

/// Modified Gram–Schmidt with re-orthogonalization; columns whose residual
/// falls under `tol · ‖original‖` are dropped.
fn orthonormal_basis(candidates: &[DVector<Complex64>], tol: f64) -> Vec<DVector<Complex64>> {
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for v in candidates {
        let orig = v.norm();
        if orig == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &basis {
                let c = u.dotc(&w);
                w -= u * c;
            }
        }
        let n = w.norm();
        if n > tol * orig {
            basis.push(w / Complex64::new(n, 0.0));
        }
    }
    basis
}

fn build_reduction(
    problem: &BeamProblem,
    channels: &[DVector<Complex64>],
    grids: &[Vec<f64>],
) -> Reduction {
    let k_n = problem.n_objects();
    let n_t = problem.geom.n_tx;
    let mut bases = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let mut candidates: Vec<DVector<Complex64>> = channels.to_vec();
        candidates.push(phy::steering_vector(problem.pointings_rad[k], &problem.geom));
        for &theta in &grids[k] {
            candidates.push(phy::steering_vector(theta, &problem.geom));
        }
        let basis = orthonormal_basis(&candidates, 1e-10);
        let u = if basis.len() >= n_t {
            DMatrix::identity(n_t, n_t)
        } else {
            DMatrix::from_columns(&basis)
        };
        bases.push(u);
    }
    let chan: Vec<Vec<DVector<Complex64>>> = bases
        .iter()
        .map(|u| channels.iter().map(|h| u.adjoint() * h).collect())
        .collect();
    let chan_outer = chan
        .iter()
        .map(|row| row.iter().map(|g| g * g.adjoint()).collect())
        .collect();
    let cover_diff = (0..k_n)
        .map(|k| {
            let u = &bases[k];
            let center = u.adjoint() * phy::steering_vector(problem.pointings_rad[k], &problem.geom);
            let center_outer = &center * center.adjoint();
            grids[k]
                .iter()
                .filter(|&&theta| theta != problem.pointings_rad[k])
                .map(|&theta| {
                    let probe = u.adjoint() * phy::steering_vector(theta, &problem.geom);
                    &center_outer - &probe * probe.adjoint()
                })
                .collect()
        })
        .collect();
    let dims = bases.iter().map(|u| u.ncols()).collect();
    Reduction {
        bases,
        chan,
        chan_outer,
        cover_diff,
        dims,
    }
}

impl Reduction {
    fn lift(&self, s: &[DMatrix<Complex64>]) -> Vec<DMatrix<Complex64>> {
        s.iter()
            .zip(&self.bases)
            .map(|(sk, u)| u * sk * u.adjoint())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// reduced-space surrogate machinery

/// Reduced-coordinate expansion: interference consts plus the iterate.
#[derive(Debug, Clone)]
struct Expansion {
    interf_plus_noise: Vec<f64>,
    lin_coeff: Vec<f64>,
}

fn expand_reduced(red: &Reduction, s: &[DMatrix<Complex64>], comm_noise_var: f64) -> Expansion {
    let k_n = s.len();
    let interf_plus_noise: Vec<f64> = (0..k_n)
        .map(|k| {
            comm_noise_var
                + (0..k_n)
                    .filter(|&i| i != k)
                    .map(|i| re_tr(&red.chan_outer[i][k], &s[i]))
                    .sum::<f64>()
        })
        .collect();
    let lin_coeff = interf_plus_noise
        .iter()
        .map(|v| std::f64::consts::LOG2_E / v)
        .collect();
    Expansion {
        interf_plus_noise,
        lin_coeff,
    }
}

fn reduced_rates(red: &Reduction, s: &[DMatrix<Complex64>], comm_noise_var: f64) -> Vec<f64> {
    let k_n = s.len();
    (0..k_n)
        .map(|k| {
            let own = re_tr(&red.chan_outer[k][k], &s[k]);
            let interf: f64 = (0..k_n)
                .filter(|&i| i != k)
                .map(|i| re_tr(&red.chan_outer[i][k], &s[i]))
                .sum();
            phy::rate(own / (interf + comm_noise_var))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// subproblem assembly

/// One shared layout: `K` covariance blocks, scalars `t_0..t_{K−1}` for the
/// rate hypographs, and optionally a trailing rank-residual scalar.
fn assemble_base(
    problem: &BeamProblem,
    red: &Reduction,
    exp: &Expansion,
    floors: &[f64],
    extra_scalars: usize,
) -> ConicProblem {
    let k_n = problem.n_objects();
    let mut p = ConicProblem::new(red.dims.clone(), k_n + extra_scalars);

    // objective: Σ_k [t_k − log₂(I_k+σ²) + c_k·(I_k at expansion − I_k(W))]
    let mut obj = LinExpr::constant(0.0);
    for k in 0..k_n {
        obj = obj.scalar(k, 1.0);
        obj.constant += -exp.interf_plus_noise[k].log2()
            + exp.lin_coeff[k] * (exp.interf_plus_noise[k] - problem.comm_noise_var);
    }
    for i in 0..k_n {
        let mut mat = DMatrix::<Complex64>::zeros(red.dims[i], red.dims[i]);
        for k in 0..k_n {
            if k != i {
                mat -= &red.chan_outer[i][k] * Complex64::new(exp.lin_coeff[k], 0.0);
            }
        }
        obj = obj.block(i, mat);
    }
    p.maximize(obj);

    // hypographs t_k ≤ log₂(σ² + Σ_i tr(H_k W_i))
    for k in 0..k_n {
        let mut expr = LinExpr::constant(problem.comm_noise_var);
        for i in 0..k_n {
            expr = expr.block(i, red.chan_outer[i][k].clone());
        }
        p.require_log2_hypograph(k, expr);
    }

    // rate floors on the same surrogate
    for k in 0..k_n {
        let mut expr = LinExpr::constant(
            -exp.interf_plus_noise[k].log2()
                + exp.lin_coeff[k] * (exp.interf_plus_noise[k] - problem.comm_noise_var)
                - floors[k],
        )
        .scalar(k, 1.0);
        for i in 0..k_n {
            if i != k {
                expr = expr.block(
                    i,
                    &red.chan_outer[i][k] * Complex64::new(-exp.lin_coeff[k], 0.0),
                );
            }
        }
        p.require_nonneg(expr);
    }

    // power budget
    let mut power = LinExpr::constant(problem.p_total);
    for i in 0..k_n {
        power = power.block(i, -DMatrix::<Complex64>::identity(red.dims[i], red.dims[i]));
    }
    p.require_nonneg(power);

    // coverage: |gain(θ̄_k) − gain(θ_c)| ≤ B·tr(W_k)
    for k in 0..k_n {
        let eye = DMatrix::<Complex64>::identity(red.dims[k], red.dims[k]);
        for diff in &red.cover_diff[k] {
            let slack = &eye * Complex64::new(problem.coverage_slack, 0.0);
            p.require_nonneg(LinExpr::constant(0.0).block(k, &slack - diff));
            p.require_nonneg(LinExpr::constant(0.0).block(k, &slack + diff));
        }
    }
    p
}

enum InnerFail {
    Infeasible,
    Numerical(String),
}

// ---------------------------------------------------------------------------
// successive convex approximation

/// Relaxed covariance design with the infeasibility ladder: the coverage
/// windows collapse to their centers first, then the floors are halved up
/// to three times; only then is the slot declared infeasible.
pub fn solve_sca(problem: &BeamProblem) -> Result<ScaOutcome, BeamformError> {
    let k_n = problem.n_objects();
    assert!(k_n > 0, "no objects to serve");
    assert_eq!(problem.ranges_m.len(), k_n);
    assert_eq!(problem.pointing_std_rad.len(), k_n);
    assert_eq!(problem.rate_floors.len(), k_n);
    let channels = problem.channels()?;

    let mut last_fail = InnerFail::Infeasible;
    // each stage strictly enlarges the previous feasible set: first drop
    // the coverage rows (they bind hard when the pointing uncertainty far
    // exceeds the beamwidth), then halve the floors
    for stage in 0..=4usize {
        let scale = 0.5f64.powi(stage.saturating_sub(1) as i32);
        let floors: Vec<f64> = problem.rate_floors.iter().map(|g| g * scale).collect();
        let grids: Vec<Vec<f64>> = (0..k_n)
            .map(|k| {
                if stage >= 1 {
                    vec![problem.pointings_rad[k]]
                } else {
                    build_coverage_grid(
                        problem.pointings_rad[k],
                        problem.pointing_std_rad[k],
                        problem.coverage_mult,
                        problem.resolution_rad,
                    )
                }
            })
            .collect();
        match run_sca_stage(problem, &channels, &floors, &grids) {
            Ok(mut out) => {
                out.relax_stages = stage;
                return Ok(out);
            }
            Err(fail) => last_fail = fail,
        }
    }
    match last_fail {
        InnerFail::Infeasible => Err(BeamformError::Infeasible { stages_tried: 5 }),
        InnerFail::Numerical(msg) => Err(BeamformError::Solver(msg)),
    }
}

fn run_sca_stage(
    problem: &BeamProblem,
    channels: &[DVector<Complex64>],
    floors: &[f64],
    grids: &[Vec<f64>],
) -> Result<ScaOutcome, InnerFail> {
    let k_n = problem.n_objects();
    let red = build_reduction(problem, channels, grids);

    // split-power matched-filter start: W_k = (P_T/K)/N_t · a_k a_kᴴ
    let n_t = problem.geom.n_tx as f64;
    let mut s_cur: Vec<DMatrix<Complex64>> = (0..k_n)
        .map(|k| {
            let a_red = red.bases[k].adjoint()
                * phy::steering_vector(problem.pointings_rad[k], &problem.geom);
            let scale = problem.p_total / (k_n as f64 * n_t);
            (&a_red * a_red.adjoint()) * Complex64::new(scale, 0.0)
        })
        .collect();

    let mut trace: Vec<f64> = Vec::new();
    let mut iters = 0usize;
    let mut expansion = expand_reduced(&red, &s_cur, problem.comm_noise_var);
    loop {
        let sub = assemble_base(problem, &red, &expansion, floors, 0);
        let sol = sub.solve();
        match sol.status {
            SolveStatus::Optimal => {
                s_cur = sol.blocks;
                iters += 1;
                let rate: f64 = reduced_rates(&red, &s_cur, problem.comm_noise_var)
                    .iter()
                    .sum();
                let done = match trace.last() {
                    Some(prev) => {
                        (rate - prev).abs() / prev.abs().max(1e-12) < problem.sca_rel_tol
                    }
                    None => false,
                };
                trace.push(rate);
                if done || iters >= problem.sca_max_iters {
                    break;
                }
                expansion = expand_reduced(&red, &s_cur, problem.comm_noise_var);
            }
            SolveStatus::Infeasible if iters == 0 => return Err(InnerFail::Infeasible),
            SolveStatus::NumericalFailure(msg) if iters == 0 => {
                return Err(InnerFail::Numerical(msg))
            }
            // a later round failing numerically leaves the last good iterate
            _ => break,
        }
    }
    Ok(ScaOutcome {
        covariances: red.lift(&s_cur),
        objective_trace: trace,
        iters,
        relax_stages: 0,
        floors_used: floors.to_vec(),
        red,
        s_red: s_cur,
        expansion,
    })
}

// ---------------------------------------------------------------------------
// rank reduction

/// Drives each covariance toward rank one by penalizing the shared residual
/// `r ≥ λmax(V_kᴴ W_k V_k)` (energy outside each principal eigenvector) with
/// geometrically growing weight, under the same floors, power, and coverage
/// constraints, with the rate surrogate frozen at the final expansion of
/// [`solve_sca`]. The best (smallest-residual) iterate is kept in case a
/// late round fails numerically on the PSD boundary.
pub fn solve_irm(problem: &BeamProblem, sca: &ScaOutcome) -> Result<BeamSolution, BeamformError> {
    let k_n = problem.n_objects();
    let red = &sca.red;
    let r_idx = k_n; // trailing scalar

    if red.dims.iter().all(|&m| m <= 1) {
        let sol = finish_solution(problem, sca, &sca.s_red, 0, Vec::new(), true)?;
        return Ok(sol);
    }

    let mut s_cur = sca.s_red.clone();
    let mut r_trace: Vec<f64> = Vec::new();
    let mut best: Option<(f64, Vec<DMatrix<Complex64>>)> = None;
    let mut converged = false;
    let mut iters = 0usize;

    for p_round in 0..problem.irm_max_iters {
        let weight = problem.irm_weight0 * problem.irm_weight_growth.powi(p_round as i32);
        let mut sub = assemble_base(problem, red, &sca.expansion, &sca.floors_used, 1);
        // append −w·r to the rate objective
        let mut obj_extra = LinExpr::constant(0.0);
        obj_extra = obj_extra.scalar(r_idx, -weight);
        merge_objective(&mut sub, problem, red, &sca.expansion, obj_extra);
        sub.require_scalar_nonneg(r_idx);
        for (k, s_k) in s_cur.iter().enumerate() {
            let m = red.dims[k];
            if m < 2 {
                continue;
            }
            sub.require_shifted_psd(k, minor_eigvecs(s_k), r_idx);
        }
        let sol = sub.solve();
        match sol.status {
            SolveStatus::Optimal => {
                let r_p = sol.scalars[r_idx];
                s_cur = sol.blocks;
                r_trace.push(r_p);
                iters += 1;
                if best.as_ref().map_or(true, |(rb, _)| r_p <= *rb) {
                    best = Some((r_p, s_cur.clone()));
                }
                if r_p < problem.irm_residual_tol {
                    converged = true;
                    break;
                }
            }
            // keep the best iterate; the penalty path has no recovery move
            _ => break,
        }
    }

    let final_s = best.map(|(_, s)| s).unwrap_or_else(|| sca.s_red.clone());
    let sol = finish_solution(problem, sca, &final_s, iters, r_trace, converged)?;
    if converged {
        Ok(sol)
    } else {
        let ratio = sol.lambda_ratio;
        Err(BeamformError::NearRankOne {
            best: Box::new(sol),
            lambda_ratio: ratio,
        })
    }
}

/// Columns spanning all but the principal eigendirection of `s`.
fn minor_eigvecs(s: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let m = s.nrows();
    let eig = s.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let cols: Vec<DVector<Complex64>> = order[..m - 1]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Re-states the maximization objective with an extra linear term tacked on
/// (the builder keeps one objective, so rebuild it in place).
fn merge_objective(
    sub: &mut ConicProblem,
    problem: &BeamProblem,
    red: &Reduction,
    exp: &Expansion,
    extra: LinExpr,
) {
    let k_n = problem.n_objects();
    let mut obj = extra;
    for k in 0..k_n {
        obj = obj.scalar(k, 1.0);
        obj.constant += -exp.interf_plus_noise[k].log2()
            + exp.lin_coeff[k] * (exp.interf_plus_noise[k] - problem.comm_noise_var);
    }
    for i in 0..k_n {
        let mut mat = DMatrix::<Complex64>::zeros(red.dims[i], red.dims[i]);
        for k in 0..k_n {
            if k != i {
                mat -= &red.chan_outer[i][k] * Complex64::new(exp.lin_coeff[k], 0.0);
            }
        }
        obj = obj.block(i, mat);
    }
    sub.maximize(obj);
}

fn finish_solution(
    problem: &BeamProblem,
    sca: &ScaOutcome,
    s_final: &[DMatrix<Complex64>],
    irm_iters: usize,
    r_trace: Vec<f64>,
    rank_converged: bool,
) -> Result<BeamSolution, BeamformError> {
    let red = &sca.red;
    let full = red.lift(s_final);
    let mut covariances = Vec::with_capacity(full.len());
    let mut beams = Vec::with_capacity(full.len());
    let mut lambda_ratio = 0.0f64;
    for w in &full {
        let bm = BeamMatrix::try_new(w.clone())?;
        let (_, u1, ratio) = principal_eigenpair(bm.matrix());
        lambda_ratio = lambda_ratio.max(ratio);
        let beam = u1 * Complex64::new(bm.trace().max(0.0).sqrt(), 0.0);
        beams.push(beam);
        covariances.push(bm);
    }
    let channels = problem.channels()?;
    let sum_rate_covariance: f64 = true_rates(&channels, &full, problem.comm_noise_var)
        .iter()
        .sum();
    let per_object_rates: Vec<f64> = (0..channels.len())
        .map(|k| {
            phy::rate(phy::directional_sinr(
                &channels[k],
                &beams,
                k,
                problem.comm_noise_var,
            ))
        })
        .collect();
    let sum_rate_beams = per_object_rates.iter().sum();
    let r_final = r_trace.last().copied().unwrap_or(0.0);
    Ok(BeamSolution {
        covariances,
        beams,
        sum_rate_covariance,
        sum_rate_beams,
        per_object_rates,
        sca_iters: sca.iters,
        sca_trace: sca.objective_trace.clone(),
        irm_iters,
        r_trace,
        r_final,
        lambda_ratio,
        relax_stages: sca.relax_stages,
        rank_converged,
    })
}

/// Full pipeline for one slot: relaxation, then rank reduction.
pub fn solve_beams(problem: &BeamProblem) -> Result<BeamSolution, BeamformError> {
    let sca = solve_sca(problem)?;
    solve_irm(problem, &sca)
}

// ---------------------------------------------------------------------------
// one-shot convex round (public, full space; used for validation tooling)

/// Solves a single convex round expanded at `points`, in the full space.
/// Returns the covariances and the surrogate optimum.
pub fn solve_convex_subproblem(
    problem: &BeamProblem,
    points: &[DMatrix<Complex64>],
) -> Result<(Vec<DMatrix<Complex64>>, f64), BeamformError> {
    let k_n = problem.n_objects();
    let channels = problem.channels()?;
    let grids: Vec<Vec<f64>> = (0..k_n)
        .map(|k| {
            build_coverage_grid(
                problem.pointings_rad[k],
                problem.pointing_std_rad[k],
                problem.coverage_mult,
                problem.resolution_rad,
            )
        })
        .collect();
    // identity reduction keeps caller-supplied expansion points exact
    let red = build_reduction_identity(problem, &channels, &grids);
    let exp_full = expand_surrogate(&channels, points, problem.comm_noise_var);
    let expansion = Expansion {
        interf_plus_noise: exp_full.interf_plus_noise.clone(),
        lin_coeff: exp_full.lin_coeff.clone(),
    };
    let sub = assemble_base(problem, &red, &expansion, &problem.rate_floors, 0);
    let sol = sub.solve();
    match sol.status {
        SolveStatus::Optimal => Ok((sol.blocks, sol.objective)),
        SolveStatus::Infeasible => Err(BeamformError::Infeasible { stages_tried: 0 }),
        SolveStatus::NumericalFailure(msg) => Err(BeamformError::Solver(msg)),
    }
}

fn build_reduction_identity(
    problem: &BeamProblem,
    channels: &[DVector<Complex64>],
    grids: &[Vec<f64>],
) -> Reduction {
    let mut red = build_reduction(problem, channels, grids);
    let n_t = problem.geom.n_tx;
    let k_n = problem.n_objects();
    for k in 0..k_n {
        red.bases[k] = DMatrix::identity(n_t, n_t);
        red.dims[k] = n_t;
    }
    red.chan = red
        .bases
        .iter()
        .map(|u| channels.iter().map(|h| u.adjoint() * h).collect())
        .collect();
    red.chan_outer = red
        .chan
        .iter()
        .map(|row| row.iter().map(|g| g * g.adjoint()).collect())
        .collect();
    red.cover_diff = (0..k_n)
        .map(|k| {
            let center = phy::steering_vector(problem.pointings_rad[k], &problem.geom);
            let center_outer = &center * center.adjoint();
            grids[k]
                .iter()
                .filter(|&&theta| theta != problem.pointings_rad[k])
                .map(|&theta| {
                    let probe = phy::steering_vector(theta, &problem.geom);
                    &center_outer - &probe * probe.adjoint()
                })
                .collect()
        })
        .collect();
    red
}

// ---------------------------------------------------------------------------
// water-filling baseline

/// Matched-filter beams toward the pointings with water-filled powers over
/// the effective gains `g_k = N_t α0² / d̄_k²`; ignores floors and coverage.
pub fn waterfill_mrt(problem: &BeamProblem) -> Result<BeamSolution, BeamformError> {
    let k_n = problem.n_objects();
    let n_t = problem.geom.n_tx as f64;
    let gains: Vec<f64> = problem
        .ranges_m
        .iter()
        .map(|d| n_t * problem.alpha0 * problem.alpha0 / (d * d))
        .collect();
    let powers = waterfill_powers(&gains, problem.p_total, problem.comm_noise_var);
    let mut beams = Vec::with_capacity(k_n);
    let mut covariances = Vec::with_capacity(k_n);
    for k in 0..k_n {
        let a = phy::steering_vector(problem.pointings_rad[k], &problem.geom);
        let w = a * Complex64::new((powers[k] / n_t).sqrt(), 0.0);
        covariances.push(BeamMatrix::try_new(&w * w.adjoint())?);
        beams.push(w);
    }
    let channels = problem.channels()?;
    let per_object_rates: Vec<f64> = (0..k_n)
        .map(|k| {
            phy::rate(phy::directional_sinr(
                &channels[k],
                &beams,
                k,
                problem.comm_noise_var,
            ))
        })
        .collect();
    let sum_rate_beams: f64 = per_object_rates.iter().sum();
    Ok(BeamSolution {
        covariances,
        beams,
        sum_rate_covariance: sum_rate_beams,
        sum_rate_beams,
        per_object_rates,
        sca_iters: 0,
        sca_trace: Vec::new(),
        irm_iters: 0,
        r_trace: Vec::new(),
        r_final: 0.0,
        lambda_ratio: 0.0,
        relax_stages: 0,
        rank_converged: true,
    })
}

/// Interference-free water-filling: `p_k = max(0, 1/ν − σ²/g_k)` with ν
/// chosen so the active powers sum to the budget.
pub fn waterfill_powers(gains: &[f64], p_total: f64, noise_var: f64) -> Vec<f64> {
    let k_n = gains.len();
    let mut order: Vec<usize> = (0..k_n).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    let mut powers = vec![0.0; k_n];
    for active in (1..=k_n).rev() {
        let inv_sum: f64 = order[..active].iter().map(|&i| noise_var / gains[i]).sum();
        let level = (p_total + inv_sum) / active as f64; // 1/ν
        let weakest = order[active - 1];
        if level - noise_var / gains[weakest] >= 0.0 {
            for &i in &order[..active] {
                powers[i] = level - noise_var / gains[i];
            }
            break;
        }
    }
    powers
}
