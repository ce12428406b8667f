//! Conic subproblem backend.
//!
//! The beam designer's subproblems are linear optimizations over complex
//! Hermitian PSD blocks `W_b`, free scalars, and three constraint shapes:
//! linear inequalities in `Re tr(C W_b)` functionals, hypographs
//! `t ≤ log₂(affine)`, and shifted blocks `r·I − V^H W_b V ⪰ 0`. This
//! module lowers that vocabulary onto a real symmetric-cone interior-point
//! solver (Clarabel) and lifts solutions back.
//!
//! A complex Hermitian `W = A + iB` embeds as the real symmetric
//! `M = [[A, −B], [B, A]]`, which is PSD iff `W` is, and satisfies
//! `tr(C_e M) = 2·Re tr(C W)` for embedded functionals. The embedding is
//! enforced *structurally*: the real parameters are exactly the free
//! entries of `W` (diagonal, and re/im of the upper triangle), and the
//! PSD-cone slack rows are tied to those parameters, so no averaging or
//! post-hoc symmetrization is ever needed. Hypographs become exponential
//! cones via `t·ln2 ≤ ln y ⟺ (t·ln2, 1, y) ∈ K_exp`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, ExponentialConeT, IPSolver, NonnegativeConeT,
    PSDTriangleConeT, SolverStatus, SupportedConeT,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Linear functional `const + Σ_b Re tr(C_b W_b) + Σ_i c_i x_i`.
#[derive(Debug, Clone)]
pub struct LinExpr {
    pub constant: f64,
    pub blocks: Vec<(usize, DMatrix<Complex64>)>,
    pub scalars: Vec<(usize, f64)>,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        LinExpr {
            constant: c,
            blocks: Vec::new(),
            scalars: Vec::new(),
        }
    }

    pub fn block(mut self, b: usize, c: DMatrix<Complex64>) -> Self {
        self.blocks.push((b, c));
        self
    }

    pub fn scalar(mut self, i: usize, c: f64) -> Self {
        self.scalars.push((i, c));
        self
    }
}

/// `r_scalar · I − V^H W_block V ⪰ 0`.
#[derive(Debug, Clone)]
struct ShiftedPsd {
    block: usize,
    v: DMatrix<Complex64>,
    r_scalar: usize,
}

/// One conic subproblem; build then [`ConicProblem::solve`].
#[derive(Debug, Clone)]
pub struct ConicProblem {
    block_dims: Vec<usize>,
    n_scalars: usize,
    objective: LinExpr,
    nonneg: Vec<LinExpr>,
    hypographs: Vec<(usize, LinExpr)>,
    shifted: Vec<ShiftedPsd>,
    scalar_nonneg: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NumericalFailure(String),
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Hermitian blocks; valid when status is `Optimal`.
    pub blocks: Vec<DMatrix<Complex64>>,
    pub scalars: Vec<f64>,
    /// Objective of the *maximization* this problem expresses.
    pub objective: f64,
}

impl ConicProblem {
    pub fn new(block_dims: Vec<usize>, n_scalars: usize) -> Self {
        ConicProblem {
            block_dims,
            n_scalars,
            objective: LinExpr::constant(0.0),
            nonneg: Vec::new(),
            hypographs: Vec::new(),
            shifted: Vec::new(),
            scalar_nonneg: Vec::new(),
        }
    }

    /// Sets the expression to maximize.
    pub fn maximize(&mut self, obj: LinExpr) {
        self.objective = obj;
    }

    /// Adds `expr ≥ 0`.
    pub fn require_nonneg(&mut self, expr: LinExpr) {
        self.nonneg.push(expr);
    }

    /// Adds `x_i ≥ 0`.
    pub fn require_scalar_nonneg(&mut self, i: usize) {
        self.scalar_nonneg.push(i);
    }

    /// Adds `x_t ≤ log₂(expr)`.
    pub fn require_log2_hypograph(&mut self, t: usize, expr: LinExpr) {
        self.hypographs.push((t, expr));
    }

    /// Adds `x_r · I − V^H W_b V ⪰ 0`; `V` has the block's row count.
    pub fn require_shifted_psd(&mut self, block: usize, v: DMatrix<Complex64>, r_scalar: usize) {
        assert_eq!(v.nrows(), self.block_dims[block]);
        assert!(v.ncols() >= 1);
        self.shifted.push(ShiftedPsd {
            block,
            v,
            r_scalar,
        });
    }

    fn param_base(&self, block: usize) -> usize {
        self.block_dims[..block].iter().map(|m| m * m).sum()
    }

    fn n_params(&self) -> usize {
        self.param_base(self.block_dims.len()) + self.n_scalars
    }

    fn scalar_index(&self, i: usize) -> usize {
        self.param_base(self.block_dims.len()) + i
    }

    /// Column indices of one block's parameters: `m` diagonals first, then
    /// `(re, im)` pairs over the upper triangle in column-major order.
    fn param_cols(&self, block: usize) -> BlockCols {
        BlockCols {
            base: self.param_base(block),
            m: self.block_dims[block],
        }
    }

    pub fn solve(&self) -> ConicSolution {
        let nx = self.n_params();
        let mut trips: Vec<(usize, usize, f64)> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        let mut row = 0usize;

        // nonnegative rows: s = b − A x = expr ≥ 0
        let n_lin = self.nonneg.len() + self.scalar_nonneg.len();
        if n_lin > 0 {
            for expr in &self.nonneg {
                self.expr_row(expr, row, &mut trips, &mut b);
                row += 1;
            }
            for &i in &self.scalar_nonneg {
                trips.push((row, self.scalar_index(i), -1.0));
                b.push(0.0);
                row += 1;
            }
            cones.push(NonnegativeConeT(n_lin));
        }

        // hypograph rows: (t·ln2, 1, expr) ∈ K_exp
        for (t, expr) in &self.hypographs {
            trips.push((row, self.scalar_index(*t), -std::f64::consts::LN_2));
            b.push(0.0);
            b.push(1.0);
            self.expr_row(expr, row + 2, &mut trips, &mut b);
            row += 3;
            cones.push(ExponentialConeT());
        }

        // one PSD triangle cone per block, slack tied to the parameters
        for (blk, &m) in self.block_dims.iter().enumerate() {
            let cols = self.param_cols(blk);
            let n2 = 2 * m;
            for i in 0..m {
                trips.push((row + svidx(i, i), cols.diag(i), -1.0));
                trips.push((row + svidx(m + i, m + i), cols.diag(i), -1.0));
            }
            let s2 = std::f64::consts::SQRT_2;
            for j in 0..m {
                for i in 0..j {
                    trips.push((row + svidx(i, j), cols.re(i, j), -s2));
                    trips.push((row + svidx(m + i, m + j), cols.re(i, j), -s2));
                    trips.push((row + svidx(i, m + j), cols.im(i, j), s2));
                    trips.push((row + svidx(j, m + i), cols.im(i, j), -s2));
                }
            }
            for _ in 0..svlen(n2) {
                b.push(0.0);
            }
            row += svlen(n2);
            cones.push(PSDTriangleConeT(n2));
        }

        // shifted blocks: s = svec(embed(r I − V^H W V))
        for sh in &self.shifted {
            let q = sh.v.ncols();
            let m = self.block_dims[sh.block];
            let cols = self.param_cols(sh.block);
            // r column: +svec(embed(I_q)) → A entry −1 on the diagonal slots
            for a in 0..2 * q {
                trips.push((row + svidx(a, a), self.scalar_index(sh.r_scalar), -1.0));
            }
            // param columns: −V^H E_p V per parameter
            for i in 0..m {
                let vi = sh.v.row(i).adjoint(); // column q-vector, conj of row i
                let outer = &vi * vi.adjoint();
                push_embedded(&outer, row, cols.diag(i), 1.0, &mut trips);
            }
            for j in 0..m {
                for i in 0..j {
                    let vi = sh.v.row(i).adjoint();
                    let vj = sh.v.row(j).adjoint();
                    let cross = &vi * vj.adjoint(); // V^H e_i e_j^H V
                    let re_mat = &cross + cross.adjoint();
                    let im_mat = (&cross - cross.adjoint()) * Complex64::new(0.0, 1.0);
                    push_embedded(&re_mat, row, cols.re(i, j), 1.0, &mut trips);
                    push_embedded(&im_mat, row, cols.im(i, j), 1.0, &mut trips);
                }
            }
            for _ in 0..svlen(2 * q) {
                b.push(0.0);
            }
            row += svlen(2 * q);
            cones.push(PSDTriangleConeT(2 * q));
        }

        // objective: minimize −(maximization objective)
        let mut q_vec = vec![0.0; nx];
        for (blk, c) in &self.objective.blocks {
            let cols = self.param_cols(*blk);
            accumulate_functional(c, &cols, -1.0, &mut q_vec);
        }
        for (i, c) in &self.objective.scalars {
            q_vec[self.scalar_index(*i)] -= c;
        }

        let a_mat = to_csc(row, nx, &mut trips);
        let p_mat = CscMatrix::zeros((nx, nx));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            // Ruiz equilibration mis-scales the structurally tied svec
            // columns and kills the KKT factorization once the
            // rank-reduction rounds park blocks on the PSD boundary; the
            // problem is built well-scaled, so skip it
            .equilibrate_enable(false)
            .build()
            .expect("static settings");
        let mut solver = match DefaultSolver::new(&p_mat, &q_vec, &a_mat, &b, &cones, settings) {
            Ok(s) => s,
            Err(e) => {
                return ConicSolution {
                    status: SolveStatus::NumericalFailure(format!("setup: {e:?}")),
                    blocks: Vec::new(),
                    scalars: Vec::new(),
                    objective: f64::NEG_INFINITY,
                }
            }
        };
        solver.solve();
        let status = match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveStatus::Infeasible
            }
            other => SolveStatus::NumericalFailure(format!("{other:?}")),
        };
        if status != SolveStatus::Optimal {
            return ConicSolution {
                status,
                blocks: Vec::new(),
                scalars: Vec::new(),
                objective: f64::NEG_INFINITY,
            };
        }
        let x = &solver.solution.x;
        let blocks: Vec<DMatrix<Complex64>> = (0..self.block_dims.len())
            .map(|blk| {
                let m = self.block_dims[blk];
                let cols = self.param_cols(blk);
                DMatrix::from_fn(m, m, |r, c| {
                    use std::cmp::Ordering::*;
                    match r.cmp(&c) {
                        Equal => Complex64::new(x[cols.diag(r)], 0.0),
                        Less => Complex64::new(x[cols.re(r, c)], x[cols.im(r, c)]),
                        Greater => Complex64::new(x[cols.re(c, r)], -x[cols.im(c, r)]),
                    }
                })
            })
            .collect();
        let scalars: Vec<f64> = (0..self.n_scalars)
            .map(|i| x[self.scalar_index(i)])
            .collect();
        let mut objective = self.objective.constant;
        for (blk, c) in &self.objective.blocks {
            objective += re_tr(c, &blocks[*blk]);
        }
        for (i, c) in &self.objective.scalars {
            objective += c * scalars[*i];
        }
        ConicSolution {
            status,
            blocks,
            scalars,
            objective,
        }
    }

    /// Encodes `s_row = expr` as `b[row] = const`, `A[row, ·] = −coeffs`.
    fn expr_row(
        &self,
        expr: &LinExpr,
        row: usize,
        trips: &mut Vec<(usize, usize, f64)>,
        b: &mut Vec<f64>,
    ) {
        let mut coeffs = vec![0.0; self.n_params()];
        for (blk, c) in &expr.blocks {
            let cols = self.param_cols(*blk);
            accumulate_functional(c, &cols, 1.0, &mut coeffs);
        }
        for (i, c) in &expr.scalars {
            coeffs[self.scalar_index(*i)] += c;
        }
        for (col, v) in coeffs.iter().enumerate() {
            if *v != 0.0 {
                trips.push((row, col, -v));
            }
        }
        b.push(expr.constant);
    }
}

/// `Re tr(C W)` for Hermitian `C`, `W`.
pub fn re_tr(c: &DMatrix<Complex64>, w: &DMatrix<Complex64>) -> f64 {
    debug_assert_eq!(c.shape(), w.shape());
    let mut acc = 0.0;
    for j in 0..c.ncols() {
        for i in 0..c.nrows() {
            let prod = c[(i, j)] * w[(j, i)];
            acc += prod.re;
        }
    }
    acc
}

struct BlockCols {
    base: usize,
    m: usize,
}

impl BlockCols {
    fn diag(&self, i: usize) -> usize {
        self.base + i
    }

    /// Upper-triangle pair slots after the `m` diagonals, column-major.
    fn pair(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        self.base + self.m + 2 * (j * (j - 1) / 2 + i)
    }

    fn re(&self, i: usize, j: usize) -> usize {
        self.pair(i, j)
    }

    fn im(&self, i: usize, j: usize) -> usize {
        self.pair(i, j) + 1
    }
}

/// svec slot of entry (i, j), `i ≤ j`, upper triangle column-major.
fn svidx(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}

fn svlen(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Adds the functional coefficients of `Re tr(C W)` into `out[param]`.
fn accumulate_functional(c: &DMatrix<Complex64>, cols: &BlockCols, sign: f64, out: &mut [f64]) {
    let m = cols.m;
    debug_assert_eq!(c.nrows(), m);
    for i in 0..m {
        out[cols.diag(i)] += sign * c[(i, i)].re;
    }
    for j in 0..m {
        for i in 0..j {
            out[cols.re(i, j)] += sign * 2.0 * c[(i, j)].re;
            out[cols.im(i, j)] += sign * 2.0 * c[(i, j)].im;
        }
    }
}

/// Scatters `coeff · svec(embed(C))` of a Hermitian `q×q` matrix `C` into
/// column `col`, as `A` entries (negated slack convention) at `row_base`.
fn push_embedded(
    c: &DMatrix<Complex64>,
    row_base: usize,
    col: usize,
    coeff: f64,
    trips: &mut Vec<(usize, usize, f64)>,
) {
    let q = c.nrows();
    let s2 = std::f64::consts::SQRT_2;
    // s = −(coeff · C) contribution ⇒ A entry = +coeff · svec-entry
    for j in 0..q {
        for i in 0..=j {
            let re = c[(i, j)].re;
            if re != 0.0 {
                let scale = if i == j { 1.0 } else { s2 };
                trips.push((row_base + svidx(i, j), col, coeff * scale * re));
                trips.push((row_base + svidx(q + i, q + j), col, coeff * scale * re));
            }
        }
    }
    // upper-right block of the embedding is −Im C; every slot is off-diagonal
    for j in 0..q {
        for i in 0..q {
            let im = c[(i, j)].im;
            if im != 0.0 {
                trips.push((row_base + svidx(i, q + j), col, coeff * s2 * (-im)));
            }
        }
    }
}

fn to_csc(m: usize, n: usize, trips: &mut Vec<(usize, usize, f64)>) -> CscMatrix<f64> {
    trips.sort_by_key(|&(r, c, _)| (c, r));
    let mut colptr = Vec::with_capacity(n + 1);
    let mut rowval = Vec::with_capacity(trips.len());
    let mut nzval = Vec::with_capacity(trips.len());
    colptr.push(0);
    let mut cur_col = 0usize;
    let mut idx = 0usize;
    while idx < trips.len() {
        let (r, c, mut v) = trips[idx];
        idx += 1;
        // merge duplicates
        while idx < trips.len() && trips[idx].0 == r && trips[idx].1 == c {
            v += trips[idx].2;
            idx += 1;
        }
        while cur_col < c {
            colptr.push(rowval.len());
            cur_col += 1;
        }
        rowval.push(r);
        nzval.push(v);
    }
    while cur_col < n {
        colptr.push(rowval.len());
        cur_col += 1;
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}

/// Principal eigenpair of a Hermitian PSD matrix: `(λ₁, u₁, λ₂/λ₁)`.
pub fn principal_eigenpair(w: &DMatrix<Complex64>) -> (f64, DVector<Complex64>, f64) {
    let eig = w.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let l1 = eig.eigenvalues[order[0]].max(0.0);
    let l2 = if order.len() > 1 {
        eig.eigenvalues[order[1]].max(0.0)
    } else {
        0.0
    };
    let u1 = eig.eigenvectors.column(order[0]).into_owned();
    let ratio = if l1 > 0.0 { l2 / l1 } else { 0.0 };
    (l1, u1, ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steering(n: usize, phase_step: f64) -> DVector<Complex64> {
        DVector::from_fn(n, |m, _| Complex64::from_polar(1.0, phase_step * m as f64))
    }

    #[test]
    fn minimum_trace_with_quadratic_floor() {
        // min tr W s.t. a^H W a ≥ 1 has optimum 1/‖a‖² at W = aa^H/‖a‖⁴
        let a = steering(4, 1.3);
        let mut p = ConicProblem::new(vec![4], 0);
        let outer = &a * a.adjoint();
        p.maximize(
            LinExpr::constant(0.0).block(0, -DMatrix::identity(4, 4).map(|x: f64| Complex64::new(x, 0.0))),
        );
        p.require_nonneg(LinExpr::constant(-1.0).block(0, outer.clone()));
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let tr = sol.blocks[0].trace().re;
        assert!((tr - 0.25).abs() < 1e-6, "tr = {tr}");
        // solution matches the rank-one optimizer entry-wise
        let want = &outer / Complex64::new(16.0, 0.0);
        assert!((&sol.blocks[0] - &want).norm() < 1e-5);
    }

    #[test]
    fn log_hypograph_reaches_bound() {
        // max t s.t. t ≤ log2(tr W), tr W ≤ 8 → t = 3
        let eye = DMatrix::<f64>::identity(3, 3).map(|x| Complex64::new(x, 0.0));
        let mut p = ConicProblem::new(vec![3], 1);
        p.maximize(LinExpr::constant(0.0).scalar(0, 1.0));
        p.require_log2_hypograph(0, LinExpr::constant(0.0).block(0, eye.clone()));
        p.require_nonneg(LinExpr::constant(8.0).block(0, -eye));
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.scalars[0] - 3.0).abs() < 1e-6);
        assert!((sol.objective - 3.0).abs() < 1e-6);
    }

    #[test]
    fn shifted_psd_drives_subspace_energy_to_shift() {
        // max a^H W a − 4 r  s.t. tr W ≤ 1, r ≥ 0, r I − V^H W V ⪰ 0,
        // with V ⊥ a: optimum puts everything on a, r = 0.
        let a = DVector::from_column_slice(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ]) / Complex64::new(2f64.sqrt(), 0.0);
        let v = DVector::from_column_slice(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ]) / Complex64::new(2f64.sqrt(), 0.0);
        assert!(a.dotc(&v).norm() < 1e-12);
        let eye = DMatrix::<f64>::identity(2, 2).map(|x| Complex64::new(x, 0.0));
        let mut p = ConicProblem::new(vec![2], 1);
        p.maximize(
            LinExpr::constant(0.0)
                .block(0, &a * a.adjoint())
                .scalar(0, -4.0),
        );
        p.require_nonneg(LinExpr::constant(1.0).block(0, -eye));
        p.require_scalar_nonneg(0);
        p.require_shifted_psd(0, DMatrix::from_columns(&[v.clone()]), 0);
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-5, "obj = {}", sol.objective);
        assert!(sol.scalars[0].abs() < 1e-5);
        // subspace energy is bounded by the (near-zero) shift
        let vwv = (v.adjoint() * &sol.blocks[0] * &v)[(0, 0)].re;
        assert!(vwv <= sol.scalars[0] + 1e-6);
    }

    #[test]
    fn shifted_psd_ceiling_binds_from_above() {
        // forcing a^H W a ≥ 0.9 with V = a makes r track that energy
        let a = steering(3, 0.7);
        let unit = &a / Complex64::new(a.norm(), 0.0);
        let eye = DMatrix::<f64>::identity(3, 3).map(|x| Complex64::new(x, 0.0));
        let mut p = ConicProblem::new(vec![3], 1);
        p.maximize(LinExpr::constant(0.0).scalar(0, -1.0));
        p.require_nonneg(LinExpr::constant(1.0).block(0, -eye));
        p.require_nonneg(LinExpr::constant(-0.9).block(0, &unit * unit.adjoint()));
        p.require_scalar_nonneg(0);
        p.require_shifted_psd(0, DMatrix::from_columns(&[unit.clone()]), 0);
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.scalars[0] - 0.9).abs() < 1e-5, "r = {}", sol.scalars[0]);
    }

    #[test]
    fn infeasible_power_budget_detected() {
        // tr W ≤ 1 but a^H W a ≥ 2‖a‖² is impossible
        let a = steering(3, 0.4);
        let eye = DMatrix::<f64>::identity(3, 3).map(|x| Complex64::new(x, 0.0));
        let mut p = ConicProblem::new(vec![3], 0);
        p.maximize(LinExpr::constant(0.0));
        p.require_nonneg(LinExpr::constant(1.0).block(0, -eye));
        p.require_nonneg(LinExpr::constant(-2.0 * a.norm_squared()).block(0, &a * a.adjoint()));
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Infeasible);
    }

    #[test]
    fn two_blocks_share_a_budget() {
        // max tr(A W₀) + tr(B W₁) s.t. tr W₀ + tr W₁ ≤ 1: all power goes to
        // the larger top eigenvalue (3 vs 2) → objective 3
        let a_q = DMatrix::from_diagonal(&DVector::from_column_slice(&[3.0, 1.0]))
            .map(|x: f64| Complex64::new(x, 0.0));
        let b_q = DMatrix::from_diagonal(&DVector::from_column_slice(&[2.0, 0.5]))
            .map(|x: f64| Complex64::new(x, 0.0));
        let eye = DMatrix::<f64>::identity(2, 2).map(|x| Complex64::new(x, 0.0));
        let mut p = ConicProblem::new(vec![2, 2], 0);
        p.maximize(LinExpr::constant(0.0).block(0, a_q).block(1, b_q));
        p.require_nonneg(
            LinExpr::constant(1.0)
                .block(0, -eye.clone())
                .block(1, -eye),
        );
        let sol = p.solve();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-6);
        assert!(sol.blocks[1].trace().re < 1e-6);
    }

    #[test]
    fn principal_eigenpair_of_rank_one() {
        let a = steering(5, 0.9);
        let w = &a * a.adjoint() * Complex64::new(2.0, 0.0);
        let (l1, u1, ratio) = principal_eigenpair(&w);
        assert!((l1 - 10.0).abs() < 1e-9); // 2‖a‖² = 10
        assert!(ratio < 1e-12);
        // u₁ spans a: |⟨u₁, a⟩|² = ‖a‖²
        assert!((u1.dotc(&a).norm_sqr() - a.norm_squared()).abs() < 1e-9);
    }
}
