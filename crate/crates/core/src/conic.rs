//! Backend-agnostic conic program construction and solution.
//!
//! A [`ConicProgram`] holds real scalar/vector variables, a linear objective,
//! and constraints drawn from four families: linear inequalities,
//! second-order cones `‖lhs‖₂ ≤ rhs`, exponential bounds `z ≥ 2^q`, and
//! (optionally) positive-semidefinite matrices of affine expressions.
//! Programs are solved with an interior-point backend selected through the
//! `NOMA_GEE_BACKEND` environment variable; `clarabel` is the default and
//! currently the only backend compiled in.

use std::collections::HashSet;
use std::fmt::Write as _;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConicError {
    #[error("duplicate variable name: {0}")]
    DuplicateName(String),
    #[error("variable dimension must be >= 1")]
    ZeroDimension,
    #[error("expression references an unregistered variable")]
    UnknownVariable,
    #[error("PSD matrix must be square")]
    NonSquare,
    #[error("unknown backend: {0}")]
    UnknownBackend(String),
}

/// Handle to a registered (possibly vector-valued) variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarHandle {
    index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstraintId(usize);

/// Sparse affine expression over the flattened scalar variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffExpr {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl AffExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(i, v)| (i, v * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(&self, other: &AffExpr) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().copied());
        out.constant += other.constant;
        out
    }

    pub fn minus(&self, other: &AffExpr) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// Merge duplicate columns and drop zero coefficients.
    fn canonical(&self) -> Self {
        let mut terms = self.terms.clone();
        terms.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (i, v) in terms {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        Self {
            terms: merged,
            constant: self.constant,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, v)| v * x[i]).sum::<f64>()
    }

    fn max_col(&self) -> Option<usize> {
        self.terms.iter().map(|&(i, _)| i).max()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
enum Constraint {
    /// expr ≥ 0
    LinearGe(AffExpr),
    /// ‖lhs‖₂ ≤ rhs
    Soc { rhs: AffExpr, lhs: Vec<AffExpr> },
    /// z ≥ 2^q
    ExpBound { z: AffExpr, q: AffExpr },
    /// symmetric matrix of affine entries ⪰ 0
    Psd { mat: Vec<Vec<AffExpr>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatusKind {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatusKind,
    /// Objective value in the program's own sense (includes any constant).
    pub objective_value: f64,
    /// Flattened variable values, present iff the status is optimal.
    /// Read per-variable slices through [`ConicProgram::read`].
    pub variable_values: Option<Vec<f64>>,
    pub solver_iterations: u32,
}

struct VarInfo {
    name: String,
    offset: usize,
    dim: usize,
}

/// Single-writer program under construction; solving borrows it immutably,
/// so distinct programs may be built and solved concurrently.
pub struct ConicProgram {
    vars: Vec<VarInfo>,
    names: HashSet<String>,
    total: usize,
    objective: AffExpr,
    sense: Sense,
    constraints: Vec<Constraint>,
}

impl Default for ConicProgram {
    fn default() -> Self {
        Self::new()
    }
}

impl ConicProgram {
    pub fn new() -> Self {
        Self {
            vars: Vec::new(),
            names: HashSet::new(),
            total: 0,
            objective: AffExpr::default(),
            sense: Sense::Minimize,
            constraints: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, name: &str, dim: usize) -> Result<VarHandle, ConicError> {
        if dim == 0 {
            return Err(ConicError::ZeroDimension);
        }
        if !self.names.insert(name.to_string()) {
            return Err(ConicError::DuplicateName(name.to_string()));
        }
        let offset = self.total;
        self.vars.push(VarInfo {
            name: name.to_string(),
            offset,
            dim,
        });
        self.total += dim;
        Ok(VarHandle {
            index: self.vars.len() - 1,
        })
    }

    pub fn num_scalar_variables(&self) -> usize {
        self.total
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn dim_of(&self, handle: VarHandle) -> usize {
        self.vars[handle.index].dim
    }

    /// Affine expression selecting one scalar coordinate of a variable.
    pub fn var(&self, handle: VarHandle, coord: usize) -> AffExpr {
        let info = &self.vars[handle.index];
        assert!(coord < info.dim, "coordinate out of range");
        AffExpr {
            terms: vec![(info.offset + coord, 1.0)],
            constant: 0.0,
        }
    }

    pub fn set_objective(&mut self, expr: AffExpr, sense: Sense) {
        self.objective = expr;
        self.sense = sense;
    }

    fn check_expr(&self, expr: &AffExpr) -> Result<(), ConicError> {
        match expr.max_col() {
            Some(c) if c >= self.total => Err(ConicError::UnknownVariable),
            _ => Ok(()),
        }
    }

    /// Register `expr ≥ 0`.
    pub fn add_linear_ge(&mut self, expr: AffExpr) -> Result<ConstraintId, ConicError> {
        self.check_expr(&expr)?;
        self.constraints.push(Constraint::LinearGe(expr));
        Ok(ConstraintId(self.constraints.len() - 1))
    }

    /// Register `lhs ≥ rhs`.
    pub fn add_ge(&mut self, lhs: AffExpr, rhs: AffExpr) -> Result<ConstraintId, ConicError> {
        self.add_linear_ge(lhs.minus(&rhs))
    }

    /// Register `‖lhs‖₂ ≤ rhs`.
    pub fn add_soc(
        &mut self,
        rhs: AffExpr,
        lhs: Vec<AffExpr>,
    ) -> Result<ConstraintId, ConicError> {
        self.check_expr(&rhs)?;
        for e in &lhs {
            self.check_expr(e)?;
        }
        self.constraints.push(Constraint::Soc { rhs, lhs });
        Ok(ConstraintId(self.constraints.len() - 1))
    }

    /// Register `z ≥ 2^q` through the backend's exponential cone.
    pub fn add_exp_bound(
        &mut self,
        z: AffExpr,
        q: AffExpr,
    ) -> Result<ConstraintId, ConicError> {
        self.check_expr(&z)?;
        self.check_expr(&q)?;
        self.constraints.push(Constraint::ExpBound { z, q });
        Ok(ConstraintId(self.constraints.len() - 1))
    }

    /// Register a positive-semidefinite constraint on a square matrix of
    /// affine entries. The matrix is symmetrized: entry (i, j) is taken as
    /// the average of the (i, j) and (j, i) inputs.
    pub fn add_psd(&mut self, mat: Vec<Vec<AffExpr>>) -> Result<ConstraintId, ConicError> {
        let d = mat.len();
        if d == 0 || mat.iter().any(|row| row.len() != d) {
            return Err(ConicError::NonSquare);
        }
        for row in &mat {
            for e in row {
                self.check_expr(e)?;
            }
        }
        let mut sym = vec![vec![AffExpr::default(); d]; d];
        for i in 0..d {
            for j in 0..d {
                sym[i][j] = mat[i][j].plus(&mat[j][i]).scaled(0.5);
            }
        }
        self.constraints.push(Constraint::Psd { mat: sym });
        Ok(ConstraintId(self.constraints.len() - 1))
    }

    /// Slice of a solution vector corresponding to one variable.
    pub fn read<'a>(&self, handle: VarHandle, x: &'a [f64]) -> &'a [f64] {
        let info = &self.vars[handle.index];
        &x[info.offset..info.offset + info.dim]
    }

    /// Offset of a variable within the flattened scalar layout.
    pub fn offset_of(&self, handle: VarHandle) -> usize {
        self.vars[handle.index].offset
    }

    /// Maximum constraint violation of a candidate point, by direct
    /// arithmetic outside any solver.
    pub fn check_point(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for con in &self.constraints {
            let v = match con {
                Constraint::LinearGe(e) => -e.eval(x),
                Constraint::Soc { rhs, lhs } => {
                    let norm = lhs.iter().map(|e| e.eval(x).powi(2)).sum::<f64>().sqrt();
                    norm - rhs.eval(x)
                }
                Constraint::ExpBound { z, q } => 2f64.powf(q.eval(x)) - z.eval(x),
                Constraint::Psd { mat } => {
                    let d = mat.len();
                    let m = nalgebra::DMatrix::from_fn(d, d, |i, j| mat[i][j].eval(x));
                    let eig = nalgebra::SymmetricEigen::new(m);
                    -eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
                }
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Human-readable listing of variables, objective, and constraints.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let _ = writeln!(s, "{} {}", sense, self.render(&self.objective));
        let _ = write!(s, "vars:");
        for v in &self.vars {
            let _ = write!(s, " {}({})", v.name, v.dim);
        }
        s.push('\n');
        for (idx, con) in self.constraints.iter().enumerate() {
            match con {
                Constraint::LinearGe(e) => {
                    let _ = writeln!(s, "c{idx} linear: {} >= 0", self.render(e));
                }
                Constraint::Soc { rhs, lhs } => {
                    let body = lhs
                        .iter()
                        .map(|e| self.render(e))
                        .collect::<Vec<_>>()
                        .join("; ");
                    let _ = writeln!(s, "c{idx} soc: ||[{}]|| <= {}", body, self.render(rhs));
                }
                Constraint::ExpBound { z, q } => {
                    let _ = writeln!(
                        s,
                        "c{idx} exp: {} >= 2^({})",
                        self.render(z),
                        self.render(q)
                    );
                }
                Constraint::Psd { mat } => {
                    let _ = writeln!(s, "c{idx} psd: dim {}", mat.len());
                }
            }
        }
        s
    }

    fn render(&self, expr: &AffExpr) -> String {
        let e = expr.canonical();
        let mut parts = Vec::new();
        if e.constant != 0.0 || e.terms.is_empty() {
            parts.push(format!("{:.6}", e.constant));
        }
        for (col, coeff) in &e.terms {
            let info = self
                .vars
                .iter()
                .rev()
                .find(|v| v.offset <= *col && *col < v.offset + v.dim)
                .expect("column belongs to a registered variable");
            let name = if info.dim == 1 {
                info.name.clone()
            } else {
                format!("{}[{}]", info.name, col - info.offset)
            };
            parts.push(format!("{coeff:+.6}*{name}"));
        }
        parts.join(" ")
    }

    pub fn solve(&self) -> SolveResult {
        match backend_from_env() {
            Ok(Backend::Clarabel) => self.solve_clarabel(),
            Err(e) => SolveResult {
                status: SolveStatusKind::NumericalFailure,
                objective_value: f64::NAN,
                variable_values: None,
                solver_iterations: 0,
            }
            .tap_warn(e),
        }
    }

    fn solve_clarabel(&self) -> SolveResult {
        let n = self.total;
        if n == 0 {
            return SolveResult {
                status: SolveStatusKind::Optimal,
                objective_value: self.objective.constant,
                variable_values: Some(Vec::new()),
                solver_iterations: 0,
            };
        }

        // Clarabel form: min qᵀx  s.t.  Ax + s = b, s ∈ K.
        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut cones: Vec<SupportedConeT<f64>> = Vec::new();
        let mut row = 0usize;
        let mut push_row = |triplets: &mut Vec<(usize, usize, f64)>,
                            b: &mut Vec<f64>,
                            row: &mut usize,
                            expr: &AffExpr,
                            scale: f64| {
            // s_row = scale·expr(x): A entries −scale·coeff, b = scale·const
            let e = expr.canonical();
            for (col, coeff) in &e.terms {
                triplets.push((*row, *col, -scale * coeff));
            }
            b.push(scale * e.constant);
            *row += 1;
        };

        // Linear rows first, as one nonnegative cone block.
        let mut linear_rows = 0usize;
        for con in &self.constraints {
            if let Constraint::LinearGe(e) = con {
                push_row(&mut triplets, &mut b, &mut row, e, 1.0);
                linear_rows += 1;
            }
        }
        if self.constraints.is_empty() {
            // keep the backend happy with a vacuous 1 ≥ 0 row
            push_row(&mut triplets, &mut b, &mut row, &AffExpr::constant(1.0), 1.0);
            linear_rows += 1;
        }
        if linear_rows > 0 {
            cones.push(SupportedConeT::NonnegativeConeT(linear_rows));
        }
        for con in &self.constraints {
            match con {
                Constraint::LinearGe(_) => {}
                Constraint::Soc { rhs, lhs } => {
                    push_row(&mut triplets, &mut b, &mut row, rhs, 1.0);
                    for e in lhs {
                        push_row(&mut triplets, &mut b, &mut row, e, 1.0);
                    }
                    cones.push(SupportedConeT::SecondOrderConeT(lhs.len() + 1));
                }
                Constraint::ExpBound { z, q } => {
                    // z ≥ 2^q  ⇔  (q·ln2, 1, z) ∈ K_exp
                    push_row(&mut triplets, &mut b, &mut row, q, std::f64::consts::LN_2);
                    push_row(&mut triplets, &mut b, &mut row, &AffExpr::constant(1.0), 1.0);
                    push_row(&mut triplets, &mut b, &mut row, z, 1.0);
                    cones.push(SupportedConeT::ExponentialConeT());
                }
                Constraint::Psd { mat } => {
                    // svec: upper triangle stacked column-wise, off-diagonal
                    // entries scaled by √2
                    let d = mat.len();
                    let rt2 = std::f64::consts::SQRT_2;
                    for c in 0..d {
                        for r in 0..=c {
                            let scale = if r == c { 1.0 } else { rt2 };
                            push_row(&mut triplets, &mut b, &mut row, &mat[r][c], scale);
                        }
                    }
                    cones.push(SupportedConeT::PSDTriangleConeT(d));
                }
            }
        }

        let m = row;
        let a = csc_from_triplets(m, n, &mut triplets);
        let p = CscMatrix::<f64>::zeros((n, n));
        let obj = self.objective.canonical();
        let mut q = vec![0.0; n];
        let obj_sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        for (col, coeff) in &obj.terms {
            q[*col] += obj_sign * coeff;
        }

        let settings = match DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(200)
            .build()
        {
            Ok(s) => s,
            Err(_) => {
                return SolveResult {
                    status: SolveStatusKind::NumericalFailure,
                    objective_value: f64::NAN,
                    variable_values: None,
                    solver_iterations: 0,
                }
            }
        };
        let mut solver = match DefaultSolver::new(&p, &q, &a, &b, &cones, settings) {
            Ok(s) => s,
            Err(_) => {
                return SolveResult {
                    status: SolveStatusKind::NumericalFailure,
                    objective_value: f64::NAN,
                    variable_values: None,
                    solver_iterations: 0,
                }
            }
        };
        solver.solve();
        let sol = solver.solution;
        let status = match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatusKind::Optimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveStatusKind::Infeasible
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                SolveStatusKind::Unbounded
            }
            SolverStatus::MaxIterations | SolverStatus::MaxTime => SolveStatusKind::IterationLimit,
            _ => SolveStatusKind::NumericalFailure,
        };
        if status == SolveStatusKind::Optimal {
            let objective_value = self.objective.eval(&sol.x);
            SolveResult {
                status,
                objective_value,
                variable_values: Some(sol.x),
                solver_iterations: sol.iterations,
            }
        } else {
            SolveResult {
                status,
                objective_value: f64::NAN,
                variable_values: None,
                solver_iterations: sol.iterations,
            }
        }
    }
}

impl SolveResult {
    fn tap_warn(self, err: ConicError) -> Self {
        eprintln!("conic backend error: {err}");
        self
    }
}

enum Backend {
    Clarabel,
}

fn backend_from_env() -> Result<Backend, ConicError> {
    match std::env::var("NOMA_GEE_BACKEND") {
        Ok(name) => match name.to_ascii_lowercase().as_str() {
            "clarabel" | "" => Ok(Backend::Clarabel),
            other => Err(ConicError::UnknownBackend(other.to_string())),
        },
        Err(_) => Ok(Backend::Clarabel),
    }
}

fn csc_from_triplets(m: usize, n: usize, triplets: &mut Vec<(usize, usize, f64)>) -> CscMatrix<f64> {
    triplets.sort_by_key(|&(r, c, _)| (c, r));
    let mut colptr = Vec::with_capacity(n + 1);
    let mut rowval = Vec::with_capacity(triplets.len());
    let mut nzval = Vec::with_capacity(triplets.len());
    let mut idx = 0usize;
    colptr.push(0);
    for col in 0..n {
        while idx < triplets.len() && triplets[idx].1 == col {
            let (r, _, v) = triplets[idx];
            if let (Some(&last_r), true) = (rowval.last(), nzval.len() > *colptr.last().unwrap()) {
                if last_r == r {
                    let slot = nzval.len() - 1;
                    nzval[slot] += v;
                    idx += 1;
                    continue;
                }
            }
            rowval.push(r);
            nzval.push(v);
            idx += 1;
        }
        colptr.push(rowval.len());
    }
    CscMatrix::new(m, n, colptr, rowval, nzval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn variable_registration() {
        let mut p = ConicProgram::new();
        let a = p.add_variable("alpha", 1).unwrap();
        assert_eq!(p.dim_of(a), 1);
        let w = p.add_variable("w_1", 6).unwrap();
        assert_eq!(p.dim_of(w), 6);
        assert!(matches!(
            p.add_variable("alpha", 1),
            Err(ConicError::DuplicateName(_))
        ));
        assert_eq!(p.num_scalar_variables(), 7);
    }

    #[test]
    fn soc_fixed_vector_norm() {
        // minimize t s.t. ||(3,4)|| <= t → 5
        let mut p = ConicProgram::new();
        let t = p.add_variable("t", 1).unwrap();
        p.set_objective(p.var(t, 0), Sense::Minimize);
        p.add_soc(
            p.var(t, 0),
            vec![AffExpr::constant(3.0), AffExpr::constant(4.0)],
        )
        .unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert_relative_eq!(res.objective_value, 5.0, max_relative = 1e-7);
    }

    #[test]
    fn soc_with_bounded_coordinate() {
        // minimize t s.t. ||(x, 1)|| <= t, x >= 2 → √5
        let mut p = ConicProgram::new();
        let t = p.add_variable("t", 1).unwrap();
        let x = p.add_variable("x", 1).unwrap();
        p.set_objective(p.var(t, 0), Sense::Minimize);
        p.add_soc(p.var(t, 0), vec![p.var(x, 0), AffExpr::constant(1.0)])
            .unwrap();
        p.add_linear_ge(p.var(x, 0).add_constant(-2.0)).unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert_relative_eq!(res.objective_value, 5f64.sqrt(), max_relative = 1e-7);
    }

    #[test]
    fn soc_negative_rhs_is_infeasible() {
        let mut p = ConicProgram::new();
        let t = p.add_variable("t", 1).unwrap();
        p.set_objective(p.var(t, 0), Sense::Minimize);
        p.add_soc(p.var(t, 0), vec![AffExpr::constant(1.0)]).unwrap();
        // force t <= -1
        p.add_linear_ge(p.var(t, 0).scaled(-1.0).add_constant(-1.0))
            .unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Infeasible);
        assert!(res.variable_values.is_none());
    }

    #[test]
    fn exp_bounds() {
        // minimize z s.t. z >= 2^1 → 2
        let mut p = ConicProgram::new();
        let z = p.add_variable("z", 1).unwrap();
        p.set_objective(p.var(z, 0), Sense::Minimize);
        p.add_exp_bound(p.var(z, 0), AffExpr::constant(1.0)).unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert_relative_eq!(res.objective_value, 2.0, max_relative = 1e-6);

        // minimize z s.t. z >= 2^0 → 1
        let mut p = ConicProgram::new();
        let z = p.add_variable("z", 1).unwrap();
        p.set_objective(p.var(z, 0), Sense::Minimize);
        p.add_exp_bound(p.var(z, 0), AffExpr::constant(0.0)).unwrap();
        assert_relative_eq!(p.solve().objective_value, 1.0, max_relative = 1e-6);

        // maximize q s.t. 2^q <= 8 → 3
        let mut p = ConicProgram::new();
        let q = p.add_variable("q", 1).unwrap();
        p.set_objective(p.var(q, 0), Sense::Maximize);
        p.add_exp_bound(AffExpr::constant(8.0), p.var(q, 0)).unwrap();
        assert_relative_eq!(p.solve().objective_value, 3.0, max_relative = 1e-6);
    }

    #[test]
    fn psd_scalar_and_diag() {
        // minimize x s.t. [x] ⪰ 0 → 0
        let mut p = ConicProgram::new();
        let x = p.add_variable("x", 1).unwrap();
        p.set_objective(p.var(x, 0), Sense::Minimize);
        p.add_psd(vec![vec![p.var(x, 0)]]).unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert!(res.objective_value.abs() < 1e-7);

        // diag(x, 1-x) ⪰ 0 feasible iff 0 <= x <= 1
        for (sense, expected) in [(Sense::Maximize, 1.0), (Sense::Minimize, 0.0)] {
            let mut p = ConicProgram::new();
            let x = p.add_variable("x", 1).unwrap();
            p.set_objective(p.var(x, 0), sense);
            p.add_psd(vec![
                vec![p.var(x, 0), AffExpr::constant(0.0)],
                vec![
                    AffExpr::constant(0.0),
                    p.var(x, 0).scaled(-1.0).add_constant(1.0),
                ],
            ])
            .unwrap();
            let res = p.solve();
            assert_eq!(res.status, SolveStatusKind::Optimal);
            assert_relative_eq!(res.objective_value, expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn psd_off_diagonal() {
        // maximize y s.t. [[1, y],[y, 1]] ⪰ 0 → 1
        let mut p = ConicProgram::new();
        let y = p.add_variable("y", 1).unwrap();
        p.set_objective(p.var(y, 0), Sense::Maximize);
        p.add_psd(vec![
            vec![AffExpr::constant(1.0), p.var(y, 0)],
            vec![p.var(y, 0), AffExpr::constant(1.0)],
        ])
        .unwrap();
        let res = p.solve();
        assert_relative_eq!(res.objective_value, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn psd_rejects_non_square() {
        let mut p = ConicProgram::new();
        let x = p.add_variable("x", 1).unwrap();
        let bad = vec![vec![p.var(x, 0)], vec![p.var(x, 0)]];
        assert!(matches!(p.add_psd(bad), Err(ConicError::NonSquare)));
    }

    #[test]
    fn empty_program_and_plain_bounds() {
        let p = ConicProgram::new();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert_eq!(res.objective_value, 0.0);

        // maximize x s.t. x <= 1 → 1
        let mut p = ConicProgram::new();
        let x = p.add_variable("x", 1).unwrap();
        p.set_objective(p.var(x, 0), Sense::Maximize);
        p.add_linear_ge(p.var(x, 0).scaled(-1.0).add_constant(1.0))
            .unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        assert_relative_eq!(res.objective_value, 1.0, max_relative = 1e-8);

        // maximize x with no constraints → unbounded
        let mut p = ConicProgram::new();
        let x = p.add_variable("x", 1).unwrap();
        p.set_objective(p.var(x, 0), Sense::Maximize);
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Unbounded);
    }

    #[test]
    fn solution_satisfies_constraints_when_rechecked() {
        let mut p = ConicProgram::new();
        let t = p.add_variable("t", 1).unwrap();
        let x = p.add_variable("x", 2).unwrap();
        p.set_objective(p.var(t, 0), Sense::Minimize);
        p.add_soc(p.var(t, 0), vec![p.var(x, 0), p.var(x, 1)]).unwrap();
        p.add_linear_ge(p.var(x, 0).add_constant(-1.0)).unwrap();
        p.add_linear_ge(p.var(x, 1).add_constant(-2.0)).unwrap();
        p.add_exp_bound(p.var(t, 0).add_constant(10.0), p.var(x, 1))
            .unwrap();
        let res = p.solve();
        assert_eq!(res.status, SolveStatusKind::Optimal);
        let x_vals = res.variable_values.unwrap();
        assert!(p.check_point(&x_vals) <= 1e-6);
    }

    #[test]
    fn construction_order_does_not_change_optimum() {
        // Three insertion orders of the same program agree within 1e-8.
        let build = |order: [usize; 3]| {
            let mut p = ConicProgram::new();
            let t = p.add_variable("t", 1).unwrap();
            let x = p.add_variable("x", 1).unwrap();
            p.set_objective(p.var(t, 0).plus(&p.var(x, 0)), Sense::Minimize);
            for step in order {
                match step {
                    0 => {
                        p.add_soc(p.var(t, 0), vec![p.var(x, 0), AffExpr::constant(1.0)])
                            .unwrap();
                    }
                    1 => {
                        p.add_linear_ge(p.var(x, 0).add_constant(-1.5)).unwrap();
                    }
                    _ => {
                        p.add_exp_bound(p.var(t, 0).scaled(4.0), p.var(x, 0)).unwrap();
                    }
                }
            }
            p.solve().objective_value
        };
        let a = build([0, 1, 2]);
        let b = build([2, 1, 0]);
        let c = build([1, 2, 0]);
        assert_relative_eq!(a, b, epsilon = 1e-8);
        assert_relative_eq!(a, c, epsilon = 1e-8);
    }

    #[test]
    fn dump_lists_all_pieces() {
        let mut p = ConicProgram::new();
        let t = p.add_variable("t", 1).unwrap();
        let w = p.add_variable("w", 2).unwrap();
        p.set_objective(p.var(t, 0), Sense::Maximize);
        p.add_linear_ge(p.var(w, 1).add_constant(1.0)).unwrap();
        p.add_soc(p.var(t, 0), vec![p.var(w, 0)]).unwrap();
        p.add_exp_bound(p.var(t, 0), p.var(w, 1)).unwrap();
        let text = p.dump();
        assert!(text.contains("maximize"));
        assert!(text.contains("t(1)"));
        assert!(text.contains("w(2)"));
        assert!(text.contains("c0 linear"));
        assert!(text.contains("c1 soc"));
        assert!(text.contains("c2 exp"));
    }

    #[test]
    fn rejects_foreign_expressions() {
        let mut other = ConicProgram::new();
        let y = other.add_variable("y", 3).unwrap();
        let foreign = other.var(y, 2);
        let mut p = ConicProgram::new();
        let _x = p.add_variable("x", 1).unwrap();
        assert!(matches!(
            p.add_linear_ge(foreign),
            Err(ConicError::UnknownVariable)
        ));
    }
}
