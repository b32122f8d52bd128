//! Block-structured conic programs with Hermitian PSD variables.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::embed;
use crate::ipm::{self, Settings, StandardForm, Status};
use crate::SolveError;

/// Kind of a variable block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// One unconstrained real scalar.
    Free,
    /// One nonnegative real scalar.
    Nonneg,
    /// A real vector `(t, x)` with `t ≥ ‖x‖`.
    Soc(usize),
    /// A complex Hermitian PSD matrix of the given order.
    Psd(usize),
}

impl BlockKind {
    fn len(&self) -> usize {
        match *self {
            BlockKind::Free | BlockKind::Nonneg => 1,
            BlockKind::Soc(d) => d,
            BlockKind::Psd(d) => d * d,
        }
    }
}

/// A named variable block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarBlock {
    pub name: String,
    pub kind: BlockKind,
}

/// One term of a linear expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Term {
    /// `coef · x[index]` for a scalar or SOC block.
    Scalar { block: usize, index: usize, coef: f64 },
    /// `Tr(coef · X)` for a PSD block; `coef` must be Hermitian.
    Trace { block: usize, coef: DMatrix<Complex64> },
}

/// Affine real expression over the blocks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinExpr {
    pub constant: f64,
    pub terms: Vec<Term>,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        LinExpr { constant: c, terms: Vec::new() }
    }

    /// `coef · x` for a scalar block.
    pub fn var(block: usize, coef: f64) -> Self {
        LinExpr::constant(0.0).scalar(block, 0, coef)
    }

    pub fn scalar(mut self, block: usize, index: usize, coef: f64) -> Self {
        self.terms.push(Term::Scalar { block, index, coef });
        self
    }

    /// Adds `Re Tr(C X)`; `C` may be any square matrix and is replaced by its
    /// Hermitian part, which yields the same real functional.
    pub fn re_trace(mut self, block: usize, c: &DMatrix<Complex64>) -> Self {
        let herm = (c + c.adjoint()) * Complex64::new(0.5, 0.0);
        self.terms.push(Term::Trace { block, coef: herm });
        self
    }

    /// Adds `Im Tr(C X)`.
    pub fn im_trace(self, block: usize, c: &DMatrix<Complex64>) -> Self {
        self.re_trace(block, &(c * Complex64::new(0.0, -1.0)))
    }

    pub fn add_const(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    /// `self + scale · other`.
    pub fn plus(mut self, other: &LinExpr, scale: f64) -> Self {
        self.constant += scale * other.constant;
        for t in &other.terms {
            self.terms.push(match t {
                Term::Scalar { block, index, coef } => Term::Scalar { block: *block, index: *index, coef: coef * scale },
                Term::Trace { block, coef } => Term::Trace { block: *block, coef: coef * Complex64::new(scale, 0.0) },
            });
        }
        self
    }

    pub fn scaled(self, scale: f64) -> Self {
        LinExpr::constant(0.0).plus(&self, scale)
    }

    /// Value of the expression at the given block values.
    pub fn eval(&self, values: &[BlockValue]) -> f64 {
        let mut v = self.constant;
        for t in &self.terms {
            match t {
                Term::Scalar { block, index, coef } => {
                    v += coef
                        * match &values[*block] {
                            BlockValue::Scalar(x) => *x,
                            BlockValue::Vector(x) => x[*index],
                            BlockValue::Hermitian(_) => f64::NAN,
                        }
                }
                Term::Trace { block, coef } => {
                    if let BlockValue::Hermitian(x) = &values[*block] {
                        v += (coef * x).trace().re;
                    } else {
                        v = f64::NAN;
                    }
                }
            }
        }
        v
    }
}

/// A named constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Constraint {
    /// `expr = 0`.
    Eq { name: String, expr: LinExpr },
    /// `expr ≥ 0`.
    Ineq { name: String, expr: LinExpr },
    /// `exprs[0] ≥ ‖exprs[1..]‖`.
    Soc { name: String, exprs: Vec<LinExpr> },
}

impl Constraint {
    pub fn name(&self) -> &str {
        match self {
            Constraint::Eq { name, .. } | Constraint::Ineq { name, .. } | Constraint::Soc { name, .. } => name,
        }
    }

    fn exprs(&self) -> Vec<&LinExpr> {
        match self {
            Constraint::Eq { expr, .. } | Constraint::Ineq { expr, .. } => vec![expr],
            Constraint::Soc { exprs, .. } => exprs.iter().collect(),
        }
    }

    /// Nonnegative amount by which the constraint is violated.
    pub fn violation(&self, values: &[BlockValue]) -> f64 {
        match self {
            Constraint::Eq { expr, .. } => expr.eval(values).abs(),
            Constraint::Ineq { expr, .. } => (-expr.eval(values)).max(0.0),
            Constraint::Soc { exprs, .. } => {
                let t = exprs[0].eval(values);
                let r = exprs[1..].iter().map(|e| e.eval(values).powi(2)).sum::<f64>().sqrt();
                (r - t).max(0.0)
            }
        }
    }
}

/// Maximize `objective` subject to `constraints` over `blocks`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub blocks: Vec<VarBlock>,
    pub objective: LinExpr,
    pub constraints: Vec<Constraint>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a block and returns its index.
    pub fn add_block(&mut self, name: &str, kind: BlockKind) -> usize {
        self.blocks.push(VarBlock { name: name.to_string(), kind });
        self.blocks.len() - 1
    }

    pub fn add_eq(&mut self, name: &str, expr: LinExpr) {
        self.constraints.push(Constraint::Eq { name: name.to_string(), expr });
    }

    /// `expr ≥ 0`.
    pub fn add_ge(&mut self, name: &str, expr: LinExpr) {
        self.constraints.push(Constraint::Ineq { name: name.to_string(), expr });
    }

    /// `head ≥ ‖tail‖`.
    pub fn add_soc(&mut self, name: &str, head: LinExpr, tail: Vec<LinExpr>) {
        let mut exprs = vec![head];
        exprs.extend(tail);
        self.constraints.push(Constraint::Soc { name: name.to_string(), exprs });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("program serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Solved value of one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockValue {
    Scalar(f64),
    Vector(Vec<f64>),
    Hermitian(DMatrix<Complex64>),
}

impl BlockValue {
    pub fn scalar(&self) -> f64 {
        match self {
            BlockValue::Scalar(x) => *x,
            _ => panic!("block is not scalar"),
        }
    }

    pub fn hermitian(&self) -> &DMatrix<Complex64> {
        match self {
            BlockValue::Hermitian(x) => x,
            _ => panic!("block is not a matrix"),
        }
    }
}

/// Result of [`solve`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConicSolution {
    pub status: Status,
    pub values: Vec<BlockValue>,
    /// Objective value (maximization sense).
    pub objective: f64,
    /// Dual bound on the objective.
    pub dual_bound: f64,
    /// Relative primal residual of the standard form.
    pub max_residual: f64,
    /// Relative dual residual of the standard form.
    pub dual_residual: f64,
    /// Largest absolute violation over user constraints and block cones.
    pub constraint_violation: f64,
    pub gap: f64,
    pub iterations: usize,
    pub detail: Option<String>,
}

impl ConicSolution {
    pub fn scalar(&self, block: usize) -> f64 {
        self.values[block].scalar()
    }

    pub fn hermitian(&self, block: usize) -> &DMatrix<Complex64> {
        self.values[block].hermitian()
    }
}

fn is_hermitian(c: &DMatrix<Complex64>) -> bool {
    let scale = c.iter().fold(0.0_f64, |a, z| a.max(z.norm())).max(1e-300);
    let d = c.nrows();
    for i in 0..d {
        for j in 0..=i {
            if (c[(i, j)] - c[(j, i)].conj()).norm() > 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

fn check_expr(prog: &ConicProgram, expr: &LinExpr, owner: &str, out: &mut Vec<String>) {
    if !expr.constant.is_finite() {
        out.push(format!("{owner}: non-finite constant"));
    }
    for t in &expr.terms {
        match t {
            Term::Scalar { block, index, coef } => {
                let Some(b) = prog.blocks.get(*block) else {
                    out.push(format!("{owner}: references undeclared block {block}"));
                    continue;
                };
                match b.kind {
                    BlockKind::Psd(_) => out.push(format!("{owner}: scalar term on PSD block '{}'", b.name)),
                    k if *index >= k.len() => {
                        out.push(format!("{owner}: index {index} out of range for block '{}'", b.name))
                    }
                    _ => {}
                }
                if !coef.is_finite() {
                    out.push(format!("{owner}: non-finite coefficient on block '{}'", b.name));
                }
            }
            Term::Trace { block, coef } => {
                let Some(b) = prog.blocks.get(*block) else {
                    out.push(format!("{owner}: references undeclared block {block}"));
                    continue;
                };
                let BlockKind::Psd(d) = b.kind else {
                    out.push(format!("{owner}: trace term on non-PSD block '{}'", b.name));
                    continue;
                };
                if coef.nrows() != d || coef.ncols() != d {
                    out.push(format!(
                        "{owner}: coefficient is {}x{} but block '{}' is {d}x{d}",
                        coef.nrows(),
                        coef.ncols(),
                        b.name
                    ));
                    continue;
                }
                if coef.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    out.push(format!("{owner}: non-finite coefficient on block '{}'", b.name));
                } else if !is_hermitian(coef) {
                    out.push(format!("{owner}: non-Hermitian coefficient on block '{}'", b.name));
                }
            }
        }
    }
}

/// Structural diagnostics; empty when the program is well formed.
pub fn validate(prog: &ConicProgram) -> Vec<String> {
    let mut out = Vec::new();
    if prog.blocks.is_empty() {
        out.push("program declares no variable blocks".to_string());
    }
    for b in &prog.blocks {
        match b.kind {
            BlockKind::Soc(0) | BlockKind::Psd(0) => out.push(format!("block '{}' has zero dimension", b.name)),
            _ => {}
        }
    }
    check_expr(prog, &prog.objective, "objective", &mut out);
    for c in &prog.constraints {
        let owner = format!("constraint '{}'", c.name());
        if let Constraint::Soc { exprs, .. } = c {
            if exprs.is_empty() {
                out.push(format!("{owner}: empty cone"));
            }
        }
        for e in c.exprs() {
            check_expr(prog, e, &owner, &mut out);
        }
    }
    out
}

struct Compiled {
    sf: StandardForm,
    offsets: Vec<usize>,
    obj_const: f64,
}

fn dense_row(prog: &ConicProgram, offsets: &[usize], n: usize, expr: &LinExpr) -> Vec<f64> {
    let mut row = vec![0.0; n];
    for t in &expr.terms {
        match t {
            Term::Scalar { block, index, coef } => row[offsets[*block] + index] += coef,
            Term::Trace { block, coef } => {
                let off = offsets[*block];
                for (i, f) in embed::trace_coefficients(coef).into_iter().enumerate() {
                    row[off + i] += f;
                }
            }
        }
    }
    debug_assert_eq!(row.len(), n);
    let _ = prog;
    row
}

fn compile(prog: &ConicProgram) -> Compiled {
    let mut offsets = Vec::with_capacity(prog.blocks.len());
    let mut n = 0;
    for b in &prog.blocks {
        offsets.push(n);
        n += b.kind.len();
    }

    // Rows of G/h grouped per cone: one aggregate orthant, then SOCs, then PSDs.
    let mut nonneg_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut soc_groups: Vec<Vec<(Vec<f64>, f64)>> = Vec::new();
    let mut eq_rows: Vec<(Vec<f64>, f64)> = Vec::new();

    for (bi, b) in prog.blocks.iter().enumerate() {
        match b.kind {
            BlockKind::Nonneg => {
                let mut r = vec![0.0; n];
                r[offsets[bi]] = -1.0;
                nonneg_rows.push((r, 0.0));
            }
            BlockKind::Soc(d) => {
                let grp = (0..d)
                    .map(|i| {
                        let mut r = vec![0.0; n];
                        r[offsets[bi] + i] = -1.0;
                        (r, 0.0)
                    })
                    .collect();
                soc_groups.push(grp);
            }
            _ => {}
        }
    }
    for c in &prog.constraints {
        match c {
            Constraint::Eq { expr, .. } => eq_rows.push((dense_row(prog, &offsets, n, expr), -expr.constant)),
            Constraint::Ineq { expr, .. } => {
                let r = dense_row(prog, &offsets, n, expr);
                nonneg_rows.push((r.iter().map(|v| -v).collect(), expr.constant));
            }
            Constraint::Soc { exprs, .. } => {
                let grp = exprs
                    .iter()
                    .map(|e| (dense_row(prog, &offsets, n, e).iter().map(|v| -v).collect(), e.constant))
                    .collect();
                soc_groups.push(grp);
            }
        }
    }

    let mut cones = Vec::new();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    if !nonneg_rows.is_empty() {
        cones.push(Cone::Nonneg(nonneg_rows.len()));
        rows.extend(nonneg_rows);
    }
    for g in soc_groups {
        cones.push(Cone::Soc(g.len()));
        rows.extend(g);
    }
    let mut psd: Vec<(usize, usize)> = Vec::new();
    for (bi, b) in prog.blocks.iter().enumerate() {
        if let BlockKind::Psd(d) = b.kind {
            psd.push((bi, d));
        }
    }
    let m_lin = rows.len();
    let m_psd: usize = psd.iter().map(|(_, d)| d * (2 * d + 1)).sum();
    let m = m_lin + m_psd;
    let mut g = DMatrix::zeros(m, n);
    let mut h = DVector::zeros(m);
    for (i, (r, hv)) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            g[(i, j)] = *v;
        }
        h[i] = *hv;
    }
    let mut off = m_lin;
    for (bi, d) in psd {
        cones.push(Cone::Psd(2 * d));
        for (pi, si, c) in embed::embedding_entries(d) {
            g[(off + si, offsets[bi] + pi)] -= c;
        }
        off += d * (2 * d + 1);
    }

    let p = eq_rows.len();
    let mut a = DMatrix::zeros(p, n);
    let mut b = DVector::zeros(p);
    for (i, (r, bv)) in eq_rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            a[(i, j)] = *v;
        }
        b[i] = *bv;
    }
    let c = DVector::from_vec(dense_row(prog, &offsets, n, &prog.objective).iter().map(|v| -v).collect());
    Compiled { sf: StandardForm { c, g, h, a, b, cones }, offsets, obj_const: prog.objective.constant }
}

fn block_violation(kind: BlockKind, v: &BlockValue) -> f64 {
    match (kind, v) {
        (BlockKind::Nonneg, BlockValue::Scalar(x)) => (-x).max(0.0),
        (BlockKind::Soc(_), BlockValue::Vector(x)) => {
            let r = x[1..].iter().map(|a| a * a).sum::<f64>().sqrt();
            (r - x[0]).max(0.0)
        }
        (BlockKind::Psd(_), BlockValue::Hermitian(x)) => {
            let lmin = embed::embed(x).symmetric_eigenvalues().min();
            (-lmin).max(0.0)
        }
        _ => 0.0,
    }
}

/// Solves `prog` (maximization) with the interior-point method.
pub fn solve(prog: &ConicProgram, settings: &Settings) -> Result<ConicSolution, SolveError> {
    let diags = validate(prog);
    if !diags.is_empty() {
        return Err(SolveError::IllPosed(diags.join("; ")));
    }
    let comp = compile(prog);
    let raw = ipm::solve_standard(&comp.sf, settings)?;
    let values: Vec<BlockValue> = prog
        .blocks
        .iter()
        .zip(&comp.offsets)
        .map(|(b, &off)| match b.kind {
            BlockKind::Free | BlockKind::Nonneg => BlockValue::Scalar(raw.x[off]),
            BlockKind::Soc(d) => BlockValue::Vector(raw.x.as_slice()[off..off + d].to_vec()),
            BlockKind::Psd(d) => BlockValue::Hermitian(embed::params_to_herm(&raw.x.as_slice()[off..off + d * d], d)),
        })
        .collect();
    let mut viol = prog.constraints.iter().map(|c| c.violation(&values)).fold(0.0, f64::max);
    for (b, v) in prog.blocks.iter().zip(&values) {
        viol = viol.max(block_violation(b.kind, v));
    }
    Ok(ConicSolution {
        status: raw.status,
        objective: -raw.primal_obj + comp.obj_const,
        dual_bound: -raw.dual_obj + comp.obj_const,
        values,
        max_residual: raw.pres,
        dual_residual: raw.dres,
        constraint_violation: viol,
        gap: raw.gap,
        iterations: raw.iterations,
        detail: raw.detail,
    })
}
