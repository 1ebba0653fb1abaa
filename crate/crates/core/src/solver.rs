//! Sparse direct solvers with a residual-based reliability gate.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use crate::assembly::{SparseSystem, SystemKind};
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, CsrMatrix};

/// Solutions with a larger relative residual are flagged unreliable.
pub const RELIABILITY_GATE: f64 = 1e-6;

const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Sparse Cholesky for SPD systems, sparse LU for saddle-point systems.
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients (SPD systems only).
    ConjugateGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub method: &'static str,
    pub dim: usize,
    pub nnz: usize,
    /// Refinement steps for direct solves, iterations for CG.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    /// Lagrange multiplier of a saddle-point solve.
    pub multiplier: Option<Vec<f64>>,
    /// `‖Ax − b‖₂ / ‖b‖₂` over the full system.
    pub relative_residual: f64,
    pub reliable: bool,
    pub stats: SolveStats,
}

fn kind_name(kind: SystemKind) -> &'static str {
    match kind {
        SystemKind::Spd => "spd",
        SystemKind::Saddle { .. } => "saddle",
    }
}

fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let ax = a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm2(b);
    let rel = if nb > 0.0 { norm2(&r) / nb } else { norm2(&r) };
    (r, rel)
}

/// Solves with `apply` (an approximate inverse) plus a few steps of iterative refinement.
fn refine<G>(a: &CsrMatrix, b: &[f64], apply: G) -> (Vec<f64>, f64, usize)
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = apply(b);
    let (mut r, mut rel) = relative_residual(a, &x, b);
    let mut steps = 0;
    while steps < REFINEMENT_STEPS && rel > 1e-14 && rel.is_finite() {
        let dx = apply(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(xi, di)| xi + di).collect();
        let (r_new, rel_new) = relative_residual(a, &candidate, b);
        steps += 1;
        if !(rel_new < rel) {
            break;
        }
        x = candidate;
        r = r_new;
        rel = rel_new;
    }
    (x, rel, steps)
}

fn to_col(v: &[f64]) -> Mat<f64> {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

fn from_col(m: &Mat<f64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// Direct sparse Cholesky solve of an SPD system.
pub fn solve_spd(system: &SparseSystem) -> Result<SolveReport> {
    solve_spd_with(system, LinearSolver::Direct)
}

pub fn solve_spd_with(system: &SparseSystem, solver: LinearSolver) -> Result<SolveReport> {
    if system.kind != SystemKind::Spd {
        return Err(Error::WrongSystemKind {
            expected: "spd",
            found: kind_name(system.kind),
        });
    }
    let a = &system.matrix;
    let b = &system.rhs;
    let n = b.len();
    let (solution, rel, iterations, method) = match solver {
        LinearSolver::Direct => {
            if n == 0 {
                (Vec::new(), 0.0, 0, "cholesky")
            } else {
                let llt = a
                    .to_faer()
                    .sp_cholesky(Side::Lower)
                    .map_err(|e| Error::Singular(format!("{e:?}")))?;
                let apply = |rhs: &[f64]| {
                    let mut col = to_col(rhs);
                    llt.solve_in_place(col.as_mut());
                    from_col(&col)
                };
                let (x, rel, steps) = refine(a, b, apply);
                (x, rel, steps, "cholesky")
            }
        }
        LinearSolver::ConjugateGradient => {
            let (x, iters) = jacobi_pcg(a, b, 1e-13, 20 * n.max(10))?;
            let (_, rel) = relative_residual(a, &x, b);
            (x, rel, iters, "jacobi-pcg")
        }
    };
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }
    Ok(SolveReport {
        solution,
        multiplier: None,
        relative_residual: rel,
        reliable: rel <= RELIABILITY_GATE,
        stats: SolveStats {
            method,
            dim: n,
            nnz: a.nnz(),
            iterations,
        },
    })
}

fn jacobi_pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    if let Some(i) = diag.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::Singular(format!("non-positive diagonal entry at {i}")));
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let nb = norm2(b);
    if nb == 0.0 {
        return Ok((x, 0));
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 0..max_iter {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular("matrix is not positive definite".into()));
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if norm2(&r) <= tol * nb {
            return Ok((x, it + 1));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Ok((x, max_iter))
}

/// Sparse LU solve of `[[A, Cᵀ], [C, 0]] (x, λ) = (b, 0)`.
pub fn solve_saddle(system: &SparseSystem) -> Result<SolveReport> {
    let SystemKind::Saddle {
        n_primal,
        n_multiplier,
    } = system.kind
    else {
        return Err(Error::WrongSystemKind {
            expected: "saddle",
            found: kind_name(system.kind),
        });
    };
    let a = &system.matrix;
    let b = &system.rhs;
    // A zero constraint row makes the block rank deficient.
    let mut row_norm = vec![0.0; n_multiplier];
    for (i, j, v) in a.iter() {
        if i >= n_primal && j < n_primal {
            row_norm[i - n_primal] += v * v;
        }
    }
    if let Some(row) = row_norm.iter().position(|&v| v == 0.0) {
        return Err(Error::ConstraintRank(format!("constraint row {row} is zero")));
    }
    let lu = a
        .to_faer()
        .sp_lu()
        .map_err(|e| Error::ConstraintRank(format!("{e:?}")))?;
    let apply = |rhs: &[f64]| {
        let mut col = to_col(rhs);
        lu.solve_in_place(col.as_mut());
        from_col(&col)
    };
    let (x, rel, steps) = refine(a, b, apply);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConstraintRank("factorization produced non-finite values".into()));
    }
    Ok(SolveReport {
        solution: x[..n_primal].to_vec(),
        multiplier: Some(x[n_primal..].to_vec()),
        relative_residual: rel,
        reliable: rel <= RELIABILITY_GATE,
        stats: SolveStats {
            method: "lu",
            dim: n_primal + n_multiplier,
            nnz: a.nnz(),
            iterations: steps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(rows: &[Vec<f64>], b: &[f64]) -> SparseSystem {
        SparseSystem::spd(CsrMatrix::from_dense(rows), b.to_vec())
    }

    #[test]
    fn identity() {
        let sys = SparseSystem::spd(CsrMatrix::identity(4), vec![1.0, 0.0, 0.0, 0.0]);
        let rep = solve_spd(&sys).unwrap();
        assert_eq!(rep.solution, vec![1.0, 0.0, 0.0, 0.0]);
        assert!(rep.reliable);
    }

    #[test]
    fn two_by_two() {
        let sys = spd(&[vec![2.0, 1.0], vec![1.0, 2.0]], &[3.0, 3.0]);
        for solver in [LinearSolver::Direct, LinearSolver::ConjugateGradient] {
            let rep = solve_spd_with(&sys, solver).unwrap();
            assert!((rep.solution[0] - 1.0).abs() < 1e-14);
            assert!((rep.solution[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn kind_is_checked() {
        let sys = spd(&[vec![1.0]], &[1.0]);
        assert!(matches!(solve_saddle(&sys), Err(Error::WrongSystemKind { .. })));
        let c = CsrMatrix::from_dense(&[vec![1.0]]);
        let saddle = SparseSystem::saddle(&sys, &c);
        assert!(matches!(solve_spd(&saddle), Err(Error::WrongSystemKind { .. })));
    }

    #[test]
    fn indefinite_matrix_is_singular_for_cholesky() {
        let sys = spd(&[vec![1.0, 2.0], vec![2.0, 1.0]], &[1.0, 0.0]);
        assert!(matches!(solve_spd(&sys), Err(Error::Singular(_))));
    }

    #[test]
    fn zero_constraint_row_is_rejected() {
        let sys = spd(&[vec![2.0, 0.0], vec![0.0, 2.0]], &[1.0, 1.0]);
        let c = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]);
        assert!(matches!(
            solve_saddle(&SparseSystem::saddle(&sys, &c)),
            Err(Error::ConstraintRank(_))
        ));
    }

    #[test]
    fn small_saddle() {
        // min ½(x² + y²) − x − 3y subject to x = y: x = y = 2.
        let sys = spd(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 3.0]);
        let c = CsrMatrix::from_dense(&[vec![1.0, -1.0]]);
        let rep = solve_saddle(&SparseSystem::saddle(&sys, &c)).unwrap();
        assert!((rep.solution[0] - 2.0).abs() < 1e-14);
        assert!((rep.solution[1] - 2.0).abs() < 1e-14);
        assert!((rep.multiplier.unwrap()[0] + 1.0).abs() < 1e-14);
    }
}
