//! Assemble-and-solve for one mesh in either penalty regime.

use std::fmt;
use std::str::FromStr;

use crate::assembly::{assemble_constraints, assemble_terms, constrained_edges, PenaltyRegime, SparseSystem};
use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::quadrature::triangle_rule;
use crate::solver::{solve_saddle, solve_spd_with, LinearSolver, SolveReport};
use crate::spaces::{build_constrained_basis, Discretization};

/// How the natural-penalty problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverPath {
    /// SPD system in the constrained flux basis.
    #[default]
    Spd,
    /// Raw flux space with a Lagrange multiplier per constrained edge.
    Saddle,
    /// Both, reporting the coefficient gap.
    Both,
}

impl SolverPath {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverPath::Spd => "spd",
            SolverPath::Saddle => "saddle",
            SolverPath::Both => "both",
        }
    }
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverPath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "spd" => Ok(SolverPath::Spd),
            "saddle" => Ok(SolverPath::Saddle),
            "both" => Ok(SolverPath::Both),
            other => Err(format!("unknown solver '{other}' (expected spd, saddle or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub path: SolverPath,
    pub linear: LinearSolver,
    pub parallel: bool,
}

/// Raw coefficient vectors of `σ_h ∈ RT^{k,pw}` and `u_h ∈ P^{k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub sigma: Vec<f64>,
    pub u: Vec<f64>,
}

impl DiscreteSolution {
    pub fn zeros(disc: &Discretization) -> Self {
        Self {
            sigma: vec![0.0; disc.n_sigma()],
            u: vec![0.0; disc.n_u()],
        }
    }

    fn from_raw(disc: &Discretization, x: &[f64]) -> Self {
        let ns = disc.n_sigma();
        Self {
            sigma: x[..ns].to_vec(),
            u: x[ns..].to_vec(),
        }
    }

    pub fn to_raw(&self) -> Vec<f64> {
        let mut x = self.sigma.clone();
        x.extend_from_slice(&self.u);
        x
    }
}

#[derive(Debug, Clone)]
pub struct SchemeSolution {
    pub solution: DiscreteSolution,
    /// Dimension of the space the minimization was solved in.
    pub ndof: usize,
    pub report: SolveReport,
    /// Saddle-point solution when both paths ran.
    pub alternate: Option<DiscreteSolution>,
    /// `max |x_spd − x_saddle| / max |x_spd|` when both paths ran.
    pub formulation_gap: Option<f64>,
}

/// Minimizes the discrete functional on `disc`.
pub fn solve_scheme<F>(
    disc: &Discretization,
    regime: &PenaltyRegime,
    f: &F,
    options: &SolveOptions,
) -> Result<SchemeSolution>
where
    F: Fn(Point) -> f64 + Sync,
{
    if !regime.is_natural() && options.path != SolverPath::Spd {
        return Err(Error::config(
            "solver",
            "the over-penalized scheme has no constraint block; use solver=spd",
        ));
    }
    let system = assemble_terms(disc, regime, f, options.parallel)?.system();
    if !regime.is_natural() {
        let report = solve_spd_with(&system, options.linear)?;
        return Ok(SchemeSolution {
            solution: DiscreteSolution::from_raw(disc, &report.solution),
            ndof: disc.n_total(),
            report,
            alternate: None,
            formulation_gap: None,
        });
    }

    let spd = match options.path {
        SolverPath::Spd | SolverPath::Both => Some(solve_constrained(disc, &system, options.linear)?),
        SolverPath::Saddle => None,
    };
    let saddle = match options.path {
        SolverPath::Saddle | SolverPath::Both => {
            let c = assemble_constraints(disc)?;
            let report = solve_saddle(&SparseSystem::saddle(&system, &c))?;
            Some(report)
        }
        SolverPath::Spd => None,
    };
    let ndof = disc.n_total() - constrained_edges(disc).len();
    match (spd, saddle) {
        (Some((mut report, x)), Some(saddle)) => {
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = x
                .iter()
                .zip(&saddle.solution)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            report.reliable &= saddle.reliable;
            report.relative_residual = report.relative_residual.max(saddle.relative_residual);
            Ok(SchemeSolution {
                solution: DiscreteSolution::from_raw(disc, &x),
                ndof,
                report,
                alternate: Some(DiscreteSolution::from_raw(disc, &saddle.solution)),
                formulation_gap: Some(if scale > 0.0 { diff / scale } else { diff }),
            })
        }
        (Some((report, x)), None) => Ok(SchemeSolution {
            solution: DiscreteSolution::from_raw(disc, &x),
            ndof,
            report,
            alternate: None,
            formulation_gap: None,
        }),
        (None, Some(report)) => Ok(SchemeSolution {
            solution: DiscreteSolution::from_raw(disc, &report.solution),
            ndof,
            report,
            alternate: None,
            formulation_gap: None,
        }),
        (None, None) => unreachable!("at least one path runs"),
    }
}

/// SPD solve in the constrained basis; returns the report (in reduced
/// coordinates) and the raw coefficient vector.
fn solve_constrained(
    disc: &Discretization,
    system: &SparseSystem,
    linear: LinearSolver,
) -> Result<(SolveReport, Vec<f64>)> {
    let basis = build_constrained_basis(disc)?;
    let z = basis.transform(disc.n_u());
    let reduced = SparseSystem::spd(system.matrix.congruence(&z), z.transpose_matvec(&system.rhs));
    let report = solve_spd_with(&reduced, linear)?;
    let raw = z.matvec(&report.solution);
    Ok((report, raw))
}

/// Largest difference of `σ`, `div σ`, `u` and `∇u` between two solutions at
/// the stiffness quadrature points, relative to the largest value of `a`.
pub fn field_difference(disc: &Discretization, a: &DiscreteSolution, b: &DiscreteSolution) -> Result<f64> {
    let rule = triangle_rule(2 * (disc.k() + 2))?;
    let (nr, nd) = (disc.rt.local_dim(), disc.dg.local_dim());
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for t in 0..disc.mesh.num_triangles() {
        let ev = disc.element_values(t, &rule);
        for q in 0..ev.weights.len() {
            let mut va = [0.0; 6];
            let mut vb = [0.0; 6];
            for (vals, sol) in [(&mut va, a), (&mut vb, b)] {
                for i in 0..nr {
                    let c = sol.sigma[t * nr + i];
                    let v = ev.rt[q * nr + i];
                    vals[0] += c * v[0];
                    vals[1] += c * v[1];
                    vals[2] += c * ev.rt_div[q * nr + i];
                }
                for i in 0..nd {
                    let c = sol.u[t * nd + i];
                    let g = ev.dg_grad[q * nd + i];
                    vals[3] += c * ev.dg[q * nd + i];
                    vals[4] += c * g[0];
                    vals[5] += c * g[1];
                }
            }
            for (x, y) in va.iter().zip(&vb) {
                diff = diff.max((x - y).abs());
                scale = scale.max(x.abs());
            }
        }
    }
    Ok(if scale > 0.0 { diff / scale } else { diff })
}
