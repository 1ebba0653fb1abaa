//! Built-in estimator, Dörfler marking and the adaptive loop.

use std::cmp::Ordering;

use crate::assembly::{evaluate_functional, PenaltyRegime};
use crate::benchmarks::{compute_errors, exact_solution, ConvergenceRecord};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::mesh::{build_initial_mesh, Mesh, Point};
use crate::scheme::{solve_scheme, DiscreteSolution};
use crate::spaces::Discretization;

/// Squared local contributions `η²_T` of the least-squares functional.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorField {
    pub eta_sq: Vec<f64>,
    pub total: f64,
}

impl EstimatorField {
    /// `η = (Σ η²_T)^{1/2}`.
    pub fn estimator(&self) -> f64 {
        self.total.sqrt()
    }
}

pub fn estimate<F>(
    disc: &Discretization,
    solution: &DiscreteSolution,
    f: &F,
    regime: &PenaltyRegime,
) -> Result<EstimatorField>
where
    F: Fn(Point) -> f64 + Sync,
{
    let value = evaluate_functional(disc, &solution.sigma, &solution.u, f, regime)?;
    Ok(EstimatorField {
        eta_sq: value.per_triangle,
        total: value.total,
    })
}

/// Minimal set of triangles carrying a `θ` fraction of `Σ η²_T`.
///
/// Greedy on descending `η²_T`, ties broken by the smaller triangle id. The
/// result is sorted by triangle id.
pub fn dorfler_mark(eta_sq: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::config("theta", "theta must lie in (0, 1]"));
    }
    if let Some(i) = eta_sq.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::config("eta_sq", format!("entry {i} is negative or not finite")));
    }
    if eta_sq.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroEstimator);
    }
    if theta == 1.0 {
        return Ok((0..eta_sq.len()).collect());
    }
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&a, &b| match eta_sq[b].partial_cmp(&eta_sq[a]) {
        Some(Ordering::Equal) | None => a.cmp(&b),
        Some(o) => o,
    });
    // Summing in the same order as the prefix keeps the comparison consistent.
    let total: f64 = order.iter().map(|&i| eta_sq[i]).sum();
    let goal = theta * total;
    let mut acc = 0.0;
    let mut count = 0;
    for &i in &order {
        acc += eta_sq[i];
        count += 1;
        if acc >= goal {
            break;
        }
    }
    let mut marked = order[..count].to_vec();
    marked.sort_unstable();
    Ok(marked)
}

/// Per-level records of an adaptive run and the last mesh that was solved on.
#[derive(Debug, Clone)]
pub struct AdaptiveHistory {
    pub records: Vec<ConvergenceRecord>,
    pub final_mesh: Mesh,
}

impl AdaptiveHistory {
    /// Least-squares slope of `log value` against `log ndof` over the last
    /// `window` reliable levels.
    pub fn slope(&self, window: usize, value: impl Fn(&ConvergenceRecord) -> f64) -> Option<f64> {
        let reliable: Vec<&ConvergenceRecord> = self.records.iter().filter(|r| !r.unreliable).collect();
        if reliable.len() < window.max(2) {
            return None;
        }
        let tail = &reliable[reliable.len() - window.max(2)..];
        let x: Vec<f64> = tail.iter().map(|r| (r.ndof as f64).ln()).collect();
        let y: Vec<f64> = tail.iter().map(|r| value(r).ln()).collect();
        Some(fit_slope(&x, &y))
    }
}

/// Slope of the least-squares line through `(x_i, y_i)`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Solve, estimate, mark and refine until the next mesh would exceed
/// `max_ndof`, a solve is unreliable, or `max_levels` levels are done.
pub fn afem_loop(config: &ExperimentConfig) -> Result<AdaptiveHistory> {
    afem_loop_with(config, |_, _, _| Ok(()))
}

/// [`afem_loop`] with a callback on every solved level.
pub fn afem_loop_with<C>(config: &ExperimentConfig, mut observer: C) -> Result<AdaptiveHistory>
where
    C: FnMut(&Discretization, &DiscreteSolution, &ConvergenceRecord) -> Result<()>,
{
    config.validate()?;
    let domain = config.domain_spec()?;
    let exact = exact_solution(&domain);
    let c_omega = config.c_omega()?;
    let regime = PenaltyRegime::new(config.alpha, c_omega)?;
    let f = |x: Point| exact.f(x);
    let options = config.solve_options();

    let mut mesh = build_initial_mesh(&domain)?;
    let mut records: Vec<ConvergenceRecord> = Vec::new();
    let mut solved = mesh.clone();
    for level in 0.. {
        let disc = Discretization::new(&mesh, config.k)?;
        let ndof = if regime.is_natural() {
            disc.n_total() - crate::assembly::constrained_edges(&disc).len()
        } else {
            disc.n_total()
        };
        if level > 0 && ndof > config.max_ndof {
            break;
        }
        let result = solve_scheme(&disc, &regime, &f, &options)?;
        let field = estimate(&disc, &result.solution, &f, &regime)?;
        let errors = compute_errors(&disc, &result.solution, &exact, c_omega)?;
        let estimator = field.estimator();
        let record = ConvergenceRecord {
            level,
            ndof,
            ntriangles: mesh.num_triangles(),
            estimator,
            err_energy_rel: errors.energy_rel,
            err_weighted: errors.weighted,
            efficiency: if errors.weighted > 0.0 {
                estimator / errors.weighted
            } else {
                f64::NAN
            },
            unreliable: !result.report.reliable,
            k: config.k,
            alpha: config.alpha,
            ell: config.ell,
            theta: config.theta,
            weight_mode: config.weight.as_str().to_string(),
            c_omega,
            relative_residual: result.report.relative_residual,
            formulation_gap: result.formulation_gap,
        };
        observer(&disc, &result.solution, &record)?;
        let stop = record.unreliable
            || config.max_levels.is_some_and(|m| level + 1 >= m)
            || field.total == 0.0;
        records.push(record);
        drop(disc);
        solved = mesh.clone();
        if stop {
            break;
        }
        let marked = dorfler_mark(&field.eta_sq, config.theta)?;
        mesh = mesh.refine(&marked)?;
    }
    Ok(AdaptiveHistory {
        records,
        final_mesh: solved,
    })
}
