//! Invariant suites behind the `verify` subcommand.
//!
//! Each check is also exposed on its own so tests can call it directly.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adaptivity::dorfler_mark;
use crate::assembly::{
    assemble_bilinear, assemble_constraints, constrained_edges, evaluate_functional, load_norm_squared,
    PenaltyRegime, SparseSystem,
};
use crate::benchmarks::side_condition_diagnostic;
use crate::error::Result;
use crate::mesh::{build_initial_mesh, DomainSpec, Mesh, Point};
use crate::quadrature::{reference_monomial_moment, triangle_rule};
use crate::scheme::{field_difference, solve_scheme, SolveOptions, SolverPath};
use crate::solver::solve_spd;
use crate::sparse::CsrMatrix;
use crate::spaces::{build_constrained_basis, Discretization};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            result: SuiteResult {
                name,
                passed: 0,
                total: 0,
                failures: Vec::new(),
            },
        }
    }

    fn check(&mut self, label: impl Into<String>, outcome: Result<bool>) {
        self.result.total += 1;
        match outcome {
            Ok(true) => self.result.passed += 1,
            Ok(false) => self.result.failures.push(label.into()),
            Err(e) => self.result.failures.push(format!("{}: {e}", label.into())),
        }
    }
}

/// Smooth right-hand side used by the algebraic checks.
pub fn smooth_load(x: Point) -> f64 {
    (1.3 * x[0]).sin() * (0.7 * x[1] + 0.2).cos() + 0.5
}

/// Square, rectangle and L-shape initial meshes plus one uniform refinement of the square.
pub fn sample_meshes() -> Result<Vec<(String, Mesh)>> {
    let square = build_initial_mesh(&DomainSpec::square(1.0)?)?;
    Ok(vec![
        ("square".into(), square.clone()),
        ("rectangle(3)".into(), build_initial_mesh(&DomainSpec::rectangle(3.0)?)?),
        ("lshape".into(), build_initial_mesh(&DomainSpec::lshape(1.0)?)?),
        ("square/1".into(), square.refine_uniform()?),
    ])
}

/// Largest error of the triangle rule of `degree` over all monomials of that total degree or less.
pub fn quadrature_exactness_error(degree: usize) -> Result<f64> {
    let rule = triangle_rule(degree)?;
    let mut worst = 0.0f64;
    for a in 0..=degree {
        for b in 0..=degree - a {
            let approx: f64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                .sum();
            let exact = reference_monomial_moment(a, b);
            worst = worst.max((approx - exact).abs() / exact);
        }
    }
    Ok(worst)
}

/// Largest `|Σ_j α_{E,j} − 1|` over all edge sides.
pub fn alpha_partition_defect(disc: &Discretization) -> Result<f64> {
    let basis = build_constrained_basis(disc)?;
    let mut worst = 0.0f64;
    for e in 0..disc.mesh.num_edges() {
        let a = basis.alphas(e);
        for side in std::iter::once(&a.plus).chain(a.minus.as_ref()) {
            worst = worst.max((side.iter().sum::<f64>() - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Largest mean normal jump of any constrained basis member on any
/// interior or Neumann edge, divided by `h_E`.
pub fn constrained_mean_jump_defect(disc: &Discretization) -> Result<f64> {
    let basis = build_constrained_basis(disc)?;
    let c = assemble_constraints(disc)?;
    let edges = constrained_edges(disc);
    let mut worst = 0.0f64;
    for i in 0..basis.len() {
        let mut z = vec![0.0; disc.n_total()];
        for &(j, v) in basis.column(i) {
            z[j] = v;
        }
        let cz = c.matvec(&z);
        for (row, &e) in cz.iter().zip(&edges) {
            // Rows hold |E| times the mean jump.
            let h = disc.mesh.edges()[e].length;
            worst = worst.max(row.abs() / (h * h));
        }
    }
    Ok(worst)
}

/// Expected dimension of the constrained flux space:
/// `|T|·dim RT^k_pw − #(interior and Neumann edges)`.
pub fn constrained_dimension(disc: &Discretization) -> usize {
    disc.n_sigma() - constrained_edges(disc).len()
}

/// Numerical rank and row count of the constraint matrix.
pub fn constraint_rank(disc: &Discretization) -> Result<(usize, usize)> {
    let c = assemble_constraints(disc)?;
    let dense = c.to_dense();
    let m = DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| dense[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0f64, f64::max);
    let rank = sv.iter().filter(|s| **s > 1e-10 * top).count();
    Ok((rank, c.nrows()))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Relative defect of `LS(x) = xᵀAx − 2bᵀx + c²‖f‖²` for a random `x`.
pub fn quadratic_identity_defect(disc: &Discretization, regime: &PenaltyRegime, rng: &mut ChaCha8Rng) -> Result<f64> {
    let sys = assemble_bilinear(disc, regime, &smooth_load)?;
    let x = random_vector(rng, disc.n_total());
    let (sigma, u) = x.split_at(disc.n_sigma());
    let direct = evaluate_functional(disc, sigma, u, &smooth_load, regime)?.total;
    let c2 = regime.c_omega() * regime.c_omega();
    let bx: f64 = sys.rhs.iter().zip(&x).map(|(b, v)| b * v).sum();
    let algebraic = sys.matrix.bilinear(&x, &x) - 2.0 * bx + c2 * load_norm_squared(disc, &smooth_load)?;
    Ok((direct - algebraic).abs() / direct.abs().max(f64::MIN_POSITIVE))
}

/// Smallest relative increase `(LS(x* + z) − LS(x*)) / LS(x*)` over a
/// random admissible perturbation `z` (negative means optimality fails).
pub fn optimality_margin(disc: &Discretization, regime: &PenaltyRegime, rng: &mut ChaCha8Rng) -> Result<f64> {
    let sol = solve_scheme(disc, regime, &smooth_load, &SolveOptions::default())?;
    let x = sol.solution.to_raw();
    let z = if regime.is_natural() {
        let basis = build_constrained_basis(disc)?;
        let t = basis.transform(disc.n_u());
        t.matvec(&random_vector(rng, t.ncols()))
    } else {
        random_vector(rng, disc.n_total())
    };
    let ls = |v: &[f64]| -> Result<f64> {
        let (s, u) = v.split_at(disc.n_sigma());
        Ok(evaluate_functional(disc, s, u, &smooth_load, regime)?.total)
    };
    let base = ls(&x)?;
    let mut margin = f64::INFINITY;
    for eps in [1e-3, 1e-1, 1.0] {
        let perturbed: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + eps * b).collect();
        margin = margin.min((ls(&perturbed)? - base) / base);
    }
    Ok(margin)
}

/// Field difference between the saddle-point and constrained-basis solutions.
pub fn formulation_gap(disc: &Discretization, c_omega: f64) -> Result<f64> {
    let regime = PenaltyRegime::natural(c_omega)?;
    let options = SolveOptions {
        path: SolverPath::Both,
        ..Default::default()
    };
    let sol = solve_scheme(disc, &regime, &smooth_load, &options)?;
    let alternate = sol.alternate.expect("both paths ran");
    field_difference(disc, &sol.solution, &alternate)
}

/// Relative residual of a direct solve of a random SPD matrix `MᵀM + nI`.
pub fn random_spd_residual(n: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let m: Vec<Vec<f64>> = (0..n).map(|_| random_vector(rng, n)).collect();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = (0..n).map(|r| m[r][i] * m[r][j]).sum::<f64>() + if i == j { n as f64 } else { 0.0 };
        }
    }
    let report = solve_spd(&SparseSystem::spd(CsrMatrix::from_dense(&a), random_vector(rng, n)))?;
    Ok(report.relative_residual)
}

/// Dörfler marking agrees with the brute-force minimal set on a random vector.
pub fn dorfler_matches_brute_force(rng: &mut ChaCha8Rng) -> Result<bool> {
    let n = rng.gen_range(1..=10);
    let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0f64).powi(2) + 1e-3).collect();
    let theta = rng.gen_range(0.05..=1.0);
    let marked = dorfler_mark(&eta, theta)?;
    let total: f64 = eta.iter().sum();
    let mut best = n;
    for mask in 0u32..(1 << n) {
        let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| eta[i]).sum();
        if sum >= theta * total * (1.0 - 1e-12) {
            best = best.min(mask.count_ones() as usize);
        }
    }
    let sum: f64 = marked.iter().map(|&i| eta[i]).sum();
    Ok(marked.len() == best && sum >= theta * total * (1.0 - 1e-12))
}

/// Runs every suite with the given seed.
pub fn run_suites(seed: u64) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let meshes = match sample_meshes() {
        Ok(m) => m,
        Err(e) => {
            return vec![SuiteResult {
                name: "mesh",
                passed: 0,
                total: 1,
                failures: vec![format!("initial meshes: {e}")],
            }]
        }
    };

    let mut quad = Suite::new("quadrature");
    for degree in 0..=24 {
        quad.check(format!("degree {degree}"), quadrature_exactness_error(degree).map(|e| e < 1e-12));
    }

    let mut mesh = Suite::new("mesh");
    for (name, m) in &meshes {
        let mut current = m.clone();
        let area = m.total_area();
        let angle = m.min_angle();
        for level in 0..3 {
            let marked: Vec<usize> = (0..current.num_triangles()).filter(|_| rng.gen_bool(0.3)).collect();
            let refined = current.refine(&marked);
            mesh.check(
                format!("{name} refinement {level}"),
                refined.map(|r| {
                    let ok = (r.total_area() - area).abs() <= 1e-12 * area && r.min_angle() >= angle - 1e-12;
                    current = r;
                    ok
                }),
            );
        }
    }

    let mut spaces = Suite::new("spaces");
    for (name, m) in &meshes {
        for k in 0..=2 {
            let disc = match Discretization::new(m, k) {
                Ok(d) => d,
                Err(e) => {
                    spaces.check(format!("{name} k={k}"), Err(e));
                    continue;
                }
            };
            spaces.check(format!("{name} k={k} alpha sums"), alpha_partition_defect(&disc).map(|d| d <= 1e-12));
            spaces.check(
                format!("{name} k={k} mean jumps"),
                constrained_mean_jump_defect(&disc).map(|d| d <= 1e-12),
            );
            spaces.check(
                format!("{name} k={k} cardinality"),
                build_constrained_basis(&disc).map(|b| b.len() == constrained_dimension(&disc)),
            );
        }
    }

    let mut assembly = Suite::new("assembly");
    for (name, m) in meshes.iter().take(3) {
        for k in 0..=1 {
            let Ok(disc) = Discretization::new(m, k) else { continue };
            for alpha in [1, -1] {
                let regime = PenaltyRegime::new(alpha, 0.4).expect("valid regime");
                assembly.check(
                    format!("{name} k={k} alpha={alpha} identity"),
                    quadratic_identity_defect(&disc, &regime, &mut rng).map(|d| d <= 1e-10),
                );
                assembly.check(
                    format!("{name} k={k} alpha={alpha} optimality"),
                    optimality_margin(&disc, &regime, &mut rng).map(|d| d >= -1e-10),
                );
            }
        }
    }

    let mut solver = Suite::new("solver");
    for n in [5, 20, 50] {
        solver.check(format!("random spd n={n}"), random_spd_residual(n, &mut rng).map(|r| r <= 1e-10));
    }
    for (name, m) in meshes.iter().take(3) {
        for k in 0..=1 {
            let gap = Discretization::new(m, k).and_then(|d| formulation_gap(&d, 0.4));
            solver.check(format!("{name} k={k} saddle vs spd"), gap.map(|g| g <= 1e-8));
        }
    }

    let mut marking = Suite::new("marking");
    for i in 0..50 {
        marking.check(format!("random case {i}"), dorfler_matches_brute_force(&mut rng));
    }

    let mut diagnostic = Suite::new("diagnostic");
    let mut prev = None;
    let mut current = meshes[0].1.clone();
    for level in 0..4 {
        let d = side_condition_diagnostic(&current);
        if let Some((lhs, rhs)) = prev {
            let ok = d.lhs / lhs >= 1.2 && d.rhs / rhs <= 1.5 && rhs / d.rhs <= 1.5;
            diagnostic.check(format!("level {level}"), Ok(ok));
        }
        prev = Some((d.lhs, d.rhs));
        match current.refine_uniform() {
            Ok(m) => current = m,
            Err(e) => {
                diagnostic.check("refinement", Err(e));
                break;
            }
        }
    }

    [quad, mesh, spaces, assembly, solver, marking, diagnostic]
        .into_iter()
        .map(|s| s.result)
        .collect()
}
