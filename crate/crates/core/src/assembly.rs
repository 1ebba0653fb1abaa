//! Least-squares bilinear form, mean-jump constraints and functional evaluation.
//!
//! With `c = c_Ω` the discrete functional is
//!
//! ```text
//! LS(f; σ, u) = c²‖f + div σ‖² + ‖σ − ∇u‖²
//!             + Σ_{E interior ∪ Neumann} w_E ‖[σ·n_E]‖²_E
//!             + Σ_{E interior ∪ Dirichlet} h_E⁻¹ ‖[u]‖²_E
//! ```
//!
//! with `w_E = h_E` for the natural penalty (`α = +1`) and `w_E = c²/h_E` for
//! the over-penalized scheme (`α = −1`). All quantities are elementwise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{BoundaryLabel, Point};
use crate::quadrature::{edge_rule, triangle_rule, EdgeRule, TriangleRule};
use crate::spaces::{Discretization, ElementValues};
use crate::sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyRegime {
    alpha: i32,
    c_omega: f64,
}

impl PenaltyRegime {
    pub fn new(alpha: i32, c_omega: f64) -> Result<Self> {
        if alpha != 1 && alpha != -1 {
            return Err(Error::config("alpha", format!("must be 1 or -1, got {alpha}")));
        }
        if !(c_omega.is_finite() && c_omega > 0.0) {
            return Err(Error::config("c_omega", format!("must be positive, got {c_omega}")));
        }
        Ok(Self { alpha, c_omega })
    }

    /// `α = +1`: weight `h_E` on normal jumps, flux in the constrained space.
    pub fn natural(c_omega: f64) -> Result<Self> {
        Self::new(1, c_omega)
    }

    /// `α = −1`: weight `c²/h_E` on normal jumps, no side condition.
    pub fn over_penalized(c_omega: f64) -> Result<Self> {
        Self::new(-1, c_omega)
    }

    pub fn alpha(&self) -> i32 {
        self.alpha
    }

    pub fn c_omega(&self) -> f64 {
        self.c_omega
    }

    pub fn is_natural(&self) -> bool {
        self.alpha == 1
    }

    /// `c^(1−α) h^α`.
    pub fn normal_jump_weight(&self, h: f64) -> f64 {
        if self.is_natural() {
            h
        } else {
            self.c_omega * self.c_omega / h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Spd,
    Saddle { n_primal: usize, n_multiplier: usize },
}

#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub kind: SystemKind,
}

impl SparseSystem {
    pub fn spd(matrix: CsrMatrix, rhs: Vec<f64>) -> Self {
        assert_eq!(matrix.nrows(), rhs.len());
        Self {
            matrix,
            rhs,
            kind: SystemKind::Spd,
        }
    }

    /// `[[A, Cᵀ], [C, 0]]` with right-hand side `[b, 0]`.
    pub fn saddle(primal: &SparseSystem, constraints: &CsrMatrix) -> Self {
        let n = primal.matrix.nrows();
        let m = constraints.nrows();
        assert_eq!(constraints.ncols(), n);
        let mut entries: Vec<(usize, usize, f64)> = primal.matrix.iter().collect();
        for (i, j, v) in constraints.iter() {
            entries.push((n + i, j, v));
            entries.push((j, n + i, v));
        }
        let mut rhs = primal.rhs.clone();
        rhs.resize(n + m, 0.0);
        Self {
            matrix: CsrMatrix::from_triplets(n + m, n + m, entries),
            rhs,
            kind: SystemKind::Saddle {
                n_primal: n,
                n_multiplier: m,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

/// Quadrature degrees for a flux degree `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureDegrees {
    pub stiffness: usize,
    pub load: usize,
    pub edge: usize,
}

impl QuadratureDegrees {
    pub fn for_degree(k: usize) -> Self {
        Self {
            stiffness: 2 * (k + 2),
            load: (2 * k + 6).max(10),
            edge: 2 * k + 4,
        }
    }
}

/// The four terms of the bilinear form and the load vector, all in the raw
/// `RT^{k,pw} × P^{k+1}` numbering.
#[derive(Debug, Clone)]
pub struct BilinearTerms {
    /// `c²(div σ, div τ)`.
    pub divergence: CsrMatrix,
    /// `(σ − ∇u, τ − ∇v)`.
    pub residual: CsrMatrix,
    /// `Σ w_E ([σ·n_E], [τ·n_E])_E`.
    pub normal_jump: CsrMatrix,
    /// `Σ h_E⁻¹ ([u], [v])_E`.
    pub primal_jump: CsrMatrix,
    /// `−c²(f, div τ)`.
    pub load: Vec<f64>,
}

impl BilinearTerms {
    pub fn system(&self) -> SparseSystem {
        let matrix = self
            .divergence
            .add(&self.residual)
            .add(&self.normal_jump)
            .add(&self.primal_jump);
        SparseSystem::spd(matrix, self.load.clone())
    }
}

struct VolumeLocal {
    divergence: Vec<f64>,
    residual: Vec<f64>,
    load: Vec<f64>,
}

struct EdgeLocal {
    sigma_dofs: Vec<usize>,
    normal: Vec<f64>,
    u_dofs: Vec<usize>,
    primal: Vec<f64>,
}

struct Rules {
    stiffness: TriangleRule,
    load: TriangleRule,
    edge: EdgeRule,
}

impl Rules {
    fn new(k: usize) -> Result<Self> {
        let deg = QuadratureDegrees::for_degree(k);
        Ok(Self {
            stiffness: triangle_rule(deg.stiffness)?,
            load: triangle_rule(deg.load)?,
            edge: edge_rule(deg.edge)?,
        })
    }
}

fn volume_local<F>(disc: &Discretization, t: usize, c2: f64, f: &F, rules: &Rules) -> VolumeLocal
where
    F: Fn(Point) -> f64,
{
    let ev = disc.element_values(t, &rules.stiffness);
    let (nr, nd) = (ev.n_rt, ev.n_dg);
    let n = nr + nd;
    let mut divergence = vec![0.0; nr * nr];
    let mut residual = vec![0.0; n * n];
    for q in 0..ev.weights.len() {
        let w = ev.weights[q];
        let div = &ev.rt_div[q * nr..(q + 1) * nr];
        // Residual test functions: (φ_a, 0) and (0, −∇ψ_i).
        let mut fields: Vec<[f64; 2]> = ev.rt[q * nr..(q + 1) * nr].to_vec();
        fields.extend(ev.dg_grad[q * nd..(q + 1) * nd].iter().map(|g| [-g[0], -g[1]]));
        for a in 0..nr {
            let wa = w * div[a];
            for b in 0..nr {
                divergence[a * nr + b] += c2 * wa * div[b];
            }
        }
        for a in 0..n {
            let fa = fields[a];
            for b in a..n {
                let fb = fields[b];
                residual[a * n + b] += w * (fa[0] * fb[0] + fa[1] * fb[1]);
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            residual[a * n + b] = residual[b * n + a];
        }
    }
    let lv = disc.element_values(t, &rules.load);
    let mut load = vec![0.0; nr];
    for q in 0..lv.weights.len() {
        let fq = f(lv.points[q]);
        for a in 0..nr {
            load[a] -= c2 * lv.weights[q] * fq * lv.rt_div[q * nr + a];
        }
    }
    VolumeLocal {
        divergence,
        residual,
        load,
    }
}

/// Normal jump of the edge functions of `edge` and primal jumps of both sides.
fn edge_local(
    disc: &Discretization,
    edge: usize,
    normal_weight: Option<f64>,
    primal_weight: Option<f64>,
    rule: &EdgeRule,
) -> EdgeLocal {
    let e = &disc.mesh.edges()[edge];
    let rt = &disc.rt;
    let (nr, nd) = (rt.local_dim(), disc.dg.local_dim());
    let mut sides = vec![(e.t_plus, 1.0)];
    if let Some(tm) = e.t_minus {
        sides.push((tm, -1.0));
    }
    let traces: Vec<_> = sides
        .iter()
        .map(|&(t, _)| disc.side_trace(edge, t, &rule.points))
        .collect();
    let mut out = EdgeLocal {
        sigma_dofs: Vec::new(),
        normal: Vec::new(),
        u_dofs: Vec::new(),
        primal: Vec::new(),
    };
    let nq = rule.points.len();
    if let Some(weight) = normal_weight {
        let mut jumps: Vec<Vec<f64>> = Vec::new();
        for (trace, &(t, sign)) in traces.iter().zip(&sides) {
            for j in 0..rt.per_edge() {
                let local = rt.edge_local_index(trace.local_edge, j);
                out.sigma_dofs.push(rt.dof(t, local));
                jumps.push((0..nq).map(|q| sign * trace.normal[q * nr + local]).collect());
            }
        }
        out.normal = gram(&jumps, &rule.weights, weight * e.length);
    }
    if let Some(weight) = primal_weight {
        let mut jumps: Vec<Vec<f64>> = Vec::new();
        for (trace, &(t, sign)) in traces.iter().zip(&sides) {
            out.u_dofs.extend(disc.u_dofs(t));
            jumps.extend((0..nd).map(|i| (0..nq).map(|q| sign * trace.dg[q * nd + i]).collect()));
        }
        out.primal = gram(&jumps, &rule.weights, weight * e.length);
    }
    out
}

fn gram(rows: &[Vec<f64>], weights: &[f64], scale: f64) -> Vec<f64> {
    let n = rows.len();
    let mut out = vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let v: f64 = weights
                .iter()
                .enumerate()
                .map(|(q, w)| w * rows[a][q] * rows[b][q])
                .sum();
            out[a * n + b] = scale * v;
            out[b * n + a] = scale * v;
        }
    }
    out
}

fn edge_weights(disc: &Discretization, regime: &PenaltyRegime, edge: usize) -> (Option<f64>, Option<f64>) {
    let e = &disc.mesh.edges()[edge];
    let normal = matches!(e.class, BoundaryLabel::Interior | BoundaryLabel::Neumann)
        .then(|| regime.normal_jump_weight(e.length));
    let primal = matches!(e.class, BoundaryLabel::Interior | BoundaryLabel::Dirichlet).then(|| 1.0 / e.length);
    (normal, primal)
}

fn map_range<T: Send, G>(n: usize, parallel: bool, g: G) -> Vec<T>
where
    G: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(g).collect()
    } else {
        (0..n).map(g).collect()
    }
}

/// All terms of the bilinear form; local matrices are computed in parallel
/// when `parallel` is set and always merged in triangle and edge order.
pub fn assemble_terms<F>(
    disc: &Discretization,
    regime: &PenaltyRegime,
    f: &F,
    parallel: bool,
) -> Result<BilinearTerms>
where
    F: Fn(Point) -> f64 + Sync,
{
    let rules = Rules::new(disc.k())?;
    let c2 = regime.c_omega() * regime.c_omega();
    let n = disc.n_total();
    let mesh = disc.mesh;

    let volumes = map_range(mesh.num_triangles(), parallel, |t| volume_local(disc, t, c2, f, &rules));
    let nr = disc.rt.local_dim();
    let nl = nr + disc.dg.local_dim();
    let mut divergence = TripletBuilder::with_capacity(n, n, volumes.len() * nr * nr);
    let mut residual = TripletBuilder::with_capacity(n, n, volumes.len() * nl * nl);
    let mut load = vec![0.0; n];
    for (t, local) in volumes.iter().enumerate() {
        let sigma: Vec<usize> = disc.sigma_dofs(t).collect();
        let mut all = sigma.clone();
        all.extend(disc.u_dofs(t));
        divergence.add_block(&sigma, &sigma, &local.divergence);
        residual.add_block(&all, &all, &local.residual);
        for (a, &d) in sigma.iter().enumerate() {
            load[d] += local.load[a];
        }
    }

    let edges = map_range(mesh.num_edges(), parallel, |e| {
        let (nw, pw) = edge_weights(disc, regime, e);
        edge_local(disc, e, nw, pw, &rules.edge)
    });
    let mut normal_jump = TripletBuilder::new(n, n);
    let mut primal_jump = TripletBuilder::new(n, n);
    for local in &edges {
        normal_jump.add_block(&local.sigma_dofs, &local.sigma_dofs, &local.normal);
        primal_jump.add_block(&local.u_dofs, &local.u_dofs, &local.primal);
    }

    Ok(BilinearTerms {
        divergence: divergence.build(),
        residual: residual.build(),
        normal_jump: normal_jump.build(),
        primal_jump: primal_jump.build(),
        load,
    })
}

/// Matrix and right-hand side of the bilinear form on the raw space.
pub fn assemble_bilinear<F>(disc: &Discretization, regime: &PenaltyRegime, f: &F) -> Result<SparseSystem>
where
    F: Fn(Point) -> f64 + Sync,
{
    Ok(assemble_terms(disc, regime, f, false)?.system())
}

/// Same as [`assemble_bilinear`] with optional parallel local assembly.
pub fn assemble_bilinear_with<F>(
    disc: &Discretization,
    regime: &PenaltyRegime,
    f: &F,
    parallel: bool,
) -> Result<SparseSystem>
where
    F: Fn(Point) -> f64 + Sync,
{
    Ok(assemble_terms(disc, regime, f, parallel)?.system())
}

/// Interior and Neumann edges in edge order; these carry the mean-jump constraints.
pub fn constrained_edges(disc: &Discretization) -> Vec<usize> {
    disc.mesh
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| matches!(e.class, BoundaryLabel::Interior | BoundaryLabel::Neumann))
        .map(|(i, _)| i)
        .collect()
}

/// One row per interior or Neumann edge with entries `∫_E [g·n_E] ds`.
pub fn assemble_constraints(disc: &Discretization) -> Result<CsrMatrix> {
    let rule = edge_rule(2 * disc.k() + 2)?;
    let rt = &disc.rt;
    let nr = rt.local_dim();
    let rows = constrained_edges(disc);
    let mut builder = TripletBuilder::new(rows.len(), disc.n_total());
    for (row, &edge) in rows.iter().enumerate() {
        let e = &disc.mesh.edges()[edge];
        let mut sides = vec![(e.t_plus, 1.0)];
        if let Some(tm) = e.t_minus {
            sides.push((tm, -1.0));
        }
        for (t, sign) in sides {
            let trace = disc.side_trace(edge, t, &rule.points);
            for j in 0..rt.per_edge() {
                let local = rt.edge_local_index(trace.local_edge, j);
                let mean: f64 = rule
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(q, w)| w * trace.normal[q * nr + local])
                    .sum();
                builder.push(row, rt.dof(t, local), sign * e.length * mean);
            }
        }
    }
    Ok(builder.build())
}

/// Matrix of `c²‖div τ‖² + ‖τ‖² + ‖∇v‖² + Σ h_E⁻¹‖[v]‖² + Σ h_E‖[τ·n_E]‖²`.
pub fn assemble_norm_matrix(disc: &Discretization, c_omega: f64) -> Result<CsrMatrix> {
    let regime = PenaltyRegime::natural(c_omega)?;
    let terms = assemble_terms(disc, &regime, &|_| 0.0, false)?;
    // Drop the σ–∇u coupling from the residual block.
    let ns = disc.n_sigma();
    let diagonal = CsrMatrix::from_triplets(
        terms.residual.nrows(),
        terms.residual.ncols(),
        terms
            .residual
            .iter()
            .filter(|&(i, j, _)| (i < ns) == (j < ns))
            .collect(),
    );
    Ok(terms
        .divergence
        .add(&diagonal)
        .add(&terms.normal_jump)
        .add(&terms.primal_jump))
}

/// Functional value with its per-triangle split and per-term totals.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalValue {
    pub total: f64,
    pub per_triangle: Vec<f64>,
    pub divergence: f64,
    pub residual: f64,
    pub normal_jump: f64,
    pub primal_jump: f64,
}

fn field_at(ev: &ElementValues, q: usize, sigma: &[f64], u: &[f64]) -> ([f64; 2], f64, [f64; 2]) {
    let (nr, nd) = (ev.n_rt, ev.n_dg);
    let mut s = [0.0; 2];
    let mut div = 0.0;
    for a in 0..nr {
        let v = ev.rt[q * nr + a];
        s[0] += sigma[a] * v[0];
        s[1] += sigma[a] * v[1];
        div += sigma[a] * ev.rt_div[q * nr + a];
    }
    let mut g = [0.0; 2];
    for i in 0..nd {
        let v = ev.dg_grad[q * nd + i];
        g[0] += u[i] * v[0];
        g[1] += u[i] * v[1];
    }
    (s, div, g)
}

/// Evaluates the functional by quadrature; interior-edge terms are split
/// evenly between the two neighbours, boundary-edge terms go to the owner.
pub fn evaluate_functional<F>(
    disc: &Discretization,
    sigma: &[f64],
    u: &[f64],
    f: &F,
    regime: &PenaltyRegime,
) -> Result<FunctionalValue>
where
    F: Fn(Point) -> f64 + Sync,
{
    if sigma.len() != disc.n_sigma() || u.len() != disc.n_u() {
        return Err(Error::SpaceMismatch(format!(
            "coefficient lengths ({}, {}) do not match spaces ({}, {})",
            sigma.len(),
            u.len(),
            disc.n_sigma(),
            disc.n_u()
        )));
    }
    let rules = Rules::new(disc.k())?;
    let c2 = regime.c_omega() * regime.c_omega();
    let mesh = disc.mesh;
    let (nr, nd) = (disc.rt.local_dim(), disc.dg.local_dim());
    let mut out = FunctionalValue {
        total: 0.0,
        per_triangle: vec![0.0; mesh.num_triangles()],
        divergence: 0.0,
        residual: 0.0,
        normal_jump: 0.0,
        primal_jump: 0.0,
    };
    for t in 0..mesh.num_triangles() {
        let ev = disc.element_values(t, &rules.load);
        let sl = &sigma[t * nr..(t + 1) * nr];
        let ul = &u[t * nd..(t + 1) * nd];
        let (mut div_term, mut res_term) = (0.0, 0.0);
        for q in 0..ev.weights.len() {
            let (s, div, g) = field_at(&ev, q, sl, ul);
            let r1 = f(ev.points[q]) + div;
            let r2 = [s[0] - g[0], s[1] - g[1]];
            div_term += ev.weights[q] * c2 * r1 * r1;
            res_term += ev.weights[q] * (r2[0] * r2[0] + r2[1] * r2[1]);
        }
        out.divergence += div_term;
        out.residual += res_term;
        out.per_triangle[t] += div_term + res_term;
    }
    for (edge, e) in mesh.edges().iter().enumerate() {
        let (nw, pw) = edge_weights(disc, regime, edge);
        let mut sides = vec![(e.t_plus, 1.0)];
        if let Some(tm) = e.t_minus {
            sides.push((tm, -1.0));
        }
        let nq = rules.edge.points.len();
        let mut normal_jump = vec![0.0; nq];
        let mut primal_jump = vec![0.0; nq];
        for &(t, sign) in &sides {
            let trace = disc.side_trace(edge, t, &rules.edge.points);
            let sl = &sigma[t * nr..(t + 1) * nr];
            let ul = &u[t * nd..(t + 1) * nd];
            for q in 0..nq {
                let sn: f64 = (0..nr).map(|a| sl[a] * trace.normal[q * nr + a]).sum();
                let uv: f64 = (0..nd).map(|i| ul[i] * trace.dg[q * nd + i]).sum();
                normal_jump[q] += sign * sn;
                primal_jump[q] += sign * uv;
            }
        }
        let integrate = |jump: &[f64]| -> f64 {
            e.length
                * rules
                    .edge
                    .weights
                    .iter()
                    .zip(jump)
                    .map(|(w, j)| w * j * j)
                    .sum::<f64>()
        };
        let mut contribution = 0.0;
        if let Some(w) = nw {
            let v = w * integrate(&normal_jump);
            out.normal_jump += v;
            contribution += v;
        }
        if let Some(w) = pw {
            let v = w * integrate(&primal_jump);
            out.primal_jump += v;
            contribution += v;
        }
        match e.t_minus {
            Some(tm) => {
                out.per_triangle[e.t_plus] += 0.5 * contribution;
                out.per_triangle[tm] += 0.5 * contribution;
            }
            None => out.per_triangle[e.t_plus] += contribution,
        }
    }
    out.total = out.per_triangle.iter().sum();
    Ok(out)
}

/// `‖f‖²` with the quadrature used for the load vector.
pub fn load_norm_squared<F>(disc: &Discretization, f: &F) -> Result<f64>
where
    F: Fn(Point) -> f64,
{
    let rule = triangle_rule(QuadratureDegrees::for_degree(disc.k()).load)?;
    let mut total = 0.0;
    for t in 0..disc.mesh.num_triangles() {
        let g = disc.mesh.geometry(t);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let v = f(g.point(p));
            total += 2.0 * g.area * w * v * v;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_initial_mesh, DomainSpec};

    #[test]
    fn regime_weights() {
        let nat = PenaltyRegime::natural(2.0).unwrap();
        let op = PenaltyRegime::over_penalized(2.0).unwrap();
        assert_eq!(nat.normal_jump_weight(0.5), 0.5);
        assert_eq!(op.normal_jump_weight(0.5), 8.0);
        assert!(PenaltyRegime::new(0, 1.0).is_err());
        assert!(PenaltyRegime::new(1, 0.0).is_err());
    }

    #[test]
    fn matrix_is_symmetric() {
        let mesh = build_initial_mesh(&DomainSpec::rectangle(2.0).unwrap()).unwrap();
        for k in 0..=2 {
            let disc = Discretization::new(&mesh, k).unwrap();
            for regime in [PenaltyRegime::natural(0.7).unwrap(), PenaltyRegime::over_penalized(0.7).unwrap()] {
                let sys = assemble_bilinear(&disc, &regime, &|x: Point| x[0]).unwrap();
                assert!(sys.matrix.symmetry_defect() <= 1e-12 * sys.matrix.max_abs());
            }
        }
    }

    #[test]
    fn constraint_rows() {
        let mesh = build_initial_mesh(&DomainSpec::rectangle(3.0).unwrap()).unwrap();
        let disc = Discretization::new(&mesh, 1).unwrap();
        let c = assemble_constraints(&disc).unwrap();
        let interior = mesh.topology.count(BoundaryLabel::Interior);
        let neumann = mesh.topology.count(BoundaryLabel::Neumann);
        assert_eq!(c.nrows(), interior + neumann);
        for (_, j, _) in c.iter() {
            assert!(j < disc.n_sigma());
        }
    }

    #[test]
    fn zero_data_gives_zero_functional() {
        let mesh = build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap();
        let disc = Discretization::new(&mesh, 1).unwrap();
        let regime = PenaltyRegime::natural(1.0).unwrap();
        let sigma = vec![0.0; disc.n_sigma()];
        let u = vec![0.0; disc.n_u()];
        let value = evaluate_functional(&disc, &sigma, &u, &|_| 0.0, &regime).unwrap();
        assert_eq!(value.total, 0.0);
        assert!(evaluate_functional(&disc, &sigma[1..], &u, &|_| 0.0, &regime).is_err());
    }

    #[test]
    fn parallel_matches_serial() {
        let mesh = build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap().refine_uniform().unwrap();
        let disc = Discretization::new(&mesh, 1).unwrap();
        let regime = PenaltyRegime::over_penalized(0.3).unwrap();
        let f = |x: Point| (x[0] * 3.0).sin() + x[1];
        let a = assemble_bilinear_with(&disc, &regime, &f, false).unwrap();
        let b = assemble_bilinear_with(&disc, &regime, &f, true).unwrap();
        let diff = a.matrix.add(&b.matrix.scaled(-1.0)).max_abs();
        assert!(diff <= 1e-12 * a.matrix.max_abs());
        assert_eq!(a.rhs, b.rhs);
    }
}
