//! Discrete spaces: discontinuous `P^{k+1}` for the primal variable,
//! piecewise Raviart–Thomas fluxes, and the mean-jump-constrained flux basis.

mod constrained;
mod rt;
mod scalar;

use std::ops::Range;

pub use constrained::{build_constrained_basis, ConstrainedFunction, ConstrainedRtBasis, EdgeSide};
pub use rt::{eval_rt_basis, rt_local_dimension, RtPointValues, RtSpace};
pub use scalar::{dg_dofmap, local_dimension as dg_local_dimension, DgPointValues, DgSpace};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point, TriangleGeometry};
use crate::quadrature::TriangleRule;

/// Flux and primal spaces on one mesh, numbered `[σ dofs | u dofs]`.
#[derive(Debug, Clone)]
pub struct Discretization<'m> {
    pub mesh: &'m Mesh,
    pub rt: RtSpace,
    pub dg: DgSpace,
}

/// All local basis data of one triangle at the points of a rule.
#[derive(Debug, Clone)]
pub struct ElementValues {
    pub geometry: TriangleGeometry,
    /// Physical quadrature weights (summing to `|T|`).
    pub weights: Vec<f64>,
    pub points: Vec<Point>,
    pub n_rt: usize,
    pub n_dg: usize,
    /// `n_points × n_rt`, row-major.
    pub rt: Vec<[f64; 2]>,
    pub rt_div: Vec<f64>,
    /// `n_points × n_dg`, row-major.
    pub dg: Vec<f64>,
    pub dg_grad: Vec<[f64; 2]>,
}

/// Traces on one side of an edge at points of the edge parameter.
#[derive(Debug, Clone)]
pub struct SideTrace {
    pub triangle: usize,
    pub local_edge: usize,
    /// `n_points × n_rt`: `φ·n_E` with the edge's fixed normal.
    pub normal: Vec<f64>,
    /// `n_points × n_dg`.
    pub dg: Vec<f64>,
}

impl<'m> Discretization<'m> {
    /// `RT^{k,pw} × P^{k+1}` on `mesh`.
    pub fn new(mesh: &'m Mesh, k: usize) -> Result<Self> {
        let rt = RtSpace::new(mesh, k)?;
        let dg = DgSpace::new(mesh, k + 1)?;
        Self::from_spaces(mesh, rt, dg)
    }

    pub fn from_spaces(mesh: &'m Mesh, rt: RtSpace, dg: DgSpace) -> Result<Self> {
        let expected = (mesh.generation, mesh.num_triangles());
        for (name, found) in [
            ("flux", (rt.generation(), rt.num_triangles())),
            ("primal", (dg.generation(), dg.num_triangles())),
        ] {
            if found != expected {
                return Err(Error::SpaceMismatch(format!(
                    "{name} space built for generation {} with {} triangles, mesh is generation {} with {}",
                    found.0, found.1, expected.0, expected.1
                )));
            }
        }
        if dg.degree() != rt.k() + 1 {
            return Err(Error::SpaceMismatch(format!(
                "primal degree {} does not match flux degree {}",
                dg.degree(),
                rt.k()
            )));
        }
        Ok(Self { mesh, rt, dg })
    }

    pub fn k(&self) -> usize {
        self.rt.k()
    }

    pub fn n_sigma(&self) -> usize {
        self.rt.dim()
    }

    pub fn n_u(&self) -> usize {
        self.dg.dim()
    }

    pub fn n_total(&self) -> usize {
        self.n_sigma() + self.n_u()
    }

    pub fn sigma_dofs(&self, t: usize) -> Range<usize> {
        let n = self.rt.local_dim();
        t * n..(t + 1) * n
    }

    pub fn u_dofs(&self, t: usize) -> Range<usize> {
        let n = self.dg.local_dim();
        let start = self.n_sigma() + t * n;
        start..start + n
    }

    pub fn element_values(&self, t: usize, rule: &TriangleRule) -> ElementValues {
        let geometry = self.mesh.geometry(t);
        let (n_rt, n_dg) = (self.rt.local_dim(), self.dg.local_dim());
        let nq = rule.len();
        let mut out = ElementValues {
            weights: rule.weights.iter().map(|w| 2.0 * geometry.area * w).collect(),
            points: rule.points.iter().map(|p| geometry.point(p)).collect(),
            n_rt,
            n_dg,
            rt: Vec::with_capacity(nq * n_rt),
            rt_div: Vec::with_capacity(nq * n_rt),
            dg: Vec::with_capacity(nq * n_dg),
            dg_grad: Vec::with_capacity(nq * n_dg),
            geometry,
        };
        for p in &rule.points {
            let r = self.rt.eval(t, &out.geometry, p);
            out.rt.extend_from_slice(&r.values);
            out.rt_div.extend_from_slice(&r.divergence);
            let d = self.dg.eval(p);
            out.dg.extend_from_slice(&d.values);
            out.dg_grad
                .extend((0..n_dg).map(|i| d.gradient(i, &out.geometry)));
        }
        out
    }

    /// Local edge index of global edge `edge` in triangle `t`.
    pub fn local_edge(&self, t: usize, edge: usize) -> usize {
        self.mesh.topology.triangle_edges[t]
            .iter()
            .position(|l| l.edge == edge)
            .expect("triangle is adjacent to the edge")
    }

    /// Traces from triangle `t` on `edge` at edge parameters `s`.
    pub fn side_trace(&self, edge: usize, t: usize, s: &[f64]) -> SideTrace {
        let i = self.local_edge(t, edge);
        let aligned = self.mesh.topology.triangle_edges[t][i].aligned;
        let n = self.mesh.topology.edges[edge].normal;
        let geom = self.mesh.geometry(t);
        let (n_rt, n_dg) = (self.rt.local_dim(), self.dg.local_dim());
        let mut normal = Vec::with_capacity(s.len() * n_rt);
        let mut dg = Vec::with_capacity(s.len() * n_dg);
        for &sq in s {
            let lambda = edge_lambda(i, aligned, sq);
            let r = self.rt.eval(t, &geom, &lambda);
            normal.extend(r.values.iter().map(|v| v[0] * n[0] + v[1] * n[1]));
            dg.extend_from_slice(&self.dg.eval(&lambda).values);
        }
        SideTrace {
            triangle: t,
            local_edge: i,
            normal,
            dg,
        }
    }
}

/// Barycentric coordinates of the point at global edge parameter `s` on local edge `i`.
pub(crate) fn edge_lambda(i: usize, aligned: bool, s: f64) -> [f64; 3] {
    let mut lambda = [0.0; 3];
    let (first, second) = ((i + 1) % 3, (i + 2) % 3);
    if aligned {
        lambda[first] = 1.0 - s;
        lambda[second] = s;
    } else {
        lambda[first] = s;
        lambda[second] = 1.0 - s;
    }
    lambda
}
