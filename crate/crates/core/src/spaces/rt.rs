//! Piecewise Raviart–Thomas space `RT^{k,pw}`.
//!
//! Local functions on a triangle with vertices `P₀, P₁, P₂`:
//!
//! * edge functions `φ_{i,j}(x) = |E_i|/(2|T|) (x − P_i) ℓ_j(s)` for the edge `E_i`
//!   opposite `P_i`, where `ℓ_j` is the Lagrange polynomial at the `j`-th
//!   Gauss–Legendre node of `[0, 1]` and `s` is the edge parameter running from
//!   the smaller to the larger global vertex id. The outward normal trace of
//!   `φ_{i,j}` is `ℓ_j(s)` on `E_i` and zero on the other two edges, so the
//!   `k+1` functions of one edge sum to the lowest-order function.
//! * interior functions spanned by `(x − P_i) λ_i λ₁^a λ₂^b`, `i ∈ {0, 1}`,
//!   `a + b < k`, orthonormalized per triangle in `L²(T)` (scaled by `|T|`).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TriangleGeometry};
use crate::quadrature::{gauss_legendre_unit, triangle_rule};

/// Local dimension `(k+1)(k+3)`.
pub fn rt_local_dimension(k: usize) -> usize {
    (k + 1) * (k + 3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RtPointValues {
    pub values: Vec<[f64; 2]>,
    pub divergence: Vec<f64>,
}

#[derive(Debug, Clone)]
struct Shape {
    k: usize,
    nodes: Vec<f64>,
    interior: Vec<(usize, usize, usize)>,
}

impl Shape {
    fn new(k: usize) -> Self {
        let (nodes, _) = gauss_legendre_unit(k + 1);
        let mut interior = Vec::new();
        for i in 0..2 {
            for d in 0..k {
                for b in 0..=d {
                    interior.push((i, d - b, b));
                }
            }
        }
        Self { k, nodes, interior }
    }

    fn n_edge(&self) -> usize {
        self.k + 1
    }

    fn n_local(&self) -> usize {
        3 * self.n_edge() + self.interior.len()
    }

    /// `ℓ_j(s)` and its derivative.
    fn lagrange(&self, j: usize, s: f64) -> (f64, f64) {
        let tj = self.nodes[j];
        let mut value = 1.0;
        let mut deriv = 0.0;
        for (m, &tm) in self.nodes.iter().enumerate() {
            if m == j {
                continue;
            }
            let factor = (s - tm) / (tj - tm);
            deriv = deriv * factor + value / (tj - tm);
            value *= factor;
        }
        (value, deriv)
    }

    /// Edge functions and raw (untransformed) interior functions.
    fn eval_raw(
        &self,
        geom: &TriangleGeometry,
        aligned: &[bool; 3],
        lambda: &[f64; 3],
    ) -> RtPointValues {
        let n = self.n_local();
        let mut values = vec![[0.0; 2]; n];
        let mut divergence = vec![0.0; n];
        let x = geom.point(lambda);
        let two_area = 2.0 * geom.area;
        for i in 0..3 {
            let p = geom.vertices[i];
            let r = [x[0] - p[0], x[1] - p[1]];
            let c = geom.edge_lengths[i] / two_area;
            let pv = if aligned[i] { (i + 2) % 3 } else { (i + 1) % 3 };
            let g = geom.grad_lambda[pv];
            let r_dot_g = r[0] * g[0] + r[1] * g[1];
            for j in 0..self.n_edge() {
                let (l, dl) = self.lagrange(j, lambda[pv]);
                let idx = i * self.n_edge() + j;
                values[idx] = [c * r[0] * l, c * r[1] * l];
                divergence[idx] = c * (2.0 * l + dl * r_dot_g);
            }
        }
        let (l1, l2) = (lambda[1], lambda[2]);
        let [g1, g2] = [geom.grad_lambda[1], geom.grad_lambda[2]];
        for (m, &(i, a, b)) in self.interior.iter().enumerate() {
            let p = geom.vertices[i];
            let r = [x[0] - p[0], x[1] - p[1]];
            let c = geom.edge_lengths[i] / two_area;
            let mono = l1.powi(a as i32) * l2.powi(b as i32);
            let d1 = if a > 0 { a as f64 * l1.powi(a as i32 - 1) * l2.powi(b as i32) } else { 0.0 };
            let d2 = if b > 0 { b as f64 * l1.powi(a as i32) * l2.powi(b as i32 - 1) } else { 0.0 };
            let q = lambda[i] * mono;
            let gi = geom.grad_lambda[i];
            let grad_q = [
                gi[0] * mono + lambda[i] * (d1 * g1[0] + d2 * g2[0]),
                gi[1] * mono + lambda[i] * (d1 * g1[1] + d2 * g2[1]),
            ];
            let idx = 3 * self.n_edge() + m;
            values[idx] = [c * r[0] * q, c * r[1] * q];
            divergence[idx] = c * (2.0 * q + r[0] * grad_q[0] + r[1] * grad_q[1]);
        }
        RtPointValues { values, divergence }
    }

    /// Transform `T` with `ψ_m = Σ_n T[m][n] χ_n` and `∫_T ψ_m·ψ_n = |T| δ_mn`.
    fn interior_transform(&self, geom: &TriangleGeometry, aligned: &[bool; 3]) -> Result<Vec<f64>> {
        let n_int = self.interior.len();
        if n_int == 0 {
            return Ok(Vec::new());
        }
        let rule = triangle_rule(2 * self.k + 2)?;
        let offset = 3 * self.n_edge();
        let mut gram = DMatrix::zeros(n_int, n_int);
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let v = self.eval_raw(geom, aligned, p);
            let weight = 2.0 * geom.area * w;
            for a in 0..n_int {
                for b in 0..=a {
                    let (va, vb) = (v.values[offset + a], v.values[offset + b]);
                    gram[(a, b)] += weight * (va[0] * vb[0] + va[1] * vb[1]);
                }
            }
        }
        for a in 0..n_int {
            for b in 0..a {
                gram[(b, a)] = gram[(a, b)];
            }
        }
        // Scale-free independence check before factorizing.
        let scaled = &gram / geom.area;
        let eig = scaled.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
        if !(min > 1e-10 * max) {
            let rank = eig.eigenvalues.iter().filter(|&&e| e > 1e-10 * max).count();
            return Err(Error::RankDeficient {
                location: "interior flux functions".into(),
                rank,
                expected: n_int,
            });
        }
        let chol = scaled.cholesky().expect("positive definite after eigenvalue check");
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n_int, n_int))
            .expect("Cholesky factor is nonsingular");
        Ok((0..n_int * n_int).map(|idx| l_inv[(idx / n_int, idx % n_int)]).collect())
    }

    fn apply_transform(&self, raw: &mut RtPointValues, transform: &[f64]) {
        let n_int = self.interior.len();
        if n_int == 0 {
            return;
        }
        let offset = 3 * self.n_edge();
        let vals: Vec<[f64; 2]> = raw.values[offset..].to_vec();
        let divs: Vec<f64> = raw.divergence[offset..].to_vec();
        for m in 0..n_int {
            let mut v = [0.0; 2];
            let mut d = 0.0;
            for n in 0..=m {
                let c = transform[m * n_int + n];
                v[0] += c * vals[n][0];
                v[1] += c * vals[n][1];
                d += c * divs[n];
            }
            raw.values[offset + m] = v;
            raw.divergence[offset + m] = d;
        }
    }
}

/// `RT^{k,pw}` on a fixed mesh with triangle-blocked numbering.
///
/// Local index `i·(k+1) + j` is edge function `j` of local edge `i`;
/// indices from `3(k+1)` on are the interior functions.
#[derive(Debug, Clone)]
pub struct RtSpace {
    shape: Shape,
    aligned: Vec<[bool; 3]>,
    transforms: Vec<Vec<f64>>,
    generation: u64,
}

impl RtSpace {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        let shape = Shape::new(k);
        let mut aligned = Vec::with_capacity(mesh.num_triangles());
        let mut transforms = Vec::with_capacity(mesh.num_triangles());
        for t in 0..mesh.num_triangles() {
            let geom = mesh.geometry(t);
            if !(geom.area > 0.0) {
                return Err(Error::DegenerateTriangle(t));
            }
            let flags = mesh.topology.triangle_edges[t].map(|l| l.aligned);
            transforms.push(shape.interior_transform(&geom, &flags)?);
            aligned.push(flags);
        }
        Ok(Self {
            shape,
            aligned,
            transforms,
            generation: mesh.generation,
        })
    }

    pub fn k(&self) -> usize {
        self.shape.k
    }

    pub fn local_dim(&self) -> usize {
        self.shape.n_local()
    }

    pub fn num_triangles(&self) -> usize {
        self.aligned.len()
    }

    pub fn dim(&self) -> usize {
        self.num_triangles() * self.local_dim()
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Number of edge functions per local edge.
    pub fn per_edge(&self) -> usize {
        self.shape.n_edge()
    }

    pub fn edge_local_index(&self, local_edge: usize, j: usize) -> usize {
        local_edge * self.per_edge() + j
    }

    pub fn interior_local_index(&self, m: usize) -> usize {
        3 * self.per_edge() + m
    }

    pub fn num_interior(&self) -> usize {
        self.shape.interior.len()
    }

    pub fn dof(&self, t: usize, local: usize) -> usize {
        t * self.local_dim() + local
    }

    /// Gauss–Legendre nodes on `[0, 1]` carrying the edge functions.
    pub fn edge_nodes(&self) -> &[f64] {
        &self.shape.nodes
    }

    pub fn eval(&self, t: usize, geom: &TriangleGeometry, lambda: &[f64; 3]) -> RtPointValues {
        let mut out = self.shape.eval_raw(geom, &self.aligned[t], lambda);
        self.shape.apply_transform(&mut out, &self.transforms[t]);
        out
    }
}

/// Values and divergences of the local `RT^k` basis of one triangle at barycentric points.
///
/// Edge parameters run from local vertex `i+1` to `i+2` on edge `i`.
pub fn eval_rt_basis(
    geom: &TriangleGeometry,
    k: usize,
    points: &[[f64; 3]],
) -> Result<Vec<RtPointValues>> {
    if !(geom.area.abs() > 0.0) || !geom.area.is_finite() {
        return Err(Error::DegenerateTriangle(0));
    }
    let shape = Shape::new(k);
    let aligned = [true; 3];
    let transform = shape.interior_transform(geom, &aligned)?;
    Ok(points
        .iter()
        .map(|p| {
            let mut v = shape.eval_raw(geom, &aligned, p);
            shape.apply_transform(&mut v, &transform);
            v
        })
        .collect())
}
