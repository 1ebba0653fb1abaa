//! Discontinuous scalar space `P^{k+1}` with a per-triangle orthonormal modal basis.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, TriangleGeometry};
use crate::quadrature::reference_monomial_moment;

/// Orthonormalized monomials in the reference coordinates `ξ = λ₁`, `η = λ₂`.
///
/// The local mass matrix on a triangle `T` is `|T|·I`. Global numbering is
/// triangle-blocked: dof `t·n + i` is basis function `i` on triangle `t`.
#[derive(Debug, Clone)]
pub struct DgSpace {
    degree: usize,
    exponents: Vec<(usize, usize)>,
    /// Row-major lower-triangular transform from monomials to the orthonormal basis.
    coeffs: Vec<f64>,
    num_triangles: usize,
    generation: u64,
}

/// Values and reference derivatives of the local basis at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct DgPointValues {
    pub values: Vec<f64>,
    pub d_xi: Vec<f64>,
    pub d_eta: Vec<f64>,
}

impl DgPointValues {
    /// Physical gradient of basis function `i`.
    pub fn gradient(&self, i: usize, geom: &TriangleGeometry) -> [f64; 2] {
        let [g1, g2] = [geom.grad_lambda[1], geom.grad_lambda[2]];
        [
            self.d_xi[i] * g1[0] + self.d_eta[i] * g2[0],
            self.d_xi[i] * g1[1] + self.d_eta[i] * g2[1],
        ]
    }
}

pub fn local_dimension(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

impl DgSpace {
    /// Scalar space of polynomial degree `degree` on `mesh`.
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        let exponents: Vec<(usize, usize)> = (0..=degree)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .collect();
        let n = exponents.len();
        let gram = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (exponents[i].0 + exponents[j].0, exponents[i].1 + exponents[j].1);
            2.0 * reference_monomial_moment(a, b)
        });
        let chol = gram.cholesky().ok_or(Error::RankDeficient {
            location: "scalar basis".into(),
            rank: 0,
            expected: n,
        })?;
        let l_inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .expect("Cholesky factor is nonsingular");
        let coeffs = (0..n * n).map(|idx| l_inv[(idx / n, idx % n)]).collect();
        Ok(Self {
            degree,
            exponents,
            coeffs,
            num_triangles: mesh.num_triangles(),
            generation: mesh.generation,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn local_dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn dim(&self) -> usize {
        self.num_triangles * self.local_dim()
    }

    pub fn num_triangles(&self) -> usize {
        self.num_triangles
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn dof(&self, t: usize, i: usize) -> usize {
        t * self.local_dim() + i
    }

    /// Basis values at barycentric point `lambda`; identical on every triangle.
    pub fn eval(&self, lambda: &[f64; 3]) -> DgPointValues {
        let (xi, eta) = (lambda[1], lambda[2]);
        let n = self.local_dim();
        let mut mono = vec![0.0; n];
        let mut m_xi = vec![0.0; n];
        let mut m_eta = vec![0.0; n];
        for (m, &(a, b)) in self.exponents.iter().enumerate() {
            mono[m] = xi.powi(a as i32) * eta.powi(b as i32);
            if a > 0 {
                m_xi[m] = a as f64 * xi.powi(a as i32 - 1) * eta.powi(b as i32);
            }
            if b > 0 {
                m_eta[m] = b as f64 * xi.powi(a as i32) * eta.powi(b as i32 - 1);
            }
        }
        let mut out = DgPointValues {
            values: vec![0.0; n],
            d_xi: vec![0.0; n],
            d_eta: vec![0.0; n],
        };
        for i in 0..n {
            for j in 0..=i {
                let c = self.coeffs[i * n + j];
                out.values[i] += c * mono[j];
                out.d_xi[i] += c * m_xi[j];
                out.d_eta[i] += c * m_eta[j];
            }
        }
        out
    }
}

/// Scalar space `P^{degree}` on `mesh`.
pub fn dg_dofmap(mesh: &Mesh, degree: usize) -> Result<DgSpace> {
    DgSpace::new(mesh, degree)
}
