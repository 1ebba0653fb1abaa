//! Gauss quadrature on the reference triangle and the reference edge.
//!
//! Triangle rules are collapsed (Duffy) tensor products of Gauss–Legendre
//! rules, so every weight is positive and any degree up to [`MAX_DEGREE`]
//! is available. The reference triangle is `{(x, y) : x, y >= 0, x + y <= 1}`
//! and the reference edge is `[0, 1]`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Largest polynomial degree for which rules are tabulated.
pub const MAX_DEGREE: usize = 40;

/// Quadrature rule on the reference triangle (area 1/2).
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Barycentric coordinates `(λ0, λ1, λ2)`; the reference point is `(λ1, λ2)`.
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Reference coordinates `(x, y)` of point `q`.
    pub fn reference_point(&self, q: usize) -> [f64; 2] {
        [self.points[q][1], self.points[q][2]]
    }
}

impl EdgeRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`, sorted ascending.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = NonZeroUsize::new(n).expect("at least one Gauss point");
    let rule = GaussLegendre::new(n);
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Rule on `[0, 1]` integrating polynomials of degree `degree` exactly.
pub fn edge_rule(degree: usize) -> Result<EdgeRule> {
    if degree > MAX_DEGREE {
        return Err(Error::QuadratureDegree {
            requested: degree,
            max: MAX_DEGREE,
        });
    }
    let n = degree / 2 + 1;
    let (points, weights) = gauss_legendre_unit(n);
    Ok(EdgeRule {
        points,
        weights,
        degree,
    })
}

/// Rule on the reference triangle integrating bivariate polynomials of
/// total degree `degree` exactly.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    if degree > MAX_DEGREE {
        return Err(Error::QuadratureDegree {
            requested: degree,
            max: MAX_DEGREE,
        });
    }
    // (x, y) = (s, t (1 - s)), Jacobian (1 - s): a monomial of total degree d
    // becomes degree d + 1 in s and degree <= d in t.
    let (s_nodes, s_weights) = gauss_legendre_unit(degree / 2 + 1 + 1);
    let (t_nodes, t_weights) = gauss_legendre_unit(degree / 2 + 1);
    let mut points = Vec::with_capacity(s_nodes.len() * t_nodes.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&s, &ws) in s_nodes.iter().zip(&s_weights) {
        for (&t, &wt) in t_nodes.iter().zip(&t_weights) {
            let x = s;
            let y = t * (1.0 - s);
            points.push([1.0 - x - y, x, y]);
            weights.push(ws * wt * (1.0 - s));
        }
    }
    Ok(TriangleRule {
        points,
        weights,
        degree,
    })
}

/// Exact integral of `x^a y^b` over the reference triangle: `a! b! / (a + b + 2)!`.
pub fn reference_monomial_moment(a: usize, b: usize) -> f64 {
    // Evaluated as a product of ratios to stay finite for large exponents.
    let mut value = 1.0;
    for i in 1..=b {
        value *= i as f64 / (a + i) as f64;
    }
    value / ((a + b + 1) as f64 * (a + b + 2) as f64)
}
