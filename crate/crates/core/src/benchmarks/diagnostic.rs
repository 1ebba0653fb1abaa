//! Why the natural penalty needs the mean-jump side condition.
//!
//! The continuous piecewise affine `w_h` with value 1 at every free vertex
//! and 0 on the Dirichlet boundary makes
//! `Σ_E (1, w_h)_E / ‖∇w_h‖` grow like `h^{−1/2}` while
//! `(Σ h_E²)^{1/2}` stays bounded, so no uniform bound can hold without it.

use crate::mesh::{BoundaryLabel, Mesh};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideConditionDiagnostic {
    /// `Σ_{E ∈ E(Ω) ∪ E(Γ_N)} ∫_E w_h ds / ‖∇w_h‖`.
    pub lhs: f64,
    /// `(Σ_{E ∈ E(Ω) ∪ E(Γ_N)} h_E²)^{1/2}`.
    pub rhs: f64,
    pub edge_integral: f64,
    pub gradient_norm: f64,
}

pub fn side_condition_diagnostic(mesh: &Mesh) -> SideConditionDiagnostic {
    let w: Vec<f64> = mesh
        .vertices
        .iter()
        .map(|v| if v.label == BoundaryLabel::Dirichlet { 0.0 } else { 1.0 })
        .collect();
    let (mut edge_integral, mut h_sq) = (0.0, 0.0);
    for e in mesh.edges() {
        if e.class == BoundaryLabel::Dirichlet {
            continue;
        }
        let [a, b] = e.vertices;
        edge_integral += e.length * 0.5 * (w[a] + w[b]);
        h_sq += e.length * e.length;
    }
    let mut grad_sq = 0.0;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let g = mesh.geometry(t);
        let mut grad = [0.0; 2];
        for (i, &v) in tri.vertices.iter().enumerate() {
            grad[0] += w[v] * g.grad_lambda[i][0];
            grad[1] += w[v] * g.grad_lambda[i][1];
        }
        grad_sq += g.area * (grad[0] * grad[0] + grad[1] * grad[1]);
    }
    let gradient_norm = grad_sq.sqrt();
    SideConditionDiagnostic {
        lhs: edge_integral / gradient_norm,
        rhs: h_sq.sqrt(),
        edge_integral,
        gradient_norm,
    }
}
