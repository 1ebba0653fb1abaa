//! Exact errors of a discrete solution.

use super::ExactSolution;
use crate::assembly::QuadratureDegrees;
use crate::error::Result;
use crate::mesh::BoundaryLabel;
use crate::quadrature::{edge_rule, triangle_rule};
use crate::scheme::DiscreteSolution;
use crate::spaces::Discretization;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    /// `‖∇_pw(u − u_h)‖`.
    pub energy: f64,
    /// `‖∇u‖`.
    pub exact_energy: f64,
    pub energy_rel: f64,
    /// `‖σ − σ_h‖` with `σ = ∇u`.
    pub flux: f64,
    /// `‖div_pw(σ − σ_h)‖` with `div σ = −f` (unweighted).
    pub divergence: f64,
    /// `j(u_h) = (Σ h_E⁻¹‖[u_h]‖²)^{1/2}` over interior and Dirichlet edges.
    pub jump: f64,
    /// `(c²‖div(σ − σ_h)‖² + ‖σ − σ_h‖² + ‖∇_pw(u − u_h)‖² + j²(u_h))^{1/2}`.
    pub weighted: f64,
}

/// Errors of `solution` against `exact` by over-integrated quadrature.
pub fn compute_errors(
    disc: &Discretization,
    solution: &DiscreteSolution,
    exact: &ExactSolution,
    c_omega: f64,
) -> Result<ErrorNorms> {
    let degrees = QuadratureDegrees::for_degree(disc.k());
    let rule = triangle_rule(degrees.load)?;
    let (nr, nd) = (disc.rt.local_dim(), disc.dg.local_dim());
    let (mut energy, mut exact_energy, mut flux, mut divergence) = (0.0, 0.0, 0.0, 0.0);
    for t in 0..disc.mesh.num_triangles() {
        let ev = disc.element_values(t, &rule);
        let sl = &solution.sigma[t * nr..(t + 1) * nr];
        let ul = &solution.u[t * nd..(t + 1) * nd];
        for q in 0..ev.weights.len() {
            let w = ev.weights[q];
            let x = ev.points[q];
            let g = exact.grad(x);
            let mut s = [0.0; 2];
            let mut div = 0.0;
            for a in 0..nr {
                let v = ev.rt[q * nr + a];
                s[0] += sl[a] * v[0];
                s[1] += sl[a] * v[1];
                div += sl[a] * ev.rt_div[q * nr + a];
            }
            let mut gu = [0.0; 2];
            for i in 0..nd {
                let v = ev.dg_grad[q * nd + i];
                gu[0] += ul[i] * v[0];
                gu[1] += ul[i] * v[1];
            }
            let sq = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
            energy += w * sq(g, gu);
            exact_energy += w * (g[0] * g[0] + g[1] * g[1]);
            flux += w * sq(g, s);
            let d = -exact.f(x) - div;
            divergence += w * d * d;
        }
    }

    let erule = edge_rule(degrees.edge)?;
    let mut jump = 0.0;
    for (edge, e) in disc.mesh.edges().iter().enumerate() {
        if e.class == BoundaryLabel::Neumann {
            continue;
        }
        let mut values = vec![0.0; erule.points.len()];
        let mut sides = vec![(e.t_plus, 1.0)];
        if let Some(tm) = e.t_minus {
            sides.push((tm, -1.0));
        }
        for (t, sign) in sides {
            let trace = disc.side_trace(edge, t, &erule.points);
            let ul = &solution.u[t * nd..(t + 1) * nd];
            for (q, v) in values.iter_mut().enumerate() {
                *v += sign * (0..nd).map(|i| ul[i] * trace.dg[q * nd + i]).sum::<f64>();
            }
        }
        // h_E⁻¹ cancels the edge measure |E| = h_E.
        jump += erule.weights.iter().zip(&values).map(|(w, v)| w * v * v).sum::<f64>();
    }

    let c2 = c_omega * c_omega;
    let weighted = (c2 * divergence + flux + energy + jump).sqrt();
    let (energy, exact_energy) = (energy.sqrt(), exact_energy.sqrt());
    Ok(ErrorNorms {
        energy,
        exact_energy,
        energy_rel: if exact_energy > 0.0 { energy / exact_energy } else { energy },
        flux: flux.sqrt(),
        divergence: divergence.sqrt(),
        jump: jump.sqrt(),
        weighted,
    })
}
