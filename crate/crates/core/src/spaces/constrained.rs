//! Basis of the flux space with vanishing mean normal jumps on interior and
//! Neumann edges.
//!
//! Per edge side the `k+1` edge functions sum to the lowest-order function
//! `ψ_{E,±}`. Each edge function `ψ_{E,j}` is corrected by
//! `ψ̃_{E,j} = ψ_{E,j} − α_{E,j} ψ_{E,±}` with `α_{E,j}` its share of the mean
//! normal jump, so every `ψ̃_{E,j}` has zero mean jump. The last function of
//! each side is linearly dependent on the others and dropped. Conforming
//! lowest-order functions `ψ_E` cover interior and Dirichlet edges.

use nalgebra::DMatrix;

use super::Discretization;
use crate::error::{Error, Result};
use crate::mesh::BoundaryLabel;
use crate::quadrature::edge_rule;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSide {
    Plus,
    Minus,
}

impl EdgeSide {
    fn sign(self) -> f64 {
        match self {
            EdgeSide::Plus => 1.0,
            EdgeSide::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstrainedFunction {
    /// `ψ_E` on an interior or Dirichlet edge.
    LowestOrder { edge: usize },
    /// `ψ̃_{E,j}` on an interior-edge side or a Neumann edge.
    Corrected { edge: usize, side: EdgeSide, j: usize },
    /// Uncorrected higher-order `ψ_{E,j}` on a Dirichlet edge.
    Dirichlet { edge: usize, j: usize },
    Interior { triangle: usize, m: usize },
}

/// `α_{E,j}` for each side of an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeAlphas {
    pub plus: Vec<f64>,
    pub minus: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ConstrainedRtBasis {
    functions: Vec<ConstrainedFunction>,
    /// Raw flux coefficients of each function.
    columns: Vec<Vec<(usize, f64)>>,
    alphas: Vec<EdgeAlphas>,
    dropped: Vec<(usize, EdgeSide, usize)>,
    raw_dim: usize,
}

impl ConstrainedRtBasis {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn raw_dim(&self) -> usize {
        self.raw_dim
    }

    pub fn functions(&self) -> &[ConstrainedFunction] {
        &self.functions
    }

    pub fn column(&self, i: usize) -> &[(usize, f64)] {
        &self.columns[i]
    }

    pub fn alphas(&self, edge: usize) -> &EdgeAlphas {
        &self.alphas[edge]
    }

    /// `(edge, side, j)` of every dropped edge function.
    pub fn dropped(&self) -> &[(usize, EdgeSide, usize)] {
        &self.dropped
    }

    /// Raw flux coefficients of `Σ_i coeffs[i] g_i`.
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.len());
        let mut raw = vec![0.0; self.raw_dim];
        for (col, &c) in self.columns.iter().zip(coeffs) {
            for &(r, v) in col {
                raw[r] += c * v;
            }
        }
        raw
    }

    /// Change of basis from `Σ × U` to the raw `RT^{k,pw} × U` numbering.
    pub fn transform(&self, n_primal: usize) -> CsrMatrix {
        let mut entries: Vec<(usize, usize, f64)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
            .collect();
        let n = self.len();
        entries.extend((0..n_primal).map(|i| (self.raw_dim + i, n + i, 1.0)));
        CsrMatrix::from_triplets(self.raw_dim + n_primal, n + n_primal, entries)
    }
}

/// Builds the constrained flux basis and validates its span edge by edge.
pub fn build_constrained_basis(disc: &Discretization) -> Result<ConstrainedRtBasis> {
    let mesh = disc.mesh;
    let rt = &disc.rt;
    let k = rt.k();
    let per_edge = rt.per_edge();
    let rule = edge_rule(2 * k + 2)?;

    let mut functions = Vec::new();
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut alphas = Vec::with_capacity(mesh.num_edges());
    let mut dropped = Vec::new();

    for (e, edge) in mesh.edges().iter().enumerate() {
        let mut sides = vec![(EdgeSide::Plus, edge.t_plus)];
        if let Some(tm) = edge.t_minus {
            sides.push((EdgeSide::Minus, tm));
        }
        // Raw dofs of the edge functions per side, and α per side.
        let mut side_dofs = Vec::new();
        let mut side_alphas = Vec::new();
        for &(side, t) in &sides {
            let trace = disc.side_trace(e, t, &rule.points);
            let i = trace.local_edge;
            let n_rt = rt.local_dim();
            let dofs: Vec<usize> = (0..per_edge)
                .map(|j| rt.dof(t, rt.edge_local_index(i, j)))
                .collect();
            let alpha: Vec<f64> = (0..per_edge)
                .map(|j| {
                    let local = rt.edge_local_index(i, j);
                    let mean: f64 = rule
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(q, w)| w * trace.normal[q * n_rt + local])
                        .sum();
                    side.sign() * mean
                })
                .collect();
            side_dofs.push(dofs);
            side_alphas.push(alpha);
        }

        let first = functions.len();
        let all_of = |s: usize| -> Vec<(usize, f64)> {
            let sign = sides[s].0.sign();
            side_dofs[s].iter().map(|&d| (d, sign)).collect()
        };
        let corrected = |s: usize, j: usize| -> Vec<(usize, f64)> {
            let sign = sides[s].0.sign();
            let a = &side_alphas[s];
            side_dofs[s]
                .iter()
                .enumerate()
                .map(|(m, &d)| {
                    let delta = if m == j { 1.0 } else { 0.0 };
                    (d, sign * (delta - a[j]))
                })
                .collect()
        };
        match edge.class {
            BoundaryLabel::Interior => {
                let mut col = all_of(0);
                col.extend(all_of(1));
                functions.push(ConstrainedFunction::LowestOrder { edge: e });
                columns.push(col);
                for (s, &(side, _)) in sides.iter().enumerate() {
                    for j in 0..k {
                        functions.push(ConstrainedFunction::Corrected { edge: e, side, j });
                        columns.push(corrected(s, j));
                    }
                    dropped.push((e, side, k));
                }
            }
            BoundaryLabel::Neumann => {
                for j in 0..k {
                    functions.push(ConstrainedFunction::Corrected {
                        edge: e,
                        side: EdgeSide::Plus,
                        j,
                    });
                    columns.push(corrected(0, j));
                }
                dropped.push((e, EdgeSide::Plus, k));
            }
            BoundaryLabel::Dirichlet => {
                functions.push(ConstrainedFunction::LowestOrder { edge: e });
                columns.push(all_of(0));
                for j in 0..k {
                    functions.push(ConstrainedFunction::Dirichlet { edge: e, j });
                    columns.push(vec![(side_dofs[0][j], 1.0)]);
                }
                dropped.push((e, EdgeSide::Plus, k));
            }
        }

        let raw: Vec<usize> = side_dofs.iter().flatten().copied().collect();
        validate_rank(e, &raw, &columns[first..])?;
        alphas.push(EdgeAlphas {
            plus: side_alphas[0].clone(),
            minus: side_alphas.get(1).cloned(),
        });
    }

    for t in 0..mesh.num_triangles() {
        for m in 0..rt.num_interior() {
            functions.push(ConstrainedFunction::Interior { triangle: t, m });
            columns.push(vec![(rt.dof(t, rt.interior_local_index(m)), 1.0)]);
        }
    }

    Ok(ConstrainedRtBasis {
        functions,
        columns,
        alphas,
        dropped,
        raw_dim: rt.dim(),
    })
}

fn validate_rank(edge: usize, raw: &[usize], columns: &[Vec<(usize, f64)>]) -> Result<()> {
    if columns.is_empty() {
        return Ok(());
    }
    let mut block = DMatrix::zeros(raw.len(), columns.len());
    for (c, col) in columns.iter().enumerate() {
        for &(dof, v) in col {
            let r = raw.iter().position(|&d| d == dof).expect("column lives on this edge");
            block[(r, c)] = v;
        }
    }
    let sv = block.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-10 * max).count();
    if rank < columns.len() {
        return Err(Error::RankDeficient {
            location: format!("constrained flux functions of edge {edge}"),
            rank,
            expected: columns.len(),
        });
    }
    Ok(())
}
