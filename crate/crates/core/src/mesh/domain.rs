//! Initial triangulations of the benchmark domains.
//!
//! Every domain is a union of axis-aligned squares, each cut by both
//! diagonals and both midlines into eight right isosceles triangles.
//! Vertices live on an integer lattice of half squares until the final
//! scaling, which keeps the vertex deduplication exact.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{BoundaryKind, Mesh, Point, Triangle, TriangleGeometry};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    /// `(0, ℓ)²`, Dirichlet everywhere.
    Square,
    /// `(0, ℓ) × (0, 1)` built from `ℓ` unit squares, Dirichlet left and right, Neumann elsewhere.
    Rectangle,
    /// `(-ℓ, ℓ)² \ [0, ℓ)²`, Dirichlet everywhere.
    LShape,
}

impl DomainKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainKind::Square => "square",
            DomainKind::Rectangle => "rectangle",
            DomainKind::LShape => "lshape",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "square" => Ok(DomainKind::Square),
            "rectangle" => Ok(DomainKind::Rectangle),
            "lshape" | "l-shape" => Ok(DomainKind::LShape),
            other => Err(format!("unknown domain '{other}' (expected square, rectangle or lshape)")),
        }
    }
}

/// A benchmark domain with its length parameter `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub ell: f64,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, ell: f64) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::InvalidDomain(format!("ell must be positive, got {ell}")));
        }
        if kind == DomainKind::Rectangle && ell.fract() != 0.0 {
            return Err(Error::InvalidDomain(format!(
                "rectangle requires an integer ell, got {ell}"
            )));
        }
        Ok(Self { kind, ell })
    }

    pub fn square(ell: f64) -> Result<Self> {
        Self::new(DomainKind::Square, ell)
    }

    pub fn rectangle(ell: f64) -> Result<Self> {
        Self::new(DomainKind::Rectangle, ell)
    }

    pub fn lshape(ell: f64) -> Result<Self> {
        Self::new(DomainKind::LShape, ell)
    }
}

struct LatticeBuilder {
    ids: HashMap<(i64, i64), usize>,
    lattice: Vec<(i64, i64)>,
    triangles: Vec<[usize; 3]>,
}

impl LatticeBuilder {
    fn new() -> Self {
        Self {
            ids: HashMap::new(),
            lattice: Vec::new(),
            triangles: Vec::new(),
        }
    }

    fn vertex(&mut self, p: (i64, i64)) -> usize {
        let next = self.lattice.len();
        *self.ids.entry(p).or_insert_with(|| {
            self.lattice.push(p);
            next
        })
    }

    /// Square with lower-left lattice corner `(x, y)` and side 2 (lattice units).
    fn square(&mut self, x: i64, y: i64) {
        let center = (x + 1, y + 1);
        // Boundary walk counter-clockwise: corner, midpoint, corner, ...
        let ring = [
            (x, y),
            (x + 1, y),
            (x + 2, y),
            (x + 2, y + 1),
            (x + 2, y + 2),
            (x + 1, y + 2),
            (x, y + 2),
            (x, y + 1),
        ];
        let c = self.vertex(center);
        for i in 0..8 {
            let a = self.vertex(ring[i]);
            let b = self.vertex(ring[(i + 1) % 8]);
            self.triangles.push([a, b, c]);
        }
    }
}

/// Longest edge, ties broken by the smallest opposite vertex id.
fn initial_refinement_edge(vertices: [usize; 3], coords: &[Point]) -> usize {
    let geom = TriangleGeometry::new(vertices.map(|v| coords[v]));
    let longest = geom.diameter();
    (0..3)
        .filter(|&i| geom.edge_lengths[i] >= longest * (1.0 - 1e-12))
        .min_by_key(|&i| vertices[i])
        .expect("a triangle has a longest edge")
}

/// Initial triangulation of `domain` with its boundary labels.
pub fn build_initial_mesh(domain: &DomainSpec) -> Result<Mesh> {
    let domain = DomainSpec::new(domain.kind, domain.ell)?;
    let mut builder = LatticeBuilder::new();
    let scale = match domain.kind {
        DomainKind::Square => {
            builder.square(0, 0);
            domain.ell / 2.0
        }
        DomainKind::Rectangle => {
            for i in 0..domain.ell as i64 {
                builder.square(2 * i, 0);
            }
            0.5
        }
        DomainKind::LShape => {
            builder.square(-2, 0);
            builder.square(-2, -2);
            builder.square(0, -2);
            domain.ell / 2.0
        }
    };
    let coords: Vec<Point> = builder
        .lattice
        .iter()
        .map(|&(x, y)| [x as f64 * scale, y as f64 * scale])
        .collect();
    let triangles = builder
        .triangles
        .iter()
        .map(|&vertices| Triangle {
            vertices,
            refinement_edge: initial_refinement_edge(vertices, &coords),
        })
        .collect();
    let ell = domain.ell;
    let kind = domain.kind;
    Mesh::from_parts(coords, triangles, move |a, b| match kind {
        DomainKind::Rectangle => {
            let on_side = |x: f64| (x.abs() < 1e-12) || ((x - ell).abs() < 1e-12 * ell.max(1.0));
            if on_side(a[0]) && on_side(b[0]) && (a[0] - b[0]).abs() < 1e-12 {
                BoundaryKind::Dirichlet
            } else {
                BoundaryKind::Neumann
            }
        }
        _ => BoundaryKind::Dirichlet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryLabel;

    #[test]
    fn triangle_counts() {
        let sq = build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap();
        assert_eq!(sq.num_triangles(), 8);
        let rect = build_initial_mesh(&DomainSpec::rectangle(3.0).unwrap()).unwrap();
        assert_eq!(rect.num_triangles(), 24);
        let l = build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap();
        assert_eq!(l.num_triangles(), 24);
        assert!((l.total_area() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(DomainSpec::square(0.0).is_err());
        assert!(DomainSpec::lshape(-1.0).is_err());
        assert!(DomainSpec::rectangle(2.5).is_err());
        assert!(DomainSpec::rectangle(4.0).is_ok());
    }

    #[test]
    fn rectangle_labels() {
        let ell = 4.0;
        let mesh = build_initial_mesh(&DomainSpec::rectangle(ell).unwrap()).unwrap();
        for e in mesh.edges() {
            let m = e.midpoint(&mesh);
            match e.class {
                BoundaryLabel::Dirichlet => assert!(m[0].abs() < 1e-12 || (m[0] - ell).abs() < 1e-12),
                BoundaryLabel::Neumann => assert!(m[1].abs() < 1e-12 || (m[1] - 1.0).abs() < 1e-12),
                BoundaryLabel::Interior => {}
            }
        }
        assert_eq!(mesh.topology.count(BoundaryLabel::Dirichlet), 4);
        assert_eq!(mesh.topology.count(BoundaryLabel::Neumann), 16);
        // Corner vertices touch both parts and are Dirichlet.
        let corner = mesh
            .vertices
            .iter()
            .find(|v| v.coords == [0.0, 0.0])
            .unwrap();
        assert_eq!(corner.label, BoundaryLabel::Dirichlet);
    }

    #[test]
    fn refinement_edges_are_hypotenuses() {
        let mesh = build_initial_mesh(&DomainSpec::lshape(2.0).unwrap()).unwrap();
        for t in 0..mesh.num_triangles() {
            let g = mesh.geometry(t);
            let r = mesh.triangles[t].refinement_edge;
            assert!((g.edge_lengths[r] - g.diameter()).abs() < 1e-14);
            assert!((g.angles()[r] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn lshape_excludes_upper_right_quadrant() {
        let mesh = build_initial_mesh(&DomainSpec::lshape(1.0).unwrap()).unwrap();
        for t in 0..mesh.num_triangles() {
            let g = mesh.geometry(t);
            let c = g.point(&[1.0 / 3.0; 3]);
            assert!(!(c[0] > 0.0 && c[1] > 0.0));
        }
    }
}
