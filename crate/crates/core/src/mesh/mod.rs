//! Triangulations, edge topology and newest-vertex bisection.
//!
//! A [`Mesh`] is immutable: refinement returns a new value. Every mesh owns
//! its [`EdgeTopology`], which fixes for each edge the adjacent triangles
//! `T+` / `T-` and a unit normal `n_E` pointing out of `T+`.

mod domain;
mod dump;
mod refine;

use std::collections::BTreeMap;

pub use domain::{build_initial_mesh, DomainKind, DomainSpec};
pub use dump::write_dump;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Classification of an edge or a vertex relative to the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryLabel {
    Interior,
    Dirichlet,
    Neumann,
}

impl BoundaryLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryLabel::Interior => "interior",
            BoundaryLabel::Dirichlet => "dirichlet",
            BoundaryLabel::Neumann => "neumann",
        }
    }
}

/// Label of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl From<BoundaryKind> for BoundaryLabel {
    fn from(kind: BoundaryKind) -> Self {
        match kind {
            BoundaryKind::Dirichlet => BoundaryLabel::Dirichlet,
            BoundaryKind::Neumann => BoundaryLabel::Neumann,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub coords: Point,
    /// Dirichlet wins at vertices touching both boundary parts.
    pub label: BoundaryLabel,
}

/// Counter-clockwise triangle. Local edge `i` is the edge opposite local vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    /// Local index of the refinement edge.
    pub refinement_edge: usize,
}

impl Triangle {
    /// Global vertex ids of local edge `i`, in counter-clockwise order.
    pub fn edge_vertices(&self, i: usize) -> [usize; 2] {
        [self.vertices[(i + 1) % 3], self.vertices[(i + 2) % 3]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Sorted vertex ids; the edge parameter runs from `vertices[0]` to `vertices[1]`.
    pub vertices: [usize; 2],
    pub t_plus: usize,
    pub t_minus: Option<usize>,
    /// Unit normal, outward from `t_plus`.
    pub normal: Point,
    pub length: f64,
    pub class: BoundaryLabel,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.t_minus.is_some()
    }

    pub fn midpoint(&self, mesh: &Mesh) -> Point {
        let a = mesh.vertices[self.vertices[0]].coords;
        let b = mesh.vertices[self.vertices[1]].coords;
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Point at parameter `s` in `[0, 1]` along the edge.
    pub fn point_at(&self, mesh: &Mesh, s: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]].coords;
        let b = mesh.vertices[self.vertices[1]].coords;
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

/// Local edge of a triangle resolved to the global edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEdge {
    pub edge: usize,
    /// `true` when the triangle is `T+` of this edge.
    pub is_plus: bool,
    /// `true` when local vertex `(i + 1) % 3` is `edge.vertices[0]`.
    pub aligned: bool,
}

/// Per-edge adjacency with fixed normal orientation.
#[derive(Debug, Clone)]
pub struct EdgeTopology {
    pub edges: Vec<Edge>,
    pub triangle_edges: Vec<[LocalEdge; 3]>,
}

impl EdgeTopology {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn count(&self, class: BoundaryLabel) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }
}

/// Affine data of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct TriangleGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates.
    pub grad_lambda: [Point; 3],
    /// Lengths of the local edges (edge `i` opposite vertex `i`).
    pub edge_lengths: [f64; 3],
}

impl TriangleGeometry {
    pub fn new(vertices: [Point; 3]) -> Self {
        let [p0, p1, p2] = vertices;
        let twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let mut grad_lambda = [[0.0; 2]; 3];
        for i in 0..3 {
            let a = vertices[(i + 1) % 3];
            let b = vertices[(i + 2) % 3];
            // ∇λ_i is the inward normal of the opposite edge scaled by 1/height.
            grad_lambda[i] = [(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area];
        }
        let mut edge_lengths = [0.0; 3];
        for (i, len) in edge_lengths.iter_mut().enumerate() {
            let a = vertices[(i + 1) % 3];
            let b = vertices[(i + 2) % 3];
            *len = (b[0] - a[0]).hypot(b[1] - a[1]);
        }
        Self {
            vertices,
            area: 0.5 * twice_area,
            grad_lambda,
            edge_lengths,
        }
    }

    pub fn point(&self, lambda: &[f64; 3]) -> Point {
        let mut x = [0.0; 2];
        for (l, v) in lambda.iter().zip(&self.vertices) {
            x[0] += l * v[0];
            x[1] += l * v[1];
        }
        x
    }

    pub fn diameter(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Outward unit normal on local edge `i`.
    pub fn outward_normal(&self, i: usize) -> Point {
        let a = self.vertices[(i + 1) % 3];
        let b = self.vertices[(i + 2) % 3];
        let len = self.edge_lengths[i];
        [(b[1] - a[1]) / len, (a[0] - b[0]) / len]
    }

    /// Interior angles in radians, indexed by vertex.
    pub fn angles(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, angle) in out.iter_mut().enumerate() {
            let p = self.vertices[i];
            let a = self.vertices[(i + 1) % 3];
            let b = self.vertices[(i + 2) % 3];
            let u = [a[0] - p[0], a[1] - p[1]];
            let v = [b[0] - p[0], b[1] - p[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            *angle = cross.atan2(dot).abs();
        }
        out
    }
}

pub(crate) type EdgeKey = (usize, usize);

pub(crate) fn edge_key(a: usize, b: usize) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Conforming triangulation with labelled boundary.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<Triangle>,
    pub topology: EdgeTopology,
    pub generation: u64,
    boundary: BTreeMap<EdgeKey, BoundaryKind>,
}

impl Mesh {
    /// Builds a mesh from raw data. Boundary edges are classified by `classify`,
    /// which receives the two endpoint coordinates.
    pub fn from_parts(
        coords: Vec<Point>,
        triangles: Vec<Triangle>,
        classify: impl Fn(Point, Point) -> BoundaryKind,
    ) -> Result<Self> {
        let mut counts: BTreeMap<EdgeKey, usize> = BTreeMap::new();
        for tri in &triangles {
            for i in 0..3 {
                let [a, b] = tri.edge_vertices(i);
                *counts.entry(edge_key(a, b)).or_default() += 1;
            }
        }
        let boundary = counts
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&(a, b), _)| ((a, b), classify(coords[a], coords[b])))
            .collect();
        Self::assemble(coords, triangles, boundary, 0)
    }

    pub(crate) fn assemble(
        coords: Vec<Point>,
        triangles: Vec<Triangle>,
        boundary: BTreeMap<EdgeKey, BoundaryKind>,
        generation: u64,
    ) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.vertices;
            if a == b || b == c || a == c || tri.refinement_edge > 2 {
                return Err(Error::DegenerateTriangle(t));
            }
            if [a, b, c].iter().any(|&v| v >= coords.len()) {
                return Err(Error::NonConforming(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let geom = TriangleGeometry::new([coords[a], coords[b], coords[c]]);
            if !(geom.area > 0.0) {
                return Err(Error::DegenerateTriangle(t));
            }
        }
        let topology = edge_topology_from(&coords, &triangles, &boundary)?;
        let mut labels = vec![BoundaryLabel::Interior; coords.len()];
        for edge in &topology.edges {
            for &v in &edge.vertices {
                labels[v] = match (labels[v], edge.class) {
                    (BoundaryLabel::Dirichlet, _) | (_, BoundaryLabel::Dirichlet) => {
                        BoundaryLabel::Dirichlet
                    }
                    (BoundaryLabel::Neumann, _) | (_, BoundaryLabel::Neumann) => {
                        BoundaryLabel::Neumann
                    }
                    _ => BoundaryLabel::Interior,
                };
            }
        }
        let vertices = coords
            .into_iter()
            .zip(labels)
            .map(|(coords, label)| Vertex { coords, label })
            .collect();
        Ok(Self {
            vertices,
            triangles,
            topology,
            generation,
            boundary,
        })
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.topology.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.topology.edges
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        let [a, b, c] = self.triangles[t].vertices;
        TriangleGeometry::new([
            self.vertices[a].coords,
            self.vertices[b].coords,
            self.vertices[c].coords,
        ])
    }

    pub fn boundary_kind(&self, a: usize, b: usize) -> Option<BoundaryKind> {
        self.boundary.get(&edge_key(a, b)).copied()
    }

    pub(crate) fn boundary_map(&self) -> &BTreeMap<EdgeKey, BoundaryKind> {
        &self.boundary
    }

    /// Newest-vertex bisection of the marked triangles with conforming closure.
    pub fn refine(&self, marked: &[usize]) -> Result<Mesh> {
        refine::refine(self, marked)
    }

    /// Refines every triangle (each is split into four).
    pub fn refine_uniform(&self) -> Result<Mesh> {
        let all: Vec<usize> = (0..self.num_triangles()).collect();
        self.refine(&all)
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .flat_map(|t| self.geometry(t).angles())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.geometry(t).area).sum()
    }
}

/// Recomputes the edge topology of `mesh` from its triangles and boundary labels.
pub fn edge_topology(mesh: &Mesh) -> Result<EdgeTopology> {
    let coords: Vec<Point> = mesh.vertices.iter().map(|v| v.coords).collect();
    edge_topology_from(&coords, &mesh.triangles, &mesh.boundary)
}

fn edge_topology_from(
    coords: &[Point],
    triangles: &[Triangle],
    boundary: &BTreeMap<EdgeKey, BoundaryKind>,
) -> Result<EdgeTopology> {
    // Triangles are visited in id order, so the first adjacent triangle is the smaller id.
    let mut adjacency: BTreeMap<EdgeKey, Vec<(usize, usize)>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let [a, b] = tri.edge_vertices(i);
            adjacency.entry(edge_key(a, b)).or_default().push((t, i));
        }
    }
    let mut edges = Vec::with_capacity(adjacency.len());
    let placeholder = LocalEdge {
        edge: usize::MAX,
        is_plus: false,
        aligned: false,
    };
    let mut triangle_edges = vec![[placeholder; 3]; triangles.len()];
    for (&(a, b), adjacent) in &adjacency {
        let class = match adjacent.len() {
            1 => match boundary.get(&(a, b)) {
                Some(&kind) => kind.into(),
                None => {
                    return Err(Error::NonConforming(format!(
                        "edge ({a}, {b}) has one neighbour but is not a boundary edge"
                    )))
                }
            },
            2 => {
                if boundary.contains_key(&(a, b)) {
                    return Err(Error::NonConforming(format!(
                        "boundary edge ({a}, {b}) is shared by two triangles"
                    )));
                }
                BoundaryLabel::Interior
            }
            n => {
                return Err(Error::NonConforming(format!(
                    "edge ({a}, {b}) is shared by {n} triangles"
                )))
            }
        };
        let (t_plus, local_plus) = adjacent[0];
        let geom = TriangleGeometry::new(triangles[t_plus].vertices.map(|v| coords[v]));
        let id = edges.len();
        edges.push(Edge {
            vertices: [a, b],
            t_plus,
            t_minus: adjacent.get(1).map(|&(t, _)| t),
            normal: geom.outward_normal(local_plus),
            length: geom.edge_lengths[local_plus],
            class,
        });
        for (slot, &(t, i)) in adjacent.iter().enumerate() {
            let [first, _] = triangles[t].edge_vertices(i);
            triangle_edges[t][i] = LocalEdge {
                edge: id,
                is_plus: slot == 0,
                aligned: first == a,
            };
        }
    }
    Ok(EdgeTopology {
        edges,
        triangle_edges,
    })
}
