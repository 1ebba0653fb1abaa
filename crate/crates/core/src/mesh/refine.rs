//! Newest-vertex bisection.
//!
//! All three edges of a marked triangle are marked. The closure then marks
//! the refinement edge of every triangle that has any marked edge, until a
//! fixed point is reached. Each triangle is finally bisected along its
//! refinement edge, and the children recursively along theirs while those
//! are marked, giving 1, 2 or 4 children.

use std::collections::{BTreeMap, HashMap};

use super::{edge_key, EdgeKey, Mesh, Point, Triangle};
use crate::error::{Error, Result};

pub(super) fn refine(mesh: &Mesh, marked: &[usize]) -> Result<Mesh> {
    let count = mesh.num_triangles();
    if let Some(&id) = marked.iter().find(|&&t| t >= count) {
        return Err(Error::UnknownTriangle { id, count });
    }
    if marked.is_empty() {
        return Ok(mesh.clone());
    }

    let topo = &mesh.topology;
    let mut edge_marked = vec![false; topo.edges.len()];
    for &t in marked {
        for local in &topo.triangle_edges[t] {
            edge_marked[local.edge] = true;
        }
    }
    loop {
        let mut changed = false;
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let locals = &topo.triangle_edges[t];
            let reference = locals[tri.refinement_edge].edge;
            if !edge_marked[reference] && locals.iter().any(|l| edge_marked[l.edge]) {
                edge_marked[reference] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut coords: Vec<Point> = mesh.vertices.iter().map(|v| v.coords).collect();
    let mut midpoints: HashMap<EdgeKey, usize> = HashMap::new();
    for (e, edge) in topo.edges.iter().enumerate() {
        if edge_marked[e] {
            let [a, b] = edge.vertices;
            midpoints.insert((a, b), coords.len());
            let (pa, pb) = (coords[a], coords[b]);
            coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        }
    }

    let mut triangles = Vec::with_capacity(count * 2);
    for tri in &mesh.triangles {
        bisect(*tri, &midpoints, &mut triangles);
    }

    let mut boundary = BTreeMap::new();
    for (&(a, b), &kind) in mesh.boundary_map() {
        match midpoints.get(&(a, b)) {
            Some(&m) => {
                boundary.insert(edge_key(a, m), kind);
                boundary.insert(edge_key(m, b), kind);
            }
            None => {
                boundary.insert((a, b), kind);
            }
        }
    }

    Mesh::assemble(coords, triangles, boundary, mesh.generation + 1)
}

fn bisect(tri: Triangle, midpoints: &HashMap<EdgeKey, usize>, out: &mut Vec<Triangle>) {
    let r = tri.refinement_edge;
    let newest = tri.vertices[r];
    let b = tri.vertices[(r + 1) % 3];
    let c = tri.vertices[(r + 2) % 3];
    match midpoints.get(&edge_key(b, c)) {
        Some(&m) => {
            // The midpoint becomes the newest vertex of both children.
            bisect(
                Triangle {
                    vertices: [newest, b, m],
                    refinement_edge: 2,
                },
                midpoints,
                out,
            );
            bisect(
                Triangle {
                    vertices: [newest, m, c],
                    refinement_edge: 1,
                },
                midpoints,
                out,
            );
        }
        None => out.push(tri),
    }
}
