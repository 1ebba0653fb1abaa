use std::io::Write;

use super::Mesh;

/// Plain-text mesh dump for debugging and plotting.
///
/// ```text
/// vertices N triangles M edges K
/// x y label                  (N rows)
/// v0 v1 v2 refinement_edge   (M rows)
/// a b t_plus t_minus class   (K rows, t_minus = -1 on the boundary)
/// ```
pub fn write_dump<W: Write>(mesh: &Mesh, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "vertices {} triangles {} edges {}",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.num_edges()
    )?;
    for v in &mesh.vertices {
        writeln!(out, "{} {} {}", v.coords[0], v.coords[1], v.label.as_str())?;
    }
    for t in &mesh.triangles {
        let [a, b, c] = t.vertices;
        writeln!(out, "{a} {b} {c} {}", t.refinement_edge)?;
    }
    for e in mesh.edges() {
        let minus = e.t_minus.map_or(-1, |t| t as i64);
        writeln!(
            out,
            "{} {} {} {} {}",
            e.vertices[0],
            e.vertices[1],
            e.t_plus,
            minus,
            e.class.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_initial_mesh, DomainSpec};

    #[test]
    fn header_and_row_counts() {
        let mesh = build_initial_mesh(&DomainSpec::square(1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_dump(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "vertices 9 triangles 8 edges 16");
        assert_eq!(lines.count(), 9 + 8 + 16);
    }
}
