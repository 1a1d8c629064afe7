//! Mesh file ingestion: a small native text format and the Gmsh MSH 2.2
//! ASCII subset (triangles + boundary lines, physical names as tags).
//!
//! Native format:
//! ```text
//! ntri-mesh 1
//! vertices N
//! x y          (N lines)
//! triangles M
//! v0 v1 v2     (M lines)
//! boundary B
//! v0 v1 tag    (B lines)
//! ```

use super::Mesh;
use crate::error::Error;
use crate::geom::V2;
use crate::Result;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    NativeText,
    GmshMsh2Ascii,
}

/// Load a mesh file, inferring the format from its first line when possible.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let format = if text.trim_start().starts_with("$MeshFormat") {
        MeshFormat::GmshMsh2Ascii
    } else {
        MeshFormat::NativeText
    };
    parse_mesh(&text, format)
}

pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<Mesh> {
    match format {
        MeshFormat::NativeText => parse_native(text),
        MeshFormat::GmshMsh2Ascii => parse_gmsh(text),
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshParse {
        line,
        msg: msg.into(),
    }
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
        }
    }
    /// Next non-empty, non-comment line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.iter.by_ref() {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Some((i + 1, t));
            }
        }
        None
    }
    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next()
            .ok_or_else(|| perr(0, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_native(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.expect("header")?;
    if header != "ntri-mesh 1" {
        return Err(perr(ln, "expected header 'ntri-mesh 1'"));
    }

    let (ln, l) = lines.expect("vertices section")?;
    let n: usize = l
        .strip_prefix("vertices ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected 'vertices N'"))?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = lines.expect("vertex line")?;
        let mut it = l.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(ln, "bad vertex x"))?;
        let y: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(ln, "bad vertex y"))?;
        vertices.push(V2::new(x, y));
    }

    let (ln, l) = lines.expect("triangles section")?;
    let m: usize = l
        .strip_prefix("triangles ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected 'triangles M'"))?;
    let mut tris = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = lines.expect("triangle line")?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| perr(ln, "bad triangle indices"))?;
        if ids.len() != 3 {
            return Err(perr(ln, "triangle line needs exactly 3 vertex ids"));
        }
        tris.push([ids[0], ids[1], ids[2]]);
    }

    let (ln, l) = lines.expect("boundary section")?;
    let b: usize = l
        .strip_prefix("boundary ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected 'boundary B'"))?;
    let mut boundary = Vec::with_capacity(b);
    for _ in 0..b {
        let (ln, l) = lines.expect("boundary line")?;
        let mut it = l.split_whitespace();
        let v0: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(ln, "bad boundary v0"))?;
        let v1: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| perr(ln, "bad boundary v1"))?;
        let tag = it
            .next()
            .ok_or_else(|| perr(ln, "boundary line needs a tag"))?;
        boundary.push((v0, v1, tag.to_string()));
    }

    Mesh::from_raw(vertices, tris, boundary)
}

fn parse_gmsh(text: &str) -> Result<Mesh> {
    let mut lines = Lines::new(text);
    let mut phys_names: HashMap<i64, String> = HashMap::new();
    let mut vertices: Vec<V2> = Vec::new();
    let mut node_ids: HashMap<i64, usize> = HashMap::new();
    let mut tris: Vec<[usize; 3]> = Vec::new();
    let mut segs: Vec<(usize, usize, i64)> = Vec::new();

    while let Some((ln, l)) = lines.next() {
        match l {
            "$MeshFormat" => {
                let (ln2, v) = lines.expect("format line")?;
                let ver = v.split_whitespace().next().unwrap_or("");
                if !ver.starts_with("2.") {
                    return Err(perr(ln2, format!("unsupported MSH version '{ver}'")));
                }
                lines.expect("$EndMeshFormat")?;
            }
            "$PhysicalNames" => {
                let (ln2, c) = lines.expect("count")?;
                let n: usize = c.parse().map_err(|_| perr(ln2, "bad count"))?;
                for _ in 0..n {
                    let (ln3, pl) = lines.expect("physical name")?;
                    let parts: Vec<&str> = pl.split_whitespace().collect();
                    if parts.len() < 3 {
                        return Err(perr(ln3, "bad physical name line"));
                    }
                    let tag: i64 = parts[1].parse().map_err(|_| perr(ln3, "bad tag"))?;
                    let name = parts[2..].join(" ").trim_matches('"').to_string();
                    phys_names.insert(tag, name);
                }
                lines.expect("$EndPhysicalNames")?;
            }
            "$Nodes" => {
                let (ln2, c) = lines.expect("node count")?;
                let n: usize = c.parse().map_err(|_| perr(ln2, "bad node count"))?;
                for _ in 0..n {
                    let (ln3, nl) = lines.expect("node line")?;
                    let p: Vec<&str> = nl.split_whitespace().collect();
                    if p.len() < 3 {
                        return Err(perr(ln3, "bad node line"));
                    }
                    let id: i64 = p[0].parse().map_err(|_| perr(ln3, "bad node id"))?;
                    let x: f64 = p[1].parse().map_err(|_| perr(ln3, "bad x"))?;
                    let y: f64 = p[2].parse().map_err(|_| perr(ln3, "bad y"))?;
                    node_ids.insert(id, vertices.len());
                    vertices.push(V2::new(x, y));
                }
                lines.expect("$EndNodes")?;
            }
            "$Elements" => {
                let (ln2, c) = lines.expect("element count")?;
                let n: usize = c.parse().map_err(|_| perr(ln2, "bad element count"))?;
                for _ in 0..n {
                    let (ln3, el) = lines.expect("element line")?;
                    let p: Vec<i64> = el
                        .split_whitespace()
                        .map(|s| s.parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| perr(ln3, "bad element line"))?;
                    if p.len() < 3 {
                        return Err(perr(ln3, "bad element line"));
                    }
                    let etype = p[1];
                    let ntags = p[2] as usize;
                    let phys = if ntags >= 1 { p[3] } else { 0 };
                    let nodes = &p[3 + ntags..];
                    let vid = |id: i64| -> Result<usize> {
                        node_ids
                            .get(&id)
                            .copied()
                            .ok_or_else(|| perr(ln3, format!("unknown node id {id}")))
                    };
                    match etype {
                        1 => {
                            if nodes.len() != 2 {
                                return Err(perr(ln3, "line element needs 2 nodes"));
                            }
                            segs.push((vid(nodes[0])?, vid(nodes[1])?, phys));
                        }
                        2 => {
                            if nodes.len() != 3 {
                                return Err(perr(ln3, "triangle needs 3 nodes"));
                            }
                            tris.push([vid(nodes[0])?, vid(nodes[1])?, vid(nodes[2])?]);
                        }
                        15 => {} // isolated points are ignored
                        t => {
                            return Err(perr(
                                ln3,
                                format!("unsupported element type {t}: only triangles and boundary lines"),
                            ))
                        }
                    }
                }
                lines.expect("$EndElements")?;
            }
            _ if l.starts_with('$') => {
                // skip unknown section
                let end = format!("$End{}", &l[1..]);
                loop {
                    let (_, s) = lines
                        .expect(&end)
                        .map_err(|_| perr(ln, format!("unterminated section {l}")))?;
                    if s == end {
                        break;
                    }
                }
            }
            _ => return Err(perr(ln, format!("unexpected content '{l}'"))),
        }
    }

    let boundary = segs
        .into_iter()
        .map(|(a, b, phys)| {
            let tag = phys_names
                .get(&phys)
                .cloned()
                .unwrap_or_else(|| format!("physical-{phys}"));
            (a, b, tag)
        })
        .collect();
    Mesh::from_raw(vertices, tris, boundary)
}

/// Serialize in the native text format.
pub fn write_native(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "ntri-mesh 1").unwrap();
    writeln!(s, "vertices {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        writeln!(s, "{:.17e} {:.17e}", v.x, v.y).unwrap();
    }
    writeln!(s, "triangles {}", mesh.elements.len()).unwrap();
    for e in &mesh.elements {
        writeln!(s, "{} {} {}", e.v[0], e.v[1], e.v[2]).unwrap();
    }
    writeln!(s, "boundary {}", mesh.boundary_edges.len()).unwrap();
    for b in &mesh.boundary_edges {
        writeln!(s, "{} {} {}", b.v[0], b.v[1], b.tag).unwrap();
    }
    s
}

/// Structured criss-cross mesh of the unit square: n×n cells, two triangles
/// each. Boundary tag is "boundary" all around.
pub fn structured_square(n: usize) -> Mesh {
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(V2::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            // alternate the diagonal for a symmetric pattern
            if (i + j) % 2 == 0 {
                tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                tris.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                tris.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    let mut boundary = Vec::with_capacity(4 * n);
    for i in 0..n {
        boundary.push((id(i, 0), id(i + 1, 0), "boundary".to_string()));
        boundary.push((id(i + 1, n), id(i, n), "boundary".to_string()));
        boundary.push((id(n, i), id(n, i + 1), "boundary".to_string()));
        boundary.push((id(0, i + 1), id(0, i), "boundary".to_string()));
    }
    Mesh::from_raw(vertices, tris, boundary).expect("structured square is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_round_trip() {
        let mesh = structured_square(3);
        let text = write_native(&mesh);
        let back = parse_mesh(&text, MeshFormat::NativeText).unwrap();
        assert_eq!(back.n_elements(), mesh.n_elements());
        assert_eq!(back.interior_edges.len(), mesh.interior_edges.len());
        assert_eq!(back.boundary_edges.len(), mesh.boundary_edges.len());
        back.validate().unwrap();
    }

    #[test]
    fn native_parse_error_reports_line() {
        let text = "ntri-mesh 1\nvertices 2\n0 0\nnot-a-number 1\n";
        let err = parse_mesh(text, MeshFormat::NativeText).unwrap_err();
        match err {
            Error::MeshParse { line, .. } => assert_eq!(line, 4),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn gmsh_subset_parses() {
        let text = r#"$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 1 "wall"
2 2 "domain"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 1 1 1 2
2 1 2 1 1 2 3
3 1 2 1 1 3 4
4 1 2 1 1 4 1
5 2 2 2 1 1 2 3
6 2 2 2 1 1 3 4
$EndElements
"#;
        let mesh = parse_mesh(text, MeshFormat::GmshMsh2Ascii).unwrap();
        assert_eq!(mesh.n_elements(), 2);
        assert_eq!(mesh.boundary_edges.len(), 4);
        assert!(mesh.boundary_edges.iter().all(|b| b.tag == "wall"));
        mesh.validate().unwrap();
    }

    #[test]
    fn gmsh_rejects_quads() {
        let text = r#"$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
1
1 3 2 1 1 1 2 3 4
$EndElements
"#;
        let err = parse_mesh(text, MeshFormat::GmshMsh2Ascii).unwrap_err();
        assert!(err.to_string().contains("unsupported element type 3"));
    }
}
