//! Unstructured conforming triangular meshes.
//!
//! The mesh keeps both an edge-oriented view (each interior edge stored once,
//! with its two neighbors) and an element-oriented view (each element lists
//! its three edges with sides), mirroring the two kinds of skeleton sets the
//! discretization integrates over.

pub mod formats;
pub mod geometry;
pub mod naca;
pub mod refine;

pub use geometry::GeometryMap;
pub use refine::{MergeGroup, Transfer, TransferTable};

use crate::error::Error;
use crate::geom::{signed_area, V2};
use crate::Result;
use std::collections::HashMap;

/// Which side of an interior edge an element sees.
///
/// `Minus` traverses the edge in its stored direction; `Plus` traverses it
/// reversed. Face quadrature points are shared between the two sides through
/// this flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Per-element reference to one of its three edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRef {
    Interior { id: usize, side: Side },
    Boundary { id: usize },
}

/// Interior edge; `v` is the traversal direction of the minus-side element.
#[derive(Clone, Debug)]
pub struct Edge {
    pub v: [usize; 2],
    /// [minus element, plus element]
    pub elems: [usize; 2],
    /// local edge index within each neighbor
    pub local: [usize; 2],
}

#[derive(Clone, Debug)]
pub struct BoundaryEdge {
    /// traversal direction of the owning element (counter-clockwise)
    pub v: [usize; 2],
    pub elem: usize,
    pub local: usize,
    pub tag: String,
}

/// Red-green bookkeeping. `parent` refers to the element id in the mesh the
/// element was refined from (the previous generation), with the child slot.
#[derive(Clone, Debug, Default)]
pub struct Lineage {
    pub parent: Option<(usize, u8)>,
    pub green: Option<GreenInfo>,
}

/// Extra data kept for green children so a later refinement can undo the
/// green split and red-split the original parent instead.
#[derive(Clone, Debug)]
pub struct GreenInfo {
    /// parent triangle, as vertex ids (vertex ids are stable across refinement)
    pub parent_v: [usize; 3],
    /// which parent edge carries the midpoint
    pub split_edge: u8,
}

#[derive(Clone, Debug)]
pub struct Element {
    /// vertex ids, counter-clockwise
    pub v: [usize; 3],
    /// local edge k runs v[k] -> v[(k+1)%3]
    pub edges: [EdgeRef; 3],
    pub geometry: GeometryMap,
    pub lineage: Lineage,
}

/// Exact boundary description used to place new points on curved boundaries.
pub trait BoundaryGeometry {
    /// Project a point near the tagged boundary onto the exact curve.
    fn project(&self, tag: &str, p: V2) -> V2;
    /// Whether the tagged boundary is curved (needs a high-order geometry map).
    fn is_curved(&self, tag: &str) -> bool;
}

/// All-straight boundary description.
pub struct StraightBoundary;

impl BoundaryGeometry for StraightBoundary {
    fn project(&self, _tag: &str, p: V2) -> V2 {
        p
    }
    fn is_curved(&self, _tag: &str) -> bool {
        false
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<V2>,
    pub elements: Vec<Element>,
    pub interior_edges: Vec<Edge>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// geometry degree of curved elements, if curved maps are installed
    pub curved_q: Option<usize>,
}

impl Mesh {
    /// Build a mesh from raw vertices, triangles and tagged boundary segments.
    /// Triangles are re-oriented counter-clockwise if needed.
    pub fn from_raw(
        vertices: Vec<V2>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<(usize, usize, String)>,
    ) -> Result<Mesh> {
        let nv = vertices.len();
        let mut elems: Vec<[usize; 3]> = Vec::with_capacity(triangles.len());
        for (k, t) in triangles.iter().enumerate() {
            for &vi in t {
                if vi >= nv {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {k} references vertex {vi} out of range"
                    )));
                }
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if area.abs() < 1e-300 {
                return Err(Error::InvalidMesh(format!("triangle {k} is degenerate")));
            }
            if area > 0.0 {
                elems.push(*t);
            } else {
                elems.push([t[0], t[2], t[1]]);
            }
        }

        struct Build {
            first: (usize, usize, [usize; 2]),
            second: Option<(usize, usize)>,
        }
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut edge_map: HashMap<(usize, usize), Build> = HashMap::new();
        for (k, t) in elems.iter().enumerate() {
            for le in 0..3 {
                let (a, b) = (t[le], t[(le + 1) % 3]);
                match edge_map.get_mut(&key(a, b)) {
                    None => {
                        edge_map.insert(
                            key(a, b),
                            Build {
                                first: (k, le, [a, b]),
                                second: None,
                            },
                        );
                    }
                    Some(build) => {
                        if build.second.is_some() {
                            return Err(Error::InvalidMesh(format!(
                                "edge {a}-{b} is shared by more than two elements"
                            )));
                        }
                        if build.first.2 == [a, b] {
                            return Err(Error::InvalidMesh(format!(
                                "edge {a}-{b} traversed twice in the same direction"
                            )));
                        }
                        build.second = Some((k, le));
                    }
                }
            }
        }

        let mut tag_map: HashMap<(usize, usize), String> = HashMap::new();
        for (a, b, tag) in &boundary {
            if tag_map.insert(key(*a, *b), tag.clone()).is_some() {
                return Err(Error::InvalidMesh(format!(
                    "boundary segment {a}-{b} listed twice"
                )));
            }
        }

        let mut interior_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        let mut elem_edges: Vec<[Option<EdgeRef>; 3]> = vec![[None, None, None]; elems.len()];
        let mut keys: Vec<_> = edge_map.keys().copied().collect();
        keys.sort();
        for k in keys {
            let build = &edge_map[&k];
            let (ka, la, dir) = build.first;
            match build.second {
                Some((kb, lb)) => {
                    if tag_map.contains_key(&k) {
                        return Err(Error::InvalidMesh(format!(
                            "boundary segment {}-{} is an interior edge",
                            k.0, k.1
                        )));
                    }
                    let id = interior_edges.len();
                    interior_edges.push(Edge {
                        v: dir,
                        elems: [ka, kb],
                        local: [la, lb],
                    });
                    elem_edges[ka][la] = Some(EdgeRef::Interior {
                        id,
                        side: Side::Minus,
                    });
                    elem_edges[kb][lb] = Some(EdgeRef::Interior {
                        id,
                        side: Side::Plus,
                    });
                }
                None => {
                    let tag = tag_map.remove(&k).ok_or_else(|| {
                        Error::InvalidMesh(format!(
                            "edge {}-{} borders a single element but has no boundary tag \
                             (non-conforming mesh or missing boundary specification)",
                            k.0, k.1
                        ))
                    })?;
                    let id = boundary_edges.len();
                    boundary_edges.push(BoundaryEdge {
                        v: dir,
                        elem: ka,
                        local: la,
                        tag,
                    });
                    elem_edges[ka][la] = Some(EdgeRef::Boundary { id });
                }
            }
        }
        if let Some(k) = tag_map.keys().next() {
            return Err(Error::InvalidMesh(format!(
                "boundary segment {}-{} does not match any mesh edge",
                k.0, k.1
            )));
        }

        let elements = elems
            .into_iter()
            .zip(elem_edges)
            .map(|(v, e)| Element {
                v,
                edges: [e[0].unwrap(), e[1].unwrap(), e[2].unwrap()],
                geometry: GeometryMap::Affine,
                lineage: Lineage::default(),
            })
            .collect();

        Ok(Mesh {
            vertices,
            elements,
            interior_edges,
            boundary_edges,
            curved_q: None,
        })
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn elem_vertices(&self, k: usize) -> [V2; 3] {
        let e = &self.elements[k];
        [
            self.vertices[e.v[0]],
            self.vertices[e.v[1]],
            self.vertices[e.v[2]],
        ]
    }

    /// Element area; straight-sided elements use the vertex triangle, curved
    /// elements integrate the geometry Jacobian.
    pub fn area(&self, k: usize) -> f64 {
        match &self.elements[k].geometry {
            GeometryMap::Affine => {
                let [a, b, c] = self.elem_vertices(k);
                signed_area(a, b, c)
            }
            GeometryMap::Curved { q, .. } => {
                let rule = crate::space::tri_rule(2 * q);
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * self.geom_jacobian_det(k, *p))
                    .sum()
            }
        }
    }

    /// Longest edge of the vertex triangle.
    pub fn h_longest(&self, k: usize) -> f64 {
        let [a, b, c] = self.elem_vertices(k);
        a.dist(b).max(b.dist(c)).max(c.dist(a))
    }

    pub fn perimeter(&self, k: usize) -> f64 {
        let [a, b, c] = self.elem_vertices(k);
        a.dist(b) + b.dist(c) + c.dist(a)
    }

    /// Outward unit normal of straight local edge `le` of element `k`.
    pub fn edge_normal(&self, k: usize, le: usize) -> V2 {
        let e = &self.elements[k];
        let a = self.vertices[e.v[le]];
        let b = self.vertices[e.v[(le + 1) % 3]];
        (b - a).rot_cw().normalized()
    }

    pub fn edge_length(&self, edge: &Edge) -> f64 {
        self.vertices[edge.v[0]].dist(self.vertices[edge.v[1]])
    }

    /// Number of distinct boundary loops (walks the boundary graph).
    pub fn boundary_loops(&self) -> usize {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for be in &self.boundary_edges {
            next.insert(be.v[0], be.v[1]);
        }
        let mut seen: HashMap<usize, bool> = HashMap::new();
        let mut loops = 0;
        for be in &self.boundary_edges {
            let start = be.v[0];
            if seen.contains_key(&start) {
                continue;
            }
            loops += 1;
            let mut cur = start;
            loop {
                seen.insert(cur, true);
                cur = match next.get(&cur) {
                    Some(&n) => n,
                    None => break,
                };
                if cur == start {
                    break;
                }
            }
        }
        loops
    }

    /// Full structural validation; used after construction and refinement.
    pub fn validate(&self) -> Result<()> {
        for k in 0..self.n_elements() {
            let [a, b, c] = self.elem_vertices(k);
            if signed_area(a, b, c) <= 0.0 {
                return Err(Error::InvalidMesh(format!("element {k} not CCW")));
            }
            if matches!(self.elements[k].geometry, GeometryMap::Curved { .. }) {
                // geometry must stay invertible
                let rule = crate::space::tri_rule(6);
                for p in &rule.points {
                    if self.geom_jacobian_det(k, *p) <= 0.0 {
                        return Err(Error::InvalidMesh(format!(
                            "element {k}: curved geometry Jacobian not positive"
                        )));
                    }
                }
            }
        }
        // element-oriented vs edge-oriented consistency
        let mut count = vec![0usize; self.interior_edges.len()];
        for (k, e) in self.elements.iter().enumerate() {
            for (le, er) in e.edges.iter().enumerate() {
                match er {
                    EdgeRef::Interior { id, side } => {
                        count[*id] += 1;
                        let edge = &self.interior_edges[*id];
                        let s = if *side == Side::Minus { 0 } else { 1 };
                        if edge.elems[s] != k || edge.local[s] != le {
                            return Err(Error::InvalidMesh(format!(
                                "edge {id} back-reference mismatch at element {k}"
                            )));
                        }
                    }
                    EdgeRef::Boundary { id } => {
                        let be = &self.boundary_edges[*id];
                        if be.elem != k || be.local != le {
                            return Err(Error::InvalidMesh(format!(
                                "boundary edge {id} back-reference mismatch"
                            )));
                        }
                    }
                }
            }
        }
        if count.iter().any(|&c| c != 2) {
            return Err(Error::InvalidMesh(
                "an interior edge is not referenced exactly twice".into(),
            ));
        }
        for edge in &self.interior_edges {
            if edge.elems[0] == edge.elems[1] {
                return Err(Error::InvalidMesh(
                    "interior edge references one element twice".into(),
                ));
            }
            // the two outward normals must be antiparallel
            let nm = self.edge_normal(edge.elems[0], edge.local[0]);
            let np = self.edge_normal(edge.elems[1], edge.local[1]);
            if (nm + np).norm() > 1e-12 {
                return Err(Error::InvalidMesh(
                    "interior edge normals are not antiparallel".into(),
                ));
            }
        }
        // Euler characteristic of a planar triangulation: V - E + F = 2 - loops
        let mut used = vec![false; self.vertices.len()];
        for e in &self.elements {
            for &vi in &e.v {
                used[vi] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        let e = (self.interior_edges.len() + self.boundary_edges.len()) as i64;
        let f = self.n_elements() as i64;
        let chi = v - e + f;
        let expect = 2 - self.boundary_loops() as i64;
        if chi != expect {
            return Err(Error::InvalidMesh(format!(
                "Euler characteristic {chi}, expected {expect}"
            )));
        }
        Ok(())
    }

    /// Install curved geometry maps of degree `q` on all elements that touch
    /// a curved boundary tag. Mesh vertices are assumed to lie on the exact
    /// curve already; only edge-interior geometry nodes are projected.
    pub fn with_curved_boundary(mut self, geom: &dyn BoundaryGeometry, q: usize) -> Mesh {
        assert!(q >= 2, "curved geometry degree must be at least 2");
        let lag = geometry::lagrange_geom(q);
        for k in 0..self.n_elements() {
            let curved_edges: Vec<(usize, String)> = self.elements[k]
                .edges
                .iter()
                .enumerate()
                .filter_map(|(le, er)| match er {
                    EdgeRef::Boundary { id } => {
                        let tag = &self.boundary_edges[*id].tag;
                        geom.is_curved(tag).then(|| (le, tag.clone()))
                    }
                    _ => None,
                })
                .collect();
            if curved_edges.is_empty() {
                continue;
            }
            let [a, b, c] = self.elem_vertices(k);
            let mut nodes: Vec<V2> = lag
                .ref_nodes
                .iter()
                .map(|p| a + (b - a) * p.x + (c - a) * p.y)
                .collect();
            for (le, tag) in &curved_edges {
                for &ni in &lag.edge_interior_nodes(*le) {
                    nodes[ni] = geom.project(tag, nodes[ni]);
                }
            }
            self.elements[k].geometry = GeometryMap::Curved { q, nodes };
        }
        self.curved_q = Some(q);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_triangle_mesh() -> Mesh {
        // unit square split along the diagonal
        let vertices = vec![
            V2::new(0.0, 0.0),
            V2::new(1.0, 0.0),
            V2::new(1.0, 1.0),
            V2::new(0.0, 1.0),
        ];
        let tris = vec![[0, 1, 2], [0, 2, 3]];
        let boundary = vec![
            (0, 1, "bottom".to_string()),
            (1, 2, "right".to_string()),
            (2, 3, "top".to_string()),
            (3, 0, "left".to_string()),
        ];
        Mesh::from_raw(vertices, tris, boundary).unwrap()
    }

    #[test]
    fn single_triangle() {
        let mesh = Mesh::from_raw(
            vec![V2::new(0.0, 0.0), V2::new(1.0, 0.0), V2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![
                (0, 1, "b".into()),
                (1, 2, "b".into()),
                (2, 0, "b".into()),
            ],
        )
        .unwrap();
        assert_eq!(mesh.n_elements(), 1);
        assert_eq!(mesh.interior_edges.len(), 0);
        assert_eq!(mesh.boundary_edges.len(), 3);
        mesh.validate().unwrap();
    }

    #[test]
    fn two_triangles_share_one_edge() {
        let mesh = two_triangle_mesh();
        assert_eq!(mesh.interior_edges.len(), 1);
        assert_eq!(mesh.boundary_edges.len(), 4);
        mesh.validate().unwrap();
        // orientation flip works
        let flipped = Mesh::from_raw(
            mesh.vertices.clone(),
            vec![[0, 2, 1], [0, 2, 3]],
            vec![
                (0, 1, "b".into()),
                (1, 2, "b".into()),
                (2, 3, "b".into()),
                (3, 0, "b".into()),
            ],
        )
        .unwrap();
        flipped.validate().unwrap();
    }

    #[test]
    fn missing_boundary_tag_is_rejected() {
        let err = Mesh::from_raw(
            vec![V2::new(0.0, 0.0), V2::new(1.0, 0.0), V2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
            vec![(0, 1, "b".into()), (1, 2, "b".into())],
        )
        .unwrap_err();
        assert!(err.to_string().contains("no boundary tag"));
    }
}
