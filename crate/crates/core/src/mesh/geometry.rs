//! Reference-to-physical geometry mappings.
//!
//! Straight elements use the affine map defined by their vertices. Elements
//! touching a curved boundary carry a degree-q Lagrange map whose nodes on
//! the curved edge are projected onto the exact curve; nodes on straight
//! edges stay put, so shared edges with straight neighbors remain straight
//! and the mesh stays watertight.

use super::Mesh;
use crate::geom::V2;
use crate::space::basis::{n_modes, tri_eval, tri_eval_grad};
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Debug)]
pub enum GeometryMap {
    Affine,
    Curved { q: usize, nodes: Vec<V2> },
}

/// Lagrange basis of degree q on the reference triangle, expressed in the
/// modal basis (`coeff` = inverse generalized Vandermonde).
pub struct LagrangeGeom {
    pub q: usize,
    pub ref_nodes: Vec<V2>,
    coeff: DMatrix<f64>,
}

impl LagrangeGeom {
    /// Shape function values at `pts`: n_nodes × npts.
    pub fn shape(&self, pts: &[V2]) -> DMatrix<f64> {
        self.coeff.transpose() * tri_eval(self.q, pts)
    }

    /// Shape values and reference gradients at `pts`.
    pub fn shape_grad(&self, pts: &[V2]) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (phi, du, dv) = tri_eval_grad(self.q, pts);
        let ct = self.coeff.transpose();
        (&ct * phi, &ct * du, &ct * dv)
    }

    /// Node ids strictly inside local edge `le` (endpoints excluded).
    pub fn edge_interior_nodes(&self, le: usize) -> Vec<usize> {
        let q = self.q;
        let mut out = Vec::new();
        for (idx, &(i, j)) in self.index_pairs().iter().enumerate() {
            let on_edge = match le {
                0 => j == 0,
                1 => i + j == q,
                2 => i == 0,
                _ => unreachable!(),
            };
            let is_vertex = (i == 0 && j == 0) || (i == q && j == 0) || (i == 0 && j == q);
            if on_edge && !is_vertex {
                out.push(idx);
            }
        }
        out
    }

    fn index_pairs(&self) -> Vec<(usize, usize)> {
        let q = self.q;
        let mut out = Vec::new();
        for j in 0..=q {
            for i in 0..=(q - j) {
                out.push((i, j));
            }
        }
        out
    }
}

static LAGRANGE: OnceLock<Mutex<HashMap<usize, Arc<LagrangeGeom>>>> = OnceLock::new();

pub fn lagrange_geom(q: usize) -> Arc<LagrangeGeom> {
    let cache = LAGRANGE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(q)
        .or_insert_with(|| {
            let mut ref_nodes = Vec::with_capacity(n_modes(q));
            for j in 0..=q {
                for i in 0..=(q - j) {
                    ref_nodes.push(V2::new(i as f64 / q as f64, j as f64 / q as f64));
                }
            }
            let vand = tri_eval(q, &ref_nodes).transpose(); // V[a][k] = phi_k(node_a)
            let coeff = vand
                .try_inverse()
                .expect("Lagrange Vandermonde is invertible");
            Arc::new(LagrangeGeom {
                q,
                ref_nodes,
                coeff,
            })
        })
        .clone()
}

impl Mesh {
    fn affine_parts(&self, k: usize) -> (V2, V2, V2) {
        let [a, b, c] = self.elem_vertices(k);
        (a, b - a, c - a)
    }

    /// Physical position of reference point `xi` in element `k`.
    pub fn geom_eval(&self, k: usize, xi: V2) -> V2 {
        match &self.elements[k].geometry {
            GeometryMap::Affine => {
                let (a, e1, e2) = self.affine_parts(k);
                a + e1 * xi.x + e2 * xi.y
            }
            GeometryMap::Curved { q, nodes } => {
                let lag = lagrange_geom(*q);
                let shape = lag.shape(&[xi]);
                let mut out = V2::ZERO;
                for (i, node) in nodes.iter().enumerate() {
                    out = out + *node * shape[(i, 0)];
                }
                out
            }
        }
    }

    /// dx/dxi at `xi`, row-major [[dx/du, dx/dv], [dy/du, dy/dv]].
    pub fn geom_jacobian(&self, k: usize, xi: V2) -> [[f64; 2]; 2] {
        match &self.elements[k].geometry {
            GeometryMap::Affine => {
                let (_, e1, e2) = self.affine_parts(k);
                [[e1.x, e2.x], [e1.y, e2.y]]
            }
            GeometryMap::Curved { q, nodes } => {
                let lag = lagrange_geom(*q);
                let (_, du, dv) = lag.shape_grad(&[xi]);
                let mut j = [[0.0; 2]; 2];
                for (i, node) in nodes.iter().enumerate() {
                    j[0][0] += node.x * du[(i, 0)];
                    j[0][1] += node.x * dv[(i, 0)];
                    j[1][0] += node.y * du[(i, 0)];
                    j[1][1] += node.y * dv[(i, 0)];
                }
                j
            }
        }
    }

    pub fn geom_jacobian_det(&self, k: usize, xi: V2) -> f64 {
        let j = self.geom_jacobian(k, xi);
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    /// Reference coordinates of physical point `x` in element `k`
    /// (Newton iteration for curved elements).
    pub fn geom_inverse(&self, k: usize, x: V2) -> V2 {
        let (a, e1, e2) = self.affine_parts(k);
        let det = e1.cross(e2);
        let rhs = x - a;
        let mut xi = V2::new(
            (rhs.x * e2.y - rhs.y * e2.x) / det,
            (e1.x * rhs.y - e1.y * rhs.x) / det,
        );
        if matches!(self.elements[k].geometry, GeometryMap::Affine) {
            return xi;
        }
        for _ in 0..30 {
            let r = self.geom_eval(k, xi) - x;
            if r.norm() < 1e-14 {
                break;
            }
            let j = self.geom_jacobian(k, xi);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            xi = V2::new(
                xi.x - (j[1][1] * r.x - j[0][1] * r.y) / det,
                xi.y - (-j[1][0] * r.x + j[0][0] * r.y) / det,
            );
        }
        xi
    }

    /// Whether element `k` carries a curved geometry map.
    pub fn is_curved(&self, k: usize) -> bool {
        matches!(self.elements[k].geometry, GeometryMap::Curved { .. })
    }
}

/// Invert a 2x2 Jacobian; returns J^{-1} row-major.
#[inline]
pub fn invert2(j: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    [
        [j[1][1] / det, -j[0][1] / det],
        [-j[1][0] / det, j[0][0] / det],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryGeometry, Mesh};

    struct Circle;
    impl BoundaryGeometry for Circle {
        fn project(&self, _tag: &str, p: V2) -> V2 {
            p * (1.0 / p.norm())
        }
        fn is_curved(&self, tag: &str) -> bool {
            tag == "arc"
        }
    }

    fn curved_triangle() -> Mesh {
        // one triangle whose first edge spans a 30 degree arc of the unit circle
        let th = std::f64::consts::PI / 6.0;
        let v = vec![
            V2::new(1.0, 0.0),
            V2::new(th.cos(), th.sin()),
            V2::new(0.0, 0.0),
        ];
        let mesh = Mesh::from_raw(
            v,
            vec![[0, 1, 2]],
            vec![
                (0, 1, "arc".into()),
                (1, 2, "s".into()),
                (2, 0, "s".into()),
            ],
        )
        .unwrap();
        mesh.with_curved_boundary(&Circle, 3)
    }

    #[test]
    fn curved_edge_interpolates_circle() {
        let mesh = curved_triangle();
        assert!(mesh.is_curved(0));
        // points along local edge 0 (v0 -> v1) must be close to the unit circle
        for &s in &[0.2, 0.5, 0.8] {
            let x = mesh.geom_eval(0, crate::space::tables::local_edge_point(0, s));
            assert!((x.norm() - 1.0).abs() < 5e-4, "r = {}", x.norm());
        }
        // straight edges stay straight: edge 1 runs from v1 to the origin
        let dir = V2::new((std::f64::consts::PI / 6.0).cos(), (std::f64::consts::PI / 6.0).sin());
        for &s in &[0.3, 0.7] {
            let x = mesh.geom_eval(0, crate::space::tables::local_edge_point(1, s));
            assert!(x.cross(dir).abs() < 1e-13);
        }
        mesh.validate().unwrap();
    }

    #[test]
    fn inverse_map_round_trips() {
        let mesh = curved_triangle();
        for xi in [V2::new(0.3, 0.2), V2::new(0.1, 0.7), V2::new(0.55, 0.4)] {
            let x = mesh.geom_eval(0, xi);
            let back = mesh.geom_inverse(0, x);
            assert!((back - xi).norm() < 1e-12);
        }
    }

    #[test]
    fn curved_area_close_to_exact() {
        let mesh = curved_triangle();
        // circular sector of 30 degrees
        let exact = std::f64::consts::PI / 12.0;
        assert!(
            (mesh.area(0) - exact).abs() < 2e-4,
            "area {} vs {exact}",
            mesh.area(0)
        );
    }
}
