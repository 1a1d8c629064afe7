//! Per-element / per-edge polynomial degree maps.

use super::basis::n_modes;
use crate::mesh::Mesh;

/// Polynomial degrees for every element and interior edge. The edge degree is
/// tied to the neighbors by the max rule, which keeps the trace space rich
/// enough on degree transitions.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeMap {
    pub p_elem: Vec<usize>,
    pub p_edge: Vec<usize>,
}

impl DegreeMap {
    pub fn uniform(mesh: &Mesh, p: usize) -> Self {
        let mut dm = DegreeMap {
            p_elem: vec![p; mesh.n_elements()],
            p_edge: vec![p; mesh.interior_edges.len()],
        };
        dm.recompute_edges(mesh);
        dm
    }

    pub fn from_element_degrees(mesh: &Mesh, p_elem: Vec<usize>) -> Self {
        assert_eq!(p_elem.len(), mesh.n_elements());
        let mut dm = DegreeMap {
            p_elem,
            p_edge: vec![0; mesh.interior_edges.len()],
        };
        dm.recompute_edges(mesh);
        dm
    }

    /// Re-establish p_e = max(p_K-, p_K+) on every interior edge.
    pub fn recompute_edges(&mut self, mesh: &Mesh) {
        for (i, e) in mesh.interior_edges.iter().enumerate() {
            self.p_edge[i] = self.p_elem[e.elems[0]].max(self.p_elem[e.elems[1]]);
        }
    }

    pub fn max_rule_holds(&self, mesh: &Mesh) -> bool {
        mesh.interior_edges.iter().enumerate().all(|(i, e)| {
            self.p_edge[i] == self.p_elem[e.elems[0]].max(self.p_elem[e.elems[1]])
        })
    }

    /// Enriched map (every degree +1) for the adjoint space.
    pub fn enriched(&self) -> DegreeMap {
        DegreeMap {
            p_elem: self.p_elem.iter().map(|p| p + 1).collect(),
            p_edge: self.p_edge.iter().map(|p| p + 1).collect(),
        }
    }

    /// State degrees of freedom Σ_K m·n(p_K), the resolution measure used in
    /// all reports.
    pub fn ndof_w(&self, m: usize) -> usize {
        self.p_elem.iter().map(|&p| m * n_modes(p)).sum()
    }

    /// Trace degrees of freedom Σ_e m·(p_e+1).
    pub fn ndof_lambda(&self, m: usize) -> usize {
        self.p_edge.iter().map(|&p| m * (p + 1)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::formats::structured_square;

    #[test]
    fn max_rule_and_dof_counts() {
        let mesh = structured_square(2);
        let mut dm = DegreeMap::uniform(&mesh, 2);
        assert!(dm.max_rule_holds(&mesh));
        assert_eq!(dm.ndof_w(4), mesh.n_elements() * 4 * 6);
        assert_eq!(dm.ndof_lambda(4), mesh.interior_edges.len() * 4 * 3);

        dm.p_elem[3] = 4;
        assert!(!dm.max_rule_holds(&mesh));
        dm.recompute_edges(&mesh);
        assert!(dm.max_rule_holds(&mesh));
        for (i, e) in mesh.interior_edges.iter().enumerate() {
            if e.elems.contains(&3) {
                assert_eq!(dm.p_edge[i], 4);
            }
        }
    }
}
