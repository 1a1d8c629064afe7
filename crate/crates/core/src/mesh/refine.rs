//! Conforming red-green refinement.
//!
//! Marked elements are red-split into four similar children; neighbors with
//! exactly one split edge are green-split in two to restore conformity. Green
//! elements are never refined directly: when a later pass touches a green
//! pair, the pair is merged back into its parent first and the parent is
//! red-split, which avoids degenerating angles. Elements with a curved
//! boundary edge are always red-split (their green halves would not nest in a
//! re-splittable parent).

use super::{BoundaryGeometry, Edge, EdgeRef, GreenInfo, Lineage, Mesh};
use crate::geom::V2;
use std::collections::{BTreeSet, HashMap, HashSet};

/// Where an old element's data goes in the refined mesh.
#[derive(Clone, Debug)]
pub enum Transfer {
    /// geometrically identical element
    Same { new: usize },
    /// children nested inside the old element
    Children { news: Vec<usize> },
    /// old element merged with green siblings; see [`TransferTable::groups`]
    Merged { group: usize },
}

/// Green siblings merged into their parent, which was then red-split.
#[derive(Clone, Debug)]
pub struct MergeGroup {
    pub olds: Vec<usize>,
    pub parent_verts: [V2; 3],
    pub news: Vec<usize>,
}

/// Total map from old elements to new elements.
#[derive(Clone, Debug)]
pub struct TransferTable {
    pub entries: Vec<Transfer>,
    pub groups: Vec<MergeGroup>,
}

impl TransferTable {
    pub fn identity(n: usize) -> Self {
        TransferTable {
            entries: (0..n).map(|k| Transfer::Same { new: k }).collect(),
            groups: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.groups.is_empty()
            && self
                .entries
                .iter()
                .enumerate()
                .all(|(k, t)| matches!(t, Transfer::Same { new } if *new == k))
    }
}

#[derive(Clone)]
enum BaseOrigin {
    Plain(usize),
    /// merged green pair: old ids and their vertex triples, ordered so that
    /// slot 0 is the child containing parent vertex v[split_edge]
    MergedPair {
        olds: [usize; 2],
        old_children_v: [[usize; 3]; 2],
    },
}

struct BaseElem {
    v: [usize; 3],
    origin: BaseOrigin,
    presplit: Option<(usize, usize)>, // (local edge, existing midpoint vertex)
    curved: bool,
}

fn ekey(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Mesh {
    /// Red-green refinement of the marked element set. Returns the refined
    /// mesh and a total transfer table.
    ///
    /// `boundary_geometry` places new boundary vertices on curved boundaries
    /// and re-installs curved geometry maps (when the mesh has them).
    pub fn refine(
        &self,
        marked: &BTreeSet<usize>,
        boundary_geometry: Option<&dyn BoundaryGeometry>,
    ) -> (Mesh, TransferTable) {
        assert!(
            marked.iter().all(|&k| k < self.n_elements()),
            "marked set contains an element id out of range"
        );

        // ---- assemble the virtual base mesh (greens merged into parents) ----
        let mut green_groups: HashMap<[usize; 3], Vec<usize>> = HashMap::new();
        for (k, e) in self.elements.iter().enumerate() {
            if let Some(g) = &e.lineage.green {
                green_groups.entry(g.parent_v).or_default().push(k);
            }
        }

        let mut base: Vec<BaseElem> = Vec::new();
        let mut old_to_base: HashMap<usize, usize> = HashMap::new();
        for (k, e) in self.elements.iter().enumerate() {
            if e.lineage.green.is_some() {
                continue;
            }
            let curved = e.edges.iter().any(|er| match er {
                EdgeRef::Boundary { id } => boundary_geometry
                    .map(|g| g.is_curved(&self.boundary_edges[*id].tag))
                    .unwrap_or(false),
                _ => false,
            });
            old_to_base.insert(k, base.len());
            base.push(BaseElem {
                v: e.v,
                origin: BaseOrigin::Plain(k),
                presplit: None,
                curved,
            });
        }
        for (parent_v, members) in &green_groups {
            assert_eq!(members.len(), 2, "green pair with {} members", members.len());
            let info: &GreenInfo = self.elements[members[0]].lineage.green.as_ref().unwrap();
            let se = info.split_edge as usize;
            let (pa, pb) = (parent_v[se], parent_v[(se + 1) % 3]);
            // midpoint = the child vertex that is not a parent vertex
            let mid = self.elements[members[0]]
                .v
                .iter()
                .copied()
                .find(|vi| !parent_v.contains(vi))
                .expect("green child has a midpoint vertex");
            // slot 0 holds parent vertex pa
            let (m0, m1) = if self.elements[members[0]].v.contains(&pa) {
                (members[0], members[1])
            } else {
                (members[1], members[0])
            };
            debug_assert!(self.elements[m1].v.contains(&pb));
            let idx = base.len();
            old_to_base.insert(m0, idx);
            old_to_base.insert(m1, idx);
            base.push(BaseElem {
                v: *parent_v,
                origin: BaseOrigin::MergedPair {
                    olds: [m0, m1],
                    old_children_v: [self.elements[m0].v, self.elements[m1].v],
                },
                presplit: Some((se, mid)),
                curved: false,
            });
        }

        // boundary tags of base edges, from the current mesh
        let mut tagof: HashMap<(usize, usize), String> = HashMap::new();
        for be in &self.boundary_edges {
            tagof.insert(ekey(be.v[0], be.v[1]), be.tag.clone());
        }

        // ---- red-green closure on the base mesh ----
        //
        // Besides full base edges, the halves of a presplit parent edge exist
        // as real edges in the current mesh (the green children's edges and
        // their neighbors'), so they can be split by a neighboring red
        // element. Such a parent cannot re-green; it goes red, and the red
        // child sharing the split half is green-split below.
        let mut red = vec![false; base.len()];
        for &k in marked {
            red[old_to_base[&k]] = true;
        }
        let mut split: HashSet<(usize, usize)> = HashSet::new();
        for b in &base {
            if let Some((se, _)) = b.presplit {
                split.insert(ekey(b.v[se], b.v[(se + 1) % 3]));
            }
        }
        loop {
            let mut changed = false;
            for (bi, b) in base.iter().enumerate() {
                if red[bi] {
                    for le in 0..3 {
                        if split.insert(ekey(b.v[le], b.v[(le + 1) % 3])) {
                            changed = true;
                        }
                    }
                }
            }
            for (bi, b) in base.iter().enumerate() {
                if red[bi] {
                    continue;
                }
                let nsplit = (0..3)
                    .filter(|&le| split.contains(&ekey(b.v[le], b.v[(le + 1) % 3])))
                    .count();
                let half_split = b.presplit.is_some_and(|(se, mid)| {
                    let (a, bv) = (b.v[se], b.v[(se + 1) % 3]);
                    split.contains(&ekey(a, mid)) || split.contains(&ekey(mid, bv))
                });
                if nsplit >= 2 || half_split || (b.curved && nsplit >= 1) {
                    red[bi] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        // nothing red: every green pair re-greens identically; mesh unchanged
        if !red.iter().any(|&r| r) {
            return (self.clone(), TransferTable::identity(self.n_elements()));
        }

        // ---- create midpoints ----
        let mut vertices = self.vertices.clone();
        let mut mid_of: HashMap<(usize, usize), usize> = HashMap::new();
        for b in &base {
            if let Some((se, mid)) = b.presplit {
                mid_of.insert(ekey(b.v[se], b.v[(se + 1) % 3]), mid);
            }
        }
        let mut split_sorted: Vec<_> = split.iter().copied().collect();
        split_sorted.sort();
        for &(a, bver) in &split_sorted {
            if mid_of.contains_key(&(a, bver)) {
                continue;
            }
            let mut p = (vertices[a] + vertices[bver]) * 0.5;
            if let (Some(geomdef), Some(tag)) = (boundary_geometry, tagof.get(&(a, bver))) {
                if geomdef.is_curved(tag) {
                    p = geomdef.project(tag, p);
                }
            }
            mid_of.insert((a, bver), vertices.len());
            vertices.push(p);
        }
        let mid = |a: usize, b: usize| mid_of[&ekey(a, b)];

        // ---- emit new elements ----
        let mut tris: Vec<[usize; 3]> = Vec::new();
        let mut lineages: Vec<Lineage> = Vec::new();
        let mut entries: Vec<Transfer> = vec![Transfer::Same { new: usize::MAX }; self.n_elements()];
        let mut groups: Vec<MergeGroup> = Vec::new();

        // Emit one red child, green-splitting it when one of its edges
        // carries a pre-existing midpoint that a neighbor has split.
        let mut emit_child = |t: [usize; 3],
                              rep: usize,
                              slot: u8,
                              tris: &mut Vec<[usize; 3]>,
                              lineages: &mut Vec<Lineage>|
         -> Vec<usize> {
            let child_splits: Vec<usize> = (0..3)
                .filter(|&le| split.contains(&ekey(t[le], t[(le + 1) % 3])))
                .collect();
            match child_splits.len() {
                0 => {
                    let id = tris.len();
                    tris.push(t);
                    lineages.push(Lineage {
                        parent: Some((rep, slot)),
                        green: None,
                    });
                    vec![id]
                }
                1 => {
                    let se = child_splits[0];
                    let (a, bv, c) = (t[se], t[(se + 1) % 3], t[(se + 2) % 3]);
                    let m = mid_of[&ekey(a, bv)];
                    let first = tris.len();
                    tris.push([a, m, c]);
                    tris.push([m, bv, c]);
                    for gslot in 0..2u8 {
                        lineages.push(Lineage {
                            parent: Some((rep, gslot)),
                            green: Some(GreenInfo {
                                parent_v: t,
                                split_edge: se as u8,
                            }),
                        });
                    }
                    vec![first, first + 1]
                }
                n => unreachable!("red child with {n} split edges"),
            }
        };

        for (bi, b) in base.iter().enumerate() {
            let [v0, v1, v2] = b.v;
            if red[bi] {
                let (m01, m12, m20) = (mid(v0, v1), mid(v1, v2), mid(v2, v0));
                let rep = match &b.origin {
                    BaseOrigin::Plain(old) => *old,
                    BaseOrigin::MergedPair { olds, .. } => olds[0],
                };
                let mut news: Vec<usize> = Vec::with_capacity(4);
                for (slot, t) in [
                    [v0, m01, m20],
                    [m01, v1, m12],
                    [m20, m12, v2],
                    [m01, m12, m20],
                ]
                .into_iter()
                .enumerate()
                {
                    news.extend(emit_child(t, rep, slot as u8, &mut tris, &mut lineages));
                }
                match &b.origin {
                    BaseOrigin::Plain(old) => {
                        entries[*old] = Transfer::Children { news };
                    }
                    BaseOrigin::MergedPair { olds, .. } => {
                        let gi = groups.len();
                        groups.push(MergeGroup {
                            olds: olds.to_vec(),
                            parent_verts: [
                                self.vertices[v0],
                                self.vertices[v1],
                                self.vertices[v2],
                            ],
                            news,
                        });
                        entries[olds[0]] = Transfer::Merged { group: gi };
                        entries[olds[1]] = Transfer::Merged { group: gi };
                    }
                }
            } else {
                let split_edges: Vec<usize> = (0..3)
                    .filter(|&le| split.contains(&ekey(b.v[le], b.v[(le + 1) % 3])))
                    .collect();
                match (split_edges.len(), &b.origin) {
                    (0, BaseOrigin::Plain(old)) => {
                        let new = tris.len();
                        tris.push(b.v);
                        lineages.push(self.elements[*old].lineage.clone());
                        entries[*old] = Transfer::Same { new };
                    }
                    (1, origin) => {
                        let se = split_edges[0];
                        let (a, bv, c) = (b.v[se], b.v[(se + 1) % 3], b.v[(se + 2) % 3]);
                        let m = mid(a, bv);
                        let first = tris.len();
                        tris.push([a, m, c]);
                        tris.push([m, bv, c]);
                        for slot in 0..2u8 {
                            lineages.push(Lineage {
                                parent: Some((
                                    match origin {
                                        BaseOrigin::Plain(old) => *old,
                                        BaseOrigin::MergedPair { olds, .. } => olds[0],
                                    },
                                    slot,
                                )),
                                green: Some(GreenInfo {
                                    parent_v: b.v,
                                    split_edge: se as u8,
                                }),
                            });
                        }
                        match origin {
                            BaseOrigin::Plain(old) => {
                                entries[*old] = Transfer::Children {
                                    news: vec![first, first + 1],
                                };
                            }
                            BaseOrigin::MergedPair {
                                olds,
                                old_children_v,
                            } => {
                                // re-greened on the same edge: identical geometry
                                debug_assert_eq!(old_children_v[0], [a, m, c]);
                                debug_assert_eq!(old_children_v[1], [m, bv, c]);
                                entries[olds[0]] = Transfer::Same { new: first };
                                entries[olds[1]] = Transfer::Same { new: first + 1 };
                            }
                        }
                    }
                    (n, _) => unreachable!("non-red base element with {n} split edges"),
                }
            }
        }

        // ---- boundary segments ----
        let mut boundary: Vec<(usize, usize, String)> = Vec::new();
        for be in &self.boundary_edges {
            let (a, b) = (be.v[0], be.v[1]);
            if split.contains(&ekey(a, b)) {
                let m = mid(a, b);
                boundary.push((a, m, be.tag.clone()));
                boundary.push((m, b, be.tag.clone()));
            } else {
                boundary.push((a, b, be.tag.clone()));
            }
        }

        let mut mesh = Mesh::from_raw(vertices, tris, boundary)
            .expect("refinement of a valid mesh produced a valid mesh");
        for (k, lin) in lineages.into_iter().enumerate() {
            mesh.elements[k].lineage = lin;
        }
        if let (Some(geomdef), Some(q)) = (boundary_geometry, self.curved_q) {
            mesh = mesh.with_curved_boundary(geomdef, q);
        }
        debug_assert!(mesh.validate().is_ok());
        debug_assert!(entries
            .iter()
            .all(|t| !matches!(t, Transfer::Same { new } if *new == usize::MAX)));
        (mesh, TransferTable { entries, groups })
    }

    /// Uniform refinement: every element marked.
    pub fn refine_uniform(&self, boundary_geometry: Option<&dyn BoundaryGeometry>) -> (Mesh, TransferTable) {
        let all: BTreeSet<usize> = (0..self.n_elements()).collect();
        self.refine(&all, boundary_geometry)
    }
}

/// Interior edges of `mesh` whose two neighbors both exist in `set`.
pub fn interior_edges_within(mesh: &Mesh, set: &BTreeSet<usize>) -> Vec<usize> {
    mesh.interior_edges
        .iter()
        .enumerate()
        .filter(|(_, e): &(usize, &Edge)| set.contains(&e.elems[0]) && set.contains(&e.elems[1]))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::signed_area;

    fn square_mesh(n: usize) -> Mesh {
        crate::mesh::formats::structured_square(n)
    }

    #[test]
    fn empty_mark_is_identity() {
        let mesh = square_mesh(2);
        let (refined, table) = mesh.refine(&BTreeSet::new(), None);
        assert_eq!(refined.n_elements(), mesh.n_elements());
        assert!(table.is_identity());
    }

    #[test]
    fn uniform_mark_quadruples_without_greens() {
        let mesh = square_mesh(2);
        let (refined, table) = mesh.refine_uniform(None);
        assert_eq!(refined.n_elements(), 4 * mesh.n_elements());
        assert!(refined
            .elements
            .iter()
            .all(|e| e.lineage.green.is_none()));
        assert!(table.groups.is_empty());
        refined.validate().unwrap();
    }

    #[test]
    fn single_mark_creates_green_closure() {
        // marking one interior element splits its three edges; each
        // conforming neighbor green-splits in two
        let mesh = square_mesh(4);
        // find an element with 3 interior edges
        let k = (0..mesh.n_elements())
            .find(|&k| {
                mesh.elements[k]
                    .edges
                    .iter()
                    .all(|e| matches!(e, EdgeRef::Interior { .. }))
            })
            .expect("interior element exists");
        let marked: BTreeSet<usize> = [k].into_iter().collect();
        let (refined, table) = mesh.refine(&marked, None);
        // 1 red -> 4 children, 3 green neighbors -> 2 each, rest untouched
        let greens = refined
            .elements
            .iter()
            .filter(|e| e.lineage.green.is_some())
            .count();
        assert_eq!(greens, 6);
        assert_eq!(refined.n_elements(), mesh.n_elements() - 4 + 4 + 6);
        refined.validate().unwrap();
        match &table.entries[k] {
            Transfer::Children { news } => assert_eq!(news.len(), 4),
            t => panic!("expected Children, got {t:?}"),
        }
    }

    #[test]
    fn child_areas_sum_to_parent_area() {
        let mesh = square_mesh(2);
        let (refined, table) = mesh.refine_uniform(None);
        for k in 0..mesh.n_elements() {
            if let Transfer::Children { news } = &table.entries[k] {
                let sum: f64 = news.iter().map(|&c| refined.area(c)).sum();
                assert!((sum - mesh.area(k)).abs() < 1e-12);
            } else {
                panic!("uniform refinement must split everything");
            }
        }
    }

    #[test]
    fn marking_a_green_ungreens_the_parent() {
        let mesh = square_mesh(4);
        let k = (0..mesh.n_elements())
            .find(|&k| {
                mesh.elements[k]
                    .edges
                    .iter()
                    .all(|e| matches!(e, EdgeRef::Interior { .. }))
            })
            .unwrap();
        let (m1, _) = mesh.refine(&[k].into_iter().collect(), None);
        let g = (0..m1.n_elements())
            .find(|&i| m1.elements[i].lineage.green.is_some())
            .unwrap();
        let parent_v = m1.elements[g].lineage.green.as_ref().unwrap().parent_v;
        let parent_area = signed_area(
            m1.vertices[parent_v[0]],
            m1.vertices[parent_v[1]],
            m1.vertices[parent_v[2]],
        );
        let (m2, table) = m1.refine(&[g].into_iter().collect(), None);
        m2.validate().unwrap();
        // the pair went through a merge group that red-split the parent
        let gi = match &table.entries[g] {
            Transfer::Merged { group } => *group,
            t => panic!("expected Merged, got {t:?}"),
        };
        let group = &table.groups[gi];
        assert_eq!(group.news.len(), 4);
        let child_sum: f64 = group.news.iter().map(|&c| m2.area(c)).sum();
        assert!((child_sum - parent_area).abs() < 1e-12);
    }

    #[test]
    fn repeated_adaptive_refinement_stays_conforming() {
        let mut mesh = square_mesh(2);
        for round in 0..4 {
            let marked: BTreeSet<usize> =
                (0..mesh.n_elements()).step_by(3 + round).collect();
            let (m, table) = mesh.refine(&marked, None);
            m.validate().unwrap();
            assert_eq!(table.entries.len(), mesh.n_elements());
            mesh = m;
        }
    }
}
