//! Memoized basis-at-quadrature tables used by the assembly loops.

use super::basis::{edge_eval, tri_eval_grad};
use super::quadrature::{edge_rule, tri_rule, EdgeRule, TriRule};
use crate::geom::V2;
use nalgebra::DMatrix;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Element basis sampled at a volume rule.
pub struct VolumeTable {
    pub rule: Arc<TriRule>,
    pub phi: DMatrix<f64>,
    pub du: DMatrix<f64>,
    pub dv: DMatrix<f64>,
}

/// Element basis sampled along one local edge, parameterized by the local
/// (counter-clockwise) edge coordinate at the points of an [`EdgeRule`].
pub struct ElemEdgeTable {
    pub rule: Arc<EdgeRule>,
    pub phi: DMatrix<f64>,
    pub du: DMatrix<f64>,
    pub dv: DMatrix<f64>,
}

/// Edge (trace) basis sampled at an [`EdgeRule`].
pub struct EdgeModeTable {
    pub rule: Arc<EdgeRule>,
    pub psi: DMatrix<f64>,
}

/// Reference coordinates of local edge `k` at parameter `s` in [0,1],
/// traversed counter-clockwise.
#[inline]
pub fn local_edge_point(k: usize, s: f64) -> V2 {
    match k {
        0 => V2::new(s, 0.0),
        1 => V2::new(1.0 - s, s),
        2 => V2::new(0.0, 1.0 - s),
        _ => unreachable!("local edge index"),
    }
}

static VOLUME: OnceLock<Mutex<HashMap<(usize, usize), Arc<VolumeTable>>>> = OnceLock::new();
static ELEM_EDGE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<ElemEdgeTable>>>> =
    OnceLock::new();
static EDGE_MODE: OnceLock<Mutex<HashMap<(usize, usize), Arc<EdgeModeTable>>>> = OnceLock::new();

pub fn volume_table(p: usize, qdeg: usize) -> Arc<VolumeTable> {
    let cache = VOLUME.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((p, qdeg))
        .or_insert_with(|| {
            let rule = tri_rule(qdeg);
            let (phi, du, dv) = tri_eval_grad(p, &rule.points);
            Arc::new(VolumeTable { rule, phi, du, dv })
        })
        .clone()
}

pub fn elem_edge_table(p: usize, local_edge: usize, qdeg: usize) -> Arc<ElemEdgeTable> {
    let cache = ELEM_EDGE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((p, local_edge, qdeg))
        .or_insert_with(|| {
            let rule = edge_rule(qdeg);
            let pts: Vec<V2> = rule
                .points
                .iter()
                .map(|&s| local_edge_point(local_edge, s))
                .collect();
            let (phi, du, dv) = tri_eval_grad(p, &pts);
            Arc::new(ElemEdgeTable { rule, phi, du, dv })
        })
        .clone()
}

pub fn edge_mode_table(p_e: usize, qdeg: usize) -> Arc<EdgeModeTable> {
    let cache = EDGE_MODE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((p_e, qdeg))
        .or_insert_with(|| {
            let rule = edge_rule(qdeg);
            let psi = edge_eval(p_e, &rule.points);
            Arc::new(EdgeModeTable { rule, psi })
        })
        .clone()
}
