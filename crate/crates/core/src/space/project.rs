//! Projections between polynomial degrees and solution transfer across
//! refinement.
//!
//! The element basis is orthonormal and hierarchical, so degree reduction is
//! coefficient truncation and degree elevation is zero padding. Transfer onto
//! refined elements is an element-local L2 projection of the parent
//! polynomial.

use super::basis::{n_modes, tri_eval};
use super::degree::DegreeMap;
use super::quadrature::tri_rule;
use crate::geom::V2;
use crate::mesh::{Mesh, Transfer, TransferTable};
use nalgebra::{DMatrix, DVector};

/// Project one scalar coefficient block from degree `p` to degree `q`.
pub fn project_degree(coeffs: &[f64], p: usize, q: usize) -> Vec<f64> {
    assert_eq!(coeffs.len(), n_modes(p));
    let nq = n_modes(q);
    let mut out = vec![0.0; nq];
    let keep = nq.min(coeffs.len());
    out[..keep].copy_from_slice(&coeffs[..keep]);
    out
}

/// Project an m-component coefficient block (component-major layout).
pub fn project_degree_block(coeffs: &DVector<f64>, m: usize, p: usize, q: usize) -> DVector<f64> {
    let (np, nq) = (n_modes(p), n_modes(q));
    assert_eq!(coeffs.len(), m * np);
    let mut out = DVector::zeros(m * nq);
    for i in 0..m {
        let keep = np.min(nq);
        for j in 0..keep {
            out[i * nq + j] = coeffs[i * np + j];
        }
    }
    out
}

/// L2-project a function given in physical coordinates onto element `k` of
/// `mesh` at degree `p`. `eval` returns `m` component values at a physical
/// point. Uses the physical measure, which reduces to the reference one on
/// straight elements.
pub fn project_onto_element(
    mesh: &Mesh,
    k: usize,
    p: usize,
    m: usize,
    quad_degree: usize,
    eval: &mut dyn FnMut(V2) -> Vec<f64>,
) -> DVector<f64> {
    let rule = tri_rule(quad_degree);
    let phi = tri_eval(p, &rule.points);
    let n = n_modes(p);
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = DMatrix::zeros(n, m);
    for (q, pt) in rule.points.iter().enumerate() {
        let det = mesh.geom_jacobian_det(k, *pt);
        let w = rule.weights[q] * det;
        let x = mesh.geom_eval(k, *pt);
        let vals = eval(x);
        for a in 0..n {
            for b in 0..n {
                mass[(a, b)] += w * phi[(a, q)] * phi[(b, q)];
            }
            for i in 0..m {
                rhs[(a, i)] += w * phi[(a, q)] * vals[i];
            }
        }
    }
    let sol = mass
        .lu()
        .solve(&rhs)
        .expect("element mass matrix is invertible");
    let mut out = DVector::zeros(m * n);
    for i in 0..m {
        for a in 0..n {
            out[i * n + a] = sol[(a, i)];
        }
    }
    out
}

/// Evaluate an m-component modal coefficient block at one reference point.
pub fn eval_block_at(coeffs: &DVector<f64>, m: usize, p: usize, xi: V2) -> Vec<f64> {
    let n = n_modes(p);
    let phi = tri_eval(p, &[xi]);
    (0..m)
        .map(|i| (0..n).map(|j| coeffs[i * n + j] * phi[(j, 0)]).sum())
        .collect()
}

/// Transfer per-element solution coefficients across a refinement. Children
/// receive the L2 projection of the parent polynomial; merged green pairs are
/// first projected onto their parent triangle.
pub fn transfer_solution(
    old_mesh: &Mesh,
    old_deg: &DegreeMap,
    old_w: &[DVector<f64>],
    m: usize,
    table: &TransferTable,
    new_mesh: &Mesh,
    new_deg: &DegreeMap,
) -> Vec<DVector<f64>> {
    assert_eq!(old_w.len(), old_mesh.n_elements());
    let mut new_w: Vec<DVector<f64>> =
        (0..new_mesh.n_elements())
            .map(|k| DVector::zeros(m * n_modes(new_deg.p_elem[k])))
            .collect();

    for (old, entry) in table.entries.iter().enumerate() {
        let p_old = old_deg.p_elem[old];
        match entry {
            Transfer::Same { new } => {
                new_w[*new] = project_degree_block(&old_w[old], m, p_old, new_deg.p_elem[*new]);
            }
            Transfer::Children { news } => {
                for &child in news {
                    let p_new = new_deg.p_elem[child];
                    let qd = 2 * p_old.max(p_new) + 2;
                    new_w[child] = project_onto_element(
                        new_mesh,
                        child,
                        p_new,
                        m,
                        qd,
                        &mut |x: V2| {
                            let xi = old_mesh.geom_inverse(old, x);
                            eval_block_at(&old_w[old], m, p_old, xi)
                        },
                    );
                }
            }
            Transfer::Merged { .. } => {} // handled per group below
        }
    }

    for group in &table.groups {
        // reconstruct the parent polynomial at the max member degree
        let p_par = group.olds.iter().map(|&o| old_deg.p_elem[o]).max().unwrap();
        let n_par = n_modes(p_par);
        let [a, b, c] = group.parent_verts;
        let (e1, e2) = (b - a, c - a);
        let det = e1.cross(e2);
        let to_parent_ref = |x: V2| {
            let r = x - a;
            V2::new(
                (r.x * e2.y - r.y * e2.x) / det,
                (e1.x * r.y - e1.y * r.x) / det,
            )
        };
        // physical-measure projection accumulated over the green members
        let mut mass: DMatrix<f64> = DMatrix::zeros(n_par, n_par);
        let mut rhs: DMatrix<f64> = DMatrix::zeros(n_par, m);
        for &old in &group.olds {
            let p_old = old_deg.p_elem[old];
            let rule = tri_rule(2 * p_par.max(p_old) + 2);
            let phi_old = tri_eval(p_old, &rule.points);
            let n_old = n_modes(p_old);
            for (q, pt) in rule.points.iter().enumerate() {
                let detj = old_mesh.geom_jacobian_det(old, *pt);
                let w = rule.weights[q] * detj;
                let x = old_mesh.geom_eval(old, *pt);
                let xi_par = to_parent_ref(x);
                let phi_par = tri_eval(p_par, &[xi_par]);
                for r in 0..n_par {
                    for s in 0..n_par {
                        mass[(r, s)] += w * phi_par[(r, 0)] * phi_par[(s, 0)];
                    }
                    for i in 0..m {
                        let val: f64 = (0..n_old)
                            .map(|j| old_w[old][i * n_old + j] * phi_old[(j, q)])
                            .sum();
                        rhs[(r, i)] += w * phi_par[(r, 0)] * val;
                    }
                }
            }
        }
        let parent = mass.lu().solve(&rhs).expect("parent mass invertible");
        for &child in &group.news {
            let p_new = new_deg.p_elem[child];
            let qd = 2 * p_par.max(p_new) + 2;
            new_w[child] = project_onto_element(new_mesh, child, p_new, m, qd, &mut |x: V2| {
                let xi = to_parent_ref(x);
                let phi = tri_eval(p_par, &[xi]);
                (0..m)
                    .map(|i| (0..n_par).map(|r| parent[(r, i)] * phi[(r, 0)]).sum())
                    .collect()
            });
        }
    }

    new_w
}
