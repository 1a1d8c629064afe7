//! Restarted GMRES with right preconditioning.
//!
//! Right preconditioning keeps the Arnoldi residual equal to the true
//! residual of the original system, so the reported norm is meaningful
//! without extra solves.

use crate::error::Error;
use crate::Result;
use nalgebra::DVector;

pub struct GmresOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// relative true residual at exit
    pub rel_residual: f64,
}

/// Solve A x = b with x0 = 0. `apply_a` is the operator, `precond` applies
/// M^{-1} (pass the identity for unpreconditioned runs). Converges when the
/// relative residual drops below `tol`.
pub fn gmres(
    apply_a: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    precond: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    b: &DVector<f64>,
    restart: usize,
    tol: f64,
    max_iters: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(GmresOutcome {
            x: DVector::zeros(n),
            iterations: 0,
            rel_residual: 0.0,
        });
    }
    let m = restart.max(1);
    let mut x = DVector::zeros(n);
    let mut total_iters = 0;

    loop {
        let r = b - apply_a(&x);
        let beta = r.norm();
        if beta / bnorm <= tol {
            return Ok(GmresOutcome {
                x,
                iterations: total_iters,
                rel_residual: beta / bnorm,
            });
        }
        if total_iters >= max_iters {
            return Err(Error::LinearBreakdown(format!(
                "GMRES: no convergence in {max_iters} iterations (relative residual {:.3e})",
                beta / bnorm
            )));
        }

        // Arnoldi with modified Gram-Schmidt on A M^{-1}
        let mut v: Vec<DVector<f64>> = vec![&r / beta];
        let mut h = vec![vec![0.0f64; 0]; 0]; // h[j] has j+2 entries
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut j_done = 0;

        for j in 0..m {
            if total_iters >= max_iters {
                break;
            }
            total_iters += 1;
            let z = precond(&v[j]);
            let mut w = apply_a(&z);
            let mut hj = vec![0.0; j + 2];
            for (i, vi) in v.iter().enumerate() {
                hj[i] = w.dot(vi);
                w.axpy(-hj[i], vi, 1.0);
            }
            hj[j + 1] = w.norm();
            let happy = hj[j + 1] < 1e-300;
            if !happy {
                v.push(&w / hj[j + 1]);
            }
            // apply accumulated Givens rotations
            for i in 0..j {
                let t = cs[i] * hj[i] + sn[i] * hj[i + 1];
                hj[i + 1] = -sn[i] * hj[i] + cs[i] * hj[i + 1];
                hj[i] = t;
            }
            let denom = (hj[j] * hj[j] + hj[j + 1] * hj[j + 1]).sqrt();
            let (c, s) = if denom == 0.0 {
                (1.0, 0.0)
            } else {
                (hj[j] / denom, hj[j + 1] / denom)
            };
            cs.push(c);
            sn.push(s);
            hj[j] = c * hj[j] + s * hj[j + 1];
            hj[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(hj);
            j_done = j + 1;
            if g[j + 1].abs() / bnorm <= tol || happy {
                break;
            }
        }

        // solve the triangular system for the Krylov coefficients
        let k = j_done;
        if k == 0 {
            return Err(Error::LinearBreakdown("GMRES stalled".into()));
        }
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for j2 in (i + 1)..k {
                s -= h[j2][i] * y[j2];
            }
            y[i] = s / h[i][i];
        }
        let mut update = DVector::zeros(n);
        for (j2, &yj) in y.iter().enumerate() {
            update.axpy(yj, &v[j2], 1.0);
        }
        x += precond(&update);
    }
}
