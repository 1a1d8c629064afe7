//! Block incomplete LU factorization with level-of-fill ILU(n).
//!
//! The factorization works on the block sparsity pattern: fill levels are
//! computed symbolically on block positions, then a block IKJ sweep factors
//! the numeric values. Diagonal blocks are inverted densely.

use super::block::BlockMatrix;
use crate::error::Error;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

pub struct BlockIlu {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    /// strictly-lower blocks per row, sorted by column
    lower: Vec<Vec<(usize, DMatrix<f64>)>>,
    /// strictly-upper blocks per row, sorted by column
    upper: Vec<Vec<(usize, DMatrix<f64>)>>,
    /// inverted diagonal blocks
    inv_diag: Vec<DMatrix<f64>>,
}

impl BlockIlu {
    /// Factor `a` with fill level `level` (0 keeps the original pattern).
    pub fn factor(a: &BlockMatrix, level: usize) -> Result<BlockIlu> {
        let n = a.n_block_rows();
        let dims = a.row_dims().to_vec();

        // symbolic phase: level-of-fill per block position, row by row
        let mut patterns: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: BTreeMap<usize, usize> = a
                .row_blocks(i)
                .iter()
                .map(|(c, _)| (*c, 0usize))
                .collect();
            row.entry(i).or_insert(0); // diagonal must exist
            let ks: Vec<usize> = row.keys().copied().filter(|&k| k < i).collect();
            for k in ks {
                let lev_ik = row[&k];
                if lev_ik > level {
                    continue;
                }
                let kr = patterns[k].clone();
                for (&j, &lev_kj) in kr.range((k + 1)..) {
                    let lev = lev_ik + lev_kj + 1;
                    if lev <= level {
                        row.entry(j)
                            .and_modify(|l| *l = (*l).min(lev))
                            .or_insert(lev);
                    }
                }
            }
            row.retain(|_, l| *l <= level);
            patterns.push(row);
        }

        // numeric phase
        let mut rows: Vec<BTreeMap<usize, DMatrix<f64>>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut row: BTreeMap<usize, DMatrix<f64>> = patterns[i]
                .keys()
                .map(|&c| {
                    let b = a
                        .block(i, c)
                        .cloned()
                        .unwrap_or_else(|| DMatrix::zeros(dims[i], dims[c]));
                    (c, b)
                })
                .collect();
            rows.push(std::mem::take(&mut row));
        }

        let mut inv_diag: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        for i in 0..n {
            let ks: Vec<usize> = rows[i].keys().copied().filter(|&k| k < i).collect();
            for k in ks {
                // L_ik = A_ik * inv(U_kk)
                let lik = rows[i][&k].clone() * &inv_diag[k];
                let us: Vec<(usize, DMatrix<f64>)> = rows[k]
                    .range((k + 1)..)
                    .map(|(c, b)| (*c, b.clone()))
                    .collect();
                for (j, ukj) in us {
                    if let Some(aij) = rows[i].get_mut(&j) {
                        *aij -= &lik * ukj;
                    }
                }
                rows[i].insert(k, lik);
            }
            let diag = rows[i][&i].clone();
            let inv = diag.try_inverse().ok_or_else(|| {
                Error::LinearBreakdown(format!("singular ILU pivot block at row {i}"))
            })?;
            inv_diag.push(inv);
        }

        let offsets: Vec<usize> = {
            let mut off = vec![0];
            for &d in &dims {
                off.push(off.last().unwrap() + d);
            }
            off
        };
        let lower = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.range(..i)
                    .map(|(c, b)| (*c, b.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        let upper = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.range((i + 1)..)
                    .map(|(c, b)| (*c, b.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(BlockIlu {
            dims,
            offsets,
            lower,
            upper,
            inv_diag,
        })
    }

    /// Apply the preconditioner: y = (LU)^{-1} x.
    pub fn solve(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dims.len();
        let mut y = x.clone();
        // forward: (I + L) y = x
        for i in 0..n {
            let mut yi = y.rows(self.offsets[i], self.dims[i]).clone_owned();
            for (k, lik) in &self.lower[i] {
                let yk = y.rows(self.offsets[*k], self.dims[*k]).clone_owned();
                yi.gemv(-1.0, lik, &yk, 1.0);
            }
            y.rows_mut(self.offsets[i], self.dims[i]).copy_from(&yi);
        }
        // backward: U z = y
        for i in (0..n).rev() {
            let mut yi = y.rows(self.offsets[i], self.dims[i]).clone_owned();
            for (j, uij) in &self.upper[i] {
                let yj = y.rows(self.offsets[*j], self.dims[*j]).clone_owned();
                yi.gemv(-1.0, uij, &yj, 1.0);
            }
            let zi = &self.inv_diag[i] * yi;
            y.rows_mut(self.offsets[i], self.dims[i]).copy_from(&zi);
        }
        y
    }
}
