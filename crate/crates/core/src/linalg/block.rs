//! Sparse matrix with dense rectangular blocks of varying sizes.
//!
//! Rows and columns are indexed by entities (edges for the condensed HDG
//! system, elements for DG); the scalar layout is the concatenation of the
//! per-entity blocks.

use nalgebra::{DMatrix, DVector};
use std::io::Write;

#[derive(Clone, Debug)]
pub struct BlockMatrix {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
    row_offsets: Vec<usize>,
    col_offsets: Vec<usize>,
    /// per block row: (block col, dense block), sorted by block col
    rows: Vec<Vec<(usize, DMatrix<f64>)>>,
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(dims.len() + 1);
    let mut acc = 0;
    off.push(0);
    for &d in dims {
        acc += d;
        off.push(acc);
    }
    off
}

impl BlockMatrix {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Self {
        let row_offsets = offsets(&row_dims);
        let col_offsets = offsets(&col_dims);
        let rows = vec![Vec::new(); row_dims.len()];
        BlockMatrix {
            row_dims,
            col_dims,
            row_offsets,
            col_offsets,
            rows,
        }
    }

    pub fn square(dims: Vec<usize>) -> Self {
        Self::new(dims.clone(), dims)
    }

    pub fn n_block_rows(&self) -> usize {
        self.row_dims.len()
    }

    pub fn nrows(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }

    pub fn ncols(&self) -> usize {
        *self.col_offsets.last().unwrap()
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn row_offset(&self, r: usize) -> usize {
        self.row_offsets[r]
    }

    pub fn col_offset(&self, c: usize) -> usize {
        self.col_offsets[c]
    }

    /// Stored scalar entries (all blocks are dense).
    pub fn nnz(&self) -> usize {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(_, b)| b.len()).sum::<usize>())
            .sum()
    }

    pub fn block(&self, r: usize, c: usize) -> Option<&DMatrix<f64>> {
        self.rows[r]
            .binary_search_by_key(&c, |(col, _)| *col)
            .ok()
            .map(|i| &self.rows[r][i].1)
    }

    pub fn row_blocks(&self, r: usize) -> &[(usize, DMatrix<f64>)] {
        &self.rows[r]
    }

    /// Accumulate `m` into block (r, c), creating it if absent.
    pub fn add_block(&mut self, r: usize, c: usize, m: &DMatrix<f64>) {
        debug_assert_eq!(m.nrows(), self.row_dims[r]);
        debug_assert_eq!(m.ncols(), self.col_dims[c]);
        match self.rows[r].binary_search_by_key(&c, |(col, _)| *col) {
            Ok(i) => self.rows[r][i].1 += m,
            Err(i) => self.rows[r].insert(i, (c, m.clone())),
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.ncols());
        let mut y = DVector::zeros(self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            let r0 = self.row_offsets[r];
            let rd = self.row_dims[r];
            for (c, b) in row {
                let c0 = self.col_offsets[*c];
                let cd = self.col_dims[*c];
                let xs = x.rows(c0, cd);
                let mut ys = y.rows_mut(r0, rd);
                ys.gemv(1.0, b, &xs, 1.0);
            }
        }
        y
    }

    pub fn transpose(&self) -> BlockMatrix {
        let mut t = BlockMatrix::new(self.col_dims.clone(), self.row_dims.clone());
        for (r, row) in self.rows.iter().enumerate() {
            for (c, b) in row {
                t.add_block(*c, r, &b.transpose());
            }
        }
        t
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.nrows(), self.ncols());
        for (r, row) in self.rows.iter().enumerate() {
            for (c, b) in row {
                d.view_mut((self.row_offsets[r], self.col_offsets[*c]), b.shape())
                    .copy_from(b);
            }
        }
        d
    }

    /// MatrixMarket coordinate format (1-based, general real).
    pub fn write_matrix_market(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows(), self.ncols(), self.nnz())?;
        for (r, row) in self.rows.iter().enumerate() {
            for (c, b) in row {
                for i in 0..b.nrows() {
                    for j in 0..b.ncols() {
                        writeln!(
                            out,
                            "{} {} {:.17e}",
                            self.row_offsets[r] + i + 1,
                            self.col_offsets[*c] + j + 1,
                            b[(i, j)]
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_matches_dense() {
        let mut m = BlockMatrix::new(vec![2, 3], vec![2, 3]);
        m.add_block(0, 0, &DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        m.add_block(
            0,
            1,
            &DMatrix::from_row_slice(2, 3, &[0.5, 0.0, 1.0, -1.0, 2.0, 0.0]),
        );
        m.add_block(
            1,
            1,
            &DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]),
        );
        let x = DVector::from_vec(vec![1.0, -1.0, 2.0, 0.5, -0.5]);
        let y = m.matvec(&x);
        let yd = m.to_dense() * &x;
        assert!((y - yd).norm() < 1e-14);
        assert_eq!(m.nnz(), 4 + 6 + 9);
    }

    #[test]
    fn accumulation_and_transpose() {
        let mut m = BlockMatrix::square(vec![2, 2]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        m.add_block(0, 1, &b);
        m.add_block(0, 1, &b);
        assert_eq!(m.block(0, 1).unwrap()[(1, 0)], 6.0);
        let t = m.transpose();
        assert_eq!(t.block(1, 0).unwrap()[(0, 1)], 6.0);
        assert!(t.block(0, 1).is_none());
    }

    #[test]
    fn matrix_market_output() {
        let mut m = BlockMatrix::square(vec![1, 1]);
        m.add_block(0, 0, &DMatrix::from_element(1, 1, 2.5));
        m.add_block(1, 0, &DMatrix::from_element(1, 1, -1.0));
        let mut buf = Vec::new();
        m.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket"));
        assert!(s.contains("2 2 2"));
        assert!(s.contains("2 1 -1"));
    }
}
