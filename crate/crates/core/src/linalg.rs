//! Sparse assembly and direct factorizations.
//!
//! Entries are summed in a fixed order before handing them to faer, so the
//! factorizations see identical input on every run.

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Triplet accumulator.
#[derive(Debug, Clone)]
pub(crate) struct Assembler {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Assembler {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i, j, v));
    }

    pub fn into_csr(mut self) -> Csr {
        // Stable sort keeps insertion order among duplicates, so the sums are reproducible.
        self.entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col = Vec::with_capacity(self.entries.len());
        let mut val: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr {
            n: self.n,
            row_ptr,
            col,
            val,
        }
    }
}

/// Square CSR matrix with sorted column indices per row.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()]
            .iter()
            .copied()
            .zip(self.val[r].iter().copied())
    }

    fn find(&self, i: usize, j: usize) -> Option<usize> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()]
            .binary_search(&j)
            .ok()
            .map(|p| r.start + p)
    }

    #[cfg(test)]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.find(i, j).map_or(0.0, |p| self.val[p])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Adds the symmetric zero-row-sum correction d_ij = max(0, a_ij, a_ji) so
    /// every off-diagonal entry becomes nonpositive. Needs a symmetric pattern.
    pub fn make_m_matrix(&mut self) {
        let mut diag_add = vec![0.0; self.n];
        let mut updates = Vec::new();
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col[p];
                if j <= i {
                    continue;
                }
                let aji = self.find(j, i).map_or(0.0, |q| self.val[q]);
                let d = self.val[p].max(aji).max(0.0);
                if d > 0.0 {
                    updates.push((i, j, d));
                }
            }
        }
        for (i, j, d) in updates {
            let p = self.find(i, j).expect("pattern");
            self.val[p] -= d;
            if let Some(q) = self.find(j, i) {
                self.val[q] -= d;
            }
            diag_add[i] += d;
            diag_add[j] += d;
        }
        for (i, d) in diag_add.into_iter().enumerate() {
            if d != 0.0 {
                let p = self.find(i, i).expect("diagonal present");
                self.val[p] += d;
            }
        }
    }

    /// Sub-matrix on the given (sorted) index set.
    pub fn restrict(&self, keep: &[usize]) -> Csr {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut row_ptr = vec![0usize; keep.len() + 1];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for (new_i, &i) in keep.iter().enumerate() {
            for (j, v) in self.row(i) {
                if map[j] != usize::MAX {
                    col.push(map[j]);
                    val.push(v);
                }
            }
            row_ptr[new_i + 1] = col.len();
        }
        Csr {
            n: keep.len(),
            row_ptr,
            col,
            val,
        }
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.val.len());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                t.push(Triplet::new(i, j, v));
            }
        }
        SparseColMat::try_new_from_triplets(self.n, self.n, &t).map_err(|e| Error::LinearSolve {
            context: "assembly",
            reason: format!("{e:?}"),
        })
    }
}

fn to_col(b: &[f64]) -> Mat<f64> {
    Mat::from_fn(b.len(), 1, |i, _| b[i])
}

fn from_col(m: &Mat<f64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// Sparse Cholesky of an SPD matrix.
pub(crate) struct SpdFactor(Llt<usize, f64>);

impl SpdFactor {
    pub fn new(a: &Csr, context: &'static str) -> Result<Self> {
        let m = a.to_faer()?;
        m.sp_cholesky(Side::Lower)
            .map(SpdFactor)
            .map_err(|e| Error::LinearSolve {
                context,
                reason: format!("Cholesky failed: {e:?}"),
            })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        from_col(&self.0.solve(to_col(b)))
    }
}

/// Sparse LU of a general square matrix.
pub(crate) struct LuFactor(Lu<usize, f64>);

impl LuFactor {
    pub fn new(a: &Csr, context: &'static str) -> Result<Self> {
        let m = a.to_faer()?;
        m.sp_lu().map(LuFactor).map_err(|e| Error::LinearSolve {
            context,
            reason: format!("LU failed: {e:?}"),
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        from_col(&self.0.solve(to_col(b)))
    }
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
