//! Square banded matrices with equal lower and upper bandwidth, and an LU
//! factorization without pivoting.
//!
//! The systems assembled here are diagonally dominant (L1 shift plus an
//! M-matrix), so elimination without row exchanges keeps the band and is stable.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    /// Row-major: row `i` holds columns `i − bw ..= i + bw`.
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self { n, bw: bandwidth, data: vec![0.0; n * (2 * bandwidth + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn offset(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || i.abs_diff(j) > self.bw {
            return None;
        }
        Some(i * (2 * self.bw + 1) + (j + self.bw - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.offset(i, j).map_or(0.0, |o| self.data[o])
    }

    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j).expect("entry outside band");
        self.data[o] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let o = self.offset(i, j).expect("entry outside band");
        self.data[o] = v;
    }

    /// Zeroes row `i` and puts `diag` on the diagonal.
    pub fn set_identity_row(&mut self, i: usize, diag: f64) {
        let w = 2 * self.bw + 1;
        self.data[i * w..(i + 1) * w].iter_mut().for_each(|x| *x = 0.0);
        self.set(i, i, diag);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let hi = (i + self.bw).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.bw);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let hi = (i + self.bw).min(self.n - 1);
            for j in lo..=hi {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Solves `A x = b` by banded Gaussian elimination; `self` is consumed as
    /// workspace.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        let bw = self.bw;
        for k in 0..n {
            let pivot = self.get(k, k);
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::Linear(format!("zero or non-finite pivot at row {k}")));
            }
            let hi = (k + bw).min(n - 1);
            for i in k + 1..=hi {
                let l = self.get(i, k) / pivot;
                if l == 0.0 {
                    continue;
                }
                self.set(i, k, 0.0);
                for j in k + 1..=hi {
                    let v = self.get(k, j);
                    if v != 0.0 {
                        self.add(i, j, -l * v);
                    }
                }
                x[i] -= l * x[k];
            }
        }
        for k in (0..n).rev() {
            let hi = (k + bw).min(n - 1);
            let s = x[k] - (k + 1..=hi).map(|j| self.get(k, j) * x[j]).sum::<f64>();
            x[k] = s / self.get(k, k);
        }
        Ok(x)
    }
}
