//! Banded LU factorisation with partial pivoting.
//!
//! Storage is row-wise: row `i` keeps columns `i - kl ..= i + kl + ku`, the
//! extra `kl` super-diagonals holding fill-in created by row interchanges.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Zero `n x n` matrix with `kl` sub- and `ku` super-diagonals.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn in_storage(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.kl + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n && self.in_storage(i, j));
        i * self.width + (j + self.kl - i)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Panics if `(i, j)` lies outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "({i}, {j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_into(x, &mut out);
        out
    }

    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let row = &self.data[i * self.width..];
            *o = (lo..=hi).map(|j| row[j + self.kl - i] * x[j]).sum();
        }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Factorises a copy of the matrix.
    pub fn factorize(&self) -> Result<BandLu> {
        BandLu::new(self.clone())
    }
}

/// `P A = L U` for a band matrix. `L` is unit lower with bandwidth `kl`,
/// `U` has upper bandwidth `kl + ku`.
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    fn new(mut a: BandMatrix) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.data[a.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = a.data[a.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularSystem { row: k });
            }
            pivots[k] = p;
            let last_col = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (ik, ip) = (a.idx(k, j), a.idx(p, j));
                    a.data.swap(ik, ip);
                }
            }
            let pivot = a.data[a.idx(k, k)];
            for r in k + 1..=last_row {
                let irk = a.idx(r, k);
                let l = a.data[irk] / pivot;
                a.data[irk] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=last_col {
                    let (irj, ikj) = (a.idx(r, j), a.idx(k, j));
                    a.data[irj] -= l * a.data[ikj];
                }
            }
        }
        Ok(Self { lu: a, pivots })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let a = &self.lu;
        let n = a.n;
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for r in k + 1..=(k + a.kl).min(n - 1) {
                    b[r] -= a.data[a.idx(r, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..=(i + a.kl + a.ku).min(n - 1) {
                acc -= a.data[a.idx(i, j)] * b[j];
            }
            b[i] = acc / a.data[a.idx(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
