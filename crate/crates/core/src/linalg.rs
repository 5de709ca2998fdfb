//! Small dense complex linear algebra: just what the Gram/kernel matrices need.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

// Float supplies libm-backed f64 math in no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result, C64};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Leading `n × n` block.
    pub fn leading(&self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| self[(i, j)])
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|a_ij − conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Lower-triangular `L` with positive diagonal and `L Lᴴ = self`.
    ///
    /// Only the lower triangle of `self` is read.
    pub fn cholesky(&self) -> Result<CMatrix> {
        let n = self.rows;
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = C64::new(djj, 0.0);
            for i in j + 1..n {
                let mut v = self[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = v / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix by forward substitution.
    pub fn lower_inverse(&self) -> CMatrix {
        let n = self.rows;
        let mut inv = CMatrix::zeros(n, n);
        for col in 0..n {
            inv[(col, col)] = self[(col, col)].inv();
            for i in col + 1..n {
                let mut acc = C64::zero();
                for k in col..i {
                    acc += self[(i, k)] * inv[(k, col)];
                }
                inv[(i, col)] = -acc / self[(i, i)];
            }
        }
        inv
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return C64::zero();
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let factor = a[(i, k)] / pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= factor * v;
                }
            }
        }
        det
    }

    /// Coefficients `e_0, …, e_n` of `det(I + t·A) = Σ e_k t^k`, i.e. the
    /// elementary symmetric functions of the eigenvalues (Faddeev–LeVerrier).
    pub fn elementary_symmetric(&self) -> Vec<C64> {
        let n = self.rows;
        let mut e = vec![C64::zero(); n + 1];
        e[0] = C64::new(1.0, 0.0);
        // M_k = A (M_{k-1} + c_{k-1} I) with c the characteristic coefficients.
        let mut m = CMatrix::zeros(n, n);
        let mut c_prev = C64::new(1.0, 0.0);
        for k in 1..=n {
            let mut shifted = m.clone();
            for i in 0..n {
                shifted[(i, i)] += c_prev;
            }
            m = self.matmul(&shifted);
            let c = -m.trace() / k as f64;
            e[k] = if k % 2 == 0 { c } else { -c };
            c_prev = c;
        }
        e
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Roots of `Σ coeffs[k] z^k` (ascending, nonzero leading coefficient) by
/// Aberth–Ehrlich iteration.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<C64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..deg)
        .map(|k| {
            let t = 2.0 * core::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            C64::from_polar(0.5 * radius, t)
        })
        .collect();
    let eval = |z: C64| {
        let mut p = C64::zero();
        let mut dp = C64::zero();
        for c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..deg {
            let (p, dp) = eval(roots[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = C64::zero();
            for (j, r) in roots.iter().enumerate() {
                if j != i {
                    repulsion += (roots[i] - r).inv();
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            roots[i] -= step;
            moved = moved.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}
