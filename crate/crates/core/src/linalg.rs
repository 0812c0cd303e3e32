//! Complex vectors and dense row-major matrices, sized for the handful of
//! operations the rate formulas need. Summations that feed determinism
//! guarantees use a fixed pairwise order.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

/// |z|^2 without the square root.
#[inline]
pub fn abs2(z: C64) -> f64 {
    z.re * z.re + z.im * z.im
}

/// Conjugated inner product x^H y.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = C64::new(0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

/// Unconjugated product sum_l x_l y_l (row vector times column vector).
pub fn dotu(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = C64::new(0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

/// Squared Euclidean norm.
pub fn norm_sqr(v: &[C64]) -> f64 {
    let mut acc = 0.0;
    for z in v {
        acc += abs2(*z);
    }
    acc
}

/// Euclidean norm.
pub fn norm(v: &[C64]) -> f64 {
    Float::sqrt(norm_sqr(v))
}

/// Pairwise (cascade) summation over the slice in index order. Deterministic
/// for a given ordering, and the canonical reduction for trial aggregates.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut acc = 0.0;
        for x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    /// Takes ownership of row-major `data`; `data.len()` must be `rows * cols`.
    pub fn from_data(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: C64) {
        self.data[r * self.cols + c] = z;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// A v.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        let mut out = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            out.push(dotu(self.row(r), v));
        }
        out
    }

    /// A^H u.
    pub fn adjoint_mul_vec(&self, u: &[C64]) -> Vec<C64> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for r in 0..self.rows {
            let ur = u[r];
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * ur;
            }
        }
        out
    }

    /// A += w x y^H (rank-one update, w real).
    pub fn add_scaled_outer(&mut self, w: f64, x: &[C64], y: &[C64]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        for r in 0..self.rows {
            let s = x[r] * w;
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (o, b) in row.iter_mut().zip(y) {
                *o += s * b.conj();
            }
        }
    }

    /// A += w I.
    pub fn add_diag_scalar(&mut self, w: f64) {
        assert_eq!(self.rows, self.cols);
        for r in 0..self.rows {
            self.data[r * self.cols + r] += w;
        }
    }

    /// A += diag(d).
    pub fn add_diag(&mut self, d: &[f64]) {
        assert_eq!(self.rows, self.cols);
        assert_eq!(d.len(), self.rows);
        for (r, w) in d.iter().enumerate() {
            self.data[r * self.cols + r] += w;
        }
    }

    /// A += H diag(w) H^H.
    pub fn add_diag_weighted_gram(&mut self, h: &CMatrix, w: &[f64]) {
        assert_eq!(self.rows, h.rows);
        assert_eq!(self.cols, h.rows);
        assert_eq!(w.len(), h.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let mut acc = C64::new(0.0, 0.0);
                for (l, wl) in w.iter().enumerate() {
                    acc += h.get(r, l) * h.get(c, l).conj() * *wl;
                }
                self.data[r * self.cols + c] += acc;
            }
        }
    }

    /// u^H A u as a complex number (real up to rounding when A is Hermitian).
    pub fn quadratic_form(&self, u: &[C64]) -> C64 {
        let au = self.mul_vec(u);
        inner(u, &au)
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.rows {
            acc += self.get(r, r);
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        Float::sqrt(norm_sqr(&self.data))
    }

    /// Row-major entries as little-endian f64 pairs (re, im), 16 bytes each.
    /// Same scalar layout as the channel dump format.
    pub fn to_interleaved_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() * 16);
        for z in &self.data {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    /// Frobenius norm of A - A^H; zero for an exactly Hermitian matrix.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let d = self.get(r, c) - self.get(c, r).conj();
                acc += abs2(d);
            }
        }
        Float::sqrt(acc)
    }
}
