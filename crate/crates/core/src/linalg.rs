//! Small dense complex matrices.
//!
//! Dimensions in this crate are fusion-space sized (a handful to a few
//! hundred), so everything is a plain row-major `Vec` with naive kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use thiserror::Error;

use crate::math;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("ragged rows: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::Ragged {
                    row: i,
                    len: row.len(),
                    expected: ncols,
                });
            }
            data.extend(row);
        }
        Ok(CMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix from real entries, row-major. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged real matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn checked_mul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Entrywise max-abs norm of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Position and magnitude of the largest entry of `self - other`.
    pub fn argmax_abs_diff(&self, other: &CMatrix) -> Option<((usize, usize), f64)> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let mut best = None;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - other[(i, j)]).norm();
                match best {
                    Some((_, m)) if m >= d => {}
                    _ => best = Some(((i, j), d)),
                }
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// `max |(M M^†) - I|`; infinite for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.checked_mul(&self.adjoint()).expect("square");
        prod.max_abs_diff(&CMatrix::identity(self.rows)).expect("same shape")
    }

    /// Commutator norm `max |AB - BA|`.
    pub fn commutator_norm(&self, other: &CMatrix) -> Result<f64, LinalgError> {
        let ab = self.checked_mul(other)?;
        let ba = other.checked_mul(self)?;
        ab.max_abs_diff(&ba)
    }

    /// LU factorisation with partial pivoting; returns `(lu, perm, det)`.
    fn lu(&self) -> Result<(CMatrix, Vec<usize>, Complex64), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut det = ONE;
        let scale = self.max_abs();
        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot_abs <= scale * 1e-14 || pivot_abs == 0.0 {
                return Err(LinalgError::Singular);
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                det = -det;
            }
            let pivot = lu[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok((lu, perm, det))
    }

    pub fn determinant(&self) -> Result<Complex64, LinalgError> {
        match self.lu() {
            Ok((_, _, det)) => Ok(det),
            Err(LinalgError::Singular) => Ok(ZERO),
            Err(e) => Err(e),
        }
    }

    pub fn inverse(&self) -> Result<CMatrix, LinalgError> {
        let (lu, perm, _) = self.lu()?;
        let n = self.rows;
        let mut inv = CMatrix::zeros(n, n);
        for col in 0..n {
            // Solve L U x = P e_col.
            let mut x: Vec<Complex64> = (0..n).map(|i| if perm[i] == col { ONE } else { ZERO }).collect();
            for i in 0..n {
                for k in 0..i {
                    let sub = lu[(i, k)] * x[k];
                    x[i] -= sub;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let sub = lu[(i, k)] * x[k];
                    x[i] -= sub;
                }
                x[i] /= lu[(i, i)];
            }
            for i in 0..n {
                inv[(i, col)] = x[i];
            }
        }
        Ok(inv)
    }

    /// Eigenvalues by Hessenberg reduction and shifted QR iteration.
    ///
    /// Intended for the small normal matrices produced by braid
    /// representations; order of the returned values is unspecified.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare(self.rows, self.cols));
        }
        let mut h = self.hessenberg();
        let mut eig = Vec::with_capacity(self.rows);
        let mut hi = self.rows;
        let mut iter = 0usize;
        let eps = f64::EPSILON;
        while hi > 0 {
            if hi == 1 {
                eig.push(h[(0, 0)]);
                break;
            }
            // Find the start of the active unreduced block.
            let mut lo = hi - 1;
            while lo > 0 {
                let sub = h[(lo, lo - 1)].norm();
                let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
                if sub <= eps * diag.max(f64::MIN_POSITIVE) {
                    h[(lo, lo - 1)] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi - 1 {
                eig.push(h[(hi - 1, hi - 1)]);
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            if iter > 10_000 {
                // Non-convergence; report the current diagonal.
                for i in (0..hi).rev() {
                    eig.push(h[(i, i)]);
                }
                break;
            }
            let shift = if iter.is_multiple_of(11) {
                // Exceptional shift to break cycles.
                h[(hi - 1, hi - 1)] + Complex64::new(h[(hi - 1, hi - 2)].norm(), 0.0)
            } else {
                wilkinson_shift(
                    h[(hi - 2, hi - 2)],
                    h[(hi - 2, hi - 1)],
                    h[(hi - 1, hi - 2)],
                    h[(hi - 1, hi - 1)],
                )
            };
            qr_step(&mut h, lo, hi, shift);
        }
        Ok(eig)
    }

    fn hessenberg(&self) -> CMatrix {
        let n = self.rows;
        let mut h = self.clone();
        for k in 0..n.saturating_sub(2) {
            let alpha_norm = math::sqrt((k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum());
            if alpha_norm == 0.0 {
                continue;
            }
            let x0 = h[(k + 1, k)];
            let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
            // v = x + phase*|x| e1, H = I - 2 v v^†/(v^† v)
            let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
            v[0] += phase * alpha_norm;
            let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // Left: h = H h on rows k+1..n
            for j in 0..n {
                let dot: Complex64 = (0..v.len()).map(|t| v[t].conj() * h[(k + 1 + t, j)]).sum();
                let f = dot * (2.0 / vnorm2);
                for t in 0..v.len() {
                    let sub = v[t] * f;
                    h[(k + 1 + t, j)] -= sub;
                }
            }
            // Right: h = h H on cols k+1..n
            for i in 0..n {
                let dot: Complex64 = (0..v.len()).map(|t| h[(i, k + 1 + t)] * v[t]).sum();
                let f = dot * (2.0 / vnorm2);
                for t in 0..v.len() {
                    let sub = f * v[t].conj();
                    h[(i, k + 1 + t)] -= sub;
                }
            }
            for i in k + 2..n {
                h[(i, k)] = ZERO;
            }
        }
        h
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    // Eigenvalue of [[a,b],[c,d]] closest to d.
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on the Hessenberg block `lo..hi`.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = math::hypot(x.norm(), y.norm());
        let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
        // G = [[c^*, s^*], [-s, c]] applied to rows k, k+1.
        for j in k..hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        rots.push((k, c, s));
    }
    for &(k, c, s) in &rots {
        // Multiply by G^† on the right, columns k, k+1.
        let top = (k + 2).min(hi);
        for i in lo..top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `e^{i theta}`.
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(math::cos(theta), math::sin(theta))
}

/// Argument normalised to `[0, 2pi)`.
pub fn phase_0_2pi(z: Complex64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut t = math::atan2(z.im, z.re);
    if t < 0.0 {
        t += two_pi;
    }
    if t >= two_pi {
        t -= two_pi;
    }
    t
}
