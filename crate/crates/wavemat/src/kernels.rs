//! Dense complex linear-algebra primitives: rank-1 Hermitian projections,
//! Hermitian UDU* factorization, triangular solves and small matrix inversion.

use crate::{Complex64, Error, Result};

/// Squared-norm floor below which a vector counts as zero.
pub const ZERO_VECTOR_FLOOR: f64 = 1e-300;

/// Relative pivot floor for positive-definite factorization.
pub const PIVOT_FLOOR: f64 = 1e-13;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1);
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c));
        ComplexMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Plain (non-conjugating) transpose.
    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for j in 0..src.len() {
                    dst[j] += a * src[j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - I`.
    pub fn max_abs_minus_identity(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = if i == j {
                    self[(i, j)] - Complex64::new(1.0, 0.0)
                } else {
                    self[(i, j)]
                };
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Worst asymmetry `|H[i][j] - conj(H[j][i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank-1 Hermitian projection `P = (v v*)^{-1} v* v` onto the span of the
/// row vector `v`: `P[i][j] = conj(v_i) v_j / |v|^2`.
pub fn projection_from_vector(v: &[Complex64]) -> Result<ComplexMatrix> {
    let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if !(norm_sq > ZERO_VECTOR_FLOOR) {
        return Err(Error::ZeroVector(norm_sq));
    }
    let m = v.len();
    let mut p = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        let vi = v[i].conj() / norm_sq;
        for j in 0..m {
            p[(i, j)] = vi * v[j];
        }
    }
    Ok(p)
}

/// UDU* factorization of a Hermitian positive-definite matrix:
/// `H = U D U*` with `U` unit upper triangular and `D` real positive.
#[derive(Debug, Clone)]
pub struct UduFactorization {
    u: ComplexMatrix,
    d: Vec<f64>,
}

impl UduFactorization {
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn size(&self) -> usize {
        self.d.len()
    }

    /// Reassemble `U D U*` (test / diagnostic use).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.size();
        let mut ud = self.u.clone();
        for j in 0..n {
            let dj = self.d[j];
            for i in 0..n {
                ud[(i, j)] *= dj;
            }
        }
        ud.mul(&self.u.adjoint())
    }

    /// Solve `(U D U*) x = b` by two triangular substitutions and a
    /// diagonal scale.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        // U y = b (unit upper triangular, bottom up)
        let mut y = b.to_vec();
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.u[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        // D w = y
        for i in 0..n {
            y[i] /= self.d[i];
        }
        // U* x = w (unit lower triangular, top down)
        let mut x = y;
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.u[(j, i)].conj() * x[j];
            }
            x[i] = acc;
        }
        Ok(x)
    }
}

/// UDU* factorization, pivoting from the last row/column up so that the
/// unit-triangular factor comes out upper triangular.
pub fn hermitian_udu(h: &ComplexMatrix) -> Result<UduFactorization> {
    assert_eq!(h.rows(), h.cols());
    let n = h.rows();
    let scale = h.max_abs();
    let defect = h.hermitian_defect();
    if defect > 1e-8 * scale.max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let max_diag = (0..n).map(|i| h[(i, i)].re).fold(0.0f64, f64::max);
    // The relative floor catches indefinite or rank-deficient inputs. The
    // intended inputs (Hankel Gram matrices of the form G G* + I) have every
    // exact pivot >= 1, so when the dynamic range of the diagonal exceeds
    // 1e13 the relative floor alone would reject legitimate factorizations;
    // pivots above 1/2 are therefore always accepted.
    let floor = (PIVOT_FLOOR * max_diag).min(0.5);

    let mut u = ComplexMatrix::identity(n);
    let mut d = vec![0.0f64; n];
    for j in (0..n).rev() {
        let mut dj = h[(j, j)].re;
        for k in j + 1..n {
            dj -= u[(j, k)].norm_sqr() * d[k];
        }
        if !(dj > floor) {
            return Err(Error::NotPositiveDefinite {
                index: j,
                pivot: dj,
            });
        }
        d[j] = dj;
        for i in 0..j {
            let mut acc = h[(i, j)];
            for k in j + 1..n {
                acc -= u[(i, k)] * d[k] * u[(j, k)].conj();
            }
            u[(i, j)] = acc / dj;
        }
    }
    Ok(UduFactorization { u, d })
}

/// Matrix inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert_small(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let floor = PIVOT_FLOOR * m.max_abs();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap())
            .unwrap();
        let pivot = a[(pivot_row, col)];
        if pivot.norm() < floor {
            return Err(Error::Singular(pivot.norm()));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(pivot_row, j)];
                inv[(pivot_row, j)] = tmp;
            }
        }
        let inv_pivot = Complex64::new(1.0, 0.0) / pivot;
        for j in 0..n {
            a[(col, j)] *= inv_pivot;
            inv[(col, j)] *= inv_pivot;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = a[(i, col)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let ac = a[(col, j)];
                let ic = inv[(col, j)];
                a[(i, j)] -= f * ac;
                inv[(i, j)] -= f * ic;
            }
        }
    }
    Ok(inv)
}

/// `log2 |det M|` by LU elimination with partial pivoting, accumulating pivot
/// magnitudes in log space so that determinants like `2^400` never overflow.
/// Returns `-inf` for an exactly singular matrix.
pub fn det_log2_magnitude(m: &ComplexMatrix) -> f64 {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut a = m.clone();
    let mut log2 = 0.0f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap())
            .unwrap();
        let pivot = a[(pivot_row, col)];
        if pivot == Complex64::new(0.0, 0.0) {
            return f64::NEG_INFINITY;
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
        }
        log2 += pivot.norm().log2();
        for i in col + 1..n {
            let f = a[(i, col)] / pivot;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col + 1..n {
                let ac = a[(col, j)];
                a[(i, j)] -= f * ac;
            }
        }
    }
    log2
}
