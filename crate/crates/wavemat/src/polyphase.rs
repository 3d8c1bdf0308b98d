//! Matrix Laurent polynomials and the wavelet matrix type.
//!
//! The polyphase representation `A(z) = sum_k A_k z^k` of a rank-`m`,
//! order-`N` wavelet matrix is held as a sequence of `m x m` coefficient
//! blocks. Everything needed to validate a candidate lives here: the shifted
//! orthogonality residual, the `A(1) = I` normalization residual, degree
//! estimation and class membership.

use crate::kernels::{det_log2_magnitude, ComplexMatrix};
use crate::laurent::{LaurentPoly, MulMode};
use crate::{Complex64, Error, Result};

/// Matrix Laurent polynomial: block `k` is the coefficient of `z^{lo+k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatPoly {
    m: usize,
    lo: i64,
    blocks: Vec<ComplexMatrix>,
}

impl MatPoly {
    pub fn new(m: usize, lo: i64, blocks: Vec<ComplexMatrix>) -> Self {
        assert!(m >= 1 && !blocks.is_empty());
        assert!(blocks.iter().all(|b| b.rows() == m && b.cols() == m));
        let mut p = MatPoly { m, lo, blocks };
        p.normalize();
        p
    }

    pub fn identity(m: usize) -> Self {
        MatPoly {
            m,
            lo: 0,
            blocks: vec![ComplexMatrix::identity(m)],
        }
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.blocks.len() as i64 - 1
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// Coefficient block of `z^power` (zero block outside the stored range).
    pub fn block(&self, power: i64) -> ComplexMatrix {
        if power < self.lo || power > self.hi() {
            ComplexMatrix::zeros(self.m, self.m)
        } else {
            self.blocks[(power - self.lo) as usize].clone()
        }
    }

    fn normalize(&mut self) {
        let mut last = self.blocks.len();
        while last > 1 && self.blocks[last - 1].is_zero() {
            last -= 1;
        }
        self.blocks.truncate(last);
        let mut first = 0;
        while first + 1 < self.blocks.len() && self.blocks[first].is_zero() {
            first += 1;
        }
        if first > 0 {
            self.blocks.drain(..first);
            self.lo += first as i64;
        }
        if self.blocks.len() == 1 && self.blocks[0].is_zero() {
            self.lo = 0;
        }
    }

    /// Scalar entry `(i, j)` as a Laurent polynomial.
    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.blocks.iter().map(|b| b[(i, j)]).collect())
    }

    /// Adjoint `Ã(z) = sum A_k* z^{-k}`.
    pub fn adjoint(&self) -> MatPoly {
        let blocks: Vec<ComplexMatrix> = self.blocks.iter().rev().map(|b| b.adjoint()).collect();
        MatPoly::new(self.m, -self.hi(), blocks)
    }

    /// Plain block transpose (no conjugation, powers unchanged).
    pub fn transpose(&self) -> MatPoly {
        MatPoly::new(
            self.m,
            self.lo,
            self.blocks.iter().map(|b| b.transpose()).collect(),
        )
    }

    /// Horner evaluation at a point.
    pub fn eval(&self, z0: Complex64) -> Result<ComplexMatrix> {
        if self.lo < 0 && z0 == Complex64::new(0.0, 0.0) {
            return Err(Error::ZeroEvaluationPoint);
        }
        let mut acc = ComplexMatrix::zeros(self.m, self.m);
        for b in self.blocks.iter().rev() {
            acc = acc.scale(z0).add(b);
        }
        if self.lo != 0 {
            acc = acc.scale(z0.powi(self.lo as i32));
        }
        Ok(acc)
    }

    /// `A(1)`: the sum of all coefficient blocks.
    pub fn at_one(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.m, self.m);
        for b in &self.blocks {
            acc = acc.add(b);
        }
        acc
    }

    /// Highest power with a nonzero block. Exact nonzeroness is the right
    /// notion here: long primitive products carry trailing blocks that decay
    /// exponentially yet hold fully accurate coefficients, while exact zero
    /// blocks are already trimmed on construction.
    pub fn order_exact(&self) -> usize {
        debug_assert!(self.lo >= 0);
        for k in (0..self.blocks.len()).rev() {
            if self.blocks[k].max_abs() > 0.0 {
                return (self.lo + k as i64) as usize;
            }
        }
        0
    }

    /// First row as a flat vector `(a^1_1, ..., a^1_{(N+1)m})`, padded with
    /// zero blocks below `lo` when `lo > 0`.
    pub fn first_row_flat(&self) -> Vec<Complex64> {
        debug_assert!(self.lo >= 0);
        let mut out = vec![Complex64::new(0.0, 0.0); self.lo as usize * self.m];
        for b in &self.blocks {
            out.extend_from_slice(b.row(0));
        }
        out
    }
}

/// Block convolution `A(z) B(z)`.
pub fn matpoly_mul(a: &MatPoly, b: &MatPoly) -> Result<MatPoly> {
    matpoly_mul_mode(a, b, MulMode::Auto)
}

pub fn matpoly_mul_mode(a: &MatPoly, b: &MatPoly, mode: MulMode) -> Result<MatPoly> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch(a.rank(), b.rank()));
    }
    let m = a.rank();
    let la = a.blocks.len();
    let lb = b.blocks.len();
    let use_fft = match mode {
        MulMode::Naive => false,
        MulMode::Fft => true,
        // naive cost ~ la*lb*m^3 block products
        MulMode::Auto => la * lb * m * m * m > 4_000_000,
    };
    let blocks = if use_fft {
        matpoly_convolve_fft(a, b)
    } else {
        let mut blocks = vec![ComplexMatrix::zeros(m, m); la + lb - 1];
        for i in 0..la {
            for j in 0..lb {
                blocks[i + j] = blocks[i + j].add(&a.blocks[i].mul(&b.blocks[j]));
            }
        }
        blocks
    };
    Ok(MatPoly::new(m, a.lo + b.lo, blocks))
}

/// Convolution via FFT over each scalar entry sequence: transform, multiply
/// the `m x m` spectra bin by bin, transform back.
fn matpoly_convolve_fft(a: &MatPoly, b: &MatPoly) -> Vec<ComplexMatrix> {
    use rustfft::FftPlanner;
    let m = a.rank();
    let la = a.blocks.len();
    let lb = b.blocks.len();
    let out_len = la + lb - 1;
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let transform = |p: &MatPoly| -> Vec<Vec<Complex64>> {
        let mut spectra = vec![vec![Complex64::new(0.0, 0.0); n]; m * m];
        for (k, blk) in p.blocks.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    spectra[i * m + j][k] = blk[(i, j)];
                }
            }
        }
        for s in spectra.iter_mut() {
            fwd.process(s);
        }
        spectra
    };
    let sa = transform(a);
    let sb = transform(b);

    let mut sc = vec![vec![Complex64::new(0.0, 0.0); n]; m * m];
    for i in 0..m {
        for k in 0..m {
            let left = &sa[i * m + k];
            for j in 0..m {
                let right = &sb[k * m + j];
                let dst = &mut sc[i * m + j];
                for bin in 0..n {
                    dst[bin] += left[bin] * right[bin];
                }
            }
        }
    }

    let scale = 1.0 / n as f64;
    let mut blocks = vec![ComplexMatrix::zeros(m, m); out_len];
    for i in 0..m {
        for j in 0..m {
            let s = &mut sc[i * m + j];
            inv.process(s);
            for (k, block) in blocks.iter_mut().enumerate() {
                block[(i, j)] = s[k] * scale;
            }
        }
    }
    blocks
}

/// Polyphase split of a flat row: `a_{1j}(z) = sum_k a^1_{mk+j} z^k`.
pub fn from_flat_row(entries: &[Complex64], m: usize) -> Result<Vec<LaurentPoly>> {
    if m == 0 || !entries.len().is_multiple_of(m) {
        return Err(Error::DimensionMismatch {
            expected: m.max(1),
            got: entries.len(),
        });
    }
    let nblocks = entries.len() / m;
    Ok((0..m)
        .map(|j| LaurentPoly::new(0, (0..nblocks).map(|k| entries[m * k + j]).collect()))
        .collect())
}

/// Inverse of [`from_flat_row`]; bit-exact round trip.
pub fn to_flat_row(polys: &[LaurentPoly]) -> Vec<Complex64> {
    let m = polys.len();
    let hi = polys.iter().map(|p| p.hi()).max().unwrap_or(0).max(0);
    debug_assert!(polys.iter().all(|p| p.lo() >= 0));
    let mut out = vec![Complex64::new(0.0, 0.0); ((hi + 1) as usize) * m];
    for (j, p) in polys.iter().enumerate() {
        for k in 0..=hi {
            out[m * k as usize + j] = p.coeff(k);
        }
    }
    out
}

/// Max over `k = 0..N` of the max-norm of `sum_j A_j A*_{j+k} - delta_{k0} I`;
/// zero exactly when `A(z) Ã(z) = I`.
pub fn orthogonality_residual(a: &MatPoly) -> f64 {
    debug_assert!(a.lo() >= 0);
    let m = a.rank();
    let len = a.blocks.len();
    // quadratic-in-length direct path for small problems, FFT correlation
    // above that
    let direct_cost = len * len * m * m * m / 2;
    if direct_cost <= 200_000_000 {
        let mut worst = 0.0f64;
        for k in 0..len {
            let mut gram = ComplexMatrix::zeros(m, m);
            for j in 0..len - k {
                gram = gram.add(&a.blocks[j].mul(&a.blocks[j + k].adjoint()));
            }
            let r = if k == 0 {
                gram.max_abs_minus_identity()
            } else {
                gram.max_abs()
            };
            worst = worst.max(r);
        }
        worst
    } else {
        let product = matpoly_mul_mode(a, &a.adjoint(), MulMode::Fft).expect("same rank");
        let mut worst = 0.0f64;
        for k in product.lo()..=product.hi() {
            let blk = product.block(k);
            let r = if k == 0 {
                blk.max_abs_minus_identity()
            } else {
                blk.max_abs()
            };
            worst = worst.max(r);
        }
        worst
    }
}

/// Degree estimate from `det A(r)` and `det A(1/r)` at a point just outside
/// the unit circle.
///
/// Paraunitarity forces the determinant to be a monomial `c z^d` with
/// `|c| = 1`, so `d = log_r |det A(r)|` and `|det A(r)| * |det A(1/r)| = 1`;
/// the defect of the latter identity measures how far the determinant is
/// from such a monomial. The radius is `1 + 1/len`: far from the circle the
/// matrix entries blow up like `r^N` while the determinant stays `r^d`, and
/// the cancellation destroys the estimate, whereas near the circle `A(r)`
/// keeps entries of order one and `|det A(r)| <= r^len` is a small constant.
pub fn estimate_degree(a: &MatPoly) -> Result<(i64, f64)> {
    debug_assert!(a.lo() >= 0);
    let r = 1.0 + 1.0 / a.blocks.len().max(2) as f64;
    let lr = det_log2_magnitude(&a.eval(Complex64::new(r, 0.0))?);
    let scale = r.log2();
    if lr / scale < -(a.blocks.len() as f64) - 40.0 {
        return Err(Error::DegenerateDeterminant(lr.exp2()));
    }
    let linv = det_log2_magnitude(&a.eval(Complex64::new(1.0 / r, 0.0))?);
    let d = (lr / scale).round() as i64;
    let defect = ((lr + linv).exp2() - 1.0).abs();
    Ok((d, defect))
}

/// Validation summary for a candidate wavelet matrix.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub orthogonality_residual: f64,
    /// `|A(1) - I|_max`
    pub normalization_residual: f64,
    /// `-1` when the determinant evaluation is degenerate.
    pub degree_estimate: i64,
    pub degree_monomial_defect: f64,
    pub order: usize,
    pub in_w0: bool,
    pub in_w1: bool,
    pub tol: f64,
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "orthogonality_residual: {:.6e}",
            self.orthogonality_residual
        )?;
        writeln!(
            f,
            "normalization_residual: {:.6e}",
            self.normalization_residual
        )?;
        writeln!(f, "order: {}", self.order)?;
        writeln!(f, "degree_estimate: {}", self.degree_estimate)?;
        writeln!(
            f,
            "degree_monomial_defect: {:.6e}",
            self.degree_monomial_defect
        )?;
        writeln!(f, "in_W0: {}", self.in_w0)?;
        writeln!(f, "in_W1: {}", self.in_w1)?;
        write!(f, "tol: {:.3e}", self.tol)
    }
}

/// Full validation of a candidate wavelet matrix against `tol`.
pub fn verify(a: &MatPoly, tol: f64) -> VerificationReport {
    let order = a.order_exact();
    let orthogonality = orthogonality_residual(a);
    let normalization = a.at_one().max_abs_minus_identity();
    let (degree, defect) = estimate_degree(a).unwrap_or((-1, f64::INFINITY));
    let in_w0 = orthogonality <= tol
        && normalization <= tol
        && defect <= tol.max(1e-8)
        && degree == order as i64;
    let last_row_norm = a
        .block(order as i64)
        .row(a.rank() - 1)
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let in_w1 = in_w0 && last_row_norm > tol;
    VerificationReport {
        orthogonality_residual: orthogonality,
        normalization_residual: normalization,
        degree_estimate: degree,
        degree_monomial_defect: defect,
        order,
        in_w0,
        in_w1,
        tol,
    }
}

/// The completion-problem input: the first row of a candidate wavelet matrix,
/// viewed as blocks `a_0 .. a_N` of length `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstRow {
    m: usize,
    order: usize,
    entries: Vec<Complex64>,
}

/// Why a first row fails validation.
#[derive(Debug, Clone)]
pub enum FirstRowViolation {
    /// `a_N = 0` at the declared order (degenerate-order input).
    TrailingBlockZero { norm: f64 },
    /// Row shifted orthogonality fails at shift `k`.
    Orthogonality { k: usize, residual: f64 },
    /// The blocks do not sum to `e_1`.
    BlockSumNotE1 { residual: f64 },
}

impl std::fmt::Display for FirstRowViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FirstRowViolation::TrailingBlockZero { norm } => {
                write!(
                    f,
                    "singular/invalid row: trailing block a_N is zero (norm {norm:.3e})"
                )
            }
            FirstRowViolation::Orthogonality { k, residual } => write!(
                f,
                "shifted orthogonality fails at k = {k} (residual {residual:.3e})"
            ),
            FirstRowViolation::BlockSumNotE1 { residual } => {
                write!(f, "block sum differs from e_1 (residual {residual:.3e})")
            }
        }
    }
}

impl FirstRow {
    pub fn new(m: usize, entries: Vec<Complex64>) -> Result<Self> {
        if m == 0 || entries.is_empty() || !entries.len().is_multiple_of(m) {
            return Err(Error::DimensionMismatch {
                expected: m.max(1),
                got: entries.len(),
            });
        }
        let order = entries.len() / m - 1;
        Ok(FirstRow { m, order, entries })
    }

    /// First row of a polyphase matrix with `lo = 0`.
    pub fn of_matrix(a: &MatPoly) -> Self {
        let entries = a.first_row_flat();
        FirstRow {
            m: a.rank(),
            order: entries.len() / a.rank() - 1,
            entries,
        }
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Block `a_k`, `k = 0..=N`.
    pub fn block(&self, k: usize) -> &[Complex64] {
        &self.entries[k * self.m..(k + 1) * self.m]
    }

    /// Polyphase representation `(a_{11}(z), ..., a_{1m}(z))`.
    pub fn to_polys(&self) -> Vec<LaurentPoly> {
        from_flat_row(&self.entries, self.m).expect("length is divisible by m")
    }

    /// Checks row shifted orthogonality, the `sum a_i = e_1` normalization
    /// and `a_N != 0`.
    pub fn validate(&self, tol: f64) -> std::result::Result<(), FirstRowViolation> {
        let n = self.order;
        let m = self.m;
        let trailing = self
            .block(n)
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if !(trailing > tol) {
            return Err(FirstRowViolation::TrailingBlockZero { norm: trailing });
        }
        for k in 0..=n {
            let shift = k * m;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.entries.len() - shift {
                acc += self.entries[j] * self.entries[j + shift].conj();
            }
            if k == 0 {
                acc -= Complex64::new(1.0, 0.0);
            }
            if acc.norm() > tol {
                return Err(FirstRowViolation::Orthogonality {
                    k,
                    residual: acc.norm(),
                });
            }
        }
        let mut worst = 0.0f64;
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n {
                acc += self.block(k)[j];
            }
            if j == 0 {
                acc -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(acc.norm());
        }
        if worst > tol {
            return Err(FirstRowViolation::BlockSumNotE1 { residual: worst });
        }
        Ok(())
    }
}

/// A validated wavelet matrix: a paraunitary matrix polynomial in nonnegative
/// powers with tight order and degree at least the order.
///
/// The constructor checks cheap structural facts (order, degree estimate);
/// the expensive orthogonality residual is the caller's business via
/// [`verify`].
#[derive(Debug, Clone)]
pub struct WaveletMatrix {
    poly: MatPoly,
    order: usize,
    degree: i64,
}

impl WaveletMatrix {
    pub fn from_poly(poly: MatPoly) -> Result<Self> {
        assert!(
            poly.lo() >= 0,
            "wavelet matrices live in nonnegative powers"
        );
        let order = poly.order_exact();
        let (degree, _defect) = estimate_degree(&poly)?;
        if degree < order as i64 {
            return Err(Error::VerificationFailed(format!(
                "degree {degree} below order {order}"
            )));
        }
        Ok(WaveletMatrix {
            poly,
            order,
            degree,
        })
    }

    pub fn poly(&self) -> &MatPoly {
        &self.poly
    }

    pub fn into_poly(self) -> MatPoly {
        self.poly
    }

    pub fn rank(&self) -> usize {
        self.poly.rank()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn first_row(&self) -> FirstRow {
        FirstRow::of_matrix(&self.poly)
    }

    pub fn verify(&self, tol: f64) -> VerificationReport {
        verify(&self.poly, tol)
    }
}
