//! Scalar complex Laurent polynomial arithmetic.
//!
//! A polynomial is stored as the lowest present power `lo` (possibly
//! negative) plus a dense coefficient vector; index `k` holds the coefficient
//! of `z^{lo+k}`. The zero polynomial is `lo = 0`, coefficients `(0)`.

use crate::{Complex64, Error, Result};
use rustfft::FftPlanner;
use std::sync::Mutex;

/// Product lengths above this go through the FFT path in [`MulMode::Auto`].
pub(crate) const FFT_CROSSOVER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MulMode {
    Naive,
    Fft,
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    lo: i64,
    coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    pub fn new(lo: i64, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        LaurentPoly {
            lo: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        LaurentPoly {
            lo: 0,
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn monomial(power: i64, coeff: Complex64) -> Self {
        LaurentPoly::new(power, vec![coeff])
    }

    /// Lowest stored power.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored power.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^power` (zero outside the stored range).
    pub fn coeff(&self, power: i64) -> Complex64 {
        if power < self.lo || power > self.hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(power - self.lo) as usize]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Trim exactly-zero leading/trailing coefficients, keeping at least one.
    fn normalize(&mut self) {
        assert!(!self.coeffs.is_empty());
        let zero = Complex64::new(0.0, 0.0);
        let mut last = self.coeffs.len();
        while last > 1 && self.coeffs[last - 1] == zero {
            last -= 1;
        }
        self.coeffs.truncate(last);
        let mut first = 0;
        while first + 1 < self.coeffs.len() && self.coeffs[first] == zero {
            first += 1;
        }
        if first > 0 {
            self.coeffs.drain(..first);
            self.lo += first as i64;
        }
        if self.coeffs.len() == 1 && self.coeffs[0] == zero {
            self.lo = 0;
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lo - lo) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.lo - lo) as usize + k] += c;
        }
        LaurentPoly::new(lo, coeffs)
    }

    pub fn scale(&self, s: Complex64) -> LaurentPoly {
        LaurentPoly::new(self.lo, self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Coefficient-sequence convolution; `lo` offsets add.
    pub fn mul(&self, other: &LaurentPoly, mode: MulMode) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let out_len = self.coeffs.len() + other.coeffs.len() - 1;
        let use_fft = match mode {
            MulMode::Naive => false,
            MulMode::Fft => true,
            MulMode::Auto => out_len > FFT_CROSSOVER,
        };
        let coeffs = if use_fft {
            convolve_fft(&self.coeffs, &other.coeffs)
        } else {
            convolve_naive(&self.coeffs, &other.coeffs)
        };
        LaurentPoly::new(self.lo + other.lo, coeffs)
    }

    /// Adjoint: conjugate coefficients, `z^k -> z^{-k}`.
    pub fn adjoint(&self) -> LaurentPoly {
        let coeffs: Vec<Complex64> = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        LaurentPoly::new(-self.hi(), coeffs)
    }

    /// Part with powers >= 0.
    pub fn plus_part(&self) -> LaurentPoly {
        if self.lo >= 0 {
            return self.clone();
        }
        if self.hi() < 0 {
            return LaurentPoly::zero();
        }
        LaurentPoly::new(0, self.coeffs[(-self.lo) as usize..].to_vec())
    }

    /// Part with powers <= -1.
    pub fn minus_part(&self) -> LaurentPoly {
        if self.hi() < 0 {
            return self.clone();
        }
        if self.lo >= 0 {
            return LaurentPoly::zero();
        }
        LaurentPoly::new(self.lo, self.coeffs[..(-self.lo) as usize].to_vec())
    }

    /// Horner evaluation of `sum c_k z0^k`.
    pub fn eval(&self, z0: Complex64) -> Result<Complex64> {
        if self.lo < 0 && z0 == Complex64::new(0.0, 0.0) && !self.is_zero() {
            return Err(Error::ZeroEvaluationPoint);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z0 + c;
        }
        // account for the lo offset
        let offset = if self.lo == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            z0.powi(self.lo as i32)
        };
        Ok(acc * offset)
    }
}

fn convolve_naive(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

// rustfft planners cache twiddles; share one per process.
static PLANNER: Mutex<Option<FftPlanner<f64>>> = Mutex::new(None);

pub(crate) type FftHandle = std::sync::Arc<dyn rustfft::Fft<f64>>;

/// Shared-planner forward/inverse transforms of length `n`. The inverse is
/// unnormalized, as rustfft leaves it.
pub(crate) fn fft_pair(n: usize) -> (FftHandle, FftHandle) {
    let mut guard = PLANNER.lock().unwrap();
    let planner = guard.get_or_insert_with(FftPlanner::new);
    (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
}

fn convolve_fft(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut fa = vec![Complex64::new(0.0, 0.0); n];
    let mut fb = vec![Complex64::new(0.0, 0.0); n];
    fa[..a.len()].copy_from_slice(a);
    fb[..b.len()].copy_from_slice(b);
    let (fwd, inv) = {
        let mut guard = PLANNER.lock().unwrap();
        let planner = guard.get_or_insert_with(FftPlanner::new);
        (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
    };
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.truncate(out_len);
    for x in fa.iter_mut() {
        *x *= scale;
    }
    fa
}

/// Precomputed forward transform of a polynomial, for products against many
/// partners. Build one per polynomial with [`LaurentPoly::spectrum`] and
/// combine pairs with [`mul_spectra`]; each product then costs one pointwise
/// multiply and one inverse transform instead of a full convolution.
#[derive(Debug, Clone)]
pub struct Spectrum {
    lo: i64,
    coeff_len: usize,
    data: Vec<Complex64>,
}

impl LaurentPoly {
    /// Forward FFT of the coefficients zero-padded to `fft_len`. `fft_len`
    /// must be at least the coefficient length of any product this spectrum
    /// will participate in, and both factors must use the same `fft_len`.
    pub fn spectrum(&self, fft_len: usize) -> Spectrum {
        assert!(fft_len >= self.coeffs.len());
        let mut data = vec![Complex64::new(0.0, 0.0); fft_len];
        data[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        let (fwd, _) = fft_pair(fft_len);
        fwd.process(&mut data);
        Spectrum {
            lo: self.lo,
            coeff_len: self.coeffs.len(),
            data,
        }
    }
}

/// Product of two polynomials from their precomputed spectra.
pub fn mul_spectra(a: &Spectrum, b: &Spectrum) -> LaurentPoly {
    assert_eq!(a.data.len(), b.data.len());
    let n = a.data.len();
    let out_len = a.coeff_len + b.coeff_len - 1;
    assert!(out_len <= n, "spectra too short for this product");
    let mut buf: Vec<Complex64> = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    let (_, inv) = fft_pair(n);
    inv.process(&mut buf);
    buf.truncate(out_len);
    let scale = 1.0 / n as f64;
    for x in buf.iter_mut() {
        *x *= scale;
    }
    LaurentPoly::new(a.lo + b.lo, buf)
}

/// First `count` coefficients of the power-series reciprocal of `p` around 0,
/// by the O(count^2) long-division recurrence. Requires a nonzero constant
/// term (and no negative powers).
pub fn series_reciprocal(p: &LaurentPoly, count: usize) -> Result<Vec<Complex64>> {
    debug_assert!(p.lo() >= 0, "reciprocal at 0 needs nonnegative powers");
    let c0 = p.coeff(0);
    if !(c0.norm() > 1e-300) {
        return Err(Error::ZeroConstantTerm(c0.norm()));
    }
    let inv_c0 = Complex64::new(1.0, 0.0) / c0;
    let mut g = Vec::with_capacity(count);
    for k in 0..count {
        if k == 0 {
            g.push(inv_c0);
            continue;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            acc += p.coeff(j as i64) * g[k - j];
        }
        g.push(-acc * inv_c0);
    }
    Ok(g)
}
