//! Seedable random inputs: standard complex Gaussian components throughout,
//! so that consecutive orthogonality and other degeneracies are
//! probability-zero events.

use crate::parametrize::ParamSet;
use crate::polyphase::FirstRow;
use crate::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// `count` random m-vectors for the primitive-product generator.
pub fn random_vectors<R: Rng + ?Sized>(m: usize, count: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    (0..count)
        .map(|_| (0..m).map(|_| complex_gaussian(rng)).collect())
        .collect()
}

/// Random `(m-1) x N` parameter grid for the zeta-parametrization.
pub fn random_param_set<R: Rng + ?Sized>(m: usize, order: usize, rng: &mut R) -> ParamSet {
    let gamma = (0..m - 1)
        .map(|_| (0..order).map(|_| complex_gaussian(rng)).collect())
        .collect();
    ParamSet::new(m, order, gamma)
}

/// A random valid completion-problem input that both completion methods can
/// resolve accurately in double precision at any rank and order.
///
/// Completion through the zeta-parametrization divides by the power series of
/// the pivot entry's conjugate reversal; that series grows like `1/rho^N`
/// where `rho` is the smallest modulus among the reversal's roots, so rows
/// whose pivot reversal has roots inside (or near) the unit circle cannot be
/// completed in `f64` — the intermediate parameters overflow the arithmetic
/// even though the completed matrix itself is perfectly conditioned. First
/// rows of *random* products or parametrized matrices have exactly this
/// defect once `N` is large: their root sets straddle the unit circle.
///
/// The corpus therefore samples the well-posed stratum directly:
///
/// * `a(z) = 0.99 p(z) / max_{|z|=1} |p|`, with `p` monic of degree `N` and
///   roots drawn uniformly from a disc of radius `min(1/2, 1/(5N))`. All its
///   roots sit deep inside the unit disc, `|a|` is nearly constant on the
///   circle, and its trailing coefficient stays `Theta(1)`.
/// * `g(z)` is the degree-`N` minimum-phase spectral factor of
///   `1 - a(z) adj(a)(z)` (bounded away from zero on the circle), computed
///   by the cepstral method plus Wilson refinement.
/// * The row `(a, g w)`, for a uniformly random unit `w in C^(m-1)`,
///   satisfies `a adj(a) + |w|^2 g adj(g) = 1`, i.e. shifted orthonormality,
///   by construction. A constant Householder unitary then rotates the
///   coefficient sum onto `e_1` (rows of matrices in `W_0` sum to `e_1`);
///   because `|a|` dominates `|g|` pointwise on the circle, the mixed pivot
///   entry keeps all roots inside the disc (Rouche), which the sampler
///   confirms directly by bounding the reciprocal-series growth.
pub fn random_first_row<R: Rng + ?Sized>(m: usize, order: usize, rng: &mut R) -> FirstRow {
    let n = order;
    for _ in 0..64 {
        // monic p with roots in the small disc
        let rho = 0.5f64.min(0.2 / n as f64);
        let mut p = vec![Complex64::new(0.0, 0.0); n + 1];
        p[0] = Complex64::new(1.0, 0.0);
        for deg in 0..n {
            let radius = rho * rng.gen::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.gen::<f64>();
            let root = Complex64::from_polar(radius, angle);
            for j in (0..=deg).rev() {
                let c = p[j];
                p[j + 1] += c;
                p[j] = -root * c;
            }
        }

        let k = (16 * (n + 1)).next_power_of_two().max(256);
        let (fwd, inv) = crate::laurent::fft_pair(k);
        let mut a_samples = vec![Complex64::new(0.0, 0.0); k];
        a_samples[..=n].copy_from_slice(&p);
        fwd.process(&mut a_samples);
        let max_abs = a_samples.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        let scale = 0.99 / max_abs;
        for v in a_samples.iter_mut() {
            *v *= scale;
        }
        let a: Vec<Complex64> = p.iter().map(|c| c * scale).collect();

        // spectral factor of r = 1 - |a|^2 on the circle: cepstral initial
        // guess, then Wilson iterations (quadratically convergent)
        let r: Vec<f64> = a_samples.iter().map(|v| 1.0 - v.norm_sqr()).collect();
        debug_assert!(r.iter().all(|&x| x > 0.0));
        let causal_fold = |mut buf: Vec<Complex64>| -> Vec<Complex64> {
            let kk = buf.len();
            let s = 1.0 / kk as f64;
            for v in buf.iter_mut() {
                *v *= s;
            }
            buf[0] *= 0.5;
            buf[kk / 2] *= 0.5;
            for v in buf[kk / 2 + 1..].iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            buf
        };
        let mut cep: Vec<Complex64> = r.iter().map(|&x| Complex64::new(x.ln(), 0.0)).collect();
        inv.process(&mut cep);
        let mut g_samples = causal_fold(cep);
        fwd.process(&mut g_samples);
        for v in g_samples.iter_mut() {
            *v = v.exp();
        }
        for _ in 0..3 {
            let mut s: Vec<Complex64> = r
                .iter()
                .zip(&g_samples)
                .map(|(&x, gv)| Complex64::new(x / gv.norm_sqr(), 0.0))
                .collect();
            inv.process(&mut s);
            let mut t = causal_fold(s);
            t[0] += Complex64::new(0.5, 0.0);
            fwd.process(&mut t);
            for (gv, tv) in g_samples.iter_mut().zip(&t) {
                *gv *= tv;
            }
        }
        inv.process(&mut g_samples);
        let kinv = 1.0 / k as f64;
        let g: Vec<Complex64> = g_samples[..=n].iter().map(|v| v * kinv).collect();

        let mut w: Vec<Complex64> = (0..m - 1).map(|_| complex_gaussian(rng)).collect();
        let wn = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in w.iter_mut() {
            *v /= wn;
        }

        // rotate the coefficient sum s = (a(1), g(1) w) onto e_1: find a
        // unitary V with V s^T = e_1 (Householder), then right-multiply the
        // row by U = V^T
        let a1: Complex64 = a.iter().sum();
        let g1: Complex64 = g.iter().sum();
        let mut x = vec![Complex64::new(0.0, 0.0); m];
        x[0] = a1;
        for (xj, wj) in x[1..].iter_mut().zip(&w) {
            *xj = g1 * wj;
        }
        let phi = x[0] / x[0].norm();
        let mut h = x.clone();
        h[0] -= phi;
        let hn2: f64 = h.iter().map(|v| v.norm_sqr()).sum();
        // U_{ij} = (H^T D)_{ij} = H_{ji} d_j, H = I - 2 h h* / |h|^2,
        // D = diag(conj(phi), 1, .., 1); each output column mixes the two
        // designed polynomials: col_j = c_j a + d_j g
        let u_entry = |i: usize, j: usize| -> Complex64 {
            let hji = if hn2 > 1e-24 {
                let delta = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                delta - h[j] * h[i].conj() * (2.0 / hn2)
            } else if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            if j == 0 {
                hji * phi.conj()
            } else {
                hji
            }
        };
        let c: Vec<Complex64> = (0..m).map(|j| u_entry(0, j)).collect();
        let d: Vec<Complex64> = (0..m)
            .map(|j| (1..m).map(|i| w[i - 1] * u_entry(i, j)).sum())
            .collect();

        let mut entries = Vec::with_capacity((n + 1) * m);
        for kk in 0..=n {
            for j in 0..m {
                entries.push(a[kk] * c[j] + g[kk] * d[j]);
            }
        }
        let row = match FirstRow::new(m, entries) {
            Ok(row) => row,
            Err(_) => continue,
        };
        if row.validate(crate::default_tol(n)).is_err() {
            continue;
        }
        // accept only when the pivot's reciprocal series is tame, so both
        // completion methods stay near machine precision on this row
        let last = row.block(n);
        let pivot = (0..m).fold(0usize, |p, j| {
            if last[j].norm() > last[p].norm() {
                j
            } else {
                p
            }
        });
        let polys = row.to_polys();
        let adj = polys[pivot].adjoint();
        let q = crate::laurent::LaurentPoly::new(adj.lo() + n as i64, adj.coeffs().to_vec());
        if let Ok(series) = crate::laurent::series_reciprocal(&q, n + 1) {
            let growth = series.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            if growth <= 1e3 {
                return row;
            }
        }
    }
    panic!("failed to sample a well-posed first row");
}
