//! Generation and completion by primitive-factor products.
//!
//! Every wavelet matrix in `W_0(m, N, N)` factors uniquely into `N` primitive
//! factors `V(z) = I - P + Pz` with `P` a rank-1 Hermitian projection.
//! Generation multiplies factors built from arbitrary nonzero vectors;
//! completion peels the factors off a given first row, from the top power
//! down, and multiplies them back.

use crate::kernels::{projection_from_vector, ComplexMatrix, ZERO_VECTOR_FLOOR};
use crate::polyphase::{FirstRow, MatPoly, WaveletMatrix};
use crate::{default_tol, Complex64, Error, Result};

/// A degree-1 factor `V(z) = I - P + Pz`.
#[derive(Debug, Clone)]
pub struct PrimitiveFactor {
    projection: ComplexMatrix,
}

impl PrimitiveFactor {
    pub fn from_vector(v: &[Complex64]) -> Result<Self> {
        Ok(PrimitiveFactor {
            projection: projection_from_vector(v)?,
        })
    }

    pub fn from_projection(projection: ComplexMatrix) -> Self {
        assert_eq!(projection.rows(), projection.cols());
        PrimitiveFactor { projection }
    }

    pub fn projection(&self) -> &ComplexMatrix {
        &self.projection
    }

    /// Realize `V(z) = I - P + Pz`.
    pub fn realize(&self) -> MatPoly {
        let m = self.projection.rows();
        MatPoly::new(
            m,
            0,
            vec![
                ComplexMatrix::identity(m).sub(&self.projection),
                self.projection.clone(),
            ],
        )
    }
}

/// Unit row vector spanning the range of a rank-1 Hermitian projection
/// (defined up to phase; any choice reproduces `P = u* u`).
fn unit_vector_of_projection(p: &ComplexMatrix) -> Vec<Complex64> {
    let m = p.rows();
    let pivot = (0..m)
        .max_by(|&i, &j| p[(i, i)].re.partial_cmp(&p[(j, j)].re).unwrap())
        .unwrap();
    let scale = 1.0 / p[(pivot, pivot)].re.sqrt();
    p.row(pivot).iter().map(|c| c * scale).collect()
}

/// In-place accumulation `A(z) <- A(z) (I - P + Pz)` with `P = u* u`,
/// exploiting the rank-1 structure (m^2 multiplications per block).
fn accumulate_primitive(blocks: &mut Vec<ComplexMatrix>, u: &[Complex64]) {
    let m = u.len();
    let len = blocks.len();
    // w_k = A_k u*
    let mut w = vec![vec![Complex64::new(0.0, 0.0); m]; len];
    for (k, block) in blocks.iter().enumerate() {
        for i in 0..m {
            let row = block.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += row[j] * u[j].conj();
            }
            w[k][i] = acc;
        }
    }
    // A_k <- A_k + outer(w_{k-1} - w_k, u); new top block = outer(w_{len-1}, u)
    let mut top = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        let wi = w[len - 1][i];
        let dst = top.row_mut(i);
        for j in 0..m {
            dst[j] = wi * u[j];
        }
    }
    for k in (0..len).rev() {
        let block = &mut blocks[k];
        for i in 0..m {
            let delta = if k == 0 {
                -w[k][i]
            } else {
                w[k - 1][i] - w[k][i]
            };
            let dst = block.row_mut(i);
            for j in 0..m {
                dst[j] += delta * u[j];
            }
        }
    }
    blocks.push(top);
}

/// Result of [`generate_old`]; `degenerate_order` flags consecutive
/// orthogonal vectors, in which case the order drops below the number of
/// factors (degree stays equal to it).
#[derive(Debug, Clone)]
pub struct GenerateOutcome {
    pub matrix: WaveletMatrix,
    pub degenerate_order: bool,
}

/// Multiply out `prod_j (I - P_j + P_j z)` for `P_j` built from the given
/// nonzero vectors.
pub fn generate_old(vectors: &[Vec<Complex64>]) -> Result<GenerateOutcome> {
    assert!(!vectors.is_empty());
    let m = vectors[0].len();
    assert!(vectors.iter().all(|v| v.len() == m));

    let mut units = Vec::with_capacity(vectors.len());
    for v in vectors {
        let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if !(norm_sq > ZERO_VECTOR_FLOOR) {
            return Err(Error::ZeroVector(norm_sq));
        }
        let inv = 1.0 / norm_sq.sqrt();
        units.push(v.iter().map(|c| c * inv).collect::<Vec<_>>());
    }

    let mut degenerate_order = false;
    for pair in units.windows(2) {
        let inner: Complex64 = pair[0]
            .iter()
            .zip(&pair[1])
            .map(|(a, b)| a * b.conj())
            .sum();
        if inner.norm() < 1e-12 {
            degenerate_order = true;
        }
    }

    let mut blocks = vec![ComplexMatrix::identity(m)];
    for u in &units {
        accumulate_primitive(&mut blocks, u);
    }
    let matrix = WaveletMatrix::from_poly(MatPoly::new(m, 0, blocks))?;
    Ok(GenerateOutcome {
        matrix,
        degenerate_order,
    })
}

/// Recover the projections `P_1 .. P_N` of the primitive factorization from
/// a first row, top power first.
pub fn peel_factors(row: &FirstRow) -> Result<Vec<ComplexMatrix>> {
    let tol = default_tol(row.order());
    row.validate(tol).map_err(Error::InvalidFirstRow)?;
    let m = row.rank();
    let n = row.order();
    if n == 0 {
        return Ok(Vec::new());
    }

    let row_norm = row
        .entries()
        .iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max);
    let singular_floor = tol * row_norm.max(1.0);

    let mut blocks: Vec<Vec<Complex64>> = (0..=n).map(|k| row.block(k).to_vec()).collect();
    let mut projections = vec![ComplexMatrix::zeros(m, m); n];
    let mut u = unit_vector_of_projection(&projection_from_vector(&blocks[n])?);
    projections[n - 1] = projection_from_vector(&blocks[n])?;

    for j in (2..=n).rev() {
        // discarded top block a_j (I - P_j); zero by construction of P_j
        let top_dot: Complex64 = blocks[j].iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
        let mut discarded = 0.0f64;
        for i in 0..m {
            discarded = discarded.max((blocks[j][i] - top_dot * u[i]).norm());
        }
        let top_norm = blocks[j].iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if discarded > 1e-6 * top_norm.max(1.0) {
            return Err(Error::SingularInput(discarded));
        }

        // a_i <- a_i (I - P_j) + a_{i+1} P_j over the shrinking range
        let mut next = Vec::with_capacity(j);
        for i in 0..j {
            let dot_i: Complex64 = blocks[i].iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
            let dot_next: Complex64 = blocks[i + 1]
                .iter()
                .zip(&u)
                .map(|(a, b)| a * b.conj())
                .sum();
            let delta = dot_next - dot_i;
            let v: Vec<Complex64> = blocks[i]
                .iter()
                .zip(&u)
                .map(|(a, b)| a + delta * b)
                .collect();
            next.push(v);
        }
        blocks = next;

        let leading_norm = blocks[j - 1]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if leading_norm < singular_floor {
            return Err(Error::SingularInput(leading_norm));
        }
        projections[j - 2] = projection_from_vector(&blocks[j - 1])?;
        u = unit_vector_of_projection(&projections[j - 2]);
    }
    Ok(projections)
}

/// Complete a first row to the unique wavelet matrix in `W_0(m, N, N)` with
/// that row, by peeling and remultiplying the primitive factors.
pub fn complete_old(row: &FirstRow) -> Result<WaveletMatrix> {
    let projections = peel_factors(row)?;
    let m = row.rank();
    let mut blocks = vec![ComplexMatrix::identity(m)];
    for p in &projections {
        let u = unit_vector_of_projection(p);
        accumulate_primitive(&mut blocks, &u);
    }
    WaveletMatrix::from_poly(MatPoly::new(m, 0, blocks))
}
