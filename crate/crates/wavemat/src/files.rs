//! Coefficient file I/O.
//!
//! Matrices and first rows are stored as structured text (JSON): complex
//! numbers as `[re, im]` pairs, blocks as `m x m` grids, block `k` holding
//! the coefficient of `z^k`. Serialization is deterministic and round-trips
//! doubles exactly.

use crate::kernels::ComplexMatrix;
use crate::polyphase::{FirstRow, MatPoly};
use crate::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rank: usize,
    pub order: usize,
    /// `order + 1` blocks, each an `m x m` grid of `[re, im]` pairs.
    pub blocks: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FirstRowFile {
    pub rank: usize,
    pub order: usize,
    /// `(order + 1) * m` pairs, index `j` holding `a^1_{j+1}`.
    pub row: Vec<[f64; 2]>,
}

/// Explicit inputs for `generate` (replaces the seeded random draw).
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct GenerateInputFile {
    /// One m-vector per primitive factor (old method).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<[f64; 2]>>>,
    /// `(m-1) x N` coefficient grid (new method).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("malformed file: {0}")]
    Malformed(String),
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl MatrixFile {
    pub fn from_poly(poly: &MatPoly) -> Self {
        assert!(poly.lo() >= 0);
        let m = poly.rank();
        let order = poly.hi().max(0) as usize;
        let blocks = (0..=order as i64)
            .map(|k| {
                let blk = poly.block(k);
                (0..m)
                    .map(|i| blk.row(i).iter().map(|&c| pair(c)).collect())
                    .collect()
            })
            .collect();
        MatrixFile {
            rank: m,
            order,
            blocks,
        }
    }

    pub fn to_poly(&self) -> Result<MatPoly, FileError> {
        let m = self.rank;
        if m == 0 || self.blocks.len() != self.order + 1 {
            return Err(FileError::Malformed(format!(
                "expected {} blocks of rank {}, found {}",
                self.order + 1,
                m,
                self.blocks.len()
            )));
        }
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for grid in &self.blocks {
            if grid.len() != m || grid.iter().any(|row| row.len() != m) {
                return Err(FileError::Malformed(format!("block is not {m} x {m}")));
            }
            let mut blk = ComplexMatrix::zeros(m, m);
            for (i, row) in grid.iter().enumerate() {
                for (j, &p) in row.iter().enumerate() {
                    blk[(i, j)] = unpair(p);
                }
            }
            blocks.push(blk);
        }
        Ok(MatPoly::new(m, 0, blocks))
    }
}

impl FirstRowFile {
    pub fn from_row(row: &FirstRow) -> Self {
        FirstRowFile {
            rank: row.rank(),
            order: row.order(),
            row: row.entries().iter().map(|&c| pair(c)).collect(),
        }
    }

    pub fn to_row(&self) -> Result<FirstRow, FileError> {
        if self.rank == 0 || self.row.len() != (self.order + 1) * self.rank {
            return Err(FileError::Malformed(format!(
                "expected {} entries, found {}",
                (self.order + 1) * self.rank,
                self.row.len()
            )));
        }
        FirstRow::new(self.rank, self.row.iter().map(|&p| unpair(p)).collect())
            .map_err(|e| FileError::Malformed(e.to_string()))
    }
}

impl GenerateInputFile {
    pub fn vectors_complex(&self) -> Option<Vec<Vec<Complex64>>> {
        self.vectors.as_ref().map(|vs| {
            vs.iter()
                .map(|v| v.iter().map(|&p| unpair(p)).collect())
                .collect()
        })
    }

    pub fn gamma_complex(&self) -> Option<Vec<Vec<Complex64>>> {
        self.gamma.as_ref().map(|vs| {
            vs.iter()
                .map(|v| v.iter().map(|&p| unpair(p)).collect())
                .collect()
        })
    }
}

pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FileError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_first_row;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn matrix_roundtrip_exact() {
        let mut rng = StdRng::seed_from_u64(2);
        let row = random_first_row(3, 4, &mut rng);
        let w = crate::factorize::complete_old(&row).unwrap();
        let file = MatrixFile::from_poly(w.poly());
        let json = serde_json::to_string(&file).unwrap();
        let back: MatrixFile = serde_json::from_str(&json).unwrap();
        let poly = back.to_poly().unwrap();
        for k in 0..=4i64 {
            assert_eq!(poly.block(k).data(), w.poly().block(k).data());
        }
    }

    #[test]
    fn first_row_roundtrip_exact() {
        let mut rng = StdRng::seed_from_u64(4);
        let row = random_first_row(2, 3, &mut rng);
        let file = FirstRowFile::from_row(&row);
        let json = serde_json::to_string(&file).unwrap();
        let back: FirstRowFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_row().unwrap(), row);
    }

    #[test]
    fn malformed_dimensions_rejected() {
        let f = FirstRowFile {
            rank: 2,
            order: 1,
            row: vec![[1.0, 0.0]; 3],
        };
        assert!(f.to_row().is_err());
    }
}
