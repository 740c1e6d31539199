use crate::error::{Error, Result};

/// Dense real symmetric matrix, stored in full row-major form.
///
/// Symmetry is exact: constructors either fill both triangles from one
/// evaluation or reject asymmetric input.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymmetricMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle only.
    pub fn from_upper_fn<F>(dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite matrix entry {v} at ({i}, {j})"
                    )));
                }
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Ok(SymmetricMatrix { dim, data })
    }

    /// Accepts a full row-major buffer; rejects it unless it is exactly symmetric and finite.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in 0..dim {
                let v = data[i * dim + j];
                if !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "non-finite matrix entry at ({i}, {j})"
                    )));
                }
                if j > i && v != data[j * dim + i] {
                    return Err(Error::InvalidParameter(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SymmetricMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Leading principal submatrix of the given size.
    pub fn leading(&self, size: usize) -> Self {
        let size = size.min(self.dim);
        let mut data = Vec::with_capacity(size * size);
        for i in 0..size {
            data.extend_from_slice(&self.data[i * self.dim..i * self.dim + size]);
        }
        SymmetricMatrix { dim: size, data }
    }

    pub(crate) fn into_raw(self) -> (usize, Vec<f64>) {
        (self.dim, self.data)
    }
}
