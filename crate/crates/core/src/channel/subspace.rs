use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigh;
use crate::C64;

/// Orthonormal basis of an `n`-dimensional subspace of `C^parent_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    columns: DMatrix<C64>,
    singular_values: Vec<f64>,
}

impl SubspaceBasis {
    pub fn columns(&self) -> &DMatrix<C64> {
        &self.columns
    }

    pub fn parent_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn reduced_dim(&self) -> usize {
        self.columns.ncols()
    }

    /// Singular values associated with the retained directions, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Maps reduced coordinates back to the parent space.
    pub fn lift(&self, reduced: &DVector<C64>) -> DVector<C64> {
        &self.columns * reduced
    }
}

/// The `n` right-singular vectors of `a` with the largest singular values.
///
/// Computed from the eigen-decomposition of `a^H a`, which yields a full set
/// of right-singular vectors even when `a` has fewer rows than columns.
/// Each vector follows the first-nonzero-entry-real-positive convention.
pub fn max_power_subspace(a: &DMatrix<C64>, n: usize) -> Result<SubspaceBasis> {
    let cols = a.ncols();
    if n == 0 || n >= cols {
        return Err(Error::InvalidArgument(format!(
            "subspace dimension {n} must lie in 1..{cols}"
        )));
    }
    let gram = a.adjoint() * a;
    let (values, vectors) = hermitian_eigh(&gram);
    // Ascending order from eigh; walk it backwards for the dominant directions.
    let mut columns = DMatrix::zeros(cols, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, src) in (0..cols).rev().take(n).enumerate() {
        columns.set_column(dst, &vectors.column(src));
        singular_values.push(values[src].max(0.0).sqrt());
    }
    Ok(SubspaceBasis {
        columns,
        singular_values,
    })
}
