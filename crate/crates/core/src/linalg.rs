//! Small dense Hermitian helpers built on nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::C64;

const PHASE_EPS: f64 = 1e-12;

/// Rotates `v` so that its first entry with modulus above `1e-12` is real
/// and positive.
pub fn normalize_phase(v: &mut DVector<C64>) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > PHASE_EPS).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in ascending
/// order. Equal eigenvalues keep the order returned by the solver.
pub fn hermitian_eigh(a: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = a.nrows();
    // Symmetrize so round-off in the caller's accumulation cannot leak in.
    let herm = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(dst, &col);
    }
    (values, vectors)
}

/// `eig_min`: unit eigenvector of the smallest eigenvalue, phase-normalized.
///
/// The zero matrix (no interference term at all) maps to the first canonical
/// basis vector.
pub fn eig_min(a: &DMatrix<C64>) -> DVector<C64> {
    let n = a.nrows();
    assert!(n > 0 && a.ncols() == n, "eig_min needs a non-empty square matrix");
    if n == 1 || a.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return basis_vector(n, 0);
    }
    let (_, vectors) = hermitian_eigh(a);
    let mut v = vectors.column(0).into_owned();
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    v
}

pub fn basis_vector(n: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(n);
    v[k] = C64::new(1.0, 0.0);
    v
}

/// `x x^H` accumulated into `acc`.
pub fn add_outer(acc: &mut DMatrix<C64>, x: &DVector<C64>) {
    acc.ger(C64::new(1.0, 0.0), x, &x.conjugate(), C64::new(1.0, 0.0));
}
