//! Dense Hermitian helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }
}

pub fn eigh(m: &DMatrix<Complex64>) -> HermitianEigen {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let columns: Vec<_> = order.iter().map(|&k| eig.eigenvectors.column(k)).collect();
    let vectors = if columns.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    HermitianEigen { values, vectors }
}

/// `exp(-i θ H)` for Hermitian `H`, via its eigendecomposition.
pub fn unitary_evolution(h: &DMatrix<Complex64>, theta: f64) -> DMatrix<Complex64> {
    let eig = eigh(h);
    let phases = DVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&e| Complex64::from_polar(1.0, -theta * e)),
    );
    let scaled = DMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.vectors[(r, c)] * phases[c]);
    scaled * eig.vectors.adjoint()
}

/// Largest entry of `|M - M†|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
