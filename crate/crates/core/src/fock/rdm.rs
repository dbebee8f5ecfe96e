use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Hermitian, trace-one matrix over single-particle modes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        // symmetrize first so roundoff cannot leak into the eigen solver
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }
}
