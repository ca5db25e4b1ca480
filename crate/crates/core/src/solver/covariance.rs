use nalgebra::SMatrix;

use crate::dynamics::quadrature::X_B;
use crate::model::SystemParams;
use crate::Matrix8;

/// Lower bound on symplectic eigenvalues accepted as physical.
pub const PHYSICAL_TOLERANCE: f64 = 1e-8;

/// Symmetrised second moments `V_jk = ⟨u_j u_k + u_k u_j⟩/2` of the eight
/// quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix8);

impl CovarianceMatrix {
    /// Wraps `m` after symmetrising it.
    pub fn new(m: Matrix8) -> Self {
        CovarianceMatrix((m + m.transpose()) * 0.5)
    }

    /// Vacuum cavity and ensembles with a thermal mechanical mode.
    pub fn vacuum_thermal(n_th: f64) -> Self {
        let mut m = Matrix8::identity() * 0.5;
        m[(2, 2)] = n_th + 0.5;
        m[(3, 3)] = n_th + 0.5;
        CovarianceMatrix(m)
    }

    /// Initial condition of the time integration: the undriven state of
    /// `p`'s baths.
    pub fn initial(p: &SystemParams) -> Self {
        Self::vacuum_thermal(p.n_th)
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn var_xb(&self) -> f64 {
        self.0[(X_B, X_B)]
    }

    pub fn asymmetry(&self) -> f64 {
        (self.0 - self.0.transpose()).amax()
    }

    /// Symplectic eigenvalues in ascending order, or `None` when `V` is not
    /// positive definite.
    ///
    /// Uses `ν_k² = eig(-(V^{1/2} Ω V^{1/2})²)`, each appearing twice, with
    /// `Ω = ⊕ [[0, 1], [−1, 0]]`.
    pub fn symplectic_eigenvalues(&self) -> Option<[f64; 4]> {
        let eig = self.0.symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return None;
        }
        let sqrt = SMatrix::<f64, 8, 8>::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
        let root = eig.eigenvectors * sqrt * eig.eigenvectors.transpose();
        let mut omega = Matrix8::zeros();
        for k in 0..4 {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        let m = root * omega * root;
        let sq = m.transpose() * m;
        let sq = (sq + sq.transpose()) * 0.5;
        let mut nu2: Vec<f64> = sq.symmetric_eigen().eigenvalues.iter().cloned().collect();
        nu2.sort_by(|a, b| a.total_cmp(b));
        let mut out = [0.0; 4];
        for k in 0..4 {
            out[k] = (0.5 * (nu2[2 * k] + nu2[2 * k + 1])).max(0.0).sqrt();
        }
        Some(out)
    }

    /// Smallest symplectic eigenvalue, zero when `V` is not positive definite.
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues().map_or(0.0, |nu| nu[0])
    }

    /// Uncertainty principle: every symplectic eigenvalue is at least 1/2.
    pub fn is_physical(&self) -> bool {
        self.min_symplectic_eigenvalue() >= 0.5 - PHYSICAL_TOLERANCE
    }
}
