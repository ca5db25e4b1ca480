//! Vectorisation of symmetric 8×8 matrices and of the Lyapunov operator
//! `V ↦ M V + V Mᵀ` acting on them.

use nalgebra::{ComplexField, DMatrix, DVector, SMatrix};

/// Number of independent entries of a symmetric 8×8 matrix.
pub(crate) const PACKED: usize = 36;

/// Position of `(i, j)` in the row-major upper triangle.
pub(crate) const fn index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * 8 - i * (i + 1) / 2 + j
}

pub(crate) fn pack<T: ComplexField>(m: &SMatrix<T, 8, 8>) -> DVector<T> {
    let mut v = DVector::from_element(PACKED, T::zero());
    for i in 0..8 {
        for j in i..8 {
            v[index(i, j)] = m[(i, j)].clone();
        }
    }
    v
}

pub(crate) fn unpack<T: ComplexField>(v: &DVector<T>) -> SMatrix<T, 8, 8> {
    SMatrix::from_fn(|i, j| v[index(i, j)].clone())
}

/// Matrix of `V ↦ M V + V Mᵀ` on packed symmetric `V`.
pub(crate) fn lyapunov_operator<T: ComplexField>(m: &SMatrix<T, 8, 8>) -> DMatrix<T> {
    let mut op = DMatrix::from_element(PACKED, PACKED, T::zero());
    for i in 0..8 {
        for j in i..8 {
            let row = index(i, j);
            for k in 0..8 {
                let a = m[(i, k)].clone();
                op[(row, index(k, j))] += a;
                let b = m[(j, k)].clone();
                op[(row, index(i, k))] += b;
            }
        }
    }
    op
}

/// Matrix of `V ↦ M V + V Mᵀ` on row-major `vec(V)` of a general 8×8 `V`:
/// `M ⊗ I + I ⊗ M`.
pub(crate) fn kronecker_sum(m: &SMatrix<f64, 8, 8>) -> DMatrix<f64> {
    let mut op = DMatrix::zeros(64, 64);
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                op[(8 * i + j, 8 * k + j)] += m[(i, k)];
                op[(8 * i + j, 8 * i + k)] += m[(j, k)];
            }
        }
    }
    op
}
