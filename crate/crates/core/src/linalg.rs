//! Small dense linear-algebra helpers shared by the other modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{CMatrix, RMatrix, RVector, C64};

pub fn identity_c(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff_c(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff_r(a: &RMatrix, b: &RMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `max |AᴴA - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff_c(&(u.adjoint() * u), &identity_c(n))
}

/// `max |RᵀR - I|`.
pub fn orthogonality_defect(r: &RMatrix) -> f64 {
    let n = r.nrows();
    max_abs_diff_r(&(r.transpose() * r), &RMatrix::identity(n, n))
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new(h.clone());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns whose
/// residual norm falls below `tol` are dropped.
pub fn gram_schmidt(vectors: &[RVector], tol: f64) -> Vec<RVector> {
    let mut basis: Vec<RVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
        }
    }
    basis
}

/// Completes an orthonormal family to an orthonormal basis of `R^dim` by
/// orthogonalizing the canonical vectors against it.
pub fn complete_basis(partial: &[RVector], dim: usize) -> Vec<RVector> {
    let mut basis = partial.to_vec();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = RVector::zeros(dim);
        e[i] = 1.0;
        let mut w = e;
        for _pass in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / norm);
        }
    }
    basis
}

pub fn columns_to_matrix(cols: &[RVector]) -> RMatrix {
    let rows = cols.first().map_or(0, |c| c.len());
    RMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// Orthogonal polar factor `U` of `A = U P`, computed through the SVD.
pub fn polar_orthogonal(a: &RMatrix) -> RMatrix {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let vt = svd.v_t.expect("svd v_t");
    u * vt
}

/// Sign of the determinant, computed through LU.
pub fn determinant(a: &RMatrix) -> f64 {
    DMatrix::determinant(a)
}
