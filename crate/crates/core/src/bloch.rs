//! Generalized Gell-Mann basis and the Bloch-sphere maps built on it.
//!
//! A unit-trace Hermitian matrix `ρ` on `C^n` is written as
//! `ρ = I/n + Σ_j r_j Λ_j` with `r_j = ½ Tr(ρ Λ_j)`. The basis is normalized
//! so that `Tr(Λ_j Λ_k) = 2 δ_jk`, which makes the Hilbert-Schmidt inner
//! product on trace-less matrices twice the Euclidean one on Bloch vectors.

use std::collections::BTreeMap;
use std::ops::Deref;

use crate::linalg::{identity_c, max_abs_diff_c, trace_product, unitarity_defect};
use crate::{CMatrix, Error, RMatrix, RVector, Result, C64};

/// Hermiticity defect above which a matrix is rejected outright.
const HERMITIAN_REJECT: f64 = 1e-10;
/// Unitarity tolerance for [`adjoint_rotation`].
pub const UNITARY_TOL: f64 = 1e-12;

/// A Hermitian `n × n` matrix. Construction symmetrizes the input, so the
/// stored entries satisfy `h[j][k] == conj(h[k][j])` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        if m.nrows() < 2 {
            return Err(Error::InvalidDimension {
                dim: m.nrows(),
                reason: "Hilbert dimension must be at least 2",
            });
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = max_abs_diff_c(&m, &m.adjoint());
        if defect > HERMITIAN_REJECT * scale {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::symmetrized(m))
    }

    /// Projects onto the Hermitian part without checking.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self(h)
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` (the vector is used as given).
    pub fn projector(psi: &[C64]) -> Self {
        let n = psi.len();
        Self::symmetrized(CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(identity_c(n) * C64::new(1.0 / n as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Row-major `(re, im)` pairs.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("matrix rows have unequal length".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            C64::new(rows[i][j][0], rows[i][j][1])
        }))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::linalg::hermitian_eigenvalues(&self.0)
    }
}

impl Deref for HermitianMatrix {
    type Target = CMatrix;
    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// The `n² - 1` generalized Gell-Mann matrices: symmetric block, then
/// antisymmetric block (both over pairs `j < k` in lexicographic order),
/// then the diagonal block.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    matrices: Vec<HermitianMatrix>,
}

impl GellMannBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of basis elements, `n² - 1`.
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[HermitianMatrix] {
        &self.matrices
    }

    pub fn get(&self, j: usize) -> &HermitianMatrix {
        &self.matrices[j]
    }

    /// `Σ_j c_j Λ_j`.
    pub fn combine(&self, coords: &RVector) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (c, m) in coords.iter().zip(&self.matrices) {
            if *c != 0.0 {
                out += m.matrix() * C64::new(*c, 0.0);
            }
        }
        out
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: n,
            })
        }
    }
}

/// Real coordinates of the trace-less part of a unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub dim: usize,
    pub coords: RVector,
}

impl BlochVector {
    pub fn new(dim: usize, coords: RVector) -> Result<Self> {
        if coords.len() + 1 != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim - 1,
                actual: coords.len(),
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            coords: RVector::zeros(dim * dim - 1),
        }
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.coords.dot(&other.coords)
    }
}

/// Fully symmetric cubic coefficients `d_ijk = Re Tr(Λ_i Λ_j Λ_k)`, stored
/// once per sorted index triple.
#[derive(Debug, Clone)]
pub struct StructureTensor {
    dim: usize,
    entries: BTreeMap<(usize, usize, usize), f64>,
    // (i, j, k, multiplicity * d_ijk), i <= j <= k
    weighted: Vec<(usize, usize, usize, f64)>,
}

impl StructureTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Bloch coordinates.
    pub fn len(&self) -> usize {
        self.dim * self.dim - 1
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `d_ijk` for any index order.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut idx = [i, j, k];
        idx.sort_unstable();
        self.entries
            .get(&(idx[0], idx[1], idx[2]))
            .copied()
            .unwrap_or(0.0)
    }

    /// Stored entries with `i <= j <= k`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `Σ_ijk d_ijk v_i v_j v_k` over all ordered triples.
    pub fn contract3(&self, v: &RVector) -> f64 {
        self.weighted
            .iter()
            .map(|&(i, j, k, w)| w * v[i] * v[j] * v[k])
            .sum()
    }

    /// Gradient of [`Self::contract3`], `3 Σ_jk d_ijk v_j v_k`.
    pub fn contract3_grad(&self, v: &RVector) -> RVector {
        let mut g = RVector::zeros(v.len());
        for &(i, j, k, w) in &self.weighted {
            g[i] += w * v[j] * v[k];
            g[j] += w * v[i] * v[k];
            g[k] += w * v[i] * v[j];
        }
        g
    }
}

/// Builds the generalized Gell-Mann basis for `C^n`.
pub fn build_basis(n: usize) -> Result<GellMannBasis> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "Hilbert dimension must be at least 2",
        });
    }
    let one = C64::new(1.0, 0.0);
    let i_unit = C64::new(0.0, 1.0);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();

    let mut matrices = Vec::with_capacity(n * n - 1);
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(n, n);
        m[(j, k)] = one;
        m[(k, j)] = one;
        matrices.push(HermitianMatrix(m));
    }
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(n, n);
        m[(j, k)] = -i_unit;
        m[(k, j)] = i_unit;
        matrices.push(HermitianMatrix(m));
    }
    for l in 1..n {
        let c = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..l {
            m[(k, k)] = C64::new(c, 0.0);
        }
        m[(l, l)] = C64::new(-c * l as f64, 0.0);
        matrices.push(HermitianMatrix(m));
    }
    Ok(GellMannBasis { dim: n, matrices })
}

/// `r_j = ½ Tr(H Λ_j)`.
pub fn to_bloch(h: &HermitianMatrix, basis: &GellMannBasis) -> Result<BlochVector> {
    basis.check_dim(h.dim())?;
    let coords = RVector::from_iterator(
        basis.len(),
        basis
            .matrices
            .iter()
            .map(|l| 0.5 * trace_product(h.matrix(), l.matrix()).re),
    );
    Ok(BlochVector {
        dim: basis.dim,
        coords,
    })
}

/// `I/n + Σ_j r_j Λ_j`; Hermitian with unit trace, not necessarily positive.
pub fn from_bloch(v: &BlochVector, basis: &GellMannBasis) -> Result<HermitianMatrix> {
    basis.check_dim(v.dim)?;
    if v.coords.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            actual: v.coords.len(),
        });
    }
    let n = basis.dim;
    let m = identity_c(n) * C64::new(1.0 / n as f64, 0.0) + basis.combine(&v.coords);
    Ok(HermitianMatrix::symmetrized(m))
}

/// Structure tensor of the basis. Only the real part of the triple trace is
/// kept: the imaginary part is antisymmetric and cancels in the cubic form.
pub fn structure_tensor(basis: &GellMannBasis) -> StructureTensor {
    let big_n = basis.len();
    let mats: Vec<&CMatrix> = basis.matrices.iter().map(|m| m.matrix()).collect();
    let mut entries = BTreeMap::new();
    let mut weighted = Vec::new();
    for i in 0..big_n {
        for j in i..big_n {
            let prod = mats[i] * mats[j];
            if prod.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            for (k, mk) in mats.iter().enumerate().skip(j) {
                let d = trace_product(&prod, mk).re;
                if d.abs() < 1e-15 {
                    continue;
                }
                entries.insert((i, j, k), d);
                let mult = if i == j && j == k {
                    1.0
                } else if i == j || j == k {
                    3.0
                } else {
                    6.0
                };
                weighted.push((i, j, k, mult * d));
            }
        }
    }
    StructureTensor {
        dim: basis.dim,
        entries,
        weighted,
    }
}

/// Orthogonal matrix `M_jk = ½ Tr(Λ_j u Λ_k u†)` representing `ρ ↦ u ρ u†`
/// on Bloch vectors.
pub fn adjoint_rotation(u: &CMatrix, basis: &GellMannBasis) -> Result<RMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            actual: u.ncols(),
        });
    }
    basis.check_dim(u.nrows())?;
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let ud = u.adjoint();
    let conj: Vec<CMatrix> = basis
        .matrices
        .iter()
        .map(|l| u * l.matrix() * &ud)
        .collect();
    let big_n = basis.len();
    Ok(RMatrix::from_fn(big_n, big_n, |j, k| {
        0.5 * trace_product(basis.matrices[j].matrix(), &conj[k]).re
    }))
}
