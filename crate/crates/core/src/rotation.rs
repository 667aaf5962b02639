//! Orthogonal matrices as optimization variables: skew-symmetric tangent
//! coordinates, the matrix exponential retraction, and drift control.

use crate::linalg::{orthogonality_defect, polar_orthogonal};
use crate::{Error, RMatrix, RVector, Result};

/// Orthogonality drift that triggers a polar re-orthonormalization.
pub const REORTHONORMALIZE_AT: f64 = 1e-12;

const PADE_ORDER: usize = 6;
const PADE_SCALING_NORM: f64 = 0.25;

/// Number of independent entries of an `n × n` skew-symmetric matrix.
pub fn skew_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Index pairs `(i, j)`, `i < j`, in the order used by tangent vectors.
pub fn skew_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// `A[i][j] = a_l`, `A[j][i] = -a_l` for the `l`-th pair.
pub fn skew_from_params(n: usize, params: &RVector) -> RMatrix {
    let mut a = RMatrix::zeros(n, n);
    for (l, (i, j)) in skew_pairs(n).into_iter().enumerate() {
        a[(i, j)] = params[l];
        a[(j, i)] = -params[l];
    }
    a
}

pub fn params_from_skew(a: &RMatrix) -> RVector {
    let n = a.nrows();
    let pairs = skew_pairs(n);
    RVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| a[(i, j)]))
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of order 6. For skew-symmetric input the Padé quotient is
/// orthogonal up to rounding.
pub fn expm(a: &RMatrix) -> RMatrix {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    if norm1 > PADE_SCALING_NORM {
        squarings = (norm1 / PADE_SCALING_NORM).log2().ceil().max(0.0) as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);

    let m = PADE_ORDER;
    let mut coeffs = vec![1.0f64; m + 1];
    for k in 1..=m {
        coeffs[k] = coeffs[k - 1] * (m - k + 1) as f64 / (k * (2 * m - k + 1)) as f64;
    }
    let id = RMatrix::identity(n, n);
    let mut num = id.clone() * coeffs[0];
    let mut den = id.clone() * coeffs[0];
    let mut power = id;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        power = &power * &scaled;
        num += &power * *c;
        if k % 2 == 0 {
            den += &power * *c;
        } else {
            den -= &power * *c;
        }
    }
    let mut result = den
        .lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// An orthogonal matrix `R` on `R^N` together with the tangent coordinates
/// of the most recent step applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationState {
    r: RMatrix,
    tangent: RVector,
}

impl RotationState {
    pub fn identity(n: usize) -> Self {
        Self {
            r: RMatrix::identity(n, n),
            tangent: RVector::zeros(skew_dim(n)),
        }
    }

    /// Wraps an orthogonal matrix. Inputs within `1e-8` of orthogonal are
    /// projected back onto the group.
    pub fn from_matrix(r: RMatrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::DimensionMismatch {
                expected: r.nrows(),
                actual: r.ncols(),
            });
        }
        let defect = orthogonality_defect(&r);
        if defect > 1e-8 {
            return Err(Error::NotRotation {
                defect,
                det: r.determinant(),
            });
        }
        let n = r.nrows();
        let r = if defect > REORTHONORMALIZE_AT {
            polar_orthogonal(&r)
        } else {
            r
        };
        Ok(Self {
            r,
            tangent: RVector::zeros(skew_dim(n)),
        })
    }

    /// Orthogonal `R` minimizing `Σ |R p_k - v_k|²` (orthogonal Procrustes).
    pub fn aligning(reference: &[RVector], targets: &[RVector]) -> Result<Self> {
        if reference.len() != targets.len() || reference.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: reference.len(),
                actual: targets.len(),
            });
        }
        let n = reference[0].len();
        let mut m = RMatrix::zeros(n, n);
        for (p, v) in reference.iter().zip(targets) {
            m += v * p.transpose();
        }
        Ok(Self {
            r: polar_orthogonal(&m),
            tangent: RVector::zeros(skew_dim(n)),
        })
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.r
    }

    pub fn tangent(&self) -> &RVector {
        &self.tangent
    }

    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.r)
    }

    /// `R · exp(A(params))`, re-orthonormalized when drift exceeds
    /// [`REORTHONORMALIZE_AT`].
    pub fn retract(&self, params: &RVector) -> Self {
        let n = self.dim();
        let step = expm(&skew_from_params(n, params));
        let mut r = &self.r * step;
        if orthogonality_defect(&r) > REORTHONORMALIZE_AT {
            r = polar_orthogonal(&r);
        }
        Self {
            r,
            tangent: params.clone(),
        }
    }

    pub fn apply(&self, v: &RVector) -> RVector {
        &self.r * v
    }
}
