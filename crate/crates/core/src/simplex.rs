//! Regular simplices, rotations fixing a prefix of their vertices, and the
//! nested sphere sections `J_i` cut out by equiangularity constraints.
//!
//! Vertex indices are 0-based; a "level" `i` follows the 1-based convention
//! of the sections (`J_1` is the whole sphere, `J_i` constrains the first
//! `i - 1` vertices).

use crate::linalg::{columns_to_matrix, complete_basis, gram_schmidt, orthogonality_defect};
use crate::{Error, RMatrix, RVector, Result};

const GS_TOL: f64 = 1e-13;
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Unit vertices in `R^N` with pairwise inner product `-1/N`. Either the
/// full simplex (`N + 1` vertices) or its first `N` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    ambient_dim: usize,
    vertices: Vec<RVector>,
}

impl Simplex {
    /// Validates unit norms and pairwise products `-1/N` within `tol`.
    pub fn from_vertices(vertices: Vec<RVector>, tol: f64) -> Result<Self> {
        let n = vertices.first().map_or(0, |v| v.len());
        if n == 0 || (vertices.len() != n + 1 && vertices.len() != n) {
            return Err(Error::Precondition(format!(
                "expected N or N+1 vertices in R^N, got {} in R^{n}",
                vertices.len()
            )));
        }
        let s = Self {
            ambient_dim: n,
            vertices,
        };
        let dev = s.gram_deviation();
        if dev > tol {
            return Err(Error::Precondition(format!(
                "vertices are not equiangular (max Gram deviation {dev:.3e})"
            )));
        }
        Ok(s)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[RVector] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &RVector {
        &self.vertices[i]
    }

    /// The equiangularity constant `-1/N`.
    pub fn cosine(&self) -> f64 {
        -1.0 / self.ambient_dim as f64
    }

    pub fn gram(&self) -> RMatrix {
        let m = self.vertices.len();
        RMatrix::from_fn(m, m, |i, j| self.vertices[i].dot(&self.vertices[j]))
    }

    /// Max deviation of the Gram matrix from `(1 + 1/N) I - (1/N) 11ᵀ`.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.gram();
        let c = self.cosine();
        let mut dev = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let want = if i == j { 1.0 } else { c };
                dev = dev.max((g[(i, j)] - want).abs());
            }
        }
        dev
    }

    /// Vertices scaled to `radius`.
    pub fn scaled(&self, radius: f64) -> Vec<RVector> {
        self.vertices.iter().map(|v| v * radius).collect()
    }

    /// Orthonormal frame from Gram-Schmidt on the vertices in order.
    pub fn gram_schmidt_frame(&self) -> RMatrix {
        let n = self.ambient_dim;
        let take = self.vertices.len().min(n);
        let q = gram_schmidt(&self.vertices[..take], GS_TOL);
        columns_to_matrix(&complete_basis(&q, n))
    }
}

/// Regular simplex in `R^N` by the level recursion
/// `V_k = { (√(k²-1)/k · v, 1/k) : v ∈ V_{k-1} } ∪ { (0, …, 0, -1) }`,
/// starting from `V_1 = {(1), (-1)}`.
pub fn regular_simplex(n: usize) -> Result<Simplex> {
    if n < 1 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "simplex dimension must be at least 1",
        });
    }
    let mut verts: Vec<Vec<f64>> = vec![vec![1.0], vec![-1.0]];
    for k in 2..=n {
        let kf = k as f64;
        let scale = (kf * kf - 1.0).sqrt() / kf;
        let mut next: Vec<Vec<f64>> = verts
            .iter()
            .map(|v| {
                let mut w: Vec<f64> = v.iter().map(|x| x * scale).collect();
                w.push(1.0 / kf);
                w
            })
            .collect();
        let mut last = vec![0.0; k];
        last[k - 1] = -1.0;
        next.push(last);
        verts = next;
    }
    Ok(Simplex {
        ambient_dim: n,
        vertices: verts.into_iter().map(RVector::from_vec).collect(),
    })
}

fn is_proper_rotation(r: &RMatrix) -> Result<()> {
    let defect = orthogonality_defect(r);
    let det = r.determinant();
    if defect > 1e-12 || det < 0.0 {
        return Err(Error::NotRotation { defect, det });
    }
    Ok(())
}

/// `U = Q · diag(I_k, small) · Qᵀ` where `Q` is the Gram-Schmidt frame of
/// the vertices. `U` fixes the first `k` vertices.
pub fn stabilizer_rotation(s: &Simplex, k: usize, small: &RMatrix) -> Result<RMatrix> {
    let n = s.ambient_dim;
    if k < 1 || k >= n {
        return Err(Error::Precondition(format!(
            "number of fixed vertices must be in 1..={}, got {k}",
            n - 1
        )));
    }
    if small.nrows() != n - k || small.ncols() != n - k {
        return Err(Error::DimensionMismatch {
            expected: n - k,
            actual: small.nrows(),
        });
    }
    is_proper_rotation(small)?;
    let q = s.gram_schmidt_frame();
    let mut block = RMatrix::identity(n, n);
    block.view_mut((k, k), (n - k, n - k)).copy_from(small);
    Ok(&q * block * q.transpose())
}

/// Rotation in the plane of two unit vectors taking `from` to `to`.
fn plane_rotation(from: &RVector, to: &RVector) -> Result<RMatrix> {
    let m = from.len();
    let id = RMatrix::identity(m, m);
    let c = from.dot(to).clamp(-1.0, 1.0);
    if (c - 1.0).abs() < 1e-15 {
        return Ok(id);
    }
    if m < 2 {
        return Err(Error::Precondition(
            "no proper rotation of R^1 maps -x to x".into(),
        ));
    }
    let t = if c < -1.0 + 1e-12 {
        complete_basis(std::slice::from_ref(from), m)[1].clone()
    } else {
        let w = to - from * c;
        let norm = w.norm();
        w / norm
    };
    let s = to.dot(&t);
    let (cos, sin) = if c < -1.0 + 1e-12 { (-1.0, 0.0) } else { (c, s) };
    let uu = from * from.transpose();
    let tt = &t * t.transpose();
    let tu = &t * from.transpose();
    let ut = from * t.transpose();
    Ok(id + (uu + tt) * (cos - 1.0) + (tu - ut) * sin)
}

/// A rotation fixing the first `k` vertices and taking vertex `from` to
/// vertex `to` (both indices `>= k`).
pub fn stabilizer_mapping(s: &Simplex, k: usize, from: usize, to: usize) -> Result<RMatrix> {
    let n = s.ambient_dim;
    if from < k || to < k || from >= s.len() || to >= s.len() {
        return Err(Error::Precondition(format!(
            "vertices {from}, {to} must be unfixed (index >= {k}) and exist"
        )));
    }
    let q = s.gram_schmidt_frame();
    let comp = q.columns(k, n - k);
    let x = comp.transpose() * s.vertex(from);
    let y = comp.transpose() * s.vertex(to);
    let (xn, yn) = (x.norm(), y.norm());
    let small = plane_rotation(&(x / xn), &(y / yn))?;
    stabilizer_rotation(s, k, &small)
}

/// Orthonormal coordinates on the sphere section `J_level`: the center of the
/// section, its radius, and a basis of the orthogonal complement of the
/// first `level - 1` vertices.
#[derive(Debug, Clone)]
pub struct SubspaceFrame {
    pub level: usize,
    pub anchor_vectors: Vec<RVector>,
    pub offset: RVector,
    pub scale: f64,
    pub complement: RMatrix,
}

impl SubspaceFrame {
    pub fn new(s: &Simplex, level: usize) -> Result<Self> {
        let n = s.ambient_dim;
        if level < 1 || level > n {
            return Err(Error::Precondition(format!(
                "level must be in 1..={n}, got {level}"
            )));
        }
        let anchors: Vec<RVector> = s.vertices[..level - 1].to_vec();
        let q = gram_schmidt(&anchors, GS_TOL);
        let full = complete_basis(&q, n);
        let complement = columns_to_matrix(&full[level - 1..]);

        let mut offset = RVector::zeros(n);
        if !anchors.is_empty() {
            let m = anchors.len();
            let gram = RMatrix::from_fn(m, m, |i, j| anchors[i].dot(&anchors[j]));
            let rhs = RVector::from_element(m, s.cosine());
            let coef = gram
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::NumericalIntegrity("singular anchor Gram matrix".into()))?;
            for (c, a) in coef.iter().zip(&anchors) {
                offset.axpy(*c, a, 1.0);
            }
        }
        let scale = (1.0 - offset.norm_squared()).sqrt();
        Ok(Self {
            level,
            anchor_vectors: anchors,
            offset,
            scale,
            complement,
        })
    }

    /// Unit vector of `S^{N-level}` for a member of `J_level`.
    pub fn reduce(&self, x: &RVector) -> RVector {
        self.complement.transpose() * (x - &self.offset) / self.scale
    }

    /// Inverse of [`Self::reduce`].
    pub fn lift(&self, u: &RVector) -> RVector {
        &self.offset + &self.complement * u * self.scale
    }
}

/// Whether unit `x` lies in `J_level`: `x · p_j = -1/N` for the first
/// `level - 1` vertices.
pub fn j_membership(x: &RVector, s: &Simplex, level: usize, tol: f64) -> bool {
    if x.len() != s.ambient_dim || (x.norm() - 1.0).abs() > tol {
        return false;
    }
    let c = s.cosine();
    s.vertices
        .iter()
        .take(level.saturating_sub(1))
        .all(|p| (x.dot(p) - c).abs() <= tol)
}

/// Images of `x` and of every vertex under `level - 1` rounds of
/// "shift by the anchor, then renormalize", in ambient coordinates.
fn iterate_reductions(x: &RVector, s: &Simplex, level: usize) -> (RVector, Vec<RVector>) {
    let n = s.ambient_dim;
    let mut cur = x.clone();
    let mut imgs: Vec<RVector> = s.vertices.clone();
    for l in 0..level - 1 {
        // images are unit with pairwise product -1/(N - l)
        let c = 1.0 / (n - l) as f64;
        let anchor = imgs[l].clone();
        let norm = (1.0 - c * c).sqrt();
        cur = (&cur + &anchor * c) / norm;
        for img in imgs.iter_mut().skip(l + 1) {
            *img = (&*img + &anchor * c) / norm;
        }
    }
    (cur, imgs)
}

/// Maps a member of `J_level` to the unit sphere `S^{N-level}` by composing
/// the shift-and-normalize reductions, then expressing the result in the
/// complement frame. Level 1 is the identity.
pub fn reduce_to_sphere(x: &RVector, s: &Simplex, level: usize) -> Result<RVector> {
    let n = s.ambient_dim;
    if level < 1 || level > n {
        return Err(Error::Precondition(format!(
            "level must be in 1..={n}, got {level}"
        )));
    }
    if !j_membership(x, s, level, MEMBERSHIP_TOL) {
        return Err(Error::Domain(format!("vector is not in J_{level}")));
    }
    let (cur, _) = iterate_reductions(x, s, level);
    let frame = SubspaceFrame::new(s, level)?;
    Ok(frame.complement.transpose() * cur)
}

/// Reduced images of the vertices `level-1..` (0-based), i.e. those still
/// free at this level.
pub fn reduced_vertices(s: &Simplex, level: usize) -> Result<Vec<RVector>> {
    let frame = SubspaceFrame::new(s, level)?;
    let (_, imgs) = iterate_reductions(&s.vertices[0], s, level);
    Ok(imgs[level - 1..]
        .iter()
        .map(|v| frame.complement.transpose() * v)
        .collect())
}

/// Radius of the shifted section before renormalization at one reduction
/// step with equiangularity constant `-1/m`.
pub fn intermediate_radius(m: usize) -> f64 {
    let mf = m as f64;
    ((mf * mf - 1.0) / (mf * mf)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff_r;
    use crate::random::{haar_orthogonal, rng_from_seed};

    #[test]
    fn printed_fixtures() {
        let s2 = regular_simplex(2).unwrap();
        let want2 = [[3f64.sqrt() / 2.0, 0.5], [-3f64.sqrt() / 2.0, 0.5], [0.0, -1.0]];
        for (v, w) in s2.vertices().iter().zip(want2.iter()) {
            assert!((v - RVector::from_row_slice(w)).amax() < 1e-12);
        }
        let s3 = regular_simplex(3).unwrap();
        let want3 = [
            [6f64.sqrt() / 3.0, 2f64.sqrt() / 3.0, 1.0 / 3.0],
            [-(6f64.sqrt()) / 3.0, 2f64.sqrt() / 3.0, 1.0 / 3.0],
            [0.0, -(8f64.sqrt()) / 3.0, 1.0 / 3.0],
            [0.0, 0.0, -1.0],
        ];
        for (v, w) in s3.vertices().iter().zip(want3.iter()) {
            assert!((v - RVector::from_row_slice(w)).amax() < 1e-12);
        }
    }

    #[test]
    fn gram_of_recursion() {
        for n in 1..=15 {
            let s = regular_simplex(n).unwrap();
            assert_eq!(s.len(), n + 1);
            assert!(s.gram_deviation() < 1e-12, "N={n}");
            let sum = s.vertices().iter().fold(RVector::zeros(n), |a, v| a + v);
            assert!(sum.amax() < 1e-10);
        }
        assert!(regular_simplex(0).is_err());
    }

    #[test]
    fn identity_small_rotation_gives_identity() {
        let s = regular_simplex(5).unwrap();
        let u = stabilizer_rotation(&s, 2, &RMatrix::identity(3, 3)).unwrap();
        assert!(max_abs_diff_r(&u, &RMatrix::identity(5, 5)) < 1e-12);
        let s8 = regular_simplex(8).unwrap();
        let u = stabilizer_rotation(&s8, 7, &RMatrix::identity(1, 1)).unwrap();
        assert!(max_abs_diff_r(&u, &RMatrix::identity(8, 8)) < 1e-12);
    }

    #[test]
    fn half_turn_fixes_first_vertex() {
        let s = regular_simplex(3).unwrap();
        let small = RMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        let u = stabilizer_rotation(&s, 1, &small).unwrap();
        assert!((&u * s.vertex(0) - s.vertex(0)).amax() < 1e-12);
        assert!((u.determinant() - 1.0).abs() < 1e-12);
        // the others move but the vertex set keeps its Gram matrix
        assert!((&u * s.vertex(1) - s.vertex(1)).amax() > 1e-3);
        let moved = Simplex::from_vertices(s.vertices().iter().map(|v| &u * v).collect(), 1e-12);
        assert!(moved.is_ok());
    }

    #[test]
    fn stabilizer_rejects_bad_input() {
        let s = regular_simplex(4).unwrap();
        let reflection = RMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            stabilizer_rotation(&s, 2, &reflection),
            Err(Error::NotRotation { .. })
        ));
        let sheared = RMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(stabilizer_rotation(&s, 2, &sheared).is_err());
        assert!(stabilizer_rotation(&s, 0, &RMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn random_stabilizers_fix_prefix() {
        let mut rng = rng_from_seed(21);
        let n = 8;
        let s = regular_simplex(n).unwrap();
        for k in 1..n {
            let mut small = haar_orthogonal(n - k, &mut rng);
            if small.determinant() < 0.0 {
                small.column_mut(0).neg_mut();
            }
            let u = stabilizer_rotation(&s, k, &small).unwrap();
            for j in 0..k {
                assert!((&u * s.vertex(j) - s.vertex(j)).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn membership_examples() {
        let s = regular_simplex(4).unwrap();
        let mut rng = rng_from_seed(2);
        let x = crate::random::random_unit_vector(4, &mut rng);
        assert!(j_membership(&x, &s, 1, 1e-12));
        for i in 1..=4 {
            assert!(j_membership(s.vertex(4), &s, i, 1e-12));
        }
        assert!(!j_membership(s.vertex(0), &s, 2, 1e-12));
    }

    #[test]
    fn reduction_level_one_is_identity() {
        let s = regular_simplex(3).unwrap();
        let x = s.vertex(1).clone();
        let r = reduce_to_sphere(&x, &s, 1).unwrap();
        assert!((r - x).amax() < 1e-15);
    }

    #[test]
    fn reduction_of_tetrahedron() {
        let s = regular_simplex(3).unwrap();
        let imgs = reduced_vertices(&s, 2).unwrap();
        assert_eq!(imgs.len(), 3);
        for a in 0..3 {
            assert!((imgs[a].norm() - 1.0).abs() < 1e-12);
            for b in a + 1..3 {
                assert!((imgs[a].dot(&imgs[b]) + 0.5).abs() < 1e-12);
            }
        }
        // intermediate radius before renormalization
        let shifted = s.vertex(1) + s.vertex(0) / 3.0;
        assert!((shifted.norm() - intermediate_radius(3)).abs() < 1e-14);
    }

    #[test]
    fn reduction_rejects_non_members() {
        let s = regular_simplex(3).unwrap();
        assert!(matches!(
            reduce_to_sphere(s.vertex(0), &s, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn frame_agrees_with_iterated_maps() {
        let s = regular_simplex(8).unwrap();
        for level in 1..=8 {
            let frame = SubspaceFrame::new(&s, level).unwrap();
            for v in &s.vertices()[level - 1..] {
                let a = reduce_to_sphere(v, &s, level).unwrap();
                let b = frame.reduce(v);
                assert!((&a - &b).amax() < 1e-12, "level {level}");
                assert!((frame.lift(&b) - v).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn mapping_between_free_vertices() {
        let s = regular_simplex(6).unwrap();
        for k in 1..5 {
            for a in k..7 {
                for b in k..7 {
                    let u = stabilizer_mapping(&s, k, a, b).unwrap();
                    assert!((&u * s.vertex(a) - s.vertex(b)).amax() < 1e-10);
                    for j in 0..k {
                        assert!((&u * s.vertex(j) - s.vertex(j)).amax() < 1e-12);
                    }
                }
            }
        }
        // the last level only admits the trivial rotation
        assert!(stabilizer_mapping(&s, 5, 5, 6).is_err());
    }
}
