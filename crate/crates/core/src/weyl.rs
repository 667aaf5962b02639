//! Weyl-Heisenberg displacement operators and SIC-POVM seeds.

use serde::{Deserialize, Serialize};

use crate::bloch::{build_basis, from_bloch, to_bloch, BlochVector, HermitianMatrix};
use crate::linalg::trace_product;
use crate::simplex::regular_simplex;
use crate::tracepoly::{pure_radius, purity_defect};
use crate::{CMatrix, Error, Result, C64};

/// Tolerance used when verifying the stored fiducial at construction.
const SEED_VERIFY_TOL: f64 = 1e-12;

/// Where a candidate came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SicSource {
    Seed,
    Optimized,
    File,
}

/// `n²` unit-trace projectors together with their Bloch images.
#[derive(Debug, Clone)]
pub struct SicCandidate {
    pub dim: usize,
    pub projectors: Vec<HermitianMatrix>,
    pub bloch_vertices: Vec<BlochVector>,
    pub source: SicSource,
}

impl SicCandidate {
    pub fn from_projectors(projectors: Vec<HermitianMatrix>, source: SicSource) -> Result<Self> {
        let dim = projectors
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| Error::Malformed("empty projector list".into()))?;
        let basis = build_basis(dim)?;
        let bloch_vertices = projectors
            .iter()
            .map(|p| to_bloch(p, &basis))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dim,
            projectors,
            bloch_vertices,
            source,
        })
    }
}

/// Outcome of [`verify_sic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SicVerdict {
    pub ok: bool,
    pub max_deviation: f64,
    pub max_overlap_deviation: f64,
    pub max_purity_defect: f64,
    pub max_bloch_dot_deviation: f64,
}

/// Clock-and-shift products `X^a Z^b`, ordered by `a` then `b`, with
/// `X|k⟩ = |k+1 mod n⟩` and `Z|k⟩ = ω^k |k⟩`, `ω = e^{2πi/n}`.
pub fn displacement_ops(n: usize) -> Result<Vec<CMatrix>> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "Hilbert dimension must be at least 2",
        });
    }
    let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64);
    let mut ops = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            // (X^a Z^b)|k⟩ = ω^{bk} |k + a⟩
            let mut d = CMatrix::zeros(n, n);
            for k in 0..n {
                d[((k + a) % n, k)] = omega(b * k);
            }
            ops.push(d);
        }
    }
    Ok(ops)
}

/// Orbit `{D_ab |ψ⟩⟨ψ| D_ab†}` of a unit vector.
pub fn fiducial_orbit(psi: &[C64], n: usize) -> Result<SicCandidate> {
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: psi.len(),
        });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "fiducial must be a unit vector, |ψ| = {norm}"
        )));
    }
    let v = nalgebra::DVector::from_column_slice(psi);
    let projectors = displacement_ops(n)?
        .iter()
        .map(|d| {
            let w = d * &v;
            HermitianMatrix::projector(w.as_slice())
        })
        .collect();
    SicCandidate::from_projectors(projectors, SicSource::Seed)
}

/// Checks the `n²` elements for pairwise overlap `1/(n+1)`, purity, and
/// Bloch inner products `-1/(2n(n+1))`.
pub fn verify_sic(c: &SicCandidate, tol: f64) -> SicVerdict {
    let n = c.dim;
    let nf = n as f64;
    let overlap = 1.0 / (nf + 1.0);
    let dot = -1.0 / (2.0 * nf * (nf + 1.0));
    let mut dev_overlap = 0.0f64;
    let mut dev_dot = 0.0f64;
    let mut dev_purity = 0.0f64;
    let count_ok = c.projectors.len() == n * n && c.bloch_vertices.len() == n * n;
    for (j, pj) in c.projectors.iter().enumerate() {
        dev_purity = dev_purity.max(purity_defect(pj).unwrap_or(f64::INFINITY));
        for k in j + 1..c.projectors.len() {
            let t = trace_product(pj, &c.projectors[k]);
            dev_overlap = dev_overlap.max((t.re - overlap).abs().max(t.im.abs()));
            let d = c.bloch_vertices[j].dot(&c.bloch_vertices[k]);
            dev_dot = dev_dot.max((d - dot).abs());
        }
    }
    let max_deviation = dev_overlap.max(dev_dot).max(dev_purity);
    SicVerdict {
        ok: count_ok && max_deviation <= tol,
        max_deviation,
        max_overlap_deviation: dev_overlap,
        max_purity_defect: dev_purity,
        max_bloch_dot_deviation: dev_dot,
    }
}

/// The stored qutrit fiducial `(0, 1, -1)/√2`.
pub fn qutrit_fiducial() -> Vec<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]
}

/// A verified SIC-POVM for `n ∈ {2, 3}`. The qubit seed is the regular
/// tetrahedron at radius ½; the qutrit seed is the orbit of the stored
/// fiducial, verified before it is returned.
pub fn seed_sic(n: usize) -> Result<SicCandidate> {
    let cand = match n {
        2 => {
            let basis = build_basis(2)?;
            let projectors = regular_simplex(3)?
                .scaled(pure_radius(2))
                .into_iter()
                .map(|v| from_bloch(&BlochVector::new(2, v)?, &basis))
                .collect::<Result<Vec<_>>>()?;
            SicCandidate::from_projectors(projectors, SicSource::Seed)?
        }
        3 => fiducial_orbit(&qutrit_fiducial(), 3)?,
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let verdict = verify_sic(&cand, SEED_VERIFY_TOL);
    if !verdict.ok {
        return Err(Error::NumericalIntegrity(format!(
            "stored seed for n={n} failed verification (deviation {:.3e})",
            verdict.max_deviation
        )));
    }
    Ok(cand)
}

/// Seed from an external fiducial vector; verified like the built-in seeds.
pub fn seed_from_fiducial(n: usize, fiducial: &[C64], tol: f64) -> Result<SicCandidate> {
    let mut cand = fiducial_orbit(fiducial, n)?;
    cand.source = SicSource::File;
    let verdict = verify_sic(&cand, tol);
    if !verdict.ok {
        return Err(Error::Precondition(format!(
            "fiducial orbit is not a SIC (deviation {:.3e})",
            verdict.max_deviation
        )));
    }
    Ok(cand)
}

/// `Σ_rst Tr(Π_r Π_s Π_t)` over all ordered triples.
pub fn triple_product_sum(elements: &[HermitianMatrix]) -> f64 {
    let mut total = C64::new(0.0, 0.0);
    for r in elements {
        for s in elements {
            let rs = r.matrix() * s.matrix();
            for t in elements {
                total += trace_product(&rs, t);
            }
        }
    }
    total.re
}
