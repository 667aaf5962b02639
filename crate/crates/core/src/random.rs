//! Seeded random objects. Every stochastic choice in the crate draws from a
//! ChaCha stream derived from a single `u64` seed; independent jobs use
//! distinct stream ids of the same seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, RMatrix, RVector, C64};

pub type SfRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SfRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for job `stream` of a run seeded with `seed`.
pub fn rng_for_job(seed: u64, stream: u64) -> SfRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Positive semidefinite, unit trace.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    let p = &g * g.adjoint();
    let tr = p.trace();
    p / tr
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-distributed orthogonal matrix.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RVector {
    let v = RVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / norm
}

pub fn random_complex_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(gaussian(rng), gaussian(rng))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Skew-symmetric matrix with Gaussian entries of standard deviation `scale`.
pub fn random_skew<R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> RMatrix {
    let mut a = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let x = scale * gaussian(rng);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    a
}
