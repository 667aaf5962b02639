//! Trace-power functionals on the Bloch sphere.
//!
//! With `ρ = I/n + Λ·v` and `Tr(Λ_j Λ_k) = 2δ_jk`:
//!
//! * `Tr ρ² = 1/n + 2|v|²`
//! * `Tr ρ³ = 1/n² + (6/n)|v|² + f(v)` where `f(v) = Σ d_ijk v_i v_j v_k`
//!
//! so pure states sit on `|v| = √((n-1)/(2n))` with `f(v) = (n-1)(n-2)/n²`.

use crate::bloch::{from_bloch, BlochVector, GellMannBasis, HermitianMatrix, StructureTensor};
use crate::linalg::trace_product;
use crate::{CMatrix, Error, RVector, Result, C64};

/// Imaginary residue of `Tr(H^m)` above which the result is rejected.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-10;
/// Default tolerance for [`purity_check`].
pub const DEFAULT_PURITY_TOL: f64 = 1e-10;

const ROOT_MAX_ITERS: usize = 200;
const ROOT_CONVERGENCE: f64 = 1e-14;
const ROOT_IMAG_LIMIT: f64 = 1e-8;

/// Bloch radius of pure states, `√((n-1)/(2n))`.
pub fn pure_radius(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 1.0) / (2.0 * nf)).sqrt()
}

/// Value of the cubic form at pure states, `(n-1)(n-2)/n²`.
pub fn pure_cubic_value(n: usize) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * (nf - 2.0) / (nf * nf)
}

/// `Tr(ρ^1) … Tr(ρ^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePowerProfile {
    pub dim: usize,
    pub powers: Vec<f64>,
}

impl TracePowerProfile {
    pub fn of(h: &HermitianMatrix) -> Result<Self> {
        let n = h.dim();
        let powers = (1..=n)
            .map(|m| trace_power(h, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dim: n, powers })
    }
}

/// `f(v) = Σ_ijk d_ijk v_i v_j v_k`.
pub fn f_cubic(v: &BlochVector, t: &StructureTensor) -> Result<f64> {
    check_tensor(v, t)?;
    Ok(t.contract3(&v.coords))
}

/// `∂f/∂v_j = 3 Σ_ik d_jik v_i v_k`.
pub fn grad_f_cubic(v: &BlochVector, t: &StructureTensor) -> Result<BlochVector> {
    check_tensor(v, t)?;
    Ok(BlochVector {
        dim: v.dim,
        coords: t.contract3_grad(&v.coords),
    })
}

fn check_tensor(v: &BlochVector, t: &StructureTensor) -> Result<()> {
    if v.dim != t.dim() || v.coords.len() != t.len() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            actual: v.dim,
        });
    }
    Ok(())
}

fn matrix_power(h: &CMatrix, m: usize) -> CMatrix {
    let n = h.nrows();
    let mut acc = CMatrix::identity(n, n);
    for _ in 0..m {
        acc = &acc * h;
    }
    acc
}

/// `Tr(H^m)` by repeated multiplication.
pub fn trace_power(h: &CMatrix, m: usize) -> Result<f64> {
    if m < 1 {
        return Err(Error::Precondition("trace power must be at least 1".into()));
    }
    let t = if m == 1 {
        h.trace()
    } else {
        let half = matrix_power(h, m - 1);
        trace_product(&half, h)
    };
    if t.im.abs() > IMAG_RESIDUE_LIMIT {
        return Err(Error::NumericalIntegrity(format!(
            "Tr(H^{m}) has imaginary residue {:.3e}",
            t.im
        )));
    }
    Ok(t.re)
}

/// `g(v) = Tr((I/n + Λ·v)^m)`.
pub fn trace_power_at(v: &BlochVector, m: usize, basis: &GellMannBasis) -> Result<f64> {
    trace_power(from_bloch(v, basis)?.matrix(), m)
}

/// `∂/∂v_j Tr(ρ^m) = m Tr(ρ^{m-1} Λ_j)`.
pub fn grad_trace_power(v: &BlochVector, m: usize, basis: &GellMannBasis) -> Result<BlochVector> {
    if m < 2 {
        return Err(Error::Precondition(
            "trace-power gradient needs m >= 2".into(),
        ));
    }
    let rho = from_bloch(v, basis)?;
    let p = matrix_power(&rho, m - 1);
    let coords = RVector::from_iterator(
        basis.len(),
        basis
            .matrices()
            .iter()
            .map(|l| m as f64 * trace_product(&p, l).re),
    );
    Ok(BlochVector { dim: v.dim, coords })
}

/// Value and gradient of `Tr(ρ^m)` in one pass.
pub fn trace_power_value_grad(
    v: &BlochVector,
    m: usize,
    basis: &GellMannBasis,
) -> Result<(f64, RVector)> {
    let rho = from_bloch(v, basis)?;
    let p = matrix_power(&rho, m - 1);
    let value = trace_product(&p, &rho).re;
    let grad = RVector::from_iterator(
        basis.len(),
        basis
            .matrices()
            .iter()
            .map(|l| m as f64 * trace_product(&p, l).re),
    );
    Ok((value, grad))
}

/// Largest of `|Tr H - 1|`, `|Tr H² - 1|`, `|Tr H³ - 1|`.
pub fn purity_defect(h: &CMatrix) -> Result<f64> {
    let mut worst = 0.0f64;
    for m in 1..=3 {
        worst = worst.max((trace_power(h, m)? - 1.0).abs());
    }
    Ok(worst)
}

/// Rank-one projector test through `Tr H = Tr H² = Tr H³ = 1`.
pub fn purity_check(h: &CMatrix, tol: f64) -> bool {
    purity_defect(h).is_ok_and(|d| d <= tol)
}

/// Elementary symmetric polynomials `e_0 … e_n` from power sums `p_1 … p_n`
/// through Newton's identities `k e_k = Σ_{i=1}^k (-1)^{i-1} e_{k-i} p_i`.
pub fn elementary_from_power_sums(powers: &[f64]) -> Vec<f64> {
    let n = powers.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * e[k - i] * powers[i - 1];
        }
        e[k] = acc / k as f64;
    }
    e
}

/// Monic characteristic polynomial coefficients, highest degree first:
/// `λ^n - e_1 λ^{n-1} + e_2 λ^{n-2} - …`.
pub fn characteristic_coefficients(powers: &[f64]) -> Vec<f64> {
    elementary_from_power_sums(powers)
        .iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { *e } else { -*e })
        .collect()
}

/// Eigenvalues (descending) of a Hermitian matrix with the given power sums.
pub fn spectrum_from_traces(profile: &TracePowerProfile) -> Result<Vec<f64>> {
    let n = profile.dim;
    if profile.powers.len() < n {
        return Err(Error::Precondition(format!(
            "profile needs {n} power sums, has {}",
            profile.powers.len()
        )));
    }
    let coeffs = characteristic_coefficients(&profile.powers[..n]);
    let roots = real_roots(&coeffs)?;
    Ok(roots)
}

/// All roots of a real monic polynomial, which must be real up to
/// `1e-8` imaginary part; returned sorted descending.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<f64>> {
    let degree = coeffs.len() - 1;
    let roots: Vec<C64> = match degree {
        0 => Vec::new(),
        1 => vec![C64::new(-coeffs[1], 0.0)],
        2 => quadratic_roots(coeffs[1], coeffs[2]),
        3 => cubic_roots(coeffs[1], coeffs[2], coeffs[3]),
        _ => aberth(coeffs),
    };
    let mut out = Vec::with_capacity(degree);
    for z in roots {
        if z.im.abs() > ROOT_IMAG_LIMIT {
            return Err(Error::InconsistentProfile { imag: z.im });
        }
        out.push(z.re);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

fn quadratic_roots(b: f64, c: f64) -> Vec<C64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // stable form: avoid cancellation
        let q = -0.5 * (b + b.signum() * s);
        if q == 0.0 {
            return vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        }
        vec![C64::new(q, 0.0), C64::new(c / q, 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![C64::new(-b / 2.0, s / 2.0), C64::new(-b / 2.0, -s / 2.0)]
    }
}

/// Roots of `x³ + a x² + b x + c`.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<C64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let scale = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    let roots = if p.abs() <= 1e-15 * scale * scale && q.abs() <= 1e-15 * scale.powi(3) {
        vec![C64::new(0.0, 0.0); 3]
    } else if disc <= 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| {
                let t = r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
                C64::new(t, 0.0)
            })
            .collect()
    } else {
        let sd = disc.sqrt();
        let u = (-q / 2.0 + sd).cbrt();
        let v = (-q / 2.0 - sd).cbrt();
        let re = -(u + v) / 2.0;
        let im = 3f64.sqrt() / 2.0 * (u - v);
        vec![
            C64::new(u + v, 0.0),
            C64::new(re, im),
            C64::new(re, -im),
        ]
    };
    let poly = [1.0, a, b, c];
    roots
        .into_iter()
        .map(|z| C64::new(z.re - shift, z.im))
        .map(|z| if z.im == 0.0 { polish_real(&poly, z) } else { z })
        .collect()
}

fn horner(coeffs: &[f64], z: C64) -> (C64, C64) {
    let mut p = C64::new(coeffs[0], 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// A few Newton steps on a real root, kept only while they reduce `|p|`.
fn polish_real(coeffs: &[f64], z: C64) -> C64 {
    let mut x = z.re;
    let mut best = horner(coeffs, C64::new(x, 0.0)).0.norm();
    for _ in 0..3 {
        let (p, dp) = horner(coeffs, C64::new(x, 0.0));
        if dp.re == 0.0 {
            break;
        }
        let next = x - p.re / dp.re;
        let val = horner(coeffs, C64::new(next, 0.0)).0.norm();
        if val < best {
            best = val;
            x = next;
        } else {
            break;
        }
    }
    C64::new(x, 0.0)
}

/// Aberth-Ehrlich simultaneous iteration for a monic polynomial.
fn aberth(coeffs: &[f64]) -> Vec<C64> {
    let degree = coeffs.len() - 1;
    // Cauchy bound on root moduli
    let bound = 1.0 + coeffs[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            C64::from_polar(0.5 * bound, angle)
        })
        .collect();
    for _ in 0..ROOT_MAX_ITERS {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < ROOT_CONVERGENCE {
            break;
        }
    }
    z.into_iter()
        .map(|r| {
            if r.im.abs() <= ROOT_IMAG_LIMIT {
                polish_real(coeffs, r)
            } else {
                r
            }
        })
        .collect()
}
