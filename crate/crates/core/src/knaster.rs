//! Orienting a regular `(n²-1)`-simplex so that all of its vertices share a
//! common trace-power value.
//!
//! The vertices are always `R · p_k` for a fixed reference simplex `p_k`
//! scaled to the pure-state radius, so equiangularity holds exactly and the
//! search runs over the orthogonal group. Steps are Levenberg-Marquardt
//! updates in skew-symmetric tangent coordinates, retracted through the
//! matrix exponential: `R ← R · exp(A)`.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{
    build_basis, from_bloch, structure_tensor, BlochVector, GellMannBasis, HermitianMatrix,
    StructureTensor,
};
use crate::linalg::{identity_c, trace_product};
use crate::random::{haar_orthogonal, random_skew, rng_for_job, rng_from_seed, SfRng};
use crate::rotation::{params_from_skew, skew_pairs, RotationState};
use crate::simplex::{regular_simplex, Simplex};
use crate::tracepoly::{pure_cubic_value, pure_radius, trace_power, trace_power_value_grad};
use crate::weyl::{seed_sic, SicCandidate};
use crate::{CMatrix, Error, RMatrix, RVector, Result, C64};

/// Smallest eigenvalue still counted as non-negative.
pub const PSD_THRESHOLD: f64 = -1e-10;

/// Knobs for [`optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Trace power `m >= 3`; `m = 3` uses the cubic form `f`.
    pub power: usize,
    /// Common value every vertex should reach.
    pub target: f64,
    /// Convergence threshold on the sum of squared residuals.
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Initial LM damping.
    pub lm_damping: f64,
    pub seed: u64,
    /// Accepted steps still taken after reaching `tol_residual`, stopping
    /// early once a step fails to reduce the residual.
    pub polish_iters: usize,
    /// Random perturbations allowed when LM stalls at a critical point.
    pub max_restarts: usize,
    /// Standard deviation of the tangent perturbation used on restart.
    pub restart_scale: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            power: 3,
            target: 0.0,
            tol_residual: 1e-18,
            max_iters: 500,
            lm_damping: 1e-3,
            seed: 0,
            polish_iters: 25,
            max_restarts: 8,
            restart_scale: 1e-2,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.power < 3 {
            return Err(Error::Precondition(format!(
                "trace power must be at least 3, got {}",
                self.power
            )));
        }
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.tol_residual > 0.0) {
            return Err(Error::Precondition("tol_residual must be positive".into()));
        }
        if !self.target.is_finite() {
            return Err(Error::Precondition("target must be finite".into()));
        }
        Ok(())
    }
}

/// Everything about a Hilbert dimension the optimizer reuses across runs.
#[derive(Debug, Clone)]
pub struct OptContext {
    pub n: usize,
    pub basis: GellMannBasis,
    pub tensor: StructureTensor,
    pub simplex: Simplex,
    /// Reference vertices scaled to the pure-state radius.
    pub reference: Vec<RVector>,
}

impl OptContext {
    pub fn new(n: usize) -> Result<Self> {
        let basis = build_basis(n)?;
        let tensor = structure_tensor(&basis);
        let simplex = regular_simplex(n * n - 1)?;
        let reference = simplex.scaled(pure_radius(n));
        Ok(Self {
            n,
            basis,
            tensor,
            simplex,
            reference,
        })
    }

    /// Bloch dimension `n² - 1`.
    pub fn bloch_dim(&self) -> usize {
        self.n * self.n - 1
    }

    /// `g(v)` and `∇g(v)`.
    pub fn value_grad(&self, power: usize, v: &RVector) -> (f64, RVector) {
        if power == 3 {
            (self.tensor.contract3(v), self.tensor.contract3_grad(v))
        } else {
            let bv = BlochVector {
                dim: self.n,
                coords: v.clone(),
            };
            trace_power_value_grad(&bv, power, &self.basis).expect("dimensions agree")
        }
    }

    pub fn value(&self, power: usize, v: &RVector) -> f64 {
        if power == 3 {
            self.tensor.contract3(v)
        } else {
            self.value_grad(power, v).0
        }
    }

    /// Orientation of the reference simplex onto a known SIC.
    pub fn orientation_of(&self, sic: &SicCandidate) -> Result<RotationState> {
        let targets: Vec<RVector> = sic.bloch_vertices.iter().map(|v| v.coords.clone()).collect();
        RotationState::aligning(&self.reference, &targets)
    }

    /// The seed SIC orientation for `n ∈ {2, 3}`, a Haar-random rotation
    /// drawn from `seed` otherwise.
    pub fn default_start(&self, seed: u64) -> Result<RotationState> {
        match seed_sic(self.n) {
            Ok(sic) => self.orientation_of(&sic),
            Err(Error::UnsupportedDimension(_)) => {
                let mut rng = rng_from_seed(seed);
                RotationState::from_matrix(haar_orthogonal(self.bloch_dim(), &mut rng))
            }
            Err(e) => Err(e),
        }
    }

    /// Mean vertex value of an orientation.
    pub fn mean_value(&self, state: &RotationState, power: usize) -> f64 {
        let total: f64 = self
            .reference
            .iter()
            .map(|p| self.value(power, &state.apply(p)))
            .sum();
        total / self.reference.len() as f64
    }
}

/// An optimized vertex set with everything needed to inspect it.
#[derive(Debug, Clone)]
pub struct PovmFamilyResult {
    pub dim: usize,
    pub f0: f64,
    pub power: usize,
    pub vertices: Vec<BlochVector>,
    pub matrices: Vec<HermitianMatrix>,
    pub residual_sum: f64,
    pub per_vertex_residuals: Vec<f64>,
    /// Eigenvalues of each element, descending.
    pub spectra: Vec<Vec<f64>>,
    pub psd_flags: Vec<bool>,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub wall_time: f64,
    pub rotation: RotationState,
    /// Sum of squared residuals after each accepted step (first entry is the
    /// start), with restart points recorded in `restart_marks`.
    pub history: Vec<f64>,
    pub restart_marks: Vec<usize>,
}

impl PovmFamilyResult {
    /// Largest pairwise distance between sorted spectra.
    pub fn spectra_spread(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.spectra {
            for b in &self.spectra {
                for (x, y) in a.iter().zip(b) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        worst
    }

    pub fn psd_all(&self) -> bool {
        self.psd_flags.iter().all(|&f| f)
    }

    /// Builds a result from a set of Bloch vertices without optimizing.
    pub fn from_vertices(
        ctx: &OptContext,
        rotation: RotationState,
        vertices: Vec<RVector>,
        power: usize,
        f0: f64,
    ) -> Result<Self> {
        let values: Vec<f64> = vertices.iter().map(|v| ctx.value(power, v)).collect();
        let residuals: Vec<f64> = values.iter().map(|g| g - f0).collect();
        let residual_sum = residuals.iter().map(|r| r * r).sum();
        let vertices: Vec<BlochVector> = vertices
            .into_iter()
            .map(|coords| BlochVector { dim: ctx.n, coords })
            .collect();
        let matrices = vertices
            .iter()
            .map(|v| from_bloch(v, &ctx.basis))
            .collect::<Result<Vec<_>>>()?;
        let spectra: Vec<Vec<f64>> = matrices.iter().map(|m| m.eigenvalues()).collect();
        let psd_flags = spectra
            .iter()
            .map(|s| s.last().copied().unwrap_or(0.0) >= PSD_THRESHOLD)
            .collect();
        Ok(Self {
            dim: ctx.n,
            f0,
            power,
            vertices,
            matrices,
            residual_sum,
            per_vertex_residuals: residuals,
            spectra,
            psd_flags,
            iterations: 0,
            restarts: 0,
            converged: false,
            wall_time: 0.0,
            rotation,
            history: vec![residual_sum],
            restart_marks: Vec::new(),
        })
    }

    /// A verified SIC seen as a converged family at the pure-state value.
    pub fn from_sic(ctx: &OptContext, sic: &SicCandidate) -> Result<Self> {
        let rotation = ctx.orientation_of(sic)?;
        let vertices = sic.bloch_vertices.iter().map(|v| v.coords.clone()).collect();
        let mut r = Self::from_vertices(ctx, rotation, vertices, 3, pure_cubic_value(ctx.n))?;
        r.converged = true;
        Ok(r)
    }
}

/// `g(R p_k) - f₀` for every reference vertex.
pub fn objective(state: &RotationState, ctx: &OptContext, cfg: &OptimizerConfig) -> RVector {
    RVector::from_iterator(
        ctx.reference.len(),
        ctx.reference
            .iter()
            .map(|p| ctx.value(cfg.power, &state.apply(p)) - cfg.target),
    )
}

/// Residuals and Jacobian with respect to `R ← R·exp(A)`:
/// `J_kl = ∇g(R p_k) · (R E_l p_k)`.
fn residuals_and_jacobian(
    state: &RotationState,
    ctx: &OptContext,
    cfg: &OptimizerConfig,
    pairs: &[(usize, usize)],
) -> (RVector, RMatrix) {
    let k_count = ctx.reference.len();
    let mut res = RVector::zeros(k_count);
    let mut jac = RMatrix::zeros(k_count, pairs.len());
    let rt = state.matrix().transpose();
    for (k, p) in ctx.reference.iter().enumerate() {
        let w = state.apply(p);
        let (g, grad) = ctx.value_grad(cfg.power, &w);
        res[k] = g - cfg.target;
        let a = &rt * grad;
        for (l, &(i, j)) in pairs.iter().enumerate() {
            jac[(k, l)] = a[i] * p[j] - a[j] * p[i];
        }
    }
    (res, jac)
}

/// Damped Gauss-Newton step `-Jᵀ (J Jᵀ + λI)⁻¹ r`.
fn lm_step(jac: &RMatrix, res: &RVector, lambda: f64) -> Option<RVector> {
    let mut a = jac * jac.transpose();
    for i in 0..a.nrows() {
        a[(i, i)] += lambda;
    }
    let y = match a.clone().cholesky() {
        Some(ch) => ch.solve(res),
        None => a.lu().solve(res)?,
    };
    let step = -(jac.transpose() * y);
    step.iter().all(|x| x.is_finite()).then_some(step)
}

/// Levenberg-Marquardt on the orthogonal group from `start`.
pub fn optimize(
    start: &RotationState,
    ctx: &OptContext,
    cfg: &OptimizerConfig,
) -> Result<PovmFamilyResult> {
    let mut rng = rng_from_seed(cfg.seed);
    optimize_with_rng(start, ctx, cfg, &mut rng)
}

pub(crate) fn optimize_with_rng(
    start: &RotationState,
    ctx: &OptContext,
    cfg: &OptimizerConfig,
    rng: &mut SfRng,
) -> Result<PovmFamilyResult> {
    cfg.validate()?;
    if start.dim() != ctx.bloch_dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.bloch_dim(),
            actual: start.dim(),
        });
    }
    let clock = Instant::now();
    let n_big = ctx.bloch_dim();
    let pairs = skew_pairs(n_big);

    let mut state = start.clone();
    let (mut res, mut jac) = residuals_and_jacobian(&state, ctx, cfg, &pairs);
    let mut cost = res.norm_squared();
    let mut lambda = cfg.lm_damping;
    let mut history = vec![cost];
    let mut restart_marks = Vec::new();
    let mut iterations = 0usize;
    let mut restarts = 0usize;
    let mut polish_left: Option<usize> = None;

    loop {
        if cost <= cfg.tol_residual {
            let left = polish_left.get_or_insert(cfg.polish_iters);
            if *left == 0 || cost == 0.0 {
                break;
            }
        }
        if iterations >= cfg.max_iters {
            break;
        }

        let gradient = jac.transpose() * &res;
        let stalled_at_critical = gradient.norm() <= 1e-12 * res.norm();
        if (stalled_at_critical || lambda > 1e16) && polish_left.is_none() {
            if restarts >= cfg.max_restarts {
                break;
            }
            restarts += 1;
            let kick = params_from_skew(&random_skew(n_big, cfg.restart_scale, rng));
            state = state.retract(&kick);
            let (r, j) = residuals_and_jacobian(&state, ctx, cfg, &pairs);
            res = r;
            jac = j;
            cost = res.norm_squared();
            lambda = cfg.lm_damping;
            restart_marks.push(history.len());
            history.push(cost);
            continue;
        }
        iterations += 1;

        let accepted = match lm_step(&jac, &res, lambda) {
            Some(step) => {
                let candidate = state.retract(&step);
                let cand_res = objective(&candidate, ctx, cfg);
                let cand_cost = cand_res.norm_squared();
                if cand_cost < cost {
                    state = candidate;
                    let (r, j) = residuals_and_jacobian(&state, ctx, cfg, &pairs);
                    res = r;
                    jac = j;
                    cost = cand_cost;
                    history.push(cost);
                    true
                } else {
                    false
                }
            }
            None => false,
        };
        if accepted {
            lambda = (lambda * 0.5).max(1e-300);
            if let Some(left) = polish_left.as_mut() {
                *left -= 1;
            }
        } else {
            lambda *= 4.0;
            if polish_left.is_some() {
                break;
            }
        }
    }

    let vertices: Vec<RVector> = ctx.reference.iter().map(|p| state.apply(p)).collect();
    let mut result =
        PovmFamilyResult::from_vertices(ctx, state, vertices, cfg.power, cfg.target)?;
    result.iterations = iterations;
    result.restarts = restarts;
    result.converged = result.residual_sum <= cfg.tol_residual;
    result.history = history;
    result.restart_marks = restart_marks;
    result.wall_time = clock.elapsed().as_secs_f64();
    Ok(result)
}

/// How [`scan_f0`] orders its jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanSchedule {
    /// Warm-start chain outward from the target nearest the start value.
    Sequential,
    /// Independent jobs from the common start, one RNG stream per target.
    Parallel,
}

/// One target of a scan.
#[derive(Debug, Clone)]
pub struct ScanEntry {
    pub index: usize,
    pub f0: f64,
    pub result: PovmFamilyResult,
}

/// Evenly spaced targets; a single step yields `f0_min`.
pub fn scan_targets(f0_min: f64, f0_max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![f0_min],
        _ => (0..steps)
            .map(|i| f0_min + (f0_max - f0_min) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Continuation over `steps` targets in `[f0_min, f0_max]`.
///
/// The sequential schedule starts from the target closest to the mean vertex
/// value of `start`, walks up to `f0_max` and then down to `f0_min`, each
/// job warm-started from the last converged rotation on its side. Every
/// finished job is handed to `on_result` as soon as it completes. The
/// returned entries are in target order.
#[allow(clippy::too_many_arguments, clippy::needless_range_loop)]
pub fn scan_f0<F>(
    f0_min: f64,
    f0_max: f64,
    steps: usize,
    cfg: &OptimizerConfig,
    start: &RotationState,
    ctx: &OptContext,
    schedule: ScanSchedule,
    mut on_result: F,
) -> Result<Vec<ScanEntry>>
where
    F: FnMut(&ScanEntry),
{
    if steps < 1 {
        return Err(Error::Precondition("scan needs at least one step".into()));
    }
    cfg.validate()?;
    let targets = scan_targets(f0_min, f0_max, steps);

    let run = |idx: usize, from: &RotationState| -> Result<ScanEntry> {
        let job_cfg = OptimizerConfig {
            target: targets[idx],
            ..cfg.clone()
        };
        let mut rng = rng_for_job(cfg.seed, idx as u64);
        let result = optimize_with_rng(from, ctx, &job_cfg, &mut rng)?;
        Ok(ScanEntry {
            index: idx,
            f0: targets[idx],
            result,
        })
    };

    let mut slots: Vec<Option<ScanEntry>> = (0..steps).map(|_| None).collect();
    match schedule {
        ScanSchedule::Parallel => {
            let done: Vec<Result<ScanEntry>> =
                (0..steps).into_par_iter().map(|i| run(i, start)).collect();
            for entry in done {
                let entry = entry?;
                on_result(&entry);
                let i = entry.index;
                slots[i] = Some(entry);
            }
        }
        ScanSchedule::Sequential => {
            let mean = ctx.mean_value(start, cfg.power);
            let first = (0..steps)
                .min_by(|&a, &b| {
                    (targets[a] - mean)
                        .abs()
                        .total_cmp(&(targets[b] - mean).abs())
                })
                .expect("steps >= 1");
            let mut pivot = start.clone();
            let mut warm = start.clone();
            for i in first..steps {
                let entry = run(i, &warm)?;
                if entry.result.converged {
                    warm = entry.result.rotation.clone();
                    if i == first {
                        pivot = warm.clone();
                    }
                }
                on_result(&entry);
                slots[i] = Some(entry);
            }
            let mut warm = pivot;
            for i in (0..first).rev() {
                let entry = run(i, &warm)?;
                if entry.result.converged {
                    warm = entry.result.rotation.clone();
                }
                on_result(&entry);
                slots[i] = Some(entry);
            }
        }
    }
    Ok(slots.into_iter().map(|s| s.expect("every slot filled")).collect())
}

/// `n I - Σ_k Π_k` over the first `n² - 1` elements.
pub fn last_vertex(matrices: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let n = matrices
        .first()
        .map(|m| m.dim())
        .ok_or_else(|| Error::Precondition("no matrices given".into()))?;
    if matrices.len() != n * n - 1 {
        return Err(Error::Precondition(format!(
            "expected {} matrices for dimension {n}, got {}",
            n * n - 1,
            matrices.len()
        )));
    }
    let mut acc = identity_c(n) * C64::new(n as f64, 0.0);
    for m in matrices {
        if m.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: m.dim(),
            });
        }
        acc -= m.matrix();
    }
    Ok(HermitianMatrix::symmetrized(acc))
}

/// `Tr((I/n + Ω(θ))³)` sampled on the circle through three equiangular
/// elements, with its least-squares fit `A + B cos 3θ`.
#[derive(Debug, Clone, Serialize)]
pub struct CircleProfile {
    pub dim: usize,
    pub theta_samples: Vec<f64>,
    pub trace_values: Vec<f64>,
    pub fitted_constant: f64,
    pub fitted_cos3_coefficient: f64,
    /// Cosine of the phase of `Tr(ρ_a ρ_b ρ_c)`.
    pub alpha: f64,
    /// Largest absolute deviation of the samples from the fit.
    pub fit_residual: f64,
}

/// Closed-form `(A, B)` of the cubic trace on the circle through three pure
/// elements with overlaps `1/(n+1)` and triple-product phase cosine `alpha`.
pub fn continuity_coefficients(n: usize, alpha: f64) -> (f64, f64) {
    let nf = n as f64;
    let s = (nf + 1.0).sqrt();
    let denom = 9.0 * s.powi(3);
    let a = (-4.0 * alpha + 7.0 * s * nf + 13.0 * s) / denom;
    let b = 2.0 * (2.0 * alpha + s * nf - 2.0 * s) / denom;
    (a, b)
}

/// Point `I/n + Ω(θ)` of the circle through three elements.
pub fn circle_point(a: &CMatrix, b: &CMatrix, c: &CMatrix, theta: f64) -> CMatrix {
    let (cos, sin) = (theta.cos(), theta.sin());
    let r3 = 3f64.sqrt();
    let ca = 2.0 / 3.0 * cos + 1.0 / 3.0;
    let cb = -cos / 3.0 + sin / r3 + 1.0 / 3.0;
    let cc = -cos / 3.0 - sin / r3 + 1.0 / 3.0;
    a * C64::new(ca, 0.0) + b * C64::new(cb, 0.0) + c * C64::new(cc, 0.0)
}

pub fn circle_profile(
    rho_a: &HermitianMatrix,
    rho_b: &HermitianMatrix,
    rho_c: &HermitianMatrix,
    samples: usize,
) -> Result<CircleProfile> {
    let n = rho_a.dim();
    if rho_b.dim() != n || rho_c.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if rho_b.dim() != n { rho_b.dim() } else { rho_c.dim() },
        });
    }
    if samples < 3 {
        return Err(Error::Precondition("circle needs at least 3 samples".into()));
    }
    let want = 1.0 / (n as f64 + 1.0);
    let elems = [rho_a, rho_b, rho_c];
    let mut devs = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        devs.push((trace_product(elems[i], elems[j]).re - want).abs());
    }
    for e in elems {
        devs.push((e.trace() - 1.0).abs());
    }
    if devs.iter().any(|&d| d > 1e-8) {
        let shown: Vec<String> = devs.iter().map(|d| format!("{d:.3e}")).collect();
        return Err(Error::Precondition(format!(
            "triple is not equiangular with unit traces: deviations [{}]",
            shown.join(", ")
        )));
    }

    let theta_samples: Vec<f64> = (0..samples)
        .map(|k| 2.0 * PI * k as f64 / samples as f64)
        .collect();
    let trace_values = theta_samples
        .iter()
        .map(|&t| trace_power(&circle_point(rho_a, rho_b, rho_c, t), 3))
        .collect::<Result<Vec<_>>>()?;

    // normal equations for [1, cos 3θ]
    let (mut s11, mut s1c, mut scc, mut sy, mut scy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&t, &y) in theta_samples.iter().zip(&trace_values) {
        let c = (3.0 * t).cos();
        s11 += 1.0;
        s1c += c;
        scc += c * c;
        sy += y;
        scy += c * y;
    }
    let det = s11 * scc - s1c * s1c;
    let fitted_constant = (scc * sy - s1c * scy) / det;
    let fitted_cos3_coefficient = (s11 * scy - s1c * sy) / det;
    let fit_residual = theta_samples
        .iter()
        .zip(&trace_values)
        .map(|(&t, &y)| (y - fitted_constant - fitted_cos3_coefficient * (3.0 * t).cos()).abs())
        .fold(0.0, f64::max);

    let triple = trace_product(&(rho_a.matrix() * rho_b.matrix()), rho_c);
    let alpha = triple.arg().cos();
    Ok(CircleProfile {
        dim: n,
        theta_samples,
        trace_values,
        fitted_constant,
        fitted_cos3_coefficient,
        alpha,
        fit_residual,
    })
}

/// Equal-value configuration found on `S¹`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S1Solution {
    /// Angles of the points, radians.
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    pub common_value: f64,
    pub spread: f64,
    pub iterations: usize,
}

const S1_GRID: usize = 3600;
const S1_MAX_ITERS: usize = 200;

fn on_circle<F: Fn(f64, f64) -> f64>(f: &F, theta: f64) -> f64 {
    f(theta.cos(), theta.sin())
}

fn s1_solution<F: Fn(f64, f64) -> f64>(f: &F, angles: Vec<f64>, iterations: usize) -> S1Solution {
    let values: Vec<f64> = angles.iter().map(|&t| on_circle(f, t)).collect();
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    S1Solution {
        common_value: values.iter().sum::<f64>() / values.len() as f64,
        angles,
        values,
        spread: hi - lo,
        iterations,
    }
}

/// Rigid equiangular configurations on the unit circle with equal values of
/// `f(x, y)`. With two points (the `-1/2` pair, 120° apart) the first point
/// is swept from a minimizer of `f` towards a maximizer and the sign change
/// of `f(p₁) - f(p₂)` is bisected. With three points (the equilateral
/// triangle) the spread of the three values is minimized on a grid and then
/// refined by golden-section search.
pub fn knaster_s1<F: Fn(f64, f64) -> f64>(f: F, points: usize, tol: f64) -> Result<S1Solution> {
    let step = 2.0 * PI / 3.0;
    match points {
        2 => {
            let h = |t: f64| on_circle(&f, t) - on_circle(&f, t + step);
            if h(0.0).abs() <= tol {
                return Ok(s1_solution(&f, vec![0.0, step], 0));
            }
            let grid: Vec<f64> = (0..S1_GRID).map(|k| 2.0 * PI * k as f64 / S1_GRID as f64).collect();
            let vals: Vec<f64> = grid.iter().map(|&t| on_circle(&f, t)).collect();
            let arg = |better: fn(f64, f64) -> bool| {
                let mut best = 0;
                for k in 1..vals.len() {
                    if better(vals[k], vals[best]) {
                        best = k;
                    }
                }
                grid[best]
            };
            let t_min = arg(|a, b| a < b);
            let mut t_max = arg(|a, b| a > b);
            if t_max < t_min {
                t_max += 2.0 * PI;
            }
            let (mut lo, mut hi) = (t_min, t_max);
            let (h_lo, h_hi) = (h(lo), h(hi));
            if h_lo.abs() <= tol {
                return Ok(s1_solution(&f, vec![lo, lo + step], 0));
            }
            if h_hi.abs() <= tol {
                return Ok(s1_solution(&f, vec![hi, hi + step], 0));
            }
            if h_lo > 0.0 || h_hi < 0.0 {
                return Err(Error::NumericalIntegrity(
                    "no sign change along the sweep".into(),
                ));
            }
            for it in 1..=S1_MAX_ITERS {
                let mid = 0.5 * (lo + hi);
                let hm = h(mid);
                if hm.abs() <= tol || (hi - lo) < 1e-15 {
                    if hm.abs() > tol {
                        break;
                    }
                    return Ok(s1_solution(&f, vec![mid, mid + step], it));
                }
                if hm < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Err(Error::NotConverged {
                tol,
                iterations: S1_MAX_ITERS,
                best: h(0.5 * (lo + hi)).abs(),
            })
        }
        3 => {
            let spread = |t: f64| {
                let v = [
                    on_circle(&f, t),
                    on_circle(&f, t + step),
                    on_circle(&f, t + 2.0 * step),
                ];
                v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                    - v.iter().copied().fold(f64::INFINITY, f64::min)
            };
            let angles = |t: f64| vec![t, t + step, t + 2.0 * step];
            if spread(0.0) <= tol {
                return Ok(s1_solution(&f, angles(0.0), 0));
            }
            let grid_n = S1_GRID / 3;
            let h = step / grid_n as f64;
            let best = (0..grid_n)
                .map(|k| k as f64 * h)
                .min_by(|a, b| spread(*a).total_cmp(&spread(*b)))
                .expect("non-empty grid");
            let (mut a, mut b) = (best - h, best + h);
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let mut c = b - g * (b - a);
            let mut d = a + g * (b - a);
            for it in 1..=S1_MAX_ITERS {
                if spread(c) < spread(d) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - g * (b - a);
                d = a + g * (b - a);
                let mid = 0.5 * (a + b);
                if spread(mid) <= tol {
                    return Ok(s1_solution(&f, angles(mid), it));
                }
                if (b - a).abs() < 1e-16 {
                    break;
                }
            }
            Err(Error::NotConverged {
                tol,
                iterations: S1_MAX_ITERS,
                best: spread(0.5 * (a + b)),
            })
        }
        _ => Err(Error::Precondition(format!(
            "the S¹ solver handles 2 or 3 points, got {points}"
        ))),
    }
}

/// Random orthogonal start drawn from `rng`.
pub fn random_start<R: Rng + ?Sized>(ctx: &OptContext, rng: &mut R) -> Result<RotationState> {
    RotationState::from_matrix(haar_orthogonal(ctx.bloch_dim(), rng))
}
