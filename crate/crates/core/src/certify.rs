//! Verification reports recomputed from the element matrices.

use serde::{Deserialize, Serialize};

use crate::bloch::{build_basis, from_bloch, to_bloch, BlochVector, HermitianMatrix};
use crate::knaster::{last_vertex, PovmFamilyResult, PSD_THRESHOLD};
use crate::linalg::{identity_c, max_abs_diff_c, trace_product};
use crate::tracepoly::{
    pure_radius, purity_check, purity_defect, spectrum_from_traces, trace_power,
    TracePowerProfile,
};
use crate::weyl::triple_product_sum;
use crate::{CMatrix, Error, Result, C64};

/// Everything [`verify_family`] measures. Deviations are absolute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub dim: usize,
    pub count: usize,
    pub power: usize,
    pub f0: Option<f64>,
    pub tol: f64,
    /// `max |Tr(ρ_j ρ_k) - 1/(n+1)|` over pairs.
    pub gram_max_dev: f64,
    /// `max |v_j · v_k + 1/(2n(n+1))|` over pairs.
    pub bloch_dot_max_dev: f64,
    /// `max ||v_k| - √((n-1)/(2n))|`.
    pub radius_max_dev: f64,
    pub trace_max_dev: f64,
    /// `Tr((ρ - I/n)³)` for power 3, `Tr(ρ^m)` otherwise.
    pub f_values: Vec<f64>,
    pub f_spread: f64,
    pub f0_max_dev: Option<f64>,
    pub spectra: Vec<Vec<f64>>,
    pub spectra_from_traces: Vec<Vec<f64>>,
    /// Disagreement between the eigensolver and the power-sum route.
    pub spectral_route_max_dev: f64,
    /// Largest pairwise distance between sorted spectra.
    pub spectral_spread: f64,
    pub psd_flags: Vec<bool>,
    pub purity_defects: Vec<f64>,
    pub all_pure: bool,
    pub triple_sum: f64,
    /// `|triple_sum - n⁴|`, only when every element is pure.
    pub triple_sum_dev: Option<f64>,
    /// `|n I - Σ_{k<n²} ρ_k - ρ_{n²}|`.
    pub last_vertex_defect: f64,
    pub last_vertex_purity_defect: f64,
    pub last_element_purity_defect: f64,
    pub flags: VerdictFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictFlags {
    pub geometry: bool,
    pub values: bool,
    pub spectra_routes: bool,
    pub closure: bool,
    /// `None` when the triple-sum identity does not apply.
    pub triple_sum: Option<bool>,
    pub unitary_equivalent: bool,
    pub psd_all: bool,
    pub verdict: bool,
}

impl VerificationReport {
    /// Human-readable table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let mut row = |name: &str, value: String| {
            out.push_str(&format!("{name:<28} {value}\n"));
        };
        row("dimension", self.dim.to_string());
        row("elements", self.count.to_string());
        row("power", self.power.to_string());
        row("f0", self.f0.map_or("-".into(), |f| format!("{f:.16e}")));
        row("gram max dev", format!("{:.3e}", self.gram_max_dev));
        row("bloch dot max dev", format!("{:.3e}", self.bloch_dot_max_dev));
        row("radius max dev", format!("{:.3e}", self.radius_max_dev));
        row("trace max dev", format!("{:.3e}", self.trace_max_dev));
        row("value spread", format!("{:.3e}", self.f_spread));
        if let Some(d) = self.f0_max_dev {
            row("value vs f0 max dev", format!("{d:.3e}"));
        }
        row("spectral routes max dev", format!("{:.3e}", self.spectral_route_max_dev));
        row("spectral spread", format!("{:.3e}", self.spectral_spread));
        row(
            "psd elements",
            format!(
                "{}/{}",
                self.psd_flags.iter().filter(|&&f| f).count(),
                self.count
            ),
        );
        row("all pure", self.all_pure.to_string());
        row(
            "triple sum",
            match self.triple_sum_dev {
                Some(d) => format!("{:.12} (dev {d:.3e})", self.triple_sum),
                None => format!("{:.12} (not checked)", self.triple_sum),
            },
        );
        row("last vertex defect", format!("{:.3e}", self.last_vertex_defect));
        row(
            "last vertex purity defect",
            format!("{:.3e}", self.last_vertex_purity_defect),
        );
        row("unitary equivalent", self.flags.unitary_equivalent.to_string());
        row("verdict", if self.flags.verdict { "PASS" } else { "FAIL" }.into());
        out
    }
}

fn spectral_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(if a.len() == b.len() { 0.0 } else { f64::INFINITY }, f64::max)
}

fn max_pairwise_spectral(spectra: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (j, a) in spectra.iter().enumerate() {
        for b in &spectra[j + 1..] {
            worst = worst.max(spectral_distance(a, b));
        }
    }
    worst
}

/// Family value of one element: `Tr((ρ - I/n)³)` for `power = 3`, else
/// `Tr(ρ^m)`.
fn family_value(m: &CMatrix, power: usize) -> Result<f64> {
    let n = m.nrows();
    if power == 3 {
        let shifted = m - identity_c(n) * C64::new(1.0 / n as f64, 0.0);
        trace_power(&shifted, 3)
    } else {
        trace_power(m, power)
    }
}

/// Recomputes every check from the matrices alone.
pub fn verify_matrices(
    matrices: &[HermitianMatrix],
    power: usize,
    f0: Option<f64>,
    tol: f64,
) -> Result<VerificationReport> {
    let n = matrices
        .first()
        .map(|m| m.dim())
        .ok_or_else(|| Error::Malformed("no matrices".into()))?;
    if n < 2 {
        return Err(Error::InvalidDimension {
            dim: n,
            reason: "need n >= 2",
        });
    }
    if let Some(m) = matrices.iter().find(|m| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: m.dim(),
        });
    }
    if matrices.len() != n * n {
        return Err(Error::Malformed(format!(
            "expected {} elements for dimension {n}, found {}",
            n * n,
            matrices.len()
        )));
    }
    if power < 3 {
        return Err(Error::Precondition(format!("power must be >= 3, got {power}")));
    }
    let basis = build_basis(n)?;
    let vertices = matrices
        .iter()
        .map(|m| to_bloch(m, &basis))
        .collect::<Result<Vec<_>>>()?;
    let nf = n as f64;

    let overlap = 1.0 / (nf + 1.0);
    let dot = -1.0 / (2.0 * nf * (nf + 1.0));
    let mut gram_max_dev = 0.0f64;
    let mut bloch_dot_max_dev = 0.0f64;
    for j in 0..matrices.len() {
        for k in j + 1..matrices.len() {
            let t = trace_product(&matrices[j], &matrices[k]);
            gram_max_dev = gram_max_dev.max((t.re - overlap).abs().max(t.im.abs()));
            bloch_dot_max_dev = bloch_dot_max_dev.max((vertices[j].dot(&vertices[k]) - dot).abs());
        }
    }
    let radius = pure_radius(n);
    let radius_max_dev = vertices
        .iter()
        .map(|v| (v.norm() - radius).abs())
        .fold(0.0, f64::max);
    let trace_max_dev = matrices
        .iter()
        .map(|m| (m.trace() - 1.0).abs())
        .fold(0.0, f64::max);

    let f_values = matrices
        .iter()
        .map(|m| family_value(m, power))
        .collect::<Result<Vec<_>>>()?;
    let f_spread = f_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - f_values.iter().copied().fold(f64::INFINITY, f64::min);
    let f0_max_dev =
        f0.map(|t| f_values.iter().map(|g| (g - t).abs()).fold(0.0, f64::max));

    let spectra: Vec<Vec<f64>> = matrices.iter().map(|m| m.eigenvalues()).collect();
    let spectra_from_traces: Vec<Vec<f64>> = matrices
        .iter()
        .map(|m| {
            TracePowerProfile::of(m)
                .and_then(|p| spectrum_from_traces(&p))
                .unwrap_or_else(|_| vec![f64::NAN; n])
        })
        .collect();
    let spectral_route_max_dev = spectra
        .iter()
        .zip(&spectra_from_traces)
        .map(|(a, b)| {
            let d = spectral_distance(a, b);
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
        .fold(0.0, f64::max);
    let spectral_spread = max_pairwise_spectral(&spectra);
    let psd_flags: Vec<bool> = spectra
        .iter()
        .map(|s| s.last().copied().unwrap_or(0.0) >= PSD_THRESHOLD)
        .collect();
    let purity_defects = matrices
        .iter()
        .map(|m| purity_defect(m))
        .collect::<Result<Vec<_>>>()?;
    let all_pure = matrices.iter().all(|m| purity_check(m, tol));
    let triple_sum = triple_product_sum(matrices);
    let triple_sum_dev = all_pure.then(|| (triple_sum - nf.powi(4)).abs());

    let count = matrices.len();
    let rebuilt = last_vertex(&matrices[..count - 1])?;
    let last_vertex_defect = max_abs_diff_c(&rebuilt, &matrices[count - 1]);
    let last_vertex_purity_defect = purity_defect(&rebuilt)?;
    let last_element_purity_defect = purity_defects[count - 1];

    let geometry = gram_max_dev <= tol
        && bloch_dot_max_dev <= tol
        && radius_max_dev <= tol
        && trace_max_dev <= tol;
    let values = f_spread <= tol && f0_max_dev.is_none_or(|d| d <= tol);
    let spectra_routes = spectral_route_max_dev <= tol.max(1e-9);
    let closure = last_vertex_defect <= tol;
    let triple_ok = triple_sum_dev.map(|d| d <= tol.max(1e-8));
    let unitary_equivalent = spectral_spread <= tol;
    let psd_all = psd_flags.iter().all(|&f| f);
    // The power-sum route loses half the digits at degenerate spectra, so it
    // is reported but does not decide the verdict.
    let verdict = geometry && values && closure && triple_ok.unwrap_or(true);

    Ok(VerificationReport {
        dim: n,
        count,
        power,
        f0,
        tol,
        gram_max_dev,
        bloch_dot_max_dev,
        radius_max_dev,
        trace_max_dev,
        f_values,
        f_spread,
        f0_max_dev,
        spectra,
        spectra_from_traces,
        spectral_route_max_dev,
        spectral_spread,
        psd_flags,
        purity_defects,
        all_pure,
        triple_sum,
        triple_sum_dev,
        last_vertex_defect,
        last_vertex_purity_defect,
        last_element_purity_defect,
        flags: VerdictFlags {
            geometry,
            values,
            spectra_routes,
            closure,
            triple_sum: triple_ok,
            unitary_equivalent,
            psd_all,
            verdict,
        },
    })
}

/// Verifies an optimizer result from its stored matrices, ignoring the
/// stored vertices.
pub fn verify_family(result: &PovmFamilyResult, tol: f64) -> Result<VerificationReport> {
    verify_matrices(&result.matrices, result.power, Some(result.f0), tol)
}

/// Same report built from Bloch vertices: the geometry comes from vector
/// arithmetic, the matrices only from `from_bloch`.
pub fn verify_vertices(
    vertices: &[BlochVector],
    power: usize,
    f0: Option<f64>,
    tol: f64,
) -> Result<VerificationReport> {
    let n = vertices
        .first()
        .map(|v| v.dim)
        .ok_or_else(|| Error::Malformed("no vertices".into()))?;
    let basis = build_basis(n)?;
    let matrices = vertices
        .iter()
        .map(|v| from_bloch(v, &basis))
        .collect::<Result<Vec<_>>>()?;
    let mut report = verify_matrices(&matrices, power, f0, tol)?;
    let nf = n as f64;
    let dot = -1.0 / (2.0 * nf * (nf + 1.0));
    let mut dev = 0.0f64;
    let mut gram = 0.0f64;
    for j in 0..vertices.len() {
        for k in j + 1..vertices.len() {
            let d = vertices[j].dot(&vertices[k]);
            dev = dev.max((d - dot).abs());
            // Tr(ρ_j ρ_k) = 1/n + 2 v_j·v_k
            gram = gram.max((1.0 / nf + 2.0 * d - 1.0 / (nf + 1.0)).abs());
        }
    }
    report.bloch_dot_max_dev = dev;
    report.gram_max_dev = gram;
    let radius = pure_radius(n);
    report.radius_max_dev = vertices
        .iter()
        .map(|v| (v.norm() - radius).abs())
        .fold(0.0, f64::max);
    report.flags.geometry = report.gram_max_dev <= tol
        && report.bloch_dot_max_dev <= tol
        && report.radius_max_dev <= tol
        && report.trace_max_dev <= tol;
    report.flags.verdict = report.flags.geometry
        && report.flags.values
        && report.flags.closure
        && report.flags.triple_sum.unwrap_or(true);
    Ok(report)
}

/// Hermitian matrices are unitarily equivalent iff their sorted spectra
/// agree; true when every pair agrees within `tol`.
pub fn unitary_equivalence_class(matrices: &[HermitianMatrix], tol: f64) -> bool {
    let Some(first) = matrices.first() else {
        return true;
    };
    if matrices.iter().any(|m| m.dim() != first.dim()) {
        return false;
    }
    let spectra: Vec<Vec<f64>> = matrices.iter().map(|m| m.eigenvalues()).collect();
    max_pairwise_spectral(&spectra) <= tol
}
