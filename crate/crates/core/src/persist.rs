//! JSON result files, CSV scan summaries and run manifests.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every finite `f64` exactly. Matrices are flat row-major lists of
//! `[re, im]` pairs.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bloch::{BlochVector, GellMannBasis, HermitianMatrix};
use crate::knaster::{PovmFamilyResult, ScanEntry};
use crate::weyl::{SicCandidate, SicSource};
use crate::{Error, RMatrix, Result, C64};

/// `serde_json` formatter with fixed 17-significant-digit floats.
#[derive(Debug, Clone, Copy, Default)]
pub struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }
}

/// Serializes with [`SigDigits`], one trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Malformed(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.display().to_string(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json_string(value)?)
}

/// Byte offset of a 1-based line/column position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len();
    }
    text.len()
}

/// Parses JSON text; errors carry the byte offset of the failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, path: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_string(),
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_json(&text, &path.display().to_string())
}

/// Reproducibility record embedded in every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config: serde_json::Value,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub version: String,
    pub wall_time: f64,
    /// SHA-256 of tool name, version, OS and architecture.
    pub env_digest: String,
    #[serde(default)]
    pub schedule: Option<String>,
    #[serde(default = "default_true")]
    pub deterministic: bool,
}

fn default_true() -> bool {
    true
}

pub fn env_digest() -> String {
    let mut h = Sha256::new();
    h.update(env!("CARGO_PKG_NAME"));
    h.update([0]);
    h.update(env!("CARGO_PKG_VERSION"));
    h.update([0]);
    h.update(std::env::consts::OS);
    h.update([0]);
    h.update(std::env::consts::ARCH);
    hex::encode(h.finalize())
}

impl RunManifest {
    pub fn new(command_line: Vec<String>, config: serde_json::Value, seed: u64) -> Self {
        Self {
            command_line,
            config,
            seed,
            tolerances: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time: 0.0,
            env_digest: env_digest(),
            schedule: None,
            deterministic: true,
        }
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerances.insert(name.to_string(), value);
        self
    }
}

pub type ComplexPairs = Vec<[f64; 2]>;

/// Row-major `[re, im]` pairs.
pub fn matrix_to_pairs(m: &HermitianMatrix) -> ComplexPairs {
    let n = m.dim();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn matrix_from_pairs(pairs: &[[f64; 2]]) -> Result<HermitianMatrix> {
    let n = (pairs.len() as f64).sqrt().round() as usize;
    if n * n != pairs.len() || n == 0 {
        return Err(Error::Malformed(format!(
            "{} entries do not form a square matrix",
            pairs.len()
        )));
    }
    HermitianMatrix::new(crate::CMatrix::from_fn(n, n, |i, j| {
        let [re, im] = pairs[i * n + j];
        C64::new(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFlags {
    pub converged: bool,
    pub psd: Vec<bool>,
    pub psd_all: bool,
    #[serde(default)]
    pub pure: Vec<bool>,
}

/// On-disk form of a family result or a SIC candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub manifest: RunManifest,
    pub dim: usize,
    pub power: usize,
    pub f0: f64,
    pub residual_sum: f64,
    #[serde(default)]
    pub per_vertex_residuals: Vec<f64>,
    #[serde(default)]
    pub iterations: usize,
    #[serde(default)]
    pub restarts: usize,
    #[serde(default)]
    pub wall_time: f64,
    pub source: SicSource,
    pub vertices: Vec<Vec<f64>>,
    pub matrices: Vec<ComplexPairs>,
    pub spectra: Vec<Vec<f64>>,
    pub flags: ResultFlags,
    /// Orientation `R` of the reference simplex, row-major rows.
    #[serde(default)]
    pub rotation: Option<Vec<Vec<f64>>>,
}

fn rows_of(r: &RMatrix) -> Vec<Vec<f64>> {
    r.row_iter().map(|row| row.iter().copied().collect()).collect()
}

pub fn rotation_from_rows(rows: &[Vec<f64>]) -> Result<RMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Malformed("rotation is not square".into()));
    }
    Ok(RMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl ResultFile {
    pub fn from_family(r: &PovmFamilyResult, manifest: RunManifest) -> Self {
        Self {
            manifest,
            dim: r.dim,
            power: r.power,
            f0: r.f0,
            residual_sum: r.residual_sum,
            per_vertex_residuals: r.per_vertex_residuals.clone(),
            iterations: r.iterations,
            restarts: r.restarts,
            wall_time: r.wall_time,
            source: SicSource::Optimized,
            vertices: r.vertices.iter().map(|v| v.coords.iter().copied().collect()).collect(),
            matrices: r.matrices.iter().map(matrix_to_pairs).collect(),
            spectra: r.spectra.clone(),
            flags: ResultFlags {
                converged: r.converged,
                psd: r.psd_flags.clone(),
                psd_all: r.psd_all(),
                pure: r
                    .matrices
                    .iter()
                    .map(|m| crate::tracepoly::purity_check(m, crate::tracepoly::DEFAULT_PURITY_TOL))
                    .collect(),
            },
            rotation: Some(rows_of(r.rotation.matrix())),
        }
    }

    /// A SIC written in the same schema, at the pure-state cubic value.
    pub fn from_sic(c: &SicCandidate, ctx: &crate::knaster::OptContext, manifest: RunManifest) -> Result<Self> {
        let family = PovmFamilyResult::from_sic(ctx, c)?;
        let mut file = Self::from_family(&family, manifest);
        file.source = c.source;
        Ok(file)
    }

    pub fn hermitian_matrices(&self) -> Result<Vec<HermitianMatrix>> {
        self.matrices.iter().map(|p| matrix_from_pairs(p)).collect()
    }

    pub fn bloch_vertices(&self) -> Result<Vec<BlochVector>> {
        self.vertices
            .iter()
            .map(|v| BlochVector::new(self.dim, crate::RVector::from_column_slice(v)))
            .collect()
    }
}

/// Basis dump: `{"dim": n, "matrices": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub dim: usize,
    pub matrices: Vec<ComplexPairs>,
}

impl BasisFile {
    pub fn of(basis: &GellMannBasis) -> Self {
        Self {
            dim: basis.dim(),
            matrices: basis.matrices().iter().map(matrix_to_pairs).collect(),
        }
    }
}

/// External fiducial: `{"dim": n, "fiducial": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiducialFile {
    pub dim: usize,
    pub fiducial: ComplexPairs,
}

impl FiducialFile {
    pub fn vector(&self) -> Result<Vec<C64>> {
        if self.fiducial.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: self.fiducial.len(),
            });
        }
        Ok(self.fiducial.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }
}

pub const CSV_HEADER: &str = "f0,residual_sum,iterations,converged,spectra_spread,psd_all";

pub fn csv_row(e: &ScanEntry) -> String {
    let r = &e.result;
    format!(
        "{:.16e},{:.16e},{},{},{:.16e},{}",
        e.f0,
        r.residual_sum,
        r.iterations,
        r.converged,
        r.spectra_spread(),
        r.psd_all()
    )
}

/// Summary CSV in the order given.
pub fn scan_csv(entries: &[ScanEntry]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for e in entries {
        out.push_str(&csv_row(e));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub f0: f64,
    pub residual_sum: f64,
    pub iterations: usize,
    pub converged: bool,
    pub spectra_spread: f64,
    pub psd_all: bool,
}

pub fn parse_scan_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Malformed(format!(
                "unexpected CSV header {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let bad = |line: &str| Error::Malformed(format!("bad CSV row {line:?}"));
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            Ok(CsvRow {
                f0: f[0].parse().map_err(|_| bad(line))?,
                residual_sum: f[1].parse().map_err(|_| bad(line))?,
                iterations: f[2].parse().map_err(|_| bad(line))?,
                converged: f[3].parse().map_err(|_| bad(line))?,
                spectra_spread: f[4].parse().map_err(|_| bad(line))?,
                psd_all: f[5].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}
