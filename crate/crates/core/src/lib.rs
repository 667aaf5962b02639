//! Regular-simplex geometry on the generalized Bloch sphere.
//!
//! The crate embeds unit-trace Hermitian matrices into `R^{n²-1}` through the
//! generalized Gell-Mann basis, builds regular simplices and the stabilizer
//! machinery around them, and searches for orientations of a regular
//! `(n²-1)`-simplex whose vertices share a common trace-power value. A
//! SIC-POVM is the special orientation where every vertex is a pure state.
//!
//! Module map:
//!
//! * [`bloch`]: Gell-Mann basis, Bloch maps, structure tensor, adjoint rotations.
//! * [`simplex`]: regular simplex recursion, stabilizer rotations, nested sphere sections.
//! * [`tracepoly`]: cubic form, trace powers, gradients, purity, spectra from power sums.
//! * [`weyl`]: Weyl-Heisenberg displacements, fiducial orbits, seed SICs.
//! * [`knaster`]: rotation-manifold Levenberg-Marquardt, continuation scans,
//!   the continuity circle and the `S¹` equal-value solver.
//! * [`certify`]: independent verification reports.
//! * [`persist`] and [`cli`]: file formats and the command-line front end.

pub mod bloch;
pub mod certify;
pub mod cli;
mod error;
pub mod knaster;
pub mod linalg;
pub mod persist;
pub mod random;
pub mod rotation;
pub mod simplex;
pub mod tracepoly;
pub mod weyl;

pub use bloch::{
    adjoint_rotation, build_basis, from_bloch, structure_tensor, to_bloch, BlochVector,
    GellMannBasis, HermitianMatrix, StructureTensor,
};
pub use certify::{unitary_equivalence_class, verify_family, VerificationReport};
pub use error::{Error, Result};
pub use knaster::{
    circle_profile, knaster_s1, last_vertex, objective, optimize, scan_f0, CircleProfile,
    OptContext, OptimizerConfig, PovmFamilyResult, ScanEntry, ScanSchedule,
};
pub use rotation::RotationState;
pub use simplex::{
    j_membership, reduce_to_sphere, regular_simplex, stabilizer_rotation, Simplex, SubspaceFrame,
};
pub use tracepoly::{
    f_cubic, grad_f_cubic, grad_trace_power, purity_check, spectrum_from_traces, trace_power,
    TracePowerProfile,
};
pub use weyl::{displacement_ops, fiducial_orbit, seed_sic, verify_sic, SicCandidate, SicSource};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVector = nalgebra::DVector<f64>;
