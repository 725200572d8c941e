//! Steady-state simulation of electromagnetically induced transparency in a
//! five-level cascade atom (5S₁/₂ → 5P₃/₂ → 5D₅/₂ of cold ⁸⁵Rb, with the three
//! F″ hyperfine components of the upper level resolved).
//!
//! The pipeline is:
//!
//! 1. [`model`]: level scheme and drives → Hamiltonian, decay dissipators and
//!    the 25 × 25 Liouvillian.
//! 2. [`solver`]: unique steady state by a trace-constrained LU solve, plus
//!    an RK4 propagator used as an independent check.
//! 3. [`spectrum`]: probe-detuning scans of ρ₂₁, the weak-probe closed form,
//!    dressed-state positions, peak/dip analysis, broadening and sweeps.

pub mod matrix;
pub mod model;
pub mod solver;
pub mod spectrum;

pub use num_complex::Complex64;

pub use matrix::ComplexMatrix;
pub use model::{
    apply_lindblad, build_hamiltonian, build_liouvillian, DecayChannel, DriveParams, LevelScheme, Liouvillian,
    ModelError, Strengths,
};
pub use solver::{residual, steady_state, time_evolve, DensityMatrix, SolveMethod, SolverError};
pub use spectrum::{
    broaden, dressed_state_frequencies, find_peaks_dips, scan_probe, slope_profile, sweep_coupling,
    weak_probe_susceptibility, PeakReport, ScanWindow, Spectrum, SpectrumError, SpectrumMeta,
};
