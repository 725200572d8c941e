//! Probe spectra: detuning scans of ρ₂₁, the weak-probe closed form,
//! dressed-state positions, peak analysis, Gaussian broadening and coupling
//! sweeps.

mod broaden;
mod peaks;
mod sweep;

pub use broaden::{broaden, Broadening, Kernel};
pub use peaks::{find_peaks_dips, Dip, Extremum, PeakReport, DEFAULT_PROMINENCE_FLOOR};
pub use sweep::{sweep_coupling, CouplingSweep, SweepEntry, SweepOptions, SweepSummaryRow};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{build_liouvillian, DriveParams, LevelScheme, ModelError};
use crate::solver::{steady_state, SolverError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("at delta_p = {delta_p} MHz: {source}")]
    Solver { delta_p: f64, source: SolverError },
    #[error("invalid scan window: {0}")]
    InvalidWindow(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("no peak clears the prominence floor")]
    EmptyReport,
    #[error("broadening FWHM {fwhm} MHz is below twice the grid spacing {spacing} MHz")]
    GridTooCoarse { fwhm: f64, spacing: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SpectrumError {
    /// True for failures of the numerical solve (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, SpectrumError::Solver { .. })
    }
}

/// Uniform probe-detuning grid (MHz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanWindow {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl ScanWindow {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self, SpectrumError> {
        let w = Self { min, max, n_points };
        w.validate()?;
        Ok(w)
    }

    /// `[-half_width, +half_width]`
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self, SpectrumError> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn validate(&self) -> Result<(), SpectrumError> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(SpectrumError::InvalidWindow("bounds must be finite".into()));
        }
        if self.min >= self.max {
            return Err(SpectrumError::InvalidWindow(format!("dp_min ({}) must be < dp_max ({})", self.min, self.max)));
        }
        if self.n_points < 2 {
            return Err(SpectrumError::InvalidWindow(format!("n_points must be >= 2, got {}", self.n_points)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|i| if i + 1 == self.n_points { self.max } else { self.min + i as f64 * h }).collect()
    }
}

/// Parameters a spectrum was computed from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumMeta {
    pub scheme: LevelScheme,
    /// Drive parameters; `delta_p` is the scan variable and is left at zero.
    pub drives: DriveParams,
    pub broadening: Option<Broadening>,
}

/// Absorption (Im ρ₂₁) and dispersion (Re ρ₂₁) on a uniform Δ_p grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Vec<f64>,
    absorption: Vec<f64>,
    dispersion: Vec<f64>,
    meta: SpectrumMeta,
}

impl Spectrum {
    /// Checks equal lengths (≥ 2) and a strictly increasing uniform grid.
    pub fn new(
        grid: Vec<f64>,
        absorption: Vec<f64>,
        dispersion: Vec<f64>,
        meta: SpectrumMeta,
    ) -> Result<Self, SpectrumError> {
        let n = grid.len();
        if n < 2 {
            return Err(SpectrumError::InvalidSpectrum(format!("need at least 2 points, got {n}")));
        }
        if absorption.len() != n || dispersion.len() != n {
            return Err(SpectrumError::InvalidSpectrum(format!(
                "length mismatch: grid {n}, absorption {}, dispersion {}",
                absorption.len(),
                dispersion.len()
            )));
        }
        if grid.iter().chain(&absorption).chain(&dispersion).any(|v| !v.is_finite()) {
            return Err(SpectrumError::InvalidSpectrum("non-finite value".into()));
        }
        let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
        if h <= 0.0 {
            return Err(SpectrumError::InvalidSpectrum("grid must be strictly increasing".into()));
        }
        for w in grid.windows(2) {
            let step = w[1] - w[0];
            if step <= 0.0 {
                return Err(SpectrumError::InvalidSpectrum("grid must be strictly increasing".into()));
            }
            if (step - h).abs() > 1e-6 * h {
                return Err(SpectrumError::InvalidSpectrum(format!("grid is not uniform: step {step} vs mean {h}")));
            }
        }
        Ok(Self { grid, absorption, dispersion, meta })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn absorption(&self) -> &[f64] {
        &self.absorption
    }

    pub fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    pub fn meta(&self) -> &SpectrumMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.grid[self.len() - 1] - self.grid[0]) / (self.len() - 1) as f64
    }

    /// Trapezoidal integral of the absorption over the grid.
    pub fn absorption_integral(&self) -> f64 {
        let h = self.spacing();
        self.absorption.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
    }

    /// Grid index of the largest absorption (leftmost on ties).
    pub fn argmax_absorption(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.absorption.iter().enumerate() {
            if v > self.absorption[best] {
                best = i;
            }
        }
        best
    }

    pub(crate) fn with_data(&self, absorption: Vec<f64>, dispersion: Vec<f64>, meta: SpectrumMeta) -> Self {
        Self { grid: self.grid.clone(), absorption, dispersion, meta }
    }
}

/// Steady-state ρ₂₁ at each Δ_p of `window`. Grid points are solved in
/// parallel on the current rayon pool; results are merged in grid order.
pub fn scan_probe(
    scheme: &LevelScheme,
    drives_base: &DriveParams,
    window: &ScanWindow,
) -> Result<Spectrum, SpectrumError> {
    window.validate()?;
    let base = drives_base.with_delta_p(0.0);
    // Fail fast on parameter errors before fanning out.
    build_liouvillian(scheme, &base)?;

    let grid = window.grid();
    let points: Vec<Result<C64, SpectrumError>> = grid
        .par_iter()
        .map(|&dp| {
            let l = build_liouvillian(scheme, &base.with_delta_p(dp))?;
            let rho = steady_state(&l).map_err(|source| SpectrumError::Solver { delta_p: dp, source })?;
            Ok(rho.rho21())
        })
        .collect();

    let mut absorption = Vec::with_capacity(grid.len());
    let mut dispersion = Vec::with_capacity(grid.len());
    for p in points {
        let rho21 = p?;
        absorption.push(rho21.im);
        dispersion.push(rho21.re);
    }
    Spectrum::new(grid, absorption, dispersion, SpectrumMeta { scheme: *scheme, drives: base, broadening: None })
}

/// Offsets `s_k` of levels 3, 4, 5 in the two-photon denominators.
fn upper_offsets(scheme: &LevelScheme) -> [f64; 3] {
    [0.0, scheme.delta1, -scheme.delta2]
}

/// First-order (weak-probe) steady-state ρ₂₁:
///
/// ```text
/// ρ₂₁ = iΩ_p / [γ₂₁/2 − iΔ_p + Σ_k (a_k Ω_c)² / (γ/2 − i(Δ_p + Δ_c + s_k))]
/// ```
///
/// with `s = (0, +δ₁, −δ₂)` for levels 3, 4, 5. Obtained by keeping ρ₁₁ = 1
/// and solving the ρ₂₁ and ρ_k1 equations to first order in Ω_p.
pub fn weak_probe_susceptibility(scheme: &LevelScheme, drives: &DriveParams) -> C64 {
    let i = C64::new(0.0, 1.0);
    let mut denom = C64::new(scheme.gamma_21 / 2.0, -drives.delta_p);
    for (a, s) in scheme.strengths.as_array().into_iter().zip(upper_offsets(scheme)) {
        let coupling = a * drives.omega_c;
        if coupling == 0.0 {
            continue;
        }
        let two_photon = C64::new(scheme.gamma_upper / 2.0, -(drives.delta_p + drives.delta_c + s));
        denom += coupling * coupling / two_photon;
    }
    i * drives.omega_p / denom
}

/// Eigenvalues (ascending, MHz) of the excited-manifold block
///
/// ```text
/// diag(0, −Δ_c, −Δ_c − δ₁, −Δ_c + δ₂)  with couplings −a_k Ω_c to the first row/column
/// ```
///
/// Absorption peaks sit at Δ_p ≈ these values; at Ω_c = 0 they reduce to
/// the bare resonances Δ_p = 0 and Δ_p = −Δ_c − s_k.
pub fn dressed_state_frequencies(scheme: &LevelScheme, drives: &DriveParams) -> Vec<f64> {
    let offsets = upper_offsets(scheme);
    let strengths = scheme.strengths.as_array();
    let mut m = DMatrix::<f64>::zeros(4, 4);
    for k in 0..3 {
        m[(k + 1, k + 1)] = -drives.delta_c - offsets[k];
        m[(0, k + 1)] = -strengths[k] * drives.omega_c;
        m[(k + 1, 0)] = -strengths[k] * drives.omega_c;
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// dRe(ρ₂₁)/dΔ_p by central differences, one-sided at the endpoints.
pub fn slope_profile(spectrum: &Spectrum) -> Vec<f64> {
    let y = spectrum.dispersion();
    let h = spectrum.spacing();
    let n = y.len();
    (0..n)
        .map(|i| match i {
            0 => (y[1] - y[0]) / h,
            _ if i == n - 1 => (y[n - 1] - y[n - 2]) / h,
            _ => (y[i + 1] - y[i - 1]) / (2.0 * h),
        })
        .collect()
}
