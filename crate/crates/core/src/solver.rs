//! Steady state of the master equation and a fixed-step propagator used to
//! cross-check it.

use std::fmt;

use log::warn;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::matrix::{ComplexMatrix, LuDecomposition};
use crate::model::{DriveParams, LevelScheme, Liouvillian};

/// Condition numbers above this mark the constrained system as singular.
pub const MAX_CONDITION: f64 = 1e14;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = -1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(
        "steady-state system is singular (condition estimate {condition:.3e}); the scheme has no unique steady state"
    )]
    SingularSystem { condition: f64 },
    #[error("integration step increased the state norm by {growth:.3e}x; reduce dt")]
    StepTooLarge { growth: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: Liouvillian acts on {expected} levels, state has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// How a [`DensityMatrix`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    /// Dense LU solve with one equation replaced by `tr ρ = 1`.
    TraceReplacement,
    /// Fixed-step fourth-order Runge–Kutta propagation.
    RungeKutta4,
    /// Supplied by the caller.
    Given,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveMethod::TraceReplacement => "trace-replacement",
            SolveMethod::RungeKutta4 => "rk4",
            SolveMethod::Given => "given",
        };
        f.write_str(s)
    }
}

/// Density matrix ρ with solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
    residual: Option<f64>,
    method: SolveMethod,
}

/// Deviations of a state from the physical density-matrix invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub hermiticity_error: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl Physicality {
    pub fn is_physical(&self) -> bool {
        self.hermiticity_error <= HERMITICITY_TOL
            && self.trace_error <= TRACE_TOL
            && self.min_eigenvalue >= POSITIVITY_TOL
    }
}

impl DensityMatrix {
    /// Wraps a caller-supplied matrix without checking invariants; see
    /// [`DensityMatrix::physicality`].
    pub fn new(rho: ComplexMatrix) -> Self {
        Self { rho, residual: None, method: SolveMethod::Given }
    }

    /// Pure state `|level⟩⟨level|` (1-based level).
    pub fn pure(dim: usize, level: usize) -> Self {
        assert!((1..=dim).contains(&level), "level {level} out of range 1..={dim}");
        Self::new(ComplexMatrix::basis(dim, level - 1, level - 1))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    /// Element ρ_ij with 1-based level indices.
    pub fn element(&self, i: usize, j: usize) -> C64 {
        self.rho[(i - 1, j - 1)]
    }

    /// Probe coherence ρ₂₁: Im is absorption, Re is dispersion.
    pub fn rho21(&self) -> C64 {
        self.element(2, 1)
    }

    pub fn population(&self, level: usize) -> f64 {
        self.element(level, level).re
    }

    /// `‖L·vec(ρ)‖∞` recorded by the producing solver, if any.
    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    pub fn method(&self) -> SolveMethod {
        self.method
    }

    pub fn physicality(&self) -> Physicality {
        Physicality {
            hermiticity_error: self.rho.hermiticity_error(),
            trace_error: (self.rho.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: self.rho.hermitian_eigenvalues().first().copied().unwrap_or(0.0),
        }
    }
}

/// `‖L·vec(ρ)‖∞`
pub fn residual(liouvillian: &Liouvillian, rho: &DensityMatrix) -> f64 {
    assert_eq!(liouvillian.levels(), rho.matrix().dim(), "residual: dimension mismatch");
    liouvillian.apply_vec(&rho.matrix().vectorize()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unique stationary state of `vec(ρ̇) = L·vec(ρ)`.
///
/// The equation for ρ₁₁ (row 0 of `L`) is replaced by `tr ρ = 1` and the
/// resulting dense system is solved by LU with partial pivoting.
pub fn steady_state(liouvillian: &Liouvillian) -> Result<DensityMatrix, SolverError> {
    let n = liouvillian.levels();
    let nn = n * n;
    let mut a = liouvillian.matrix().clone();
    for c in 0..nn {
        a[(0, c)] = C64::new(0.0, 0.0);
    }
    for i in 0..n {
        a[(0, i + n * i)] = C64::new(1.0, 0.0);
    }
    let mut rhs = vec![C64::new(0.0, 0.0); nn];
    rhs[0] = C64::new(1.0, 0.0);

    let lu = LuDecomposition::new(&a).ok_or(SolverError::SingularSystem { condition: f64::INFINITY })?;
    let condition = lu.condition_number(&a);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(SolverError::SingularSystem { condition });
    }
    let x = lu.solve(&rhs);

    let rho = ComplexMatrix::unvectorize(&x);
    let mut state = DensityMatrix { rho, residual: None, method: SolveMethod::TraceReplacement };
    state.residual = Some(residual(liouvillian, &state));

    let report = state.physicality();
    if report.min_eigenvalue < POSITIVITY_TOL {
        warn!(
            "steady state has eigenvalue {:.3e} below positivity tolerance (drives {:?})",
            report.min_eigenvalue,
            liouvillian.drives()
        );
    }
    Ok(state)
}

/// Default RK4 step: `0.01 / max(γ₂₁, γ, Ω_c, |Δ_c| + δ₁)`.
pub fn default_time_step(scheme: &LevelScheme, drives: &DriveParams) -> f64 {
    let fastest = [scheme.gamma_21, scheme.gamma_upper, drives.omega_c, drives.delta_c.abs() + scheme.delta1]
        .into_iter()
        .fold(0.0, f64::max);
    0.01 / fastest
}

/// Default horizon: `50 / min(γ₂₁, γ)`.
pub fn default_horizon(scheme: &LevelScheme) -> f64 {
    50.0 / scheme.gamma_21.min(scheme.gamma_upper)
}

/// Integrates `vec(ρ̇) = L·vec(ρ)` from `rho0` to `t_final` with classical
/// RK4 at fixed step `dt` (the last step is shortened to land on `t_final`).
pub fn time_evolve(
    liouvillian: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix, SolverError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if !(t_final >= dt && t_final.is_finite()) {
        return Err(SolverError::InvalidArgument(format!("t_final must be >= dt, got t_final = {t_final}, dt = {dt}")));
    }
    let n = liouvillian.levels();
    if rho0.matrix().dim() != n {
        return Err(SolverError::DimensionMismatch { expected: n, got: rho0.matrix().dim() });
    }

    let steps = (t_final / dt).floor() as usize;
    let remainder = t_final - steps as f64 * dt;

    // For a linear autonomous system one RK4 step is v ← P(h)·v with
    // P(h) = I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24.
    let full = rk4_propagator(liouvillian.matrix(), dt);
    let mut v = rho0.matrix().vectorize();
    let mut next = vec![C64::new(0.0, 0.0); v.len()];

    let mut advance = |prop: &ComplexMatrix, v: &mut Vec<C64>| -> Result<(), SolverError> {
        let before = max_norm(v);
        prop.mul_vec_into(v, &mut next);
        let after = max_norm(&next);
        if !after.is_finite() || (before > 0.0 && after > 10.0 * before) {
            return Err(SolverError::StepTooLarge {
                growth: if before > 0.0 { after / before } else { f64::INFINITY },
            });
        }
        std::mem::swap(v, &mut next);
        Ok(())
    };

    for _ in 0..steps {
        advance(&full, &mut v)?;
    }
    if remainder > 1e-12 * dt {
        advance(&rk4_propagator(liouvillian.matrix(), remainder), &mut v)?;
    }

    let mut state =
        DensityMatrix { rho: ComplexMatrix::unvectorize(&v), residual: None, method: SolveMethod::RungeKutta4 };
    state.residual = Some(residual(liouvillian, &state));
    Ok(state)
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rk4_propagator(l: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let hl = l.scale(C64::new(h, 0.0));
    let mut term = ComplexMatrix::identity(l.dim());
    let mut sum = term.clone();
    for k in 1..=4 {
        term = term.matmul(&hl).scale(C64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_liouvillian, DriveParams, LevelScheme};

    fn reference_point() -> (LevelScheme, DriveParams) {
        let g = 0.97;
        (LevelScheme::rb85(), DriveParams::new(0.01 * g, 4.0 * g, 0.0, -9.0 * g))
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let l = build_liouvillian(&LevelScheme::rb85(), &DriveParams::new(0.0, 0.0, 0.3, -1.0)).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::basis(5, 0, 0)) < 1e-12);
        assert_eq!(rho.method(), SolveMethod::TraceReplacement);
    }

    #[test]
    fn zero_decay_is_singular() {
        let scheme = LevelScheme { gamma_upper: 0.0, gamma_21: 0.0, ..LevelScheme::rb85() };
        for drives in [DriveParams::new(0.5, 2.0, 0.1, -1.0), DriveParams::new(0.0, 0.0, 0.0, 0.0)] {
            let l = build_liouvillian(&scheme, &drives).unwrap();
            assert!(matches!(steady_state(&l), Err(SolverError::SingularSystem { .. })));
        }
    }

    #[test]
    fn steady_state_is_stationary_and_physical() {
        let (scheme, drives) = reference_point();
        let l = build_liouvillian(&scheme, &drives).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(rho.residual().unwrap() < 1e-10);
        assert!(rho.physicality().is_physical(), "{:?}", rho.physicality());
    }

    #[test]
    fn residual_of_driven_ground_state() {
        let (scheme, drives) = reference_point();
        let l = build_liouvillian(&scheme, &drives).unwrap();
        let ground = DensityMatrix::pure(5, 1);
        let r = residual(&l, &ground);
        assert!(r > 0.0);
        for s in [0.5, 2.0, 10.0] {
            let rs = residual(&l.scaled(s), &ground);
            assert!((rs - s * r).abs() <= 1e-14 * rs.max(1.0));
        }
    }

    #[test]
    fn evolve_static_state() {
        let scheme = LevelScheme { gamma_upper: 0.0, gamma_21: 0.0, ..LevelScheme::rb85() };
        let l = build_liouvillian(&scheme, &DriveParams::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        let rho0 = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.2, 0.1, 0.1, 0.1]));
        let out = time_evolve(&l, &rho0, 3.0, 0.01).unwrap();
        assert!(out.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
    }

    #[test]
    fn evolve_exponential_decay() {
        let g21 = 6.07;
        let scheme = LevelScheme { gamma_upper: 0.97, gamma_21: g21, ..LevelScheme::rb85() };
        let l = build_liouvillian(&scheme, &DriveParams::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        let t = 0.4;
        let out = time_evolve(&l, &DensityMatrix::pure(5, 2), t, 1e-3 / g21).unwrap();
        assert!((out.population(2) - (-g21 * t).exp()).abs() < 1e-6);
        assert!((out.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn evolve_rejects_bad_steps() {
        let (scheme, drives) = reference_point();
        let l = build_liouvillian(&scheme, &drives).unwrap();
        let rho0 = DensityMatrix::pure(5, 1);
        assert!(matches!(time_evolve(&l, &rho0, 1.0, 0.0), Err(SolverError::InvalidArgument(_))));
        assert!(matches!(time_evolve(&l, &rho0, 0.01, 0.1), Err(SolverError::InvalidArgument(_))));
        // |hλ| far outside the RK4 stability region
        assert!(matches!(time_evolve(&l, &rho0, 50.0, 5.0), Err(SolverError::StepTooLarge { .. })));
    }

    #[test]
    fn default_step_and_horizon() {
        let (scheme, drives) = reference_point();
        let dt = default_time_step(&scheme, &drives);
        assert!((dt - 0.01 / (9.0 * 0.97 + 9.0)).abs() < 1e-15);
        assert!((default_horizon(&scheme) - 50.0 / 0.97).abs() < 1e-12);
    }
}
