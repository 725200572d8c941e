//! Fixed workloads shared by the benchmarks.

use eit_core::{DriveParams, LevelScheme, ScanWindow};

pub const GAMMA: f64 = 0.97;

/// Five-level scheme with Ω_c = 4γ, Δ_c = −9γ at probe detuning `delta_p`.
pub fn reference_point(delta_p: f64) -> (LevelScheme, DriveParams) {
    (LevelScheme::rb85(), DriveParams::new(0.01 * GAMMA, 4.0 * GAMMA, delta_p, -9.0 * GAMMA))
}

pub fn reference_window(n_points: usize) -> ScanWindow {
    ScanWindow::symmetric(40.0 * GAMMA, n_points).expect("valid window")
}
