//! Steady-state solver against long-horizon propagation and symmetry
//! properties of the master equation.

use eit_core::solver::{default_horizon, default_time_step};
use eit_core::{
    build_liouvillian, steady_state, time_evolve, weak_probe_susceptibility, DensityMatrix, DriveParams, LevelScheme,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const GAMMA: f64 = 0.97;

fn reference_drives() -> DriveParams {
    DriveParams::new(0.01 * GAMMA, 4.0 * GAMMA, 0.0, -9.0 * GAMMA)
}

#[test]
fn propagation_converges_to_reference_steady_state() {
    let scheme = LevelScheme::rb85();
    for dp in [-6.5, 0.0, 4.0] {
        let drives = reference_drives().with_delta_p(dp);
        let l = build_liouvillian(&scheme, &drives).unwrap();
        let ss = steady_state(&l).unwrap();
        let t = 50.0 / scheme.gamma_upper;
        let evolved = time_evolve(&l, &DensityMatrix::pure(5, 1), t, default_time_step(&scheme, &drives)).unwrap();
        let diff = ss.matrix().max_abs_diff(evolved.matrix());
        assert!(diff < 1e-8, "dp = {dp}: deviation {diff:e}");
        assert!((evolved.matrix().trace().re - 1.0).abs() < 1e-8);
    }
}

#[test]
fn random_parameter_sets_agree_with_propagation() {
    let scheme = LevelScheme::rb85();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..20 {
        let drives = DriveParams::new(
            rng.gen_range(0.001..1.0) * GAMMA,
            rng.gen_range(0.0..15.0) * GAMMA,
            rng.gen_range(-40.0..40.0) * GAMMA,
            rng.gen_range(-15.0..15.0) * GAMMA,
        );
        let l = build_liouvillian(&scheme, &drives).unwrap();
        let ss = steady_state(&l).unwrap();
        assert!(ss.physicality().is_physical());
        let evolved =
            time_evolve(&l, &DensityMatrix::pure(5, 1), default_horizon(&scheme), default_time_step(&scheme, &drives))
                .unwrap();
        let diff = ss.matrix().max_abs_diff(evolved.matrix());
        assert!(diff < 1e-8, "{drives:?}: deviation {diff:e}");
    }
}

#[test]
fn uniform_rescaling_leaves_steady_state_unchanged() {
    let scheme = LevelScheme::rb85();
    let drives = reference_drives().with_delta_p(1.2);
    let base = steady_state(&build_liouvillian(&scheme, &drives).unwrap()).unwrap();
    for s in [0.5, 3.0, 17.0] {
        let scaled = steady_state(&build_liouvillian(&scheme.scaled(s), &drives.scaled(s)).unwrap()).unwrap();
        let diff = base.matrix().max_abs_diff(scaled.matrix());
        assert!(diff < 1e-10, "s = {s}: {diff:e}");
    }
}

#[test]
fn probe_response_is_linear_for_weak_probe() {
    let scheme = LevelScheme::rb85();
    let ratios: Vec<f64> = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|f| {
            let drives = reference_drives().with_delta_p(2.0);
            let drives = DriveParams { omega_p: f * GAMMA, ..drives };
            let rho = steady_state(&build_liouvillian(&scheme, &drives).unwrap()).unwrap();
            rho.rho21().im / drives.omega_p
        })
        .collect();
    for r in &ratios[1..] {
        assert!((r / ratios[0] - 1.0).abs() < 5e-3, "{ratios:?}");
    }
}

#[test]
fn three_level_resonant_absorption_matches_closed_form() {
    let scheme = LevelScheme::rb85().three_level();
    let drives = DriveParams::new(0.001 * GAMMA, 5.0 * GAMMA, 0.0, 0.0);
    let rho = steady_state(&build_liouvillian(&scheme, &drives).unwrap()).unwrap();
    let a32 = scheme.strengths.a32;
    let want = drives.omega_p / (scheme.gamma_21 / 2.0 + 2.0 * (a32 * drives.omega_c).powi(2) / scheme.gamma_upper);
    assert!((rho.rho21().im / want - 1.0).abs() < 0.01);
    let closed = weak_probe_susceptibility(&scheme, &drives);
    assert!((closed.im / want - 1.0).abs() < 1e-12);
}

#[test]
fn steady_states_are_physical_across_scan() {
    let scheme = LevelScheme::rb85();
    for k in -20..=20 {
        let drives = reference_drives().with_delta_p(2.0 * k as f64);
        let rho = steady_state(&build_liouvillian(&scheme, &drives).unwrap()).unwrap();
        let p = rho.physicality();
        assert!(p.is_physical(), "{p:?}");
        assert!(rho.residual().unwrap() < 1e-10);
    }
}
