//! The assembled Liouvillian against an element-wise evaluation of the master
//! equation that never forms a superoperator.

use eit_core::{build_liouvillian, Complex64 as C64, ComplexMatrix, DriveParams, LevelScheme};
use proptest::prelude::*;

/// ρ̇_ab written out term by term with explicit sums; independent of the
/// Kronecker assembly and of `apply_lindblad`.
fn master_equation_elementwise(scheme: &LevelScheme, drives: &DriveParams, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = 5;
    let mut h = [[C64::new(0.0, 0.0); 5]; 5];
    let two_photon = drives.delta_p + drives.delta_c;
    let diag = [0.0, -drives.delta_p, -two_photon, -(two_photon + scheme.delta1), -(two_photon - scheme.delta2)];
    for (k, d) in diag.iter().enumerate() {
        h[k][k] = C64::new(*d, 0.0);
    }
    let s = scheme.strengths;
    for (r, c, w) in [
        (1, 0, drives.omega_p),
        (2, 1, s.a32 * drives.omega_c),
        (3, 1, s.a42 * drives.omega_c),
        (4, 1, s.a52 * drives.omega_c),
    ] {
        h[r][c] = C64::new(-w, 0.0);
        h[c][r] = C64::new(-w, 0.0);
    }
    // (from, to, rate), zero-based
    let channels = [
        (1usize, 0usize, scheme.gamma_21),
        (2, 1, scheme.gamma_upper),
        (3, 1, scheme.gamma_upper),
        (4, 1, scheme.gamma_upper),
    ];

    let mut out = ComplexMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let mut comm = C64::new(0.0, 0.0);
            for k in 0..n {
                comm += h[a][k] * rho[(k, b)] - rho[(a, k)] * h[k][b];
            }
            let mut val = C64::new(0.0, -1.0) * comm;
            for &(i, j, g) in &channels {
                // gain: |j⟩⟨i| ρ |i⟩⟨j| puts ρ_ii into (j, j)
                if a == j && b == j {
                    val += g * rho[(i, i)];
                }
                // loss: −½{|i⟩⟨i|, ρ}
                let mut loss = 0.0;
                if a == i {
                    loss += 0.5;
                }
                if b == i {
                    loss += 0.5;
                }
                val -= g * loss * rho[(a, b)];
            }
            out[(a, b)] = val;
        }
    }
    out
}

fn reference_point() -> (LevelScheme, DriveParams) {
    let g = 0.97;
    (LevelScheme::rb85(), DriveParams::new(0.3, 4.0 * g, 1.3, -9.0 * g))
}

#[test]
fn columns_match_elementwise_master_equation() {
    let (scheme, drives) = reference_point();
    let l = build_liouvillian(&scheme, &drives).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            let basis = ComplexMatrix::basis(5, i, j);
            let column: Vec<C64> = (0..25).map(|r| l.matrix()[(r, i + 5 * j)]).collect();
            let oracle = master_equation_elementwise(&scheme, &drives, &basis).vectorize();
            for (a, b) in column.iter().zip(&oracle) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    assert!(worst < 1e-12, "max deviation {worst:e}");
}

/// Independently built three-level ladder 1 → 2 → 3.
fn three_level_rhs(scheme: &LevelScheme, drives: &DriveParams, rho: &[[C64; 3]; 3]) -> [[C64; 3]; 3] {
    let h = [
        [C64::new(0.0, 0.0), C64::new(-drives.omega_p, 0.0), C64::new(0.0, 0.0)],
        [
            C64::new(-drives.omega_p, 0.0),
            C64::new(-drives.delta_p, 0.0),
            C64::new(-scheme.strengths.a32 * drives.omega_c, 0.0),
        ],
        [
            C64::new(0.0, 0.0),
            C64::new(-scheme.strengths.a32 * drives.omega_c, 0.0),
            C64::new(-(drives.delta_p + drives.delta_c), 0.0),
        ],
    ];
    let (g21, g32) = (scheme.gamma_21, scheme.gamma_upper);
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut comm = C64::new(0.0, 0.0);
            for k in 0..3 {
                comm += h[a][k] * rho[k][b] - rho[a][k] * h[k][b];
            }
            out[a][b] = C64::new(0.0, -1.0) * comm;
        }
    }
    out[0][0] += g21 * rho[1][1];
    out[1][1] += g32 * rho[2][2] - g21 * rho[1][1];
    out[2][2] -= g32 * rho[2][2];
    out[0][1] -= 0.5 * g21 * rho[0][1];
    out[1][0] -= 0.5 * g21 * rho[1][0];
    out[0][2] -= 0.5 * g32 * rho[0][2];
    out[2][0] -= 0.5 * g32 * rho[2][0];
    out[1][2] -= 0.5 * (g21 + g32) * rho[1][2];
    out[2][1] -= 0.5 * (g21 + g32) * rho[2][1];
    out
}

#[test]
fn degenerate_scheme_reduces_to_three_level_ladder() {
    let scheme = LevelScheme::rb85().three_level();
    let drives = DriveParams::new(0.4, 3.0, 0.7, -1.1);
    let h = eit_core::build_hamiltonian(&scheme, &drives).unwrap();
    for k in [3, 4] {
        for m in 0..5 {
            if m != k {
                assert_eq!(h[(k, m)], C64::new(0.0, 0.0));
                assert_eq!(h[(m, k)], C64::new(0.0, 0.0));
            }
        }
    }

    let l = build_liouvillian(&scheme, &drives).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let small: [[C64; 3]; 3] = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let t = (seed * 9 + (3 * a + b) as u64) as f64;
                C64::new((0.37 * t).sin(), (1.3 * t).cos())
            })
        });
        let mut rho = ComplexMatrix::zeros(5);
        for a in 0..3 {
            for b in 0..3 {
                rho[(a, b)] = small[a][b];
            }
        }
        let full = l.apply(&rho);
        let reduced = three_level_rhs(&scheme, &drives, &small);
        for a in 0..5 {
            for b in 0..5 {
                let want = if a < 3 && b < 3 { reduced[a][b] } else { C64::new(0.0, 0.0) };
                worst = worst.max((full[(a, b)] - want).norm());
            }
        }
    }
    assert!(worst < 1e-12, "max deviation {worst:e}");
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn hermitian() -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex(), 25).prop_map(|v| {
        let m = ComplexMatrix::from_fn(5, |r, c| v[5 * r + c]);
        (&m + &m.adjoint()).scale(C64::new(0.5, 0.0))
    })
}

fn unit_trace_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    hermitian().prop_map(|m| {
        let mut m = m;
        let shift = (1.0 - m.trace().re) / 5.0;
        for i in 0..5 {
            m[(i, i)] += shift;
        }
        m
    })
}

fn drives() -> impl Strategy<Value = DriveParams> {
    (0.0..1.0f64, 0.0..15.0f64, -40.0..40.0f64, -15.0..15.0f64)
        .prop_map(|(p, c, dp, dc)| DriveParams::new(p, c, dp, dc))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trace_annihilation(rho in unit_trace_hermitian(), d in drives()) {
        let l = build_liouvillian(&LevelScheme::rb85(), &d).unwrap();
        prop_assert!(l.apply(&rho).trace().norm() < 1e-12);
    }

    #[test]
    fn hermiticity_preservation(rho in hermitian(), d in drives()) {
        let l = build_liouvillian(&LevelScheme::rb85(), &d).unwrap();
        prop_assert!(l.apply(&rho).hermiticity_error() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian(d in drives()) {
        let h = eit_core::build_hamiltonian(&LevelScheme::rb85(), &d).unwrap();
        prop_assert!(h.hermiticity_error() < 1e-12);
    }

    #[test]
    fn linearity(r1 in hermitian(), r2 in hermitian(), a in complex(), b in complex(), d in drives()) {
        let l = build_liouvillian(&LevelScheme::rb85(), &d).unwrap();
        let combined = &r1.scale(a) + &r2.scale(b);
        let lhs = l.apply(&combined);
        let rhs = &l.apply(&r1).scale(a) + &l.apply(&r2).scale(b);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}
