//! Invariant checks run by the `validate` subcommand against one config.

use eit_core::solver::{default_horizon, default_time_step};
use eit_core::{
    broaden, build_hamiltonian, build_liouvillian, find_peaks_dips, scan_probe, steady_state, time_evolve,
    weak_probe_susceptibility, Complex64 as C64, ComplexMatrix, DensityMatrix, DriveParams, LevelScheme, ScanWindow,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::config::SimulationConfig;

const SEED: u64 = 0x00e1_7515;
const RANDOM_INPUTS: usize = 100;
const SAMPLE_DETUNINGS: usize = 21;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Self::new(name, false, detail)
    }
}

/// Metric-against-bound check: passes when `value < bound`.
fn below(name: &'static str, value: f64, bound: f64) -> CheckResult {
    CheckResult::new(name, value < bound, format!("max {value:.3e} (bound {bound:.0e})"))
}

fn random_hermitian(rng: &mut StdRng, unit_trace: bool) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(5, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut h = (&m + &m.adjoint()).scale(C64::new(0.5, 0.0));
    if unit_trace {
        let shift = (1.0 - h.trace().re) / 5.0;
        for i in 0..5 {
            h[(i, i)] += shift;
        }
    }
    h
}

fn sample_detunings(window: &ScanWindow) -> Vec<f64> {
    ScanWindow::new(window.min, window.max, SAMPLE_DETUNINGS).map(|w| w.grid()).unwrap_or_default()
}

fn check_hamiltonian(cfg: &SimulationConfig) -> CheckResult {
    let mut worst: f64 = 0.0;
    for dp in sample_detunings(&cfg.window) {
        match build_hamiltonian(&cfg.scheme, &cfg.drives().with_delta_p(dp)) {
            Ok(h) => worst = worst.max(h.hermiticity_error()),
            Err(e) => return CheckResult::failed("hamiltonian_hermitian", e.to_string()),
        }
    }
    below("hamiltonian_hermitian", worst, 1e-12)
}

fn check_liouvillian(cfg: &SimulationConfig) -> Vec<CheckResult> {
    let names = ["liouvillian_trace_annihilation", "liouvillian_hermiticity", "liouvillian_linearity"];
    let l = match build_liouvillian(&cfg.scheme, &cfg.drives()) {
        Ok(l) => l,
        Err(e) => return names.iter().map(|n| CheckResult::failed(n, e.to_string())).collect(),
    };
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut trace, mut herm, mut lin): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..RANDOM_INPUTS {
        let rho = random_hermitian(&mut rng, true);
        let out = l.apply(&rho);
        trace = trace.max(out.trace().norm());
        herm = herm.max(out.hermiticity_error());

        let other = random_hermitian(&mut rng, false);
        let a = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = l.apply(&(&rho.scale(a) + &other.scale(b)));
        let rhs = &out.scale(a) + &l.apply(&other).scale(b);
        lin = lin.max(lhs.max_abs_diff(&rhs));
    }
    vec![below(names[0], trace, 1e-12), below(names[1], herm, 1e-12), below(names[2], lin, 1e-12)]
}

fn check_steady_states(cfg: &SimulationConfig) -> CheckResult {
    const NAME: &str = "steady_state_physical";
    let mut worst_residual: f64 = 0.0;
    for dp in sample_detunings(&cfg.window) {
        let drives = cfg.drives().with_delta_p(dp);
        let rho = match build_liouvillian(&cfg.scheme, &drives)
            .map_err(|e| e.to_string())
            .and_then(|l| steady_state(&l).map_err(|e| format!("at delta_p = {dp}: {e}")))
        {
            Ok(rho) => rho,
            Err(e) => return CheckResult::failed(NAME, e),
        };
        let p = rho.physicality();
        if !p.is_physical() {
            return CheckResult::failed(NAME, format!("at delta_p = {dp}: {p:?}"));
        }
        worst_residual = worst_residual.max(rho.residual().unwrap_or(f64::INFINITY));
    }
    CheckResult::new(
        NAME,
        worst_residual < 1e-10,
        format!("{SAMPLE_DETUNINGS} detunings, max residual {worst_residual:.3e}"),
    )
}

fn steady(scheme: &LevelScheme, drives: &DriveParams) -> Result<DensityMatrix, String> {
    let l = build_liouvillian(scheme, drives).map_err(|e| e.to_string())?;
    steady_state(&l).map_err(|e| e.to_string())
}

fn check_propagation(cfg: &SimulationConfig) -> CheckResult {
    const NAME: &str = "propagation_agreement";
    let mut worst: f64 = 0.0;
    let mid = 0.5 * (cfg.window.min + cfg.window.max);
    for dp in [cfg.window.min, mid, cfg.window.max] {
        let drives = cfg.drives().with_delta_p(dp);
        let result = build_liouvillian(&cfg.scheme, &drives).map_err(|e| e.to_string()).and_then(|l| {
            let ss = steady_state(&l).map_err(|e| e.to_string())?;
            let evolved = time_evolve(
                &l,
                &DensityMatrix::pure(5, 1),
                default_horizon(&cfg.scheme),
                default_time_step(&cfg.scheme, &drives),
            )
            .map_err(|e| e.to_string())?;
            Ok(ss.matrix().max_abs_diff(evolved.matrix()))
        });
        match result {
            Ok(d) => worst = worst.max(d),
            Err(e) => return CheckResult::failed(NAME, e),
        }
    }
    below(NAME, worst, 1e-8)
}

fn check_scale_invariance(cfg: &SimulationConfig) -> CheckResult {
    const NAME: &str = "scale_invariance";
    let drives = cfg.drives().with_delta_p(0.5 * (cfg.window.min + cfg.window.max));
    let base = match steady(&cfg.scheme, &drives) {
        Ok(b) => b,
        Err(e) => return CheckResult::failed(NAME, e),
    };
    let mut worst: f64 = 0.0;
    for s in [0.5, 3.0] {
        match steady(&cfg.scheme.scaled(s), &drives.scaled(s)) {
            Ok(r) => worst = worst.max(base.matrix().max_abs_diff(r.matrix())),
            Err(e) => return CheckResult::failed(NAME, e),
        }
    }
    below(NAME, worst, 1e-10)
}

fn check_probe_linearity(cfg: &SimulationConfig) -> CheckResult {
    const NAME: &str = "weak_probe_linearity";
    let gamma = cfg.scheme.gamma_upper;
    let dp = 0.5 * (cfg.window.min + cfg.window.max);
    let mut ratios = Vec::new();
    for f in [1e-4, 1e-3, 1e-2] {
        let drives = DriveParams { omega_p: f * gamma, ..cfg.drives().with_delta_p(dp) };
        match steady(&cfg.scheme, &drives) {
            Ok(r) => ratios.push(r.rho21().im / drives.omega_p),
            Err(e) => return CheckResult::failed(NAME, e),
        }
    }
    let spread = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
    below(NAME, spread, 5e-3)
}

fn check_closed_form(cfg: &SimulationConfig) -> CheckResult {
    const NAME: &str = "closed_form_agreement";
    let drives = DriveParams { omega_p: 1e-3 * cfg.scheme.gamma_upper, ..cfg.drives() };
    let window = match ScanWindow::new(cfg.window.min, cfg.window.max, cfg.window.n_points.min(401)) {
        Ok(w) => w,
        Err(e) => return CheckResult::failed(NAME, e.to_string()),
    };
    let s = match scan_probe(&cfg.scheme, &drives, &window) {
        Ok(s) => s,
        Err(e) => return CheckResult::failed(NAME, e.to_string()),
    };
    let worst = s
        .grid()
        .iter()
        .zip(s.absorption())
        .map(|(dp, a)| {
            let oracle = weak_probe_susceptibility(&cfg.scheme, &drives.with_delta_p(*dp)).im;
            ((a - oracle) / oracle).abs()
        })
        .fold(0.0, f64::max);
    below(NAME, worst, 1e-2)
}

fn check_spectrum(cfg: &SimulationConfig) -> Vec<CheckResult> {
    let names = ["passive_absorption", "peaks_interleave", "broadening_conservation"];
    let s = match scan_probe(&cfg.scheme, &cfg.drives(), &cfg.window) {
        Ok(s) => s,
        Err(e) => return names.iter().map(|n| CheckResult::failed(n, e.to_string())).collect(),
    };
    let min_abs = s.absorption().iter().copied().fold(f64::INFINITY, f64::min);
    let passive = CheckResult::new(names[0], min_abs >= -1e-10, format!("min absorption {min_abs:.3e}"));

    let interleave = match find_peaks_dips(&s, cfg.prominence_floor) {
        Ok(r) => {
            let ok = r.dips.len() + 1 == r.peaks.len()
                && r.dips.iter().zip(r.peaks.windows(2)).all(|(d, p)| p[0].index < d.index && d.index < p[1].index)
                && r.separations.iter().all(|&s| s > 0.0);
            CheckResult::new(names[1], ok, format!("{} peaks, {} dips", r.peaks.len(), r.dips.len()))
        }
        Err(e) => CheckResult::failed(names[1], e.to_string()),
    };

    let fwhm = cfg.broadening_fwhm.filter(|&f| f > 0.0).unwrap_or(10.0 * s.spacing());
    let conservation = match broaden(&s, fwhm) {
        Ok(b) => {
            let rel = (b.absorption_integral() / s.absorption_integral() - 1.0).abs();
            CheckResult::new(names[2], rel < 1e-3, format!("fwhm {fwhm:.3} MHz, relative change {rel:.3e}"))
        }
        Err(e) => CheckResult::failed(names[2], e.to_string()),
    };
    vec![passive, interleave, conservation]
}

/// Runs every check; never short-circuits.
pub fn run_checks(cfg: &SimulationConfig) -> Vec<CheckResult> {
    let mut out = vec![check_hamiltonian(cfg)];
    out.extend(check_liouvillian(cfg));
    out.push(check_steady_states(cfg));
    out.push(check_propagation(cfg));
    out.push(check_scale_invariance(cfg));
    out.push(check_probe_linearity(cfg));
    out.push(check_closed_form(cfg));
    out.extend(check_spectrum(cfg));
    out
}
