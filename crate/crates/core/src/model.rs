//! Level scheme, drive fields, rotating-frame Hamiltonian, decay dissipators
//! and the Liouvillian superoperator of the five-level cascade.
//!
//! Levels are numbered 1..=5 in the public API, as in the usual physics
//! notation:
//!
//! | level | state                 |
//! |-------|-----------------------|
//! | 1     | 5S₁/₂, F = 3          |
//! | 2     | 5P₃/₂, F′ = 3         |
//! | 3     | 5D₅/₂, F″ = 3         |
//! | 4     | 5D₅/₂, F″ = 4         |
//! | 5     | 5D₅/₂, F″ = 2         |
//!
//! All frequencies, Rabi frequencies and rates share one unit (MHz) and enter
//! the equations of motion unchanged, with ℏ = 1.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::matrix::{kron, ComplexMatrix};

/// Number of levels in the cascade model.
pub const N_LEVELS: usize = 5;

/// Natural linewidth of the 5P₃/₂ level (MHz). Not given alongside the other
/// parameters of the model, so it is a plain default that callers override.
pub const RB_D2_LINEWIDTH_MHZ: f64 = 6.07;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected} levels, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("level index {0} out of range 1..={N_LEVELS}")]
    LevelOutOfRange(usize),
    #[error("decay channel must connect two distinct levels (got {0} -> {0})")]
    SelfDecay(usize),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
}

/// Relative strengths of the coupling transitions 2→3, 2→4 and 2→5.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Strengths {
    pub a32: f64,
    pub a42: f64,
    pub a52: f64,
}

impl Strengths {
    /// Hyperfine ratio 1 : 1.46 : 0.6 for the F″ = 3, 4, 2 components.
    pub const RB85: Strengths = Strengths { a32: 1.0, a42: 1.46, a52: 0.6 };

    /// Only the F″ = 3 component couples; reduces the model to a three-level
    /// ladder.
    pub const THREE_LEVEL: Strengths = Strengths { a32: 1.0, a42: 0.0, a52: 0.0 };

    pub fn as_array(&self) -> [f64; 3] {
        [self.a32, self.a42, self.a52]
    }
}

/// Atomic structure: hyperfine offsets, decay rates and coupling strengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelScheme {
    pub n_levels: usize,
    /// Splitting between F″ = 3 and F″ = 4 (MHz).
    pub delta1: f64,
    /// Splitting between F″ = 2 and F″ = 3 (MHz).
    pub delta2: f64,
    /// Common decay rate of the channels 3→2, 4→2 and 5→2 (MHz).
    pub gamma_upper: f64,
    /// Decay rate of the channel 2→1 (MHz).
    pub gamma_21: f64,
    pub strengths: Strengths,
}

impl Default for LevelScheme {
    fn default() -> Self {
        Self::rb85()
    }
}

impl LevelScheme {
    /// Cold ⁸⁵Rb cascade 5S₁/₂ → 5P₃/₂ → 5D₅/₂.
    pub fn rb85() -> Self {
        Self {
            n_levels: N_LEVELS,
            delta1: 9.0,
            delta2: 7.6,
            gamma_upper: 0.97,
            gamma_21: RB_D2_LINEWIDTH_MHZ,
            strengths: Strengths::RB85,
        }
    }

    /// Same scheme with a₄₂ = a₅₂ = 0.
    pub fn three_level(self) -> Self {
        Self { strengths: Strengths::THREE_LEVEL, ..self }
    }

    /// Multiplies every frequency-valued field by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            delta1: self.delta1 * s,
            delta2: self.delta2 * s,
            gamma_upper: self.gamma_upper * s,
            gamma_21: self.gamma_21 * s,
            ..*self
        }
    }

    /// Decay channels in the order 2→1, 3→2, 4→2, 5→2.
    pub fn decay_channels(&self) -> [DecayChannel; 4] {
        [
            DecayChannel { from: 2, to: 1, rate: self.gamma_21 },
            DecayChannel { from: 3, to: 2, rate: self.gamma_upper },
            DecayChannel { from: 4, to: 2, rate: self.gamma_upper },
            DecayChannel { from: 5, to: 2, rate: self.gamma_upper },
        ]
    }

    /// Checks the structural invariants. Decay rates may be zero: such
    /// schemes are representable but have no unique steady state, which the
    /// solver reports.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_levels != N_LEVELS {
            return Err(ModelError::DimensionMismatch { expected: N_LEVELS, got: self.n_levels });
        }
        positive("delta1", self.delta1)?;
        positive("delta2", self.delta2)?;
        non_negative("gamma_upper", self.gamma_upper)?;
        non_negative("gamma_21", self.gamma_21)?;
        non_negative("a32", self.strengths.a32)?;
        non_negative("a42", self.strengths.a42)?;
        non_negative("a52", self.strengths.a52)?;
        Ok(())
    }
}

/// Probe and coupling field parameters (MHz). Field phases are fixed to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveParams {
    /// Probe Rabi frequency on 1→2.
    pub omega_p: f64,
    /// Coupling Rabi frequency on 2→{3, 4, 5}.
    pub omega_c: f64,
    /// Probe detuning from the 1→2 resonance.
    pub delta_p: f64,
    /// Coupling detuning from the 2→3 resonance.
    pub delta_c: f64,
}

impl DriveParams {
    pub fn new(omega_p: f64, omega_c: f64, delta_p: f64, delta_c: f64) -> Self {
        Self { omega_p, omega_c, delta_p, delta_c }
    }

    pub fn with_delta_p(self, delta_p: f64) -> Self {
        Self { delta_p, ..self }
    }

    pub fn with_omega_c(self, omega_c: f64) -> Self {
        Self { omega_c, ..self }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            omega_p: self.omega_p * s,
            omega_c: self.omega_c * s,
            delta_p: self.delta_p * s,
            delta_c: self.delta_c * s,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        non_negative("omega_p", self.omega_p)?;
        non_negative("omega_c", self.omega_c)?;
        finite("delta_p", self.delta_p)?;
        finite("delta_c", self.delta_c)?;
        Ok(())
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, reason: "must be finite" })
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, reason: "must be > 0" })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<(), ModelError> {
    finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, reason: "must be >= 0" })
    }
}

fn validate_pair(scheme: &LevelScheme, drives: &DriveParams) -> Result<(), ModelError> {
    scheme.validate()?;
    drives.validate()?;
    let s = scheme.strengths;
    if drives.omega_c > 0.0 && s.a32 == 0.0 && s.a42 == 0.0 && s.a52 == 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "strengths",
            value: 0.0,
            reason: "at least one strength must be > 0 while the coupling field is on",
        });
    }
    Ok(())
}

/// Spontaneous decay `from → to` at `rate` (levels 1-based).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayChannel {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// Diagonal of the free Hamiltonian for levels 1..=5.
pub fn free_energies(scheme: &LevelScheme, drives: &DriveParams) -> [f64; N_LEVELS] {
    let two_photon = drives.delta_p + drives.delta_c;
    [0.0, -drives.delta_p, -two_photon, -(two_photon + scheme.delta1), -(two_photon - scheme.delta2)]
}

/// Rotating-frame Hamiltonian `H = H₀ + H_I` (ℏ = 1).
pub fn build_hamiltonian(scheme: &LevelScheme, drives: &DriveParams) -> Result<ComplexMatrix, ModelError> {
    validate_pair(scheme, drives)?;
    let mut h = ComplexMatrix::from_real_diagonal(&free_energies(scheme, drives));
    let couplings = [
        (1, 0, drives.omega_p),
        (2, 1, scheme.strengths.a32 * drives.omega_c),
        (3, 1, scheme.strengths.a42 * drives.omega_c),
        (4, 1, scheme.strengths.a52 * drives.omega_c),
    ];
    for (r, c, omega) in couplings {
        h[(r, c)] = C64::new(-omega, 0.0);
        h[(c, r)] = C64::new(-omega, 0.0);
    }
    Ok(h)
}

fn check_level(level: usize, dim: usize) -> Result<usize, ModelError> {
    if (1..=dim).contains(&level) {
        Ok(level - 1)
    } else {
        Err(ModelError::LevelOutOfRange(level))
    }
}

/// Lindblad dissipator for decay `from → to` applied to `rho`:
///
/// ```text
/// rate · (σ_ji ρ σ_ij − ½ σ_ij σ_ji ρ − ½ ρ σ_ij σ_ji),   σ_ij = |i⟩⟨j|
/// ```
///
/// with `i = from`, `j = to` (1-based).
pub fn apply_lindblad(from: usize, to: usize, rate: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix, ModelError> {
    let n = rho.dim();
    if n != N_LEVELS {
        return Err(ModelError::DimensionMismatch { expected: N_LEVELS, got: n });
    }
    let i = check_level(from, n)?;
    let j = check_level(to, n)?;
    if i == j {
        return Err(ModelError::SelfDecay(from));
    }
    non_negative("rate", rate)?;

    let jump = ComplexMatrix::basis(n, j, i); // σ_ji = |j⟩⟨i|
    let jump_dag = ComplexMatrix::basis(n, i, j);
    let occupation = ComplexMatrix::basis(n, i, i); // σ_ij σ_ji

    let gain = jump.matmul(rho).matmul(&jump_dag);
    let loss = &occupation.matmul(rho) + &rho.matmul(&occupation);
    Ok((&gain - &loss.scale(C64::new(0.5, 0.0))).scale(C64::new(rate, 0.0)))
}

/// Matrix `L` of size n² × n² with `vec(ρ̇) = L·vec(ρ)` for column-major
/// `vec`, together with the parameters it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
    levels: usize,
    scheme: LevelScheme,
    drives: DriveParams,
}

impl Liouvillian {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Dimension of the underlying Hilbert space (5).
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn scheme(&self) -> &LevelScheme {
        &self.scheme
    }

    pub fn drives(&self) -> &DriveParams {
        &self.drives
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    /// `L(ρ)` as a matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::unvectorize(&self.apply_vec(&rho.vectorize()))
    }

    /// `s·L`, keeping the recorded parameters.
    pub fn scaled(&self, s: f64) -> Self {
        Self { matrix: self.matrix.scale(C64::new(s, 0.0)), ..self.clone() }
    }
}

/// Assembles the Liouvillian from the commutator with `H` and the four decay
/// channels, using `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`.
pub fn build_liouvillian(scheme: &LevelScheme, drives: &DriveParams) -> Result<Liouvillian, ModelError> {
    let h = build_hamiltonian(scheme, drives)?;
    let n = h.dim();
    let id = ComplexMatrix::identity(n);
    let minus_i = C64::new(0.0, -1.0);

    // −i(H ρ − ρ H)
    let mut l = (&kron(&id, &h) - &kron(&h.transpose(), &id)).scale(minus_i);

    for channel in scheme.decay_channels() {
        if channel.rate == 0.0 {
            continue;
        }
        let (i, j) = (channel.from - 1, channel.to - 1);
        let jump = ComplexMatrix::basis(n, j, i);
        let occupation = ComplexMatrix::basis(n, i, i);
        // C ρ C† → conj(C) ⊗ C; C is real.
        let gain = kron(&jump, &jump);
        let loss = &kron(&id, &occupation) + &kron(&occupation, &id);
        let dissipator = &gain - &loss.scale(C64::new(0.5, 0.0));
        l = &l + &dissipator.scale(C64::new(channel.rate, 0.0));
    }

    Ok(Liouvillian { matrix: l, levels: n, scheme: *scheme, drives: *drives })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bare(delta_p: f64, delta_c: f64) -> DriveParams {
        DriveParams::new(0.0, 0.0, delta_p, delta_c)
    }

    fn diag(h: &ComplexMatrix) -> Vec<f64> {
        (0..h.dim()).map(|i| h[(i, i)].re).collect()
    }

    #[test]
    fn free_hamiltonian_at_zero_detuning() {
        let h = build_hamiltonian(&LevelScheme::rb85(), &bare(0.0, 0.0)).unwrap();
        let expected = [0.0, 0.0, 0.0, -9.0, 7.6];
        for (got, want) in diag(&h).iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(h.max_abs_diff(&ComplexMatrix::from_real_diagonal(&expected)), 0.0);
    }

    #[test]
    fn free_hamiltonian_with_detunings() {
        let h = build_hamiltonian(&LevelScheme::rb85(), &bare(2.0, 3.0)).unwrap();
        let expected = [0.0, -2.0, -5.0, -14.0, 2.6];
        for (got, want) in diag(&h).iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn interaction_entries() {
        let h = build_hamiltonian(&LevelScheme::rb85(), &DriveParams::new(1.0, 2.0, 0.0, 0.0)).unwrap();
        assert_eq!(h[(1, 0)], re(-1.0));
        assert_eq!(h[(2, 1)], re(-2.0));
        assert!((h[(3, 1)] - re(-2.92)).norm() < 1e-12);
        assert!((h[(4, 1)] - re(-1.2)).norm() < 1e-12);
        assert_eq!(h.hermiticity_error(), 0.0);
        // nothing couples 1 to the upper manifold or the upper levels to each other
        for (r, c) in [(2, 0), (3, 0), (4, 0), (3, 2), (4, 2), (4, 3)] {
            assert_eq!(h[(r, c)], re(0.0));
            assert_eq!(h[(c, r)], re(0.0));
        }
    }

    #[test]
    fn hamiltonian_rejects_wrong_level_count() {
        let scheme = LevelScheme { n_levels: 3, ..LevelScheme::rb85() };
        assert_eq!(
            build_hamiltonian(&scheme, &bare(0.0, 0.0)),
            Err(ModelError::DimensionMismatch { expected: 5, got: 3 })
        );
    }

    #[test]
    fn hamiltonian_rejects_bad_parameters() {
        let scheme = LevelScheme { delta1: -1.0, ..LevelScheme::rb85() };
        assert!(build_hamiltonian(&scheme, &bare(0.0, 0.0)).is_err());
        let drives = DriveParams::new(-0.1, 1.0, 0.0, 0.0);
        assert!(build_hamiltonian(&LevelScheme::rb85(), &drives).is_err());
        let dark = LevelScheme { strengths: Strengths { a32: 0.0, a42: 0.0, a52: 0.0 }, ..LevelScheme::rb85() };
        assert!(build_hamiltonian(&dark, &DriveParams::new(0.1, 1.0, 0.0, 0.0)).is_err());
        assert!(build_hamiltonian(&dark, &DriveParams::new(0.1, 0.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn lindblad_moves_population_down() {
        let g = 6.07;
        let out = apply_lindblad(2, 1, g, &ComplexMatrix::basis(5, 1, 1)).unwrap();
        let mut expected = ComplexMatrix::zeros(5);
        expected[(0, 0)] = re(g);
        expected[(1, 1)] = re(-g);
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn lindblad_leaves_ground_state() {
        let out = apply_lindblad(2, 1, 6.07, &ComplexMatrix::basis(5, 0, 0)).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn lindblad_coherence_decays_at_half_rate() {
        let g = 6.07;
        let rho = ComplexMatrix::basis(5, 1, 0);
        let out = apply_lindblad(2, 1, g, &rho).unwrap();
        assert!(out.max_abs_diff(&rho.scale(re(-g / 2.0))) < 1e-15);
    }

    #[test]
    fn lindblad_index_errors() {
        let rho = ComplexMatrix::zeros(5);
        assert_eq!(apply_lindblad(6, 1, 1.0, &rho), Err(ModelError::LevelOutOfRange(6)));
        assert_eq!(apply_lindblad(0, 1, 1.0, &rho), Err(ModelError::LevelOutOfRange(0)));
        assert_eq!(apply_lindblad(2, 2, 1.0, &rho), Err(ModelError::SelfDecay(2)));
        assert!(apply_lindblad(2, 1, 1.0, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn undriven_undamped_liouvillian_kills_diagonal_states() {
        let scheme = LevelScheme { gamma_upper: 0.0, gamma_21: 0.0, ..LevelScheme::rb85() };
        let l = build_liouvillian(&scheme, &bare(1.5, -2.0)).unwrap();
        let rho = ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.15, 0.25]);
        assert!(l.apply(&rho).max_abs() < 1e-15);
        // ... and is the commutator superoperator of H₀
        let h = build_hamiltonian(&scheme, &bare(1.5, -2.0)).unwrap();
        let rho = ComplexMatrix::from_fn(5, |r, c| C64::new((r + 2 * c) as f64, r as f64 - c as f64));
        let expected = h.commutator(&rho).scale(C64::new(0.0, -1.0));
        assert!(l.apply(&rho).max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn single_channel_liouvillian() {
        let g = 6.07;
        let scheme = LevelScheme { gamma_upper: 0.0, gamma_21: g, ..LevelScheme::rb85() };
        let l = build_liouvillian(&scheme, &bare(0.0, 0.0)).unwrap();
        let out = l.apply(&ComplexMatrix::basis(5, 1, 1));
        let mut expected = ComplexMatrix::zeros(5);
        expected[(0, 0)] = re(g);
        expected[(1, 1)] = re(-g);
        assert!(out.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn liouvillian_records_inputs() {
        let drives = DriveParams::new(0.01, 3.88, 0.5, -8.73);
        let l = build_liouvillian(&LevelScheme::rb85(), &drives).unwrap();
        assert_eq!(l.levels(), 5);
        assert_eq!(l.matrix().dim(), 25);
        assert_eq!(*l.drives(), drives);
        assert_eq!(*l.scheme(), LevelScheme::rb85());
    }
}
