//! Dense complex square matrices and the LU solve used by the steady-state
//! solver.
//!
//! Storage is row-major; [`ComplexMatrix::vectorize`] produces the
//! column-major stacking `vec(ρ)` that the Liouvillian acts on, so element
//! `(i, j)` of an `n × n` matrix lands at index `i + n·j`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

/// Square matrix of complex numbers with an explicit dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> C64,
    {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Diagonal matrix with real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |r, c| if r == c { C64::new(diag[r], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Outer product `|row⟩⟨col|` (zero-based indices).
    pub fn basis(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(row, col)] = C64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul: dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }

    /// `[self, rhs] = self·rhs − rhs·self`
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Matrix-vector product for a vector of length `dim`.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.mul_vec_into(v, &mut out);
        out
    }

    pub fn mul_vec_into(&self, v: &[C64], out: &mut [C64]) {
        assert_eq!(v.len(), self.dim, "mul_vec: length mismatch");
        for (r, slot) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            *slot = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// Column-major stacking: element `(i, j)` goes to index `i + dim·j`.
    pub fn vectorize(&self) -> Vec<C64> {
        let n = self.dim;
        let mut v = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                v[r + n * c] = self[(r, c)];
            }
        }
        v
    }

    /// Inverse of [`ComplexMatrix::vectorize`].
    ///
    /// *Panics* if `v.len()` is not a perfect square.
    pub fn unvectorize(v: &[C64]) -> Self {
        let n = (v.len() as f64).sqrt().round() as usize;
        assert_eq!(n * n, v.len(), "unvectorize: length is not a perfect square");
        Self::from_fn(n, |r, c| v[r + n * c])
    }

    /// Largest element-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff: dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity, `max |M_ij − conj(M_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim).map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle
    /// is read.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |r, c| {
            nalgebra::Complex::new(self[(r, c)].re, self[(r, c)].im)
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.dim && c < self.dim, "index ({r}, {c}) out of range for dim {}", self.dim);
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.dim && c < self.dim, "index ({r}, {c}) out of range for dim {}", self.dim);
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "add: dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sub: dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&ComplexMatrix> for C64 {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        rhs.scale(self)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    ComplexMatrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

/// LU factorization `P·A = L·U` with partial (row) pivoting.
#[derive(Clone, Debug)]
pub struct LuDecomposition {
    dim: usize,
    // Packed factors: strict lower triangle holds L (unit diagonal implied).
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl LuDecomposition {
    /// Factorizes `a`. Returns `None` when a pivot column is exactly zero.
    pub fn new(a: &ComplexMatrix) -> Option<Self> {
        let n = a.dim;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (pivot_row, pivot_mag) =
                (k..n)
                    .map(|r| (r, lu[r * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_mag == 0.0 {
                return None;
            }
            if pivot_row != k {
                for c in 0..n {
                    lu.swap(k * n + c, pivot_row * n + c);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in (k + 1)..n {
                    let u = lu[k * n + c];
                    lu[r * n + c] -= factor * u;
                }
            }
        }
        Some(Self { dim: n, lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(b.len(), n, "solve: rhs length mismatch");
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let row = &self.lu[r * n..r * n + r];
            let acc = x[r] - row.iter().zip(&x[..r]).map(|(l, v)| l * v).sum::<C64>();
            x[r] = acc;
        }
        for r in (0..n).rev() {
            let row = &self.lu[r * n + r + 1..(r + 1) * n];
            let acc = x[r] - row.iter().zip(&x[r + 1..]).map(|(u, v)| u * v).sum::<C64>();
            x[r] = acc / self.lu[r * n + r];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut inv = ComplexMatrix::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[c] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            for (r, z) in col.into_iter().enumerate() {
                inv[(r, c)] = z;
            }
        }
        inv
    }

    /// 1-norm condition number `‖A‖₁·‖A⁻¹‖₁` of the factored matrix `a`.
    pub fn condition_number(&self, a: &ComplexMatrix) -> f64 {
        a.norm_one() * self.inverse().norm_one()
    }
}
