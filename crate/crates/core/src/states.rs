//! Density matrices, the qubit Bloch chart, Bell states and state
//! validation.
//!
//! Basis convention: `σ_z` is diagonal, `|0> = (1, 0)`, and two-qubit kets
//! are ordered `|00>, |01>, |10>, |11>` with the first factor most
//! significant. The singlet is `(|01> - |10>)/√2`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    kron, min_eigenvalue, pauli_x, pauli_y, pauli_z, paulis, psd_threshold, tol, CMatrix, ONE,
    ZERO,
};

/// A positive, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

/// Qubit Bloch vector `r` with `ρ = (I + r·σ)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Valid,
    Negative,
    NonUnitTrace,
    NonHermitian,
}

/// Outcome of [`validate`]. Never an error: invalid candidates are
/// reported, not rejected, so that negative "states" produced by
/// non-positive maps can be carried around and inspected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
}

impl Diagnostic {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Valid => "valid",
            Verdict::Negative => "negative",
            Verdict::NonUnitTrace => "non-unit-trace",
            Verdict::NonHermitian => "non-hermitian",
        };
        f.write_str(s)
    }
}

/// Residuals and verdict for a candidate density matrix.
pub fn validate(m: &CMatrix) -> Diagnostic {
    if !m.is_square() {
        return Diagnostic {
            hermiticity_residual: f64::INFINITY,
            trace_residual: f64::INFINITY,
            min_eigenvalue: f64::NAN,
            verdict: Verdict::NonHermitian,
        };
    }
    let scale = m.norm_inf().max(1.0);
    let hermiticity_residual = m.hermiticity_residual();
    let trace_residual = (m.trace() - ONE).norm();
    let min_eig = min_eigenvalue(&m.hermitian_part()).expect("hermitian part");
    let verdict = if hermiticity_residual > tol() * scale {
        Verdict::NonHermitian
    } else if trace_residual > tol() * scale {
        Verdict::NonUnitTrace
    } else if min_eig < psd_threshold(m.norm_inf()) {
        Verdict::Negative
    } else {
        Verdict::Valid
    };
    Diagnostic {
        hermiticity_residual,
        trace_residual,
        min_eigenvalue: min_eig,
        verdict,
    }
}

impl DensityMatrix {
    /// Accepts `mat` only if [`validate`] calls it valid.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let diag = validate(&mat);
        if !diag.is_valid() {
            return Err(Error::InvalidInput(format!(
                "not a density matrix ({}, min eigenvalue {:.3e}, trace residual {:.3e})",
                diag.verdict, diag.min_eigenvalue, diag.trace_residual
            )));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
        })
    }

    /// Wraps a matrix the caller already knows to be a state.
    pub(crate) fn from_trusted(mat: CMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    /// Normalized projector onto the given ket.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if ket.is_empty() || norm < 1e-300 {
            return Err(Error::InvalidInput("zero ket".into()));
        }
        let unit: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self::from_trusted(CMatrix::outer(&unit)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::from_trusted(CMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    pub fn from_bloch(r: BlochVector) -> Result<Self> {
        from_bloch(r)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_trusted(kron(&self.mat, &other.mat))
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).re
    }

    /// Bloch vector of a qubit state.
    pub fn bloch(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(Error::NotQubit(self.dim()));
        }
        let [x, y, z] = paulis().map(|p| self.mat.trace_product(&p).re);
        Ok(BlochVector([x, y, z]))
    }

    /// Convex combination `Σ w_i ρ_i`. Weights must be non-negative and sum
    /// to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let d = first.1.dim();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput("mixture weights must be a distribution".into()));
        }
        let mut acc = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            if rho.dim() != d {
                return Err(Error::DimensionMismatch("mixture of different dimensions".into()));
            }
            acc = &acc + &rho.mat.scale_real(*w);
        }
        Ok(Self::from_trusted(acc))
    }
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector([0.0, 0.0, 0.0]);
    pub const X_PLUS: BlochVector = BlochVector([1.0, 0.0, 0.0]);
    pub const X_MINUS: BlochVector = BlochVector([-1.0, 0.0, 0.0]);
    pub const Y_PLUS: BlochVector = BlochVector([0.0, 1.0, 0.0]);
    pub const Y_MINUS: BlochVector = BlochVector([0.0, -1.0, 0.0]);
    pub const Z_PLUS: BlochVector = BlochVector([0.0, 0.0, 1.0]);
    pub const Z_MINUS: BlochVector = BlochVector([0.0, 0.0, -1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(1.0 / n))
    }

    /// Transverse and axial components `(‖(x, y)‖, z)`.
    pub fn cylindrical(&self) -> (f64, f64) {
        (self.0[0].hypot(self.0[1]), self.0[2])
    }
}

/// `(I + r·σ)/2`; errors outside the unit ball.
pub fn from_bloch(r: BlochVector) -> Result<DensityMatrix> {
    let n = r.norm();
    if n > 1.0 + 1e-12 || !n.is_finite() {
        return Err(Error::OutsideBlochBall(n));
    }
    let [x, y, z] = r.0;
    let half = 0.5;
    let m = CMatrix::from_rows(&[
        &[Complex64::new(half * (1.0 + z), 0.0), Complex64::new(half * x, -half * y)],
        &[Complex64::new(half * x, half * y), Complex64::new(half * (1.0 - z), 0.0)],
    ]);
    Ok(DensityMatrix::from_trusted(m))
}

/// `tr(ρ a)` for Hermitian `a`.
pub fn expectation(rho: &DensityMatrix, a: &CMatrix) -> Result<f64> {
    if a.shape() != (rho.dim(), rho.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "observable {}x{} against a {}-dimensional state",
            a.rows(),
            a.cols(),
            rho.dim()
        )));
    }
    if !a.is_hermitian() {
        return Err(Error::NotHermitian("observable".into()));
    }
    Ok(rho.matrix().trace_product(a).re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn ket(self) -> [Complex64; 4] {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            Bell::PhiPlus => [s, ZERO, ZERO, s],
            Bell::PhiMinus => [s, ZERO, ZERO, -s],
            Bell::PsiPlus => [ZERO, s, s, ZERO],
            Bell::PsiMinus => [ZERO, s, -s, ZERO],
        }
    }
}

pub fn bell_state(which: Bell) -> DensityMatrix {
    DensityMatrix::from_trusted(bell_projector(which))
}

pub fn bell_projector(which: Bell) -> CMatrix {
    CMatrix::outer(&which.ket())
}

/// The two-qubit singlet `(|01> - |10>)/√2`.
pub fn singlet() -> DensityMatrix {
    bell_state(Bell::PsiMinus)
}

/// `σ_i ⊗ σ_i` for `i = x, y, z`.
pub fn pauli_correlators() -> [CMatrix; 3] {
    [
        kron(&pauli_x(), &pauli_x()),
        kron(&pauli_y(), &pauli_y()),
        kron(&pauli_z(), &pauli_z()),
    ]
}

/// Projectors onto the `σ_z` eigenstates `|0>`, `|1>`.
pub fn z_projectors() -> [CMatrix; 2] {
    [CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 1.0])]
}
