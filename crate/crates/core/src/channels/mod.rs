//! Linear maps on matrix spaces ("superoperators") in three
//! representations:
//!
//! * **transfer** matrix acting on column-stacked matrices, so that
//!   `ρ ↦ A ρ B†` has transfer `conj(B) ⊗ A`;
//! * **Choi** matrix `C = Σ_ij E_ij ⊗ T(E_ij)` (unnormalized, input factor
//!   first, trace `dim_in` for trace-preserving maps);
//! * **Kraus** operators `T(ρ) = Σ W_k ρ W_k†`, available only when `C ⪰ 0`.
//!
//! Positivity verdicts live in [`positivity`], measurement maps in
//! [`measurement`].

mod measurement;
mod positivity;

use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{herm_eig, herm_eigvals, kron, tol, CMatrix, ZERO};

pub use measurement::{lueders, nonselective, selective_apply, LuedersOutcome, SelectiveOutcome};
pub use positivity::{
    is_cp, is_n_positive, is_positive_map, PositivityReport, PositivityVerdict, DEFAULT_BUDGET,
};

/// A linear map from `dim_in x dim_in` to `dim_out x dim_out` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    dim_in: usize,
    dim_out: usize,
    transfer: CMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub dim_in: usize,
    pub dim_out: usize,
    pub mat: CMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// `Σ W†W = I`
    TracePreserving,
    /// `Σ W†W ⪯ I`
    Selective,
    /// Neither of the above (trace-increasing somewhere).
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    dim_in: usize,
    dim_out: usize,
    ops: Vec<CMatrix>,
    completeness: Completeness,
}

impl Superoperator {
    pub fn new(dim_in: usize, dim_out: usize, transfer: CMatrix) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidInput("superoperator dimensions must be positive".into()));
        }
        if transfer.shape() != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "transfer matrix {}x{} does not act {dim_in}x{dim_in} -> {dim_out}x{dim_out}",
                transfer.rows(),
                transfer.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            transfer,
        })
    }

    /// Builds the transfer matrix by applying `f` to every matrix unit.
    pub fn from_fn(dim_in: usize, dim_out: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let mut transfer = CMatrix::zeros(dim_out * dim_out, dim_in * dim_in);
        for j in 0..dim_in {
            for i in 0..dim_in {
                let image = f(&CMatrix::unit(dim_in, i, j));
                assert_eq!(image.shape(), (dim_out, dim_out), "image has the wrong shape");
                let col = i + j * dim_in;
                for (row, z) in image.vectorize().into_iter().enumerate() {
                    transfer[(row, col)] = z;
                }
            }
        }
        Self {
            dim_in,
            dim_out,
            transfer,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            transfer: CMatrix::identity(d * d),
        }
    }

    /// `ρ ↦ A ρ B†`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::DimensionMismatch("sandwich operands differ in shape".into()));
        }
        Self::new(a.cols(), a.rows(), kron(&b.conj(), a))
    }

    /// `ρ ↦ U ρ U†`.
    pub fn conjugation(u: &CMatrix) -> Result<Self> {
        Self::sandwich(u, u)
    }

    /// Full transpose `ρ ↦ ρᵀ`.
    pub fn transpose_map(d: usize) -> Self {
        Self::from_fn(d, d, |m| m.transpose())
    }

    /// Qubit map with Bloch action `(x, y, z) ↦ (x, y, -z)`: the transpose
    /// followed by conjugation with `σ_x`.
    pub fn flip_map() -> Self {
        let sx = crate::matcore::pauli_x();
        Self::from_fn(2, 2, |m| m.transpose().conjugate_by(&sx))
    }

    /// Qubit map defined by its action on the Pauli basis:
    /// `I ↦ I`, `σ_k ↦ scale[k] σ_k`.
    pub fn pauli_diagonal(scale: [f64; 3]) -> Self {
        let ps = crate::matcore::paulis();
        Self::from_fn(2, 2, |m| {
            // m = (tr(m) I + Σ tr(σ_k m) σ_k)/2
            let mut out = CMatrix::identity(2).scale(m.trace() * 0.5);
            for (k, p) in ps.iter().enumerate() {
                out = &out + &p.scale(p.trace_product(m) * 0.5 * scale[k]);
            }
            out
        })
    }

    /// `ρ ↦ (1-p) ρ + p tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Self {
        Self::from_fn(d, d, |m| {
            &m.scale_real(1.0 - p) + &CMatrix::identity(d).scale(m.trace() * (p / d as f64))
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn transfer(&self) -> &CMatrix {
        &self.transfer
    }

    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        if m.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "map expects {d}x{d} input, got {}x{}",
                m.rows(),
                m.cols(),
                d = self.dim_in
            )));
        }
        Ok(self.apply_unchecked(m))
    }

    pub(crate) fn apply_unchecked(&self, m: &CMatrix) -> CMatrix {
        let out = self.transfer.matvec(&m.vectorize());
        CMatrix::unvectorize(&out, self.dim_out, self.dim_out)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &Superoperator) -> Result<Self> {
        if first.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}->{} after {}->{}",
                self.dim_in, self.dim_out, first.dim_in, first.dim_out
            )));
        }
        Self::new(first.dim_in, self.dim_out, &self.transfer * &first.transfer)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            transfer: self.transfer.scale_real(s),
            ..self.clone()
        }
    }

    /// `T ⊗ id_n` acting on `(dim_in·n)`-dimensional inputs, with the
    /// original system as the first factor.
    pub fn tensor_identity(&self, n: usize) -> Self {
        let (di, d_o) = (self.dim_in, self.dim_out);
        Self::from_fn(di * n, d_o * n, |unit| {
            // Locate the single nonzero entry of the matrix unit.
            let (r, c) = (0..di * n)
                .flat_map(|r| (0..di * n).map(move |c| (r, c)))
                .find(|&(r, c)| unit[(r, c)] != ZERO)
                .expect("matrix unit");
            let (i, w) = (r / n, r % n);
            let (j, w2) = (c / n, c % n);
            kron(
                &self.apply_unchecked(&CMatrix::unit(di, i, j)),
                &CMatrix::unit(n, w, w2),
            )
        })
    }

    /// Hilbert–Schmidt dual: `tr(T*(A)† ρ) = tr(A† T(ρ))`. For
    /// Hermiticity-preserving maps this is the Heisenberg-picture map
    /// `tr(T*(A) ρ) = tr(A T(ρ))`.
    pub fn adjoint(&self) -> Self {
        Self {
            dim_in: self.dim_out,
            dim_out: self.dim_in,
            transfer: self.transfer.adjoint(),
        }
    }

    /// `max |tr T(E_ij) - δ_ij|`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim_in {
            for i in 0..self.dim_in {
                let col = i + j * self.dim_in;
                let tr: Complex64 = (0..self.dim_out)
                    .map(|a| self.transfer[(a + a * self.dim_out, col)])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - target).norm());
            }
        }
        worst
    }

    /// `max |T(I_in) - I_out|`.
    pub fn unitality_residual(&self) -> f64 {
        self.apply_unchecked(&CMatrix::identity(self.dim_in))
            .max_abs_diff(&CMatrix::identity(self.dim_out))
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preservation_residual() <= tol()
    }

    pub fn is_unital(&self) -> bool {
        self.unitality_residual() <= tol()
    }

    /// Whether `T(A†) = T(A)†` on the matrix units.
    pub fn hermiticity_preservation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let a = self.apply_unchecked(&CMatrix::unit(self.dim_in, i, j));
                let b = self.apply_unchecked(&CMatrix::unit(self.dim_in, j, i));
                worst = worst.max(a.adjoint().max_abs_diff(&b));
            }
        }
        worst
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi_of(self)
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return f64::INFINITY;
        }
        self.transfer.max_abs_diff(&other.transfer)
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!((self.dim_in, self.dim_out), (rhs.dim_in, rhs.dim_out));
        Superoperator {
            transfer: &self.transfer + &rhs.transfer,
            ..self.clone()
        }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;

    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!((self.dim_in, self.dim_out), (rhs.dim_in, rhs.dim_out));
        Superoperator {
            transfer: &self.transfer - &rhs.transfer,
            ..self.clone()
        }
    }
}

/// `C = Σ_ij E_ij ⊗ T(E_ij)`.
pub fn choi_of(t: &Superoperator) -> ChoiMatrix {
    let (di, d_o) = (t.dim_in, t.dim_out);
    let mat = CMatrix::from_fn(di * d_o, di * d_o, |r, c| {
        let (i, a) = (r / d_o, r % d_o);
        let (j, b) = (c / d_o, c % d_o);
        t.transfer[(a + b * d_o, i + j * di)]
    });
    ChoiMatrix {
        dim_in: di,
        dim_out: d_o,
        mat,
    }
}

/// Inverse of [`choi_of`].
pub fn transfer_from_choi(c: &ChoiMatrix) -> Result<Superoperator> {
    let (di, d_o) = (c.dim_in, c.dim_out);
    if c.mat.shape() != (di * d_o, di * d_o) {
        return Err(Error::DimensionMismatch("Choi matrix shape".into()));
    }
    let transfer = CMatrix::from_fn(d_o * d_o, di * di, |row, col| {
        let (a, b) = (row % d_o, row / d_o);
        let (i, j) = (col % di, col / di);
        c.mat[(i * d_o + a, j * d_o + b)]
    });
    Superoperator::new(di, d_o, transfer)
}

impl ChoiMatrix {
    pub fn new(dim_in: usize, dim_out: usize, mat: CMatrix) -> Result<Self> {
        if mat.shape() != (dim_in * dim_out, dim_in * dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix must be {n}x{n}",
                n = dim_in * dim_out
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            mat,
        })
    }

    /// Ascending spectrum of the Hermitian part.
    pub fn spectrum(&self) -> Vec<f64> {
        herm_eigvals(&self.mat.hermitian_part()).expect("hermitian part")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum()[0]
    }
}

/// Kraus operators read off the Choi eigendecomposition, ordered by
/// descending eigenvalue, with eigenvalues at or below `tol` dropped.
pub fn kraus_from_choi(c: &ChoiMatrix) -> Result<KrausSet> {
    let (di, d_o) = (c.dim_in, c.dim_out);
    if !c.mat.is_hermitian() {
        return Err(Error::NotHermitian("Choi matrix of a non-Hermiticity-preserving map".into()));
    }
    let eig = herm_eig(&c.mat)?;
    let lmin = eig.values[0];
    if lmin < crate::matcore::psd_threshold(c.mat.norm_inf()) {
        return Err(Error::NotCompletelyPositive(lmin));
    }
    let cutoff = tol() * c.mat.norm_inf().max(1.0);
    let mut ops = Vec::new();
    for k in (0..eig.values.len()).rev() {
        let lambda = eig.values[k];
        if lambda <= cutoff {
            break;
        }
        let v = eig.vector(k);
        let s = lambda.sqrt();
        ops.push(CMatrix::from_fn(d_o, di, |a, i| v[i * d_o + a] * s));
    }
    if ops.is_empty() {
        ops.push(CMatrix::zeros(d_o, di));
    }
    let completeness = classify_completeness(&ops, di);
    KrausSet::new(ops, completeness)
}

/// `T(ρ) = Σ W ρ W†`.
pub fn transfer_from_kraus(k: &KrausSet) -> Superoperator {
    let n = k.dim_in * k.dim_in;
    let m = k.dim_out * k.dim_out;
    let transfer = k
        .ops
        .iter()
        .fold(CMatrix::zeros(m, n), |acc, w| &acc + &kron(&w.conj(), w));
    Superoperator {
        dim_in: k.dim_in,
        dim_out: k.dim_out,
        transfer,
    }
}

pub fn adjoint_map(t: &Superoperator) -> Superoperator {
    t.adjoint()
}

fn kraus_sum(ops: &[CMatrix], dim_in: usize) -> CMatrix {
    ops.iter()
        .fold(CMatrix::zeros(dim_in, dim_in), |acc, w| &acc + &(&w.adjoint() * w))
}

fn classify_completeness(ops: &[CMatrix], dim_in: usize) -> Completeness {
    let sum = kraus_sum(ops, dim_in);
    let scale = sum.norm_inf().max(1.0);
    if sum.max_abs_diff(&CMatrix::identity(dim_in)) <= 10.0 * tol() * scale {
        Completeness::TracePreserving
    } else if herm_eigvals(&sum.hermitian_part()).expect("hermitian")[dim_in - 1] <= 1.0 + tol() * scale {
        Completeness::Selective
    } else {
        Completeness::Unconstrained
    }
}

impl KrausSet {
    /// Validates shapes and that the declared completeness class holds.
    pub fn new(ops: Vec<CMatrix>, completeness: Completeness) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidInput("empty Kraus set".into()))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(bad) = ops.iter().find(|w| w.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {}x{} among {dim_out}x{dim_in}",
                bad.rows(),
                bad.cols()
            )));
        }
        let actual = classify_completeness(&ops, dim_in);
        let ok = match completeness {
            Completeness::TracePreserving => actual == Completeness::TracePreserving,
            Completeness::Selective => actual != Completeness::Unconstrained,
            Completeness::Unconstrained => true,
        };
        if !ok {
            let residual = kraus_sum(&ops, dim_in).max_abs_diff(&CMatrix::identity(dim_in));
            return Err(Error::Completeness(format!(
                "declared {completeness:?}, Σ W†W deviates from I by {residual:.3e}"
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            ops,
            completeness,
        })
    }

    /// Classifies the completeness relation instead of checking a declared one.
    pub fn infer(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidInput("empty Kraus set".into()))?;
        let class = classify_completeness(&ops, first.cols());
        Self::new(ops, class)
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn completeness(&self) -> Completeness {
        self.completeness
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `Σ W†W`.
    pub fn completeness_sum(&self) -> CMatrix {
        kraus_sum(&self.ops, self.dim_in)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch("Kraus input shape".into()));
        }
        Ok(self
            .ops
            .iter()
            .fold(CMatrix::zeros(self.dim_out, self.dim_out), |acc, w| {
                &acc + &rho.conjugate_by(w)
            }))
    }
}
