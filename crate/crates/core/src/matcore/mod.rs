//! Dense complex matrices and the handful of kernels everything else is
//! built on: products, Kronecker products, partial traces, Hermitian
//! eigendecomposition and unitary propagators.
//!
//! Matrices are small (at most 16x16 in practice) and stored row-major.

mod eig;
pub mod tolerance;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eig::{herm_eig, herm_eigvals, min_eigenvalue, HermEig};
pub use tolerance::{psd_threshold, set_tol, tol};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Which factor of a bipartite space an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// The first tensor factor (the system `S`).
    First,
    /// The second tensor factor (the reservoir `R`, or a witness).
    Second,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix shape must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows. Panics on ragged input; meant for
    /// literals in code and tests.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let vals: Vec<_> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::diag(&vals)
    }

    /// `|v><v|` for a column vector given as a slice.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Matrix unit `E_ij` of the given square dimension.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        debug_assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol() * self.norm_inf().max(1.0)
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        // Hermitian inputs: sum of |eigenvalues|, which avoids the sqrt of
        // rounding noise the Gram route picks up near rank deficiency.
        if self.is_square() && self.hermiticity_residual() <= 1e-13 * self.norm_inf().max(1.0) {
            return herm_eigvals(&self.hermitian_part())
                .expect("hermitian part is Hermitian")
                .iter()
                .map(|l| l.abs())
                .sum();
        }
        let gram = &self.adjoint() * self;
        // The Gram matrix is Hermitian by construction; symmetrize away rounding.
        herm_eigvals(&gram.hermitian_part())
            .expect("Gram matrix is Hermitian")
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .sum()
    }

    /// Column-stacking vectorization: entry `(i, j)` lands at `i + j*rows`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                v[i + j * self.rows] = self[(i, j)];
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`].
    pub fn unvectorize(v: &[Complex64], rows: usize, cols: usize) -> Self {
        assert_eq!(v.len(), rows * cols, "vector length mismatch");
        Self::from_fn(rows, cols, |i, j| v[i + j * rows])
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        self.mul_unchecked(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>9.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product: block `(i, j)` of the result is `a[i,j] * b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    CMatrix::from_fn(m * p, n * q, |r, c| a[(r / p, c / q)] * b[(r % p, c % q)])
}

fn check_bipartite(m: &CMatrix, (d_s, d_r): (usize, usize)) -> Result<()> {
    let n = d_s * d_r;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} matrix for dims ({d_s}, {d_r}), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out one factor of a `(d_s, d_r)` bipartite operator and returns
/// the operator on the factor named by `keep`.
pub fn partial_trace(m: &CMatrix, dims: (usize, usize), keep: Subsystem) -> Result<CMatrix> {
    check_bipartite(m, dims)?;
    let (d_s, d_r) = dims;
    Ok(match keep {
        Subsystem::First => CMatrix::from_fn(d_s, d_s, |i, j| {
            (0..d_r).map(|k| m[(i * d_r + k, j * d_r + k)]).sum()
        }),
        Subsystem::Second => CMatrix::from_fn(d_r, d_r, |a, b| {
            (0..d_s).map(|k| m[(k * d_r + a, k * d_r + b)]).sum()
        }),
    })
}

/// Transposes the indices of one factor of a bipartite operator.
pub fn partial_transpose(m: &CMatrix, dims: (usize, usize), which: Subsystem) -> Result<CMatrix> {
    check_bipartite(m, dims)?;
    let (d_s, d_r) = dims;
    let n = d_s * d_r;
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let (i, a) = (r / d_r, r % d_r);
        let (j, b) = (c / d_r, c % d_r);
        match which {
            Subsystem::First => m[(j * d_r + a, i * d_r + b)],
            Subsystem::Second => m[(i * d_r + b, j * d_r + a)],
        }
    }))
}

/// `exp(-i h t)` for Hermitian `h`, computed from its eigendecomposition.
pub fn unitary_at(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let eig = herm_eig(h)?;
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l * t))
        .collect();
    let v = &eig.vectors;
    Ok(&(v * &CMatrix::diag(&phases)) * &v.adjoint())
}

/// Residual `max |U†U - I|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(u.rows()))
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// The three Pauli matrices in `x, y, z` order.
pub fn paulis() -> [CMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// Two-qubit SWAP.
pub fn swap() -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| {
        let (i, a) = (r / 2, r % 2);
        if c == a * 2 + i {
            ONE
        } else {
            ZERO
        }
    })
}

/// CNOT on two qubits with the first factor as control.
pub fn cnot() -> CMatrix {
    CMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

/// CNOT on two qubits with the second factor as control.
pub fn cnot_reversed() -> CMatrix {
    CMatrix::from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(
            move |v| CMatrix::new(rows, cols, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap(),
        )
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let zz = kron(&pauli_z(), &pauli_z());
        assert_eq!(zz, CMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
        let big = kron(&CMatrix::zeros(2, 3), &CMatrix::zeros(4, 5));
        assert_eq!(big.shape(), (8, 15));
    }

    #[test]
    fn partial_trace_of_product_and_singlet() {
        let rho = CMatrix::from_real(&[&[0.7, 0.2], &[0.2, 0.3]]);
        let tau = CMatrix::from_real(&[&[0.5, 0.1], &[0.1, 1.5]]);
        let out = partial_trace(&kron(&rho, &tau), (2, 2), Subsystem::First).unwrap();
        assert!(out.max_abs_diff(&rho.scale_real(2.0)) < 1e-14);
        let out_r = partial_trace(&kron(&rho, &tau), (2, 2), Subsystem::Second).unwrap();
        assert!(out_r.max_abs_diff(&tau) < 1e-14);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, c(s, 0.0), c(-s, 0.0), ZERO];
        let singlet = CMatrix::outer(&psi);
        let marginal = partial_trace(&singlet, (2, 2), Subsystem::First).unwrap();
        assert!(marginal.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, (2, 3), Subsystem::First),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_transpose(&m, (3, 2), Subsystem::Second).is_err());
    }

    #[test]
    fn partial_transpose_of_singlet_has_negative_half() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = CMatrix::outer(&[ZERO, c(s, 0.0), c(-s, 0.0), ZERO]);
        let pt = partial_transpose(&singlet, (2, 2), Subsystem::First).unwrap();
        let vals = herm_eigvals(&pt).unwrap();
        assert!((vals[0] + 0.5).abs() < 1e-12);
        for v in &vals[1..] {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_of_product() {
        let rho = CMatrix::from_rows(&[&[c(0.6, 0.0), c(0.1, 0.2)], &[c(0.1, -0.2), c(0.4, 0.0)]]);
        let tau = CMatrix::from_rows(&[&[c(0.3, 0.0), c(0.0, 0.4)], &[c(0.0, -0.4), c(0.7, 0.0)]]);
        let pt = partial_transpose(&kron(&rho, &tau), (2, 2), Subsystem::Second).unwrap();
        assert!(pt.max_abs_diff(&kron(&rho, &tau.transpose())) < 1e-15);
        let pt1 = partial_transpose(&kron(&rho, &tau), (2, 2), Subsystem::First).unwrap();
        assert!(pt1.max_abs_diff(&kron(&rho.transpose(), &tau)) < 1e-15);
    }

    #[test]
    fn unitary_at_basics() {
        let h = kron(&pauli_x(), &pauli_y());
        assert!(unitary_at(&h, 0.0).unwrap().max_abs_diff(&CMatrix::identity(4)) < 1e-14);
        let u = unitary_at(&pauli_z(), std::f64::consts::PI).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(2).scale_real(-1.0)) < 1e-14);
        let a = unitary_at(&h, 0.3).unwrap();
        let b = unitary_at(&h, 1.1).unwrap();
        assert!((&a * &b).max_abs_diff(&unitary_at(&h, 1.4).unwrap()) < 1e-9);
        assert!(unitary_at(&cnot_reversed().scale(I), 1.0).is_err());
    }

    #[test]
    fn vectorize_round_trip_and_layout() {
        let m = CMatrix::from_real(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let v = m.vectorize();
        assert_eq!(v[1], c(4.0, 0.0));
        assert_eq!(v[2], c(2.0, 0.0));
        assert_eq!(CMatrix::unvectorize(&v, 2, 3), m);
    }

    #[test]
    fn trace_norm_of_hermitian_is_abs_eigen_sum() {
        let m = CMatrix::diag_real(&[0.25, 0.25, -0.25, -0.25]);
        assert!((m.trace_norm() - 1.0).abs() < 1e-14);
        let x = pauli_x().scale_real(0.5);
        assert!((x.trace_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_gates() {
        assert_eq!(herm_eigvals(&swap()).unwrap().len(), 4);
        assert!(unitarity_residual(&cnot()) < 1e-15);
        let rev = &(&kron(&hadamard(), &hadamard()) * &cnot())
            * &kron(&hadamard(), &hadamard());
        assert!(rev.max_abs_diff(&cnot_reversed()) < 1e-14);
    }

    pub(crate) fn hadamard() -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_real(&[&[s, s], &[s, -s]])
    }

    proptest! {
        #[test]
        fn kron_mixed_product(
            a in arb_matrix(2, 3), b in arb_matrix(2, 2),
            cm in arb_matrix(3, 2), d in arb_matrix(2, 3),
        ) {
            let lhs = &kron(&a, &b) * &kron(&cm, &d);
            let rhs = kron(&(&a * &cm), &(&b * &d));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }

        #[test]
        fn kron_associative(a in arb_matrix(2, 2), b in arb_matrix(1, 3), cm in arb_matrix(2, 1)) {
            let lhs = kron(&kron(&a, &b), &cm);
            let rhs = kron(&a, &kron(&b, &cm));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }

        #[test]
        fn partial_trace_linear_and_trace_preserving(
            m in arb_matrix(4, 4), n in arb_matrix(4, 4), alpha in -2.0f64..2.0, beta in -2.0f64..2.0,
        ) {
            let combo = &m.scale_real(alpha) + &n.scale_real(beta);
            for keep in [Subsystem::First, Subsystem::Second] {
                let lhs = partial_trace(&combo, (2, 2), keep).unwrap();
                let rhs = &partial_trace(&m, (2, 2), keep).unwrap().scale_real(alpha)
                    + &partial_trace(&n, (2, 2), keep).unwrap().scale_real(beta);
                prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                prop_assert!((lhs.trace() - combo.trace()).norm() < 1e-12);
            }
        }

        #[test]
        fn partial_transpose_involutive(m in arb_matrix(6, 6)) {
            for which in [Subsystem::First, Subsystem::Second] {
                let twice = partial_transpose(&partial_transpose(&m, (2, 3), which).unwrap(), (2, 3), which).unwrap();
                prop_assert_eq!(&twice, &m);
            }
        }

        #[test]
        fn unitary_at_is_unitary(m in arb_matrix(4, 4), t in -100.0f64..100.0) {
            let h = m.hermitian_part();
            let u = unitary_at(&h, t).unwrap();
            prop_assert!(unitarity_residual(&u) < 1e-10);
        }
    }
}
