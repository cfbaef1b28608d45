//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then zeroes it with a real Givens rotation. Sweeps run over all
//! pivots in a fixed order, so results are bit-for-bit reproducible.

use num_complex::Complex64;

use super::{tol, CMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition `m = V diag(values) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> CMatrix {
        let v = &self.vectors;
        &(v * &CMatrix::diag_real(&self.values)) * &v.adjoint()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotHermitian(format!(
            "{}x{} matrix is not square",
            m.rows(),
            m.cols()
        )));
    }
    let res = m.hermiticity_residual();
    if res > tol() * m.norm_inf().max(1.0) {
        return Err(Error::NotHermitian(format!("hermiticity residual {res:.3e}")));
    }
    Ok(())
}

/// Jacobi sweeps over a working copy. Returns the diagonalized matrix and,
/// when requested, the accumulated rotations.
fn jacobi(m: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let scale = a.frobenius().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= 1e-300 || g <= 1e-17 * scale {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / g;
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let zeta = (aqq - app) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Rotation block on (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                rotate_columns(&mut a, p, q, gpp, gpq, gqp, gqq);
                rotate_rows(&mut a, p, q, gpp, gpq, gqp, gqq);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, gpp, gpq, gqp, gqq);
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// `X <- X G` restricted to columns `p`, `q`.
fn rotate_columns(
    x: &mut CMatrix,
    p: usize,
    q: usize,
    gpp: Complex64,
    gpq: Complex64,
    gqp: Complex64,
    gqq: Complex64,
) {
    for k in 0..x.rows() {
        let (xp, xq) = (x[(k, p)], x[(k, q)]);
        x[(k, p)] = xp * gpp + xq * gqp;
        x[(k, q)] = xp * gpq + xq * gqq;
    }
}

/// `X <- G† X` restricted to rows `p`, `q`.
fn rotate_rows(
    x: &mut CMatrix,
    p: usize,
    q: usize,
    gpp: Complex64,
    gpq: Complex64,
    gqp: Complex64,
    gqq: Complex64,
) {
    for k in 0..x.cols() {
        let (xp, xq) = (x[(p, k)], x[(q, k)]);
        x[(p, k)] = gpp.conj() * xp + gqp.conj() * xq;
        x[(q, k)] = gpq.conj() * xp + gqq.conj() * xq;
    }
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    check_hermitian(m)?;
    let n = m.rows();
    let (vals, vecs) = jacobi(m, true);
    let vecs = vecs.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let values = order.iter().map(|&i| vals[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn herm_eigvals(m: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let (mut vals, _) = if m.rows() == 2 {
        (closed_form_2x2(m), None)
    } else {
        jacobi(m, false)
    };
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

fn closed_form_2x2(m: &CMatrix) -> Vec<f64> {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    vec![mean - rad, mean + rad]
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(herm_eigvals(m)?[0])
}
