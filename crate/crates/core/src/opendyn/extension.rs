//! Linear extension of tabulated assignments.
//!
//! Table states `ρ_i` and images `σ_i` are stacked as columns `R`, `S` of
//! vectorized matrices; an extension is a linear `M` with `M R = S`. It
//! exists iff `S` vanishes on the null space of `R`, i.e. iff every linear
//! relation among the table states is respected by their images. When it
//! does not, a null vector `α` (with `Σ α_i = 0` since states have unit
//! trace) splits into two probability vectors describing one state in two
//! ways whose images disagree.
//!
//! Completion: `M = B + (S - B R) R⁺`, where `B(X) = X ⊗ τ̄` uses the mean
//! reservoir marginal of the table. `M` agrees with the table on its
//! span, equals `B` on the orthogonal complement, and is the product map
//! whenever the table is itself a consistent product table.

use serde::Serialize;

use super::{AffineAssignment, AssignmentMap, TabulatedAssignment};
use crate::channels::Superoperator;
use crate::matcore::{herm_eig, kron, partial_trace, tol, CMatrix, Subsystem};
use crate::states::DensityMatrix;

#[derive(Clone, Debug)]
pub enum ExtensionResult {
    /// Affine (in fact linear) assignment reproducing every table pair.
    Extension(AssignmentMap),
    Conflict(ConflictWitness),
}

/// One state written as two different mixtures of table states whose
/// tabulated images mix to different joint matrices.
#[derive(Clone, Debug, Serialize)]
pub struct ConflictWitness {
    /// `(table index, weight)` pairs.
    pub first: Vec<(usize, f64)>,
    pub second: Vec<(usize, f64)>,
    #[serde(skip)]
    pub state: DensityMatrix,
    #[serde(skip)]
    pub first_image: CMatrix,
    #[serde(skip)]
    pub second_image: CMatrix,
    /// `‖first_image - second_image‖₁`
    pub image_distance: f64,
    /// Frobenius norm of the part of the images on the null space of the
    /// table states.
    pub residual: f64,
}

impl ExtensionResult {
    pub fn is_conflict(&self) -> bool {
        matches!(self, ExtensionResult::Conflict(_))
    }
}

fn column_matrix(cols: &[Vec<num_complex::Complex64>]) -> CMatrix {
    CMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i])
}

/// Rank cutoff for the Gram spectrum of the table states.
fn gram_cutoff(top: f64) -> f64 {
    1e-10 * top.max(1.0)
}

pub fn extend_linearly(table: &TabulatedAssignment) -> ExtensionResult {
    let (d_s, d_r) = table.dims();
    let dims = (d_s, d_r);
    let n_joint = d_s * d_r;
    let pairs = table.pairs();
    let k = pairs.len();

    let tau_bar = pairs
        .iter()
        .map(|p| partial_trace(p.joint.matrix(), dims, Subsystem::Second).expect("dims"))
        .fold(CMatrix::zeros(d_r, d_r), |acc, m| &acc + &m)
        .scale_real(1.0 / k as f64);
    let tau_bar = tau_bar.scale_real(1.0 / tau_bar.trace().re);
    let baseline = Superoperator::from_fn(d_s, n_joint, |m| kron(m, &tau_bar));

    let r_cols: Vec<_> = pairs.iter().map(|p| p.system.matrix().vectorize()).collect();
    let d_cols: Vec<_> = pairs
        .iter()
        .map(|p| {
            let base = baseline.apply_unchecked(p.system.matrix());
            (p.joint.matrix() - &base).vectorize()
        })
        .collect();
    let s_cols: Vec<_> = pairs.iter().map(|p| p.joint.matrix().vectorize()).collect();
    let r = column_matrix(&r_cols);
    let dev = column_matrix(&d_cols);
    let s = column_matrix(&s_cols);

    // Hilbert–Schmidt Gram matrix of the (Hermitian) table states is real.
    let gram = (&r.adjoint() * &r).hermitian_part();
    let eig = herm_eig(&gram).expect("Gram matrix is Hermitian");
    let top = *eig.values.last().expect("nonempty table");
    let cutoff = gram_cutoff(top);

    let mut null = Vec::new();
    let mut transfer = baseline.transfer().clone();
    for (idx, &lambda) in eig.values.iter().enumerate() {
        let u: Vec<_> = eig.vector(idx).iter().map(|z| num_complex::Complex64::new(z.re, 0.0)).collect();
        if lambda <= cutoff {
            null.push(u);
            continue;
        }
        let a = dev.matvec(&u);
        let b = r.matvec(&u);
        let update = CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj() / lambda);
        transfer = &transfer + &update;
    }

    let images: Vec<Vec<_>> = null.iter().map(|u| s.matvec(u)).collect();
    let residual = images
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt();

    if residual <= 1e3 * tol() {
        // Real Gram eigenvectors and Hermitian data keep `M` Hermiticity-preserving.
        let linear = Superoperator::new(d_s, n_joint, transfer).expect("transfer shape");
        let affine = AffineAssignment::new(d_s, d_r, linear, CMatrix::zeros(n_joint, n_joint))
            .expect("extension of a valid table is a valid assignment");
        return ExtensionResult::Extension(AssignmentMap::Affine(affine));
    }

    ExtensionResult::Conflict(conflict_witness(table, &null, &s, residual))
}

/// Picks the null-space direction whose image is largest and splits it into
/// two probability vectors.
fn conflict_witness(table: &TabulatedAssignment, null: &[Vec<num_complex::Complex64>], s: &CMatrix, residual: f64) -> ConflictWitness {
    let pairs = table.pairs();
    let k = pairs.len();
    let sn: Vec<Vec<_>> = null.iter().map(|u| s.matvec(u)).collect();
    let m = null.len();
    let gram = CMatrix::from_fn(m, m, |a, b| sn[a].iter().zip(&sn[b]).map(|(x, y)| x.conj() * y).sum())
        .hermitian_part();
    let beta = herm_eig(&gram).expect("Hermitian").vector(m - 1);
    let mut alpha = vec![0.0f64; k];
    for (b, u) in beta.iter().zip(null) {
        for (a, ui) in alpha.iter_mut().zip(u) {
            *a += (b * ui).re;
        }
    }
    let scale = alpha.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    for a in alpha.iter_mut() {
        if a.abs() < 1e-12 * scale {
            *a = 0.0;
        }
    }
    let pos: f64 = alpha.iter().filter(|a| **a > 0.0).sum();
    let neg: f64 = -alpha.iter().filter(|a| **a < 0.0).sum::<f64>();
    // Σ α = 0 up to rounding; normalize both halves by their mean mass.
    let mass = 0.5 * (pos + neg);
    let first: Vec<(usize, f64)> = alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(i, a)| (i, a / mass))
        .collect();
    let second: Vec<(usize, f64)> = alpha
        .iter()
        .enumerate()
        .filter(|(_, a)| **a < 0.0)
        .map(|(i, a)| (i, -a / mass))
        .collect();
    let mix = |parts: &[(usize, f64)], pick: &dyn Fn(usize) -> CMatrix| {
        let first = pick(0);
        parts
            .iter()
            .fold(CMatrix::zeros(first.rows(), first.cols()), |acc, (i, w)| &acc + &pick(*i).scale_real(*w))
    };
    let sys = |i: usize| pairs[i].system.matrix().clone();
    let joint = |i: usize| pairs[i].joint.matrix().clone();
    let state = mix(&first, &sys);
    let first_image = mix(&first, &joint);
    let second_image = mix(&second, &joint);
    let image_distance = (&first_image - &second_image).trace_norm();
    ConflictWitness {
        first,
        second,
        state: DensityMatrix::from_trusted(state.hermitian_part()),
        first_image,
        second_image,
        image_distance,
        residual,
    }
}
