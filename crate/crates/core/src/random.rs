//! Seeded random states, unitaries and channels.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{Completeness, KrausSet, Superoperator};
use crate::matcore::{herm_eig, kron, paulis, CMatrix};
use crate::opendyn::AssignmentMap;
use crate::states::DensityMatrix;

fn normal_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| normal_c(rng))
}

/// Haar-random unit ket.
pub fn random_ket(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| normal_c(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_pure(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::from_trusted(CMatrix::outer(&random_ket(d, rng)))
}

/// Hilbert–Schmidt random mixed state.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.scale_real(1.0 / tr).hermitian_part())
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> CMatrix {
    ginibre(d, d, rng).hermitian_part()
}

/// Random unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `A^{-1/2}` for positive definite Hermitian `A`.
fn inverse_sqrt(a: &CMatrix) -> CMatrix {
    let eig = herm_eig(&a.hermitian_part()).expect("Gram matrix is Hermitian");
    let scaled: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    let v = &eig.vectors;
    &(v * &CMatrix::diag_real(&scaled)) * &v.adjoint()
}

/// Random trace-preserving Kraus set with `count` operators: stack
/// Ginibre blocks `G` and normalize by `(G†G)^{-1/2}`.
pub fn random_cptp_kraus(dim_in: usize, dim_out: usize, count: usize, rng: &mut impl Rng) -> KrausSet {
    let blocks: Vec<CMatrix> = (0..count).map(|_| ginibre(dim_out, dim_in, rng)).collect();
    let gram = blocks
        .iter()
        .fold(CMatrix::zeros(dim_in, dim_in), |acc, g| &acc + &(&g.adjoint() * g));
    let norm = inverse_sqrt(&gram);
    let ops = blocks.iter().map(|g| g * &norm).collect();
    KrausSet::new(ops, Completeness::TracePreserving).expect("normalized Kraus set")
}

/// Uniform point in the unit Bloch ball.
pub fn random_bloch(rng: &mut impl Rng) -> crate::states::BlochVector {
    loop {
        let v = crate::states::BlochVector::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if v.norm() <= 1.0 {
            return v;
        }
    }
}

/// Consistent, non-product qubit-qubit assignment
/// `ρ ↦ ρ⊗τ + Σ_k tr(σ_k ρ) A_k⊗B_k + K` with traceless `B_k` and a
/// correlation `K = Σ c_ij σ_i⊗σ_j`. The correlations are scaled so that
/// `λ_min(Φ(I/2)) ≥ margin`, keeping the center inside the domain.
pub fn random_consistent_assignment(margin: f64, rng: &mut impl Rng) -> AssignmentMap {
    let paulis = paulis();
    let tau = &random_density(2, rng).matrix().scale_real(0.8) + &CMatrix::identity(2).scale_real(0.1);
    let mut corr = CMatrix::zeros(4, 4);
    for a in &paulis {
        for b in &paulis {
            corr = &corr + &kron(a, b).scale_real(rng.sample::<f64, _>(StandardNormal));
        }
    }
    let center = kron(&CMatrix::identity(2).scale_real(0.5), &tau);
    let floor = herm_eig(&center).expect("Hermitian").values[0] - margin;
    let spread = herm_eig(&corr).expect("Hermitian").values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let constant = corr.scale_real(floor / spread * rng.random_range(0.2..1.0));
    let couplings: Vec<CMatrix> = (0..3)
        .map(|_| {
            let b = random_hermitian(2, rng);
            let b = &b - &CMatrix::identity(2).scale(b.trace() / 2.0);
            kron(&random_hermitian(2, rng), &b).scale_real(0.1)
        })
        .collect();
    let linear = Superoperator::from_fn(2, 4, |m| {
        couplings
            .iter()
            .zip(&paulis)
            .fold(kron(m, &tau), |acc, (c, s)| &acc + &c.scale(m.trace_product(s)))
    });
    AssignmentMap::affine(2, 2, linear, constant).expect("consistent by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::unitarity_residual;
    use crate::states::validate;
    use rand::SeedableRng;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for d in 2..6 {
            assert!(unitarity_residual(&random_unitary(d, &mut rng)) < 1e-12);
            assert!(validate(random_density(d, &mut rng).matrix()).is_valid());
            assert!(validate(random_pure(d, &mut rng).matrix()).is_valid());
            let k = random_cptp_kraus(d, 2, 3, &mut rng);
            assert!(k.completeness_sum().max_abs_diff(&CMatrix::identity(d)) < 1e-12);
        }
        assert!(random_bloch(&mut rng).norm() <= 1.0);
    }
}
