//! Minimization of `λ_min(L(|ψ><ψ|) + K)` over pure input states.
//!
//! Both the positivity audits of maps and the witness search for
//! assignment maps reduce to this problem. Qubit inputs are scanned on a
//! Fibonacci lattice of the Bloch sphere; higher dimensions use seeded
//! Haar-random kets. The best candidate is then refined by alternating
//! minimization: with `v` the lowest eigenvector of the output, the next
//! ket is the lowest eigenvector of `L*(|v><v|)`. Each half-step can only
//! lower `<v|L(|ψ><ψ|) + K|v>`, so the refinement is monotone.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::Superoperator;
use crate::matcore::{herm_eig, herm_eigvals, CMatrix};
use crate::random::random_ket;
use crate::states::{BlochVector, DensityMatrix};

pub const LATTICE_POINTS: usize = 2000;
pub const DESCENT_STEPS: usize = 50;
const CHUNK: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Number of lattice points (qubits) or random kets (otherwise).
    pub budget: usize,
    pub descent_steps: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: LATTICE_POINTS,
            descent_steps: DESCENT_STEPS,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            seed,
            ..Self::default()
        }
    }
}

/// `ψ ↦ L(|ψ><ψ|) + K`, evaluated on its Hermitian part.
#[derive(Clone, Copy, Debug)]
pub struct AffineObjective<'a> {
    pub linear: &'a Superoperator,
    pub offset: Option<&'a CMatrix>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub min_eigenvalue: f64,
    pub ket: Vec<Complex64>,
    pub samples_used: usize,
}

impl SearchOutcome {
    pub fn state(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.ket).expect("unit ket")
    }
}

impl AffineObjective<'_> {
    pub fn image(&self, ket: &[Complex64]) -> CMatrix {
        let out = self.linear.apply_unchecked(&CMatrix::outer(ket));
        match self.offset {
            Some(k) => &out + k,
            None => out,
        }
        .hermitian_part()
    }

    pub fn value(&self, ket: &[Complex64]) -> f64 {
        herm_eigvals(&self.image(ket)).expect("hermitian part")[0]
    }
}

/// `n` nearly uniform points on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            BlochVector::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect()
}

/// Ket with the given unit Bloch vector.
pub fn qubit_ket(b: BlochVector) -> [Complex64; 2] {
    let [x, y, z] = b.0;
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn candidate_batch(dim: usize, start: usize, len: usize, lattice: &[BlochVector], rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    if dim == 2 {
        lattice[start..start + len].iter().map(|b| qubit_ket(*b).to_vec()).collect()
    } else {
        (0..len).map(|_| random_ket(dim, rng)).collect()
    }
}

/// Scans candidates in chunks (stopping after the first chunk whose best
/// value is below `stop_below`) and refines the best one by descent.
pub fn minimize(objective: AffineObjective<'_>, config: SearchConfig, stop_below: f64) -> SearchOutcome {
    let dim = objective.linear.dim_in();
    let budget = config.budget.max(1);
    let lattice = if dim == 2 { fibonacci_sphere(budget) } else { Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut used = 0;
    while used < budget {
        let len = CHUNK.min(budget - used);
        let batch = candidate_batch(dim, used, len, &lattice, &mut rng);
        let values: Vec<f64> = batch.par_iter().map(|k| objective.value(k)).collect();
        used += len;
        for (v, k) in values.into_iter().zip(batch) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, k));
            }
        }
        if best.as_ref().is_some_and(|(b, _)| *b < stop_below) {
            break;
        }
    }
    let (mut value, mut ket) = best.expect("at least one candidate");
    let dual = objective.linear.adjoint();
    for _ in 0..config.descent_steps {
        let out_eig = herm_eig(&objective.image(&ket)).expect("hermitian");
        let v = out_eig.vector(0);
        let pulled = dual.apply_unchecked(&CMatrix::outer(&v)).hermitian_part();
        let next = herm_eig(&pulled).expect("hermitian").vector(0);
        let next_value = objective.value(&next);
        if next_value < value - 1e-15 {
            value = next_value;
            ket = next;
        } else {
            break;
        }
    }
    SearchOutcome {
        min_eigenvalue: value,
        ket,
        samples_used: used,
    }
}
