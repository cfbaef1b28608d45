use rayon::prelude::*;
use serde::Serialize;

use super::{assign, AssignmentMap};
use crate::channels::Superoperator;
use crate::error::{Error, Result};
use crate::matcore::{partial_trace, tol, unitarity_residual, unitary_at, CMatrix, Subsystem};
use crate::search::{minimize, AffineObjective, SearchConfig};
use crate::states::DensityMatrix;

/// Joint evolution of system and reservoir.
#[derive(Clone, Debug)]
pub enum Generator {
    /// A fixed propagator; the time argument is ignored.
    Unitary(CMatrix),
    /// `U_t = exp(-i H t)`.
    Hamiltonian(CMatrix),
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Unitary(u) | Generator::Hamiltonian(u) => u.rows(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::Unitary(u) => {
                let res = unitarity_residual(u);
                if res > 10.0 * tol() {
                    return Err(Error::InvalidGenerator(format!("unitarity residual {res:.3e}")));
                }
            }
            Generator::Hamiltonian(h) => {
                if !h.is_hermitian() {
                    return Err(Error::InvalidGenerator("Hamiltonian is not Hermitian".into()));
                }
            }
        }
        Ok(())
    }

    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        self.validate()?;
        match self {
            Generator::Unitary(u) => Ok(u.clone()),
            Generator::Hamiltonian(h) => unitary_at(h, t),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReducedDynamics {
    pub phi: AssignmentMap,
    pub generator: Generator,
}

impl ReducedDynamics {
    pub fn new(phi: AssignmentMap, generator: Generator) -> Result<Self> {
        let (d_s, d_r) = phi.dims();
        if generator.dim() != d_s * d_r || !matches!(&generator, Generator::Unitary(u) | Generator::Hamiltonian(u) if u.is_square()) {
            return Err(Error::DimensionMismatch(format!(
                "generator of dimension {} for a {d_s}x{d_r} joint space",
                generator.dim()
            )));
        }
        generator.validate()?;
        Ok(Self { phi, generator })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.phi.dims()
    }
}

/// Transfer matrix of the linear extension of
/// `ρ ↦ tr_R(U_t Φ(ρ) U_t†)`, built on the matrix units of the system.
/// The constant part of an affine `Φ` enters as `tr(X) K`.
pub fn reduced_map(rd: &ReducedDynamics, t: f64) -> Result<Superoperator> {
    let phi = rd.phi.homogenized()?;
    let u = rd.generator.propagator(t)?;
    let dims = rd.dims();
    Ok(Superoperator::from_fn(dims.0, dims.0, |m| {
        let joint = phi.apply_unchecked(m).conjugate_by(&u);
        partial_trace(&joint, dims, Subsystem::First).expect("dims checked")
    }))
}

/// `tr_R(U_t Φ(ρ) U_t†)` evaluated directly.
pub fn evolve(rd: &ReducedDynamics, rho: &DensityMatrix, t: f64) -> Result<CMatrix> {
    let joint = assign(&rd.phi, rho)?;
    let u = rd.generator.propagator(t)?;
    partial_trace(&joint.conjugate_by(&u), rd.dims(), Subsystem::First)
}

#[derive(Clone, Debug)]
pub struct PechukasOutcome {
    /// Pure state whose image under `Φ` has `λ_min < -tol`.
    pub witness: Option<DensityMatrix>,
    /// Lowest `λ_min(Φ(ρ))` reached by the search.
    pub min_eigenvalue: f64,
    pub samples_used: usize,
}

/// Searches pure states for one that a consistent, totally defined
/// assignment maps to a non-positive matrix. For consistent non-product
/// maps such a state always exists.
pub fn pechukas_witness(phi: &AssignmentMap, config: SearchConfig) -> Result<PechukasOutcome> {
    let (linear, constant) = phi.affine_parts().ok_or(Error::NotTotallyDefined)?;
    let residual = phi.consistency_residual()?;
    if residual > 10.0 * tol() {
        return Err(Error::Inconsistent(residual));
    }
    let outcome = minimize(
        AffineObjective {
            linear: &linear,
            offset: Some(&constant),
        },
        config,
        f64::NEG_INFINITY,
    );
    let witness = (outcome.min_eigenvalue < -tol()).then(|| outcome.state());
    Ok(PechukasOutcome {
        witness,
        min_eigenvalue: outcome.min_eigenvalue,
        samples_used: outcome.samples_used,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryReport {
    pub times: Vec<f64>,
    /// `‖ρ_S - tr_R Φ(ρ_S)‖₁`
    pub fixed_point_offset: f64,
    /// `‖tr_R(U_t ρ_SR U_t†) - tr_R(U_t Φ(ρ_S) U_t†)‖₁` per time.
    pub deviation: Vec<f64>,
}

/// Compares the true trajectory of `true_initial` with the one generated
/// from the assigned proxy `Φ(ρ_S)`, where `ρ_S` is the true marginal.
pub fn inconsistency_analysis(
    phi: &AssignmentMap,
    rho_s: &DensityMatrix,
    true_initial: &DensityMatrix,
    generator: &Generator,
    times: &[f64],
) -> Result<TrajectoryReport> {
    let dims = phi.dims();
    if true_initial.dim() != dims.0 * dims.1 || generator.dim() != dims.0 * dims.1 {
        return Err(Error::DimensionMismatch("joint dimension".into()));
    }
    generator.validate()?;
    let marginal = partial_trace(true_initial.matrix(), dims, Subsystem::First)?;
    if rho_s.dim() != dims.0 {
        return Err(Error::DimensionMismatch("system state dimension".into()));
    }
    let mismatch = (&marginal - rho_s.matrix()).trace_norm();
    if mismatch > 10.0 * tol() {
        return Err(Error::MarginalMismatch(mismatch));
    }
    let proxy = assign(phi, rho_s)?;
    let offset_matrix = &partial_trace(&proxy, dims, Subsystem::First)? - rho_s.matrix();
    let diff = true_initial.matrix() - &proxy;
    let deviation = times
        .par_iter()
        .map(|&t| {
            let u = generator.propagator(t)?;
            let reduced = partial_trace(&diff.conjugate_by(&u), dims, Subsystem::First)?;
            Ok(reduced.trace_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TrajectoryReport {
        times: times.to_vec(),
        fixed_point_offset: offset_matrix.trace_norm(),
        deviation,
    })
}
