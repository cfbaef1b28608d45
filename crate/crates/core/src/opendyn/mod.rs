//! Assignment maps `Φ: ρ_S ↦ ρ_SR` and the reduced dynamics they induce,
//! `Λ(ρ_S) = tr_R(U Φ(ρ_S) U†)`.
//!
//! Three kinds of assignment are supported:
//!
//! * `Product`: `ρ ↦ ρ ⊗ τ` for a fixed reservoir state `τ`;
//! * `Affine`: `ρ ↦ L(ρ) + K` with `L` linear and `K` a constant matrix
//!   (a correlation term), defined on the whole state space;
//! * `Tabulated`: finitely many `(ρ_S, ρ_SR)` pairs and nothing else.
//!
//! An affine assignment need not produce positive matrices; [`assign`]
//! returns the candidate joint matrix and leaves validation to the caller.

mod dynamics;
mod extension;

use serde::Serialize;

use crate::channels::Superoperator;
use crate::error::{Error, Result};
use crate::matcore::{kron, partial_trace, pauli_z, tol, CMatrix, Subsystem};
use crate::states::{z_projectors, DensityMatrix};

pub use dynamics::{
    evolve, inconsistency_analysis, pechukas_witness, reduced_map, Generator, PechukasOutcome,
    ReducedDynamics, TrajectoryReport,
};
pub use extension::{extend_linearly, ConflictWitness, ExtensionResult};

#[derive(Clone, Debug)]
pub enum AssignmentMap {
    Product {
        d_s: usize,
        reservoir: DensityMatrix,
    },
    Affine(AffineAssignment),
    Tabulated(TabulatedAssignment),
}

/// `ρ ↦ L(ρ) + K`.
#[derive(Clone, Debug)]
pub struct AffineAssignment {
    d_s: usize,
    d_r: usize,
    linear: Superoperator,
    constant: CMatrix,
}

#[derive(Clone, Debug)]
pub struct TablePair {
    pub system: DensityMatrix,
    pub joint: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct TabulatedAssignment {
    d_s: usize,
    d_r: usize,
    pairs: Vec<TablePair>,
    inconsistent: bool,
}

/// Two states closer than this (entrywise) are treated as the same table key.
const TABLE_MATCH: f64 = 1e-9;

impl AffineAssignment {
    pub fn new(d_s: usize, d_r: usize, linear: Superoperator, constant: CMatrix) -> Result<Self> {
        let n = d_s * d_r;
        if linear.dim_in() != d_s || linear.dim_out() != n {
            return Err(Error::DimensionMismatch(format!(
                "linear part maps {}->{}, expected {d_s}->{n}",
                linear.dim_in(),
                linear.dim_out()
            )));
        }
        if constant.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!("constant part must be {n}x{n}")));
        }
        if !constant.is_hermitian() {
            return Err(Error::NotHermitian("constant part of the assignment".into()));
        }
        if linear.hermiticity_preservation_residual() > tol() {
            return Err(Error::InvalidInput(
                "linear part of the assignment must preserve Hermiticity".into(),
            ));
        }
        // Unit trace on states: tr L(E_ij) + δ_ij tr K = δ_ij.
        let tr_k = constant.trace();
        for i in 0..d_s {
            for j in 0..d_s {
                let mut tr = linear.apply_unchecked(&CMatrix::unit(d_s, i, j)).trace();
                if i == j {
                    tr += tr_k - crate::matcore::ONE;
                }
                if tr.norm() > tol() {
                    return Err(Error::InvalidInput(
                        "assignment does not produce unit-trace joint matrices".into(),
                    ));
                }
            }
        }
        Ok(Self {
            d_s,
            d_r,
            linear,
            constant,
        })
    }

    pub fn linear(&self) -> &Superoperator {
        &self.linear
    }

    pub fn constant(&self) -> &CMatrix {
        &self.constant
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_s, self.d_r)
    }
}

impl TabulatedAssignment {
    /// Pairs must be consistent (`tr_R ρ_SR = ρ_S`) unless `inconsistent`
    /// is set.
    pub fn new(d_s: usize, d_r: usize, pairs: Vec<TablePair>, inconsistent: bool) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("empty assignment table".into()));
        }
        for (k, p) in pairs.iter().enumerate() {
            if p.system.dim() != d_s || p.joint.dim() != d_s * d_r {
                return Err(Error::DimensionMismatch(format!("table entry {k}")));
            }
            if !inconsistent {
                let marg = partial_trace(p.joint.matrix(), (d_s, d_r), Subsystem::First)?;
                let res = (&marg - p.system.matrix()).trace_norm();
                if res > 10.0 * tol() {
                    return Err(Error::Inconsistent(res));
                }
            }
        }
        Ok(Self {
            d_s,
            d_r,
            pairs,
            inconsistent,
        })
    }

    pub fn pairs(&self) -> &[TablePair] {
        &self.pairs
    }

    pub fn is_flagged_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_s, self.d_r)
    }

    pub fn lookup(&self, rho: &CMatrix) -> Option<&TablePair> {
        self.pairs
            .iter()
            .find(|p| p.system.matrix().max_abs_diff(rho) <= TABLE_MATCH)
    }
}

impl AssignmentMap {
    pub fn product(d_s: usize, reservoir: DensityMatrix) -> Self {
        AssignmentMap::Product { d_s, reservoir }
    }

    /// `ρ(r) ↦ ¼(I⊗I + Σ r_i σ_i⊗I + c σ_z⊗σ_z)`: the product with `I/2`
    /// plus a constant `σ_z⊗σ_z` correlation of strength `c`.
    pub fn correlated(c: f64) -> Self {
        let half = CMatrix::identity(2).scale_real(0.5);
        let linear = Superoperator::from_fn(2, 4, |m| kron(m, &half));
        let constant = kron(&pauli_z(), &pauli_z()).scale_real(c / 4.0);
        AssignmentMap::Affine(
            AffineAssignment::new(2, 2, linear, constant).expect("well-formed correlated assignment"),
        )
    }

    /// `ρ ↦ (Σ P_k ρ P_k) ⊗ τ` with `σ_z` projectors: an inconsistent
    /// assignment that forgets coherences.
    pub fn dephased_product(reservoir: DensityMatrix) -> Self {
        let proj = z_projectors();
        let tau = reservoir.matrix().clone();
        let d_r = reservoir.dim();
        let linear = Superoperator::from_fn(2, 2 * d_r, |m| {
            let deph = proj.iter().fold(CMatrix::zeros(2, 2), |acc, p| &acc + &m.conjugate_by(p));
            kron(&deph, &tau)
        });
        AssignmentMap::Affine(
            AffineAssignment::new(2, d_r, linear, CMatrix::zeros(2 * d_r, 2 * d_r))
                .expect("well-formed dephased assignment"),
        )
    }

    pub fn affine(d_s: usize, d_r: usize, linear: Superoperator, constant: CMatrix) -> Result<Self> {
        AffineAssignment::new(d_s, d_r, linear, constant).map(AssignmentMap::Affine)
    }

    pub fn tabulated(d_s: usize, d_r: usize, pairs: Vec<TablePair>, inconsistent: bool) -> Result<Self> {
        TabulatedAssignment::new(d_s, d_r, pairs, inconsistent).map(AssignmentMap::Tabulated)
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            AssignmentMap::Product { d_s, reservoir } => (*d_s, reservoir.dim()),
            AssignmentMap::Affine(a) => a.dims(),
            AssignmentMap::Tabulated(t) => t.dims(),
        }
    }

    pub fn is_totally_defined(&self) -> bool {
        !matches!(self, AssignmentMap::Tabulated(_))
    }

    /// `(L, K)` with `Φ(ρ) = L(ρ) + K`; `None` for tables.
    pub fn affine_parts(&self) -> Option<(Superoperator, CMatrix)> {
        match self {
            AssignmentMap::Product { d_s, reservoir } => {
                let tau = reservoir.matrix();
                let n = d_s * reservoir.dim();
                Some((
                    Superoperator::from_fn(*d_s, n, |m| kron(m, tau)),
                    CMatrix::zeros(n, n),
                ))
            }
            AssignmentMap::Affine(a) => Some((a.linear.clone(), a.constant.clone())),
            AssignmentMap::Tabulated(_) => None,
        }
    }

    /// Linear map agreeing with `Φ` on unit-trace inputs:
    /// `X ↦ L(X) + tr(X) K`.
    pub fn homogenized(&self) -> Result<Superoperator> {
        let (linear, constant) = self.affine_parts().ok_or(Error::NotTotallyDefined)?;
        let (d_s, _) = self.dims();
        Ok(Superoperator::from_fn(d_s, linear.dim_out(), |m| {
            &linear.apply_unchecked(m) + &constant.scale(m.trace())
        }))
    }

    /// `tr_R ∘ Φ` as a linear map on the system (homogenized).
    pub fn marginal_map(&self) -> Result<Superoperator> {
        let h = self.homogenized()?;
        let dims = self.dims();
        Ok(Superoperator::from_fn(dims.0, dims.0, |m| {
            partial_trace(&h.apply_unchecked(m), dims, Subsystem::First).expect("dims")
        }))
    }

    /// Largest entry of `tr_R ∘ Φ - id` over the whole state space. Exact
    /// for totally defined maps.
    pub fn consistency_residual(&self) -> Result<f64> {
        let m = self.marginal_map()?;
        Ok(m.max_abs_diff(&Superoperator::identity(self.dims().0)))
    }
}

/// Candidate joint matrix `Φ(ρ_S)`: Hermitian with unit trace, but not
/// necessarily positive.
pub fn assign(phi: &AssignmentMap, rho: &DensityMatrix) -> Result<CMatrix> {
    let (d_s, _) = phi.dims();
    if rho.dim() != d_s {
        return Err(Error::DimensionMismatch(format!(
            "assignment acts on dimension {d_s}, state has dimension {}",
            rho.dim()
        )));
    }
    match phi {
        AssignmentMap::Product { reservoir, .. } => Ok(kron(rho.matrix(), reservoir.matrix())),
        AssignmentMap::Affine(a) => {
            Ok((&a.linear.apply_unchecked(rho.matrix()) + &a.constant).hermitian_part())
        }
        AssignmentMap::Tabulated(t) => t
            .lookup(rho.matrix())
            .map(|p| p.joint.matrix().clone())
            .ok_or(Error::TableMiss),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    /// `max ‖tr_R Φ(ρ) - ρ‖₁` over the evaluated probes.
    pub max_residual: f64,
    pub worst_probe: Option<usize>,
    pub evaluated: usize,
    /// Probes a table could not evaluate.
    pub skipped: usize,
    pub consistent: bool,
}

pub fn check_consistency(phi: &AssignmentMap, probes: &[DensityMatrix]) -> Result<ConsistencyReport> {
    let dims = phi.dims();
    let mut max_residual = 0.0f64;
    let mut worst_probe = None;
    let (mut evaluated, mut skipped) = (0, 0);
    for (k, rho) in probes.iter().enumerate() {
        let joint = match assign(phi, rho) {
            Ok(j) => j,
            Err(Error::TableMiss) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        evaluated += 1;
        let marg = partial_trace(&joint, dims, Subsystem::First)?;
        let res = (&marg - rho.matrix()).trace_norm();
        if worst_probe.is_none() || res > max_residual {
            max_residual = res;
            worst_probe = Some(k);
        }
    }
    Ok(ConsistencyReport {
        max_residual,
        worst_probe,
        evaluated,
        skipped,
        consistent: max_residual <= 10.0 * tol(),
    })
}

/// One convex-combination probe `λ ρ₁ + (1-λ) ρ₂`.
#[derive(Clone, Debug)]
pub struct LinearityProbe {
    pub first: DensityMatrix,
    pub second: DensityMatrix,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum LinearityOutcome {
    /// `‖Φ(λρ₁ + (1-λ)ρ₂) - λΦρ₁ - (1-λ)Φρ₂‖₁`
    Residual(f64),
    /// The map is not defined on one of the three states involved.
    Undefined,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearityReport {
    pub outcomes: Vec<LinearityOutcome>,
    /// Largest residual over the defined probes.
    pub max_residual: f64,
    pub undefined: usize,
    pub linear: bool,
}

pub fn check_linearity(phi: &AssignmentMap, probes: &[LinearityProbe]) -> Result<LinearityReport> {
    let mut outcomes = Vec::with_capacity(probes.len());
    for p in probes {
        if !(0.0..=1.0).contains(&p.weight) {
            return Err(Error::InvalidInput(format!("weight {} outside [0, 1]", p.weight)));
        }
        let mix = DensityMatrix::mixture(&[(p.weight, &p.first), (1.0 - p.weight, &p.second)])?;
        let images = (assign(phi, &mix), assign(phi, &p.first), assign(phi, &p.second));
        let outcome = match images {
            (Ok(m), Ok(a), Ok(b)) => {
                let combo = &a.scale_real(p.weight) + &b.scale_real(1.0 - p.weight);
                LinearityOutcome::Residual((&m - &combo).trace_norm())
            }
            (Err(Error::TableMiss), _, _) | (_, Err(Error::TableMiss), _) | (_, _, Err(Error::TableMiss)) => {
                LinearityOutcome::Undefined
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Err(e),
        };
        outcomes.push(outcome);
    }
    let max_residual = outcomes
        .iter()
        .filter_map(|o| match o {
            LinearityOutcome::Residual(r) => Some(*r),
            LinearityOutcome::Undefined => None,
        })
        .fold(0.0, f64::max);
    let undefined = outcomes.iter().filter(|o| **o == LinearityOutcome::Undefined).count();
    Ok(LinearityReport {
        outcomes,
        max_residual,
        undefined,
        linear: max_residual <= 10.0 * tol(),
    })
}

/// Deterministic probe states: for qubits the six axis states, the center
/// and `extra` random interior points; otherwise `extra` random states.
pub fn probe_states(d: usize, extra: usize, seed: u64) -> Vec<DensityMatrix> {
    use crate::states::{from_bloch, BlochVector};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if d == 2 {
        for b in [
            BlochVector::ORIGIN,
            BlochVector::X_PLUS,
            BlochVector::X_MINUS,
            BlochVector::Y_PLUS,
            BlochVector::Y_MINUS,
            BlochVector::Z_PLUS,
            BlochVector::Z_MINUS,
        ] {
            out.push(from_bloch(b).expect("unit vector"));
        }
        for _ in 0..extra {
            out.push(from_bloch(crate::random::random_bloch(&mut rng)).expect("in ball"));
        }
    } else {
        out.push(DensityMatrix::maximally_mixed(d));
        for k in 0..extra {
            out.push(if k % 2 == 0 {
                crate::random::random_density(d, &mut rng)
            } else {
                crate::random::random_pure(d, &mut rng)
            });
        }
    }
    out
}

#[cfg(test)]
mod tests;
