//! Projective (Lüders) measurements and selective operations.

use super::{Completeness, KrausSet};
use crate::error::{Error, Result};
use crate::matcore::{herm_eigvals, tol, CMatrix};
use crate::states::DensityMatrix;

#[derive(Clone, Debug)]
pub struct LuedersOutcome {
    /// Position of the projector in the input list.
    pub index: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

#[derive(Clone, Debug)]
pub struct SelectiveOutcome {
    pub probability: f64,
    /// Normalized post-measurement state; `None` when the operation
    /// (almost) never succeeds.
    pub state: Option<DensityMatrix>,
}

fn check_projectors(projectors: &[CMatrix], d: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidProjectors("empty set".into()));
    }
    let eps = 10.0 * tol();
    let mut sum = CMatrix::zeros(d, d);
    for (i, p) in projectors.iter().enumerate() {
        if p.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!("projector {i} has the wrong shape")));
        }
        if !p.is_hermitian() || (p * p).max_abs_diff(p) > eps {
            return Err(Error::InvalidProjectors(format!("P_{i} is not an orthogonal projector")));
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            if (p * q).max_abs_diff(&CMatrix::zeros(d, d)) > eps {
                return Err(Error::InvalidProjectors(format!("P_{i} and P_{j} overlap")));
            }
        }
        sum = &sum + p;
    }
    if sum.max_abs_diff(&CMatrix::identity(d)) > eps {
        return Err(Error::InvalidProjectors("projectors do not sum to the identity".into()));
    }
    Ok(())
}

/// Outcome distribution and post-measurement states `P ρ P / tr(P ρ)`.
/// Branches with zero probability are left out.
pub fn lueders(rho: &DensityMatrix, projectors: &[CMatrix]) -> Result<Vec<LuedersOutcome>> {
    check_projectors(projectors, rho.dim())?;
    let mut out = Vec::new();
    for (index, p) in projectors.iter().enumerate() {
        let probability = p.trace_product(rho.matrix()).re;
        if probability <= tol() {
            continue;
        }
        let post = rho.matrix().conjugate_by(p).scale_real(1.0 / probability);
        out.push(LuedersOutcome {
            index,
            probability,
            state: DensityMatrix::from_trusted(post.hermitian_part()),
        });
    }
    Ok(out)
}

/// `Σ P ρ P`: the state after a measurement whose result is not read.
pub fn nonselective(rho: &DensityMatrix, projectors: &[CMatrix]) -> Result<DensityMatrix> {
    check_projectors(projectors, rho.dim())?;
    let d = rho.dim();
    let sum = projectors
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, p| &acc + &rho.matrix().conjugate_by(p));
    Ok(DensityMatrix::from_trusted(sum))
}

/// Applies a trace-non-increasing Kraus set. The success probability is
/// the trace of the unnormalized output.
pub fn selective_apply(k: &KrausSet, rho: &DensityMatrix) -> Result<SelectiveOutcome> {
    let sum = k.completeness_sum();
    let top = *herm_eigvals(&sum.hermitian_part())?.last().expect("nonempty");
    if k.completeness() == Completeness::Unconstrained || top > 1.0 + tol() {
        return Err(Error::Completeness(format!(
            "Σ W†W has eigenvalue {top:.6} > 1"
        )));
    }
    let unnormalized = k.apply(rho.matrix())?;
    let probability = unnormalized.trace().re.clamp(0.0, 1.0);
    let state = (probability > tol()).then(|| {
        DensityMatrix::from_trusted(unnormalized.scale_real(1.0 / probability).hermitian_part())
    });
    Ok(SelectiveOutcome { probability, state })
}
