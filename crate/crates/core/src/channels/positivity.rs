//! Complete positivity (decided exactly from the Choi spectrum) and
//! positivity / n-positivity (falsified by search over pure inputs).

use serde::Serialize;

use super::Superoperator;
use crate::matcore::{psd_threshold, tol};
use crate::search::{minimize, AffineObjective, SearchConfig};
use crate::states::DensityMatrix;

/// Default number of lattice points / random kets per search.
pub const DEFAULT_BUDGET: usize = crate::search::LATTICE_POINTS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PositivityVerdict {
    CertifiedViolation,
    NoViolationFound,
    NotSearched,
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub min_choi_eigenvalue: f64,
    pub is_cp: bool,
    pub is_positive: PositivityVerdict,
    /// Input state whose image has a certified negative eigenvalue.
    pub witness: Option<DensityMatrix>,
    /// Lowest output eigenvalue reached by the search.
    pub search_min_eigenvalue: Option<f64>,
    pub samples_used: usize,
}

fn choi_verdict(t: &Superoperator) -> (f64, bool) {
    let c = t.choi();
    let herm = c.mat.is_hermitian();
    let lmin = c.min_eigenvalue();
    (lmin, herm && lmin >= psd_threshold(c.mat.norm_inf()))
}

/// CP verdict from the minimum Choi eigenvalue.
pub fn is_cp(t: &Superoperator) -> PositivityReport {
    let (min_choi_eigenvalue, cp) = choi_verdict(t);
    PositivityReport {
        min_choi_eigenvalue,
        is_cp: cp,
        is_positive: PositivityVerdict::NotSearched,
        witness: None,
        search_min_eigenvalue: None,
        samples_used: 0,
    }
}

/// Searches pure inputs for an output with a negative eigenvalue. A
/// violation is certified only below `-10·tol`.
pub fn is_positive_map(t: &Superoperator, config: SearchConfig) -> PositivityReport {
    let mut report = is_cp(t);
    let certify = -10.0 * tol();
    let outcome = minimize(
        AffineObjective {
            linear: t,
            offset: None,
        },
        config,
        certify,
    );
    report.samples_used = outcome.samples_used;
    report.search_min_eigenvalue = Some(outcome.min_eigenvalue);
    if outcome.min_eigenvalue < certify {
        report.is_positive = PositivityVerdict::CertifiedViolation;
        report.witness = Some(outcome.state());
    } else {
        report.is_positive = PositivityVerdict::NoViolationFound;
    }
    report
}

/// Positivity search on `T ⊗ id_n`. The Choi fields describe `T` itself;
/// a witness lives on the `(dim_in·n)`-dimensional composite.
pub fn is_n_positive(t: &Superoperator, n: usize, config: SearchConfig) -> PositivityReport {
    assert!(n >= 1, "n-positivity needs n >= 1");
    let composite = t.tensor_identity(n);
    let mut report = is_positive_map(&composite, config);
    let own = is_cp(t);
    report.min_choi_eigenvalue = own.min_choi_eigenvalue;
    report.is_cp = own.is_cp;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{transfer_from_kraus, KrausSet};
    use crate::matcore::{partial_transpose, unitary_at, CMatrix, Subsystem};
    use crate::random;
    use crate::search::fibonacci_sphere;
    use crate::states::{from_bloch, singlet, z_projectors};
    use rand::SeedableRng;

    /// Minimum output eigenvalue over a dense sphere grid, computed directly
    /// from Bloch coordinates without going through the search engine.
    fn sphere_grid_min(t: &Superoperator) -> f64 {
        fibonacci_sphere(20_000)
            .into_iter()
            .map(|b| {
                let out = t.apply(from_bloch(b).unwrap().matrix()).unwrap();
                crate::matcore::min_eigenvalue(&out.hermitian_part()).unwrap()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn flip_map_is_positive_not_cp() {
        let f = Superoperator::flip_map();
        assert!(sphere_grid_min(&f) >= -1e-12);
        let r = is_positive_map(&f, SearchConfig::default());
        assert!(!r.is_cp);
        assert!((r.min_choi_eigenvalue + 1.0).abs() < 1e-9);
        assert_eq!(r.is_positive, PositivityVerdict::NoViolationFound);
        assert_eq!(r.samples_used, 2000);
        assert!(r.witness.is_none());
    }

    #[test]
    fn transpose_map_is_positive() {
        let t = Superoperator::transpose_map(2);
        assert!(sphere_grid_min(&t) >= -1e-12);
        let r = is_n_positive(&t, 1, SearchConfig::with_budget(10_000, 0));
        assert_eq!(r.is_positive, PositivityVerdict::NoViolationFound);
    }

    #[test]
    fn stretched_bloch_map_has_pole_witness() {
        let t = Superoperator::pauli_diagonal([1.0, 1.0, 1.2]);
        assert!((sphere_grid_min(&t) + 0.1).abs() < 1e-4);
        let r = is_positive_map(&t, SearchConfig::default());
        assert_eq!(r.is_positive, PositivityVerdict::CertifiedViolation);
        let w = r.witness.unwrap();
        let z = w.bloch().unwrap().0[2];
        assert!(z.abs() > 0.99, "witness should sit near a pole, z = {z}");
        let out = t.apply(w.matrix()).unwrap();
        let lmin = crate::matcore::min_eigenvalue(&out.hermitian_part()).unwrap();
        assert!(lmin < -10.0 * tol());
        assert!((lmin + 0.1).abs() < 1e-6);
    }

    #[test]
    fn transpose_two_positivity_violation() {
        // Oracle: partial transpose of the singlet has minimum eigenvalue -1/2.
        let pt = partial_transpose(singlet().matrix(), (2, 2), Subsystem::First).unwrap();
        let oracle = crate::matcore::min_eigenvalue(&pt).unwrap();
        assert!((oracle + 0.5).abs() < 1e-12);

        let t = Superoperator::transpose_map(2);
        let r = is_n_positive(&t, 2, SearchConfig::with_budget(10_000, 0));
        assert_eq!(r.is_positive, PositivityVerdict::CertifiedViolation);
        assert!(r.search_min_eigenvalue.unwrap() <= oracle + 1e-6);
        let w = r.witness.unwrap();
        assert_eq!(w.dim(), 4);
        // The optimal witness is maximally entangled: its marginal is I/2.
        let marg = crate::matcore::partial_trace(w.matrix(), (2, 2), Subsystem::First).unwrap();
        assert!(marg.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-4);
    }

    #[test]
    fn cp_maps_pass_all_small_n() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let u = random::random_unitary(2, &mut rng);
        let unitary = Superoperator::conjugation(&u).unwrap();
        let r = is_cp(&unitary);
        assert!(r.is_cp);
        let rank = unitary.choi().spectrum().iter().filter(|&&l| l > 1e-9).count();
        assert_eq!(rank, 1);

        let [p0, p1] = z_projectors();
        let dephasing = transfer_from_kraus(&KrausSet::infer(vec![p0, p1]).unwrap());
        assert!(is_cp(&dephasing).is_cp);

        let amp = transfer_from_kraus(&random::random_cptp_kraus(2, 2, 2, &mut rng));
        for t in [&unitary, &dephasing, &amp] {
            for n in 1..=4 {
                let r = is_n_positive(t, n, SearchConfig::with_budget(1000, 3));
                assert_eq!(r.is_positive, PositivityVerdict::NoViolationFound, "n = {n}");
            }
        }
    }

    #[test]
    fn hamiltonian_channel_is_cp() {
        let h = CMatrix::from_real(&[&[0.3, 1.0], &[1.0, -0.3]]);
        let t = Superoperator::conjugation(&unitary_at(&h, 2.0).unwrap()).unwrap();
        assert!(is_cp(&t).is_cp);
        assert_eq!(is_cp(&t).is_positive, PositivityVerdict::NotSearched);
    }
}
