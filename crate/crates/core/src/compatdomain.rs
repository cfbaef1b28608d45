//! Compatibility domains: the states on which an assignment (or the
//! reduced map it induces) yields a positive matrix.
//!
//! Every predicate here has the form `λ_min(L(ρ) + K) ≥ -tol` for a linear
//! `L` and constant `K`, so membership is a spectral test, the domain is
//! convex and `λ_min` is concave along every segment. Radii and landscapes
//! are offered for qubit systems only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::Superoperator;
use crate::error::{Error, Result};
use crate::matcore::{herm_eigvals, tol, CMatrix};
use crate::opendyn::{reduced_map, AssignmentMap, ReducedDynamics};
use crate::random::{random_bloch, random_density};
use crate::search::fibonacci_sphere;
use crate::states::{from_bloch, BlochVector, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Predicate {
    /// `Φ(ρ) ≥ 0`
    PhiPositive,
    /// `Λ(ρ) ≥ 0`
    LambdaPositive,
}

#[derive(Clone, Debug)]
pub enum Subject {
    Assignment(AssignmentMap),
    /// Reduced dynamics at a fixed time.
    Reduced(ReducedDynamics, f64),
}

/// A membership predicate, precomputed as an affine map.
#[derive(Clone, Debug)]
pub struct DomainQuery {
    predicate: Predicate,
    dim: usize,
    linear: Superoperator,
    constant: CMatrix,
}

impl DomainQuery {
    /// For an assignment subject the Λ-predicate uses `tr_R ∘ Φ`, the
    /// reduced map with no evolution.
    pub fn new(subject: &Subject, predicate: Predicate) -> Result<Self> {
        let (linear, constant) = match (subject, predicate) {
            (Subject::Assignment(phi), Predicate::PhiPositive) | (Subject::Reduced(ReducedDynamics { phi, .. }, _), Predicate::PhiPositive) => {
                phi.affine_parts().ok_or(Error::NotTotallyDefined)?
            }
            (Subject::Assignment(phi), Predicate::LambdaPositive) => {
                let d = phi.dims().0;
                (phi.marginal_map()?, CMatrix::zeros(d, d))
            }
            (Subject::Reduced(rd, t), Predicate::LambdaPositive) => {
                let d = rd.dims().0;
                (reduced_map(rd, *t)?, CMatrix::zeros(d, d))
            }
        };
        Ok(Self {
            predicate,
            dim: linear.dim_in(),
            linear,
            constant,
        })
    }

    pub fn phi(phi: &AssignmentMap) -> Result<Self> {
        Self::new(&Subject::Assignment(phi.clone()), Predicate::PhiPositive)
    }

    pub fn predicate(&self) -> Predicate {
        self.predicate
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `λ_min` of the predicate matrix at `ρ`.
    pub fn min_eigenvalue(&self, rho: &CMatrix) -> f64 {
        let m = (&self.linear.apply_unchecked(rho) + &self.constant).hermitian_part();
        herm_eigvals(&m).expect("Hermitian part")[0]
    }

    fn at_bloch(&self, r: BlochVector) -> f64 {
        self.min_eigenvalue(from_bloch(r).expect("inside the ball").matrix())
    }

    fn require_qubit(&self) -> Result<()> {
        if self.dim != 2 {
            return Err(Error::NotQubit(self.dim));
        }
        Ok(())
    }
}

fn is_member(lmin: f64) -> bool {
    lmin >= -tol()
}

/// `(member, λ_min)`.
pub fn membership(q: &DomainQuery, rho: &DensityMatrix) -> Result<(bool, f64)> {
    if rho.dim() != q.dim {
        return Err(Error::DimensionMismatch(format!("query on dimension {}, state of dimension {}", q.dim, rho.dim())));
    }
    let l = q.min_eigenvalue(rho.matrix());
    Ok((is_member(l), l))
}

const RADIUS_TOL: f64 = 1e-10;

/// Largest `r ∈ [0, 1]` with `r·direction` in the domain. Membership along
/// a ray from an interior point is an interval, so bisection is exact up
/// to the stopping width.
pub fn boundary_radius(q: &DomainQuery, direction: BlochVector) -> Result<f64> {
    q.require_qubit()?;
    let dir = direction
        .normalized()
        .ok_or_else(|| Error::InvalidInput("zero direction".into()))?;
    let center = q.at_bloch(BlochVector::ORIGIN);
    if !is_member(center) {
        return Err(Error::EmptyInterior(center));
    }
    if is_member(q.at_bloch(dir)) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > RADIUS_TOL {
        let mid = 0.5 * (lo + hi);
        if is_member(q.at_bloch(dir.scaled(mid))) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Center first, then Fibonacci shells at `r = 0.1, 0.2, …, 1.0` with
/// `resolution` points each. Rows are `[r_x, r_y, r_z, λ_min]`.
pub fn landscape(q: &DomainQuery, resolution: usize) -> Result<Vec<[f64; 4]>> {
    q.require_qubit()?;
    let shell = fibonacci_sphere(resolution.max(1));
    let mut points = vec![BlochVector::ORIGIN];
    for k in 1..=10 {
        let r = k as f64 / 10.0;
        points.extend(shell.iter().map(|p| p.scaled(r)));
    }
    Ok(points
        .par_iter()
        .map(|p| {
            let [x, y, z] = p.0;
            [x, y, z, q.at_bloch(*p)]
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConvexityReport {
    pub trials: usize,
    /// Trials for which two members could not be drawn.
    pub skipped: usize,
    /// Midpoints of two members that fall outside the domain.
    pub midpoint_failures: usize,
    /// Segments with `λ_min(mid) < ½(λ_min(a) + λ_min(b)) - 1e-12`.
    pub concavity_failures: usize,
    /// Smallest `λ_min(mid) - ½(λ_min(a) + λ_min(b))` seen.
    pub worst_concavity_gap: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.midpoint_failures == 0 && self.concavity_failures == 0
    }
}

const CONCAVITY_SLACK: f64 = 1e-12;
const DRAW_ATTEMPTS: usize = 1000;

fn random_state(d: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    if d == 2 {
        from_bloch(random_bloch(rng)).expect("inside the ball")
    } else {
        random_density(d, rng)
    }
}

fn random_member(q: &DomainQuery, rng: &mut ChaCha8Rng) -> Option<DensityMatrix> {
    (0..DRAW_ATTEMPTS)
        .map(|_| random_state(q.dim, rng))
        .find(|rho| is_member(q.min_eigenvalue(rho.matrix())))
}

/// Draws member pairs and tests their midpoints, and separately probes
/// concavity of `λ_min` on random segments of the state space.
pub fn convexity_check(q: &DomainQuery, trials: usize, seed: u64) -> ConvexityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ConvexityReport {
        trials,
        skipped: 0,
        midpoint_failures: 0,
        concavity_failures: 0,
        worst_concavity_gap: f64::INFINITY,
    };
    let midpoint = |a: &DensityMatrix, b: &DensityMatrix| (a.matrix() + b.matrix()).scale_real(0.5);
    for _ in 0..trials {
        match (random_member(q, &mut rng), random_member(q, &mut rng)) {
            (Some(a), Some(b)) => {
                if !is_member(q.min_eigenvalue(&midpoint(&a, &b))) {
                    report.midpoint_failures += 1;
                }
            }
            _ => report.skipped += 1,
        }
        let a = random_state(q.dim, &mut rng);
        let b = random_state(q.dim, &mut rng);
        let gap = q.min_eigenvalue(&midpoint(&a, &b))
            - 0.5 * (q.min_eigenvalue(a.matrix()) + q.min_eigenvalue(b.matrix()));
        report.worst_concavity_gap = report.worst_concavity_gap.min(gap);
        if gap < -CONCAVITY_SLACK {
            report.concavity_failures += 1;
        }
    }
    report
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ImplicationReport {
    pub probes: usize,
    pub phi_members: usize,
    pub lambda_members: usize,
    /// Φ-members that are not Λ-members; must be zero.
    pub counterexamples: usize,
    /// Λ-members that are not Φ-members (recorded, never asserted).
    pub converse_gaps: usize,
}

/// Compares the two predicates of `rd` at time `t` on the given probes.
pub fn implication_check(rd: &ReducedDynamics, t: f64, probes: &[DensityMatrix]) -> Result<ImplicationReport> {
    let subject = Subject::Reduced(rd.clone(), t);
    let phi_q = DomainQuery::new(&subject, Predicate::PhiPositive)?;
    let lam_q = DomainQuery::new(&subject, Predicate::LambdaPositive)?;
    let mut report = ImplicationReport {
        probes: probes.len(),
        phi_members: 0,
        lambda_members: 0,
        counterexamples: 0,
        converse_gaps: 0,
    };
    for rho in probes {
        let (phi_in, _) = membership(&phi_q, rho)?;
        let (lam_in, _) = membership(&lam_q, rho)?;
        report.phi_members += phi_in as usize;
        report.lambda_members += lam_in as usize;
        report.counterexamples += (phi_in && !lam_in) as usize;
        report.converse_gaps += (lam_in && !phi_in) as usize;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RayRadius {
    pub direction: [f64; 3],
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DomainReport {
    pub predicate: Predicate,
    pub tol: f64,
    pub seed: u64,
    pub center_member: bool,
    pub center_min_eigenvalue: f64,
    /// The maximally mixed state is not a member; radii are then omitted.
    pub empty_interior: bool,
    pub radii: Vec<RayRadius>,
    /// `[r_x, r_y, r_z, λ_min]`, center first.
    pub samples: Vec<[f64; 4]>,
    pub convexity: Option<ConvexityReport>,
}

/// The six signed coordinate axes.
pub fn axis_rays() -> Vec<BlochVector> {
    vec![
        BlochVector::X_PLUS,
        BlochVector::X_MINUS,
        BlochVector::Y_PLUS,
        BlochVector::Y_MINUS,
        BlochVector::Z_PLUS,
        BlochVector::Z_MINUS,
    ]
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub resolution: usize,
    pub rays: Vec<BlochVector>,
    pub convexity_trials: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            resolution: 50,
            rays: axis_rays(),
            convexity_trials: 200,
            seed: 0,
        }
    }
}

/// Full qubit report: center membership, radii, landscape and convexity.
pub fn domain_report(q: &DomainQuery, options: &ReportOptions) -> Result<DomainReport> {
    q.require_qubit()?;
    let center = q.at_bloch(BlochVector::ORIGIN);
    let empty_interior = !is_member(center);
    let radii = if empty_interior {
        Vec::new()
    } else {
        options
            .rays
            .iter()
            .map(|d| {
                Ok(RayRadius {
                    direction: d.normalized().ok_or_else(|| Error::InvalidInput("zero ray".into()))?.0,
                    radius: boundary_radius(q, *d)?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    };
    let convexity = (options.convexity_trials > 0).then(|| convexity_check(q, options.convexity_trials, options.seed));
    Ok(DomainReport {
        predicate: q.predicate,
        tol: tol(),
        seed: options.seed,
        center_member: !empty_interior,
        center_min_eigenvalue: center,
        empty_interior,
        radii,
        samples: landscape(q, options.resolution)?,
        convexity,
    })
}

impl DomainReport {
    /// Samples as CSV with header `rx,ry,rz,lmin`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rx,ry,rz,lmin\n");
        for [x, y, z, l] in &self.samples {
            out.push_str(&format!("{x},{y},{z},{l}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{cnot_reversed, kron, pauli_x, pauli_z};
    use crate::opendyn::Generator;
    use crate::states::expectation;

    fn correlated(c: f64) -> DomainQuery {
        DomainQuery::phi(&AssignmentMap::correlated(c)).unwrap()
    }

    fn reversed_cnot_dynamics(c: f64) -> ReducedDynamics {
        ReducedDynamics::new(AssignmentMap::correlated(c), Generator::Unitary(cnot_reversed())).unwrap()
    }

    #[test]
    fn membership_examples() {
        let q = correlated(0.5);
        let (inside, l) = membership(&q, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(inside && (l - 0.125).abs() < 1e-12);
        let (inside, l) = membership(&q, &from_bloch(BlochVector::Z_PLUS).unwrap()).unwrap();
        assert!(!inside && (l + 0.125).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let product = DomainQuery::phi(&AssignmentMap::product(2, random_density(2, &mut rng))).unwrap();
        for _ in 0..100 {
            assert!(membership(&product, &random_state(2, &mut rng)).unwrap().0);
        }
    }

    #[test]
    fn radii_of_correlated_family() {
        for c in [0.0, 0.25, 0.5, 0.9] {
            let q = correlated(c);
            let rz = boundary_radius(&q, BlochVector::Z_PLUS).unwrap();
            let rx = boundary_radius(&q, BlochVector::X_PLUS).unwrap();
            assert!((rz - (1.0 - c)).abs() < 1e-8, "{c}: {rz}");
            assert!((rx - (1.0 - c * c).sqrt()).abs() < 1e-8, "{c}: {rx}");
            assert!((boundary_radius(&q, BlochVector::Z_MINUS).unwrap() - rz).abs() < 1e-8);
            assert!((boundary_radius(&q, BlochVector::X_MINUS).unwrap() - rx).abs() < 1e-8);
        }
    }

    #[test]
    fn radius_needs_interior_anchor_and_qubit() {
        let shifted = AssignmentMap::affine(
            2,
            2,
            AssignmentMap::correlated(0.0).affine_parts().unwrap().0,
            kron(&pauli_x(), &pauli_z()).scale_real(0.4),
        )
        .unwrap();
        let q = DomainQuery::phi(&shifted).unwrap();
        assert!(matches!(boundary_radius(&q, BlochVector::Z_PLUS), Err(Error::EmptyInterior(_))));
        let report = domain_report(&q, &ReportOptions { convexity_trials: 0, ..Default::default() }).unwrap();
        assert!(report.empty_interior && report.radii.is_empty());

        let big = DomainQuery::phi(&AssignmentMap::product(3, DensityMatrix::maximally_mixed(2))).unwrap();
        assert!(matches!(boundary_radius(&big, BlochVector::Z_PLUS), Err(Error::NotQubit(3))));
        assert!(matches!(landscape(&big, 10), Err(Error::NotQubit(3))));
    }

    #[test]
    fn product_domain_is_full_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = DomainQuery::phi(&AssignmentMap::product(2, random_density(2, &mut rng))).unwrap();
        for d in fibonacci_sphere(40) {
            assert!((boundary_radius(&q, d).unwrap() - 1.0).abs() < 1e-8);
        }
        assert!(landscape(&q, 30).unwrap().iter().all(|s| s[3] >= -1e-12));
    }

    #[test]
    fn landscape_is_axially_symmetric() {
        let c = 0.5;
        let q = correlated(c);
        let samples = landscape(&q, 64).unwrap();
        assert_eq!(samples.len(), 1 + 640);
        assert_eq!(samples[0][..3], [0.0, 0.0, 0.0]);
        for [x, y, z, l] in samples {
            let oracle = 0.25 * (1.0 - (x * x + y * y + (z.abs() + c).powi(2)).sqrt());
            assert!((l - oracle).abs() < 1e-12);
            let rho = from_bloch(BlochVector::new(x, y, z)).unwrap();
            assert_eq!(membership(&q, &rho).unwrap().0, l >= -tol());
        }
        assert!(landscape(&correlated(1.0), 8).unwrap()[0][3].abs() < 1e-15);
    }

    #[test]
    fn convexity_for_both_predicates() {
        let r = convexity_check(&correlated(0.5), 300, 1);
        assert!(r.passed() && r.skipped == 0, "{r:?}");
        let subject = Subject::Reduced(reversed_cnot_dynamics(0.5), 0.0);
        let q = DomainQuery::new(&subject, Predicate::LambdaPositive).unwrap();
        let r = convexity_check(&q, 300, 2);
        assert!(r.passed() && r.skipped == 0, "{r:?}");
    }

    #[test]
    fn lambda_domain_of_reversed_cnot() {
        // Λ(ρ) = ½(I + r_x σ_x + c σ_z): member iff r_x² + c² ≤ 1.
        let c = 0.5;
        let q = DomainQuery::new(&Subject::Reduced(reversed_cnot_dynamics(c), 0.0), Predicate::LambdaPositive).unwrap();
        assert!((boundary_radius(&q, BlochVector::X_PLUS).unwrap() - (1.0 - c * c).sqrt()).abs() < 1e-8);
        assert!((boundary_radius(&q, BlochVector::Z_PLUS).unwrap() - 1.0).abs() < 1e-12);
        let z = from_bloch(BlochVector::Z_PLUS).unwrap();
        assert!(expectation(&z, &pauli_z()).unwrap() > 0.99);
        // z₊ is outside the Φ-domain but inside the Λ-domain.
        assert!(membership(&q, &z).unwrap().0);
        assert!(!membership(&correlated(c), &z).unwrap().0);
    }

    #[test]
    fn phi_membership_implies_lambda_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let probes: Vec<DensityMatrix> = (0..500).map(|_| random_state(2, &mut rng)).collect();
        let rd = reversed_cnot_dynamics(0.5);
        let r = implication_check(&rd, 0.0, &probes).unwrap();
        assert_eq!(r.counterexamples, 0);
        assert!(r.phi_members > 0 && r.lambda_members >= r.phi_members);
    }

    #[test]
    fn report_serializes_and_exports_csv() {
        let report = domain_report(&correlated(0.5), &ReportOptions { resolution: 4, ..Default::default() }).unwrap();
        assert!(report.center_member && !report.empty_interior);
        assert_eq!(report.radii.len(), 6);
        let json = serde_json::to_string(&report).unwrap();
        let back: DomainReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let csv = report.to_csv();
        assert!(csv.starts_with("rx,ry,rz,lmin\n"));
        assert_eq!(csv.lines().count(), 1 + report.samples.len());
    }
}
